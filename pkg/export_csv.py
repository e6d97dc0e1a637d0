#!/usr/bin/env python3
"""
Dump the run archive to CSV, one file per table plus a joined summary.

Usage:
    python export_csv.py [--out data/exports] [--digest <automaton digest prefix>]
"""

import os
import csv
import sys
import argparse
sys.path.insert(0, 'src')

from sqlalchemy import select

from db import SessionLocal, SolverRun, CertificateRecord, OracleRun

MODELS = [SolverRun, CertificateRecord, OracleRun]

SUMMARY_COLUMNS = ['run_id', 'command', 'verdict', 'digest', 'k', 'l', 'verified', 'bound', 'elapsed']


def _runs_query(digest):
    query = select(SolverRun).order_by(SolverRun.run_id)
    if digest:
        query = query.where(SolverRun.automaton_digest.startswith(digest))
    return query


def export_model(session, model, output_dir: str, run_ids) -> int:
    """Write every row of model belonging to one of run_ids; returns the row count."""
    columns = [c.name for c in model.__table__.columns]
    path = os.path.join(output_dir, f'{model.__tablename__}.csv')
    rows = [r for r in session.scalars(select(model)) if r.run_id in run_ids]

    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f)
        writer.writerow(columns)
        for r in rows:
            writer.writerow([getattr(r, c) for c in columns])
    return len(rows)


def export_summary(runs, output_dir: str):
    path = os.path.join(output_dir, 'summary.csv')
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f)
        writer.writerow(SUMMARY_COLUMNS)
        for run in runs:
            cert = run.certificate
            bounds = ' '.join(str(o.bound) for o in run.oracle_runs)
            writer.writerow([
                run.run_id, run.command, run.verdict, run.automaton_digest[:12],
                cert.k if cert else '', cert.l if cert else '', cert.verified if cert else '',
                bounds, f"{run.elapsed:.3f}" if run.elapsed is not None else '',
            ])


def main():
    parser = argparse.ArgumentParser(description="Export the run archive to CSV")
    parser.add_argument('--out', default='data/exports')
    parser.add_argument('--digest', help="only runs whose automaton digest starts with this")
    args = parser.parse_args()

    os.makedirs(args.out, exist_ok=True)
    print(f"📤 Exporting run archive to {args.out}/")
    print("-" * 40)

    session = SessionLocal()
    try:
        runs = list(session.scalars(_runs_query(args.digest)))
        run_ids = {r.run_id for r in runs}
        for model in MODELS:
            count = export_model(session, model, args.out, run_ids)
            print(f"  {model.__tablename__}: {count} rows")
        export_summary(runs, args.out)
        print(f"  summary: {len(runs)} runs")
    finally:
        session.close()

    print("-" * 40)
    print("✅ Done!")


if __name__ == '__main__':
    main()
