#!/usr/bin/env python3
"""
Decide every figure fixture and archive the verdicts.

Fixtures:
- fig1, fig5: positive instances
- fig3(n1, n2) for n1, n2 in 1..3: positive iff gcd(n1, n2) = 1
- fig7: negative, although every bound is winnable

Usage:
    python record_fixture_runs.py
"""

import sys
import logging
sys.path.insert(0, 'src')

from config import LOG_LEVEL
from db import SessionLocal, engine, init_db, archive_verdict
from decision import decide, format_certificate, verify_certificate
from instances import FIGURES, gen_fig3

logging.basicConfig(
    level=LOG_LEVEL,
    format='%(asctime)s - %(levelname)s - %(message)s'
)


def fixtures():
    for name, gen in FIGURES.items():
        yield name, gen()
    for n1 in range(1, 4):
        for n2 in range(1, 4):
            yield f"fig3({n1},{n2})", gen_fig3(n1, n2)


def main():
    print("🧮 Deciding figure fixtures")
    print("=" * 50)

    init_db(engine)
    session = SessionLocal()

    try:
        for name, aut in fixtures():
            verdict = decide(aut)
            cert_text = None
            verified = False
            if verdict.certificate is not None:
                cert_text = format_certificate(aut, verdict.certificate)
                verified = verify_certificate(aut, verdict.certificate).ok
            run = archive_verdict(session, aut, verdict, cert_text, verified)

            mark = {'YES': '✅', 'NO': '⛔'}.get(verdict.kind.value, '⚠️ ')
            print(f"\n  {mark} {name}: {verdict.kind.value}")
            print(f"     Run: {run.run_id}")
            print(f"     Elapsed: {verdict.stats.elapsed:.2f}s")
            if verdict.certificate is not None:
                print(f"     k = {verdict.certificate.k}, l = {verdict.certificate.l}, verified: {verified}")

        print("\n" + "=" * 50)
        print("✅ Done!")

    finally:
        session.close()


if __name__ == '__main__':
    main()
