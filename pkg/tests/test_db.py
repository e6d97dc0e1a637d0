import pytest
from sqlalchemy import create_engine
from sqlalchemy.orm import sessionmaker

import db.config
from db import CertificateRecord, OracleRun, SolverRun, archive_oracle, archive_verdict, init_db, runs_for
from decision import decide, format_certificate
from oracle import bounded_solve


@pytest.fixture
def session():
    engine = create_engine('sqlite://')
    init_db(engine)
    s = sessionmaker(bind=engine)()
    yield s
    s.close()


def test_archive_yes_verdict(session, fig1):
    verdict = decide(fig1)
    text = format_certificate(fig1, verdict.certificate)
    run = archive_verdict(session, fig1, verdict, text, verified=True)

    stored = session.get(SolverRun, run.run_id)
    assert stored.command == 'decide'
    assert stored.verdict == 'YES'
    assert stored.automaton_digest == fig1.digest()
    assert stored.certificate.k == 1
    assert stored.certificate.verified
    assert stored.certificate.certificate_text == text


def test_archive_no_verdict_has_no_certificate(session, fig7):
    run = archive_verdict(session, fig7, decide(fig7))
    assert run.verdict == 'NO'
    assert session.query(CertificateRecord).count() == 0


def test_archive_oracle(session, fig1):
    run = archive_oracle(session, fig1, bounded_solve(fig1, 3))
    record = session.query(OracleRun).filter_by(run_id=run.run_id).one()
    assert (record.bound, record.outcome, record.move_count) == (3, 'WINNABLE', 3)
    assert run.oracle_runs == [record]


def test_runs_for_filters_by_automaton(session, fig1, fig7):
    archive_oracle(session, fig1, bounded_solve(fig1, 1))
    archive_verdict(session, fig7, decide(fig7))
    archive_oracle(session, fig1, bounded_solve(fig1, 2))
    runs = runs_for(session, fig1)
    assert [r.command for r in runs] == ['oracle', 'oracle']
    assert runs[0].run_id < runs[1].run_id


def test_database_url(monkeypatch):
    monkeypatch.setenv('DATABASE_URL', 'sqlite:///elsewhere.db')
    assert db.config.database_url() == 'sqlite:///elsewhere.db'
    monkeypatch.delenv('DATABASE_URL')
    monkeypatch.setattr(db.config, 'DB_HOST', 'localhost')
    assert db.config.database_url().startswith('mysql+pymysql://')
    monkeypatch.setattr(db.config, 'DB_HOST', None)
    assert db.config.database_url() == 'sqlite:///reachtogether.db'
