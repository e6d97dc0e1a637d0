import logging
from typing import Optional

from sqlalchemy.orm import Session

from game import serialize

from .models import Base, SolverRun, CertificateRecord, OracleRun

logger = logging.getLogger(__name__)


def init_db(engine):
    Base.metadata.create_all(bind=engine)


def archive_verdict(session: Session, aut, verdict, certificate_text: Optional[str] = None,
                    verified: bool = False) -> SolverRun:
    """Store a decide result, with its certificate when the verdict is YES."""
    run = SolverRun(
        automaton_digest=aut.digest(),
        automaton_text=serialize(aut),
        command='decide',
        verdict=verdict.kind.value,
        families=verdict.stats.families_explored + verdict.stats.initial_families,
        closures_completed=verdict.stats.closures_completed,
        cap=verdict.cap,
        elapsed=verdict.stats.elapsed,
    )
    session.add(run)
    session.flush()

    if verdict.certificate is not None and certificate_text is not None:
        session.add(CertificateRecord(
            run_id=run.run_id,
            certificate_text=certificate_text,
            k=verdict.certificate.k,
            l=verdict.certificate.l,
            verified=verified,
        ))

    session.commit()
    logger.info(f"Archived {run!r}")
    return run


def archive_oracle(session: Session, aut, result) -> SolverRun:
    run = SolverRun(
        automaton_digest=aut.digest(),
        automaton_text=serialize(aut),
        command='oracle',
        verdict=result.outcome.value,
        cap=result.cap,
    )
    session.add(run)
    session.flush()
    session.add(OracleRun(
        run_id=run.run_id,
        bound=result.bound,
        outcome=result.outcome.value,
        move_count=len(result.moves),
        words_explored=result.words_explored,
    ))
    session.commit()
    logger.info(f"Archived oracle run B={result.bound}: {result.outcome.value}")
    return run


def runs_for(session: Session, aut):
    return (session.query(SolverRun)
            .filter_by(automaton_digest=aut.digest())
            .order_by(SolverRun.run_id)
            .all())
