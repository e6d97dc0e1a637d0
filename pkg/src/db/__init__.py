from .config import engine, SessionLocal, get_db, DATABASE_URL
from .models import Base, SolverRun, CertificateRecord, OracleRun
from .archive import init_db, archive_verdict, archive_oracle, runs_for

__all__ = [
    'engine', 'SessionLocal', 'get_db', 'DATABASE_URL',
    'Base', 'SolverRun', 'CertificateRecord', 'OracleRun',
    'init_db', 'archive_verdict', 'archive_oracle', 'runs_for'
]
