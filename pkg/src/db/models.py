from sqlalchemy import Column, Integer, String, Float, DateTime, ForeignKey, Text, Boolean
from sqlalchemy.orm import relationship, declarative_base
from sqlalchemy.sql import func

Base = declarative_base()


# ============================================
# SOLVER RUNS
# ============================================

class SolverRun(Base):
    __tablename__ = 'solver_runs'

    run_id = Column(Integer, primary_key=True, autoincrement=True)
    automaton_digest = Column(String(64), nullable=False, index=True)
    automaton_text = Column(Text, nullable=False)
    command = Column(String(20), nullable=False)
    verdict = Column(String(20), nullable=False)
    families = Column(Integer, default=0)
    closures_completed = Column(Integer, default=0)
    cap = Column(String(100))
    elapsed = Column(Float)
    created_at = Column(DateTime, server_default=func.now())

    certificate = relationship("CertificateRecord", back_populates="run", uselist=False,
                               cascade="all, delete-orphan")
    oracle_runs = relationship("OracleRun", back_populates="run", cascade="all, delete-orphan")

    def __repr__(self):
        return f"<SolverRun {self.run_id} {self.command} {self.verdict} ({self.automaton_digest[:8]}...)>"


class CertificateRecord(Base):
    __tablename__ = 'certificates'

    run_id = Column(Integer, ForeignKey('solver_runs.run_id', ondelete='CASCADE'), primary_key=True)
    certificate_text = Column(Text, nullable=False)
    k = Column(Integer, nullable=False)
    l = Column(Integer, nullable=False)
    verified = Column(Boolean, default=False)

    run = relationship("SolverRun", back_populates="certificate")

    def __repr__(self):
        return f"<CertificateRecord run={self.run_id} k={self.k} l={self.l}>"


class OracleRun(Base):
    __tablename__ = 'oracle_runs'

    oracle_id = Column(Integer, primary_key=True, autoincrement=True)
    run_id = Column(Integer, ForeignKey('solver_runs.run_id', ondelete='CASCADE'), nullable=False)
    bound = Column(Integer, nullable=False)
    outcome = Column(String(20), nullable=False)
    move_count = Column(Integer, default=0)
    words_explored = Column(Integer, default=0)

    run = relationship("SolverRun", back_populates="oracle_runs")

    def __repr__(self):
        return f"<OracleRun {self.oracle_id} B={self.bound} {self.outcome}>"
