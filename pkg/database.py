import os
from datetime import datetime, timezone
from typing import Optional

from sqlalchemy import Column, DateTime, ForeignKey, Index, Integer, String, Text, create_engine
from sqlalchemy.engine import Engine
from sqlalchemy.orm import declarative_base, relationship, sessionmaker

from constants import EnvVars
from utils import setup_logger

logger = setup_logger("database")

DEFAULT_DATABASE_URL = "sqlite:///./spacing_complexity_runs.db"

Base = declarative_base()
SessionLocal = sessionmaker(autocommit=False, autoflush=False)
engine: Optional[Engine] = None


def configure_engine(url: Optional[str] = None) -> Engine:
    """
    Bind SessionLocal to `url`, DATABASE_URL, or the SQLite fallback.
    """
    global engine
    database_url = url or os.getenv(EnvVars.DATABASE_URL)
    if not database_url:
        database_url = DEFAULT_DATABASE_URL
        logger.debug(f"DATABASE_URL not set, using SQLite fallback: {database_url}")

    if database_url.startswith("sqlite"):
        engine_args = {"connect_args": {"check_same_thread": False}}
    else:
        # PostgreSQL settings
        engine_args = {
            "pool_size": 5,
            "max_overflow": 10,
            "pool_pre_ping": True,
            "pool_recycle": 3600,
            "connect_args": {"connect_timeout": 10},
        }

    engine = create_engine(database_url, **engine_args)
    SessionLocal.configure(bind=engine)
    return engine


class TimestampMixin:
    """Mixin class for created_at and updated_at timestamps"""
    created_at = Column(DateTime, default=lambda: datetime.now(timezone.utc), nullable=False)
    updated_at = Column(DateTime, default=lambda: datetime.now(timezone.utc),
                        onupdate=lambda: datetime.now(timezone.utc), nullable=False)


class ExperimentRun(Base, TimestampMixin):
    """One sweep or Monte Carlo run"""
    __tablename__ = "experiment_runs"

    id = Column(Integer, primary_key=True, index=True)
    kind = Column(String(20), nullable=False, index=True)
    record_count = Column(Integer, nullable=False)
    tally_perfect = Column(Integer, nullable=False)
    # JSON text: thresholds -> counts, and the summary metadata
    tallies = Column(Text, nullable=False)
    run_metadata = Column(Text, nullable=False)

    rows = relationship("ComplexityRow", back_populates="run", cascade="all, delete-orphan",
                        order_by="ComplexityRow.position")

    def __repr__(self) -> str:
        return f"<ExperimentRun #{self.id} {self.kind} {self.tally_perfect}/{self.record_count}>"


class ComplexityRow(Base, TimestampMixin):
    """One record of a run; big integers and rationals stored as text"""
    __tablename__ = "complexity_rows"

    id = Column(Integer, primary_key=True, index=True)
    run_id = Column(Integer, ForeignKey("experiment_runs.id"), nullable=False, index=True)
    position = Column(Integer, nullable=False)
    p = Column(String(64), nullable=False)
    period_length = Column(Integer, nullable=False)
    complexity = Column(Integer, nullable=False)
    normalized = Column(String(64), nullable=False)
    window_start = Column(String(64), nullable=True)
    hits = Column(Integer, nullable=True)
    resamples = Column(Integer, nullable=True)

    run = relationship("ExperimentRun", back_populates="rows")

    __table_args__ = (
        Index("idx_run_position", "run_id", "position"),
    )

    def __repr__(self) -> str:
        return f"<ComplexityRow p={self.p} L={self.complexity}/{self.period_length}>"


def init_db() -> None:
    """Create all tables on the configured engine"""
    if engine is None:
        configure_engine()
    try:
        Base.metadata.create_all(bind=engine)
        logger.debug("Run ledger initialized.")
    except Exception as e:
        logger.error(f"Error initializing run ledger: {e}")
        raise

