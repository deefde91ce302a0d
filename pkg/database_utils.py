"""
Run ledger utilities with context-managed sessions
"""
import json
from contextlib import contextmanager
from fractions import Fraction
from typing import Generator

import pandas as pd
from sqlalchemy.orm import Session

import database
from database import ComplexityRow, ExperimentRun, SessionLocal
from experiments import McTrialRecord, SweepSummary, format_rational
from linear_complexity import ComplexityRecord
from utils import setup_logger

logger = setup_logger("database_utils")


@contextmanager
def get_db_session() -> Generator[Session, None, None]:
    """
    Context manager for database sessions.
    Automatically handles session cleanup and error rollback.
    """
    if database.engine is None:
        database.init_db()
    db = SessionLocal()
    try:
        yield db
    except Exception:
        db.rollback()
        raise
    finally:
        db.close()


def _row_from_record(position: int, record: ComplexityRecord) -> ComplexityRow:
    row = ComplexityRow(
        position=position,
        p=str(record.p),
        period_length=record.period_length,
        complexity=record.complexity,
        normalized=format_rational(record.normalized),
    )
    if isinstance(record, McTrialRecord):
        row.window_start = str(record.window_start)
        row.hits = record.hits
        row.resamples = record.resamples
    return row


def _record_from_row(row: ComplexityRow) -> ComplexityRecord:
    normalized = Fraction(row.normalized)
    if row.hits is not None:
        return McTrialRecord(
            p=int(row.p),
            period_length=row.period_length,
            complexity=row.complexity,
            normalized=normalized,
            trial=row.position,
            window_start=int(row.window_start),
            hits=row.hits,
            resamples=row.resamples,
        )
    return ComplexityRecord(int(row.p), row.period_length, row.complexity, normalized)


class RunLedger:
    """Centralized run ledger operations"""

    @staticmethod
    def save_summary(summary: SweepSummary) -> int:
        """Store a summary and its records in one transaction; returns the run id"""
        with get_db_session() as db:
            run = ExperimentRun(
                kind=str(summary.kind),
                record_count=len(summary.records),
                tally_perfect=summary.tally_perfect,
                tallies=json.dumps({format_rational(t): c for t, c in summary.tallies_at.items()}),
                run_metadata=json.dumps(summary.metadata),
            )
            run.rows = [_row_from_record(i, r) for i, r in enumerate(summary.records)]
            db.add(run)
            db.commit()
            db.refresh(run)
            logger.debug(f"Saved {run!r} with {len(run.rows)} rows")
            return run.id

    @staticmethod
    def load_records(run_id: int) -> list[ComplexityRecord]:
        with get_db_session() as db:
            run = db.get(ExperimentRun, run_id)
            if run is None:
                raise KeyError(f"no run #{run_id} in the ledger")
            return [_record_from_row(row) for row in run.rows]

    @staticmethod
    def list_runs(limit: int = 20) -> pd.DataFrame:
        """Most recent runs first"""
        with get_db_session() as db:
            runs = (
                db.query(ExperimentRun)
                .order_by(ExperimentRun.id.desc())
                .limit(limit)
                .all()
            )
            return pd.DataFrame(
                [
                    {
                        "id": run.id,
                        "kind": run.kind,
                        "records": run.record_count,
                        "perfect": run.tally_perfect,
                        "tallies": run.tallies,
                        "created_at": run.created_at,
                    }
                    for run in runs
                ],
                columns=["id", "kind", "records", "perfect", "tallies", "created_at"],
            )
