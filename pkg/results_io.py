"""
Result files: one CSV row per record plus a JSON sidecar with the summary.
"""
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Union

import pandas as pd

from constants import ErrorMessages, ExperimentKind, OutputConstants, SuccessMessages
from exceptions import ResultsFormatError
from experiments import (
    McTrialRecord,
    SweepSummary,
    format_decimal,
    format_rational,
    summarize,
)
from linear_complexity import ComplexityRecord
from utils import setup_logger

logger = setup_logger("results_io")

PathLike = Union[str, Path]


def summary_path(path: PathLike) -> Path:
    """results/qr.csv -> results/qr.json"""
    return Path(path).with_suffix(OutputConstants.SUMMARY_SUFFIX)


def columns_for(kind: ExperimentKind) -> list[str]:
    columns = list(OutputConstants.BASE_COLUMNS)
    if kind.is_monte_carlo:
        columns += OutputConstants.WINDOW_COLUMNS
    return columns


def records_frame(summary: SweepSummary) -> pd.DataFrame:
    """All columns as strings so big primes and rationals survive untouched."""
    rows = []
    for r in summary.records:
        row = {
            "p": str(r.p),
            "period_length": str(r.period_length),
            "complexity": str(r.complexity),
            "normalized_decimal": format_decimal(r.normalized),
            "normalized_rational": format_rational(r.normalized),
        }
        if isinstance(r, McTrialRecord):
            row.update(A=str(r.window_start), hits=str(r.hits), resamples=str(r.resamples))
        rows.append(row)
    return pd.DataFrame(rows, columns=columns_for(summary.kind), dtype=str)


def records_csv(summary: SweepSummary) -> str:
    return records_frame(summary).to_csv(index=False, lineterminator="\n")


def summary_document(summary: SweepSummary) -> dict[str, Any]:
    return {
        "kind": str(summary.kind),
        "record_count": len(summary.records),
        "thresholds": [format_rational(t) for t in summary.thresholds],
        "tally_perfect": summary.tally_perfect,
        "tallies": {format_rational(t): summary.tallies_at[t] for t in summary.thresholds},
        "tallies_above": {format_rational(t): summary.tallies_above[t] for t in summary.thresholds},
        "bin_width": format_rational(summary.bin_width),
        "histogram": [
            {"lower": format_rational(b.lower), "upper": format_rational(b.upper), "count": b.count}
            for b in summary.histogram
        ],
        "metadata": summary.metadata,
    }


def write_results(summary: SweepSummary, path: PathLike) -> None:
    """CSV at `path`, summary JSON next to it; '-' streams the CSV to stdout."""
    if str(path) == OutputConstants.STDOUT_PATH:
        sys.stdout.write(records_csv(summary))
        sys.stdout.flush()
        return

    csv_path = Path(path)
    try:
        csv_path.parent.mkdir(parents=True, exist_ok=True)
        csv_path.write_text(records_csv(summary), encoding="utf-8", newline="")
        summary_path(csv_path).write_text(
            json.dumps(summary_document(summary), indent=2) + "\n", encoding="utf-8"
        )
    except OSError as e:
        logger.error(f"Could not write results to {csv_path}: {e}")
        raise
    logger.info(SuccessMessages.RESULTS_WRITTEN.format(path=csv_path))


def _parse_int(text: str, line: int, field: str, minimum: int = 0) -> int:
    try:
        value = int(text)
    except ValueError:
        raise ResultsFormatError.bad_field(line, field, f"not an integer: {text!r}") from None
    if value < minimum:
        raise ResultsFormatError.bad_field(line, field, f"must be >= {minimum}")
    return value


def _parse_fraction(text: str, line: int, field: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ResultsFormatError.bad_field(line, field, f"not a rational: {text!r}") from None


def _parse_record(index: int, row: dict[str, str], kind: ExperimentKind) -> ComplexityRecord:
    line = index + 2  # header is line 1
    p = _parse_int(row["p"], line, "p", 2)
    period_length = _parse_int(row["period_length"], line, "period_length", 1)
    complexity = _parse_int(row["complexity"], line, "complexity")
    normalized = _parse_fraction(row["normalized_rational"], line, "normalized_rational")
    if normalized != Fraction(complexity, period_length):
        raise ResultsFormatError.bad_field(
            line, "normalized_rational", f"{row['normalized_rational']} != {complexity}/{period_length}"
        )
    try:
        if kind.is_monte_carlo:
            return McTrialRecord(
                p=p,
                period_length=period_length,
                complexity=complexity,
                normalized=normalized,
                trial=index,
                window_start=_parse_int(row["A"], line, "A", 1),
                hits=_parse_int(row["hits"], line, "hits", 2),
                resamples=_parse_int(row["resamples"], line, "resamples"),
            )
        return ComplexityRecord(p, period_length, complexity, normalized)
    except ValueError as e:
        raise ResultsFormatError(f"line {line}: {e}", line) from None


def read_results(path: PathLike) -> SweepSummary:
    """Rebuild the summary written by write_results."""
    csv_path = Path(path)
    try:
        document = json.loads(summary_path(csv_path).read_text(encoding="utf-8"))
        frame = pd.read_csv(csv_path, dtype=str, keep_default_na=False)
    except json.JSONDecodeError as e:
        raise ResultsFormatError(f"{summary_path(csv_path)}: line {e.lineno}: {e.msg}", e.lineno) from None
    except pd.errors.EmptyDataError:
        raise ResultsFormatError(f"{csv_path}: no header row", 1) from None
    except pd.errors.ParserError as e:
        raise ResultsFormatError(f"{csv_path}: {e}") from None

    try:
        kind = ExperimentKind(document["kind"])
        thresholds = tuple(Fraction(t) for t in document["thresholds"])
        bin_width = Fraction(document["bin_width"])
        metadata = document.get("metadata", {})
        stored_tallies = document["tallies"]
    except (KeyError, ValueError) as e:
        raise ResultsFormatError(f"{summary_path(csv_path)}: bad summary field {e}") from None

    missing = [c for c in columns_for(kind) if c not in frame.columns]
    if missing:
        raise ResultsFormatError(ErrorMessages.MISSING_COLUMNS.format(columns=", ".join(missing)), 1)

    records = [_parse_record(i, row, kind) for i, row in enumerate(frame.to_dict("records"))]
    summary = summarize(kind, records, thresholds, bin_width, metadata)

    for t in thresholds:
        stored = stored_tallies.get(format_rational(t))
        if stored != summary.tallies_at[t]:
            raise ResultsFormatError(
                ErrorMessages.TALLY_MISMATCH.format(
                    threshold=format_rational(t), stored=stored, actual=summary.tallies_at[t]
                )
            )
    return summary
