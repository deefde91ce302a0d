"""
Experiment drivers: deterministic QR / PR sweeps over consecutive primes and
seeded Monte Carlo window studies, with tallies and histogram bins.
"""
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import partial
from math import ceil
from typing import Any, Callable, Iterable, Iterator, Optional, Sequence, TypeVar

import numpy as np
import pandas as pd

from constants import (
    AppConstants,
    ExperimentKind,
    HistogramConstants,
    MonteCarloConstants,
    NumberTheoryConstants,
    OutputConstants,
    ProgressConstants,
    SequenceSource,
    SpacingKind,
    SweepConstants,
)
from exceptions import BudgetExhausted, DegenerateWindow, ResamplingExhausted
from linear_complexity import (
    ComplexityRecord,
    legendre_closed_form,
    normalized_complexity,
    periodic_complexity,
)
from numtheory import (
    Factorization,
    PrimeModulus,
    factorize,
    is_prime,
    next_prime,
    primes_from,
    random_int_between,
    small_primes,
)
from sequences import (
    Window,
    legendre_sequence,
    positions_to_parity_word,
    pr_parity_word,
    pr_spacings,
    qr_parity_word,
    qr_spacings,
    window_positions,
)
from utils import setup_logger

logger = setup_logger("experiments")

T = TypeVar("T")
R = TypeVar("R")


@dataclass(frozen=True)
class McTrialRecord(ComplexityRecord):
    """One Monte Carlo trial; period_length is hits - 1"""
    trial: int
    window_start: int
    hits: int
    resamples: int

    def __post_init__(self):
        super().__post_init__()
        if self.hits < 2 or self.period_length != self.hits - 1:
            raise ValueError(
                f"trial {self.trial}: {self.hits} hits do not give period {self.period_length}"
            )


@dataclass(frozen=True)
class HistogramBin:
    """Values in [lower, upper); the top bin also holds 1"""
    lower: Fraction
    upper: Fraction
    count: int


@dataclass(frozen=True)
class SweepSummary:
    """Records of one experiment plus their tallies"""
    kind: ExperimentKind
    records: tuple[ComplexityRecord, ...]
    thresholds: tuple[Fraction, ...]
    tally_perfect: int
    tallies_at: dict[Fraction, int]
    tallies_above: dict[Fraction, int]
    histogram: tuple[HistogramBin, ...]
    bin_width: Fraction = HistogramConstants.BIN_WIDTH
    metadata: dict[str, Any] = field(default_factory=dict)

    def tally_at(self, threshold: Fraction) -> int:
        if threshold in self.tallies_at:
            return self.tallies_at[threshold]
        return sum(1 for r in self.records if r.normalized >= threshold)

    def tally_above(self, threshold: Fraction) -> int:
        """Records strictly above the threshold."""
        if threshold in self.tallies_above:
            return self.tallies_above[threshold]
        return sum(1 for r in self.records if r.normalized > threshold)

    def fraction_at(self, threshold: Fraction) -> float:
        return self.tally_at(threshold) / len(self.records) if self.records else 0.0


@dataclass(frozen=True)
class McConfig:
    """Monte Carlo window experiment parameters"""
    mode: SpacingKind = SpacingKind.QR
    trials: int = MonteCarloConstants.DEFAULT_TRIALS
    window: int = MonteCarloConstants.DEFAULT_WINDOW
    prime_lo: int = MonteCarloConstants.DEFAULT_PRIME_LO
    prime_hi: int = MonteCarloConstants.DEFAULT_PRIME_HI
    seed: int = MonteCarloConstants.DEFAULT_SEED
    rho_budget: int = NumberTheoryConstants.DEFAULT_RHO_BUDGET
    ecm_curves: int = NumberTheoryConstants.DEFAULT_ECM_CURVES
    max_resamples: int = MonteCarloConstants.MAX_RESAMPLES
    # test hooks: pin the prime, or make the window the whole of [1, p-1]
    fixed_prime: Optional[int] = None
    full_window: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be positive")
        if not self.full_window and self.window < MonteCarloConstants.MIN_WINDOW:
            raise ValueError(f"window must be at least {MonteCarloConstants.MIN_WINDOW}")
        if self.prime_lo >= self.prime_hi:
            raise ValueError("prime_lo must be below prime_hi")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.rho_budget < 1 or self.max_resamples < 1:
            raise ValueError("rho_budget and max_resamples must be positive")
        if self.ecm_curves < 0:
            raise ValueError("ecm_curves must not be negative")
        if self.fixed_prime is not None:
            if self.fixed_prime < 5 or not is_prime(self.fixed_prime):
                raise ValueError(f"fixed prime {self.fixed_prime} must be a prime >= 5")
            if not self.full_window and self.fixed_prime - self.window < 1:
                raise ValueError("fixed prime is too small for the window")
        elif not self.full_window and self.prime_lo <= self.window:
            raise ValueError("prime_lo must exceed the window size")

    @property
    def kind(self) -> ExperimentKind:
        return ExperimentKind.MC_QR if self.mode is SpacingKind.QR else ExperimentKind.MC_PR

    def window_for(self, p: PrimeModulus) -> int:
        return p - 1 if self.full_window else self.window

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        data["mode"] = str(self.mode)
        return data


@dataclass(frozen=True)
class TrialOutcome:
    record: McTrialRecord
    budget_resamples: int
    window_resamples: int


@dataclass(frozen=True)
class LegendreRow:
    p: PrimeModulus
    closed_form: int
    berlekamp_massey: int

    @property
    def agrees(self) -> bool:
        return self.closed_form == self.berlekamp_massey


@dataclass(frozen=True)
class LegendreCheck:
    rows: tuple[LegendreRow, ...]

    @property
    def agreeing(self) -> int:
        return sum(1 for row in self.rows if row.agrees)

    @property
    def passed(self) -> bool:
        return self.agreeing == len(self.rows)


def parse_threshold(text: str) -> Fraction:
    """'0.95' or '19/20' -> Fraction(19, 20), exactly."""
    value = Fraction(text.strip())
    if not 0 <= value <= 1:
        raise ValueError(f"threshold {text} outside [0, 1]")
    return value


def merge_thresholds(defaults: Iterable[Fraction], extra: Iterable[Fraction] = ()) -> tuple[Fraction, ...]:
    """Union, highest first."""
    return tuple(sorted(set(defaults) | set(extra), reverse=True))


def histogram_bins(
    values: Sequence[Fraction],
    bin_width: Fraction = HistogramConstants.BIN_WIDTH,
    floor: Fraction = HistogramConstants.FLOOR,
) -> tuple[HistogramBin, ...]:
    """One underflow bin [0, floor) and fixed-width bins over [floor, 1]."""
    if bin_width <= 0:
        raise ValueError("bin width must be positive")
    n_bins = ceil((1 - floor) / bin_width)
    counts = [0] * (n_bins + 1)
    for v in values:
        if v < floor:
            counts[0] += 1
        else:
            counts[1 + min(int((v - floor) / bin_width), n_bins - 1)] += 1
    bins = [HistogramBin(Fraction(0), floor, counts[0])]
    for k in range(n_bins):
        lower = floor + k * bin_width
        bins.append(HistogramBin(lower, min(lower + bin_width, Fraction(1)), counts[k + 1]))
    return tuple(bins)


def summarize(
    kind: ExperimentKind,
    records: Sequence[ComplexityRecord],
    thresholds: Iterable[Fraction],
    bin_width: Fraction = HistogramConstants.BIN_WIDTH,
    metadata: Optional[dict[str, Any]] = None,
) -> SweepSummary:
    """Tallies and histogram for a batch of records."""
    ordered = tuple(thresholds)
    values = [r.normalized for r in records]
    return SweepSummary(
        kind=kind,
        records=tuple(records),
        thresholds=ordered,
        tally_perfect=sum(1 for v in values if v == 1),
        tallies_at={t: sum(1 for v in values if v >= t) for t in ordered},
        tallies_above={t: sum(1 for v in values if v > t) for t in ordered},
        histogram=histogram_bins(values, bin_width),
        bin_width=bin_width,
        metadata=dict(metadata or {}),
    )


def _map_ordered(func: Callable[[T], R], items: Sequence[T], jobs: int, label: str) -> Iterator[R]:
    """Map in input order, optionally over a process pool, logging a counter."""
    total = len(items)
    if jobs <= 1:
        results: Iterable[R] = map(func, items)
        executor = None
    else:
        executor = ProcessPoolExecutor(max_workers=jobs)
        results = executor.map(func, items, chunksize=max(1, total // (jobs * 8)))
    try:
        for done, result in enumerate(results, start=1):
            if done % ProgressConstants.LOG_EVERY == 0 or done == total:
                logger.info(f"{label}: {done}/{total}")
            yield result
    finally:
        if executor is not None:
            executor.shutdown(cancel_futures=True)


def qr_complexity(p: PrimeModulus) -> ComplexityRecord:
    """c_p = L(Q_p*) / ((p-3)/2)."""
    word = qr_parity_word(p)
    complexity = periodic_complexity(word.field_seq())
    return ComplexityRecord(p, len(word), complexity, normalized_complexity(complexity, len(word)))


def pr_complexity(p: PrimeModulus) -> ComplexityRecord:
    """d_p = L(R_p*) / (phi(p-1) - 1)."""
    word = pr_parity_word(p)
    complexity = periodic_complexity(word.field_seq())
    return ComplexityRecord(p, len(word), complexity, normalized_complexity(complexity, len(word)))


def _sweep(
    kind: ExperimentKind,
    per_prime: Callable[[PrimeModulus], ComplexityRecord],
    start: int,
    count: int,
    thresholds: tuple[Fraction, ...],
    jobs: int,
    bin_width: Fraction,
) -> SweepSummary:
    started = time.perf_counter()
    primes = primes_from(start, count)
    logger.info(f"🚀 {kind}: {count} primes from {primes[0]} to {primes[-1]}, jobs={jobs}")
    records = list(_map_ordered(per_prime, primes, jobs, str(kind)))
    metadata = {
        "tool_version": AppConstants.VERSION,
        "start": start,
        "count": count,
        "first_prime": primes[0],
        "last_prime": primes[-1],
        "runtime_seconds": round(time.perf_counter() - started, 3),
    }
    summary = summarize(kind, records, thresholds, bin_width, metadata)
    logger.info(f"✅ {kind} done: {summary.tally_perfect} perfect out of {len(records)}")
    return summary


def qr_sweep(
    start: int = SweepConstants.QR_DEFAULT_START,
    count: int = SweepConstants.DEFAULT_COUNT,
    extra_thresholds: Iterable[Fraction] = (),
    jobs: int = 1,
    bin_width: Fraction = HistogramConstants.BIN_WIDTH,
) -> SweepSummary:
    """qr_complexity over `count` consecutive primes from `start`."""
    if start < 5:
        raise ValueError("QR sweep must start at 5 or above")
    thresholds = merge_thresholds(SweepConstants.QR_THRESHOLDS, extra_thresholds)
    return _sweep(ExperimentKind.QR_SWEEP, qr_complexity, start, count, thresholds, jobs, bin_width)


def pr_sweep(
    start: int = SweepConstants.PR_DEFAULT_START,
    count: int = SweepConstants.DEFAULT_COUNT,
    extra_thresholds: Iterable[Fraction] = (),
    jobs: int = 1,
    bin_width: Fraction = HistogramConstants.BIN_WIDTH,
) -> SweepSummary:
    """pr_complexity over `count` consecutive primes from `start`."""
    if start < 5:
        raise ValueError("PR sweep must start at 5 or above")
    thresholds = merge_thresholds(SweepConstants.PR_THRESHOLDS, extra_thresholds)
    return _sweep(ExperimentKind.PR_SWEEP, pr_complexity, start, count, thresholds, jobs, bin_width)


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Substream of trial `trial`, independent of execution order."""
    sequence = np.random.SeedSequence(seed, spawn_key=(trial,))
    return np.random.Generator(np.random.PCG64(sequence))


def run_trial(cfg: McConfig, trial: int) -> TrialOutcome:
    """
    Draw p = next_prime(u), factor p - 1 in PR mode (new p on BudgetExhausted),
    draw A, and measure the window word (new A on DegenerateWindow).
    """
    rng = trial_rng(cfg.seed, trial)
    source = SequenceSource.QR_WINDOW if cfg.mode is SpacingKind.QR else SequenceSource.PR_WINDOW
    budget_resamples = window_resamples = 0
    p: Optional[int] = None
    fpm1: Optional[Factorization] = None

    while True:
        attempts = budget_resamples + window_resamples
        if attempts >= cfg.max_resamples:
            reason = f"{budget_resamples} factorization budget, {window_resamples} degenerate window"
            raise ResamplingExhausted(trial, attempts, reason)

        if p is None:
            p = cfg.fixed_prime or next_prime(random_int_between(rng, cfg.prime_lo, cfg.prime_hi))
            if cfg.mode is SpacingKind.PR:
                try:
                    fpm1 = factorize(p - 1, cfg.rho_budget, cfg.ecm_curves)
                except BudgetExhausted as e:
                    logger.debug(f"trial {trial}: {e}; drawing a new prime")
                    budget_resamples += 1
                    p = None
                    continue

        size = cfg.window_for(p)
        start = random_int_between(rng, 1, p - size)
        positions = window_positions(p, start, size, cfg.mode, fpm1)
        try:
            word = positions_to_parity_word(positions, source, p, Window(start, size))
        except DegenerateWindow as e:
            logger.debug(f"trial {trial}: {e}; drawing a new window")
            window_resamples += 1
            continue

        complexity = periodic_complexity(word.field_seq())
        record = McTrialRecord(
            p=p,
            period_length=len(word),
            complexity=complexity,
            normalized=normalized_complexity(complexity, len(word)),
            trial=trial,
            window_start=start,
            hits=len(positions),
            resamples=budget_resamples + window_resamples,
        )
        return TrialOutcome(record, budget_resamples, window_resamples)


def mc_run(
    cfg: McConfig,
    extra_thresholds: Iterable[Fraction] = (),
    jobs: int = 1,
    bin_width: Fraction = HistogramConstants.BIN_WIDTH,
) -> SweepSummary:
    """N seeded trials; reproducible from (seed, cfg) whatever `jobs` is."""
    started = time.perf_counter()
    logger.info(
        f"🚀 {cfg.kind}: {cfg.trials} trials, K={'p-1' if cfg.full_window else cfg.window}, "
        f"seed={cfg.seed}, jobs={jobs}"
    )
    outcomes = list(_map_ordered(partial(run_trial, cfg), range(cfg.trials), jobs, str(cfg.kind)))
    records = [o.record for o in outcomes]
    budget = sum(o.budget_resamples for o in outcomes)
    windows = sum(o.window_resamples for o in outcomes)
    if budget:
        logger.warning(f"⚠️ {budget} primes redrawn after exhausting the factorization budget")

    metadata = {
        "tool_version": AppConstants.VERSION,
        "config": cfg.to_dict(),
        "rng": MonteCarloConstants.RNG_NAME,
        "sampling": MonteCarloConstants.SAMPLING_NOTE,
        "budget_resamples": budget,
        "window_resamples": windows,
        "total_resamples": budget + windows,
        "mean_hits": round(sum(r.hits for r in records) / len(records), OutputConstants.DECIMAL_DIGITS),
        "runtime_seconds": round(time.perf_counter() - started, 3),
    }
    thresholds = merge_thresholds(MonteCarloConstants.THRESHOLDS, extra_thresholds)
    summary = summarize(cfg.kind, records, thresholds, bin_width, metadata)
    logger.info(f"✅ {cfg.kind} done: {summary.tally_perfect} perfect out of {len(records)}")
    return summary


def spacing_distribution(p: PrimeModulus, mode: SpacingKind) -> dict[int, int]:
    """Histogram of raw spacing values, ascending by spacing."""
    raw = qr_spacings(p) if mode is SpacingKind.QR else pr_spacings(p)
    return dict(sorted(Counter(raw).items()))


def legendre_check(max_prime: int) -> LegendreCheck:
    """Closed form vs Berlekamp-Massey for every odd prime <= max_prime."""
    rows = []
    for p in small_primes(max_prime):
        if p == 2:
            continue
        bm = periodic_complexity(legendre_sequence(p).field_seq())
        rows.append(LegendreRow(p, legendre_closed_form(p), bm))
    return LegendreCheck(tuple(rows))


def format_decimal(value: Fraction) -> str:
    return f"{float(value):.{OutputConstants.DECIMAL_DIGITS}f}"


def format_rational(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def tally_frame(summary: SweepSummary) -> pd.DataFrame:
    """Perfect count first, then one row per threshold below 1; `above` counts > t."""
    total = len(summary.records)
    rows = [{"tally": "perfect (= 1)", "threshold": "1/1", "count": summary.tally_perfect, "above": 0, "of": total}]
    for t in summary.thresholds:
        if t == 1:
            continue
        rows.append({
            "tally": f">= {format_decimal(t)}",
            "threshold": format_rational(t),
            "count": summary.tallies_at[t],
            "above": summary.tallies_above[t],
            "of": total,
        })
    return pd.DataFrame(rows, columns=["tally", "threshold", "count", "above", "of"])


def format_tally_table(summary: SweepSummary) -> str:
    return tally_frame(summary).to_string(index=False)


def format_histogram(summary: SweepSummary) -> str:
    """Text histogram, one line per bin."""
    peak = max((b.count for b in summary.histogram), default=0)
    lines = []
    for b in summary.histogram:
        bar = "#" * (round(b.count * HistogramConstants.BAR_WIDTH / peak) if peak else 0)
        lines.append(f"[{format_decimal(b.lower)}, {format_decimal(b.upper)}) {b.count:>6} {bar}")
    return "\n".join(lines)
