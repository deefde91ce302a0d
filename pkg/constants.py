"""
Application constants and enums for better type safety and maintainability
"""
from enum import StrEnum
from fractions import Fraction
from typing import Final


class SequenceSource(StrEnum):
    """Where a parity word came from"""
    QR_FULL = "QR_FULL"
    PR_FULL = "PR_FULL"
    QR_WINDOW = "QR_WINDOW"
    PR_WINDOW = "PR_WINDOW"
    LEGENDRE = "LEGENDRE"

    @property
    def is_window(self) -> bool:
        return self in (SequenceSource.QR_WINDOW, SequenceSource.PR_WINDOW)


class SpacingKind(StrEnum):
    """Quadratic residues or primitive roots"""
    QR = "qr"
    PR = "pr"


class WordKind(StrEnum):
    """Word kinds accepted by the `word` subcommand"""
    QR = "qr"
    PR = "pr"
    LEGENDRE = "legendre"


class ExperimentKind(StrEnum):
    """Experiment drivers"""
    QR_SWEEP = "qr-sweep"
    PR_SWEEP = "pr-sweep"
    MC_QR = "mc-qr"
    MC_PR = "mc-pr"

    @property
    def is_monte_carlo(self) -> bool:
        return self in (ExperimentKind.MC_QR, ExperimentKind.MC_PR)

    @property
    def spacing_kind(self) -> SpacingKind:
        if self in (ExperimentKind.QR_SWEEP, ExperimentKind.MC_QR):
            return SpacingKind.QR
        return SpacingKind.PR


class SubCommand(StrEnum):
    """CLI subcommands"""
    QR_SWEEP = "qr-sweep"
    PR_SWEEP = "pr-sweep"
    MC_QR = "mc-qr"
    MC_PR = "mc-pr"
    LEGENDRE_CHECK = "legendre-check"
    BM = "bm"
    WORD = "word"
    SPACING_DIST = "spacing-dist"
    HISTORY = "history"


class AppConstants:
    """Package identity"""

    NAME: Final = "spacing-complexity"
    VERSION: Final = "1.0.0"


# Number theory constants
class NumberTheoryConstants:
    """Primality and factorization parameters"""

    # Witness set that is deterministic for every n below the threshold
    DETERMINISTIC_WITNESSES: Final = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    DETERMINISTIC_LIMIT: Final = 3_317_044_064_679_887_385_961_981

    # Seeded witnesses above the threshold
    RANDOM_WITNESS_ROUNDS: Final = 40

    # Trial division bound used before Brent-Pollard rho
    TRIAL_DIVISION_LIMIT: Final = 10**6

    # Small primes checked before Miller-Rabin
    SMALL_PRIME_FILTER: Final = 1000

    DEFAULT_RHO_BUDGET: Final = 1_000_000
    RHO_BATCH_SIZE: Final = 128

    # Elliptic-curve stage for cofactors rho cannot split within its budget.
    # sympy requires even stage bounds.
    ECM_B1: Final = 10_000
    ECM_B2: Final = 1_000_000
    DEFAULT_ECM_CURVES: Final = 80


# Sweep constants
class SweepConstants:
    """Deterministic sweep defaults"""

    DEFAULT_COUNT: Final = 1000
    QR_DEFAULT_START: Final = 5
    PR_DEFAULT_START: Final = 11
    # 1-based prime indices of the ithprime(r+2) and ithprime(r+5) offsets at r = 1
    QR_CODE_FIRST_INDEX: Final = 3
    PR_CODE_FIRST_INDEX: Final = 6

    QR_THRESHOLDS: Final = (Fraction(1), Fraction(99, 100), Fraction(19, 20))
    PR_THRESHOLDS: Final = (Fraction(1), Fraction(124, 125), Fraction(121, 125))


# Monte Carlo constants
class MonteCarloConstants:
    """Monte Carlo window experiment defaults"""

    DEFAULT_TRIALS: Final = 1000
    DEFAULT_WINDOW: Final = 1000
    MIN_WINDOW: Final = 2
    DEFAULT_PRIME_LO: Final = 10**30
    DEFAULT_PRIME_HI: Final = 10**40
    DEFAULT_SEED: Final = 1
    MAX_RESAMPLES: Final = 100

    THRESHOLDS: Final = (
        Fraction(1),
        Fraction(124, 125),
        Fraction(99, 100),
        Fraction(121, 125),
        Fraction(19, 20),
    )

    RNG_NAME: Final = "numpy PCG64, SeedSequence(seed, spawn_key=(trial,))"
    SAMPLING_NOTE: Final = (
        "p = next_prime(uniform integer in [prime_lo, prime_hi]); primes following "
        "large gaps are over-weighted"
    )


# Histogram constants
class HistogramConstants:
    """Fixed-width bins near 1 plus one underflow bin"""

    FLOOR: Final = Fraction(9, 10)
    BIN_WIDTH: Final = Fraction(1, 500)
    BAR_WIDTH: Final = 50


class ProgressConstants:
    """Counter logging on stderr"""

    LOG_EVERY: Final = 100


class OutputConstants:
    """Result file layout"""

    DECIMAL_DIGITS: Final = 6
    BASE_COLUMNS: Final = (
        "p", "period_length", "complexity", "normalized_decimal", "normalized_rational",
    )
    WINDOW_COLUMNS: Final = ("A", "hits", "resamples")
    STDOUT_PATH: Final = "-"
    SUMMARY_SUFFIX: Final = ".json"
    DEFAULT_OUTPUT_DIR: Final = "results"


# Environment Variables
class EnvVars:
    """Environment variable names"""

    OUTPUT_DIR: Final = "LC_OUTPUT_DIR"
    LOG_LEVEL: Final = "LC_LOG_LEVEL"
    DATABASE_URL: Final = "DATABASE_URL"


# Error Messages
class ErrorMessages:
    """Standardized error messages"""

    DEGENERATE_MODULUS: Final = "p={p}: fewer than two {what}, no spacings to take"
    DEGENERATE_WINDOW: Final = "p={p}, A={start}, K={size}: window holds {hits} hit(s), need at least 2"
    WINDOW_OUT_OF_RANGE: Final = "p={p}: window start A={start} outside [1, {upper}] for K={size}"
    BUDGET_EXHAUSTED: Final = "could not split {n} within {budget} rho iterations and {curves} ECM curves"
    RESAMPLING_EXHAUSTED: Final = "trial {trial}: gave up after {attempts} resamples ({reason})"
    NOT_PRIME: Final = "{p} is not an odd prime"
    BAD_FIELD: Final = "line {line}: field '{field}': {reason}"
    MISSING_COLUMNS: Final = "missing columns: {columns}"
    TALLY_MISMATCH: Final = "stored tally at {threshold} is {stored}, records give {actual}"


# Success Messages
class SuccessMessages:
    """Standardized success messages"""

    RESULTS_WRITTEN: Final = "Results written to {path}"
    RUN_RECORDED: Final = "Run #{run_id} recorded in the ledger"
    ORACLE_PASS: Final = "PASS ({ok}/{total} primes)"
    ORACLE_FAIL: Final = "FAIL ({ok}/{total} primes)"
