"""
Domain exceptions. Messages come from constants.ErrorMessages.
"""
from typing import Optional

from constants import ErrorMessages


class SpacingComplexityError(Exception):
    """Base class for every error raised by this package"""


class DegenerateModulus(SpacingComplexityError):
    """The prime has fewer than two residues / roots, so no spacings exist"""

    def __init__(self, p: int, what: str):
        self.p = p
        self.what = what
        super().__init__(ErrorMessages.DEGENERATE_MODULUS.format(p=p, what=what))


class DegenerateWindow(SpacingComplexityError):
    """A window produced fewer than two hits"""

    def __init__(self, p: int, start: Optional[int], size: Optional[int], hits: int):
        self.p = p
        self.start = start
        self.size = size
        self.hits = hits
        super().__init__(ErrorMessages.DEGENERATE_WINDOW.format(p=p, start=start, size=size, hits=hits))


class WindowOutOfRange(SpacingComplexityError):
    def __init__(self, p: int, start: int, size: int):
        self.p = p
        self.start = start
        self.size = size
        super().__init__(
            ErrorMessages.WINDOW_OUT_OF_RANGE.format(p=p, start=start, upper=p - size, size=size)
        )


class BudgetExhausted(SpacingComplexityError):
    """Rho and the elliptic-curve stage both failed to split n; the caller should resample"""

    def __init__(self, n: int, budget: int, curves: int = 0):
        self.n = n
        self.budget = budget
        self.curves = curves
        super().__init__(ErrorMessages.BUDGET_EXHAUSTED.format(n=n, budget=budget, curves=curves))


class ResamplingExhausted(SpacingComplexityError):
    """A Monte Carlo trial hit the resample cap"""

    def __init__(self, trial: int, attempts: int, reason: str):
        self.trial = trial
        self.attempts = attempts
        self.reason = reason
        super().__init__(
            ErrorMessages.RESAMPLING_EXHAUSTED.format(trial=trial, attempts=attempts, reason=reason)
        )


class ResultsFormatError(SpacingComplexityError):
    """A results file could not be parsed"""

    def __init__(self, message: str, line: Optional[int] = None, field: Optional[str] = None):
        self.line = line
        self.field = field
        super().__init__(message)

    @classmethod
    def bad_field(cls, line: int, field: str, reason: str) -> "ResultsFormatError":
        return cls(ErrorMessages.BAD_FIELD.format(line=line, field=field, reason=reason), line, field)
