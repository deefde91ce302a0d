"""
The binary words under study: Legendre sequence periods, spacing parity words
of quadratic residues and primitive roots, and their windowed variants.
"""
from dataclasses import dataclass
from typing import Optional, Sequence

from constants import MonteCarloConstants, SequenceSource, SpacingKind
from exceptions import DegenerateModulus, DegenerateWindow, WindowOutOfRange
from linear_complexity import FieldSeq
from numtheory import (
    Factorization,
    PrimeModulus,
    factorize,
    legendre_symbol,
    multiplicative_order_is_maximal,
    primitive_roots,
    quadratic_residues,
)


@dataclass(frozen=True)
class Window:
    """A window [A, A + K - 1] of GF(p)"""
    start: int
    size: int


@dataclass(frozen=True)
class ParityWord:
    """One period of a periodic bit stream, with its provenance"""
    bits: tuple[int, ...]
    source: SequenceSource
    p: PrimeModulus
    window: Optional[Window] = None

    def __post_init__(self):
        if (self.window is not None) != self.source.is_window:
            raise ValueError(f"{self.source} word must {'' if self.source.is_window else 'not '}carry a window")

    def __len__(self) -> int:
        return len(self.bits)

    def as_bitstring(self) -> str:
        """w_1 first."""
        return "".join(str(b) for b in self.bits)

    def field_seq(self) -> FieldSeq:
        return FieldSeq.binary(self.bits)


def spacings(values: Sequence[int]) -> list[int]:
    """Differences of consecutive terms, full precision."""
    return [b - a for a, b in zip(values, values[1:])]


def legendre_sequence(p: PrimeModulus) -> ParityWord:
    """x_n = (1 + (n/p)) / 2 for n != 0 mod p, x_0 = 0."""
    bits = tuple(0 if n == 0 else (1 + legendre_symbol(n, p)) // 2 for n in range(p))
    return ParityWord(bits, SequenceSource.LEGENDRE, p)


def qr_spacings(p: PrimeModulus) -> list[int]:
    if p < 5:
        raise DegenerateModulus(p, "quadratic residues")
    return spacings(quadratic_residues(p))


def pr_spacings(p: PrimeModulus, fpm1: Optional[Factorization] = None) -> list[int]:
    if p < 5:
        raise DegenerateModulus(p, "primitive roots")
    return spacings(primitive_roots(p, fpm1))


def qr_parity_word(p: PrimeModulus) -> ParityWord:
    """Parities of the (p-3)/2 quadratic residue spacings."""
    return ParityWord(tuple(d % 2 for d in qr_spacings(p)), SequenceSource.QR_FULL, p)


def pr_parity_word(p: PrimeModulus, fpm1: Optional[Factorization] = None) -> ParityWord:
    """Parities of the phi(p-1) - 1 primitive root spacings."""
    return ParityWord(tuple(d % 2 for d in pr_spacings(p, fpm1)), SequenceSource.PR_FULL, p)


def _check_window(p: PrimeModulus, start: int, size: int) -> None:
    if size < MonteCarloConstants.MIN_WINDOW:
        raise ValueError(f"window size must be at least {MonteCarloConstants.MIN_WINDOW}, got {size}")
    if start < 1 or start > p - size:
        raise WindowOutOfRange(p, start, size)


def window_qr_positions(p: PrimeModulus, start: int, size: int) -> list[int]:
    """1-based k in [1, K] with A + k - 1 a quadratic residue."""
    _check_window(p, start, size)
    return [k for k in range(1, size + 1) if legendre_symbol(start + k - 1, p) == 1]


def window_pr_positions(p: PrimeModulus, start: int, size: int, fpm1: Factorization) -> list[int]:
    """1-based k in [1, K] with A + k - 1 a primitive root."""
    _check_window(p, start, size)
    return [
        k for k in range(1, size + 1)
        if multiplicative_order_is_maximal(start + k - 1, p, fpm1)
    ]


def window_positions(
    p: PrimeModulus,
    start: int,
    size: int,
    kind: SpacingKind,
    fpm1: Optional[Factorization] = None,
) -> list[int]:
    if kind is SpacingKind.QR:
        return window_qr_positions(p, start, size)
    if fpm1 is None:
        fpm1 = factorize(p - 1)
    return window_pr_positions(p, start, size, fpm1)


def positions_to_parity_word(
    positions: Sequence[int],
    source: SequenceSource,
    p: PrimeModulus,
    window: Optional[Window] = None,
) -> ParityWord:
    """Parities of consecutive position differences."""
    if len(positions) < 2:
        raise DegenerateWindow(
            p,
            window.start if window else None,
            window.size if window else None,
            len(positions),
        )
    return ParityWord(tuple(d % 2 for d in spacings(positions)), source, p, window)
