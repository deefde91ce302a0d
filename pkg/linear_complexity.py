"""
Berlekamp-Massey over prime fields, LFSR replay, linear complexity of
periodic sequences and the closed-form Legendre oracle.
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from numtheory import PrimeModulus


@dataclass(frozen=True)
class FieldSeq:
    """A finite sequence over GF(char)"""
    char: int
    elems: tuple[int, ...]

    def __post_init__(self):
        if self.char < 2:
            raise ValueError(f"field characteristic must be prime, got {self.char}")
        if any(not 0 <= e < self.char for e in self.elems):
            raise ValueError(f"elements must lie in [0, {self.char - 1}]")

    @classmethod
    def binary(cls, bits: Sequence[int]) -> "FieldSeq":
        return cls(2, tuple(bits))

    @classmethod
    def from_string(cls, text: str, char: int = 2) -> "FieldSeq":
        """Digits left to right, e.g. '011011'."""
        return cls(char, tuple(int(ch, char) for ch in text.strip()))

    def __len__(self) -> int:
        return len(self.elems)

    def doubled(self) -> "FieldSeq":
        return FieldSeq(self.char, self.elems + self.elems)


@dataclass(frozen=True)
class FeedbackPolynomial:
    """
    Recurrence s_n = c_1*s_(n-1) + ... + c_L*s_(n-L) (mod char).
    The connection polynomial is 1 - c_1 x - ... - c_L x^L.
    """
    char: int
    coeffs: tuple[int, ...]

    @property
    def degree(self) -> int:
        return len(self.coeffs)

    def connection_coefficients(self) -> tuple[int, ...]:
        """[1, -c_1, ..., -c_L] mod char, constant term first."""
        return (1,) + tuple((-c) % self.char for c in self.coeffs)

    def render(self) -> str:
        terms = []
        for i, c in enumerate(self.coeffs, start=1):
            if c == 0:
                continue
            term = f"s_(n-{i})"
            terms.append(term if c == 1 else f"{c}*{term}")
        return "s_n = " + (" + ".join(terms) if terms else "0")

    def render_connection(self) -> str:
        """Connection polynomial, e.g. '1 + x + x^2'."""
        terms = ["1"]
        for i, c in enumerate(self.connection_coefficients()[1:], start=1):
            if c == 0:
                continue
            power = "x" if i == 1 else f"x^{i}"
            terms.append(power if c == 1 else f"{c}*{power}")
        return " + ".join(terms)


@dataclass(frozen=True)
class ComplexityRecord:
    """One prime's result"""
    p: PrimeModulus
    period_length: int
    complexity: int
    normalized: Fraction

    def __post_init__(self):
        if not 0 <= self.complexity <= self.period_length:
            raise ValueError(
                f"p={self.p}: complexity {self.complexity} outside [0, {self.period_length}]"
            )

    @property
    def is_perfect(self) -> bool:
        return self.normalized == 1


def normalized_complexity(complexity: int, period_length: int) -> Fraction:
    """Exact L / period length."""
    return Fraction(complexity, period_length)


def _berlekamp_massey_gf2(bits: Sequence[int]) -> tuple[int, ...]:
    """
    Binary BM with polynomials packed into ints (bit i = coefficient of x^i).
    `window` holds s_n at bit 0, s_(n-1) at bit 1, ..., so the discrepancy
    is the parity of C & window.
    """
    c = b = 1
    length, shift = 0, 1
    window = 0
    for n, bit in enumerate(bits):
        window = (window << 1) | bit
        if not (c & window).bit_count() & 1:
            shift += 1
            continue
        if 2 * length <= n:
            previous = c
            c ^= b << shift
            length = n + 1 - length
            b = previous
            shift = 1
        else:
            c ^= b << shift
            shift += 1
    return tuple((c >> i) & 1 for i in range(1, length + 1))


def _berlekamp_massey_gfq(elems: Sequence[int], q: int) -> tuple[int, ...]:
    """Textbook BM over GF(q) on connection-polynomial coefficient lists."""
    c = [1]
    b = [1]
    length, shift, last = 0, 1, 1
    for n, s_n in enumerate(elems):
        d = s_n
        for i in range(1, length + 1):
            d += c[i] * elems[n - i]
        d %= q
        if d == 0:
            shift += 1
            continue
        factor = d * pow(last, -1, q) % q
        updated = c + [0] * max(0, len(b) + shift - len(c))
        for i, coef in enumerate(b):
            updated[i + shift] = (updated[i + shift] - factor * coef) % q
        if 2 * length <= n:
            b = c
            length = n + 1 - length
            last = d
            shift = 1
        else:
            shift += 1
        c = updated + [0] * max(0, length + 1 - len(updated))
    c = c + [0] * max(0, length + 1 - len(c))
    return tuple((-coef) % q for coef in c[1:length + 1])


def berlekamp_massey(s: FieldSeq) -> FeedbackPolynomial:
    """Minimal-length feedback polynomial regenerating all of s."""
    if not s.elems:
        raise ValueError("Berlekamp-Massey needs a nonempty sequence")
    if s.char == 2:
        coeffs = _berlekamp_massey_gf2(s.elems)
    else:
        coeffs = _berlekamp_massey_gfq(s.elems, s.char)
    return FeedbackPolynomial(s.char, coeffs)


def lfsr_replay(f: FeedbackPolynomial, seed: Sequence[int], count: int) -> FieldSeq:
    """First `count` terms of the LFSR stream of f started from seed."""
    if len(seed) != f.degree:
        raise ValueError(f"seed has {len(seed)} terms, register length is {f.degree}")
    out = list(seed)
    for n in range(f.degree, count):
        out.append(sum(c * out[n - i] for i, c in enumerate(f.coeffs, start=1)) % f.char)
    return FieldSeq(f.char, tuple(out[:count]))


def periodic_complexity(period: FieldSeq) -> int:
    """Linear complexity of the infinite periodic extension of `period`."""
    if not period.elems:
        raise ValueError("period must be nonempty")
    return berlekamp_massey(period.doubled()).degree


def legendre_closed_form(p: PrimeModulus) -> int:
    """Known linear complexity of the Legendre sequence, by p mod 8."""
    match p % 8:
        case 7:
            return (p + 1) // 2
        case 1:
            return (p - 1) // 2
        case 3:
            return p
        case 5:
            return p - 1
    raise ValueError(f"{p} is not an odd prime")
