"""
Number-theoretic primitives on arbitrary-precision integers: primality, prime
iteration, factorization of p - 1, Legendre symbols, Euler phi and primitive
roots.
"""
from dataclasses import dataclass
from functools import lru_cache
from math import isqrt, prod

import gmpy2
import numpy as np
from sympy.ntheory import ecm

from constants import ErrorMessages, NumberTheoryConstants
from exceptions import BudgetExhausted, DegenerateModulus
from utils import setup_logger

logger = setup_logger("numtheory")

# An odd prime, validated where it matters
PrimeModulus = int


@dataclass(frozen=True)
class Factorization:
    """Prime factorization as (prime, exponent) pairs, ascending by prime"""
    factors: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        primes = [q for q, _ in self.factors]
        if any(a >= b for a, b in zip(primes, primes[1:])):
            raise ValueError(f"factors must be strictly increasing: {primes}")
        if any(e < 1 for _, e in self.factors):
            raise ValueError("exponents must be positive")

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(q for q, _ in self.factors)

    def value(self) -> int:
        """The integer this factorization reconstructs."""
        return prod(q**e for q, e in self.factors)

    @classmethod
    def from_dict(cls, counts: dict[int, int]) -> "Factorization":
        return cls(tuple(sorted(counts.items())))


def make_rng(*entropy: int) -> np.random.Generator:
    """PCG64 generator keyed by arbitrary-size integers."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(list(entropy))))


def random_int_between(rng: np.random.Generator, lo: int, hi: int) -> int:
    """Uniform integer in [lo, hi] by rejection sampling on raw bytes."""
    span = hi - lo + 1
    if span <= 0:
        raise ValueError(f"empty range [{lo}, {hi}]")
    nbits = (span - 1).bit_length()
    if nbits == 0:
        return lo
    nbytes = (nbits + 7) // 8
    mask = (1 << nbits) - 1
    while True:
        candidate = int.from_bytes(rng.bytes(nbytes), "little") & mask
        if candidate < span:
            return lo + candidate


@lru_cache(maxsize=8)
def small_primes(limit: int) -> tuple[int, ...]:
    """All primes <= limit (sieve of Eratosthenes)."""
    if limit < 2:
        return ()
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for i in range(2, isqrt(limit) + 1):
        if sieve[i]:
            sieve[i * i::i] = False
    return tuple(int(q) for q in np.flatnonzero(sieve))


def _is_strong_probable_prime(n: int, a: int) -> bool:
    d = n - 1
    s = (d & -d).bit_length() - 1
    d >>= s
    x = gmpy2.powmod(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = gmpy2.powmod(x, 2, n)
        if x == n - 1:
            return True
    return False


def _witnesses(n: int) -> tuple[int, ...]:
    """
    Fixed witnesses below DETERMINISTIC_LIMIT (exact there); above it,
    RANDOM_WITNESS_ROUNDS witnesses from a PCG64 stream seeded with n itself.
    """
    if n < NumberTheoryConstants.DETERMINISTIC_LIMIT:
        return NumberTheoryConstants.DETERMINISTIC_WITNESSES
    rng = make_rng(n)
    return tuple(
        random_int_between(rng, 2, n - 2)
        for _ in range(NumberTheoryConstants.RANDOM_WITNESS_ROUNDS)
    )


def is_prime(n: int) -> bool:
    """Deterministic below 3.3e24, reproducible Miller-Rabin above."""
    if n < 2:
        return False
    limit = NumberTheoryConstants.SMALL_PRIME_FILTER
    for q in small_primes(limit):
        if n == q:
            return True
        if n % q == 0:
            return False
    if n < limit * limit:
        return True
    return all(_is_strong_probable_prime(n, a) for a in _witnesses(n))


def next_prime(n: int) -> int:
    """Smallest prime strictly greater than n."""
    if n < 2:
        return 2
    candidate = n + 1 if n % 2 == 0 else n + 2
    while not is_prime(candidate):
        candidate += 2
    return candidate


def primes_from(start: int, count: int) -> list[PrimeModulus]:
    """The `count` consecutive primes >= start."""
    if count < 1:
        raise ValueError("count must be positive")
    p = start if is_prime(start) else next_prime(start)
    primes = [p]
    while len(primes) < count:
        p = next_prime(p)
        primes.append(p)
    return primes


def nth_prime(index: int) -> PrimeModulus:
    """1-based: nth_prime(1) == 2, as MAPLE's ithprime."""
    if index < 1:
        raise ValueError("index must be positive")
    return primes_from(2, index)[-1]


def _brent_rho(n: int, budget: int) -> int:
    """
    One nontrivial factor of the odd composite n, or BudgetExhausted after
    `budget` polynomial steps. Starting points come from a stream seeded by n.
    """
    rng = make_rng(n)
    batch = NumberTheoryConstants.RHO_BATCH_SIZE
    modulus = gmpy2.mpz(n)
    spent = 0

    while spent < budget:
        y = gmpy2.mpz(random_int_between(rng, 1, n - 1))
        c = gmpy2.mpz(random_int_between(rng, 1, n - 1))
        g = q = gmpy2.mpz(1)
        r = 1
        x = ys = y

        while g == 1 and spent < budget:
            x = y
            for _ in range(r):
                y = (y * y + c) % modulus
            spent += r
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(batch, r - k)):
                    y = (y * y + c) % modulus
                    q = q * abs(x - y) % modulus
                g = gmpy2.gcd(q, modulus)
                k += batch
            spent += k
            r *= 2

        if g == modulus:
            # the batch overshot: replay it one step at a time
            g = gmpy2.mpz(1)
            while g == 1:
                ys = (ys * ys + c) % modulus
                g = gmpy2.gcd(abs(x - ys), modulus)

        if 1 < g < modulus:
            return int(g)

    raise BudgetExhausted(n, budget)


def _ecm_divisor(n: int, curves: int) -> int | None:
    """
    One nontrivial factor of the odd composite n by Lenstra's elliptic-curve
    method, or None after `curves` curves. Curves are seeded by n.
    """
    try:
        found = ecm(
            n,
            B1=NumberTheoryConstants.ECM_B1,
            B2=NumberTheoryConstants.ECM_B2,
            max_curve=curves,
            seed=n % 2**32,
        )
    except ValueError:
        return None
    for d in sorted(int(d) for d in found):
        if 1 < d < n and n % d == 0:
            return d
    return None


def factorize(
    n: int,
    budget: int = NumberTheoryConstants.DEFAULT_RHO_BUDGET,
    ecm_curves: int = NumberTheoryConstants.DEFAULT_ECM_CURVES,
) -> Factorization:
    """
    Trial division up to 10^6, then Brent-Pollard rho on what is left; a
    cofactor rho cannot split within `budget` steps goes to up to `ecm_curves`
    elliptic curves. Raises BudgetExhausted rather than returning a partial
    answer.
    """
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    counts: dict[int, int] = {}
    remaining = n

    for q in small_primes(NumberTheoryConstants.TRIAL_DIVISION_LIMIT):
        if q * q > remaining:
            break
        while remaining % q == 0:
            counts[q] = counts.get(q, 0) + 1
            remaining //= q

    pending = [remaining] if remaining > 1 else []
    while pending:
        m = pending.pop()
        if is_prime(m):
            counts[m] = counts.get(m, 0) + 1
            continue
        root = isqrt(m)
        if root * root == m:
            pending.extend((root, root))
            continue
        try:
            d = _brent_rho(m, budget)
            logger.debug(f"rho split {m} -> {d} * {m // d}")
        except BudgetExhausted:
            d = _ecm_divisor(m, ecm_curves) if ecm_curves > 0 else None
            if d is None:
                raise BudgetExhausted(m, budget, ecm_curves) from None
            logger.debug(f"ecm split {m} -> {d} * {m // d}")
        pending.extend((d, m // d))

    return Factorization.from_dict(counts)


def euler_phi(f: Factorization) -> int:
    """phi(n) from the factorization of n."""
    return prod(q ** (e - 1) * (q - 1) for q, e in f.factors)


def require_odd_prime(p: int) -> PrimeModulus:
    if p < 3 or not is_prime(p):
        raise ValueError(ErrorMessages.NOT_PRIME.format(p=p))
    return p


def legendre_symbol(a: int, p: PrimeModulus) -> int:
    """Euler's criterion: a^((p-1)/2) mod p mapped to {-1, 0, 1}."""
    a %= p
    if a == 0:
        return 0
    return 1 if gmpy2.powmod(a, (p - 1) // 2, p) == 1 else -1


def multiplicative_order_is_maximal(g: int, p: PrimeModulus, fpm1: Factorization) -> bool:
    """True iff g is a primitive root mod p."""
    g %= p
    if g == 0:
        return False
    exponent = p - 1
    return all(gmpy2.powmod(g, exponent // q, p) != 1 for q in fpm1.primes)


def quadratic_residues(p: PrimeModulus) -> list[int]:
    """The (p-1)/2 nonzero squares mod p, ascending."""
    marks = bytearray(p)
    square = 0
    for k in range(1, (p - 1) // 2 + 1):
        square = (square + 2 * k - 1) % p  # k^2 = (k-1)^2 + 2k - 1
        marks[square] = 1
    return [x for x in range(1, p) if marks[x]]


def primitive_roots(p: PrimeModulus, fpm1: Factorization | None = None) -> list[int]:
    """All phi(p-1) primitive roots of p, ascending."""
    if p < 3:
        raise DegenerateModulus(p, "primitive roots")
    if fpm1 is None:
        fpm1 = factorize(p - 1)
    first = least_primitive_root(p, fpm1)
    return [first] + [g for g in range(first + 1, p) if multiplicative_order_is_maximal(g, p, fpm1)]


def least_primitive_root(p: PrimeModulus, fpm1: Factorization | None = None) -> int:
    """Smallest primitive root of p (MAPLE's primroot(p))."""
    if fpm1 is None:
        fpm1 = factorize(p - 1)
    for g in range(2, p):
        if multiplicative_order_is_maximal(g, p, fpm1):
            return g
    raise ValueError(ErrorMessages.NOT_PRIME.format(p=p))
