"""Primality decisions with explicit evidence levels, and least-prime search.

Three tiers:

* trial division below ``SearchPolicy.trial_bound`` (a proof),
* strong tests to the fixed bases 2..41, which is a proof below
  3 317 044 064 679 887 385 961 981,
* above that, BPSW (strong base-2 test plus a strong Lucas test with
  Selfridge parameters) and ``probable_rounds`` extra Miller-Rabin bases.
  The extra bases come from a generator seeded with ``n`` itself, so a
  verdict never depends on ambient randomness.
"""
from __future__ import annotations

import enum
import math
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import gmpy2

# Sorenson & Webster: strong tests to the first 13 prime bases are
# deterministic below this bound.
DETERMINISTIC_BOUND = 3_317_044_064_679_887_385_961_981
DETERMINISTIC_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


class Evidence(str, enum.Enum):
    PROVEN_TRIAL_DIVISION = "proven_trial_division"
    DETERMINISTIC_BASES = "deterministic_bases"
    LUCAS_LEHMER = "lucas_lehmer"
    EXTERNALLY_CERTIFIED = "externally_certified"
    STRONG_PROBABLE = "strong_probable"

    @property
    def is_proof(self) -> bool:
        return self is not Evidence.STRONG_PROBABLE


@dataclass(frozen=True)
class PrimeWitness:
    value: int
    evidence: Evidence
    test_parameters: str = ""

    def __bool__(self):
        return True

    def __int__(self):
        return self.value

    def __index__(self):
        return self.value

    @property
    def probable(self) -> bool:
        return self.evidence is Evidence.STRONG_PROBABLE


@dataclass(frozen=True)
class Composite:
    """Negative verdict.  ``factor`` is a nontrivial divisor when one was found."""

    value: int
    factor: int | None = None
    failed_base: int | None = None
    reason: str = ""

    def __bool__(self):
        return False


@dataclass(frozen=True)
class SearchPolicy:
    """Knobs for :func:`is_prime` and :func:`least_prime_in`.

    ``wheel_size`` is how many leading primes form the primorial wheel that
    pre-filters search windows; ``sieve_limit`` caps the extra sieving primes.
    """

    wheel_size: int = 6
    probable_rounds: int = 4
    deterministic_threshold: int = DETERMINISTIC_BOUND
    trial_bound: int = 1 << 20
    sieve_limit: int = 1 << 20

    def __post_init__(self):
        if self.probable_rounds < 1:
            raise ValueError("probable_rounds must be at least 1")
        if self.deterministic_threshold > DETERMINISTIC_BOUND:
            raise ValueError("deterministic_threshold above the proven bound")
        if self.wheel_size < 0:
            raise ValueError("wheel_size must be non-negative")


DEFAULT_POLICY = SearchPolicy()


@lru_cache(maxsize=8)
def small_primes(limit: int) -> tuple[int, ...]:
    """All primes ``<= limit`` (plain sieve of Eratosthenes)."""
    if limit < 2:
        return ()
    sieve = bytearray(b"\x01") * (limit + 1)
    sieve[0:2] = b"\x00\x00"
    for p in range(2, math.isqrt(limit) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytes(len(range(p * p, limit + 1, p)))
    return tuple(i for i, v in enumerate(sieve) if v)


def _strong_test(n: int, base: int, d: int, s: int) -> bool:
    x = gmpy2.powmod(base, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = gmpy2.powmod(x, 2, n)
        if x == n - 1:
            return True
        if x == 1:
            return False
    return False


def _jacobi(a: int, n: int) -> int:
    return int(gmpy2.jacobi(a, n))


def _strong_lucas(n: int) -> bool:
    """Strong Lucas probable-prime test, Selfridge method A parameters."""
    if gmpy2.is_square(n):
        return False
    d = 5
    while True:
        j = _jacobi(d, n)
        if j == -1:
            break
        if j == 0 and abs(d) != n:
            return False
        d = -d - 2 if d > 0 else -d + 2
    p, q = 1, (1 - d) // 4
    # n + 1 = k * 2**s with k odd
    k = n + 1
    s = 0
    while not k & 1:
        k >>= 1
        s += 1
    n_ = gmpy2.mpz(n)
    u, v, qk = gmpy2.mpz(0), gmpy2.mpz(2), gmpy2.mpz(1)
    # left-to-right binary ladder for (U_k, V_k, Q^k)
    inv2 = (n_ + 1) // 2
    for bit in bin(k)[2:]:
        u = (u * v) % n_
        v = (v * v - 2 * qk) % n_
        qk = (qk * qk) % n_
        if bit == "1":
            u, v = ((p * u + v) * inv2) % n_, ((d * u + p * v) * inv2) % n_
            qk = (qk * q) % n_
    if u == 0 or v == 0:
        return True
    for _ in range(s - 1):
        v = (v * v - 2 * qk) % n_
        if v == 0:
            return True
        qk = (qk * qk) % n_
    return False


def _trial(n: int, bound: int):
    """Smallest prime factor of ``n`` up to ``bound`` (None if there is none)."""
    for p in small_primes(min(bound, 1 << 16)):
        if p * p > n:
            return None
        if n % p == 0:
            return p
    if bound > (1 << 16):
        limit = min(bound, math.isqrt(n))
        f = (1 << 16) | 1
        while f <= limit:
            if n % f == 0:
                return f
            f += 2
    return None


def is_prime(n: int, policy: SearchPolicy = DEFAULT_POLICY) -> PrimeWitness | Composite:
    """Decide primality of ``n >= 0`` and say how strong the evidence is."""
    n = int(n)
    if n < 2:
        return Composite(n, reason="less than 2")
    if n < policy.trial_bound:
        f = _trial(n, math.isqrt(n))
        if f is not None and f != n:
            return Composite(n, factor=f, reason="trial division")
        return PrimeWitness(
            n, Evidence.PROVEN_TRIAL_DIVISION, f"trial division to {math.isqrt(n)}"
        )
    f = _trial(n, 1000)
    if f is not None:
        return Composite(n, factor=f, reason="small factor")
    d, s = n - 1, 0
    while not d & 1:
        d >>= 1
        s += 1
    if n < policy.deterministic_threshold:
        for base in DETERMINISTIC_BASES:
            if not _strong_test(n, base, d, s):
                return Composite(n, failed_base=base, reason="strong test")
        return PrimeWitness(
            n,
            Evidence.DETERMINISTIC_BASES,
            f"strong bases {DETERMINISTIC_BASES[0]}..{DETERMINISTIC_BASES[-1]}, "
            f"valid below {policy.deterministic_threshold}",
        )
    if not _strong_test(n, 2, d, s):
        return Composite(n, failed_base=2, reason="strong test")
    if not _strong_lucas(n):
        return Composite(n, reason="strong Lucas test")
    rng = random.Random(n)
    bases = []
    for _ in range(policy.probable_rounds):
        base = rng.randrange(3, n - 1)
        bases.append(base)
        if not _strong_test(n, base, d, s):
            return Composite(n, failed_base=base, reason="strong test")
    return PrimeWitness(
        n,
        Evidence.STRONG_PROBABLE,
        f"BPSW + {policy.probable_rounds} strong rounds seeded from n",
    )


# ---------------------------------------------------------------------------
# Windowed search
# ---------------------------------------------------------------------------


def _sieve_bound(n: int, policy: SearchPolicy) -> int:
    bits = n.bit_length()
    return max(1000, min(policy.sieve_limit, bits * bits // 8))


def _window(start: int, length: int, n_hint: int, policy: SearchPolicy) -> bytearray:
    """Flags for ``start .. start+length-1``: 0 where a small prime divides."""
    flags = bytearray(b"\x01") * length
    wheel = small_primes(_sieve_bound(n_hint, policy))
    for p in wheel:
        if p * p > start + length:
            break
        first = -start % p
        if start + first == p:
            first += p
        flags[first::p] = bytes(len(range(first, length, p)))
    for i in range(min(length, max(0, 2 - start))):
        flags[i] = 0
    return flags


def _window_length(n: int) -> int:
    return max(256, min(1 << 16, 4 * n.bit_length()))


def iter_primes(lo_inclusive: int, hi_exclusive: int | None = None,
                policy: SearchPolicy = DEFAULT_POLICY) -> Iterator[PrimeWitness]:
    """Primes in ``[lo_inclusive, hi_exclusive)`` in ascending order."""
    start = max(lo_inclusive, 0)
    while hi_exclusive is None or start < hi_exclusive:
        length = _window_length(start)
        if hi_exclusive is not None:
            length = min(length, hi_exclusive - start)
        flags = _window(start, length, start + length, policy)
        for i in range(length):
            if flags[i]:
                w = is_prime(start + i, policy)
                if w:
                    yield w
        start += length


def iter_primes_down(hi_inclusive: int, lo_inclusive: int = 2,
                     policy: SearchPolicy = DEFAULT_POLICY) -> Iterator[PrimeWitness]:
    """Primes in ``[lo_inclusive, hi_inclusive]`` in descending order."""
    top = hi_inclusive
    lo_inclusive = max(lo_inclusive, 2)
    while top >= lo_inclusive:
        length = min(_window_length(top), top - lo_inclusive + 1)
        start = top - length + 1
        flags = _window(start, length, top, policy)
        for i in range(length - 1, -1, -1):
            if flags[i]:
                w = is_prime(start + i, policy)
                if w:
                    yield w
        top = start - 1


def least_prime_in(lo_exclusive: int, hi_exclusive: int,
                   policy: SearchPolicy = DEFAULT_POLICY) -> PrimeWitness | None:
    """Smallest prime strictly between the two bounds, or ``None``."""
    if lo_exclusive >= hi_exclusive:
        raise ValueError("empty search interval")
    for w in iter_primes(lo_exclusive + 1, hi_exclusive, policy):
        return w
    return None


# ---------------------------------------------------------------------------
# Mersenne numbers
# ---------------------------------------------------------------------------

# Exponents p with 2**p - 1 prime, as certified by GIMPS and earlier searches.
KNOWN_MERSENNE_EXPONENTS = (
    2, 3, 5, 7, 13, 17, 19, 31, 61, 89, 107, 127, 521, 607, 1279, 2203, 2281,
    3217, 4253, 4423, 9689, 9941, 11213, 19937, 21701, 23209, 44497, 86243,
    110503, 132049, 216091, 756839, 859433, 1257787, 1398269, 2976221, 3021377,
    6972593, 13466917, 20996011, 24036583, 25964951, 30402457, 32582657,
    37156667, 42643801, 43112609, 57885161, 74207281, 77232917, 82589933,
    136279841,
)

# Above this exponent the Lucas-Lehmer recheck is skipped as too slow.
LUCAS_LEHMER_LIMIT = 20000


def mersenne(p: int) -> int:
    if p < 2:
        raise ValueError("Mersenne exponent must be at least 2")
    return (1 << p) - 1


def mersenne_digit_count(p: int) -> int:
    """Number of decimal digits of ``2**p - 1`` without building it."""
    from .numerics import DyadicInterval, iv_log, iv_mul, ln2

    prec = p.bit_length() + 64
    # digits = floor(p * log10 2) + 1, since 2**p is never a power of ten
    log10_2 = iv_mul(ln2(prec), DyadicInterval.point(1, prec)) / iv_log(
        DyadicInterval.point(10, prec), prec
    )
    v = iv_mul(log10_2, DyadicInterval.point(p, prec), prec)
    lo, hi = v.floor_range()
    if lo != hi:
        return len(str(mersenne(p)))
    return lo + 1


def lucas_lehmer(p: int) -> bool:
    """Lucas-Lehmer test for ``2**p - 1`` with ``p`` an odd prime (or 2)."""
    if p == 2:
        return True
    m = gmpy2.mpz(mersenne(p))
    s = gmpy2.mpz(4)
    for _ in range(p - 2):
        s = (s * s - 2) % m
    return s == 0


def mersenne_witness(p: int) -> PrimeWitness:
    """Witness for a known Mersenne prime.

    Small exponents are re-proven with Lucas-Lehmer; large ones are accepted
    on external certification and labelled as such.
    """
    if p not in KNOWN_MERSENNE_EXPONENTS:
        raise ValueError(f"2**{p} - 1 is not a known Mersenne prime")
    value = mersenne(p)
    if p <= LUCAS_LEHMER_LIMIT:
        if not lucas_lehmer(p):
            raise AssertionError(f"Lucas-Lehmer rejected 2**{p} - 1")
        return PrimeWitness(value, Evidence.LUCAS_LEHMER, f"Lucas-Lehmer, p={p}")
    return PrimeWitness(
        value,
        Evidence.EXTERNALLY_CERTIFIED,
        f"2**{p} - 1, known Mersenne prime (GIMPS certification, not re-proven)",
    )
