"""Older prime-producing formulas, evaluated with honest error tracking.

Wilson's and Gandhi's formulas are exact.  Wright's tower and Fridman's
recurrence amplify any uncertainty in their seed constant, so they take
interval seeds and stop as soon as a floor can no longer be certified.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .errors import DomainError, IntegrityError, PrecisionError
from .numerics import (
    Dyadic,
    DyadicInterval,
    iv_add,
    iv_div,
    iv_exp2,
    iv_log2,
)
from .primality import small_primes

SAFE_WIDTH = Dyadic(1, -2)


@dataclass(frozen=True)
class ErrorBudget:
    """How far a seed's uncertainty has been blown up.

    ``amplification`` is the product of the per-step growth factors applied
    so far; ``remaining_valid_steps`` is a conservative estimate of how many
    more steps keep the amplified width below 1/4.
    """

    initial_width: Dyadic
    amplification: int
    remaining_valid_steps: int

    @property
    def amplified_width(self) -> Dyadic:
        return self.initial_width * Dyadic(self.amplification)


@dataclass(frozen=True)
class FloorRun:
    """Certified floors from a forward iteration plus why it stopped."""

    floors: list
    budget: ErrorBudget
    stopped: str = ""
    last_bracket: DyadicInterval | None = None

    @property
    def complete(self) -> bool:
        return not self.stopped


def strict_floor(x: DyadicInterval) -> int | None:
    """Floor shared by the whole interval, with integer endpoints not trusted.

    An outward-rounded endpoint that sits exactly on an integer cannot tell
    which side the true value is on, so ``[3, 3]`` has no certified floor.
    """
    q = x.lo.floor()
    if x.lo > Dyadic(q) and x.hi < Dyadic(q + 1):
        return q
    return None


# ---------------------------------------------------------------------------
# Wilson and Gandhi
# ---------------------------------------------------------------------------


def wilson_value(n: int) -> int:
    """``floor((n! mod (n+1)) / n) * (n - 1) + 2``: n+1 when that is prime, else 2."""
    if n < 1:
        raise DomainError("n must be positive")
    r = 1
    for k in range(2, n + 1):
        r = r * k % (n + 1)
    return (r // n) * (n - 1) + 2


def mobius(d: int, factors=None) -> int:
    """Möbius function.  ``factors`` (prime factors of d, with multiplicity)
    skips factoring when the caller already knows them."""
    if d < 1:
        raise DomainError("d must be positive")
    if factors is None:
        factors = []
        rest = d
        f = 2
        while f * f <= rest:
            while rest % f == 0:
                factors.append(f)
                rest //= f
            f += 1
        if rest > 1:
            factors.append(rest)
    if len(set(factors)) != len(factors):
        return 0
    return -1 if len(factors) % 2 else 1


def _first_primes(k: int) -> list[int]:
    limit = 16
    while True:
        ps = small_primes(limit)
        if len(ps) >= k:
            return list(ps[:k])
        limit *= 2


def primorial_divisors(k: int):
    """``(d, mu(d))`` for every divisor d of the product of the first k primes."""
    ps = _first_primes(k)
    for r in range(len(ps) + 1):
        for combo in combinations(ps, r):
            yield math.prod(combo), mobius(math.prod(combo), list(combo))


# Exact rational evaluation is used while the primorial has at most this
# many divisors.
GANDHI_EXACT_DIVISORS = 64


def _gandhi_exact(n: int) -> int:
    s = Fraction(-1, 2)
    for d, mu in primorial_divisors(n - 1):
        s += Fraction(mu, (1 << d) - 1)
    # floor(1 - log2 s) = k  <=>  2**-k < s <= 2**(1-k)
    k = 1 - math.floor(math.log2(s))
    while not (Fraction(1, 2**k) < s <= Fraction(2, 2**k)):
        k += 1 if s <= Fraction(1, 2**k) else -1
    return k


def _gandhi_term(d: int, mu: int, w: int) -> DyadicInterval:
    if d > w + 2:
        # 2**-d < 1/(2**d - 1) <= 2**(1-d)
        t = DyadicInterval(Dyadic(1, -d), Dyadic(1, 1 - d), w)
    else:
        t = DyadicInterval.from_fraction(Fraction(1, (1 << d) - 1), w)
    return t if mu > 0 else -t


def _gandhi_interval(n: int, w: int) -> int | None:
    s = DyadicInterval.point(Dyadic(-1, -1), w)
    for d, mu in primorial_divisors(n - 1):
        s = iv_add(s, _gandhi_term(d, mu, w), w)
    if s.lo.sign <= 0:
        return None
    k = 1 - s.hi.magnitude + 1
    # s in (2**-k, 2**(1-k)] decides the floor
    for cand in (k - 1, k, k + 1):
        if s.lo > Dyadic(1, -cand) and s.hi <= Dyadic(1, 1 - cand):
            return cand
    return None


def gandhi_prime(n: int, max_bits: int = 1 << 14) -> int:
    """n-th prime from Gandhi's Möbius sum over the divisors of a primorial."""
    if n < 1:
        raise DomainError("n must be positive")
    if 2 ** (n - 1) <= GANDHI_EXACT_DIVISORS:
        return _gandhi_exact(n)
    w = 64
    while w <= max_bits:
        k = _gandhi_interval(n, w)
        if k is not None:
            return k
        w *= 2
    raise PrecisionError(f"Gandhi sum for n={n} undecided at {max_bits} bits")


# ---------------------------------------------------------------------------
# Wright's tower
# ---------------------------------------------------------------------------

_LN2_UPPER = Fraction(7, 10)


def _wright_factor(g: DyadicInterval) -> int:
    """Upper bound on d(2**g)/dg over the interval, as an integer."""
    hi = g.hi.ceil()
    return max(1, math.ceil((2**hi) * _LN2_UPPER)) if hi < 1 << 16 else 0


def _wright_remaining(width: Dyadic, g: DyadicInterval) -> int:
    steps, top = 0, g.hi.ceil() + 1
    while top < 64:
        width = width * Dyadic(math.ceil(2**top * _LN2_UPPER))
        if width >= SAFE_WIDTH:
            break
        steps += 1
        top = 2**top + 1
    return steps


def wright_floors(omega: DyadicInterval, steps: int, precision: int | None = None) -> FloorRun:
    """Floors of ``g_1 = 2**omega, g_{k+1} = 2**g_k`` while they stay certain."""
    base = precision or max(omega.precision_bits, 64)
    floors, amp = [], 1
    g = omega
    stopped = ""
    for k in range(1, steps + 1):
        factor = _wright_factor(g)
        if factor == 0:
            stopped = f"step {k}: exponent too large to evaluate"
            break
        prec = base + max(0, g.hi.ceil()) + 16
        g = iv_exp2(g.with_precision(prec), prec)
        amp *= factor
        # an exact power of two is an exact floor, not a rounded boundary
        q = g.lo.floor() if g.is_point() and g.lo.is_integer() else strict_floor(g)
        if q is None:
            stopped = f"step {k}: bracket {g!r} straddles an integer"
            break
        floors.append(q)
    budget = ErrorBudget(omega.width, amp, _wright_remaining(omega.width * Dyadic(amp), g))
    return FloorRun(floors, budget, stopped, g)


def wright_omega_from_floors(floors, precision: int = 128) -> DyadicInterval:
    """Bracket for omega from known floors ``q_k = floor(g_k)``.

    Each floor gives ``omega in log2^k([q_k, q_k + 1))``; the result is the
    intersection (top end exclusive).
    """
    if not floors:
        raise DomainError("need at least one floor")
    prec = precision + 16
    bracket = None
    for k, q in enumerate(floors, start=1):
        if q < 1:
            raise DomainError("floors must be positive")
        lo = DyadicInterval.point(q, prec)
        hi = DyadicInterval.point(q + 1, prec)
        for _ in range(k):
            if lo.lo.sign <= 0:
                raise IntegrityError(f"floor {q} at step {k} is too small for the tower")
            lo, hi = iv_log2(lo, prec), iv_log2(hi, prec)
        piece = DyadicInterval(lo.lo, hi.hi, prec)
        bracket = piece if bracket is None else bracket.intersect(piece)
        if bracket is None:
            raise IntegrityError(f"floors {list(floors)} are inconsistent at step {k}")
    return bracket.with_precision(precision)


# ---------------------------------------------------------------------------
# Fridman's recurrence
# ---------------------------------------------------------------------------


def _fridman_remaining(width: Dyadic, q: int) -> int:
    # Bertrand: the next floors are below 2q, 4q, ...
    steps = 0
    while True:
        q *= 2
        width = width * Dyadic(q)
        if width >= SAFE_WIDTH:
            return steps
        steps += 1


def fridman_step(f: DyadicInterval, q: int) -> DyadicInterval:
    """``f -> q * (f - q + 1)`` with ``q = floor(f)``; exact on dyadic endpoints."""
    shift = Dyadic(q * q - q)
    lo = f.lo * Dyadic(q) - shift
    hi = f.hi * Dyadic(q) - shift
    return DyadicInterval(lo, hi, f.precision_bits)


def fridman_forward(f1: DyadicInterval, max_steps: int = 100) -> FloorRun:
    """Primes ``floor(f_n)`` from a seed bracket, until a floor is uncertain."""
    q = strict_floor(f1)
    if q is None:
        raise DomainError(f"seed {f1!r} straddles an integer")
    floors, amp, f = [], 1, f1
    stopped = ""
    while len(floors) < max_steps:
        q = strict_floor(f)
        if q is None:
            stopped = f"step {len(floors) + 1}: bracket {f!r} straddles an integer"
            break
        floors.append(q)
        if len(floors) == max_steps:
            break
        f = fridman_step(f, q)
        amp *= q
    remaining = 0
    if not stopped:
        remaining = _fridman_remaining(f.width, floors[-1])
    return FloorRun(floors, ErrorBudget(f1.width, amp, remaining), stopped, f)


def fridman_backward(primes, precision: int | None = None) -> DyadicInterval:
    """Bracket for f_1 given the first N primes.

    Runs ``f_{n-1} = f_n / p_{n-1} + p_{n-1} - 1`` backwards from
    ``f_N in [p_N, p_N + 1)``, clipping to ``[p_n, p_n + 1)`` each step.
    """
    primes = [int(p) for p in primes]
    if not primes:
        raise DomainError("need at least one prime")
    expected = _first_primes(len(primes))
    if primes != expected:
        raise DomainError("primes must be 2, 3, 5, ... in order")
    prec = precision or sum(p.bit_length() for p in primes) + 64
    f = DyadicInterval(Dyadic(primes[-1]), Dyadic(primes[-1] + 1), prec)
    for p in reversed(primes[:-1]):
        pp = DyadicInterval.point(p, prec)
        f = iv_add(iv_div(f, pp, prec), DyadicInterval.point(p - 1, prec), prec)
        f = f.intersect(DyadicInterval(Dyadic(p), Dyadic(p + 1), prec))
        if f is None:
            raise IntegrityError(f"backward recurrence left [{p}, {p + 1})")
    return f
