"""Constants seeded at a Mersenne prime: A = lim (p_n ** (1/m**n)), p_1 = 2**p - 1.

Only the first chain element is known, so everything follows from

    log A  in  [log(2**p - 1) / m,  p*log(2) / m)

written as ``p*log(2)/m + offset`` with ``offset`` in ``[log(1 - x)/m, 0)``
and ``x = 2**-p``.  The offset is bounded below by ``-(x + x*x)/m`` which
needs no logarithm at all, so 2**p - 1 is never built for large p.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, HorizonError
from .numerics import (
    DigitCertificate,
    Dyadic,
    DyadicInterval,
    compare_fraction,
    digits,
    iv_add,
    iv_div,
    iv_exp,
    iv_log,
    iv_mul,
    ln2,
)
from .primality import KNOWN_MERSENNE_EXPONENTS, LUCAS_LEHMER_LIMIT, Evidence
from .sequence import UNCONDITIONAL_M

# Up to this exponent log(1 - 2**-p) is also evaluated directly and the
# result intersected with the Taylor bound; that matters only for tiny p.
DIRECT_LOG_LIMIT = 1 << 12

_LOG2_10 = math.log2(10)


def _x(p: int) -> Dyadic:
    return Dyadic(1, -p)


def log_offset(p: int, m: int, prec: int) -> DyadicInterval:
    """Enclosure of ``log A - p*log(2)/m``.

    The upper end is 0 and is exclusive: A lies strictly below
    ``2 ** (p/m)``.  The lower end is ``log(1 - x)/m``, bounded via
    ``log(1 - x) > -x - x*x``.
    """
    if p < 2 or m < 2:
        raise DomainError("need p >= 2 and m >= 2")
    x = _x(p)
    taylor = DyadicInterval.point(-(x + x * x), prec)
    mm = DyadicInterval.point(m, prec)
    lower = iv_div(taylor, mm, prec).lo
    if p <= DIRECT_LOG_LIMIT:
        one_minus = DyadicInterval.point(Dyadic(1) - x, prec)
        direct = iv_div(iv_log(one_minus, prec), mm, prec).lo
        lower = max(lower, direct)
    return DyadicInterval(lower, Dyadic(0), prec)


def log_bracket(p: int, m: int, precision: int = 256) -> DyadicInterval:
    """Enclosure of ``log A`` for the chain seeded at ``2**p - 1``.

    The top endpoint stands for ``p*log(2)/m`` which A never reaches.
    """
    prec = precision
    base = iv_div(
        iv_mul(ln2(prec + 8), DyadicInterval.point(p, prec + 8), prec + 8),
        DyadicInterval.point(m, prec + 8),
        prec,
    )
    return iv_add(base, log_offset(p, m, prec), prec)


def taylor_bracket(p: int, m: int, precision: int = 256) -> DyadicInterval:
    """Two-sided enclosure of ``log(2**p - 1)/m`` from the order-2 Taylor bounds

        -x - x*x  <  log(1 - x)  <  -x - x*x/2.

    This brackets the first chain element's contribution, ``log`` of the
    lower end of the seed interval, not log A itself.
    """
    prec = precision
    x = _x(p)
    mm = DyadicInterval.point(m, prec)
    lo = iv_div(DyadicInterval.point(-(x + x * x), prec), mm, prec).lo
    hi = iv_div(DyadicInterval.point(-(x + (x * x).scale(-1)), prec), mm, prec).hi
    base = iv_div(
        iv_mul(ln2(prec + 8), DyadicInterval.point(p, prec + 8), prec + 8), mm, prec
    )
    return iv_add(base, DyadicInterval(lo, hi, prec), prec)


def theorem_bounds_hold(p: int, m: int, offset: DyadicInterval) -> bool:
    """``p log2/m - 2/(m 2**p) < log A < p log2/m``, checked on the offset.

    Exact rational comparison; the top holds because the offset's upper
    endpoint 0 is exclusive by construction.
    """
    floor_q = Fraction(-2, m * (1 << p)) if p < 4096 else None
    if floor_q is not None:
        above = compare_fraction(offset.lo, floor_q) > 0
    else:
        # -2x/m is a dyadic divided by m; compare lo*m against -2x exactly.
        above = offset.lo * Dyadic(m) > Dyadic(-1, 1 - p)
    return above and offset.hi <= Dyadic(0)


# ---------------------------------------------------------------------------
# Horizon and digits
# ---------------------------------------------------------------------------


def _a_width_bound(p: int, m: int, prec: int) -> DyadicInterval:
    """Upper bound interval for the width of the A bracket."""
    x = _x(p)
    w_log = iv_div(DyadicInterval.point(x + x * x, prec), DyadicInterval.point(m, prec), prec)
    top = log_bracket(p, m, prec).hi
    a_hi = iv_exp(DyadicInterval.point(top, prec), prec)
    # exp(b) - exp(a) <= exp(b) * (b - a)
    return iv_mul(a_hi, w_log, prec)


def horizon(p: int, m: int) -> int:
    """Most fractional digits of A the seed alone can determine.

    ``floor(-log10(w))`` for an upper bound ``w`` on the width of the A
    bracket, roughly ``p*log10(2) + log10(m) - log10(A)``.
    """
    prec = p.bit_length() + m.bit_length() + 64
    w = _a_width_bound(p, m, prec)
    ln10 = iv_log(DyadicInterval.point(10, prec), prec)
    neg_log10 = iv_div(-iv_log(w, prec), ln10, prec)
    return max(0, neg_log10.lo.floor())


def _evidence(p: int) -> Evidence:
    if p in KNOWN_MERSENNE_EXPONENTS:
        return Evidence.LUCAS_LEHMER if p <= LUCAS_LEHMER_LIMIT else Evidence.EXTERNALLY_CERTIFIED
    return Evidence.STRONG_PROBABLE


@dataclass(frozen=True)
class MersenneConstantReport:
    p: int
    m: int
    log_bracket: DyadicInterval
    a_bracket: DyadicInterval
    certificate: DigitCertificate
    horizon: int
    unconditional: bool
    seed_evidence: Evidence

    @property
    def text(self) -> str:
        return self.certificate.text

    def fields(self) -> dict:
        return {
            "kind": "mersenne_theorem",
            "p": self.p,
            "m": self.m,
            "seed": f"2^{self.p}-1",
            "seed_evidence": self.seed_evidence.value,
            "unconditional": self.unconditional,
            "horizon": self.horizon,
            "certified_digits": self.certificate.certified_count,
            "caveats": list(self.certificate.caveats),
            "value": self.certificate.text,
        }


def _constant(p: int, m: int, prec: int, wanted: int):
    lb = log_bracket(p, m, prec + 16)
    a = iv_exp(lb, prec)
    return lb, a, digits(a, wanted)


def constant_digits(p: int, m: int, wanted: int) -> MersenneConstantReport:
    """Certified ``wanted``-digit prefix of A, refused past the horizon."""
    if p < 2 or m < 2:
        raise DomainError("need p >= 2 and m >= 2")
    h = horizon(p, m)
    if wanted > h:
        raise HorizonError(
            f"{wanted} digits requested but only {h} are determined by 2^{p}-1; "
            "later digits depend on primes nobody has found",
            h,
        )
    magnitude = p // m + 2
    prec = int(wanted * _LOG2_10) + magnitude + 64
    lb, a, cert = _constant(p, m, prec, wanted)
    # a truncation boundary (a run of 9s) can cost digits; more bits help
    # until the bracket's own width is the limit
    while cert.certified_count < wanted and prec < 4 * (wanted * _LOG2_10 + magnitude) + 256:
        prec *= 2
        lb, a, cert = _constant(p, m, prec, wanted)
    caveats = []
    if m < UNCONDITIONAL_M:
        caveats.append(f"no unconditional guarantee: m={m} is below {UNCONDITIONAL_M}")
    ev = _evidence(p)
    if ev is Evidence.STRONG_PROBABLE:
        caveats.append(f"2^{p}-1 is not a known Mersenne prime")
    elif ev is Evidence.EXTERNALLY_CERTIFIED:
        caveats.append(f"primality of 2^{p}-1 taken on external certification")
    if cert.certified_count < wanted:
        caveats.append(f"only {cert.certified_count} of {wanted} digits certified")
    return MersenneConstantReport(
        p, m, lb, a, cert.with_caveats(*caveats), h,
        m >= UNCONDITIONAL_M and ev is not Evidence.STRONG_PROBABLE, ev,
    )


# ---------------------------------------------------------------------------
# Precision transfer
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TransferCheck:
    holds: bool
    difference: Dyadic
    bound: DyadicInterval

    @property
    def slack(self) -> float:
        """Ratio bound / difference (inf when the difference is zero)."""
        if self.difference.sign == 0:
            return math.inf
        return float(self.bound.lo) / float(self.difference)


def _transfer_pair(x: Dyadic, y: Dyadic) -> TransferCheck:
    diff = y - x
    if diff.sign == 0:
        return TransferCheck(True, diff, DyadicInterval.point(0))
    prec = 64 + max(8, -(diff.magnitude - x.magnitude)) + abs(x.magnitude)
    ratio = iv_div(DyadicInterval.point(y, prec), DyadicInterval.point(x, prec), prec)
    bound = iv_mul(DyadicInterval.point(x.scale(1), prec), iv_log(ratio, prec), prec)
    return TransferCheck(diff < bound.lo, diff, bound)


def precision_transfer_check(a1: DyadicInterval, a2: DyadicInterval) -> TransferCheck:
    """Check ``A2 - A1 < 2*A1*(log A2 - log A1)`` at the endpoint pairs.

    Close logarithms imply close values; this is the inequality that turns
    digits of log A into digits of A.  Returns the tighter of the two
    endpoint checks, which fails if either fails.
    """
    if a1.lo.sign <= 0 or a2.lo.sign <= 0:
        raise DomainError("both intervals must be positive")
    if a1.lo > a2.lo or a1.hi > a2.hi:
        raise DomainError("need a1 <= a2 endpoint-wise")
    checks = [_transfer_pair(a1.lo, a2.lo), _transfer_pair(a1.hi, a2.hi)]
    failing = [c for c in checks if not c.holds]
    if failing:
        return failing[0]
    return min(checks, key=lambda c: c.slack)
