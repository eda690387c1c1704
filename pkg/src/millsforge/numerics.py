"""Dyadic numbers and outward-rounded interval arithmetic.

Every real quantity in the package is carried as a :class:`DyadicInterval`
whose endpoints are exact binary fractions ``mantissa * 2**exponent``.
Operations round the lower endpoint toward -inf and the upper endpoint
toward +inf, so the exact image of the inputs is never lost.  Precision is
always passed in by the caller (``prec`` = significant bits per endpoint);
there is no global working precision.

The transcendental kernels work on scaled integers ("fixed point") and
carry an explicit error bound in units of the last place, which is turned
into the outward rounding at the end.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction

import gmpy2

from .errors import DomainError, ResourceError

# Largest binary exponent (in absolute value) an endpoint may carry.  Going
# past it raises ResourceError instead of producing an unbounded integer.
EXPONENT_LIMIT = 1 << 40

DEFAULT_PRECISION = 64

_LOG10_2 = math.log10(2.0)


def decimal_str(n: int) -> str:
    """``str(n)`` without the interpreter's digit limit for huge integers."""
    if abs(n).bit_length() < 10000:
        return str(n)
    return gmpy2.mpz(n).digits(10)


def parse_int(text: str) -> int:
    """Inverse of :func:`decimal_str`."""
    text = text.strip()
    if len(text) < 3000:
        return int(text)
    return int(gmpy2.mpz(text, 10))


# ---------------------------------------------------------------------------
# Dyadic
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Dyadic:
    """The exact number ``mantissa * 2**exponent``.

    Canonical form: the mantissa is odd, or zero with exponent 0.  Plain
    arithmetic operators are exact; rounding only happens inside the
    interval operations.
    """

    mantissa: int
    exponent: int = 0

    def __post_init__(self):
        m = int(self.mantissa)
        e = int(self.exponent)
        if m == 0:
            e = 0
        elif not m & 1:
            tz = (m & -m).bit_length() - 1
            m >>= tz
            e += tz
        object.__setattr__(self, "mantissa", m)
        object.__setattr__(self, "exponent", e)

    @classmethod
    def of(cls, value) -> "Dyadic":
        """Exact conversion from int, float, Dyadic or a dyadic Fraction."""
        if isinstance(value, Dyadic):
            return value
        if isinstance(value, bool):
            raise TypeError("bool is not a number here")
        if isinstance(value, int):
            return cls(value, 0)
        if isinstance(value, float):
            if not math.isfinite(value):
                raise DomainError(f"non-finite float {value!r}")
            n, d = value.as_integer_ratio()
            return cls(n, -(d.bit_length() - 1))
        if isinstance(value, Fraction):
            d = value.denominator
            if d & (d - 1):
                raise DomainError(f"{value} is not dyadic")
            return cls(value.numerator, -(d.bit_length() - 1))
        if type(value).__name__ == "mpz":
            return cls(int(value), 0)
        raise TypeError(f"cannot convert {type(value).__name__} to Dyadic")

    # -- inspection ---------------------------------------------------------

    @property
    def sign(self) -> int:
        return (self.mantissa > 0) - (self.mantissa < 0)

    @property
    def magnitude(self) -> int:
        """``m`` with ``2**(m-1) <= |x| < 2**m`` (0 for zero)."""
        if self.mantissa == 0:
            return 0
        return self.exponent + abs(self.mantissa).bit_length()

    def is_integer(self) -> bool:
        return self.exponent >= 0 or self.mantissa == 0

    def floor(self) -> int:
        if self.exponent >= 0:
            return self.mantissa << self.exponent
        return self.mantissa >> -self.exponent

    def ceil(self) -> int:
        return -Dyadic(-self.mantissa, self.exponent).floor()

    def to_fraction(self) -> Fraction:
        if self.exponent >= 0:
            return Fraction(self.mantissa << self.exponent)
        return Fraction(self.mantissa, 1 << -self.exponent)

    def __float__(self) -> float:
        m, e = self.mantissa, self.exponent
        n = abs(m).bit_length()
        if n > 60:
            m >>= n - 60
            e += n - 60
        if e + 60 > 1100:
            return math.copysign(math.inf, m)
        if e < -1200:
            return 0.0 * m
        return math.ldexp(m, e)

    def decimal(self, places: int = 20) -> str:
        """Decimal expansion truncated toward zero to ``places`` digits."""
        neg = self.mantissa < 0
        a = abs(self)
        scaled = Dyadic(a.mantissa * 10**places, a.exponent).floor()
        s = decimal_str(scaled).rjust(places + 1, "0")
        body = s[:-places] + "." + s[-places:] if places else s
        return ("-" if neg else "") + body

    def __repr__(self) -> str:
        return f"Dyadic({self.mantissa}, {self.exponent})"

    # -- exact arithmetic ---------------------------------------------------

    def __neg__(self):
        return Dyadic(-self.mantissa, self.exponent)

    def __abs__(self):
        return Dyadic(abs(self.mantissa), self.exponent)

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if self.mantissa == 0:
            return other
        if other.mantissa == 0:
            return self
        e = min(self.exponent, other.exponent)
        return Dyadic(
            (self.mantissa << (self.exponent - e)) + (other.mantissa << (other.exponent - e)), e
        )

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return Dyadic(self.mantissa * other.mantissa, self.exponent + other.exponent)

    __rmul__ = __mul__

    def scale(self, k: int) -> "Dyadic":
        """Exact multiplication by ``2**k``."""
        return Dyadic(self.mantissa, self.exponent + k)

    # -- ordering -----------------------------------------------------------

    def _cmp(self, other) -> int:
        a, b = self, other
        if a.sign != b.sign:
            return 1 if a.sign > b.sign else -1
        if a.sign == 0:
            return 0
        ma, mb = a.magnitude, b.magnitude
        if ma != mb:
            r = 1 if ma > mb else -1
            return r if a.sign > 0 else -r
        e = min(a.exponent, b.exponent)
        x = a.mantissa << (a.exponent - e)
        y = b.mantissa << (b.exponent - e)
        return (x > y) - (x < y)

    def __lt__(self, other):
        other = _coerce(other)
        return NotImplemented if other is NotImplemented else self._cmp(other) < 0

    def __le__(self, other):
        other = _coerce(other)
        return NotImplemented if other is NotImplemented else self._cmp(other) <= 0

    def __gt__(self, other):
        other = _coerce(other)
        return NotImplemented if other is NotImplemented else self._cmp(other) > 0

    def __ge__(self, other):
        other = _coerce(other)
        return NotImplemented if other is NotImplemented else self._cmp(other) >= 0


def _coerce(value):
    if isinstance(value, Dyadic):
        return value
    if isinstance(value, int) and not isinstance(value, bool):
        return Dyadic(value, 0)
    return NotImplemented


ZERO = Dyadic(0)
ONE = Dyadic(1)


def compare_fraction(d: Dyadic, q: Fraction) -> int:
    """Exact three-way comparison of a dyadic with a rational."""
    n, den = q.numerator, q.denominator
    m, e = d.mantissa, d.exponent
    # compare m * 2^e * den  with  n
    if e >= 0:
        left, right = (m * den) << e, n
    else:
        left, right = m * den, n << -e
    return (left > right) - (left < right)


# ---------------------------------------------------------------------------
# Directed rounding of exact results
# ---------------------------------------------------------------------------


def _round(m: int, e: int, prec: int, up: bool) -> Dyadic:
    """``m * 2**e`` rounded to ``prec`` significant bits toward +-inf."""
    shift = abs(m).bit_length() - prec
    if shift <= 0:
        return Dyadic(m, e)
    q = -((-m) >> shift) if up else m >> shift
    return Dyadic(q, e + shift)


def round_dyadic(x: Dyadic, prec: int, up: bool) -> Dyadic:
    return _round(x.mantissa, x.exponent, prec, up)


def _add_round(x: Dyadic, y: Dyadic, prec: int, up: bool) -> Dyadic:
    if y.mantissa == 0:
        return _round(x.mantissa, x.exponent, prec, up)
    if x.mantissa == 0:
        return _round(y.mantissa, y.exponent, prec, up)
    if x.magnitude < y.magnitude:
        x, y = y, x
    # All representable neighbours of x at this precision are multiples of
    # 2**(t+1); a summand below 2**(t+1) only decides the side, so it can be
    # replaced by +-2**t without materialising a huge shifted mantissa.
    t = min(x.exponent, x.magnitude - prec - 2) - 1
    if y.magnitude <= t + 1:
        y = Dyadic(y.sign, t)
    s = x + y
    return _round(s.mantissa, s.exponent, prec, up)


def _mul_round(x: Dyadic, y: Dyadic, prec: int, up: bool) -> Dyadic:
    return _round(x.mantissa * y.mantissa, x.exponent + y.exponent, prec, up)


def _div_round(x: Dyadic, y: Dyadic, prec: int, up: bool) -> Dyadic:
    if y.mantissa == 0:
        raise DomainError("division by zero")
    if x.mantissa == 0:
        return ZERO
    s = max(0, prec + 2 + y.mantissa.bit_length() - x.mantissa.bit_length())
    num = x.mantissa << s
    den = y.mantissa
    if den < 0:
        num, den = -num, -den
    q = -((-num) // den) if up else num // den
    return _round(q, x.exponent - y.exponent - s, prec, up)


def _check_exponent(x: Dyadic) -> Dyadic:
    if abs(x.exponent) > EXPONENT_LIMIT:
        raise ResourceError(f"binary exponent {x.exponent} exceeds limit {EXPONENT_LIMIT}")
    return x


# ---------------------------------------------------------------------------
# Intervals
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DyadicInterval:
    """Closed interval ``[lo, hi]`` with dyadic endpoints."""

    lo: Dyadic
    hi: Dyadic
    precision_bits: int = field(default=DEFAULT_PRECISION, compare=False)

    def __post_init__(self):
        lo, hi = Dyadic.of(self.lo), Dyadic.of(self.hi)
        if lo > hi:
            raise ValueError(f"empty interval: lo {float(lo)} > hi {float(hi)}")
        if self.precision_bits < 2:
            raise ValueError("precision_bits must be at least 2")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    # -- construction -------------------------------------------------------

    @classmethod
    def point(cls, value, precision_bits: int = DEFAULT_PRECISION) -> "DyadicInterval":
        d = Dyadic.of(value)
        return cls(d, d, precision_bits)

    @classmethod
    def from_fraction(cls, q, precision_bits: int = DEFAULT_PRECISION) -> "DyadicInterval":
        q = Fraction(q)
        num, den = Dyadic(q.numerator), Dyadic(q.denominator)
        return cls(
            _div_round(num, den, precision_bits, False),
            _div_round(num, den, precision_bits, True),
            precision_bits,
        )

    @classmethod
    def from_bounds(cls, lo, hi, precision_bits: int = DEFAULT_PRECISION) -> "DyadicInterval":
        """Outward-rounded hull of two rationals (ints, Fractions, Dyadics)."""
        lo_q = Fraction(lo) if not isinstance(lo, Dyadic) else lo.to_fraction()
        hi_q = Fraction(hi) if not isinstance(hi, Dyadic) else hi.to_fraction()
        a = cls.from_fraction(lo_q, precision_bits)
        b = cls.from_fraction(hi_q, precision_bits)
        return cls(a.lo, b.hi, precision_bits)

    @classmethod
    def from_decimal(
        cls, text: str, precision_bits: int = DEFAULT_PRECISION, ulps: int = 0
    ) -> "DyadicInterval":
        """Bracket a printed decimal, widened by ``ulps`` units of its last digit."""
        text = text.strip().rstrip(".").replace("_", "").replace(" ", "")
        q = Fraction(text)
        places = len(text.split(".", 1)[1]) if "." in text else 0
        step = Fraction(ulps, 10**places)
        return cls.from_bounds(q - step, q + step, precision_bits)

    # -- inspection ---------------------------------------------------------

    @property
    def width(self) -> Dyadic:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Dyadic:
        return (self.lo + self.hi).scale(-1)

    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, value) -> bool:
        if isinstance(value, DyadicInterval):
            return self.lo <= value.lo and value.hi <= self.hi
        if isinstance(value, Fraction) and value.denominator & (value.denominator - 1):
            return compare_fraction(self.lo, value) <= 0 <= compare_fraction(self.hi, value)
        d = Dyadic.of(value)
        return self.lo <= d <= self.hi

    __contains__ = contains

    def intersect(self, other: "DyadicInterval"):
        """Intersection, or ``None`` when the intervals are disjoint."""
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        if lo > hi:
            return None
        return DyadicInterval(lo, hi, max(self.precision_bits, other.precision_bits))

    def floor_range(self) -> tuple[int, int]:
        return self.lo.floor(), self.hi.floor()

    def with_precision(self, prec: int) -> "DyadicInterval":
        return DyadicInterval(
            round_dyadic(self.lo, prec, False), round_dyadic(self.hi, prec, True), prec
        )

    def __repr__(self) -> str:
        places = max(6, min(40, int(self.precision_bits * _LOG10_2)))
        return f"DyadicInterval[{_approx(self.lo, places)}, {_approx(self.hi, places)}]"

    # -- operators ----------------------------------------------------------

    def __add__(self, other):
        return iv_add(self, _as_interval(other, self.precision_bits))

    __radd__ = __add__

    def __sub__(self, other):
        return iv_sub(self, _as_interval(other, self.precision_bits))

    def __rsub__(self, other):
        return iv_sub(_as_interval(other, self.precision_bits), self)

    def __mul__(self, other):
        return iv_mul(self, _as_interval(other, self.precision_bits))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return iv_div(self, _as_interval(other, self.precision_bits))

    def __rtruediv__(self, other):
        return iv_div(_as_interval(other, self.precision_bits), self)

    def __neg__(self):
        return DyadicInterval(-self.hi, -self.lo, self.precision_bits)


def _approx(d: Dyadic, places: int) -> str:
    if d.mantissa == 0:
        return "0"
    if -12 < d.magnitude < 40:
        return d.decimal(places)
    return f"{float(d):.{min(places, 16)}e}"


def _as_interval(value, prec: int) -> DyadicInterval:
    if isinstance(value, DyadicInterval):
        return value
    if isinstance(value, Fraction) and value.denominator & (value.denominator - 1):
        return DyadicInterval.from_fraction(value, prec)
    return DyadicInterval.point(value, prec)


def _prec(prec, *intervals) -> int:
    if prec is not None:
        if prec < 2:
            raise ValueError("precision must be at least 2 bits")
        return prec
    return max(iv.precision_bits for iv in intervals)


def iv_add(a: DyadicInterval, b: DyadicInterval, prec: int | None = None) -> DyadicInterval:
    p = _prec(prec, a, b)
    return DyadicInterval(_add_round(a.lo, b.lo, p, False), _add_round(a.hi, b.hi, p, True), p)


def iv_sub(a: DyadicInterval, b: DyadicInterval, prec: int | None = None) -> DyadicInterval:
    p = _prec(prec, a, b)
    return DyadicInterval(_add_round(a.lo, -b.hi, p, False), _add_round(a.hi, -b.lo, p, True), p)


def iv_mul(a: DyadicInterval, b: DyadicInterval, prec: int | None = None) -> DyadicInterval:
    p = _prec(prec, a, b)
    pairs = [(a.lo, b.lo), (a.lo, b.hi), (a.hi, b.lo), (a.hi, b.hi)]
    if a.lo.sign >= 0 and b.lo.sign >= 0:
        pairs = [(a.lo, b.lo), (a.hi, b.hi)]
        return DyadicInterval(_mul_round(*pairs[0], p, False), _mul_round(*pairs[1], p, True), p)
    lo = min(_mul_round(x, y, p, False) for x, y in pairs)
    hi = max(_mul_round(x, y, p, True) for x, y in pairs)
    return DyadicInterval(lo, hi, p)


def iv_div(a: DyadicInterval, b: DyadicInterval, prec: int | None = None) -> DyadicInterval:
    p = _prec(prec, a, b)
    if b.lo.sign <= 0 <= b.hi.sign:
        raise DomainError("division by an interval containing zero")
    pairs = [(a.lo, b.lo), (a.lo, b.hi), (a.hi, b.lo), (a.hi, b.hi)]
    lo = min(_div_round(x, y, p, False) for x, y in pairs)
    hi = max(_div_round(x, y, p, True) for x, y in pairs)
    return DyadicInterval(lo, hi, p)


def iv_scale(a: DyadicInterval, k: int) -> DyadicInterval:
    """Exact multiplication by ``2**k``."""
    return DyadicInterval(a.lo.scale(k), a.hi.scale(k), a.precision_bits)


# ---------------------------------------------------------------------------
# Fixed-point kernels
# ---------------------------------------------------------------------------


def _to_fixed(x: Dyadic, w: int) -> tuple[int, bool]:
    """``(floor(x * 2**w), exact)``."""
    s = x.exponent + w
    if s >= 0:
        return x.mantissa << s, True
    q = x.mantissa >> -s
    return q, (q << -s) == x.mantissa


def _ceil_isqrt(n: int) -> int:
    r = math.isqrt(n)
    return r if r * r == n else r + 1


def _atanh_recip(k: int, w: int) -> tuple[int, int]:
    """Bounds on ``atanh(1/k) * 2**w`` for an integer ``k >= 2``."""
    k2 = k * k
    t = (1 << w) // k
    s = t
    i = 1
    while t:
        t //= k2
        s += t // (2 * i + 1)
        i += 1
    return s, s + 3 * i + 3


class _Ln2Cache:
    """Write-once store of ln 2 bounds; lower precisions are derived by shifting."""

    def __init__(self):
        self._lock = threading.Lock()
        self._best = (0, 0, 0)  # (scale, lo, hi)

    def bounds(self, w: int) -> tuple[int, int]:
        scale, lo, hi = self._best
        if scale < w:
            with self._lock:
                scale, lo, hi = self._best
                if scale < w:
                    target = max(w, 2 * scale) + 32
                    lo, hi = self._compute(target)
                    self._best = (target, lo, hi)
                    scale = target
        d = scale - w
        return lo >> d, -((-hi) >> d)

    @staticmethod
    def _compute(w: int) -> tuple[int, int]:
        # ln 2 = 18 atanh(1/26) - 2 atanh(1/4801) + 8 atanh(1/8749)
        g = (10 * w + 200).bit_length() + 2
        big = w + g
        a_lo, a_hi = _atanh_recip(26, big)
        b_lo, b_hi = _atanh_recip(4801, big)
        c_lo, c_hi = _atanh_recip(8749, big)
        lo = 18 * a_lo - 2 * b_hi + 8 * c_lo
        hi = 18 * a_hi - 2 * b_lo + 8 * c_hi
        return lo >> g, -((-hi) >> g)


_LN2 = _Ln2Cache()


def _k_ln2(k: int, w: int) -> tuple[int, int]:
    """Bounds on ``k * ln2 * 2**w``."""
    kb = abs(k).bit_length() + 1
    l_lo, l_hi = _LN2.bounds(w + kb)
    if k >= 0:
        return (k * l_lo) >> kb, -((-(k * l_hi)) >> kb)
    return (k * l_hi) >> kb, -((-(k * l_lo)) >> kb)


def ln2(prec: int = DEFAULT_PRECISION) -> DyadicInterval:
    """Enclosure of the natural logarithm of 2."""
    w = prec + 4
    lo, hi = _LN2.bounds(w)
    return DyadicInterval(
        _round(lo, -w, prec, False), _round(hi, -w, prec, True), prec
    )


def _exp_series(r: int, w: int, s: int) -> tuple[int, int]:
    """Bounds on ``exp(r / 2**(w+s)) * 2**w`` for ``|r| <= 2**w``."""
    shift = w + s
    t = 1 << w
    total = t
    i = 1
    while t:
        t = ((t * r) >> shift) // i
        total += t
        i += 1
    err = 2 * i + 4
    return total - err, total + err


def _exp_point(x: Dyadic, prec: int) -> tuple[Dyadic, Dyadic]:
    if x.mantissa == 0:
        return ONE, ONE
    if x.magnitude > EXPONENT_LIMIT.bit_length():
        raise ResourceError("exp argument exceeds the configured exponent range")
    xf = float(x)
    k = round(xf / math.log(2.0))
    if abs(k) > EXPONENT_LIMIT:
        raise ResourceError("exp result exceeds the configured exponent range")
    w0 = prec + 16
    s = max(2, math.isqrt(w0))
    w = w0 + s + (4 * w0).bit_length() + 12
    x_lo, exact = _to_fixed(x, w)
    x_hi = x_lo if exact else x_lo + 1
    kl_lo, kl_hi = _k_ln2(k, w)
    r_lo = x_lo - kl_hi
    r_hi = x_hi - kl_lo
    lo, hi = _exp_series(r_lo, w, s)
    for _ in range(s):
        lo = (lo * lo) >> w
        hi = -((-(hi * hi)) >> w)
    if r_hi != r_lo:
        hi += -((-(hi * 2 * (r_hi - r_lo))) >> w)
    return (
        _check_exponent(_round(lo, k - w, prec, False)),
        _check_exponent(_round(hi, k - w, prec, True)),
    )


def _atanh_bounds(z: int, w: int) -> tuple[int, int]:
    """Bounds on ``atanh(z / 2**w) * 2**w`` for ``0 <= z <= 2**(w-2)``."""
    z2 = (z * z) >> w
    p = z
    s = 0
    i = 0
    while p:
        s += p // (2 * i + 1)
        p = (p * z2) >> w
        i += 1
    return s, s + 4 * i + 3


def _atanh_signed(z: int, w: int, upper: bool) -> int:
    if z >= 0:
        return _atanh_bounds(z, w)[1 if upper else 0]
    return -_atanh_bounds(-z, w)[0 if upper else 1]


def _log_point(x: Dyadic, prec: int) -> tuple[Dyadic, Dyadic]:
    if x.mantissa <= 0:
        raise DomainError("logarithm of a non-positive number")
    m, e = x.mantissa, x.exponent
    b = m.bit_length()
    # x = y * 2**k with y = m / 2**ybits in [3/4, 3/2)
    if 4 * m < 3 << b:
        ybits = b - 1
    else:
        ybits = b
    k = ybits + e
    d = m - (1 << ybits)
    if d == 0:
        if k == 0:
            return ZERO, ZERO
        w = prec + 8
        lo, hi = _k_ln2(k, w)
        return _round(lo, -w, prec, False), _round(hi, -w, prec, True)
    t = ybits - d.bit_length() if k == 0 else 0
    w0 = prec + t + 8
    r = max(0, math.isqrt(w0) // 2 - t)
    w = w0 + r + (4 * w0).bit_length() + 14
    if w >= ybits:
        y_lo = m << (w - ybits)
        y_hi = y_lo
    else:
        y_lo = m >> (ybits - w)
        y_hi = y_lo if (y_lo << (ybits - w)) == m else y_lo + 1
    for _ in range(r):
        y_lo = math.isqrt(y_lo << w)
        y_hi = _ceil_isqrt(y_hi << w)
    one = 1 << w
    z_lo = ((y_lo - one) << w) // (y_lo + one)
    z_hi = -((-((y_hi - one) << w)) // (y_hi + one))
    lo = _atanh_signed(z_lo, w, upper=False) << (r + 1)
    hi = _atanh_signed(z_hi, w, upper=True) << (r + 1)
    if k:
        kl_lo, kl_hi = _k_ln2(k, w)
        lo += kl_lo
        hi += kl_hi
    return _round(lo, -w, prec, False), _round(hi, -w, prec, True)


def iv_exp(x: DyadicInterval, prec: int | None = None) -> DyadicInterval:
    p = _prec(prec, x)
    lo = _exp_point(x.lo, p)[0]
    hi = _exp_point(x.hi, p)[1] if not x.is_point() else _exp_point(x.lo, p)[1]
    return DyadicInterval(lo, hi, p)


def iv_log(x: DyadicInterval, prec: int | None = None) -> DyadicInterval:
    p = _prec(prec, x)
    if x.lo.sign <= 0:
        raise DomainError("logarithm needs a positive lower endpoint")
    if x.is_point():
        lo, hi = _log_point(x.lo, p)
    else:
        lo = _log_point(x.lo, p)[0]
        hi = _log_point(x.hi, p)[1]
    return DyadicInterval(lo, hi, p)


def iv_exp2(x: DyadicInterval, prec: int | None = None) -> DyadicInterval:
    """Enclosure of ``2**x``."""
    p = _prec(prec, x)
    if x.lo.is_integer() and x.hi.is_integer():
        lo = _check_exponent(Dyadic(1, x.lo.floor()))
        return DyadicInterval(lo, _check_exponent(Dyadic(1, x.hi.floor())), p)
    guard = p + max(abs(x.lo.magnitude), abs(x.hi.magnitude)).bit_length() + 8
    return iv_exp(iv_mul(x, ln2(guard), guard), p)


def iv_log2(x: DyadicInterval, prec: int | None = None) -> DyadicInterval:
    """Enclosure of ``log2(x)``."""
    p = _prec(prec, x)
    if _is_power_of_two(x.lo) and _is_power_of_two(x.hi):
        return DyadicInterval(Dyadic(x.lo.exponent), Dyadic(x.hi.exponent), p)
    guard = p + 8
    return iv_div(iv_log(x, guard), ln2(guard), p)


def _is_power_of_two(d: Dyadic) -> bool:
    return d.mantissa == 1


def _pow_round(d: Dyadic, k: int, prec: int, up: bool) -> Dyadic:
    base = round_dyadic(d, prec, up)
    result = ONE
    for bit in bin(k)[2:]:
        result = _mul_round(result, result, prec, up)
        if bit == "1":
            result = _mul_round(result, base, prec, up)
    return result


def iv_pow_int(x: DyadicInterval, k: int, prec: int | None = None) -> DyadicInterval:
    """Enclosure of ``x**k`` for a positive interval and integer ``k >= 1``."""
    p = _prec(prec, x)
    k = int(k)
    if k < 1:
        raise DomainError("exponent must be a positive integer")
    if x.lo.sign <= 0:
        raise DomainError("power needs a positive lower endpoint")
    top = k * x.hi.magnitude
    bottom = k * (x.lo.magnitude - 1)
    if top > EXPONENT_LIMIT or bottom < -EXPONENT_LIMIT:
        raise ResourceError(f"x**{k} leaves the configured exponent range")
    w = p + 2 * k.bit_length() + 4
    lo = _pow_round(x.lo, k, w, False)
    hi = _pow_round(x.hi, k, w, True)
    return DyadicInterval(round_dyadic(lo, p, False), round_dyadic(hi, p, True), p)


def iv_root(x: DyadicInterval, k: int, prec: int | None = None) -> DyadicInterval:
    """Enclosure of ``x**(1/k)``, evaluated as ``exp(log(x) / k)``."""
    p = _prec(prec, x)
    k = int(k)
    if k < 1:
        raise DomainError("root index must be a positive integer")
    if x.lo.sign <= 0:
        raise DomainError("root needs a positive lower endpoint")
    if k == 1:
        return x.with_precision(p)
    mags = max(abs(x.lo.magnitude), abs(x.hi.magnitude), 1)
    guard = p + mags.bit_length() + 8
    logs = iv_log(x, guard)
    kk = DyadicInterval.point(k, guard)
    return iv_exp(iv_div(logs, kk, guard), p)


# ---------------------------------------------------------------------------
# Decimal certificates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DigitCertificate:
    """A decimal prefix on which both endpoints of an interval agree.

    ``integer_part`` and ``fraction_digits`` are what you get by truncating
    either endpoint to ``certified_count`` fractional digits.  An empty
    ``integer_part`` means the endpoints already disagree before the point.
    """

    integer_part: str
    fraction_digits: str
    certified_count: int
    width_bound: Dyadic
    sign: int = 1
    caveats: tuple[str, ...] = ()

    @property
    def text(self) -> str:
        if not self.integer_part:
            return ""
        if self.certified_count == 0:
            return self.integer_part
        return f"{self.integer_part}.{self.fraction_digits}"

    def is_empty(self) -> bool:
        return not self.integer_part

    def truncate(self, count: int) -> "DigitCertificate":
        count = max(0, min(count, self.certified_count))
        return DigitCertificate(
            self.integer_part,
            self.fraction_digits[:count],
            count,
            self.width_bound,
            self.sign,
            self.caveats,
        )

    def with_caveats(self, *caveats: str) -> "DigitCertificate":
        merged = tuple(dict.fromkeys(self.caveats + tuple(c for c in caveats if c)))
        return DigitCertificate(
            self.integer_part,
            self.fraction_digits,
            self.certified_count,
            self.width_bound,
            self.sign,
            merged,
        )

    def as_interval(self, prec: int = DEFAULT_PRECISION) -> DyadicInterval:
        """The set of reals whose truncation this certificate describes."""
        if self.is_empty():
            raise ValueError("empty certificate has no value")
        low = Fraction(self.text)
        return DyadicInterval.from_bounds(low, low + Fraction(1, 10**self.certified_count), prec)

    def __str__(self) -> str:
        return self.text


def _truncated(x: Dyadic, places: int) -> int:
    return Dyadic(x.mantissa * 10**places, x.exponent).floor()


def digits(x: DyadicInterval, max_digits: int | None = None) -> DigitCertificate:
    """Longest decimal prefix shared by the truncations of both endpoints."""
    if x.lo.sign <= 0:
        raise DomainError("digits needs a positive interval")
    width = x.width
    if x.is_point():
        limit = max(0, -x.lo.exponent) if max_digits is None else max_digits
    else:
        # agreement at n places needs width < 10**-n
        limit = max(0, math.floor((1 - width.magnitude) * _LOG10_2) + 1)
        if max_digits is not None:
            limit = min(limit, max_digits)
    ilo, ihi = x.lo.floor(), x.hi.floor()
    if ilo != ihi:
        return DigitCertificate("", "", 0, width)
    scale = 10**limit
    a = _truncated(x.lo, limit) - ilo * scale
    b = _truncated(x.hi, limit) - ihi * scale
    fa = decimal_str(a).rjust(limit, "0") if limit else ""
    fb = decimal_str(b).rjust(limit, "0") if limit else ""
    n = 0
    for ca, cb in zip(fa, fb):
        if ca != cb:
            break
        n += 1
    return DigitCertificate(decimal_str(ilo), fa[:n], n, width)
