import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from millsforge.errors import DomainError, ResourceError
from millsforge.numerics import (
    Dyadic,
    DyadicInterval,
    digits,
    iv_add,
    iv_div,
    iv_exp,
    iv_exp2,
    iv_log,
    iv_log2,
    iv_mul,
    iv_pow_int,
    iv_root,
    iv_sub,
    ln2,
)

from oracles import encloses_oracle, mp_interval, oracle_precision, truncate_decimal

CASES = 10_000


def F(x):
    return x.to_fraction()


def contains_exact(iv, q: Fraction) -> bool:
    return F(iv.lo) <= q <= F(iv.hi)


def random_dyadic(rng, bits, lo_mag, hi_mag, positive=False):
    """Random dyadic with at most ``bits`` bits and magnitude in [lo_mag, hi_mag]."""
    nbits = rng.randint(1, bits)
    m = rng.getrandbits(nbits) | (1 << (nbits - 1))
    if not positive and rng.random() < 0.5:
        m = -m
    return Dyadic(m, rng.randint(lo_mag, hi_mag) - nbits)


def random_interval(rng, prec, lo_exp=-40, hi_exp=10, positive=False):
    a = random_dyadic(rng, prec, lo_exp, hi_exp, positive)
    if rng.random() < 0.5:
        return DyadicInterval(a, a, prec)
    wbits = rng.randint(1, prec // 2 + 1)
    width = Dyadic(rng.getrandbits(wbits) | 1, a.magnitude - wbits - rng.randint(1, 30))
    b = a + width
    return DyadicInterval(min(a, b), max(a, b), prec)


# ---------------------------------------------------------------------------
# Dyadic basics
# ---------------------------------------------------------------------------


def test_dyadic_canonical_form():
    assert Dyadic(12, 3) == Dyadic(3, 5)
    assert Dyadic(12, 3).mantissa == 3
    z = Dyadic(0, 17)
    assert (z.mantissa, z.exponent) == (0, 0)


@given(st.fractions(max_denominator=1 << 20), st.integers(-40, 40), st.integers(-40, 40))
def test_dyadic_arithmetic_is_exact(q, e1, e2):
    a = Dyadic(q.numerator, e1)
    b = Dyadic(q.denominator, e2)
    fa, fb = F(a), F(b)
    assert F(a + b) == fa + fb
    assert F(a - b) == fa - fb
    assert F(a * b) == fa * fb
    assert (a < b) == (fa < fb)


@given(st.integers(-(10**30), 10**30), st.integers(-60, 60))
def test_dyadic_floor_ceil(m, e):
    d = Dyadic(m, e)
    q = F(d)
    assert d.floor() == q.numerator // q.denominator
    assert d.ceil() == -((-q.numerator) // q.denominator)


# ---------------------------------------------------------------------------
# Examples
# ---------------------------------------------------------------------------


def test_add_one_plus_one():
    one = DyadicInterval.point(1, 64)
    r = one + one
    assert r.contains(2)
    assert r.width <= Dyadic(1, 1 - 64)


def test_mul_sign_cases():
    r = DyadicInterval.from_bounds(1, 2) * DyadicInterval.from_bounds(-1, 1)
    assert r.lo <= Dyadic(-2) and Dyadic(2) <= r.hi


def test_one_third():
    r = iv_div(DyadicInterval.point(1, 64), DyadicInterval.point(3, 64))
    assert r.contains(Fraction(1, 3))
    assert r.width <= Dyadic(1, -62)


def test_div_by_interval_containing_zero():
    with pytest.raises(DomainError):
        iv_div(DyadicInterval.point(1), DyadicInterval.from_bounds(-1, 1))


def test_log_of_one():
    r = iv_log(DyadicInterval.point(1, 64))
    assert r.contains(0)
    assert r.width <= Dyadic(1, 1 - 64)


def test_log_two_digits():
    r = iv_log(DyadicInterval.point(2, 128))
    assert digits(r).text.startswith("0.69314718055994530941")


def test_log_two_two_ways():
    # atanh series via iv_log versus the Machin-type ln2 kernel
    a = iv_log(DyadicInterval.point(2, 300))
    b = ln2(300)
    assert a.intersect(b) is not None
    assert digits(a, 80).text == digits(b, 80).text


def test_log_mersenne_identity():
    prec = 200
    direct = iv_log(DyadicInterval.point(2**13 - 1, prec))
    pieces = iv_add(
        iv_mul(DyadicInterval.point(13, prec), ln2(prec)),
        iv_log(DyadicInterval.point(Fraction(8191, 8192), prec)),
    )
    assert direct.intersect(pieces) is not None
    assert pieces.width < Dyadic(1, -190)


def test_log_rejects_nonpositive():
    with pytest.raises(DomainError):
        iv_log(DyadicInterval.from_bounds(0, 1))


def test_exp_zero():
    assert iv_exp(DyadicInterval.point(0, 64)).contains(1)


def test_exp_log_round_trip():
    prec = 64
    r = iv_exp(iv_log(DyadicInterval.point(5, prec)), prec)
    assert r.contains(5)
    ulp = Dyadic(1, 3 - prec)  # 5 has magnitude 3
    assert r.width <= ulp.scale(2)


def test_exp_overflow_is_a_resource_error():
    with pytest.raises(ResourceError):
        iv_exp(DyadicInterval.point(Dyadic(1, 50)))


def test_pow_examples():
    assert iv_pow_int(DyadicInterval.point(2), 10).contains(1024)
    assert iv_pow_int(DyadicInterval.point(Fraction(3, 2)), 2).contains(Fraction(9, 4))


def test_pow_huge_exponent_resource_error():
    with pytest.raises(ResourceError):
        iv_pow_int(DyadicInterval.point(3), 10**15)


def test_root_examples():
    assert iv_root(DyadicInterval.point(16), 4).contains(2)
    r = iv_root(DyadicInterval.from_bounds(2, 3, 64), 4)
    assert iv_pow_int(DyadicInterval.point(r.lo), 4).lo <= Dyadic(2)
    assert iv_pow_int(DyadicInterval.point(r.hi), 4).hi >= Dyadic(3)
    assert abs(float(r.lo) - 1.18920) < 1e-5 and abs(float(r.hi) - 1.31608) < 1e-5


def test_root_of_mills_fourth_term():
    r = iv_root(DyadicInterval.from_bounds(2521008887, 2521008888, 128), 81)
    assert digits(r).text.startswith("1.3063778838")


def test_mills_bracket_to_the_81st():
    from millsforge.sequence import build

    state = build(3, 2, 5)
    image = iv_pow_int(state.bracket, 81, 256)
    assert image.floor_range() == (2521008887, 2521008887)


def test_digits_examples():
    c = digits(DyadicInterval.point(Fraction(5, 4)))
    assert c.text == "1.25"
    c = digits(DyadicInterval.from_bounds(Fraction("1.30637"), Fraction("1.30638"), 64))
    assert c.text == "1.3063" and c.certified_count == 4


def test_digits_empty_when_integer_parts_differ():
    c = digits(DyadicInterval.from_bounds(Fraction("4.99"), Fraction("5.01")))
    assert c.is_empty() and c.text == ""


def test_ln2_thousand_digits():
    with oracle_precision(3500):
        ref = mpmath.nstr(mpmath.log(2), 1010, strip_zeros=False)
    got = digits(ln2(3400))
    assert got.certified_count >= 1000
    assert ref.startswith(got.text[:1000])


def test_ln2_cache_lower_precision_consistent():
    hi = ln2(2000)
    lo = ln2(100)
    assert lo.contains(hi)


# ---------------------------------------------------------------------------
# Containment against an independent oracle, 10^4 cases per operation
# ---------------------------------------------------------------------------


def _binary_exact(op, pyop, seed, positive_b=False):
    rng = random.Random(seed)
    bad = 0
    for _ in range(CASES):
        prec = rng.randint(8, 160)
        a = random_interval(rng, prec)
        b = random_interval(rng, prec, positive=positive_b)
        r = op(a, b, prec)
        corners = [pyop(x, y) for x in (F(a.lo), F(a.hi)) for y in (F(b.lo), F(b.hi))]
        if not (F(r.lo) <= min(corners) and max(corners) <= F(r.hi)):
            bad += 1
    return bad


def test_containment_add():
    assert _binary_exact(iv_add, lambda x, y: x + y, 1) == 0


def test_containment_sub():
    assert _binary_exact(iv_sub, lambda x, y: x - y, 2) == 0


def test_containment_mul():
    assert _binary_exact(iv_mul, lambda x, y: x * y, 3) == 0


def test_containment_div():
    assert _binary_exact(iv_div, lambda x, y: x / y, 4, positive_b=True) == 0


def test_containment_pow_int():
    rng = random.Random(5)
    bad = 0
    for _ in range(CASES):
        prec = rng.randint(8, 160)
        x = random_interval(rng, prec, -3, 2, positive=True)
        k = rng.randint(1, 300)
        r = iv_pow_int(x, k, prec)
        if not (F(r.lo) <= F(x.lo) ** k and F(x.hi) ** k <= F(r.hi)):
            bad += 1
    assert bad == 0


def _unary_oracle(op, mp_op, seed, make_input, extra=None):
    rng = random.Random(seed)
    bad = 0
    for _ in range(CASES):
        prec = rng.randint(8, 200)
        x = make_input(rng, prec)
        args = () if extra is None else (extra(rng),)
        r = op(x, *args, prec)
        with oracle_precision(4 * prec + 64 + max(abs(x.lo.exponent), abs(x.hi.exponent))):
            ref = mp_op(mp_interval(x), *args)
        if not (encloses_oracle(r, ref) and r.lo <= r.hi):
            bad += 1
    return bad


def test_containment_exp():
    assert _unary_oracle(iv_exp, mpmath.iv.exp, 6,
                         lambda rng, p: random_interval(rng, p, -30, 5)) == 0


def test_containment_log():
    assert _unary_oracle(iv_log, mpmath.iv.log, 7,
                         lambda rng, p: random_interval(rng, p, -60, 60, positive=True)) == 0


def test_containment_exp2():
    def exp2(x):
        return mpmath.iv.exp(x * mpmath.iv.log(2))

    assert _unary_oracle(iv_exp2, exp2, 8,
                         lambda rng, p: random_interval(rng, p, -30, 5)) == 0


def test_containment_log2():
    def log2(x):
        return mpmath.iv.log(x) / mpmath.iv.log(2)

    assert _unary_oracle(iv_log2, log2, 9,
                         lambda rng, p: random_interval(rng, p, -60, 60, positive=True)) == 0


def test_containment_root():
    def root(x, k):
        return mpmath.iv.exp(mpmath.iv.log(x) / k)

    assert _unary_oracle(iv_root, root, 10,
                         lambda rng, p: random_interval(rng, p, -30, 150, positive=True),
                         extra=lambda rng: rng.choice([2, 3, 4, 9, 81, rng.randint(2, 10**6)])) == 0


def test_containment_ln2():
    rng = random.Random(11)
    bad = 0
    with oracle_precision(4 * 2000):
        ref = mpmath.iv.log(2)
    for _ in range(CASES):
        prec = rng.randint(2, 2000)
        if not encloses_oracle(ln2(prec), ref):
            bad += 1
    assert bad == 0


# ---------------------------------------------------------------------------
# Properties
# ---------------------------------------------------------------------------

positive_fracs = st.fractions(min_value=Fraction(1, 1000), max_value=1000, max_denominator=10**6)


@settings(max_examples=200, deadline=None)
@given(positive_fracs, st.integers(1, 50), st.sampled_from([32, 64, 100]))
def test_root_pow_round_trip(q, k, prec):
    x = DyadicInterval.from_fraction(q, prec)
    back = iv_pow_int(iv_root(x, k, prec), k, prec)
    assert back.contains(x)


@settings(max_examples=200, deadline=None)
@given(positive_fracs, st.sampled_from(["exp", "log", "root"]), st.integers(16, 120))
def test_monotone_refinement(q, which, prec):
    x = DyadicInterval.from_fraction(q, 4 * prec)
    ops = {
        "exp": lambda v, p: iv_exp(v, p),
        "log": lambda v, p: iv_log(v, p),
        "root": lambda v, p: iv_root(v, 7, p),
    }
    coarse = ops[which](x, prec)
    fine = ops[which](x, 2 * prec)
    assert coarse.contains(fine)
    assert fine.width <= coarse.width


@settings(max_examples=300, deadline=None)
@given(positive_fracs, st.integers(0, 40), st.integers(0, 40))
def test_digits_prefix_of_subinterval(q, w1, w2):
    outer = DyadicInterval.from_bounds(q, q + Fraction(1, 2**w1), 200)
    inner = DyadicInterval.from_bounds(q, q + Fraction(1, 2 ** (w1 + w2)), 200)
    a, b = digits(outer), digits(inner)
    assert b.text.startswith(a.text)


@settings(max_examples=300, deadline=None)
@given(positive_fracs, st.integers(1, 60))
def test_digits_certificate_is_truncation_of_both_ends_and_maximal(q, w):
    x = DyadicInterval.from_bounds(q, q + Fraction(1, 2**w), 200)
    c = digits(x)
    if c.is_empty():
        assert x.lo.floor() != x.hi.floor()
        return
    n = c.certified_count
    assert truncate_decimal(F(x.lo), n) == c.text
    assert truncate_decimal(F(x.lo), n) == truncate_decimal(F(x.hi), n)
    assert truncate_decimal(F(x.lo), n + 1) != truncate_decimal(F(x.hi), n + 1)
