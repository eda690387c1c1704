from fractions import Fraction

import mpmath
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from millsforge import sequence as seq
from millsforge import theorem
from millsforge.errors import ConstructionError, DomainError, IntegrityError, ResourceError
from millsforge.numerics import digits, iv_log
from millsforge.primality import Evidence, PrimeWitness

from oracles import mpf_fraction, oracle_precision, truncate_decimal

B = [2, 11, 1361, 2521008887, 16022236204009818131831320183]


@pytest.fixture(scope="module")
def mills5():
    return seq.build(3, 2, 5)


def test_init_brackets_cube_roots():
    state = seq.init(seq.ConstantSpec.create("mills_builder", 3, 2))
    assert state.primes == [2]
    lo, hi = state.bracket.lo.to_fraction(), state.bracket.hi.to_fraction()
    assert lo**3 <= 2 and hi**3 >= 3
    assert abs(float(lo) - 1.2599) < 1e-4 and abs(float(hi) - 1.4423) < 1e-4


def test_m2_flagged_without_guarantee():
    spec = seq.ConstantSpec.create("mills_builder", 2, 2)
    assert not spec.unconditional
    assert any("no unconditional guarantee" in c for c in spec.caveats)
    state = seq.build(2, 2, 4)
    assert state.primes[:2] == [2, 5]


def test_m3_is_rh_conditional():
    spec = seq.ConstantSpec.create("mills_builder", 3, 2)
    assert spec.rh_conditional
    assert "conditional on the Riemann hypothesis" in spec.caveats


def test_unconditional_flag_needs_large_m_and_proof():
    assert seq.ConstantSpec.create("mills_builder", 1_438_989, 2).unconditional
    assert not seq.ConstantSpec.create("mills_builder", 1_438_988, 2).unconditional
    probable = PrimeWitness(2, Evidence.STRONG_PROBABLE, "test")
    assert not seq.ConstantSpec.create("mills_builder", 10**10, probable).unconditional


def test_bad_seed_rejected():
    with pytest.raises(DomainError):
        seq.ConstantSpec.create("mills_builder", 3, 4)
    forged = PrimeWitness(15, Evidence.DETERMINISTIC_BASES, "forged")
    spec = seq.ConstantSpec(seq.Kind.MILLS_BUILDER, 3, forged, False)
    with pytest.raises(IntegrityError):
        seq.init(spec)


def test_small_m_rejected():
    with pytest.raises(DomainError):
        seq.ConstantSpec.create("mills_builder", 1, 2)


def test_extend_examples(mills5):
    assert seq.extend(seq.build(3, 2, 1)).primes == [2, 11]
    assert mills5.primes == B


def test_b6_is_least_prime_above_cube(mills5):
    b6 = seq.extend(mills5).primes[-1]
    assert len(str(b6)) == 85
    lo = B[-1] ** 3
    assert sympy.isprime(b6)
    # nothing smaller in the window is prime
    assert not any(sympy.isprime(c) for c in range(lo + 1, b6))


def test_chain_inequality_exact():
    for m in (2, 3, 4, 5):
        state = seq.build(m, 2, 5)
        for p, q in zip(state.primes, state.primes[1:]):
            assert p**m < q < (p + 1) ** m - 1


def test_divisibility_refinement():
    for m in (2, 3, 5, 7):
        for p in seq.build(m, 3, 4).primes:
            assert ((p + 1) ** m - 1) % p == 0


def test_recover_prime_examples(mills5):
    assert seq.recover_prime(mills5, 1) == 2
    assert seq.recover_prime(mills5, 4) == 2521008887
    assert seq.recover_prime(mills5, 5) == B[4]


def test_recover_prime_index_checked(mills5):
    with pytest.raises(DomainError):
        seq.recover_prime(mills5, 6)


def test_nesting_all_seeds():
    for m in (2, 3, 5):
        for seed in (2, 3, 5):
            state = seq.build(m, seed, 5 if m == 5 else 6)
            seq.check_state(state)
            for a, b in zip(state.steps, state.steps[1:]):
                assert a.lo < b.lo and b.hi < a.hi
            for n in range(1, state.length + 1):
                assert seq.recover_prime(state, n) == state.primes[n - 1]


def test_bracket_is_intersection_of_steps(mills5):
    lo = max(s.lo for s in mills5.steps)
    hi = min(s.hi for s in mills5.steps)
    assert mills5.bracket.lo == lo and mills5.bracket.hi == hi


def test_steps_enclose_exact_roots(mills5):
    for n, (p, step) in enumerate(zip(B, mills5.steps), start=1):
        k = 3**n
        assert step.lo.to_fraction() ** k <= p
        assert step.hi.to_fraction() ** k >= p + 1


def test_determinism():
    a = seq.build(3, 3, 5)
    b = seq.build(3, 3, 5)
    assert a.primes == b.primes
    assert a.bracket == b.bracket


def test_constant_digits_ten(mills5):
    cert = seq.constant_digits(seq.build(3, 2, 1), 10)
    assert cert.text == "1.3063778838"


def test_constant_digits_zero():
    cert = seq.constant_digits(seq.build(3, 2, 1), 0)
    assert cert.text == "1"


def test_constant_digits_25_against_oracle():
    state, reason = seq.extend_until(seq.build(3, 2, 1), 25)
    assert reason == ""
    cert = seq.constant_digits(state, 25)
    # independent: real root of the last chain element at far higher precision
    p, n = state.primes[-1], state.length
    with oracle_precision(4 * p.bit_length() + 256):
        lo = mpmath.root(mpmath.mpf(p), 3**n)
        hi = mpmath.root(mpmath.mpf(p + 1), 3**n)
        a = truncate_decimal(mpf_fraction(lo), 25)
        b = truncate_decimal(mpf_fraction(hi), 25)
    assert a == b
    assert cert.text == a
    # and at doubled working precision
    again = digits(seq.step_bracket(p, 3, n, 2 * seq.step_precision(p, 3, n)))
    assert again.truncate(25).text == cert.text


def test_probable_propagates():
    state = seq.build(3, 2, 6)
    assert state.probable
    assert seq.PROBABLE_CAVEAT in state.certified.caveats
    assert not seq.build(3, 2, 4).probable


def test_budget_returns_partial_certificate():
    cert = seq.constant_digits(seq.build(3, 2, 1), 200, max_terms=4)
    assert cert.certified_count < 200
    assert any(c.startswith("budget:") for c in cert.caveats)
    assert cert.text.startswith("1.30637788")


def test_extend_budget_raises():
    with pytest.raises(ResourceError):
        seq.extend(seq.build(3, 2, 5), max_prime_bits=100)


def test_construction_error_names_interval(monkeypatch):
    monkeypatch.setattr(seq, "least_prime_in", lambda lo, hi, policy=None: None)
    with pytest.raises(ConstructionError) as info:
        seq.extend(seq.build(3, 2, 1))
    assert "(8, 26)" in str(info.value)


def test_serialization_round_trip():
    state = seq.build(3, 2, 6)
    text = seq.dumps(state)
    back = seq.loads(text)
    assert back.primes == state.primes
    assert back.bracket == state.bracket
    assert seq.dumps(back) == text
    assert seq.loads(text, recheck_primality=True).primes == state.primes


def test_serialization_rejects_broken_chain():
    text = seq.dumps(seq.build(3, 2, 4)).replace("1361", "1367")
    with pytest.raises(IntegrityError):
        seq.loads(text)
    with pytest.raises(IntegrityError):
        seq.loads("not a sequence\n")


def test_mersenne_seed_small_cross_checks_log_bracket():
    spec = seq.ConstantSpec.create("mersenne_theorem", 3, "M13")
    assert spec.mersenne_exponent == 13
    assert not spec.unconditional
    state = seq.init(spec)
    prec = state.bracket.precision_bits
    via_init = iv_log(state.bracket, prec)
    direct = theorem.log_bracket(13, 3, prec)
    # 4 ulp at the magnitude of log A (about 3)
    tol = Fraction(4, 2 ** (prec - 2))
    assert abs((via_init.lo - direct.lo).to_fraction()) <= tol
    assert abs((via_init.hi - direct.hi).to_fraction()) <= tol


def test_mersenne_seed_large_uses_log_domain():
    state = seq.init(seq.ConstantSpec.create("mersenne_theorem", 10**10, "M77232917"))
    assert state.certified.text.startswith("1.005367732798147240")
    with pytest.raises(ResourceError):
        seq.extend(state)
    assert seq.loads(seq.dumps(state)).bracket == state.bracket


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 6), st.sampled_from([2, 3, 5, 7, 11, 13]), st.integers(1, 4))
def test_nesting_property(m, seed, terms):
    if m >= 5:
        terms = min(terms, 3)
    state = seq.build(m, seed, terms)
    seq.check_state(state)
    for n in range(1, state.length + 1):
        assert seq.recover_prime(state, n) == state.primes[n - 1]

