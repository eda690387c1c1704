from fractions import Fraction

import mpmath
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from millsforge import conjecture as cj
from millsforge.errors import DomainError, IntegrityError
from millsforge.numerics import digits

from oracles import mpf_fraction, oracle_precision

PUBLISHED = [2, 5, 17, 89, 641, 6619, 97829, 2070443]
# floors of CONSTANT ** e_n for n <= 13, beyond the printed list
FROM_CONSTANT = PUBLISHED + [62749333, 2723372411, 169261089097, 15064662646757,
                             1920055899571717]
CONSTANT = "1.1966746500705764022"


@pytest.fixture(scope="module")
def deep():
    return cj.search(target_depth=20)


def _meets(q, node, e):
    """Exact test that [q, q+1) meets [lo**e, hi**e)."""
    a, ka = node.lo
    b, kb = node.hi
    return (q + 1) ** ka > a**e and q**kb < b**e


def test_exponent_law():
    assert [cj.exponent(n) for n in range(1, 5)] == [4, 9, 16, 25]


def test_single_prime_bracket():
    node = cj.bracket_for_chain([2])
    with oracle_precision(200):
        lo = mpf_fraction(mpmath.root(2, 4))
        hi = mpf_fraction(mpmath.root(3, 4))
    assert node.bracket.lo.to_fraction() <= lo
    assert node.bracket.hi.to_fraction() >= hi
    assert f"{float(node.bracket.lo):.6f}" == "1.189207"
    assert f"{float(node.bracket.hi):.6f}" == "1.316074"


def test_infeasible_pair():
    assert cj.bracket_for_chain([2, 3]) is None
    # oracle: 3^(1/9) < 2^(1/4) exactly
    assert 3**4 < 2**9


def test_published_chain_contains_constant():
    node = cj.bracket_for_chain(PUBLISHED)
    assert node is not None
    assert node.bracket.contains(Fraction(CONSTANT))
    full = cj.bracket_for_chain(FROM_CONSTANT)
    assert full is not None and full.bracket.contains(Fraction(CONSTANT))


def test_published_constant_floors():
    x = Fraction(CONSTANT)
    floors = [int(x ** cj.exponent(n)) for n in range(1, 14)]
    assert floors == FROM_CONSTANT


def test_candidates_after_two():
    node = cj.bracket_for_chain([2])
    cands = cj.candidates(node)
    assert 5 in cands
    assert cands == [5, 7, 11]
    for q in cands:
        assert _meets(q, node, 9)


def test_candidates_exhaustive_predicate():
    node = cj.bracket_for_chain([2, 5, 17])
    e = cj.exponent(4)
    first, last = cj.image_range(node)
    assert not _meets(first - 1, node, e) and _meets(first, node, e)
    assert _meets(last, node, e) and not _meets(last + 1, node, e)
    expected = [q for q in sympy.primerange(first, last + 1)]
    assert cj.candidates(node) == expected


def test_empty_image_gives_no_candidates():
    node = cj.bracket_for_chain(FROM_CONSTANT)
    narrow = cj.SearchNode(node.chain, (10, 1), (10, 1), node.bracket)
    assert cj.candidates(narrow) == []


def test_candidate_orders():
    node = cj.bracket_for_chain([2, 5, 17])
    asc = cj.candidates(node)
    mid = cj.candidates(node, cj.ConjecturePolicy(candidate_order="nearest_to_midpoint"))
    assert sorted(mid) == asc
    target = cj.ConjecturePolicy(candidate_order="nearest_to_target", target=CONSTANT)
    assert cj.candidates(node, target)[0] == 89


def test_policy_validation():
    with pytest.raises(DomainError):
        cj.ConjecturePolicy(max_depth=0)
    with pytest.raises(DomainError):
        cj.ConjecturePolicy(candidate_order="nearest_to_target")
    with pytest.raises(ValueError):
        cj.ConjecturePolicy(candidate_order="random")


def test_search_target_one():
    assert cj.search(target_depth=1).chain == (2,)


def test_ascending_is_least_feasible():
    shallow = cj.search(target_depth=10)
    assert shallow.stats.backtracks == 0
    node = cj.root_node()
    for q in shallow.chain:
        smaller = [c for c in cj.candidates(node) if c < q]
        assert all(cj.child(node, c) is None for c in smaller)
        node = cj.child(node, q)


def test_ascending_prefix_and_published_divergence(deep):
    assert deep.chain[:7] == tuple(PUBLISHED[:7])
    # at depth 8 both the least feasible prime and the published one fit
    node = cj.bracket_for_chain(PUBLISHED[:7])
    assert cj.child(node, 2070433) is not None
    assert cj.child(node, 2070443) is not None


def test_nearest_to_target_reproduces_published():
    policy = cj.ConjecturePolicy(candidate_order="nearest_to_target", target=CONSTANT,
                                 max_depth=13)
    assert list(cj.search(policy).chain) == FROM_CONSTANT


def test_nesting_along_path(deep):
    prev = cj.root_node()
    for k in range(1, len(deep.chain) + 1):
        node = cj.bracket_for_chain(deep.chain[:k])
        assert prev.bracket.lo <= node.bracket.lo and node.bracket.hi <= prev.bracket.hi
        assert (prev.bracket.lo, prev.bracket.hi) != (node.bracket.lo, node.bracket.hi)
        prev = node


def test_search_deterministic():
    a = cj.search(target_depth=12)
    b = cj.search(target_depth=12)
    assert a.chain == b.chain and a.stats == b.stats


def test_soundness_doubled_precision(deep):
    cert = cj.certificate(deep.best)
    assert cert.certified_count > 20
    assert cj.verify_chain(deep.chain, cert, guard=2 * cj.GUARD_BITS)
    for k in (1, 5, 10, 15):
        assert cj.verify_chain(deep.chain[:k], cert)


def test_verify_chain_examples():
    assert cj.verify_chain(PUBLISHED, CONSTANT)
    assert cj.verify_chain(FROM_CONSTANT, CONSTANT)
    assert not cj.verify_chain(PUBLISHED, "1.30637")
    bumped = list(PUBLISHED)
    bumped[4] = int(sympy.nextprime(bumped[4]))
    assert not cj.verify_chain(bumped, CONSTANT)
    assert not cj.verify_chain([], CONSTANT)
    assert not cj.verify_chain([2, 9], "1.2")


def test_verify_chain_with_truncated_certificate():
    node = cj.bracket_for_chain(FROM_CONSTANT)
    assert cj.verify_chain(FROM_CONSTANT, digits(node.bracket).truncate(10))


def test_backtrack_limit_truncates():
    # the ascending depth-10 node has no feasible child, so depth 11 backtracks once
    assert cj.search(target_depth=11).stats.backtracks == 1
    r = cj.search(cj.ConjecturePolicy(backtrack_limit=1), target_depth=11)
    assert r.truncated
    assert r.best.depth == 10
    first, last = r.best.dead_image
    node = cj.bracket_for_chain(r.best.chain)
    assert all(cj.child(node, q) is None for q in sympy.primerange(first, last + 1))


def test_frontier_round_trip_and_resume():
    policy = cj.ConjecturePolicy()
    first = cj.search(policy, target_depth=8)
    text = cj.dumps_frontier(policy, first.frontier)
    order, root, target, frames = cj.loads_frontier(text)
    assert order is policy.candidate_order and root == policy.root and target is None
    assert frames == first.frontier
    resumed = cj.search(policy, target_depth=12, frontier=frames)
    direct = cj.search(policy, target_depth=12)
    assert resumed.chain == direct.chain
    assert resumed.stats.primality_tests_skipped == 8
    checked = cj.search(policy, target_depth=12, frontier=frames, recheck_primality=True)
    assert checked.chain == direct.chain


def test_frontier_tampering_refused():
    policy = cj.ConjecturePolicy()
    text = cj.dumps_frontier(policy, cj.search(policy, target_depth=5).frontier)
    with pytest.raises(IntegrityError):
        cj.loads_frontier(text.replace("FRONTIER v1", "FRONTIER v0"))
    forged = text.replace("89", "97")
    order, root, target, frames = cj.loads_frontier(forged)
    with pytest.raises(IntegrityError):
        cj.search(policy, target_depth=6, frontier=frames)
    composite = [((2, 5, 15), 0)]
    with pytest.raises(IntegrityError):
        cj.search(policy, target_depth=6, frontier=[((2,), 0), ((2, 5), 0)] + composite,
                  recheck_primality=True)


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 12), st.sampled_from(["ascending", "nearest_to_midpoint"]))
def test_search_chains_verify(depth, order):
    result = cj.search(cj.ConjecturePolicy(candidate_order=order), target_depth=depth)
    assert result.best.depth == depth
    assert cj.verify_chain(result.chain, cj.certificate(result.best))
