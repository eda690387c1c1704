"""Backtracking search for A with floor(A ** (n+1)**2) prime for n = 1, 2, ...

A chain q_1, q_2, ... of primes constrains A to

    [q_n ** (1/e_n), (q_n + 1) ** (1/e_n)),   e_n = (n + 1)**2,

for every n.  The search keeps the two binding constraints of each node as
exact integer pairs, so ties between roots are decided by comparing integer
powers rather than by trusting rounded endpoints.
"""
from __future__ import annotations

import enum
import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

import gmpy2

from .errors import DomainError, IntegrityError
from .numerics import (
    DigitCertificate,
    DyadicInterval,
    decimal_str,
    digits,
    iv_root,
    parse_int,
)
from .primality import DEFAULT_POLICY, SearchPolicy, is_prime, iter_primes, iter_primes_down

GUARD_BITS = 96


def exponent(n: int) -> int:
    """Exponent attached to chain index ``n`` (counting from 1)."""
    return (n + 1) ** 2


class Order(str, enum.Enum):
    ASCENDING = "ascending"
    NEAREST_TO_MIDPOINT = "nearest_to_midpoint"
    NEAREST_TO_TARGET = "nearest_to_target"


@dataclass(frozen=True)
class ConjecturePolicy:
    """Search knobs.  ``target`` (a decimal string) is only read by the
    ``nearest_to_target`` order; ``root`` is the starting bracket for A."""

    candidate_order: Order = Order.ASCENDING
    max_depth: int = 9
    backtrack_limit: int = 10_000
    guard_bits: int = GUARD_BITS
    target: str | None = None
    root: tuple[int, int] = (1, 2)
    prime_policy: SearchPolicy = DEFAULT_POLICY

    def __post_init__(self):
        object.__setattr__(self, "candidate_order", Order(self.candidate_order))
        if self.max_depth < 1 or self.backtrack_limit < 1 or self.guard_bits < 1:
            raise DomainError("search limits must be positive")
        if self.candidate_order is Order.NEAREST_TO_TARGET and not self.target:
            raise DomainError("nearest_to_target needs a target value")
        if not 0 < self.root[0] < self.root[1]:
            raise DomainError("root bracket must satisfy 0 < lo < hi")


# A root a**(1/e) is stored as the pair (a, e).
Root = tuple


def _root_interval(r: Root, prec: int) -> DyadicInterval:
    a, e = r
    return iv_root(DyadicInterval.point(a, prec), e, prec)


def _cmp_roots(x: Root, y: Root, prec: int) -> int:
    """Sign of ``x[0]**(1/x[1]) - y[0]**(1/y[1])``."""
    if x == y:
        return 0
    ix, iy = _root_interval(x, prec), _root_interval(y, prec)
    if ix.hi < iy.lo:
        return -1
    if iy.hi < ix.lo:
        return 1
    lhs = gmpy2.mpz(x[0]) ** y[1]
    rhs = gmpy2.mpz(y[0]) ** x[1]
    return (lhs > rhs) - (lhs < rhs)


def _precision(hi: Root, e: int, guard: int) -> int:
    a, k = hi
    log2_hi = -(-a.bit_length() // k)
    return e * max(1, log2_hi) + guard + e.bit_length()


@dataclass(frozen=True)
class SearchNode:
    """A partial chain.  ``lo``/``hi`` are the binding roots: A lies in
    ``[lo, hi)``.  ``dead_image`` is filled in when no candidate existed."""

    chain: tuple[int, ...]
    lo: Root
    hi: Root
    bracket: DyadicInterval = field(compare=False)
    children_tried: int = field(default=0, compare=False)
    dead_image: tuple[int, int] | None = field(default=None, compare=False)

    @property
    def depth(self) -> int:
        return len(self.chain)


def _make_node(chain, lo: Root, hi: Root, guard: int) -> SearchNode:
    prec = _precision(hi, exponent(len(chain) + 1), guard)
    bracket = DyadicInterval(
        _root_interval(lo, prec).lo, _root_interval(hi, prec).hi, prec
    )
    return SearchNode(tuple(chain), lo, hi, bracket)


def root_node(policy: ConjecturePolicy = ConjecturePolicy()) -> SearchNode:
    lo, hi = policy.root
    return _make_node((), (lo, 1), (hi, 1), policy.guard_bits)


def child(node: SearchNode, q: int, guard: int = GUARD_BITS) -> SearchNode | None:
    """Node for ``chain + [q]``, or ``None`` if the bracket becomes empty."""
    e = exponent(node.depth + 1)
    prec = _precision(node.hi, e, guard)
    lo = node.lo if _cmp_roots(node.lo, (q, e), prec) >= 0 else (q, e)
    hi = node.hi if _cmp_roots(node.hi, (q + 1, e), prec) <= 0 else (q + 1, e)
    if _cmp_roots(lo, hi, prec) >= 0:
        return None
    return _make_node(node.chain + (q,), lo, hi, guard)


def bracket_for_chain(primes, guard: int = GUARD_BITS, root=(1, 2)) -> SearchNode | None:
    """Intersect the constraints of every listed prime; ``None`` if empty."""
    node = _make_node((), (root[0], 1), (root[1], 1), guard)
    for q in primes:
        node = child(node, int(q), guard)
        if node is None:
            return None
    return node


# ---------------------------------------------------------------------------
# Candidates
# ---------------------------------------------------------------------------


def image_range(node: SearchNode, guard: int = GUARD_BITS) -> tuple[int, int]:
    """Integers ``q`` whose unit interval meets ``[lo**e, hi**e)``, as a
    closed range ``(first, last)``; empty when ``first > last``."""
    e = exponent(node.depth + 1)
    prec = _precision(node.hi, e, guard)
    a, ka = node.lo
    b, kb = node.hi
    # first: least q with (q + 1)**ka > a**e
    approx = iv_root(DyadicInterval.point(a, prec), ka, prec)
    first = max(0, _pow_floor(approx, e, prec) - 1)
    target = gmpy2.mpz(a) ** e
    while gmpy2.mpz(first + 1) ** ka <= target:
        first += 1
    while first > 0 and gmpy2.mpz(first) ** ka > target:
        first -= 1
    # last: greatest q with q**kb < b**e
    approx = iv_root(DyadicInterval.point(b, prec), kb, prec)
    last = _pow_floor(approx, e, prec) + 1
    target = gmpy2.mpz(b) ** e
    while last > 0 and gmpy2.mpz(last) ** kb >= target:
        last -= 1
    while gmpy2.mpz(last + 1) ** kb < target:
        last += 1
    return first, last


def _pow_floor(x: DyadicInterval, e: int, prec: int) -> int:
    from .numerics import iv_pow_int

    return iv_pow_int(x, e, prec).lo.floor()


def _outward(center: int, first: int, last: int, policy: SearchPolicy) -> Iterator[int]:
    """Primes in ``[first, last]`` by increasing distance from ``center``
    (ties go to the smaller prime)."""
    center = min(max(center, first), last)
    up = (w.value for w in iter_primes(center, last + 1, policy))
    down = (w.value for w in iter_primes_down(center - 1, first, policy))
    heap = []
    for gen, tag in ((up, 0), (down, 1)):
        q = next(gen, None)
        if q is not None:
            heapq.heappush(heap, (abs(q - center), q, tag))
    gens = (up, down)
    while heap:
        _, q, tag = heapq.heappop(heap)
        yield q
        nxt = next(gens[tag], None)
        if nxt is not None:
            heapq.heappush(heap, (abs(nxt - center), nxt, tag))


def _target_center(policy: ConjecturePolicy, e: int) -> int:
    t = Fraction(policy.target)
    return int(t.numerator**e // t.denominator**e)


def iter_candidates(node: SearchNode, policy: ConjecturePolicy = ConjecturePolicy()) -> Iterator[int]:
    first, last = image_range(node, policy.guard_bits)
    if first > last:
        return
    order = policy.candidate_order
    if order is Order.ASCENDING:
        yield from (w.value for w in iter_primes(first, last + 1, policy.prime_policy))
        return
    e = exponent(node.depth + 1)
    if order is Order.NEAREST_TO_MIDPOINT:
        mid = (first + last) // 2
    else:
        mid = _target_center(policy, e)
    yield from _outward(mid, first, last, policy.prime_policy)


def candidates(node: SearchNode, policy: ConjecturePolicy = ConjecturePolicy(),
               limit: int | None = None) -> list[int]:
    """Primes q with ``[q, q+1)`` meeting the image of the bracket, in policy
    order.  ``limit`` caps the list for wide images."""
    out = []
    for q in iter_candidates(node, policy):
        out.append(q)
        if limit is not None and len(out) >= limit:
            break
    return out


# ---------------------------------------------------------------------------
# Search
# ---------------------------------------------------------------------------


@dataclass
class SearchStats:
    nodes: int = 0
    backtracks: int = 0
    primality_tests_skipped: int = 0


@dataclass
class SearchResult:
    best: SearchNode
    stats: SearchStats
    truncated: bool
    frontier: list  # [(chain, children_tried), ...] from the root down

    @property
    def chain(self) -> tuple[int, ...]:
        return self.best.chain


class _Frame:
    __slots__ = ("node", "iterator", "tried")

    def __init__(self, node, policy, skip=0):
        self.node = node
        self.iterator = iter_candidates(node, policy)
        self.tried = 0
        for _ in range(skip):
            if next(self.iterator, None) is None:
                break
            self.tried += 1


def _frames_from_frontier(frontier, policy: ConjecturePolicy, recheck_primality: bool):
    frames = []
    for chain, tried in frontier:
        if recheck_primality:
            for q in chain:
                if not is_prime(q, policy.prime_policy):
                    raise IntegrityError(f"{q} in the stored chain is composite")
        node = bracket_for_chain(chain, policy.guard_bits, policy.root)
        if node is None:
            raise IntegrityError(f"stored chain {list(chain)} has an empty bracket")
        frames.append(_Frame(node, policy, tried))
    return frames


def search(policy: ConjecturePolicy = ConjecturePolicy(), target_depth: int | None = None,
           frontier=None, recheck_primality: bool = False) -> SearchResult:
    """Depth-first search with backtracking for a chain of ``target_depth`` primes.

    ``frontier`` (from a previous result) resumes where that run stopped;
    stored links are re-verified structurally, and for primality only when
    ``recheck_primality`` is set.
    """
    target = target_depth or policy.max_depth
    stats = SearchStats()
    if frontier:
        stack = _frames_from_frontier(frontier, policy, recheck_primality)
        if not recheck_primality:
            stats.primality_tests_skipped = len(stack[-1].node.chain)
    else:
        stack = [_Frame(root_node(policy), policy)]
    best = stack[-1].node
    truncated = False
    while stack:
        top = stack[-1]
        if top.node.depth > best.depth:
            best = top.node
        if top.node.depth >= target:
            break
        q = next(top.iterator, None)
        if q is None:
            if top.tried == 0:
                first, last = image_range(top.node, policy.guard_bits)
                dead = _with_dead_image(top.node, (first, last))
                if best is top.node:
                    best = dead
                top.node = dead
            stack.pop()
            stats.backtracks += 1
            if stats.backtracks >= policy.backtrack_limit:
                truncated = True
                break
            continue
        top.tried += 1
        nxt = child(top.node, q, policy.guard_bits)
        if nxt is None:
            continue
        stats.nodes += 1
        stack.append(_Frame(nxt, policy))
    if not stack:
        truncated = True
    frontier_out = [(f.node.chain, f.tried) for f in stack]
    return SearchResult(best, stats, truncated or best.depth < target, frontier_out)


def _with_dead_image(node: SearchNode, image) -> SearchNode:
    return SearchNode(node.chain, node.lo, node.hi, node.bracket, node.children_tried, image)


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------


def _pick_value(value, node: SearchNode) -> Fraction | None:
    """An exact rational standing for ``value``.

    A decimal string is taken literally.  A certificate stands for every
    number with that decimal prefix, so the midpoint of its overlap with the
    bracket is used (``None`` when they do not overlap).
    """
    if not isinstance(value, DigitCertificate):
        return Fraction(str(value))
    if value.is_empty():
        return None
    low = Fraction(value.text)
    high = low + Fraction(1, 10**value.certified_count)
    lo = max(low, node.bracket.lo.to_fraction())
    hi = min(high, node.bracket.hi.to_fraction())
    if lo >= hi:
        return None
    return (lo + hi) / 2


def verify_chain(primes, value, guard: int = 2 * GUARD_BITS,
                 check_primality: bool = True,
                 policy: SearchPolicy = DEFAULT_POLICY) -> bool:
    """Independent check that ``value`` (a certificate or decimal string)
    is consistent with ``primes``.

    The bracket is rebuilt from scratch; ``value`` must lie in it, and
    ``floor(value ** e_n)`` must be the n-th listed prime, computed exactly.
    """
    primes = [int(q) for q in primes]
    if not primes:
        return False
    if check_primality and not all(is_prime(q, policy) for q in primes):
        return False
    node = bracket_for_chain(primes, guard)
    if node is None:
        return False
    x = _pick_value(value, node)
    if x is None or x <= 0:
        return False
    num, den = gmpy2.mpz(x.numerator), gmpy2.mpz(x.denominator)
    for n, q in enumerate(primes, start=1):
        e = exponent(n)
        if num**e // den**e != q:
            return False
    # value inside [lo, hi): compare x**k with a exactly
    a, k = node.lo
    if num**k < a * den**k:
        return False
    b, k = node.hi
    return num**k < b * den**k


def certificate(node: SearchNode) -> DigitCertificate:
    return digits(node.bracket)


# ---------------------------------------------------------------------------
# Frontier serialization
# ---------------------------------------------------------------------------

HEADER = "FRONTIER v1"


def dumps_frontier(policy: ConjecturePolicy, frontier) -> str:
    lines = [
        HEADER,
        f"order {policy.candidate_order.value}",
        f"root {policy.root[0]} {policy.root[1]}",
        f"target {policy.target or '-'}",
    ]
    for chain, tried in frontier:
        lines.append(f"frame {tried} " + ",".join(decimal_str(q) for q in chain))
    return "\n".join(lines) + "\n"


def loads_frontier(text: str):
    """Return ``(order, root, target, frontier)`` from a stored frontier."""
    lines = text.splitlines()
    if not lines or lines[0] != HEADER:
        raise IntegrityError("missing frontier header")
    order, root, target, frames = None, (1, 2), None, []
    try:
        for line in lines[1:]:
            if not line:
                continue
            key, _, rest = line.partition(" ")
            if key == "order":
                order = Order(rest)
            elif key == "root":
                lo, hi = rest.split()
                root = (int(lo), int(hi))
            elif key == "target":
                target = None if rest == "-" else rest
            elif key == "frame":
                tried, _, body = rest.partition(" ")
                chain = tuple(parse_int(t) for t in body.split(",") if t)
                frames.append((chain, int(tried)))
            else:
                raise ValueError(key)
    except ValueError as exc:
        raise IntegrityError(f"bad frontier record: {exc}") from exc
    if order is None:
        raise IntegrityError("frontier record lacks an order")
    for (a, _), (b, _) in zip(frames, frames[1:]):
        if b[: len(a)] != a or len(b) != len(a) + 1:
            raise IntegrityError("frontier frames are not a root path")
    return order, root, target, frames
