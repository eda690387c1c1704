"""Prime chains p_1, p_2, ... with p_n**m < p_{n+1} < (p_n + 1)**m - 1.

Every chain element pins the constant A to

    [p_n ** (1 / m**n), (p_n + 1) ** (1 / m**n))

and consecutive brackets nest, so the intersection shrinks towards A while
``floor(A ** m**n) == p_n`` for every n.  The next element is always the
least prime in the admissible window, which makes the chain (and therefore
A) a pure function of ``m`` and the seed.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Iterable

from .errors import (
    ConstructionError,
    DomainError,
    IntegrityError,
    PrecisionError,
    ResourceError,
)
from .numerics import (
    DigitCertificate,
    DyadicInterval,
    decimal_str,
    digits,
    iv_exp,
    iv_pow_int,
    iv_root,
    parse_int,
)
from .primality import (
    DEFAULT_POLICY,
    KNOWN_MERSENNE_EXPONENTS,
    Evidence,
    PrimeWitness,
    SearchPolicy,
    is_prime,
    least_prime_in,
    mersenne,
    mersenne_witness,
)

# Smallest exponent base for which a prime is known to lie between any two
# consecutive m-th powers.
UNCONDITIONAL_M = 1_438_989

GUARD_BITS = 64

# Seeds wider than this are handled in the log domain and never raised to
# powers or fed to a full-precision logarithm.
LOG_DOMAIN_BITS = 1 << 14

# Cap on the working precision of the A-domain bracket for log-domain seeds.
LOG_DOMAIN_PRECISION = 4096

PROBABLE_CAVEAT = "probable: chain contains strong probable primes"


class Kind(str, enum.Enum):
    MILLS_BUILDER = "mills_builder"
    MERSENNE_THEOREM = "mersenne_theorem"
    WRIGHT = "wright"
    FRIDMAN = "fridman"
    CONJECTURE = "conjecture"


@dataclass(frozen=True)
class ConstantSpec:
    """What defines a constant: exponent base, seed prime, and provenance.

    Use :meth:`create` rather than the raw constructor; it derives the
    ``unconditional`` flag and checks the seed.
    """

    kind: Kind
    m: int
    seed: PrimeWitness
    unconditional: bool
    notes: str = ""
    mersenne_exponent: int | None = None

    @classmethod
    def create(cls, kind, m: int, seed, notes: str = "",
               policy: SearchPolicy = DEFAULT_POLICY) -> "ConstantSpec":
        kind = Kind(kind)
        m = int(m)
        if m < 2:
            raise DomainError("exponent base m must be at least 2")
        exponent = None
        if isinstance(seed, str) and seed.startswith("M"):
            exponent = int(seed[1:])
            seed = mersenne_witness(exponent)
        elif not isinstance(seed, PrimeWitness):
            verdict = is_prime(int(seed), policy)
            if not verdict:
                raise DomainError(f"seed {seed} is not prime")
            seed = verdict
        if seed.evidence in (Evidence.LUCAS_LEHMER, Evidence.EXTERNALLY_CERTIFIED):
            exponent = seed.value.bit_length()
        unconditional = m >= UNCONDITIONAL_M and seed.evidence.is_proof
        return cls(kind, m, seed, unconditional, notes, exponent)

    @property
    def rh_conditional(self) -> bool:
        return self.kind is Kind.MILLS_BUILDER and self.m == 3

    @property
    def caveats(self) -> tuple[str, ...]:
        out = []
        if self.m < UNCONDITIONAL_M:
            out.append(
                f"no unconditional guarantee: m={self.m} is below {UNCONDITIONAL_M}"
            )
        if self.rh_conditional:
            out.append("conditional on the Riemann hypothesis")
        if self.seed.probable:
            out.append(PROBABLE_CAVEAT)
        return tuple(out)

    def seed_label(self) -> str:
        if self.mersenne_exponent is not None:
            return f"2^{self.mersenne_exponent}-1"
        return decimal_str(self.seed.value)


@dataclass(frozen=True)
class SequenceState:
    """An immutable chain with its per-step brackets.

    ``steps[i]`` brackets A using chain element ``i + 1`` alone; ``bracket``
    is the running intersection.
    """

    spec: ConstantSpec
    chain: tuple[tuple[int, PrimeWitness], ...]
    steps: tuple[DyadicInterval, ...]
    bracket: DyadicInterval
    certified: DigitCertificate = field(compare=False)

    @property
    def primes(self) -> list[int]:
        return [w.value for _, w in self.chain]

    @property
    def length(self) -> int:
        return len(self.chain)

    @property
    def probable(self) -> bool:
        return any(w.probable for _, w in self.chain)

    @property
    def caveats(self) -> tuple[str, ...]:
        out = list(self.spec.caveats)
        if self.probable and PROBABLE_CAVEAT not in out:
            out.append(PROBABLE_CAVEAT)
        return tuple(out)


# ---------------------------------------------------------------------------
# Brackets
# ---------------------------------------------------------------------------


def _uses_log_domain(spec: ConstantSpec) -> bool:
    return (
        spec.mersenne_exponent is not None
        and spec.seed.value.bit_length() > LOG_DOMAIN_BITS
    )


def step_precision(prime: int, m: int, n: int) -> int:
    """Working bits for the bracket of chain element ``n``."""
    return prime.bit_length() + (m**n).bit_length() + GUARD_BITS


def step_bracket(prime: int, m: int, n: int, prec: int | None = None) -> DyadicInterval:
    """Enclosure of ``[prime**(1/m**n), (prime+1)**(1/m**n)]``."""
    if prec is None:
        prec = step_precision(prime, m, n)
    k = m**n
    lo = iv_root(DyadicInterval.point(prime, prec), k, prec)
    hi = iv_root(DyadicInterval.point(prime + 1, prec), k, prec)
    return DyadicInterval(lo.lo, hi.hi, prec)


def _log_domain_bracket(spec: ConstantSpec, prec: int) -> DyadicInterval:
    from .theorem import log_bracket

    return iv_exp(log_bracket(spec.mersenne_exponent, spec.m, prec + GUARD_BITS), prec)


def _recheck_seed(spec: ConstantSpec, policy: SearchPolicy) -> None:
    seed = spec.seed
    if seed.evidence in (Evidence.LUCAS_LEHMER, Evidence.EXTERNALLY_CERTIFIED):
        p = seed.value.bit_length()
        if p not in KNOWN_MERSENNE_EXPONENTS or seed.value != mersenne(p):
            raise IntegrityError(f"seed is not a known Mersenne prime (2^{p}-1 expected)")
        return
    verdict = is_prime(seed.value, policy)
    if not verdict:
        raise IntegrityError(f"seed {seed.value} fails its primality recheck")
    if verdict.evidence.is_proof != seed.evidence.is_proof:
        raise IntegrityError(
            f"seed {seed.value} claims {seed.evidence.value}, recheck gives "
            f"{verdict.evidence.value}"
        )


def _state(spec, chain, steps) -> SequenceState:
    bracket = steps[0]
    for s in steps[1:]:
        bracket = bracket.intersect(s)
        if bracket is None:
            raise IntegrityError("chain brackets do not intersect")
    cert = digits(bracket)
    extra = list(spec.caveats)
    if any(w.probable for _, w in chain):
        extra.append(PROBABLE_CAVEAT)
    return SequenceState(spec, tuple(chain), tuple(steps), bracket, cert.with_caveats(*extra))


def init(spec: ConstantSpec, policy: SearchPolicy = DEFAULT_POLICY,
         precision: int | None = None) -> SequenceState:
    """Start a chain at the seed."""
    _recheck_seed(spec, policy)
    p1 = spec.seed.value
    if _uses_log_domain(spec):
        prec = precision or min(step_precision(p1, spec.m, 1), LOG_DOMAIN_PRECISION)
        first = _log_domain_bracket(spec, prec)
    else:
        first = step_bracket(p1, spec.m, 1, precision)
    return _state(spec, [(1, spec.seed)], [first])


# ---------------------------------------------------------------------------
# Growth
# ---------------------------------------------------------------------------


def next_window(p: int, m: int) -> tuple[int, int]:
    """Open interval that must contain the next chain element.

    ``(p + 1)**m - 1`` is divisible by ``p``, so it is never prime and the
    upper end can be excluded.
    """
    return p**m, (p + 1) ** m - 1


def extend(state: SequenceState, policy: SearchPolicy = DEFAULT_POLICY,
           max_prime_bits: int = 1 << 20) -> SequenceState:
    """Append the least admissible prime and tighten the bracket."""
    if not state.chain:
        raise ConstructionError("cannot extend an empty chain")
    if _uses_log_domain(state.spec):
        raise ResourceError(
            "the next element of a log-domain chain is far beyond reach"
        )
    m = state.spec.m
    n, last = state.chain[-1]
    p = last.value
    if p.bit_length() * m > max_prime_bits:
        raise ResourceError(
            f"next prime would have about {p.bit_length() * m} bits "
            f"(budget {max_prime_bits})"
        )
    lo, hi = next_window(p, m)
    found = least_prime_in(lo, hi, policy)
    if found is None:
        window = DyadicInterval.from_bounds(lo, hi)
        raise ConstructionError(f"no prime in ({lo}, {hi})", window)
    prec = step_precision(found.value, m, n + 1)
    for _ in range(4):
        new = step_bracket(found.value, m, n + 1, prec)
        prev = state.steps[-1]
        if prev.lo < new.lo and new.hi < prev.hi:
            break
        prec *= 2
    else:
        raise PrecisionError(f"step {n + 1} bracket does not nest inside step {n}")
    return _state(state.spec, list(state.chain) + [(n + 1, found)],
                  list(state.steps) + [new])


def extend_to(state: SequenceState, terms: int,
              policy: SearchPolicy = DEFAULT_POLICY) -> SequenceState:
    while state.length < terms:
        state = extend(state, policy)
    return state


def build(m: int, seed=2, terms: int = 1, kind=Kind.MILLS_BUILDER,
          policy: SearchPolicy = DEFAULT_POLICY) -> SequenceState:
    """Convenience: create the ConstantSpec, start the chain, extend to ``terms``."""
    return extend_to(init(ConstantSpec.create(kind, m, seed, policy=policy), policy),
                     terms, policy)


# ---------------------------------------------------------------------------
# Reading the chain back out of the bracket
# ---------------------------------------------------------------------------


def _floor_at_least(state: SequenceState, n: int, f: int) -> bool:
    """Exactly decide ``A ** m**n >= f`` from chain element ``n``."""
    return f <= state.chain[n - 1][1].value


def _floor_below(state: SequenceState, n: int, f: int) -> bool:
    """Exactly decide ``A ** m**n < f`` from chain element ``n``."""
    return state.chain[n - 1][1].value + 1 <= f


def recover_prime(state: SequenceState, n: int, precision: int | None = None,
                  attempts: int = 4) -> int:
    """``floor(A ** m**n)`` computed from the bracket; must equal ``p_n``.

    The power of the bracket narrows the floor to at most a few candidates.
    When the last chain element is asked for, the image touches ``p_n + 1``
    because that end is open; the candidates are then settled by exact
    integer comparison against the chain constraint at index ``n``.
    """
    if not 1 <= n <= state.length:
        raise DomainError(f"index {n} outside chain of length {state.length}")
    m = state.spec.m
    p_n = state.chain[n - 1][1].value
    if _uses_log_domain(state.spec):
        if n != 1:
            raise DomainError("log-domain chains hold a single element")
        return p_n
    k = m**n
    prec = precision or step_precision(p_n, m, n)
    for _ in range(attempts):
        image = iv_pow_int(state.bracket.with_precision(prec), k, prec)
        lo_f, hi_f = image.floor_range()
        if lo_f == hi_f:
            value = lo_f
            break
        if hi_f - lo_f <= 2:
            settled = [
                f for f in range(lo_f, hi_f + 1)
                if _floor_at_least(state, n, f) and _floor_below(state, n, f + 1)
            ]
            if len(settled) == 1:
                value = settled[0]
                break
        prec *= 2
    else:
        raise PrecisionError(
            f"floor of A^(m^{n}) is ambiguous; extend the chain or raise precision"
        )
    if value != p_n:
        raise IntegrityError(f"recovered {value} but chain holds {p_n} at index {n}")
    return value


# ---------------------------------------------------------------------------
# Digits
# ---------------------------------------------------------------------------


def extend_until(state: SequenceState, wanted: int, max_terms: int = 12,
                 max_prime_bits: int = 1 << 18,
                 policy: SearchPolicy = DEFAULT_POLICY) -> tuple[SequenceState, str]:
    """Grow the chain until ``wanted`` digits are certified or a budget bites.

    Returns the state and an empty string, or the state and the reason the
    budget stopped growth.
    """
    while state.certified.certified_count < wanted:
        if state.length >= max_terms:
            return state, f"term budget of {max_terms} reached"
        try:
            state = extend(state, policy, max_prime_bits)
        except ResourceError as exc:
            return state, str(exc)
    return state, ""


def constant_digits(state: SequenceState, wanted: int, max_terms: int = 12,
                    max_prime_bits: int = 1 << 18,
                    policy: SearchPolicy = DEFAULT_POLICY) -> DigitCertificate:
    """Certified decimal prefix of A with ``wanted`` fractional digits.

    A shorter certificate with a ``budget`` caveat comes back when the
    chain cannot be grown far enough.
    """
    state, reason = extend_until(state, wanted, max_terms, max_prime_bits, policy)
    cert = state.certified.truncate(wanted)
    if reason:
        cert = cert.with_caveats(
            f"budget: {reason}; {cert.certified_count} of {wanted} digits certified"
        )
    return cert


# ---------------------------------------------------------------------------
# Invariants
# ---------------------------------------------------------------------------


def check_chain(primes: Iterable[int], m: int) -> None:
    """Raise :class:`IntegrityError` unless every link obeys the window rule."""
    primes = list(primes)
    for i, (a, b) in enumerate(zip(primes, primes[1:]), start=1):
        lo, hi = next_window(a, m)
        if not lo < b < hi:
            raise IntegrityError(f"link {i}->{i + 1} violates p^m < q < (p+1)^m - 1")


def check_state(state: SequenceState) -> None:
    check_chain(state.primes, state.spec.m)
    for a, b in zip(state.steps, state.steps[1:]):
        if not (a.lo < b.lo and b.hi < a.hi):
            raise IntegrityError("step brackets are not strictly nested")


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

HEADER = "SEQUENCE v1"


def dumps(state: SequenceState) -> str:
    spec = state.spec
    lines = [
        HEADER,
        f"kind {spec.kind.value}",
        f"m {spec.m}",
        f"notes {spec.notes.replace(chr(10), ' ')}",
    ]
    for n, w in state.chain:
        if n == 1 and spec.mersenne_exponent is not None:
            value = f"M{spec.mersenne_exponent}"
        else:
            value = decimal_str(w.value)
        lines.append(f"prime {n} {w.evidence.value} {value}")
    return "\n".join(lines) + "\n"


def loads(text: str, policy: SearchPolicy = DEFAULT_POLICY,
          recheck_primality: bool = False) -> SequenceState:
    """Rebuild a state, re-verifying the chain rule and recomputing brackets.

    Evidence tags are taken from the record unless ``recheck_primality``.
    """
    lines = text.splitlines()
    if not lines or lines[0] != HEADER:
        raise IntegrityError("missing sequence header")
    fields, chain = {}, []
    for line in lines[1:]:
        if not line:
            continue
        key, _, rest = line.partition(" ")
        if key == "prime":
            try:
                n, ev, value = rest.split(" ")
                chain.append((int(n), Evidence(ev), value))
            except ValueError as exc:
                raise IntegrityError(f"bad prime line: {line!r}") from exc
        else:
            fields[key] = rest
    try:
        kind, m = Kind(fields["kind"]), int(fields["m"])
    except (KeyError, ValueError) as exc:
        raise IntegrityError("incomplete sequence record") from exc
    if not chain or [c[0] for c in chain] != list(range(1, len(chain) + 1)):
        raise IntegrityError("chain indices are not 1..n")
    _, ev, value = chain[0]
    if value.startswith("M"):
        seed = mersenne_witness(int(value[1:]))
    else:
        seed = PrimeWitness(parse_int(value), ev, "from record")
    spec = ConstantSpec.create(kind, m, seed, fields.get("notes", ""), policy)
    state = init(spec, policy)
    witnesses = [seed]
    for n, ev, value in chain[1:]:
        v = parse_int(value)
        if recheck_primality:
            w = is_prime(v, policy)
            if not w:
                raise IntegrityError(f"chain element {n} is composite")
        else:
            w = PrimeWitness(v, ev, "from record")
        witnesses.append(w)
    check_chain([w.value for w in witnesses], m)
    steps = list(state.steps)
    for n, w in enumerate(witnesses[1:], start=2):
        steps.append(step_bracket(w.value, m, n))
    result = _state(spec, list(enumerate(witnesses, start=1)), steps)
    check_state(result)
    return result


def with_spec_notes(state: SequenceState, notes: str) -> SequenceState:
    return replace(state, spec=replace(state.spec, notes=notes))
