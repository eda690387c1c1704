"""Command-line front end.

Exit codes: 0 success, 2 usage, 3 precision or horizon refusal,
4 integrity failure, 5 resource budget.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
from fractions import Fraction

from . import cache as cachemod
from . import classic, conjecture, sequence, theorem
from .errors import (
    DomainError,
    IntegrityError,
    PrecisionError,
    ResourceError,
)
from .numerics import DyadicInterval, decimal_str, digits
from .primality import small_primes

EXIT_OK, EXIT_USAGE, EXIT_PRECISION, EXIT_INTEGRITY, EXIT_RESOURCE = 0, 2, 3, 4, 5
LINE_WIDTH = 80
FORMAT_NAME = "millsforge-report"


# ---------------------------------------------------------------------------
# Argument helpers
# ---------------------------------------------------------------------------

_SCI = re.compile(r"^(\d+)(?:\.(\d*))?[eE]\+?(\d+)$")
_POW = re.compile(r"^(\d+)\s*(?:\^|\*\*)\s*(\d+)$")


def exact_int(text: str) -> int:
    """Parse ``1438989``, ``1e10``, ``2.5e3``, ``3^13`` or ``3**13`` exactly."""
    t = text.strip().replace("_", "")
    if t.isdigit():
        return int(t)
    m = _POW.match(t)
    if m:
        return int(m[1]) ** int(m[2])
    m = _SCI.match(t)
    if m:
        value = Fraction(f"{m[1]}.{m[2] or '0'}") * 10 ** int(m[3])
        if value.denominator == 1:
            return int(value)
    raise argparse.ArgumentTypeError(f"not an exact integer: {text!r}")


def _int_list(text: str) -> list[int]:
    try:
        return [exact_int(t) for t in text.split(",") if t.strip()]
    except argparse.ArgumentTypeError as exc:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from exc


def _decimal(text: str) -> str:
    try:
        Fraction(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a decimal number: {text!r}") from exc
    return text


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


class Report:
    """Ordered key/value report rendered as text or as JSON."""

    def __init__(self, command: str):
        self.fields: dict = {"command": command}

    def __setitem__(self, key, value):
        self.fields[key] = value

    def render(self, fmt: str) -> str:
        if fmt == "structured":
            doc = {"format": FORMAT_NAME, "version": 1}
            doc.update({k: _blocked(v) for k, v in self.fields.items()})
            return json.dumps(doc, indent=2) + "\n"
        lines = []
        for key, value in self.fields.items():
            lines.extend(_text_lines(key, value))
        return "\n".join(lines) + "\n"


_DIGITS = re.compile(r"^-?[0-9]+(\.[0-9]*)?$")


def _is_digits(value) -> bool:
    return isinstance(value, str) and bool(_DIGITS.match(value))


def _blocked(value):
    if _is_digits(value) and len(value) > LINE_WIDTH:
        return wrap_digits(value)
    if isinstance(value, list):
        return [_blocked(v) for v in value]
    if isinstance(value, dict):
        return {k: _blocked(v) for k, v in value.items()}
    return value


def wrap_digits(text: str, width: int = LINE_WIDTH) -> list[str]:
    return [text[i : i + width] for i in range(0, len(text), width)] or [""]


def _scalar(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "-"
    return str(value)


def _text_lines(key, value, indent: str = "") -> list[str]:
    head = f"{indent}{key}:"
    if isinstance(value, list):
        items = [_scalar(v) for v in value]
        numeric = all(_is_digits(v) or isinstance(v, int) for v in value)
        if numeric and len(head) + sum(len(v) + 1 for v in items) <= LINE_WIDTH:
            return [" ".join([head] + items)]
        out = [head]
        for v in items:
            if _is_digits(v):
                out.extend(indent + "  " + line for line in wrap_digits(v, LINE_WIDTH - 2))
            else:
                out.append(f"{indent}  {v}")
        return out
    if isinstance(value, dict):
        out = [head]
        for k, v in value.items():
            out.extend(_text_lines(k, v, indent + "  "))
        return out
    s = _scalar(value)
    if not _is_digits(s) or len(head) + 1 + len(s) <= LINE_WIDTH:
        return [f"{head} {s}"]
    return [head] + wrap_digits(s)


def _interval_fields(x: DyadicInterval, places: int = 40) -> dict:
    return {"lo": x.lo.decimal(places), "hi": x.hi.decimal(places)}


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _cache_path(args):
    return args.cache or cachemod.default_path()


def _sequence_key(m: int, seed: str) -> str:
    return f"sequence mills_builder m={m} seed={seed}"


def cmd_build(args, rep: Report):
    seed = args.seed
    seed_arg = f"M{args.mersenne}" if args.mersenne else seed
    key = _sequence_key(args.m, f"M{args.mersenne}" if args.mersenne else decimal_str(seed))
    path = _cache_path(args)
    state = None
    if path and args.resume:
        rec = cachemod.cache_load(path, key)
        if rec is not None:
            state = sequence.loads(rec.payload)
            rep["resumed_terms"] = state.length
    if state is None:
        spec = sequence.ConstantSpec.create("mills_builder", args.m, seed_arg)
        state = sequence.init(spec, precision=args.precision)
    budget = ""
    while state.length < args.terms:
        try:
            state = sequence.extend(state, max_prime_bits=args.max_prime_bits)
        except ResourceError as exc:
            budget = str(exc)
            break
    if path:
        cachemod.cache_store(path, cachemod.CacheRecord(key, sequence.dumps(state)))
    rep["kind"] = "mills_builder"
    rep["m"] = args.m
    rep["seed"] = state.spec.seed_label()
    rep["terms"] = state.length
    rep["evidence"] = "probable" if state.probable else "proven"
    rep["caveats"] = list(state.caveats)
    rep["primes"] = [
        decimal_str(w.value) if n > 1 or not state.spec.mersenne_exponent
        else state.spec.seed_label()
        for n, w in state.chain
    ]
    rep["evidence_levels"] = [w.evidence.value for _, w in state.chain]
    cert = state.certified
    if args.digits is not None:
        cert = cert.truncate(args.digits)
    rep["certified_digits"] = cert.certified_count
    rep["value"] = cert.text
    if budget:
        rep["budget"] = budget
        return EXIT_RESOURCE
    if args.digits is not None and cert.certified_count < args.digits:
        rep["refusal"] = f"only {cert.certified_count} digits certified; add terms"
        return EXIT_PRECISION
    return EXIT_OK


def cmd_theorem(args, rep: Report):
    wanted = 1000 if args.digits is None else args.digits
    report = theorem.constant_digits(args.p, args.m, wanted)
    for k, v in report.fields().items():
        rep[k] = v
    rep["log_bracket"] = _interval_fields(report.log_bracket)
    return EXIT_OK


def cmd_wilson(args, rep: Report):
    rep["values"] = [classic.wilson_value(n) for n in range(1, args.max + 1)]
    return EXIT_OK


def cmd_gandhi(args, rep: Report):
    rep["values"] = [classic.gandhi_prime(n) for n in range(1, args.max + 1)]
    return EXIT_OK


def _run_fields(run: classic.FloorRun) -> dict:
    return {
        "floors": [decimal_str(f) for f in run.floors],
        "stopped": run.stopped or None,
        "amplification": decimal_str(run.budget.amplification),
        "remaining_valid_steps": run.budget.remaining_valid_steps,
    }


def cmd_wright(args, rep: Report):
    prec = args.precision or 128
    if args.omega:
        omega = DyadicInterval.from_decimal(args.omega, prec, ulps=1)
    else:
        omega = classic.wright_omega_from_floors(args.floors, prec)
    cert = digits(omega)
    rep["omega"] = _interval_fields(omega)
    rep["omega_digits"] = cert.text
    rep["forward"] = _run_fields(classic.wright_floors(omega, args.steps, prec))
    return EXIT_OK


def cmd_fridman(args, rep: Report):
    if args.seed:
        f1 = DyadicInterval.from_decimal(args.seed, args.precision or 128, ulps=1)
    else:
        primes = list(small_primes(max(16, args.primes * 8)))[: args.primes]
        f1 = classic.fridman_backward(primes, args.precision)
    rep["f1"] = _interval_fields(f1)
    rep["f1_digits"] = digits(f1).text
    rep["forward"] = _run_fields(classic.fridman_forward(f1, args.steps))
    return EXIT_OK


def _frontier_key(policy: conjecture.ConjecturePolicy) -> str:
    root = f"{policy.root[0]},{policy.root[1]}"
    return f"frontier order={policy.candidate_order.value} root={root} target={policy.target or '-'}"


def cmd_conjecture(args, rep: Report):
    policy = conjecture.ConjecturePolicy(
        candidate_order=args.policy,
        max_depth=args.depth,
        backtrack_limit=args.backtrack_limit,
        target=args.target,
    )
    path = _cache_path(args)
    frontier = None
    if path and args.resume:
        rec = cachemod.cache_load(path, _frontier_key(policy))
        if rec is not None:
            _, _, _, frontier = conjecture.loads_frontier(rec.payload)
            rep["resumed_depth"] = len(frontier[-1][0]) if frontier else 0
    result = conjecture.search(policy, args.depth, frontier, args.recheck_primality)
    if path:
        cachemod.cache_store(
            path,
            cachemod.CacheRecord(
                _frontier_key(policy), conjecture.dumps_frontier(policy, result.frontier)
            ),
        )
    node = result.best
    cert = conjecture.certificate(node)
    rep["order"] = policy.candidate_order.value
    rep["depth"] = node.depth
    rep["chain"] = [decimal_str(q) for q in node.chain]
    rep["nodes"] = result.stats.nodes
    rep["backtracks"] = result.stats.backtracks
    rep["truncated"] = result.truncated
    rep["certified_digits"] = cert.certified_count
    rep["value"] = cert.text
    if node.dead_image:
        rep["dead_image"] = list(node.dead_image)
    return EXIT_RESOURCE if result.truncated else EXIT_OK


def cmd_verify(args, rep: Report):
    path = _cache_path(args)
    if not path:
        raise DomainError("verify needs --cache or $MILLSFORGE_CACHE")
    records = cachemod.load_all(path)
    checked = []
    for key, rec in sorted(records.items()):
        if key.startswith("sequence "):
            state = sequence.loads(rec.payload, recheck_primality=args.recheck_primality)
            for n in range(1, state.length + 1):
                sequence.recover_prime(state, n)
            checked.append(f"{key}: {state.length} terms ok")
        elif key.startswith("frontier "):
            _, root, _, frames = conjecture.loads_frontier(rec.payload)
            if frames:
                chain = frames[-1][0]
                node = conjecture.bracket_for_chain(chain, root=root)
                if node is None or (chain and not conjecture.verify_chain(
                    chain, conjecture.certificate(node),
                    check_primality=args.recheck_primality,
                )):
                    raise IntegrityError(f"{key}: stored chain fails verification")
            checked.append(f"{key}: {len(frames)} frames ok")
        else:
            raise IntegrityError(f"unknown record kind {key!r}")
    rep["records"] = checked
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--digits", type=int, help="decimal digits wanted")
    common.add_argument("--precision", type=int, help="working precision in bits")
    common.add_argument("--cache", help=f"cache file (default ${cachemod.ENV_VAR})")
    common.add_argument("--format", choices=("text", "structured"), default="text")
    common.add_argument("--resume", action="store_true", help="continue from the cache")

    parser = argparse.ArgumentParser(
        prog="millsforge", description="Prime-representing constants with certified digits."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", parents=[common], help="grow a prime chain for exponent base m")
    p.add_argument("--m", type=exact_int, required=True)
    p.add_argument("--seed", type=exact_int, default=2)
    p.add_argument("--mersenne", type=int, help="seed at 2^P-1 for a known Mersenne exponent P")
    p.add_argument("--terms", type=int, default=5)
    p.add_argument("--policy", choices=("least",), default="least",
                   help="selection rule for the next prime")
    p.add_argument("--max-prime-bits", type=int, default=1 << 18)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("theorem", parents=[common], help="digits of a Mersenne-seeded constant")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--m", type=exact_int, required=True)
    p.set_defaults(func=cmd_theorem)

    p = sub.add_parser("wilson", parents=[common], help="Wilson-theorem formula values")
    p.add_argument("--max", type=int, default=10)
    p.set_defaults(func=cmd_wilson)

    p = sub.add_parser("gandhi", parents=[common], help="primes from Gandhi's formula")
    p.add_argument("--max", type=int, default=9)
    p.set_defaults(func=cmd_gandhi)

    p = sub.add_parser("wright", parents=[common], help="Wright's tower")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--floors", type=_int_list, default=[3, 13, 16381])
    g.add_argument("--omega", type=_decimal, help="printed decimal value of omega")
    p.add_argument("--steps", type=int, default=3)
    p.set_defaults(func=cmd_wright)

    p = sub.add_parser("fridman", parents=[common], help="Fridman's recurrence")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--primes", type=int, default=15, help="reconstruct f1 from this many primes")
    g.add_argument("--seed", type=_decimal, help="printed decimal value of f1")
    p.add_argument("--steps", type=int, default=100)
    p.set_defaults(func=cmd_fridman)

    p = sub.add_parser("conjecture", parents=[common], help="search for the square-exponent constant")
    p.add_argument("--depth", type=int, default=9)
    p.add_argument("--policy", choices=[o.value for o in conjecture.Order], default="ascending")
    p.add_argument("--target", type=_decimal)
    p.add_argument("--backtrack-limit", type=int, default=10_000)
    p.add_argument("--recheck-primality", action="store_true")
    p.set_defaults(func=cmd_conjecture)

    p = sub.add_parser("verify", parents=[common], help="re-check every cached record")
    p.add_argument("--recheck-primality", action="store_true")
    p.set_defaults(func=cmd_verify)
    return parser


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    rep = Report(args.command)
    try:
        code = args.func(args, rep)
    except (PrecisionError, ) as exc:
        rep["refusal"] = str(exc)
        if getattr(exc, "horizon", None) is not None:
            rep["horizon"] = exc.horizon
        code = EXIT_PRECISION
    except IntegrityError as exc:
        print(f"millsforge: integrity failure: {exc}", file=err)
        return EXIT_INTEGRITY
    except ResourceError as exc:
        rep["budget"] = str(exc)
        code = EXIT_RESOURCE
    except (DomainError, ValueError) as exc:
        print(f"millsforge: {exc}", file=err)
        return EXIT_USAGE
    out.write(rep.render(args.format))
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
