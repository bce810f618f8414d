"""Command-line front end.

Subcommands mirror the library operations one-to-one; every command
reads either inline text, a file path, or `-` for stdin. Output is
plain text by default and schema-stable JSON with `--format json`
(byte-identical across runs for identical inputs and flags).

Exit codes: 0 success, 1 parse/usage error, 2 precision or budget
exhaustion, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from dataclasses import dataclass
from fractions import Fraction

from . import injectivity, solver
from .approx import multiset_approx, set_approx
from .dyadic import Dyadic, Enclosure
from .errors import (
    BitBudgetError,
    BudgetError,
    HFRealError,
    IterationLimitError,
    ParseError,
    PrecisionExhausted,
    UnreachableNodesError,
)
from .hf import ack_compare, ack_decode, ack_encode, parse_braces, successor_set
from .systems import (
    SetSystem,
    format_system,
    graph_to_system,
    normalize,
    parse_graph,
    parse_system,
)

__all__ = ["main", "Config"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RESOURCE = 2
EXIT_INTERNAL = 3

MIN_PRECISION_BITS = 64
MAX_PRECISION_BITS = 1 << 20

_POW2_RE = re.compile(r"^2\s*(?:\^|\*\*)\s*(-?\d+)$")


def parse_eps(text: str) -> Fraction:
    m = _POW2_RE.match(text.strip())
    if m:
        k = int(m.group(1))
        value = Fraction(1 << k) if k >= 0 else Fraction(1, 1 << -k)
    else:
        try:
            value = Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"bad epsilon {text!r}: {exc}") from None
    if value <= 0:
        raise ParseError(f"epsilon must be positive, got {text!r}")
    return value


@dataclass(frozen=True)
class Config:
    eps: Fraction
    max_precision: int
    digits: int
    fmt: str
    input_format: str
    seed: int
    jobs: int

    def __post_init__(self):
        if not MIN_PRECISION_BITS <= self.max_precision <= MAX_PRECISION_BITS:
            raise ParseError(
                f"--max-precision must lie in [{MIN_PRECISION_BITS}, "
                f"{MAX_PRECISION_BITS}], got {self.max_precision}")
        if self.digits < 1:
            raise ParseError(f"--digits must be >= 1, got {self.digits}")
        if self.jobs < 1:
            raise ParseError(f"--jobs must be >= 1, got {self.jobs}")


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read_input(arg: str) -> str:
    if arg == "-":
        return sys.stdin.read()
    if os.path.isfile(arg):
        with open(arg, "r", encoding="utf-8") as fh:
            return fh.read()
    return arg


def _load_system(arg: str, cfg: Config) -> tuple[SetSystem, tuple[str, ...], int]:
    text = _read_input(arg)
    fmt = cfg.input_format
    if fmt == "auto":
        has_edges = "->" in text or any(
            line.strip().startswith("point ") for line in text.splitlines())
        fmt = "graph" if has_edges else "system"
    if fmt == "graph":
        graph, names = parse_graph(text)
        system, point = graph_to_system(graph)
        return system, names, point
    system, names, point = parse_system(text)
    return system, names, point


def _dyadic_json(d: Dyadic, digits: int) -> dict:
    return {
        "decimal": d.decimal(digits),
        "significand": d.mantissa,
        "exponent": d.exponent,
    }


def _enclosure_json(e: Enclosure, digits: int) -> dict:
    return {
        "lo": _dyadic_json(e.lo, digits),
        "hi": _dyadic_json(e.hi, digits),
        "width": e.width.decimal(digits),
    }


def _emit_json(obj) -> None:
    print(json.dumps(obj, sort_keys=True, separators=(",", ":")))


def _enclosure_text(e: Enclosure, digits: int) -> str:
    return f"[{e.lo.decimal(digits)}, {e.hi.decimal(digits)}] width {e.width.decimal(digits)}"


# -- subcommand handlers --------------------------------------------------


def _cmd_encode(args, cfg: Config) -> int:
    value = parse_braces(_read_input(args.input).strip())
    print(ack_encode(value))
    return EXIT_OK


def _cmd_decode(args, cfg: Config) -> int:
    try:
        index = int(args.index)
    except ValueError:
        raise ParseError(f"not a decimal index: {args.index!r}") from None
    if index < 0:
        raise ParseError("index must be nonnegative")
    print(ack_decode(index).to_braces())
    return EXIT_OK


def _cmd_compare(args, cfg: Config) -> int:
    a = parse_braces(_read_input(args.left).strip())
    b = parse_braces(_read_input(args.right).strip())
    word = {-1: "less", 0: "equal", 1: "greater"}[ack_compare(a, b)]
    print(word)
    return EXIT_OK


def _cmd_succ(args, cfg: Config) -> int:
    value = parse_braces(_read_input(args.input).strip())
    print(successor_set(value).to_braces())
    return EXIT_OK


def _solution_payload(sol: solver.CodeSolution, names, cfg: Config) -> dict:
    return {
        "status": sol.status.value,
        "iterations": sol.iterations,
        "precision_bits": sol.precision_bits,
        "epsilon": str(sol.epsilon),
        "was_normalized": sol.was_normalized,
        "unknowns": [
            {"name": names[i], **_enclosure_json(e, cfg.digits)}
            for i, e in enumerate(sol.enclosures)
        ],
    }


def _print_solution(sol: solver.CodeSolution, names, cfg: Config) -> None:
    if sol.was_normalized:
        print("warning: input system was not normal; solved its "
              "bisimulation quotient", file=sys.stderr)
    if cfg.fmt == "json":
        _emit_json(_solution_payload(sol, names, cfg))
        return
    print(f"status: {sol.status.value}  iterations: {sol.iterations}  "
          f"precision: {sol.precision_bits} bits")
    for i, e in enumerate(sol.enclosures):
        print(f"{names[i]} = {_enclosure_text(e, cfg.digits)}")


def _cmd_solve(args, cfg: Config) -> int:
    system, names, point = _load_system(args.input, cfg)
    try:
        sol = solver.solve(system, cfg.eps, cfg.max_precision)
    except PrecisionExhausted as exc:
        if isinstance(exc.best, solver.CodeSolution):
            _print_solution(exc.best, names, cfg)
        raise
    _print_solution(sol, names, cfg)
    return EXIT_OK


def _cmd_ra(args, cfg: Config) -> int:
    value = parse_braces(_read_input(args.input).strip())
    enc = solver.ra_code(value, cfg.eps, cfg.max_precision)
    if cfg.fmt == "json":
        _emit_json(_enclosure_json(enc, cfg.digits))
    else:
        print(_enclosure_text(enc, cfg.digits))
    return EXIT_OK


def _cmd_omega(args, cfg: Config) -> int:
    enc = solver.omega(cfg.eps, cfg.max_precision)
    if cfg.fmt == "json":
        _emit_json(_enclosure_json(enc, cfg.digits))
    else:
        print(_enclosure_text(enc, cfg.digits))
    return EXIT_OK


def _cmd_minimize(args, cfg: Config) -> int:
    system, names, point = _load_system(args.input, cfg)
    quotient, mapping = normalize(system)
    rep_names = [None] * quotient.n
    for old, new in enumerate(mapping):
        if rep_names[new] is None:
            rep_names[new] = names[old]
    if cfg.fmt == "json":
        _emit_json({
            "equations": format_system(quotient, rep_names).splitlines(),
            "mapping": {names[old]: rep_names[new]
                        for old, new in enumerate(mapping)},
            "point": rep_names[mapping[point]],
        })
        return EXIT_OK
    print(format_system(quotient, rep_names))
    for old, new in enumerate(mapping):
        if names[old] != rep_names[new]:
            print(f"# {names[old]} -> {rep_names[new]}")
    return EXIT_OK


def _cmd_approx(args, cfg: Config) -> int:
    system, names, point = _load_system(args.input, cfg)
    rows = []
    for j in range(args.steps + 1):
        if args.kind == "set":
            values = set_approx(system, j).values
            rendered = [v.to_braces() for v in values]
        else:
            values = multiset_approx(system, j).values
            rendered = [v.canonical() for v in values]
        rows.append(rendered)
    if cfg.fmt == "json":
        _emit_json({
            "kind": args.kind,
            "names": list(names),
            "steps": [{"j": j, "values": row} for j, row in enumerate(rows)],
        })
        return EXIT_OK
    for j, row in enumerate(rows):
        print(f"j={j}: <" + ", ".join(row) + ">")
    return EXIT_OK


def _cmd_scan(args, cfg: Config) -> int:
    report = injectivity.scan(args.count, cfg.eps, cfg.max_precision,
                              jobs=cfg.jobs)
    if cfg.fmt == "json":
        _emit_json({
            "count": report.count,
            "epsilon": str(report.epsilon),
            "final_precision": report.final_precision,
            "max_precision": report.max_precision,
            "unresolved_pairs": [list(p) for p in report.unresolved_pairs],
            "min_certified_gap": (
                None if report.min_certified_gap is None
                else _dyadic_json(report.min_certified_gap, cfg.digits)),
            "entries": [
                {
                    "index": entry.index,
                    "midpoint": entry.enclosure.midpoint.decimal(cfg.digits),
                    "width": entry.enclosure.width.decimal(cfg.digits),
                    "flagged": entry.flagged,
                    "unresolved": entry.unresolved,
                }
                for entry in report.entries
            ],
        })
        return EXIT_OK
    print("index,midpoint,width,flagged,unresolved")
    for entry in report.entries:
        print(f"{entry.index},{entry.enclosure.midpoint.decimal(cfg.digits)},"
              f"{entry.enclosure.width.decimal(cfg.digits)},"
              f"{int(entry.flagged)},{int(entry.unresolved)}")
    gap = ("none" if report.min_certified_gap is None
           else report.min_certified_gap.decimal(cfg.digits))
    print(f"# unresolved_pairs={len(report.unresolved_pairs)} "
          f"min_certified_gap={gap} precision={report.final_precision}")
    return EXIT_OK


def _cmd_duecasi(args, cfg: Config) -> int:
    report = injectivity.check_adjacent(args.count, cfg.eps, cfg.max_precision)
    worst_next = min(report.gaps_next)
    worst_skip = min(report.gaps_skip)
    if cfg.fmt == "json":
        _emit_json({
            "count": report.count,
            "ok": report.ok,
            "min_gap_next": _dyadic_json(worst_next, cfg.digits),
            "min_gap_skip": _dyadic_json(worst_skip, cfg.digits),
            "inconclusive": [list(p) for p in report.inconclusive],
        })
        return EXIT_OK
    print(f"ok: {str(report.ok).lower()}")
    print(f"min certified |code(i)-code(i+1)| = {worst_next.decimal(cfg.digits)}")
    print(f"min certified |code(i)-code(i+2)| = {worst_skip.decimal(cfg.digits)}")
    if report.inconclusive:
        for i, off in report.inconclusive:
            print(f"inconclusive: ({i}, {i + off})")
    return EXIT_OK


def _cmd_deltagap(args, cfg: Config) -> int:
    result = injectivity.delta_gap(args.index, cfg.eps, cfg.max_precision)
    if cfg.fmt == "json":
        _emit_json({
            "j": result.j,
            **_enclosure_json(result.enclosure, cfg.digits),
            "excludes_minus_one": result.excludes_minus_one,
        })
        return EXIT_OK
    print(_enclosure_text(result.enclosure, cfg.digits))
    print(f"excludes -1: {str(result.excludes_minus_one).lower()}")
    return EXIT_OK


def _cmd_witness(args, cfg: Config) -> int:
    witness, enc = injectivity.unbounded_witness(
        args.target, cfg.eps, cfg.max_precision)
    if cfg.fmt == "json":
        _emit_json({
            "target": args.target,
            "witness": witness.to_braces(),
            "cardinality": len(witness),
            **_enclosure_json(enc, cfg.digits),
        })
        return EXIT_OK
    print(witness.to_braces())
    print(_enclosure_text(enc, cfg.digits))
    return EXIT_OK


def _build_parser() -> _Parser:
    parser = _Parser(prog="hfreal",
                     description="Ackermann codes for hereditarily finite "
                                 "sets and certified real codes for hypersets")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--eps", default="1e-30", metavar="E",
                        help="target enclosure width (decimal or 2^-k)")
    common.add_argument("--max-precision", type=int, default=4096,
                        metavar="BITS", help="working-precision ceiling")
    common.add_argument("--digits", type=int, default=30, metavar="D",
                        help="decimal digits in printed values")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--input-format",
                        choices=("auto", "system", "graph"), default="auto")
    common.add_argument("--seed", type=int, default=0,
                        help="seed for randomized helpers (reserved)")
    common.add_argument("--jobs", type=int, default=1,
                        help="parallel workers for scan")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", parents=[common],
                       help="braces term -> Ackermann code")
    p.add_argument("input")
    p.set_defaults(handler=_cmd_encode)

    p = sub.add_parser("decode", parents=[common],
                       help="Ackermann code -> braces term")
    p.add_argument("index")
    p.set_defaults(handler=_cmd_decode)

    p = sub.add_parser("compare", parents=[common],
                       help="order two braces terms")
    p.add_argument("left")
    p.add_argument("right")
    p.set_defaults(handler=_cmd_compare)

    p = sub.add_parser("succ", parents=[common],
                       help="successor in code order")
    p.add_argument("input")
    p.set_defaults(handler=_cmd_succ)

    p = sub.add_parser("solve", parents=[common],
                       help="solve the code system of a system/graph")
    p.add_argument("input")
    p.set_defaults(handler=_cmd_solve)

    p = sub.add_parser("ra", parents=[common],
                       help="code of a well-founded braces term")
    p.add_argument("input")
    p.set_defaults(handler=_cmd_ra)

    p = sub.add_parser("omega", parents=[common],
                       help="the solution of x = 2^-x")
    p.set_defaults(handler=_cmd_omega)

    p = sub.add_parser("minimize", parents=[common],
                       help="bisimulation quotient of a system/graph")
    p.add_argument("input")
    p.set_defaults(handler=_cmd_minimize)

    p = sub.add_parser("approx", parents=[common],
                       help="set/multiset approximation table")
    p.add_argument("input")
    p.add_argument("--steps", type=int, default=3, metavar="J")
    p.add_argument("--kind", choices=("set", "multiset"), default="set")
    p.set_defaults(handler=_cmd_approx)

    p = sub.add_parser("scan", parents=[common],
                       help="certified collision scan of the first N codes")
    p.add_argument("--count", type=int, default=4096, metavar="N")
    p.set_defaults(handler=_cmd_scan)

    p = sub.add_parser("duecasi", parents=[common],
                       help="certify code(i) != code(i+1), code(i+2)")
    p.add_argument("--count", type=int, default=4096, metavar="N")
    p.set_defaults(handler=_cmd_duecasi)

    p = sub.add_parser("deltagap", parents=[common],
                       help="code jump at index 2^j")
    p.add_argument("--index", type=int, required=True, metavar="J")
    p.set_defaults(handler=_cmd_deltagap)

    p = sub.add_parser("witness", parents=[common],
                       help="set with code certifiably above a target")
    p.add_argument("--target", type=int, required=True, metavar="N")
    p.set_defaults(handler=_cmd_witness)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = Config(
            eps=parse_eps(args.eps),
            max_precision=args.max_precision,
            digits=args.digits,
            fmt=args.format,
            input_format=args.input_format,
            seed=args.seed,
            jobs=args.jobs,
        )
        return args.handler(args, cfg)
    except (ParseError, UnreachableNodesError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PrecisionExhausted, BitBudgetError, BudgetError,
            IterationLimitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except HFRealError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
