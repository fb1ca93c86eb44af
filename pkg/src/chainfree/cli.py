"""Command line driver: read a problem, solve its cubes in order, print the verdict."""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

from .constraints import Fresh
from .engine import SolverConfig, Stats, solve
from .native import NativeFormatError, parse_native
from .sexpr import ParseError
from .smtlib import (CubeLimitExceeded, UnsupportedFeature, check_model, infer_alphabet, parse_smtlib,
                     render_model, to_cubes)

EXIT_CODES = {"sat": 0, "unsat": 1, "unknown": 2, "error": 3}


@dataclass
class Loaded:
    """A problem reduced to a list of cubes, with a way to check models against the input."""
    alphabet: object
    cubes: list
    declarations: dict
    check: object                  # (words, ints) -> bool


@dataclass
class RunResult:
    status: str
    words: dict | None = None      # variable -> string
    ints: dict | None = None
    reason: str = ""
    stats: Stats = field(default_factory=Stats)


def load(text: str, fmt: str, cube_cap: int = 64) -> Loaded:
    if fmt == "smt2":
        problem = parse_smtlib(text)
        alphabet = infer_alphabet(problem)
        taken = set(problem.declarations)
        cubes = to_cubes(problem, alphabet, Fresh(taken), cube_cap)
        return Loaded(alphabet, cubes, dict(problem.declarations),
                      lambda words, ints: check_model(problem, alphabet, words, ints))
    if fmt == "native":
        problem = parse_native(text)
        return Loaded(problem.alphabet, [problem.cube], problem.declarations, problem.check)
    raise ValueError(f"unknown input format {fmt!r}")


def _merge(total: Stats, part: Stats) -> None:
    total.vertices += part.vertices
    total.rules.update(part.rules)
    total.hom_declined += part.hom_declined
    total.lia_calls += part.lia_calls
    total.cubes += part.cubes
    total.heuristic_configurations += part.heuristic_configurations


def run(loaded: Loaded, config: SolverConfig) -> RunResult:
    """Solve the cubes in order; the first satisfiable one decides."""
    stats = Stats()
    reasons = []
    for cube in loaded.cubes:
        result = solve(cube, config)
        _merge(stats, result.stats)
        if result.status == "sat":
            words = ints = None
            if result.model is not None:
                words = {v: loaded.alphabet.decode(result.model.get(v, ())) for v, sort in
                         loaded.declarations.items() if sort == "String"}
                ints = {v: (result.ints or {}).get(v, 0) for v, sort in loaded.declarations.items() if sort == "Int"}
            return RunResult("sat", words, ints, result.reason, stats)
        if result.status == "unknown":
            reasons.append(result.reason)
    if reasons:
        return RunResult("unknown", reason="; ".join(r for r in reasons if r), stats=stats)
    return RunResult("unsat", stats=stats)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="chainfree",
                                description="Decide chain-free string constraints with transducers and lengths.")
    p.add_argument("file", help="input file, or - for standard input")
    p.add_argument("--format", choices=["smt2", "native"],
                   help="input format (default: smt2 for .smt2 files, native otherwise)")
    p.add_argument("--produce-models", action="store_true", help="print a model after sat")
    p.add_argument("--check-model", action="store_true", help="evaluate the model against the input")
    p.add_argument("--lia-backend", default="builtin", help="builtin or external:<command>")
    p.add_argument("--no-hom-heuristic", action="store_true", help="disable the homomorphism rule")
    p.add_argument("--no-intersect-heuristic", action="store_true",
                   help="disable the bounded intersection check for cubes outside the fragment")
    p.add_argument("--intersect-bound", type=int, default=4, help="overhang bound of the intersection check")
    p.add_argument("--max-steps", type=int, default=20_000, help="rule applications before giving up")
    p.add_argument("--timeout-ms", type=int, help="wall clock limit per cube")
    p.add_argument("--trace", action="store_true", help="print every rule application to stderr")
    p.add_argument("--stats", action="store_true", help="print statistics as JSON to stderr")
    p.add_argument("--max-cubes", type=int, default=64, help="cap on the disjunctive normal form")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    fmt = args.format or ("smt2" if args.file.endswith(".smt2") else "native")
    try:
        text = sys.stdin.read() if args.file == "-" else open(args.file, encoding="utf-8").read()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CODES["error"]
    trace = (lambda line: print(line, file=sys.stderr)) if args.trace else None
    try:
        config = SolverConfig(hom_heuristic=not args.no_hom_heuristic,
                              intersect_heuristic=not args.no_intersect_heuristic,
                              intersect_bound=args.intersect_bound, max_steps=args.max_steps,
                              timeout_s=args.timeout_ms / 1000 if args.timeout_ms else None,
                              lia_backend=args.lia_backend,
                              produce_models=args.produce_models or args.check_model, trace=trace)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CODES["error"]
    try:
        loaded = load(text, fmt, args.max_cubes)
    except (UnsupportedFeature, CubeLimitExceeded) as exc:
        print("unknown")
        print(f"({exc})", file=sys.stderr)
        return EXIT_CODES["unknown"]
    except (ParseError, NativeFormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CODES["error"]
    result = run(loaded, config)
    print(result.status)
    if result.reason:
        print(f"({result.reason})", file=sys.stderr)
    if args.stats:
        print(json.dumps(result.stats.as_dict(), sort_keys=True), file=sys.stderr)
    if result.status == "sat" and (args.produce_models or args.check_model):
        if result.words is None:
            print("(no model was constructed)", file=sys.stderr)
        else:
            if args.produce_models:
                print(render_model(loaded.declarations, result.words, result.ints))
            if args.check_model and not loaded.check(result.words, result.ints):
                print("error: the model does not satisfy the input", file=sys.stderr)
                return EXIT_CODES["error"]
    return EXIT_CODES[result.status]


if __name__ == "__main__":
    sys.exit(main())
