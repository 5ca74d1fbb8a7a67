# cli.py
"""
Command-line front end.

  solve  --alg {ta|hom|slp|asym} [--budget N] [--stats] [--trace] [--compressed] [--require-hom] FILE
  gen    --family {sigma|sigma-prime|random} --n N [--seed S] [-o FILE]
  bench  --family F... --alg A... --max-n N [--csv FILE] [--workers K]
  verify PROBLEM SUBST

Exit codes: 0 unifiable / verified, 1 not unifiable / failed, 2 budget
exceeded, 3 input error.
"""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from bench import bench
from checker import check_unifier
from config import get_settings
from errors import MaterializationError, UnificationError
from formatter import format_check_result, format_outcome, format_stats, format_substitution, format_system, format_trace
from generators import Family, GenSpec, generate
from pipeline import ALGORITHMS, run_pipeline, solve_problem
from problem_parser import parse_problem, parse_substitution
from results import Verdict

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_BUDGET = 2
EXIT_INPUT = 3

_EXIT = {
    Verdict.UNIFIABLE: EXIT_OK,
    Verdict.NOT_UNIFIABLE: EXIT_FAILED,
    Verdict.BUDGET_EXCEEDED: EXIT_BUDGET,
}


def display_result(result: dict) -> None:
    """Pipeline result in the verbose layout."""
    print()
    print("=" * 60)
    print("📋 results")
    print("=" * 60)
    for alg, entry in result["results"].items():
        line = f"  {alg}: {entry['decision']}"
        if entry["reason"]:
            line += f" ({entry['reason']})"
        print(line)
    check_result = result["check_result"]
    print("\n  cross-check:")
    for detail in check_result["check_details"]:
        mark = "✅" if detail["status"] == "passed" else "❌"
        print(f"    {mark} {detail['message']}")
    if check_result["passed"]:
        print("\n  ✅ every decider agrees and every unifier verifies")
    else:
        print(f"\n  ❌ {len(check_result['violations'])} problem(s):")
        for i, violation in enumerate(check_result["violations"], 1):
            print(f"    {i}. [{violation['rule']}] {violation['message']}")


def cmd_solve(args: argparse.Namespace) -> int:
    system = parse_problem(args.file)
    if args.verbose:
        result = run_pipeline(system, verbose=True, budget=args.budget)
        display_result(result)
    outcome = solve_problem(system, args.alg, budget=args.budget, trace=args.trace or None, require_hom=args.require_hom)
    print(format_outcome(outcome))
    if outcome.unifiable:
        try:
            sigma = outcome.unifier(compressed=args.compressed)
        except MaterializationError as e:
            print(f"# not materializable ({e}); printing the compressed unifier")
            sigma = outcome.unifier(compressed=True)
        print(format_substitution(sigma))
    if args.stats:
        print(format_stats(outcome.stats))
    if args.trace:
        print(format_trace(outcome.stats))
    return _EXIT[outcome.verdict]


def cmd_gen(args: argparse.Namespace) -> int:
    fields = {
        "family": args.family,
        "n": args.n,
        "seed": args.seed,
        "variables": args.variables,
        "sums": args.sums,
        "products": args.products,
        "labels": args.labels,
        "acyclic": args.acyclic,
    }
    spec = GenSpec(**{k: v for k, v in fields.items() if v is not None})
    text = format_system(generate(spec)) + "\n"
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
        logger.info("wrote %s", args.output)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    report = bench(
        args.family,
        args.alg,
        args.budget,
        min_n=args.min_n,
        max_n=args.max_n,
        seeds=range(args.seeds),
        workers=args.workers,
        progress=not args.quiet,
    )
    if args.csv:
        report.to_csv(args.csv)
    if report.empty:
        print("empty report")
        return EXIT_OK
    print(report.summary().to_string(index=False))
    if not report.budget_exceeded().empty:
        print(f"{len(report.budget_exceeded())} run(s) exceeded the budget (left out of slopes)")
    if not report.disagreements().empty:
        print("❌ decisions disagree with the oracle:")
        print(report.disagreements()[["family", "n", "seed", "algorithm", "decision", "oracle_decision"]].to_string(index=False))
        return EXIT_FAILED
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    system = parse_problem(args.problem)
    sigma = parse_substitution(args.substitution)
    report = check_unifier(system, sigma)
    print(format_check_result(report))
    if args.json:
        print(json.dumps(report, ensure_ascii=False, indent=2))
    return EXIT_OK if report["passed"] else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="distrib", description="Unification modulo one-sided distributivity")
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING, ... (default from settings)")
    parser.add_argument("-v", "--verbose", action="store_true", help="print pipeline banners")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="decide one problem file")
    solve.add_argument("file")
    solve.add_argument("--alg", choices=ALGORITHMS, default="slp")
    solve.add_argument("--budget", type=int, default=None)
    solve.add_argument("--stats", action="store_true")
    solve.add_argument("--trace", action="store_true")
    solve.add_argument("--compressed", action="store_true", help="print lateral bindings as SLP references")
    solve.add_argument("--require-hom", action="store_true", help="with --alg hom, reject systems outside the fragment")
    solve.set_defaults(func=cmd_solve)

    gen = sub.add_parser("gen", help="generate a problem")
    gen.add_argument("--family", choices=[f.value for f in Family], required=True)
    gen.add_argument("--n", type=int, default=0)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--variables", type=int, default=None)
    gen.add_argument("--sums", type=int, default=None)
    gen.add_argument("--products", type=int, default=None)
    gen.add_argument("--labels", type=int, default=None)
    gen.add_argument("--acyclic", action="store_true", default=None)
    gen.add_argument("-o", "--output", default=None)
    gen.set_defaults(func=cmd_gen)

    bench_cmd = sub.add_parser("bench", help="run families through several deciders")
    bench_cmd.add_argument("--family", nargs="+", choices=[f.value for f in Family], required=True)
    bench_cmd.add_argument("--alg", nargs="+", choices=ALGORITHMS, required=True)
    bench_cmd.add_argument("--min-n", type=int, default=0)
    bench_cmd.add_argument("--max-n", type=int, default=6)
    bench_cmd.add_argument("--seeds", type=int, default=10, help="random family: seeds 0..K-1")
    bench_cmd.add_argument("--budget", type=int, default=None)
    bench_cmd.add_argument("--workers", type=int, default=None)
    bench_cmd.add_argument("--csv", default=None)
    bench_cmd.add_argument("--quiet", action="store_true", help="no progress bar")
    bench_cmd.set_defaults(func=cmd_bench)

    verify = sub.add_parser("verify", help="check a substitution against a problem")
    verify.add_argument("problem")
    verify.add_argument("substitution")
    verify.add_argument("--json", action="store_true", help="also print the full report")
    verify.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    level = args.log_level or get_settings().log_level
    logging.basicConfig(level=level.upper(), format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UnificationError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
