"""Command line: solve instances, report LP sizes, generate fixture families."""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

from . import formats
from .bruteforce import CapExceeded
from .formats import ParseError
from .generators import FAMILIES, generate
from .pipeline import DEFAULT_BAG_CAP, RunConfig, ValidationError, gb_stats, plan_stats, solve_gb, solve_npo, solve_po
from .poly import StructuralError, format_rational, to_rational

EXIT_OK = 0
EXIT_USAGE = 2  # argparse's own code for bad flags
EXIT_PARSE = 3
EXIT_VALIDATION = 4
EXIT_INFEASIBLE = 5
EXIT_CAP = 6
EXIT_SOLVER = 7

EXIT_HELP = """exit codes:
  0  success (an optimal solution was found, or the command finished)
  2  bad command-line usage
  3  the instance or decomposition file could not be parsed
  4  the instance or a supplied decomposition failed validation
  5  the LP is infeasible, so the instance has no (tolerance-)feasible point
  6  a bag exceeds the --cap limit on binary variables per bag
  7  the LP solver returned another status (unbounded or unknown)
"""

EMITS = ("lp", "solution", "stats", "mixture")


def _rational(text: str) -> Fraction:
    try:
        return to_rational(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")


def _emit_list(text: str) -> tuple:
    items = tuple(sorted({s.strip() for s in text.split(",") if s.strip()}))
    bad = [s for s in items if s not in EMITS]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown artifact {bad[0]!r}; choose from {', '.join(EMITS)}")
    return items


def _add_run_flags(p: argparse.ArgumentParser, emit: bool = True):
    p.add_argument("instance", help="instance JSON file (po, gb or npo)")
    p.add_argument("--epsilon", type=_rational, default=Fraction(1, 4),
                   help="scaled feasibility tolerance in (0,1), e.g. 1/4 (default 1/4)")
    p.add_argument("--formulation", choices=("lpz", "lpgb"), default="lpz",
                   help="lifted LP formulation (default lpz)")
    p.add_argument("--decomposition", default="minfill",
                   help="minfill, mindegree or file:PATH to a decomposition JSON (default minfill)")
    p.add_argument("--solver", choices=("exact", "float", "bland"), default="exact",
                   help="exact: HiGHS basis certified in rational arithmetic; bland: pure rational "
                        "simplex; float: HiGHS only, no certificate or extraction (default exact)")
    p.add_argument("--cap", type=int, default=DEFAULT_BAG_CAP,
                   help=f"largest bag allowed, in binary variables (default {DEFAULT_BAG_CAP})")
    p.add_argument("--seed", type=int, default=0, help="recorded for reproducibility; the pipeline is deterministic")
    if emit:
        p.add_argument("--emit", type=_emit_list, default=(),
                       help="comma list of artifacts to write: lp, solution, stats, mixture")
        p.add_argument("--out", default=".", help="directory for emitted artifacts (default .)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twlp",
        description="Exact LP formulations for sparse binary and polynomial optimization "
                    "over tree decompositions.",
        epilog=EXIT_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve an instance and report the recovered point",
                       epilog=EXIT_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    _add_run_flags(p)

    p = sub.add_parser("stats", help="build the LP without solving it and report its size",
                       epilog=EXIT_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    _add_run_flags(p, emit=False)

    p = sub.add_parser("generate", help="write a fixture instance",
                       epilog=EXIT_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("family", choices=FAMILIES)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                   help="family parameter, e.g. n=5, a=3,5,8,2, arcs=4, shape=caterpillar, k=3, n_vertices=3")
    p.add_argument("-o", "--output", help="output file (default stdout)")
    return parser


def _config(args) -> RunConfig:
    return RunConfig(epsilon=args.epsilon, formulation=args.formulation, decomposition=args.decomposition,
                     solver=args.solver, emit=getattr(args, "emit", ()), cap=args.cap, seed=args.seed)


def _run(kind, problem, config, run_solver=True):
    if kind == "gb":
        return solve_gb(problem, config, run_solver=run_solver)
    if kind == "po":
        return solve_po(problem, config, run_solver=run_solver)
    return solve_npo(problem, config, run_solver=run_solver)


def _gb_run_of(kind, run):
    if kind == "gb":
        return run
    if kind == "po":
        return run.gb_run
    return run.po_run.gb_run


def _stats(kind, run) -> dict:
    out = {"kind": kind, "lp": gb_stats(_gb_run_of(kind, run))}
    if kind in ("po", "npo"):
        po_run = run if kind == "po" else run.po_run
        out["plan"] = plan_stats(po_run.plan)
        out["po_width"] = po_run.td.width
    if kind == "npo":
        out["theta"] = format_rational(run.theta)
        out["split_vertices"] = len(run.split.trees)
        out["split_max_degree"] = run.split.problem.max_degree
        out["split_width"] = run.split.decomposition.width
    return out


def _value_text(v, exact: bool) -> str:
    if v is None:
        return "-"
    return format_rational(v) if exact else repr(float(v))


def _summary(kind, run) -> list[str]:
    gb_run = _gb_run_of(kind, run)
    exact = gb_run.solution is None or gb_run.solution.exact
    lines = [f"status: {run.status}", f"lp_value: {_value_text(run.lp_value, exact)}"]
    if kind == "gb":
        if run.x is not None:
            lines.append(f"objective: {format_rational(run.objective)}")
            lines.append("x: " + "".join(str(int(v)) for v in run.x))
        return lines
    if kind == "po":
        if run.x is not None:
            lines.append(f"objective: {format_rational(run.objective)}")
            lines.append(f"scaled_violation: {format_rational(run.violation)}")
            names = run.problem.names or [f"x{j}" for j in range(run.problem.n)]
            lines += [f"  {names[j]} = {format_rational(v)}" for j, v in enumerate(run.x)]
        return lines
    lines.append(f"theta: {format_rational(run.theta)}")
    if run.x is not None:
        lines.append(f"objective: {format_rational(run.source.objective(run.x))}")
        worst = max(run.violations.values(), default=Fraction(0))
        lines.append(f"max_scaled_violation: {format_rational(worst)}")
        names = run.source.names or [f"x{j}" for j in range(run.source.n)]
        lines += [f"  {names[j]} = {format_rational(v)}" for j, v in enumerate(run.x)]
    return lines


def _write(path: str, text: str):
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def _emit(kind, run, args, stem: str) -> list[str]:
    os.makedirs(args.out, exist_ok=True)
    base = os.path.join(args.out, stem)
    gb_run = _gb_run_of(kind, run)
    written = []
    if "lp" in args.emit:
        _write(base + ".lp", gb_run.model.to_lp_text())
        written.append(base + ".lp")
    if "solution" in args.emit:
        writer = {"gb": formats.gb_run_to_json, "po": formats.po_run_to_json, "npo": formats.npo_run_to_json}[kind]
        _write(base + ".solution.json", formats.dumps(writer(run)))
        written.append(base + ".solution.json")
    if "stats" in args.emit:
        _write(base + ".stats.json", formats.dumps(_stats(kind, run)))
        written.append(base + ".stats.json")
    if "mixture" in args.emit and gb_run.mixture is not None:
        _write(base + ".mixture.json", formats.dumps(gb_run.mixture.to_json()))
        written.append(base + ".mixture.json")
    return written


def cmd_solve(args) -> int:
    kind, problem = formats.load_instance(args.instance)
    config = _config(args)
    run = _run(kind, problem, config)
    stem = os.path.splitext(os.path.basename(args.instance))[0]
    print(f"instance: {stem} ({kind})")
    for line in _summary(kind, run):
        print(line)
    for path in _emit(kind, run, args, stem):
        print(f"wrote {path}")
    if run.status == "optimal":
        return EXIT_OK
    return EXIT_INFEASIBLE if run.status == "infeasible" else EXIT_SOLVER


def cmd_stats(args) -> int:
    kind, problem = formats.load_instance(args.instance)
    run = _run(kind, problem, _config(args), run_solver=False)
    sys.stdout.write(formats.dumps(_stats(kind, run)))
    return EXIT_OK


def _parse_param(text: str):
    if "=" not in text:
        raise StructuralError(f"parameter {text!r} should be KEY=VALUE")
    key, value = text.split("=", 1)
    key = key.strip()
    if key == "shape":
        return key, value
    if "," in value or key == "a":
        return key, [int(v) for v in value.split(",") if v]
    return key, int(value)


def cmd_generate(args) -> int:
    params = dict(_parse_param(t) for t in args.param)
    try:
        problem = generate(args.family, seed=args.seed, **params)
    except TypeError as exc:
        raise StructuralError(f"invalid parameters for {args.family}: {exc}") from exc
    text = formats.dumps(formats.to_json(problem))
    if args.output:
        _write(args.output, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"solve": cmd_solve, "stats": cmd_stats, "generate": cmd_generate}[args.command]
    try:
        return handler(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except CapExceeded as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except StructuralError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
