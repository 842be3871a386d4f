"""Command-line entry point.

Exit codes: 0 success, 1 instance-level failure (threshold not met, a
verification FAIL, a repair violation), 2 usage or input error, 3 resource
cap or timeout.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import graphio
from .errors import GadgetForgeError, InputError, RepairViolation, ResourceLimitError
from .generators import gen_grid, gen_planted_clique, gen_random_degree_bounded, gen_torus
from .graph import CliqueInstance, DksInstance, Solution, max_degree
from .reductions import (
    DEFAULT_MAX_VERTICES,
    ReductionTrace,
    lift_solution,
    reduce_chain,
    reduce_clique_to_dks5,
    reduce_full_chain,
)
from .repair import repair
from .solver import DEFAULT_BUDGET_SECS, solve, solve_threshold
from . import verify as V

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_RESOURCE = 0, 1, 2, 3

_DEGREE = {"deg6": 6, "deg5": 5, "deg4": 4}


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def cmd_gen(args) -> int:
    planted = None
    if args.kind == "grid":
        g = gen_grid(args.n)
    elif args.kind == "torus":
        g = gen_torus(args.n)
    elif args.kind == "random":
        g = gen_random_degree_bounded(args.n, args.d_max, args.m, args.seed)
    else:
        g, planted = gen_planted_clique(args.n, args.s, args.m, args.seed)
    _emit(graphio.emit_graph(g), args.output)
    if planted is not None:
        print("planted " + " ".join(str(v + 1) for v in planted), file=sys.stderr if not args.output else sys.stdout)
    return EXIT_OK


def cmd_stats(args) -> int:
    g = graphio.read_graph(args.input)
    hist = {}
    for d in g.degrees.tolist():
        hist[d] = hist.get(d, 0) + 1
    print(f"vertices {g.n}")
    print(f"edges {g.m}")
    print(f"max_degree {max_degree(g)}")
    print("degree_histogram " + " ".join(f"{d}:{c}" for d, c in sorted(hist.items())))
    return EXIT_OK


def cmd_reduce(args) -> int:
    g = graphio.read_graph(args.input)
    target = args.to
    if args.source == "clique":
        if args.s is None:
            raise InputError("--s is required when reducing from clique")
        inst = CliqueInstance(g, args.s)
        if target in (None, "deg5"):
            out, threshold, trace = reduce_clique_to_dks5(inst, max_vertices=args.max_vertices)
            thresholds = [threshold]
        elif target == "deg3":
            out, thresholds, trace = reduce_full_chain(inst, max_vertices=args.max_vertices)
        else:
            raise InputError("from clique the chain can stop at deg5 or deg3")
    else:
        if args.k is None:
            raise InputError("--k is required when reducing a densest-subgraph instance")
        inst = DksInstance(g, args.k, degree_bound=_DEGREE[args.source])
        if args.source == "deg4":
            if target not in (None, "deg3"):
                raise InputError("from deg4 the only target is deg3")
            kinds = ("cycle",)
        else:
            kinds = ("fence",) if target in (None, "deg4") else ("fence", "cycle")
            if target == "deg5":
                raise InputError(f"from {args.source} the target must be deg4 or deg3")
        out, trace = reduce_chain(inst, kinds, max_vertices=args.max_vertices)
        thresholds = None
    if args.output:
        graphio.write_graph(out.graph, args.output)
    if args.trace:
        trace.write(args.trace)
    print(f"vertices {out.graph.n}")
    print(f"edges {out.graph.m}")
    print(f"max_degree {max_degree(out.graph)}")
    print(f"k {out.k}")
    if thresholds is not None:
        print("threshold " + " ".join(str(t) for t in thresholds))
    return EXIT_OK


def _print_solution(sol: Solution) -> None:
    print(f"value {sol.edge_count}")
    print("vertices " + " ".join(str(v + 1) for v in sol.vertices))


def cmd_solve(args) -> int:
    g = graphio.read_graph(args.input)
    inst = DksInstance(g, args.k)
    if args.threshold is not None:
        sol = solve_threshold(inst, args.threshold, solver=args.solver, budget_secs=args.budget_secs)
        if sol is None:
            print(f"no solution with at least {args.threshold} edges")
            return EXIT_FAIL
    else:
        sol = solve(inst, solver=args.solver, budget_secs=args.budget_secs)
    _print_solution(sol)
    if args.output:
        graphio.write_solution(sol, args.output)
    return EXIT_OK


def cmd_repair(args) -> int:
    g = graphio.read_graph(args.input)
    trace = ReductionTrace.read(args.trace)
    sol = graphio.read_solution(args.solution)
    sol.check(g)
    try:
        fixed, report = repair(g, trace, sol, level=args.level, strict=args.strict)
    except RepairViolation as exc:
        print(f"repair aborted: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if args.output:
        graphio.write_solution(fixed, args.output)
    if args.report:
        Path(args.report).write_text(_dump({"solution": graphio.solution_to_dict(fixed), "report": report.to_dict()}))
    print(f"edges {report.initial_edges} -> {report.final_edges}")
    print(f"moves {len(report.moves)} rounds {report.iterations} violations {len(report.violations)}")
    return EXIT_FAIL if report.violations else EXIT_OK


def cmd_lift(args) -> int:
    trace = ReductionTrace.read(args.trace)
    sol = graphio.read_solution(args.solution)
    level = len(trace.steps) - 1 if args.level is None else args.level
    lifted = lift_solution(trace, level, sol)
    _print_solution(lifted)
    step = trace.steps[level]
    if step.kind == "torus":
        padding = [v + 1 for v in lifted.vertices if v >= step.original_n]
        if padding:
            print("padding_vertices " + " ".join(map(str, padding)))
    if args.output:
        graphio.write_solution(lifted, args.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    suite = args.suite
    if suite == "grid-cut":
        report = V.verify_grid_cut_fact(args.n, samples=args.samples, seed=args.seed)
    elif suite == "torus-grid":
        report = V.verify_torus_dominates_grid(args.n)
    elif suite == "fence-claim":
        report = V.verify_fence_claim(external=args.external)
    elif suite in ("fence-equiv", "cycle-equiv"):
        level = suite.split("-")[0]
        gen = V.all_graphs if level == "fence" else V.connected_graphs
        corpus = [(g, k) for n in range(1, args.n + 1) for g in gen(n) for k in range(1, n + 1)]
        report = V.verify_reduction_equivalence(level, corpus, budget_secs=args.budget_secs)
    else:
        if not (args.input and args.trace and args.solution):
            raise InputError("cut-intertorus needs --input, --trace and --solution")
        g = graphio.read_graph(args.input)
        report = V.verify_cut_vs_intertorus(g, ReductionTrace.read(args.trace), graphio.read_solution(args.solution))
    text = _dump(report.to_dict())
    if args.output:
        Path(args.output).write_text(text)
    print(f"{report.check} {report.status}")
    return EXIT_OK if report.passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gadgetforge", description="Degree-reducing reductions for Densest-k-Subgraph.")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("gen", help="generate a graph")
    q.add_argument("--kind", choices=("grid", "torus", "random", "planted"), required=True)
    q.add_argument("--n", type=int, required=True, help="side length (grid/torus) or vertex count")
    q.add_argument("--d-max", type=int, default=3)
    q.add_argument("--m", type=int, default=0, help="edge count (random) or extra edges (planted)")
    q.add_argument("--s", type=int, default=3, help="planted clique size")
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--output")
    q.set_defaults(func=cmd_gen)

    q = sub.add_parser("stats", help="print size and degree statistics")
    q.add_argument("--input", required=True)
    q.set_defaults(func=cmd_stats)

    q = sub.add_parser("reduce", help="apply reductions")
    q.add_argument("--from", dest="source", choices=("clique", "deg6", "deg5", "deg4"), required=True)
    q.add_argument("--to", choices=("deg5", "deg4", "deg3"))
    q.add_argument("--input", required=True)
    q.add_argument("--s", type=int)
    q.add_argument("--k", type=int)
    q.add_argument("--output")
    q.add_argument("--trace")
    q.add_argument("--max-vertices", type=int, default=DEFAULT_MAX_VERTICES)
    q.set_defaults(func=cmd_reduce)

    q = sub.add_parser("solve", help="exact densest-k-subgraph")
    q.add_argument("--input", required=True)
    q.add_argument("--k", type=int, required=True)
    q.add_argument("--solver", choices=("brute", "bb"), default="bb")
    q.add_argument("--budget-secs", type=float, default=DEFAULT_BUDGET_SECS)
    q.add_argument("--threshold", type=int)
    q.add_argument("--output")
    q.set_defaults(func=cmd_solve)

    q = sub.add_parser("repair", help="make a solution gadget-complete")
    q.add_argument("--input", required=True, help="reduced graph")
    q.add_argument("--trace", required=True)
    q.add_argument("--solution", required=True)
    q.add_argument("--level", type=int)
    q.add_argument("--output")
    q.add_argument("--report")
    q.add_argument("--strict", action="store_true", help="abort on the first violation")
    q.set_defaults(func=cmd_repair)

    q = sub.add_parser("lift", help="map a gadget-complete solution one level down")
    q.add_argument("--trace", required=True)
    q.add_argument("--solution", required=True)
    q.add_argument("--level", type=int)
    q.add_argument("--output")
    q.set_defaults(func=cmd_lift)

    q = sub.add_parser("verify", help="run a verification suite")
    q.add_argument(
        "--suite",
        choices=("grid-cut", "torus-grid", "fence-claim", "fence-equiv", "cycle-equiv", "cut-intertorus"),
        required=True,
    )
    q.add_argument("--n", type=int, default=3, help="grid side, or max base vertex count for *-equiv")
    q.add_argument("--samples", type=int, default=2000)
    q.add_argument("--seed", type=int, default=V.SAMPLE_SEED)
    q.add_argument("--external", action="store_true", help="fence-claim: include outside neighbours")
    q.add_argument("--budget-secs", type=float, default=DEFAULT_BUDGET_SECS)
    q.add_argument("--input")
    q.add_argument("--trace")
    q.add_argument("--solution")
    q.add_argument("--output")
    q.set_defaults(func=cmd_verify)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except GadgetForgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
