"""Command-line entry point: run / bench / equiv / gen.

Exit codes: 0 success, 1 algorithmic failure (an equivalence counterexample
or a no-path run), 2 usage error.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path as FsPath

from .baselines import check_equivalence_pair, gen_equiv_problem
from .engine import EngineOptions, run_lazysp
from .experiments import (
    PartConnConfig,
    UnitSquareConfig,
    gen_partconn,
    gen_unitsquare,
    make_selector,
    records_to_csv,
    run_bench,
    summarize,
    summary_to_json,
)
from .graph import ProblemInstance, Query, parse_graph_file, write_graph_file
from .partition import graph_signature, load_z_cache, store_z_cache, z_init
from .selectors import SELECTOR_KINDS


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lazysp")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="one lazy search run on a graph file")
    run_p.add_argument("--graph", required=True, help="graph file path")
    run_p.add_argument("--start", type=int, required=True)
    run_p.add_argument("--goal", type=int, required=True)
    run_p.add_argument("--selector", required=True, choices=SELECTOR_KINDS)
    run_p.add_argument("--beta", type=float, default=None, help="partition temperature")
    run_p.add_argument("--ws-samples", type=int, default=1000)
    run_p.add_argument("--ws-collision-prob", type=float, default=0.1)
    run_p.add_argument("--seed", type=int, default=0)
    run_p.add_argument("--trace", default=None, help="write the iteration log here")
    run_p.add_argument("--immediate-expansion", action="store_true")
    run_p.add_argument("--no-infinite-early-return", action="store_true")
    run_p.add_argument("--z-cache", default=None, help="estimate-only Z cache file")

    bench_p = sub.add_parser("bench", help="benchmark selectors on a problem class")
    bench_p.add_argument("--class", dest="problem_class", required=True,
                         choices=("partconn", "unitsquare"))
    bench_p.add_argument("--selectors", default=",".join(SELECTOR_KINDS),
                         help="comma-separated selector kinds")
    bench_p.add_argument("--instances", type=int, default=None)
    bench_p.add_argument("--seed", type=int, default=0)
    bench_p.add_argument("--jobs", type=int, default=1)
    bench_p.add_argument("--beta", type=float, default=None)
    bench_p.add_argument("--ws-samples", type=int, default=None)
    bench_p.add_argument("--out", default=None, help="CSV output path")
    bench_p.add_argument("--summary", default=None, help="summary JSON path")
    bench_p.add_argument("--no-timings", action="store_true",
                         help="blank timing columns for byte-stable output")

    equiv_p = sub.add_parser("equiv", help="differential equivalence tests")
    equiv_p.add_argument("--pair", required=True,
                         choices=("expand-astar", "forward-lwastar"))
    equiv_p.add_argument("--graphs", type=int, default=200)
    equiv_p.add_argument("--max-vertices", type=int, default=12)
    equiv_p.add_argument("--seed", type=int, default=0)
    equiv_p.add_argument("--counterexample", default=None,
                         help="write a failing graph file here")

    gen_p = sub.add_parser("gen", help="write a generated instance as a graph file")
    gen_p.add_argument("--class", dest="problem_class", required=True,
                       choices=("partconn", "unitsquare"))
    gen_p.add_argument("--seed", type=int, default=0)
    gen_p.add_argument("--query-seed", type=int, default=None)
    gen_p.add_argument("--obstacle-seed", type=int, default=None)
    gen_p.add_argument("--out", required=True)
    return parser


def _fmt_len(x: float) -> str:
    return "inf" if x == math.inf else repr(x)


def _cmd_run(args) -> int:
    try:
        text = FsPath(args.graph).read_text()
    except OSError as exc:
        print(f"error: cannot read graph file: {exc}", file=sys.stderr)
        return 2
    g, estimates, true_weights = parse_graph_file(text)
    inst = ProblemInstance(g, Query(args.start, args.goal), true_weights, estimates)
    inst.query.validate(g)

    z0 = None
    if args.selector == "partition" and args.z_cache:
        sig = graph_signature(g, estimates)
        z0 = load_z_cache(args.z_cache, sig, args.beta)
        if z0 is None:
            z0 = z_init(g, args.beta, inst.fresh_state())
            store_z_cache(args.z_cache, z0, sig)

    selector = make_selector(
        args.selector,
        inst,
        beta=args.beta,
        ws_samples=args.ws_samples,
        ws_collision_prob=args.ws_collision_prob,
        seed=args.seed,
        z0=z0,
    )
    opts = EngineOptions(
        immediate_expansion=args.immediate_expansion,
        infinite_early_return=not args.no_infinite_early_return,
    )
    result, trace = run_lazysp(g, inst.query, inst.oracle(), estimates, selector, opts)
    if args.trace:
        FsPath(args.trace).write_text(trace.to_jsonl())
    if result.path is None:
        print("no finite path")
        print(f"evaluations: {trace.edges_evaluated}")
        return 1
    print("path vertices:", " ".join(str(v) for v in result.path.vertices))
    print("path edges:", " ".join(str(e) for e in result.path.edges))
    print(f"length: {_fmt_len(result.length)}")
    print(f"evaluations: {trace.edges_evaluated}")
    return 0


def _cmd_bench(args) -> int:
    selectors = tuple(s.strip() for s in args.selectors.split(",") if s.strip())
    for s in selectors:
        if s not in SELECTOR_KINDS:
            raise _Usage(f"unknown selector {s!r}")
    if args.problem_class == "partconn":
        cfg = PartConnConfig()
    else:
        cfg = UnitSquareConfig()
    if args.beta is not None:
        cfg.beta = args.beta
    if args.ws_samples is not None:
        cfg.ws_samples = args.ws_samples
    records = run_bench(
        args.problem_class,
        selectors,
        config=cfg,
        seed=args.seed,
        n_instances=args.instances,
        jobs=args.jobs,
    )
    csv_text = records_to_csv(records, timings=not args.no_timings)
    out = args.out or f"bench-{args.problem_class}.csv"
    FsPath(out).write_text(csv_text)
    summary = summarize(records)
    summary_path = args.summary or f"bench-{args.problem_class}-summary.json"
    FsPath(summary_path).write_text(summary_to_json(summary))
    for cls, per_selector in summary.items():
        for kind in selectors:
            stats = per_selector[kind]
            print(f"{cls} {kind}: mean {stats['mean']:.2f} stderr {stats['stderr']:.2f} (n={stats['n']})")
    print(f"wrote {out} and {summary_path}")
    return 0


def _cmd_equiv(args) -> int:
    for i in range(args.graphs):
        problem = gen_equiv_problem((args.seed, i), max_vertices=args.max_vertices)
        mismatch = check_equivalence_pair(problem, args.pair)
        if mismatch is not None:
            print(f"counterexample on graph {i}: {mismatch.detail}")
            print(f"  lazy search: {mismatch.lazysp}")
            print(f"  vertex algorithm: {mismatch.vertex_algorithm}")
            text = write_graph_file(problem.graph, problem.estimates, problem.true_weights)
            if args.counterexample:
                FsPath(args.counterexample).write_text(text)
                print(f"  graph written to {args.counterexample}")
            else:
                sys.stdout.write(text)
            print(f"  query: {problem.query.start} -> {problem.query.goal}")
            return 1
    print(f"{args.pair}: {args.graphs} graphs, no divergence")
    return 0


def _cmd_gen(args) -> int:
    if args.problem_class == "partconn":
        inst = gen_partconn(args.seed)
    else:
        qseed = args.query_seed if args.query_seed is not None else args.seed
        oseed = args.obstacle_seed if args.obstacle_seed is not None else args.seed + 1
        inst = gen_unitsquare(qseed, oseed)
    FsPath(args.out).write_text(
        write_graph_file(inst.graph, inst.estimates, inst.true_weights)
    )
    print(f"wrote {args.out}")
    print(f"suggested query: --start {inst.query.start} --goal {inst.query.goal}")
    return 0


class _Usage(Exception):
    pass


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "run" and args.selector == "partition" and args.beta is None:
        parser.error("--beta is required for the partition selector")
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "bench":
            return _cmd_bench(args)
        if args.command == "equiv":
            return _cmd_equiv(args)
        if args.command == "gen":
            return _cmd_gen(args)
    except _Usage as exc:
        parser.error(str(exc))
    raise AssertionError("unhandled command")


if __name__ == "__main__":
    sys.exit(main())
