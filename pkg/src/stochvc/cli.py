"""Command-line entry points for experiments and report generation."""

from __future__ import annotations

import argparse
import json
import os
import sys

from .errors import StochVcError
from .generators import GeneratorSpec, generate
from .graph import parse_edge_list, serialize_edge_list
from .mvc import cover_statistics
from .pipeline import (
    ExperimentConfig,
    compare_baselines,
    pipeline_run,
    write_csv,
)
from .rng import SeedSpec
from .seeding import SeedContext, SeedEstimatorConfig, SeedParams
from .structural import empirical_tail, greedy_ordering, structural_set, verify_structural


def _add_common(sub: argparse.ArgumentParser):
    sub.add_argument("--seed", type=int, default=0, help="master seed (u64)")
    sub.add_argument("--trials", type=int, default=1000, help="Monte-Carlo trials")
    sub.add_argument("--threads", type=int, default=1, help="worker threads")
    sub.add_argument("--out-dir", default=None, help="directory for output files")


def _load_graph(path: str):
    if not os.path.exists(path):
        raise StochVcError(f"graph file not found: {path}")
    with open(path, "r", encoding="utf-8") as fh:
        return parse_edge_list(fh.read())


def _cmd_generate(args) -> int:
    params = {}
    for key in ("n", "density", "a", "b", "d", "k", "spokes", "pad_pairs"):
        value = getattr(args, key.replace("-", "_"), None)
        if value is not None:
            params[key] = value
    spec = GeneratorSpec(args.kind, params)
    g = generate(spec, SeedSpec(args.seed))
    text = serialize_edge_list(g)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {g.n} vertices / {g.m} edges to {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_estimate_opt(args) -> int:
    g = _load_graph(args.graph)
    stats = cover_statistics(
        g,
        args.p,
        mode=args.mode,
        seed=SeedSpec(args.seed),
        trials=args.trials,
        threads=args.threads,
        max_n=args.max_n,
    )
    rows = [
        {
            "vertex": v,
            "membership_mean": est.mean,
            "half_width": est.half_width,
        }
        for v, est in enumerate(stats.vertex)
    ]
    rows.append(
        {
            "vertex": "opt",
            "membership_mean": stats.opt.mean,
            "half_width": stats.opt.half_width,
        }
    )
    provenance = {
        "command": "estimate-opt",
        "graph": args.graph,
        "p": args.p,
        "mode": args.mode,
        "seed": args.seed,
        "trials": args.trials,
    }
    if args.out_dir:
        os.makedirs(args.out_dir, exist_ok=True)
        path = os.path.join(args.out_dir, "membership.csv")
        write_csv(path, ["vertex", "membership_mean", "half_width"], rows, provenance)
        print(f"wrote {path}")
    else:
        for row in rows:
            print(f"{row['vertex']},{row['membership_mean']},{row['half_width']}")
    return 0


def _cmd_seed_trace(args) -> int:
    g = _load_graph(args.graph)
    params = SeedParams(
        args.epsilon, args.p, g.n, delta=args.delta, gamma=args.gamma
    )
    context = SeedContext.build(
        g,
        args.p,
        params,
        SeedSpec(args.seed),
        stats_trials=args.trials,
        seed_config=SeedEstimatorConfig(trials=args.delta_trials),
        threads=args.threads,
    )
    lines = []
    for i, step in enumerate(context.sequence.steps):
        record = {
            "iteration": i,
            "vertex": context.mid_sub.vertices[step.vertex],
            "estimate": step.estimate,
            "undecided_mean": step.undecided_mean,
            "candidates": step.candidates,
        }
        lines.append(json.dumps(record, sort_keys=True))
    for line in lines:
        print(line)
    if not lines:
        print(json.dumps({"iterations": 0, "seed_vertices": []}, sort_keys=True))
    if args.out_dir:
        os.makedirs(args.out_dir, exist_ok=True)
        path = os.path.join(args.out_dir, "seed_trace.jsonl")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + ("\n" if lines else ""))
        print(f"wrote {path}")
    return 0


def _cmd_run_vc(args) -> int:
    config = ExperimentConfig(
        p=args.p,
        epsilon=args.epsilon,
        seed=args.seed,
        trials=args.trials,
        graph_file=args.graph,
        solver_mode={
            "exact": "exact_enumeration",
            "candidates": "candidate_family",
            "auto": "auto",
        }[args.mode],
        require_seed_vertices=args.require_seed_vertices,
        gamma_override=args.gamma,
        delta_override=args.delta,
        budget_override=args.budget,
        threads=args.threads,
        out_dir=args.out_dir,
        max_n=args.max_n,
        label=args.label,
    )
    result = pipeline_run(config)
    print(json.dumps(result.summary, sort_keys=True))
    if result.summary_path:
        print(f"wrote {result.summary_path} and {result.csv_path}")
    return 0 if result.ok else 1


def _cmd_structural_check(args) -> int:
    g = _load_graph(args.graph)
    seed = SeedSpec(args.seed)
    ordering = greedy_ordering(g, args.p, args.trials_per_step, seed.child(1))
    sset = structural_set(g, args.p, ordering)
    from .mvc import expected_mvc

    opt = expected_mvc(
        g, args.p, mode="auto", seed=seed.child(2), trials=args.trials, max_n=args.max_n
    )
    report = verify_structural(g, args.p, sset, opt)
    row = {
        "n": g.n,
        "m": g.m,
        "opt_mean": opt.mean,
        "opt_half_width": opt.half_width,
        "set_size": report.set_size,
        "size_bound": report.size_bound,
        "outside_edges": report.outside_edges,
        "edge_bound": report.edge_bound,
        "size_ok": report.size_ok,
        "edges_ok": report.edges_ok,
    }
    provenance = {
        "command": "structural-check",
        "graph": args.graph,
        "p": args.p,
        "seed": args.seed,
        "trials": args.trials,
        "trials_per_step": args.trials_per_step,
    }
    if args.out_dir:
        os.makedirs(args.out_dir, exist_ok=True)
        path = os.path.join(args.out_dir, "structural.csv")
        write_csv(path, list(row.keys()), [row], provenance)
        print(f"wrote {path}")
    print(json.dumps(row, sort_keys=True))
    return 0 if report.size_ok and report.edges_ok else 1


def _cmd_concentration(args) -> int:
    g = _load_graph(args.graph)
    report = empirical_tail(
        g,
        args.p,
        trials=args.trials,
        seed=SeedSpec(args.seed),
        max_n=args.max_n,
        threads=args.threads,
        grid_points=args.t_grid,
    )
    rows = [
        {
            "t": pt.t,
            "empirical": pt.empirical,
            "std_err": pt.std_err,
            "bernstein_bound": pt.bernstein,
            "gaussian_bound": "" if pt.gaussian is None else pt.gaussian,
        }
        for pt in report.points
    ]
    provenance = {
        "command": "concentration",
        "graph": args.graph,
        "p": args.p,
        "seed": args.seed,
        "trials": args.trials,
        "opt_mean": report.opt_est.mean,
    }
    if args.out_dir:
        os.makedirs(args.out_dir, exist_ok=True)
        path = os.path.join(args.out_dir, "concentration.csv")
        write_csv(
            path,
            ["t", "empirical", "std_err", "bernstein_bound", "gaussian_bound"],
            rows,
            provenance,
        )
        print(f"wrote {path}")
    else:
        for row in rows:
            print(json.dumps(row, sort_keys=True))
    return 0


def _cmd_compare(args) -> int:
    g = _load_graph(args.graph)
    rows = compare_baselines(
        g,
        args.p,
        args.epsilon,
        SeedSpec(args.seed),
        trials=args.trials,
        threads=args.threads,
        budget_override=args.budget,
        max_n=args.max_n,
    )
    provenance = {
        "command": "compare",
        "graph": args.graph,
        "p": args.p,
        "epsilon": args.epsilon,
        "seed": args.seed,
        "trials": args.trials,
    }
    if args.out_dir:
        os.makedirs(args.out_dir, exist_ok=True)
        path = os.path.join(args.out_dir, "compare.csv")
        write_csv(
            path,
            ["strategy", "feasible", "mean_cover", "mean_queries", "ratio"],
            rows,
            provenance,
        )
        print(f"wrote {path}")
    for row in rows:
        print(json.dumps(row, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stochvc",
        description="Stochastic vertex cover experiments in the edge-query model",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("generate", help="emit a generated graph as an edge list")
    sub.add_argument("--kind", required=True)
    sub.add_argument("--n", type=int)
    sub.add_argument("--density", type=float)
    sub.add_argument("--a", type=int)
    sub.add_argument("--b", type=int)
    sub.add_argument("--d", type=int)
    sub.add_argument("--k", type=int)
    sub.add_argument("--spokes", type=int)
    sub.add_argument("--pad-pairs", dest="pad_pairs", type=int)
    sub.add_argument("--out", default=None)
    sub.add_argument("--seed", type=int, default=0)
    sub.set_defaults(func=_cmd_generate)

    sub = subs.add_parser("estimate-opt", help="per-vertex cover membership and opt")
    sub.add_argument("--graph", required=True)
    sub.add_argument("--p", type=float, required=True)
    sub.add_argument("--mode", choices=["auto", "exact", "monte_carlo"], default="auto")
    sub.add_argument("--max-n", type=int, default=40)
    _add_common(sub)
    sub.set_defaults(func=_cmd_estimate_opt)

    sub = subs.add_parser("seed-trace", help="trace the greedy seed-vertex loop")
    sub.add_argument("--graph", required=True)
    sub.add_argument("--p", type=float, required=True)
    sub.add_argument("--epsilon", type=float, required=True)
    sub.add_argument("--gamma", type=float, default=None)
    sub.add_argument("--delta", type=float, default=None)
    sub.add_argument("--delta-trials", dest="delta_trials", type=int, default=2000)
    _add_common(sub)
    sub.set_defaults(func=_cmd_seed_trace)

    sub = subs.add_parser("run-vc", help="full pipeline: solve, query, verify")
    sub.add_argument("--graph", required=True)
    sub.add_argument("--p", type=float, required=True)
    sub.add_argument("--epsilon", type=float, required=True)
    sub.add_argument("--mode", choices=["exact", "candidates", "auto"], default="auto")
    sub.add_argument("--budget", type=int, default=None, help="query budget override")
    sub.add_argument("--gamma", type=float, default=None)
    sub.add_argument("--delta", type=float, default=None)
    sub.add_argument("--require-seed-vertices", action="store_true")
    sub.add_argument("--max-n", type=int, default=40)
    sub.add_argument("--label", default="run")
    _add_common(sub)
    sub.set_defaults(func=_cmd_run_vc)

    sub = subs.add_parser("structural-check", help="ordering-based structural inequalities")
    sub.add_argument("--graph", required=True)
    sub.add_argument("--p", type=float, required=True)
    sub.add_argument("--trials-per-step", dest="trials_per_step", type=int, default=500)
    sub.add_argument("--max-n", type=int, default=40)
    _add_common(sub)
    sub.set_defaults(func=_cmd_structural_check)

    sub = subs.add_parser("concentration", help="empirical tail vs theoretical bounds")
    sub.add_argument("--graph", required=True)
    sub.add_argument("--p", type=float, required=True)
    sub.add_argument("--t-grid", dest="t_grid", type=int, default=20)
    sub.add_argument("--max-n", type=int, default=40)
    _add_common(sub)
    sub.set_defaults(func=_cmd_concentration)

    sub = subs.add_parser("compare", help="baseline strategies vs the solver")
    sub.add_argument("--graph", required=True)
    sub.add_argument("--p", type=float, required=True)
    sub.add_argument("--epsilon", type=float, required=True)
    sub.add_argument("--budget", type=int, default=None)
    sub.add_argument("--max-n", type=int, default=40)
    _add_common(sub)
    sub.set_defaults(func=_cmd_compare)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except StochVcError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
