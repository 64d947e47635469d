"""End-to-end experiment driver: configs, pipeline, baselines, file outputs.

Every output file embeds the experiment configuration (minus execution-only
details like the thread count), so a run can be reproduced from its artifacts
alone. All randomness flows through counter-based streams derived from the
config seed; re-running a config reproduces every numeric column byte for
byte at any thread count.
"""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass, field

from .errors import StochVcError
from .generators import GeneratorSpec, generate
from .graph import BaseGraph, VertexSet, parse_edge_list
from .mvc import CoverStatistics, cover_statistics, expected_mvc
from .realization import QueryOracle, sample_realization
from .rng import SeedSpec, map_trials
from .seeding import SeedContext, SeedEstimatorConfig, SeedParams
from .solver import (
    RunResult,
    Solution,
    SolverConfig,
    dense_fallback_check,
    run_vertex_cover,
    solve_commit_set,
)

GRAPH_STREAM = 51
RUN_STREAM = 52
SOLVE_STREAM = 53
STATS_STREAM = 54


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: graph source, model parameters, and execution knobs."""

    p: float
    epsilon: float
    seed: int
    trials: int = 100
    graph_file: str | None = None
    generator: GeneratorSpec | None = None
    solver_mode: str = "auto"
    require_seed_vertices: bool = False
    stats_trials: int = 4000
    delta_trials: int = 2000
    gamma_override: float | None = None
    delta_override: float | None = None
    budget_override: int | None = None
    max_n: int = 40
    threads: int = 1
    out_dir: str | None = None
    label: str = "run"

    def provenance(self) -> dict:
        """Config as written into output headers; excludes execution details."""
        d = {
            "label": self.label,
            "p": self.p,
            "epsilon": self.epsilon,
            "seed": self.seed,
            "trials": self.trials,
            "solver_mode": self.solver_mode,
            "require_seed_vertices": self.require_seed_vertices,
            "stats_trials": self.stats_trials,
            "delta_trials": self.delta_trials,
            "gamma_override": self.gamma_override,
            "delta_override": self.delta_override,
            "budget_override": self.budget_override,
            "max_n": self.max_n,
        }
        if self.graph_file is not None:
            d["graph_file"] = self.graph_file
        if self.generator is not None:
            d["generator"] = {"kind": self.generator.kind, "params": self.generator.params}
        return d


def load_graph(config: ExperimentConfig, seed: SeedSpec) -> BaseGraph:
    if config.graph_file is not None:
        if not os.path.exists(config.graph_file):
            raise StochVcError(f"graph file not found: {config.graph_file}")
        with open(config.graph_file, "r", encoding="utf-8") as fh:
            return parse_edge_list(fh.read())
    if config.generator is not None:
        return generate(config.generator, seed.child(GRAPH_STREAM))
    raise StochVcError("config needs a graph_file or a generator")


def write_csv(path: str, fieldnames: list[str], rows: list[dict], provenance: dict):
    buf = io.StringIO()
    buf.write("# " + json.dumps(provenance, sort_keys=True) + "\n")
    writer = csv.DictWriter(buf, fieldnames=fieldnames, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())


def write_json(path: str, payload: dict):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


@dataclass
class PipelineResult:
    """Everything one pipeline run produced, plus the invariant-check verdicts."""

    ok: bool
    summary: dict
    rows: list[dict]
    checks: dict[str, bool]
    solution: Solution
    params: SeedParams
    graph: BaseGraph
    context: SeedContext | None
    run_results: list[RunResult] = field(default_factory=list)
    summary_path: str | None = None
    csv_path: str | None = None


def pipeline_run(config: ExperimentConfig) -> PipelineResult:
    """Full flow: memberships -> bands -> seed loop -> commit solve -> queries.

    When the whole graph fits in the query budget the seed machinery is
    bypassed and the algorithm commits nothing. Exit state is `ok`, true iff
    every internal invariant check passed.
    """
    root = SeedSpec(config.seed)
    g = load_graph(config, root)
    params = SeedParams(
        config.epsilon,
        config.p,
        g.n,
        delta=config.delta_override,
        gamma=config.gamma_override,
        budget_override=config.budget_override,
    )
    fallback = dense_fallback_check(g, config.p, params)
    context: SeedContext | None = None
    stats: CoverStatistics | None = None

    if fallback:
        solution = Solution(
            commit=VertexSet(g.n, 0),
            objective=expected_mvc(
                g,
                config.p,
                mode="auto",
                seed=root.child(STATS_STREAM),
                trials=config.stats_trials,
                max_n=config.max_n,
            ),
            feasible=True,
        )
    else:
        stats = cover_statistics(
            g,
            config.p,
            mode="auto",
            seed=root.child(STATS_STREAM),
            trials=config.stats_trials,
            max_n=config.max_n,
            threads=config.threads,
        )
        context = SeedContext.build(
            g,
            config.p,
            params,
            root,
            seed_config=SeedEstimatorConfig(trials=config.delta_trials),
            threads=config.threads,
            stats=stats,
        )
        solution = solve_commit_set(
            g,
            config.p,
            params,
            SolverConfig(mode=config.solver_mode, max_n=config.max_n),
            root.child(SOLVE_STREAM),
            require=context.seed_vertices if config.require_seed_vertices else None,
            context=context,
        )

    run_seed = root.child(RUN_STREAM)
    allowed = g.edges_within(solution.commit.complement())

    def one_trial(t: int) -> RunResult:
        hidden = sample_realization(g, config.p, run_seed, trial=t)
        oracle = QueryOracle(hidden, allowed, params.query_budget)
        return run_vertex_cover(g, config.p, params, solution.commit, oracle, config.max_n)

    results = map_trials(one_trial, config.trials, config.threads)
    rows = [
        {
            "trial": t,
            "queries_used": res.queries_used,
            "cover_size": res.cover.size(),
            "violations": res.realized_edge_violations,
        }
        for t, res in enumerate(results)
    ]

    checks: dict[str, bool] = {
        "covers_valid": all(r.realized_edge_violations == 0 for r in results),
        "budget_respected": all(r.queries_used <= r.budget for r in results),
        "solution_feasible": solution.feasible
        and allowed.size() <= params.query_budget,
    }
    if context is not None:
        n_band = context.mid_sub.graph.n
        if n_band >= params.seed_length_gate():
            checks["seed_length_bound"] = len(context.sequence) <= params.seed_length_bound(n_band)
        sparsity_ok = True
        for t in range(min(config.trials, 25)):
            sset = context.seed_of_realization(
                sample_realization(g, config.p, run_seed, trial=t)
            )
            if sset.outside_edges > params.sparsity_bound():
                sparsity_ok = False
                break
        checks["seed_set_sparsity"] = sparsity_ok

    mean_cover = sum(r["cover_size"] for r in rows) / max(len(rows), 1)
    mean_queries = sum(r["queries_used"] for r in rows) / max(len(rows), 1)
    if stats is not None:
        opt_mean = stats.opt.mean
    else:
        opt_mean = solution.objective.mean if fallback else None
    summary = {
        "config": config.provenance(),
        "n": g.n,
        "m": g.m,
        "query_budget": params.query_budget,
        "dense_fallback": fallback,
        "commit_set": solution.commit.to_list(),
        "objective_mean": solution.objective.mean,
        "objective_half_width": solution.objective.half_width,
        "opt_mean": opt_mean,
        "mean_cover": mean_cover,
        "mean_queries": mean_queries,
        "ratio": (mean_cover / opt_mean) if opt_mean else None,
        "seed_vertices": context.seed_vertices.to_list() if context else [],
        "band_sizes": {
            "high": context.bands.high.size() if context else None,
            "mid": context.bands.mid.size() if context else None,
            "low": context.bands.low.size() if context else None,
        },
        "checks": checks,
    }
    ok = all(checks.values())

    summary_path = csv_path = None
    if config.out_dir is not None:
        os.makedirs(config.out_dir, exist_ok=True)
        summary_path = os.path.join(config.out_dir, f"{config.label}_summary.json")
        csv_path = os.path.join(config.out_dir, f"{config.label}_trials.csv")
        write_json(summary_path, summary)
        write_csv(
            csv_path,
            ["trial", "queries_used", "cover_size", "violations"],
            rows,
            config.provenance(),
        )
    return PipelineResult(
        ok=ok,
        summary=summary,
        rows=rows,
        checks=checks,
        solution=solution,
        params=params,
        graph=g,
        context=context,
        run_results=results,
        summary_path=summary_path,
        csv_path=csv_path,
    )


def compare_baselines(
    g: BaseGraph,
    p: float,
    epsilon: float,
    seed: SeedSpec,
    trials: int,
    threads: int = 1,
    budget_override: int | None = None,
    max_n: int = 40,
) -> list[dict]:
    """Mean cover size and query count for fixed strategies vs the solver.

    Strategies: query-all (commit nothing; needs the whole graph within
    budget), commit-all, commit-high (the high membership band), and the
    solver's choice. Ratios are against the exact expected optimum when the
    edge count allows enumeration, else a Monte-Carlo estimate.
    """
    params = SeedParams(epsilon, p, g.n, budget_override=budget_override)
    opt = expected_mvc(
        g, p, mode="auto", seed=seed.child(STATS_STREAM), trials=max(trials, 2000),
        max_n=max_n,
    )
    stats = cover_statistics(
        g, p, mode="auto", seed=seed.child(STATS_STREAM), trials=2000, max_n=max_n
    )
    from .seeding import partition_by_membership

    bands = partition_by_membership([e.mean for e in stats.vertex], epsilon)
    strategies: list[tuple[str, VertexSet | None]] = [
        ("query-all", VertexSet(g.n, 0)),
        ("commit-all", g.all_vertices()),
        ("commit-high", bands.high),
    ]
    solution = solve_commit_set(
        g, p, params, SolverConfig(max_n=max_n), seed.child(SOLVE_STREAM)
    )
    strategies.append(("solver", solution.commit))

    run_seed = seed.child(RUN_STREAM)
    rows = []
    for name, commit in strategies:
        allowed = g.edges_within(commit.complement())
        feasible = allowed.size() <= params.query_budget
        if not feasible:
            rows.append(
                {
                    "strategy": name,
                    "feasible": False,
                    "mean_cover": "",
                    "mean_queries": "",
                    "ratio": "",
                }
            )
            continue

        def one_trial(t: int, commit=commit, allowed=allowed) -> tuple[int, int]:
            hidden = sample_realization(g, p, run_seed, trial=t)
            oracle = QueryOracle(hidden, allowed, params.query_budget)
            res = run_vertex_cover(g, p, params, commit, oracle, max_n)
            return res.cover.size(), res.queries_used

        outcomes = map_trials(one_trial, trials, threads)
        mean_cover = sum(c for c, _ in outcomes) / trials
        mean_queries = sum(q for _, q in outcomes) / trials
        rows.append(
            {
                "strategy": name,
                "feasible": True,
                "mean_cover": mean_cover,
                "mean_queries": mean_queries,
                "ratio": mean_cover / opt.mean if opt.mean else "",
            }
        )
    return rows
