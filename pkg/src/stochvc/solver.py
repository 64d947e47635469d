"""The non-adaptive cover algorithm: commit-set optimization and query phase.

The algorithm commits to a vertex set S up front, queries exactly the edges
not touching S, and returns S plus a minimum cover of the revealed remainder.
S is chosen to minimize the expected final cover size subject to the
remainder containing at most the query budget's worth of edges.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CapacityError, ContractError, ParameterError
from .graph import BaseGraph, VertexSet
from .mvc import (
    BRANCH_BOUND_VERTEX_CAP,
    EXACT_EXPECTATION_EDGE_CAP,
    EdgeMaskCoverTable,
    ProbEstimate,
    _CoverSolver,
    mvc_exact,
    mvc_size,
)
from .realization import QueryOracle, Realization, sample_realization
from .rng import SeedSpec
from .seeding import SeedContext, SeedParams

RANK_STREAM = 21
FINAL_STREAM = 22
BOUNDARY_STREAM = 23
PAIR_STREAM = 24


@dataclass(frozen=True)
class SolverConfig:
    """Knobs for the commit-set search."""

    mode: str = "auto"  # exact_enumeration | candidate_family | auto
    trials_per_candidate: int = 200
    enumeration_cap: int = 20  # on n, exact_enumeration mode
    exact_expectation_cap: int = EXACT_EXPECTATION_EDGE_CAP  # on m
    reestimate_factor: int = 4
    max_seed_enum: int = 12
    boundary_samples: int = 4
    sampled_pairs: int = 200
    include_peeling: bool = True
    max_n: int = BRANCH_BOUND_VERTEX_CAP


@dataclass(frozen=True)
class Solution:
    """Chosen commit set with its objective estimate; always feasible."""

    commit: VertexSet
    objective: ProbEstimate
    feasible: bool


@dataclass(frozen=True)
class RunResult:
    """Outcome of one query-phase run against a hidden realization."""

    cover: VertexSet
    queries_used: int
    budget: int
    realized_edge_violations: int


def cover_objective(commit: VertexSet, r: Realization, max_n: int = BRANCH_BOUND_VERTEX_CAP) -> int:
    """|commit| plus the minimum-cover size of the realization outside it."""
    return commit.size() + mvc_size(r, active=commit.complement(), max_n=max_n)


def _lex_key(s: VertexSet) -> tuple[int, ...]:
    return tuple(s.to_list())


def _exact_objective(
    g: BaseGraph,
    p: float,
    commit_bits: int,
    table: EdgeMaskCoverTable,
    pow_p: list[float],
    pow_q: list[float],
) -> float:
    """Exact expected objective via enumeration of the outside edge subsets."""
    outside = VertexSet(g.n, ((1 << g.n) - 1) ^ commit_bits)
    emask = g.edges_within(outside).bits
    t = emask.bit_count()
    total = 0.0
    sub = emask
    while True:
        k = sub.bit_count()
        total += pow_p[k] * pow_q[t - k] * table.size(sub)
        if sub == 0:
            break
        sub = (sub - 1) & emask
    return commit_bits.bit_count() + total


def solve_commit_set(
    g: BaseGraph,
    p: float,
    params: SeedParams,
    config: SolverConfig | None = None,
    seed: SeedSpec | None = None,
    require: VertexSet | None = None,
    context: SeedContext | None = None,
) -> Solution:
    """Minimize |S| + E[min-cover outside S] under the sparsity budget.

    exact_enumeration scans every S (expectations exact when m allows, CRN
    Monte-Carlo otherwise); candidate_family scans a structured family built
    from the bands, the indexed seed sets, and degree peeling. `require`
    constrains the search to supersets of the given set. Ties break to the
    lexicographically smallest vertex tuple.
    """
    config = config or SolverConfig()
    budget = params.query_budget
    n = g.n
    require_bits = 0 if require is None else require.bits
    mode = config.mode
    if mode == "auto":
        mode = "exact_enumeration" if n <= min(config.enumeration_cap, 12) else "candidate_family"

    if mode == "exact_enumeration":
        if n > config.enumeration_cap:
            raise CapacityError(f"n={n} exceeds enumeration cap {config.enumeration_cap}")
        exact = g.m <= config.exact_expectation_cap
        if not exact and seed is None:
            raise ParameterError("Monte-Carlo ranking requires a seed")
        free = [v for v in range(n) if not (require_bits >> v) & 1]
        if exact:
            table = EdgeMaskCoverTable(g)
            pow_p = [p**k for k in range(g.m + 1)]
            pow_q = [(1.0 - p) ** k for k in range(g.m + 1)]
        else:
            rank_seed = seed.child(RANK_STREAM)
            trial_solvers = [
                _CoverSolver(
                    sample_realization(g, p, rank_seed, trial=t).adjacency_masks()
                )
                for t in range(config.trials_per_candidate)
            ]
        best_bits = -1
        best_value = float("inf")
        best_key: tuple[int, ...] = ()
        full = (1 << n) - 1 if n else 0
        for mask in range(1 << len(free)):
            bits = require_bits
            rest = mask
            i = 0
            while rest:
                if rest & 1:
                    bits |= 1 << free[i]
                rest >>= 1
                i += 1
            outside = VertexSet(n, full ^ bits)
            if g.count_edges_within(outside) > budget:
                continue
            if exact:
                value = _exact_objective(g, p, bits, table, pow_p, pow_q)
            else:
                sizes = [s.size(full ^ bits) for s in trial_solvers]
                value = bits.bit_count() + sum(sizes) / len(sizes)
            key = _lex_key(VertexSet(n, bits))
            if value < best_value - 1e-12 or (
                abs(value - best_value) <= 1e-12 and key < best_key
            ):
                best_value = value
                best_bits = bits
                best_key = key
        assert best_bits >= 0, "the full vertex set is always feasible"
        commit = VertexSet(n, best_bits)
        if exact:
            objective = ProbEstimate(best_value, 0.0, 0, "exact")
        else:
            objective = _estimate_objective(
                g, p, commit, seed.child(FINAL_STREAM),
                config.trials_per_candidate * config.reestimate_factor, config.max_n,
            )
        return Solution(commit, objective, True)

    if mode != "candidate_family":
        raise ParameterError(f"unknown solver mode {config.mode!r}")
    if seed is None:
        raise ParameterError("candidate_family mode requires a seed")

    candidates = _candidate_family(g, p, params, config, seed, context)
    if require is not None:
        candidates = [c | require for c in candidates]
    seen: set[int] = set()
    feasible: list[VertexSet] = []
    for cand in candidates:
        if cand.bits in seen:
            continue
        seen.add(cand.bits)
        if g.count_edges_within(cand.complement()) <= budget:
            feasible.append(cand)
    assert feasible, "the full vertex set is always feasible"

    rank_seed = seed.child(RANK_STREAM)
    trial_solvers = [
        _CoverSolver(sample_realization(g, p, rank_seed, trial=t).adjacency_masks())
        for t in range(config.trials_per_candidate)
    ]
    full = (1 << n) - 1 if n else 0
    best = None
    best_value = float("inf")
    best_key = ()
    for cand in feasible:
        mean = cand.size() + sum(
            s.size(full ^ cand.bits) for s in trial_solvers
        ) / len(trial_solvers)
        key = _lex_key(cand)
        if mean < best_value - 1e-12 or (abs(mean - best_value) <= 1e-12 and key < best_key):
            best = cand
            best_value = mean
            best_key = key
    objective = _estimate_objective(
        g, p, best, seed.child(FINAL_STREAM),
        config.trials_per_candidate * config.reestimate_factor, config.max_n,
    )
    return Solution(best, objective, True)


def _estimate_objective(
    g: BaseGraph, p: float, commit: VertexSet, seed: SeedSpec, trials: int, max_n: int
) -> ProbEstimate:
    values = [
        cover_objective(commit, sample_realization(g, p, seed, trial=t), max_n)
        for t in range(trials)
    ]
    mean = sum(values) / trials
    if trials > 1:
        var = sum((v - mean) ** 2 for v in values) / (trials - 1)
        half = 1.96 * (var / trials) ** 0.5
    else:
        half = 0.0
    return ProbEstimate(mean, half, trials, "monte_carlo")


def _candidate_family(
    g: BaseGraph,
    p: float,
    params: SeedParams,
    config: SolverConfig,
    seed: SeedSpec,
    context: SeedContext | None,
) -> list[VertexSet]:
    n = g.n
    family = [VertexSet(n, 0), g.all_vertices()]
    if context is not None:
        family.append(context.bands.high)
        family.append(context.bands.high | context.seed_vertices)
        q_list = context.seed_vertices.to_list()
        boundary_seed = seed.child(BOUNDARY_STREAM)
        boundaries = [
            context.boundary_of(sample_realization(g, p, boundary_seed, trial=t))
            for t in range(config.boundary_samples)
        ]
        if len(q_list) <= config.max_seed_enum:
            subsets = [
                VertexSet.from_ids(n, [q for j, q in enumerate(q_list) if (mask >> j) & 1])
                for mask in range(1 << len(q_list))
            ]
        else:
            pair_seed = seed.child(PAIR_STREAM)
            subsets = []
            for t in range(config.sampled_pairs):
                u = pair_seed.uniforms(t, len(q_list))
                subsets.append(
                    VertexSet.from_ids(n, [q for j, q in enumerate(q_list) if u[j] < 0.5])
                )
        for q_vc in subsets:
            for boundary in boundaries:
                family.append(context.seed_set(q_vc, boundary).union)
    if config.include_peeling:
        # Greedy peel: repeatedly commit the highest-degree remaining vertex.
        remaining = set(range(n))
        committed = 0
        adj = [g.adj_mask[v] for v in range(n)]
        for _ in range(n):
            live_deg = {
                v: (adj[v] & ~committed).bit_count() for v in remaining
            }
            if not live_deg:
                break
            v = min(remaining, key=lambda u: (-live_deg[u], u))
            if live_deg[v] == 0:
                break
            committed |= 1 << v
            remaining.discard(v)
            family.append(VertexSet(n, committed))
    return family


def run_vertex_cover(
    g: BaseGraph,
    p: float,
    params: SeedParams,
    commit: VertexSet,
    oracle: QueryOracle,
    max_n: int = BRANCH_BOUND_VERTEX_CAP,
) -> RunResult:
    """Query the edges outside `commit`, cover the revealed remainder, verify.

    The oracle must have been declared with exactly the outside edge set.
    """
    outside = commit.complement()
    expected_allowed = g.edges_within(outside)
    if oracle.allowed != expected_allowed:
        raise ContractError("oracle's allowed set must equal the edges outside the commit set")
    revealed = 0
    for eidx in expected_allowed:
        if oracle.query(eidx):
            revealed |= 1 << eidx
    remainder_cover = mvc_exact(
        Realization(g, revealed), active=outside, max_n=max_n
    ).cover
    cover = commit | remainder_cover
    violations = oracle.verify_cover(cover)
    return RunResult(
        cover=cover,
        queries_used=oracle.queries_used,
        budget=oracle.budget,
        realized_edge_violations=violations,
    )


def dense_fallback_check(
    g: BaseGraph, p: float, params: SeedParams, opt_estimate: ProbEstimate | None = None
) -> bool:
    """True when the whole graph fits in the query budget (commit nothing).

    `opt_estimate` is accepted for interface parity; the decision is purely
    the edge count against the budget, boundary inclusive.
    """
    return g.m <= params.query_budget
