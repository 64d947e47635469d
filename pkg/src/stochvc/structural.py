"""Greedy vertex ordering, the sparse-remainder set, and tail-bound harnesses.

The ordering is built by repeatedly appending the vertex most likely to be
matched by a greedy random matching grown from the prefix. Thresholding the
forward degrees of that ordering yields a set whose size and whose outside
edge count are both within a fixed constant of the expected minimum cover
size; those two inequalities power a Bernstein-type tail bound on the
minimum-cover size of a random realization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, ParameterError
from .graph import BaseGraph, VertexSet
from .mvc import (
    BRANCH_BOUND_VERTEX_CAP,
    EXACT_EXPECTATION_EDGE_CAP,
    EdgeMaskCoverTable,
    ProbEstimate,
    expected_mvc,
    mvc_size,
)
from .realization import sample_realization
from .rng import SeedSpec, map_trials

STRUCTURAL_CONSTANT = 2.0 * (math.e / (math.e - 1.0) + 2.0)  # < 8

TAIL_STREAM = 31
OBJECTIVE_STREAM = 32
OPT_STREAM = 33


@dataclass(frozen=True)
class GreedyOrdering:
    """Vertex permutation plus each vertex's matched-probability estimate
    at the moment it was selected."""

    pi: list[int]
    matched_prob: list[float]


@dataclass(frozen=True)
class StructuralSet:
    """Vertices whose forward degree u satisfies p * deg_forward(u) >= 1."""

    vertices: VertexSet
    forward_degrees: list[int]


def _kth_set_bit(bits: int, k: int) -> int:
    for _ in range(k):
        bits &= bits - 1
    return (bits & -bits).bit_length() - 1


def greedy_ordering(
    g: BaseGraph, p: float, trials_per_step: int = 2000, seed: SeedSpec | None = None
) -> GreedyOrdering:
    """Build the ordering by simulated greedy matchings from the prefix.

    Each step estimates, for every unplaced vertex, the probability that a
    greedy matching grown through the prefix (each prefix vertex matching a
    uniformly random still-unmatched realized neighbor outside the earlier
    prefix) reaches it; the argmax joins the prefix, ties to the lowest id.
    """
    if trials_per_step < 1:
        raise ParameterError("trials_per_step must be positive")
    if seed is None:
        raise ParameterError("greedy_ordering requires a seed")
    n = g.n
    pi: list[int] = []
    prefix_before: list[int] = []  # bitmask of pi[:i] for each position i
    placed = 0
    matched_prob = [0.0] * n

    for step in range(n):
        remaining = [v for v in range(n) if not (placed >> v) & 1]
        if not pi:
            # Empty prefix matches nothing; every estimate is zero.
            best = remaining[0]
            pi.append(best)
            prefix_before.append(placed)
            placed |= 1 << best
            continue
        edge_seed = seed.child(2 * step)
        choice_seed = seed.child(2 * step + 1)
        counts = [0] * n
        for t in range(trials_per_step):
            masks = sample_realization(g, p, edge_seed, t).adjacency_masks()
            stream = choice_seed.stream(t)
            matched = 0
            for i, vi in enumerate(pi):
                if (matched >> vi) & 1:
                    continue
                cand = masks[vi] & ~matched & ~prefix_before[i]
                if cand:
                    picked = _kth_set_bit(cand, stream.next_below(cand.bit_count()))
                    matched |= (1 << vi) | (1 << picked)
            outside = matched & ~placed
            while outside:
                low = outside & -outside
                outside ^= low
                counts[low.bit_length() - 1] += 1
        best = min(remaining, key=lambda v: (-counts[v], v))
        matched_prob[best] = counts[best] / trials_per_step
        pi.append(best)
        prefix_before.append(placed)
        placed |= 1 << best
    return GreedyOrdering(pi, matched_prob)


def structural_set(g: BaseGraph, p: float, ordering: GreedyOrdering) -> StructuralSet:
    """Forward degrees along the ordering; threshold at p * deg >= 1."""
    n = g.n
    if sorted(ordering.pi) != list(range(n)):
        raise ParameterError("ordering must be a permutation of the vertices")
    pos = [0] * n
    for i, v in enumerate(ordering.pi):
        pos[v] = i
    forward = [0] * n
    for u, v in g.edges:
        earlier = u if pos[u] < pos[v] else v
        forward[earlier] += 1
    bits = 0
    for u in range(n):
        if p * forward[u] >= 1.0:
            bits |= 1 << u
    return StructuralSet(VertexSet(n, bits), forward)


@dataclass(frozen=True)
class StructuralReport:
    """Both structural inequalities evaluated against an opt estimate."""

    set_size: int
    size_bound: float
    outside_edges: int
    edge_bound: float
    size_ok: bool
    edges_ok: bool


def verify_structural(
    g: BaseGraph, p: float, sset: StructuralSet, opt_est: ProbEstimate
) -> StructuralReport:
    """Check |S| <= c*opt and |E outside S| <= C*opt/p, with MC margin on opt."""
    opt_hi = opt_est.mean + opt_est.half_width
    size_bound = STRUCTURAL_CONSTANT * opt_hi
    edge_bound = STRUCTURAL_CONSTANT * opt_hi / p
    outside = g.count_edges_within(sset.vertices.complement())
    return StructuralReport(
        set_size=sset.vertices.size(),
        size_bound=size_bound,
        outside_edges=outside,
        edge_bound=edge_bound,
        size_ok=sset.vertices.size() <= size_bound,
        edges_ok=outside <= edge_bound,
    )


def freedman_bound(t: float, opt: float, c: float = STRUCTURAL_CONSTANT) -> float:
    """Bernstein-form tail bound 2*exp(-t^2 / (4*c*opt + 2t/3))."""
    if t < 0:
        raise DomainError("t must be non-negative")
    if t == 0:
        return 2.0
    return 2.0 * math.exp(-(t * t) / (4.0 * c * opt + 2.0 * t / 3.0))


def gaussian_bound(t: float, opt: float) -> float:
    """Gaussian-form tail bound 2*exp(-(t^2/33)/opt), valid for t <= opt."""
    if t < 0:
        raise DomainError("t must be non-negative")
    if t > opt:
        raise DomainError(f"t={t} outside the bound's domain t <= opt={opt}")
    if t == 0:
        return 2.0
    return 2.0 * math.exp(-(t * t) / 33.0 / opt)


@dataclass(frozen=True)
class TailPoint:
    t: float
    empirical: float
    std_err: float
    bernstein: float
    gaussian: float | None  # None where t > opt


@dataclass(frozen=True)
class TailReport:
    """Empirical deviation tail of the minimum-cover size against both bounds."""

    opt_est: ProbEstimate
    sample_size: int
    points: list[TailPoint]


def empirical_tail(
    g: BaseGraph,
    p: float,
    trials: int,
    t_grid: list[float] | None = None,
    seed: SeedSpec | None = None,
    max_n: int = BRANCH_BOUND_VERTEX_CAP,
    threads: int = 1,
    edge_cap: int = EXACT_EXPECTATION_EDGE_CAP,
    grid_points: int = 20,
) -> TailReport:
    """Sample |min cover| and tabulate Pr[|Z - opt| >= t] against the bounds.

    The default grid is `grid_points` evenly spaced values in [0, 2*opt].
    """
    if seed is None:
        raise ParameterError("empirical_tail requires a seed")
    if trials < 1:
        raise ParameterError("trials must be positive")
    if grid_points < 2:
        raise ParameterError("grid_points must be at least 2")
    tail_seed = seed.child(TAIL_STREAM)
    samples = map_trials(
        lambda t: mvc_size(sample_realization(g, p, tail_seed, trial=t), max_n=max_n),
        trials,
        threads,
    )
    if g.m <= edge_cap:
        opt_est = expected_mvc(g, p, mode="exact", max_n=max_n, edge_cap=edge_cap)
    else:
        mean = sum(samples) / trials
        var = (
            sum((s - mean) ** 2 for s in samples) / (trials - 1) if trials > 1 else 0.0
        )
        opt_est = ProbEstimate(mean, 1.96 * (var / trials) ** 0.5, trials, "monte_carlo")
    opt = opt_est.mean
    if t_grid is None:
        top = 2.0 * opt if opt > 0 else 1.0
        t_grid = [top * i / (grid_points - 1) for i in range(grid_points)]
    points = []
    for t in t_grid:
        hits = sum(1 for z in samples if abs(z - opt) >= t)
        emp = hits / trials
        se = (emp * (1.0 - emp) / trials) ** 0.5
        points.append(
            TailPoint(
                t=t,
                empirical=emp,
                std_err=se,
                bernstein=freedman_bound(t, opt),
                gaussian=gaussian_bound(t, opt) if t <= opt else None,
            )
        )
    return TailReport(opt_est, trials, points)


@dataclass(frozen=True)
class ObjectiveTailReport:
    """Deviation frequency of the commit objective against its tail bound."""

    expected_objective: float
    threshold: float
    frequency: float
    std_err: float
    bound: float
    trials: int
    opt_mean: float


def cover_objective_tail(
    g: BaseGraph,
    p: float,
    commit: VertexSet,
    epsilon: float,
    trials: int,
    seed: SeedSpec | None = None,
    max_n: int = BRANCH_BOUND_VERTEX_CAP,
    threads: int = 1,
    edge_cap: int = EXACT_EXPECTATION_EDGE_CAP,
) -> ObjectiveTailReport:
    """Frequency of |g(S) - E g(S)| > eps * E g(S) versus 2*exp(-eps^2 opt/66)."""
    if seed is None:
        raise ParameterError("cover_objective_tail requires a seed")
    if not 0.0 <= epsilon <= 1.0:
        raise ParameterError(f"epsilon={epsilon} outside [0, 1]")
    from .solver import cover_objective  # local import to avoid a cycle

    if g.m <= edge_cap:
        table = EdgeMaskCoverTable(g)
        emask = g.edges_within(commit.complement()).bits
        tcount = emask.bit_count()
        pow_p = [p**k for k in range(tcount + 1)]
        pow_q = [(1.0 - p) ** k for k in range(tcount + 1)]
        total = 0.0
        sub = emask
        while True:
            k = sub.bit_count()
            total += pow_p[k] * pow_q[tcount - k] * table.size(sub)
            if sub == 0:
                break
            sub = (sub - 1) & emask
        expected = commit.size() + total
        opt_mean = expected_mvc(g, p, mode="exact", max_n=max_n, edge_cap=edge_cap).mean
    else:
        est_seed = seed.child(OPT_STREAM)
        values = map_trials(
            lambda t: cover_objective(
                commit, sample_realization(g, p, est_seed, trial=t), max_n
            ),
            trials,
            threads,
        )
        expected = sum(values) / trials
        opt_samples = map_trials(
            lambda t: mvc_size(sample_realization(g, p, est_seed, trial=t), max_n=max_n),
            trials,
            threads,
        )
        opt_mean = sum(opt_samples) / trials
    threshold = epsilon * expected
    obj_seed = seed.child(OBJECTIVE_STREAM)
    deviations = map_trials(
        lambda t: abs(
            cover_objective(commit, sample_realization(g, p, obj_seed, trial=t), max_n)
            - expected
        )
        > threshold,
        trials,
        threads,
    )
    freq = sum(deviations) / trials
    se = (freq * (1.0 - freq) / trials) ** 0.5
    bound = 2.0 * math.exp(-(epsilon**2) * opt_mean / 66.0)
    return ObjectiveTailReport(
        expected_objective=expected,
        threshold=threshold,
        frequency=freq,
        std_err=se,
        bound=bound,
        trials=trials,
        opt_mean=opt_mean,
    )
