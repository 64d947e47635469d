"""Membership bands, the greedy seed-vertex loop, and indexed seed sets.

Vertices are split by their probability of joining the canonical minimum
cover: a high band (committed wholesale), a low band (left for querying), and
a middle band where the greedy loop picks a short sequence of seed vertices.
Seed sets indexed by (seed-vertices-in-cover, boundary realization) extend the
committed part per realization while keeping the uncommitted remainder sparse.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from .errors import ContractError, ParameterError
from .graph import BaseGraph, EdgeSet, InducedSubgraph, VertexSet, induced_subgraph
from .mvc import check_feasible_cover, cover_statistics, mvc_exact, CoverStatistics
from .realization import PartialRealization, Realization, sample_realization
from .rng import SeedSpec

DEFAULT_DELTA_TRIALS = 4000

# Stream tags for the independent substreams used by one experiment.
STATS_STREAM = 11
SEED_LOOP_STREAM = 12


@dataclass(frozen=True)
class SeedParams:
    """Epsilon-derived thresholds driving the seed machinery.

    Canonical derivation: delta = epsilon^2 and gamma = epsilon^5 / 1e3, which
    makes the undecided-degree threshold 1/(p*gamma) astronomically large on
    desk-scale instances. The keyword overrides exist for experiments that
    need a reachable threshold; leave them None for the canonical contract.
    """

    epsilon: float
    p: float
    n: int
    delta: float = field(default=None)  # type: ignore[assignment]
    gamma: float = field(default=None)  # type: ignore[assignment]
    budget_override: int | None = None

    def __post_init__(self):
        if not 0.0 < self.epsilon < 0.25:
            raise ParameterError(f"epsilon={self.epsilon} outside (0, 1/4)")
        if not 0.0 < self.p <= 1.0:
            raise ParameterError(f"p={self.p} outside (0, 1]")
        if self.n < 0:
            raise ParameterError("n must be non-negative")
        if self.delta is None:
            object.__setattr__(self, "delta", self.epsilon**2)
        if self.gamma is None:
            object.__setattr__(self, "gamma", self.epsilon**5 / 1e3)
        if self.delta <= 0 or self.gamma <= 0:
            raise ParameterError("delta and gamma must be positive")

    @property
    def is_canonical(self) -> bool:
        return (
            self.delta == self.epsilon**2
            and self.gamma == self.epsilon**5 / 1e3
            and self.budget_override is None
        )

    @property
    def degree_threshold(self) -> float:
        return 1.0 / (self.p * self.gamma)

    @property
    def query_budget(self) -> int:
        if self.budget_override is not None:
            return self.budget_override
        return math.ceil(2e3 * self.n / (self.epsilon**5 * self.p))

    def sparsity_bound(self) -> float:
        """Edge bound for the uncommitted remainder, in canonical epsilon form."""
        return 2e3 * self.n / (self.p * self.epsilon**5)

    def seed_length_bound(self, n_band: int) -> float:
        """Deterministic cap on the seed-sequence length for an n_band-vertex band."""
        return 10.0 * self.gamma / self.delta * n_band

    def seed_length_gate(self) -> float:
        """Band size above which the seed-length cap is asserted."""
        return 4.0 * math.log(2.0 / self.delta)


@dataclass(frozen=True)
class MembershipBands:
    """Disjoint high/mid/low bands covering all vertices.

    high: membership probability >= 1 - 2*epsilon (boundary inclusive);
    low: probability <= epsilon (boundary inclusive); mid: the remainder.
    """

    high: VertexSet
    mid: VertexSet
    low: VertexSet
    epsilon: float


def partition_by_membership(c: list[float], epsilon: float) -> MembershipBands:
    """Band vertices by their canonical-cover membership probabilities."""
    if not 0.0 < epsilon < 0.25:
        raise ParameterError(f"epsilon={epsilon} outside (0, 1/4)")
    n = len(c)
    high = mid = low = 0
    for v, cv in enumerate(c):
        if not 0.0 <= cv <= 1.0:
            raise ParameterError(f"membership probability c[{v}]={cv} outside [0, 1]")
        if cv >= 1.0 - 2.0 * epsilon:
            high |= 1 << v
        elif cv <= epsilon:
            low |= 1 << v
        else:
            mid |= 1 << v
    return MembershipBands(
        VertexSet(n, high), VertexSet(n, mid), VertexSet(n, low), epsilon
    )


def _queued_bits(queued: list[int], n: int) -> int:
    bits = 0
    for v in queued:
        if not 0 <= v < n:
            raise ContractError(f"queued vertex {v} outside 0..{n - 1}")
        bits |= 1 << v
    return bits


def decided_set(queued: list[int], r: Realization, vc: VertexSet) -> VertexSet:
    """Vertices outside `queued` with a realized neighbor in queued-minus-cover.

    Such a vertex is forced into any feasible cover extending `vc`'s choices.
    """
    check_feasible_cover(r, vc)
    n = r.base.n
    qbits = _queued_bits(queued, n)
    masks = r.adjacency_masks()
    forced = 0
    for q in queued:
        if q not in vc:
            forced |= masks[q]
    return VertexSet(n, forced & ~qbits)


def undecided_set(queued: list[int], r: Realization, vc: VertexSet) -> VertexSet:
    """Complement of the decided set within the non-queued vertices."""
    n = r.base.n
    qbits = _queued_bits(queued, n)
    decided = decided_set(queued, r, vc)
    all_bits = (1 << n) - 1 if n else 0
    return VertexSet(n, all_bits & ~qbits & ~decided.bits)


def problematic_set(
    queued: list[int], r: Realization, vc: VertexSet, params: SeedParams
) -> VertexSet:
    """Non-cover vertices with at least 1/(p*gamma) undecided base neighbors."""
    und = undecided_set(queued, r, vc).bits
    n = r.base.n
    qbits = _queued_bits(queued, n)
    thr = params.degree_threshold
    out = 0
    for v in range(n):
        if (qbits >> v) & 1 or v in vc:
            continue
        if (r.base.adj_mask[v] & und).bit_count() >= thr:
            out |= 1 << v
    return VertexSet(n, out)


def heavy_set(
    queued: list[int], r: Realization, vc: VertexSet, params: SeedParams
) -> VertexSet:
    """Threshold-degree set over the undecided vertices, ignoring cover status.

    Always a superset of the problematic set.
    """
    und = undecided_set(queued, r, vc).bits
    n = r.base.n
    qbits = _queued_bits(queued, n)
    thr = params.degree_threshold
    out = 0
    for v in range(n):
        if (qbits >> v) & 1:
            continue
        if (r.base.adj_mask[v] & und).bit_count() >= thr:
            out |= 1 << v
    return VertexSet(n, out)


@dataclass(frozen=True)
class SeedStep:
    """One appended seed vertex and the estimate that justified it."""

    vertex: int
    estimate: float
    undecided_mean: float
    candidates: int


@dataclass(frozen=True)
class SeedSequence:
    """The greedy loop's output: an ordered seed-vertex sequence with evidence."""

    steps: list[SeedStep]
    params: SeedParams

    @property
    def vertices(self) -> list[int]:
        return [s.vertex for s in self.steps]

    def __len__(self) -> int:
        return len(self.steps)


@dataclass(frozen=True)
class SeedEstimatorConfig:
    """Monte-Carlo budget for the per-vertex probability tests."""

    trials: int = DEFAULT_DELTA_TRIALS

    def margin(self, delta: float) -> float:
        """Slack band around the probability threshold for invariant checks."""
        return 3.0 * (delta / self.trials) ** 0.5


DrawFn = Callable[[int, int], tuple[Realization, VertexSet]]


def _default_draw(g_sub: BaseGraph, p: float, seed: SeedSpec) -> DrawFn:
    def draw(iteration: int, trial: int) -> tuple[Realization, VertexSet]:
        r = sample_realization(g_sub, p, seed.child(iteration), trial)
        return r, mvc_exact(r).cover

    return draw


def vertex_seed(
    g_sub: BaseGraph,
    p: float,
    params: SeedParams,
    config: SeedEstimatorConfig | None = None,
    seed: SeedSpec | None = None,
    draw: DrawFn | None = None,
) -> SeedSequence:
    """Greedy loop appending vertices likely to be problematic.

    Per iteration, estimates for every remaining candidate the probability of
    landing in the problematic set over fresh realizations; appends the
    highest estimate (ties to the lowest id) while any estimate clears the
    probability threshold. `draw(iteration, trial)` supplies the realization
    and the cover function value; the default samples g_sub itself and uses
    its canonical cover.
    """
    config = config or SeedEstimatorConfig()
    if draw is None:
        if seed is None:
            raise ParameterError("vertex_seed needs a seed when no draw is given")
        draw = _default_draw(g_sub, p, seed)

    n = g_sub.n
    thr = params.degree_threshold
    queued: list[int] = []
    qbits = 0
    steps: list[SeedStep] = []
    all_bits = (1 << n) - 1 if n else 0

    for iteration in range(n):
        # Only vertices with enough base-graph degree can ever be problematic.
        candidates = [
            v
            for v in range(n)
            if not (qbits >> v) & 1 and len(g_sub.adj[v]) >= thr
        ]
        if not candidates:
            break
        counts = {v: 0 for v in candidates}
        undecided_total = 0
        for trial in range(config.trials):
            r, vc = draw(iteration, trial)
            check_feasible_cover(r, vc)
            masks = r.adjacency_masks()
            forced = 0
            for q in queued:
                if q not in vc:
                    forced |= masks[q]
            und = all_bits & ~qbits & ~(forced & ~qbits)
            undecided_total += (und & ~qbits).bit_count()
            vcb = vc.bits
            for v in candidates:
                if (vcb >> v) & 1:
                    continue
                if (g_sub.adj_mask[v] & und).bit_count() >= thr:
                    counts[v] += 1
        best = min(candidates, key=lambda v: (-counts[v], v))
        estimate = counts[best] / config.trials
        if estimate < params.delta:
            break
        queued.append(best)
        qbits |= 1 << best
        steps.append(
            SeedStep(
                vertex=best,
                estimate=estimate,
                undecided_mean=undecided_total / config.trials,
                candidates=len(candidates),
            )
        )
    return SeedSequence(steps, params)


@dataclass(frozen=True)
class SeedSet:
    """A committed candidate set: high band, seed vertices, forced, and heavy parts."""

    high_part: VertexSet
    seed_part: VertexSet
    decided_part: VertexSet
    heavy_part: VertexSet
    union: VertexSet
    outside_edges: int


class SeedContext:
    """Frozen per-experiment state: bands, seed sequence, and indexed seed sets.

    Works in the full graph's vertex ids; the mid band is materialized as an
    induced subgraph for the greedy loop and the degree computations.
    """

    def __init__(
        self,
        g: BaseGraph,
        p: float,
        params: SeedParams,
        bands: MembershipBands,
        sequence: SeedSequence,
        stats: CoverStatistics,
        mid_sub: InducedSubgraph,
    ):
        self.g = g
        self.p = p
        self.params = params
        self.bands = bands
        self.sequence = sequence
        self.stats = stats
        self.mid_sub = mid_sub
        self.seed_vertices = VertexSet.from_ids(
            g.n, [mid_sub.vertices[v] for v in sequence.vertices]
        )
        boundary = 0
        for q in self.seed_vertices:
            boundary |= g.incident_edges[q]
        self.boundary_edges = EdgeSet(g.m, boundary)
        # Base adjacency within the mid band, in global ids.
        self._mid_adj = [g.adj_mask[v] & bands.mid.bits for v in range(g.n)]

    @classmethod
    def build(
        cls,
        g: BaseGraph,
        p: float,
        params: SeedParams,
        seed: SeedSpec,
        mode: str = "auto",
        stats_trials: int = 10_000,
        seed_config: SeedEstimatorConfig | None = None,
        threads: int = 1,
        stats: CoverStatistics | None = None,
    ) -> "SeedContext":
        """Estimate memberships once, band the vertices, and run the greedy loop."""
        if stats is None:
            stats = cover_statistics(
                g, p, mode=mode, seed=seed.child(STATS_STREAM),
                trials=stats_trials, threads=threads,
            )
        bands = partition_by_membership([e.mean for e in stats.vertex], params.epsilon)
        mid_sub = induced_subgraph(g, bands.mid)
        loop_seed = seed.child(SEED_LOOP_STREAM)

        def draw(iteration: int, trial: int) -> tuple[Realization, VertexSet]:
            full = sample_realization(g, p, loop_seed.child(iteration), trial)
            cover = mvc_exact(full).cover
            return full.restrict(mid_sub), mid_sub.to_local(cover)

        sequence = vertex_seed(
            mid_sub.graph, p, params, seed_config, draw=draw
        )
        return cls(g, p, params, bands, sequence, stats, mid_sub)

    def seed_set(
        self, seed_in_cover: VertexSet, boundary: PartialRealization
    ) -> SeedSet:
        """Seed set indexed by the cover status of the seed vertices and the
        realization of their incident edges."""
        if not seed_in_cover.issubset(self.seed_vertices):
            raise ContractError("seed_in_cover must be a subset of the seed vertices")
        if boundary.fixed_edges != self.boundary_edges:
            raise ContractError("boundary realization must fix exactly the seed-incident edges")
        g = self.g
        mid = self.bands.mid.bits
        qbits = self.seed_vertices.bits
        # Forced vertices: mid-band, non-seed, with a realized boundary edge to
        # a seed vertex that stayed out of the cover.
        forced = 0
        for q in self.seed_vertices:
            if q in seed_in_cover:
                continue
            for nbr, eidx in g.adj[q]:
                if (boundary.fixed_outcomes >> eidx) & 1:
                    forced |= 1 << nbr
        decided_bits = forced & mid & ~qbits
        undecided_bits = mid & ~qbits & ~decided_bits
        thr = self.params.degree_threshold
        heavy_bits = 0
        scan = mid & ~qbits
        while scan:
            low = scan & -scan
            scan ^= low
            u = low.bit_length() - 1
            if (self._mid_adj[u] & undecided_bits).bit_count() >= thr:
                heavy_bits |= low
        union_bits = self.bands.high.bits | qbits | decided_bits | heavy_bits
        union = VertexSet(g.n, union_bits)
        outside = union.complement()
        return SeedSet(
            high_part=self.bands.high,
            seed_part=self.seed_vertices,
            decided_part=VertexSet(g.n, decided_bits),
            heavy_part=VertexSet(g.n, heavy_bits),
            union=union,
            outside_edges=g.count_edges_within(outside),
        )

    def boundary_of(self, r: Realization) -> PartialRealization:
        """Pin the seed-incident edges to their outcomes in `r`."""
        return PartialRealization(
            self.boundary_edges, r.present & self.boundary_edges.bits
        )

    def seed_of_realization(self, r: Realization) -> SeedSet:
        """Seed set of a concrete realization: index by its canonical cover."""
        cover = mvc_exact(r).cover
        return self.seed_set(self.seed_vertices & cover, self.boundary_of(r))

    def enumerate_pairs(self):
        """All (seed_in_cover, boundary) index pairs; exponential in both sizes."""
        from itertools import combinations

        q_list = self.seed_vertices.to_list()
        f_list = self.boundary_edges.to_list()
        for k in range(len(q_list) + 1):
            for qc in combinations(q_list, k):
                q_set = VertexSet.from_ids(self.g.n, qc)
                for mask in range(1 << len(f_list)):
                    outcome_bits = 0
                    for i, eidx in enumerate(f_list):
                        if (mask >> i) & 1:
                            outcome_bits |= 1 << eidx
                    yield q_set, PartialRealization(self.boundary_edges, outcome_bits)
