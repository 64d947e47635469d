"""Exact minimum vertex cover with a canonical tie-break, plus estimators.

The canonical rule: among all minimum covers of a realization, return the one
whose sorted vertex tuple is lexicographically smallest. The same realization
therefore always maps to the same cover, which makes per-vertex membership
probabilities well defined.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .errors import CapacityError, ContractError, ParameterError
from .graph import BaseGraph, VertexSet
from .realization import Realization, enumerate_realizations, sample_realization
from .rng import SeedSpec, map_trials

BRANCH_BOUND_VERTEX_CAP = 40
BRUTE_FORCE_VERTEX_CAP = 20
EXACT_EXPECTATION_EDGE_CAP = 20
DEFAULT_MC_TRIALS = 10_000


@dataclass(frozen=True)
class CanonicalCover:
    """A minimum vertex cover under the fixed canonical tie-break."""

    cover: VertexSet
    size: int


@dataclass(frozen=True)
class ProbEstimate:
    """Point estimate with a 95% half-interval (0 in exact mode)."""

    mean: float
    half_width: float
    trials: int
    mode: str  # "exact" | "monte_carlo"


class _CoverSolver:
    """Minimum-vertex-cover sizes over vertex subsets of one realization.

    Memoizes on the active-vertex bitmask; adjacency is always the realized
    masks restricted to the active set, so the mask is a complete key.
    """

    __slots__ = ("masks", "memo")

    def __init__(self, masks: list[int]):
        self.masks = masks
        self.memo: dict[int, int] = {}

    def size(self, active: int) -> int:
        masks = self.masks
        # Normalize: drop vertices with no live edge. They never help a cover.
        live = 0
        scan = active
        while scan:
            low = scan & -scan
            scan ^= low
            v = low.bit_length() - 1
            if masks[v] & active:
                live |= low
        if live == 0:
            return 0
        cached = self.memo.get(live)
        if cached is not None:
            return cached

        # Degree-1 reduction: covering the neighbor dominates covering the leaf.
        best_v = -1
        best_deg = 0
        scan = live
        while scan:
            low = scan & -scan
            scan ^= low
            v = low.bit_length() - 1
            deg = (masks[v] & live).bit_count()
            if deg == 1:
                u = (masks[v] & live).bit_length() - 1
                result = 1 + self.size(live & ~(1 << u) & ~low)
                self.memo[live] = result
                return result
            if deg > best_deg:
                best_deg = deg
                best_v = v

        # Split off the connected component of the branch vertex.
        comp = 1 << best_v
        frontier = masks[best_v] & live
        while frontier:
            comp |= frontier
            nxt = 0
            scan = frontier
            while scan:
                low = scan & -scan
                scan ^= low
                nxt |= masks[low.bit_length() - 1] & live
            frontier = nxt & ~comp
        if comp != live:
            result = self.size(comp) + self.size(live & ~comp)
            self.memo[live] = result
            return result

        # Branch on the max-degree vertex: take it, or take all its neighbors.
        nb = masks[best_v] & live
        include = 1 + self.size(live & ~(1 << best_v))
        exclude = nb.bit_count() + self.size(live & ~nb & ~(1 << best_v))
        result = min(include, exclude)
        self.memo[live] = result
        return result


def _check_vertex_cap(n: int, max_n: int):
    if n > max_n:
        raise CapacityError(f"n={n} exceeds the exact-solver cap {max_n}")


def mvc_size(
    r: Realization, active: VertexSet | None = None, max_n: int = BRANCH_BOUND_VERTEX_CAP
) -> int:
    """Size of a minimum vertex cover of `r`, optionally within `active`."""
    _check_vertex_cap(r.base.n, max_n)
    bits = r.base.all_vertices().bits if active is None else active.bits
    return _CoverSolver(r.adjacency_masks()).size(bits)


def mvc_exact(
    r: Realization, active: VertexSet | None = None, max_n: int = BRANCH_BOUND_VERTEX_CAP
) -> CanonicalCover:
    """Canonical minimum vertex cover of `r`, optionally within `active`.

    Greedy refinement: scan vertices in increasing id and keep v in the cover
    exactly when some minimum cover consistent with earlier decisions contains
    v. This yields the lexicographically smallest sorted vertex tuple.
    """
    n = r.base.n
    _check_vertex_cap(n, max_n)
    masks = r.adjacency_masks()
    solver = _CoverSolver(masks)
    start = r.base.all_vertices().bits if active is None else active.bits
    k_star = solver.size(start)

    cover_bits = 0
    included = 0
    cur = start
    for v in range(n):
        if not (cur >> v) & 1:
            continue
        nb = masks[v] & cur
        if nb == 0:
            cur &= ~(1 << v)
            continue
        if included + 1 + solver.size(cur & ~(1 << v)) == k_star:
            cover_bits |= 1 << v
            included += 1
            cur &= ~(1 << v)
        else:
            # v is out of every remaining minimum cover: its realized
            # neighbors are forced in.
            cover_bits |= nb
            included += nb.bit_count()
            cur &= ~nb & ~(1 << v)
    assert included == k_star
    return CanonicalCover(VertexSet(n, cover_bits), k_star)


def is_cover(r: Realization, candidate: VertexSet, active: VertexSet | None = None) -> bool:
    """True iff every realized edge (within `active`) has an endpoint in `candidate`."""
    cb = candidate.bits
    ab = r.base.all_vertices().bits if active is None else active.bits
    for idx, (u, v) in enumerate(r.base.edges):
        if not r.has_edge(idx):
            continue
        if not ((ab >> u) & 1 and (ab >> v) & 1):
            continue
        if not ((cb >> u) & 1 or (cb >> v) & 1):
            return False
    return True


def mvc_brute(
    r: Realization, active: VertexSet | None = None, max_n: int = BRUTE_FORCE_VERTEX_CAP
) -> CanonicalCover:
    """Reference solver: first covering subset in (size, lexicographic) order."""
    n = r.base.n
    _check_vertex_cap(n, max_n)
    vertices = list(range(n)) if active is None else active.to_list()
    for k in range(len(vertices) + 1):
        for combo in combinations(vertices, k):
            cand = VertexSet.from_ids(n, combo)
            if is_cover(r, cand, active):
                return CanonicalCover(cand, k)
    raise AssertionError("full vertex set always covers")


class EdgeMaskCoverTable:
    """Lazy table of minimum-cover sizes keyed by realized edge subsets.

    The cover size of a realization depends only on which edges exist, so one
    table serves every induced-subgraph restriction of the same base graph.
    """

    def __init__(self, g: BaseGraph):
        self.g = g
        self.memo: dict[int, int] = {0: 0}

    def size(self, edge_mask: int) -> int:
        memo = self.memo
        cached = memo.get(edge_mask)
        if cached is not None:
            return cached
        incident = self.g.incident_edges
        edges = self.g.edges
        stack = [edge_mask]
        while stack:
            mask = stack[-1]
            if mask in memo:
                stack.pop()
                continue
            u, v = edges[(mask & -mask).bit_length() - 1]
            left = mask & ~incident[u]
            right = mask & ~incident[v]
            left_val = memo.get(left)
            right_val = memo.get(right)
            if left_val is None:
                stack.append(left)
            if right_val is None:
                stack.append(right)
            if left_val is not None and right_val is not None:
                memo[mask] = 1 + min(left_val, right_val)
                stack.pop()
        return memo[edge_mask]


@dataclass(frozen=True)
class CoverStatistics:
    """Expected cover size plus per-vertex and per-edge coverage probabilities."""

    opt: ProbEstimate
    vertex: list[ProbEstimate]
    edge: list[ProbEstimate]


def _resolve_mode(mode: str, m: int, edge_cap: int) -> str:
    if mode == "auto":
        return "exact" if m <= edge_cap else "monte_carlo"
    if mode not in ("exact", "monte_carlo"):
        raise ParameterError(f"unknown estimator mode {mode!r}")
    return mode


def cover_statistics(
    g: BaseGraph,
    p: float,
    mode: str = "auto",
    seed: SeedSpec | None = None,
    trials: int = DEFAULT_MC_TRIALS,
    max_n: int = BRANCH_BOUND_VERTEX_CAP,
    threads: int = 1,
    edge_cap: int = EXACT_EXPECTATION_EDGE_CAP,
) -> CoverStatistics:
    """Joint computation of opt, per-vertex c_v, and per-edge c_e.

    Exact mode enumerates all realizations (m <= edge_cap); Monte-Carlo mode
    reuses one realization per trial for every statistic, so the vertex
    probabilities sum to the expected cover size exactly, trial by trial.
    """
    resolved = _resolve_mode(mode, g.m, edge_cap)
    if resolved == "exact":
        opt_sum = 0.0
        cv = [0.0] * g.n
        ce = [0.0] * g.m
        for real, weight in enumerate_realizations(g, p, edge_cap):
            cover = mvc_exact(real, max_n=max_n)
            opt_sum += weight * cover.size
            cb = cover.cover.bits
            scan = cb
            while scan:
                low = scan & -scan
                scan ^= low
                cv[low.bit_length() - 1] += weight
            for idx, (u, v) in enumerate(g.edges):
                if (cb >> u) & 1 or (cb >> v) & 1:
                    ce[idx] += weight
        exact = lambda x: ProbEstimate(x, 0.0, 0, "exact")
        return CoverStatistics(exact(opt_sum), [exact(x) for x in cv], [exact(x) for x in ce])

    if seed is None:
        raise ParameterError("monte_carlo mode requires a seed")
    if trials < 1:
        raise ParameterError("trials must be positive")

    def one_trial(t: int) -> tuple[int, int]:
        real = sample_realization(g, p, seed, trial=t)
        cover = mvc_exact(real, max_n=max_n)
        return cover.size, cover.cover.bits

    results = map_trials(one_trial, trials, threads)
    sizes = [s for s, _ in results]
    mean = sum(sizes) / trials
    if trials > 1:
        var = sum((s - mean) ** 2 for s in sizes) / (trials - 1)
        half = 1.96 * (var / trials) ** 0.5
    else:
        half = 0.0
    vertex_counts = [0] * g.n
    edge_counts = [0] * g.m
    for _, cb in results:
        scan = cb
        while scan:
            low = scan & -scan
            scan ^= low
            vertex_counts[low.bit_length() - 1] += 1
        for idx, (u, v) in enumerate(g.edges):
            if (cb >> u) & 1 or (cb >> v) & 1:
                edge_counts[idx] += 1

    def binom(count: int) -> ProbEstimate:
        f = count / trials
        return ProbEstimate(f, 1.96 * (f * (1.0 - f) / trials) ** 0.5, trials, "monte_carlo")

    return CoverStatistics(
        ProbEstimate(mean, half, trials, "monte_carlo"),
        [binom(c) for c in vertex_counts],
        [binom(c) for c in edge_counts],
    )


def expected_mvc(
    g: BaseGraph,
    p: float,
    mode: str = "auto",
    seed: SeedSpec | None = None,
    trials: int = DEFAULT_MC_TRIALS,
    max_n: int = BRANCH_BOUND_VERTEX_CAP,
    threads: int = 1,
    edge_cap: int = EXACT_EXPECTATION_EDGE_CAP,
) -> ProbEstimate:
    """Expected minimum-cover size over the realization distribution."""
    resolved = _resolve_mode(mode, g.m, edge_cap)
    if resolved == "exact":
        # Cover size depends only on the realized edge set, so sum the lazy
        # mask table against the binomial weights instead of re-solving.
        if g.m > edge_cap:
            raise CapacityError(f"m={g.m} exceeds exact cap {edge_cap}")
        _check_vertex_cap(g.n, max_n)
        table = EdgeMaskCoverTable(g)
        weight_by_count = [p**k * (1.0 - p) ** (g.m - k) for k in range(g.m + 1)]
        total = 0.0
        for mask in range(1 << g.m):
            total += weight_by_count[mask.bit_count()] * table.size(mask)
        return ProbEstimate(total, 0.0, 0, "exact")

    if seed is None:
        raise ParameterError("monte_carlo mode requires a seed")
    sizes = map_trials(
        lambda t: mvc_size(sample_realization(g, p, seed, trial=t), max_n=max_n),
        trials,
        threads,
    )
    mean = sum(sizes) / trials
    if trials > 1:
        var = sum((s - mean) ** 2 for s in sizes) / (trials - 1)
        half = 1.96 * (var / trials) ** 0.5
    else:
        half = 0.0
    return ProbEstimate(mean, half, trials, "monte_carlo")


def membership_probs(g: BaseGraph, p: float, **kwargs) -> list[ProbEstimate]:
    """Per-vertex probability of belonging to the canonical minimum cover."""
    return cover_statistics(g, p, **kwargs).vertex


def edge_cover_probs(g: BaseGraph, p: float, **kwargs) -> list[ProbEstimate]:
    """Per-edge probability that at least one endpoint is in the canonical cover."""
    return cover_statistics(g, p, **kwargs).edge


def check_feasible_cover(r: Realization, vc: VertexSet):
    """Raise ContractError unless `vc` covers every realized edge of `r`."""
    if not is_cover(r, vc):
        raise ContractError("supplied vertex set is not a cover of the realization")
