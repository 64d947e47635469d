"""Sampling of realized subgraphs, exhaustive enumeration, and the query oracle.

A realized graph keeps each base edge independently with probability p. All
sampling is a pure function of (graph, p, SeedSpec, trial), so repeated and
concurrent runs are bit-identical.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import (
    CapacityError,
    ParameterError,
    QueryBudgetError,
    QueryModelError,
    ValidationError,
)
from .graph import BaseGraph, EdgeSet, InducedSubgraph, VertexSet
from .rng import SeedSpec

ENUMERATION_EDGE_CAP = 20


@dataclass(frozen=True)
class Realization:
    """One realized subgraph: bit i of `present` is 1 iff base edge i exists."""

    base: BaseGraph
    present: int

    def __post_init__(self):
        if self.present < 0 or self.present >> self.base.m:
            raise ValidationError("presence bits outside edge index range")

    def has_edge(self, edge_index: int) -> bool:
        return (self.present >> edge_index) & 1 == 1

    def realized_count(self) -> int:
        return self.present.bit_count()

    def adjacency_masks(self) -> list[int]:
        """Per-vertex neighbor bitmask restricted to realized edges."""
        masks = [0] * self.base.n
        bits = self.present
        edges = self.base.edges
        while bits:
            low = bits & -bits
            idx = low.bit_length() - 1
            bits ^= low
            u, v = edges[idx]
            masks[u] |= 1 << v
            masks[v] |= 1 << u
        return masks

    def restrict(self, sub: InducedSubgraph) -> "Realization":
        """View of this realization through an induced subgraph's edge map."""
        bits = 0
        for local_idx, orig_idx in enumerate(sub.edge_map):
            if (self.present >> orig_idx) & 1:
                bits |= 1 << local_idx
        return Realization(sub.graph, bits)


@dataclass(frozen=True)
class PartialRealization:
    """Outcomes pinned on a fixed edge subset; everything else stays random."""

    fixed_edges: EdgeSet
    fixed_outcomes: int

    def __post_init__(self):
        if self.fixed_outcomes < 0 or self.fixed_outcomes & ~self.fixed_edges.bits:
            raise ValidationError("outcomes defined outside the fixed edge set")


def _check_p(p: float):
    if not 0.0 < p <= 1.0:
        raise ParameterError(f"edge probability p={p} outside (0, 1]")


def _mask_from_uniforms(uniforms: np.ndarray, p: float) -> int:
    hits = np.packbits(uniforms < p, bitorder="little")
    return int.from_bytes(hits.tobytes(), "little")


def sample_realization(
    g: BaseGraph, p: float, seed: SeedSpec, trial: int = 0
) -> Realization:
    """Draw a realization with each edge present independently with prob p."""
    _check_p(p)
    if g.m == 0:
        return Realization(g, 0)
    return Realization(g, _mask_from_uniforms(seed.uniforms(trial, g.m), p))


def sample_conditional(
    g: BaseGraph,
    p: float,
    partial: PartialRealization,
    seed: SeedSpec,
    trial: int = 0,
) -> Realization:
    """Draw a realization agreeing exactly with `partial` on its fixed edges.

    Non-fixed edges use the same uniforms as sample_realization, so the
    conditional and unconditional draws couple edge-by-edge.
    """
    _check_p(p)
    if partial.fixed_edges.universe != g.m:
        raise ValidationError("fixed edge set does not match the graph")
    free = 0 if g.m == 0 else _mask_from_uniforms(seed.uniforms(trial, g.m), p)
    fixed = partial.fixed_edges.bits
    return Realization(g, (free & ~fixed) | partial.fixed_outcomes)


def enumerate_realizations(
    g: BaseGraph, p: float, edge_cap: int = ENUMERATION_EDGE_CAP
) -> Iterator[tuple[Realization, float]]:
    """Yield every realization with its probability weight; weights sum to 1."""
    _check_p(p)
    if g.m > edge_cap:
        raise CapacityError(f"m={g.m} exceeds enumeration cap {edge_cap}")
    weight_by_count = [p**k * (1.0 - p) ** (g.m - k) for k in range(g.m + 1)]
    for mask in range(1 << g.m):
        yield Realization(g, mask), weight_by_count[mask.bit_count()]


class QueryOracle:
    """Answers edge-presence queries against a hidden realization.

    Enforces the non-adaptive model: only edges declared in `allowed` may be
    queried, each distinct edge is charged once, and the total never exceeds
    the budget.
    """

    def __init__(self, realization: Realization, allowed: EdgeSet, budget: int):
        if allowed.universe != realization.base.m:
            raise ValidationError("allowed set does not match the graph")
        if budget < 0:
            raise ParameterError("budget must be non-negative")
        self._realization = realization
        self.allowed = allowed
        self.budget = budget
        self._answers: dict[int, bool] = {}

    @property
    def queries_used(self) -> int:
        return len(self._answers)

    def query(self, edge_index: int) -> bool:
        if edge_index not in self.allowed:
            raise QueryModelError(
                f"edge {edge_index} is outside the declared query set"
            )
        if edge_index in self._answers:
            return self._answers[edge_index]
        if self.queries_used >= self.budget:
            raise QueryBudgetError(f"query budget {self.budget} exhausted")
        answer = self._realization.has_edge(edge_index)
        self._answers[edge_index] = answer
        return answer

    def verify_cover(self, cover: VertexSet) -> int:
        """Count realized edges missed by `cover` (bookkeeping, not queries)."""
        violations = 0
        cb = cover.bits
        for idx, (u, v) in enumerate(self._realization.base.edges):
            if self._realization.has_edge(idx) and not ((cb >> u) & 1 or (cb >> v) & 1):
                violations += 1
        return violations
