"""Shared test oracles, all independent of the package's solver internals."""

from itertools import combinations

import pytest

from stochvc import BaseGraph, Realization, VertexSet


def covers(graph: BaseGraph, present: int, subset: tuple[int, ...]) -> bool:
    chosen = set(subset)
    for idx, (u, v) in enumerate(graph.edges):
        if (present >> idx) & 1 and u not in chosen and v not in chosen:
            return False
    return True


def brute_min_cover(graph: BaseGraph, present: int) -> tuple[int, ...]:
    """First covering subset in (size, sorted-tuple) order: the canonical cover."""
    for k in range(graph.n + 1):
        for combo in combinations(range(graph.n), k):
            if covers(graph, present, combo):
                return combo
    raise AssertionError("unreachable: the full vertex set covers everything")


def brute_min_cover_size(graph: BaseGraph, present: int) -> int:
    return len(brute_min_cover(graph, present))


def brute_cover_stats(graph: BaseGraph, p: float):
    """Exact (opt, c_v list, c_e list) by full enumeration with the brute oracle."""
    m = graph.m
    opt = 0.0
    cv = [0.0] * graph.n
    ce = [0.0] * m
    for mask in range(1 << m):
        weight = p ** mask.bit_count() * (1 - p) ** (m - mask.bit_count())
        cover = set(brute_min_cover(graph, mask))
        opt += weight * len(cover)
        for v in cover:
            cv[v] += weight
        for idx, (u, v) in enumerate(graph.edges):
            if u in cover or v in cover:
                ce[idx] += weight
    return opt, cv, ce


def vset(graph: BaseGraph, ids) -> VertexSet:
    return VertexSet.from_ids(graph.n, ids)


def full_realization(graph: BaseGraph) -> Realization:
    return Realization(graph, (1 << graph.m) - 1 if graph.m else 0)


@pytest.fixture
def triangle() -> BaseGraph:
    return BaseGraph(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def path3() -> BaseGraph:
    return BaseGraph(3, [(0, 1), (1, 2)])


@pytest.fixture
def single_edge() -> BaseGraph:
    return BaseGraph(2, [(0, 1)])


@pytest.fixture
def petersen() -> BaseGraph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return BaseGraph(10, outer + spokes + inner)
