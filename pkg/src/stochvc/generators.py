"""Reproducible graph generators for experiments and tests."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ParameterError
from .graph import BaseGraph
from .rng import SeedSpec

GENERATOR_STREAM = 41


def erdos_renyi(n: int, density: float, seed: SeedSpec) -> BaseGraph:
    """Each of the n*(n-1)/2 pairs is an edge independently with prob density."""
    if n < 0:
        raise ParameterError("n must be non-negative")
    if not 0.0 <= density <= 1.0:
        raise ParameterError(f"density={density} outside [0, 1]")
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    if not pairs:
        return BaseGraph(n, [])
    u = seed.child(GENERATOR_STREAM).uniforms(0, len(pairs))
    return BaseGraph(n, [pair for pair, x in zip(pairs, u) if x < density])


def random_bipartite(a: int, b: int, density: float, seed: SeedSpec) -> BaseGraph:
    """Bipartite graph on parts 0..a-1 and a..a+b-1 with i.i.d. edges."""
    if a < 0 or b < 0:
        raise ParameterError("part sizes must be non-negative")
    if not 0.0 <= density <= 1.0:
        raise ParameterError(f"density={density} outside [0, 1]")
    pairs = [(u, a + v) for u in range(a) for v in range(b)]
    if not pairs:
        return BaseGraph(a + b, [])
    u = seed.child(GENERATOR_STREAM).uniforms(1, len(pairs))
    return BaseGraph(a + b, [pair for pair, x in zip(pairs, u) if x < density])


def star(leaves: int) -> BaseGraph:
    """Center vertex 0 joined to `leaves` leaf vertices."""
    if leaves < 0:
        raise ParameterError("leaf count must be non-negative")
    return BaseGraph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def clique(n: int) -> BaseGraph:
    if n < 0:
        raise ParameterError("n must be non-negative")
    return BaseGraph(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def disjoint_edges(k: int) -> BaseGraph:
    """k independent edges on 2k vertices; the concentration oracle instance."""
    if k < 0:
        raise ParameterError("k must be non-negative")
    return BaseGraph(2 * k, [(2 * i, 2 * i + 1) for i in range(k)])


def planted_seed_instance(spokes: int = 2, pad_pairs: int = 0) -> BaseGraph:
    """Demonstration instance for the greedy seed loop.

    A hub carrying `spokes` pendant spokes plus one pendant partner; the hub
    gets the highest id so single-edge ties resolve away from it, which puts
    its cover-membership probability at one half when p = 1/2 and spokes = 2.
    `pad_pairs` appends disjoint edges to enlarge the vertex count without
    touching the hub's neighborhood.
    """
    if spokes < 1:
        raise ParameterError("need at least one spoke")
    if pad_pairs < 0:
        raise ParameterError("pad_pairs must be non-negative")
    partner = spokes
    hub = spokes + 1
    edges = [(s, hub) for s in range(spokes)]
    edges.append((partner, hub))
    n = spokes + 2
    for i in range(pad_pairs):
        edges.append((n + 2 * i, n + 2 * i + 1))
    return BaseGraph(n + 2 * pad_pairs, edges)


@dataclass(frozen=True)
class GeneratorSpec:
    """Named generator plus its parameters, for configs and CLI dispatch."""

    kind: str
    params: dict = field(default_factory=dict)

    def describe(self) -> str:
        inner = ",".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        return f"{self.kind}({inner})"


def generate(spec: GeneratorSpec, seed: SeedSpec) -> BaseGraph:
    """Dispatch a GeneratorSpec; deterministic given the seed."""
    kind = spec.kind
    params = spec.params
    if kind == "erdos_renyi":
        return erdos_renyi(int(params["n"]), float(params["density"]), seed)
    if kind == "random_bipartite":
        return random_bipartite(
            int(params["a"]), int(params["b"]), float(params["density"]), seed
        )
    if kind == "star":
        return star(int(params["d"]))
    if kind == "clique":
        return clique(int(params["n"]))
    if kind == "disjoint_edges":
        return disjoint_edges(int(params["k"]))
    if kind == "planted_seed_instance":
        return planted_seed_instance(
            int(params.get("spokes", 2)), int(params.get("pad_pairs", 0))
        )
    raise ParameterError(f"unknown generator kind {kind!r}")
