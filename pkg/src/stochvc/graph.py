"""Base graph representation: dense vertex ids, stable edge indices, bitset views."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import GraphParseError, ValidationError


@dataclass(frozen=True)
class _BitSet:
    """Membership bit-vector over a fixed universe 0..universe-1."""

    universe: int
    bits: int = 0

    def __post_init__(self):
        if self.universe < 0:
            raise ValidationError("universe must be non-negative")
        if self.bits < 0 or self.bits >> self.universe:
            raise ValidationError("set index out of range")

    @classmethod
    def from_ids(cls, universe: int, ids: Iterable[int]):
        bits = 0
        for i in ids:
            if not 0 <= i < universe:
                raise ValidationError(f"index {i} outside 0..{universe - 1}")
            bits |= 1 << i
        return cls(universe, bits)

    def size(self) -> int:
        return self.bits.bit_count()

    def __len__(self) -> int:
        return self.size()

    def __bool__(self) -> bool:
        return self.bits != 0

    def __contains__(self, i: int) -> bool:
        return 0 <= i < self.universe and (self.bits >> i) & 1 == 1

    def __iter__(self) -> Iterator[int]:
        bits = self.bits
        while bits:
            low = bits & -bits
            yield low.bit_length() - 1
            bits ^= low

    def _check_same(self, other: "_BitSet"):
        if self.universe != other.universe:
            raise ValidationError("sets over different universes")

    def __or__(self, other):
        self._check_same(other)
        return type(self)(self.universe, self.bits | other.bits)

    def __and__(self, other):
        self._check_same(other)
        return type(self)(self.universe, self.bits & other.bits)

    def __sub__(self, other):
        self._check_same(other)
        return type(self)(self.universe, self.bits & ~other.bits)

    def complement(self):
        return type(self)(self.universe, ((1 << self.universe) - 1) ^ self.bits)

    def issubset(self, other: "_BitSet") -> bool:
        self._check_same(other)
        return self.bits & ~other.bits == 0

    def add(self, i: int):
        if not 0 <= i < self.universe:
            raise ValidationError(f"index {i} outside 0..{self.universe - 1}")
        return type(self)(self.universe, self.bits | (1 << i))

    def to_list(self) -> list[int]:
        return list(self)


class VertexSet(_BitSet):
    """Set of vertex ids."""


class EdgeSet(_BitSet):
    """Set of edge indices."""


class BaseGraph:
    """Undirected graph on vertex ids 0..n-1 with stable 0..m-1 edge indices.

    Immutable after construction; safe to share across workers. Each edge is
    stored once as (u, v) with u < v; adjacency lists carry the edge index.
    """

    def __init__(self, n: int, edges: Iterable[tuple[int, int]]):
        if n < 0:
            raise ValidationError("vertex count must be non-negative")
        self.n = n
        self.edges: list[tuple[int, int]] = []
        seen: set[tuple[int, int]] = set()
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValidationError(f"edge ({u},{v}) outside 0..{n - 1}")
            if u == v:
                raise ValidationError(f"self-loop at vertex {u}")
            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise ValidationError(f"duplicate edge ({key[0]},{key[1]})")
            seen.add(key)
            self.edges.append(key)
        self.m = len(self.edges)
        self.adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        self.adj_mask: list[int] = [0] * n
        self.incident_edges: list[int] = [0] * n  # bitmask over edge indices
        for idx, (u, v) in enumerate(self.edges):
            self.adj[u].append((v, idx))
            self.adj[v].append((u, idx))
            self.adj_mask[u] |= 1 << v
            self.adj_mask[v] |= 1 << u
            self.incident_edges[u] |= 1 << idx
            self.incident_edges[v] |= 1 << idx

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def all_vertices(self) -> VertexSet:
        return VertexSet(self.n, (1 << self.n) - 1 if self.n else 0)

    def all_edges(self) -> EdgeSet:
        return EdgeSet(self.m, (1 << self.m) - 1 if self.m else 0)

    def edges_within(self, keep: VertexSet) -> EdgeSet:
        """Edge indices with both endpoints in `keep`."""
        bits = 0
        kb = keep.bits
        for idx, (u, v) in enumerate(self.edges):
            if (kb >> u) & 1 and (kb >> v) & 1:
                bits |= 1 << idx
        return EdgeSet(self.m, bits)

    def count_edges_within(self, keep: VertexSet) -> int:
        return self.edges_within(keep).size()

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BaseGraph)
            and self.n == other.n
            and self.edges == other.edges
        )

    def __hash__(self):
        return hash((self.n, tuple(self.edges)))

    def __repr__(self) -> str:
        return f"BaseGraph(n={self.n}, m={self.m})"


@dataclass(frozen=True)
class InducedSubgraph:
    """Subgraph on a vertex subset, reindexed densely, with back-maps.

    `vertices[i]` is the original id of local vertex i; `edge_map[j]` is the
    original index of local edge j.
    """

    graph: BaseGraph
    vertices: list[int]
    edge_map: list[int]

    def to_local(self, global_set: VertexSet) -> VertexSet:
        bits = 0
        for local, original in enumerate(self.vertices):
            if original in global_set:
                bits |= 1 << local
        return VertexSet(self.graph.n, bits)

    def to_global(self, local_set: VertexSet, n_global: int) -> VertexSet:
        bits = 0
        for local in local_set:
            bits |= 1 << self.vertices[local]
        return VertexSet(n_global, bits)


def induced_subgraph(g: BaseGraph, keep: VertexSet) -> InducedSubgraph:
    """Subgraph of `g` on `keep`, keeping only edges inside `keep`."""
    vertices = keep.to_list()
    local_of = {orig: i for i, orig in enumerate(vertices)}
    edges = []
    edge_map = []
    for idx, (u, v) in enumerate(g.edges):
        if u in local_of and v in local_of:
            edges.append((local_of[u], local_of[v]))
            edge_map.append(idx)
    return InducedSubgraph(BaseGraph(len(vertices), edges), vertices, edge_map)


def neighbors_within(g: BaseGraph, v: int, restrict: VertexSet) -> VertexSet:
    """N_g(v) intersected with `restrict`; v itself never included."""
    if not 0 <= v < g.n:
        raise ValidationError(f"vertex {v} outside 0..{g.n - 1}")
    return VertexSet(g.n, g.adj_mask[v] & restrict.bits & ~(1 << v))


def parse_edge_list(text: str | bytes) -> BaseGraph:
    """Parse the edge-list text format.

    First non-comment line is the vertex count, then one `u v` pair per line.
    Lines starting with `#` are ignored. Rejects self-loops and duplicates.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    n: int | None = None
    edges: list[tuple[int, int]] = []
    edge_lines: list[int] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if n is None:
            if len(parts) != 1:
                raise GraphParseError(line_no, "expected a single vertex count")
            try:
                n = int(parts[0])
            except ValueError:
                raise GraphParseError(line_no, f"bad vertex count {parts[0]!r}") from None
            if n < 0:
                raise GraphParseError(line_no, "vertex count must be non-negative")
            continue
        if len(parts) != 2:
            raise GraphParseError(line_no, f"expected `u v`, got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphParseError(line_no, f"non-integer endpoint in {line!r}") from None
        edges.append((u, v))
        edge_lines.append(line_no)
    if n is None:
        raise GraphParseError(1, "empty input")
    return BaseGraph(n, edges)


def serialize_edge_list(g: BaseGraph) -> str:
    """Canonical text form: round-trips bit-exactly through parse_edge_list."""
    lines = [str(g.n)]
    lines.extend(f"{u} {v}" for u, v in g.edges)
    return "\n".join(lines) + "\n"
