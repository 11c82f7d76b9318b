"""Finite simple graphs with a fixed vertex order.

Vertices keep their declaration order; every listing (centers, dominating
pairs, induced subgraphs) follows it, so all outputs are deterministic.
Distances are shortest-path hop counts, math.inf across components.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from collections import deque
from itertools import combinations
from typing import Iterable

from .errors import InputError, ValidationError

__all__ = [
    "Graph",
    "distance",
    "eccentricity",
    "radius",
    "link",
    "induced",
    "complement",
    "is_irreducible",
    "dominating_pairs",
    "centers",
]


@dataclass(frozen=True)
class Graph:
    """Simple graph; vertices is the declaration order, edges a frozenset of
    2-element frozensets over declared vertices."""

    vertices: tuple[str, ...]
    edges: frozenset[frozenset[str]] = frozenset()
    # adjacency computed once; excluded from equality/hash
    _adj: dict[str, set[str]] = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self) -> None:
        seen = set()
        for v in self.vertices:
            if v in seen:
                raise ValidationError(f"duplicate vertex {v!r}")
            seen.add(v)
        adj: dict[str, set[str]] = {v: set() for v in self.vertices}
        for e in self.edges:
            pair = tuple(e)
            if len(pair) != 2:
                raise ValidationError(f"edge {sorted(e)!r} is not a 2-element set (loops are not allowed)")
            a, b = pair
            for x in (a, b):
                if x not in seen:
                    raise ValidationError(f"edge endpoint {x!r} is not a declared vertex")
            adj[a].add(b)
            adj[b].add(a)
        object.__setattr__(self, "_adj", adj)

    @staticmethod
    def build(vertices: Iterable[str], edges: Iterable[tuple[str, str]]) -> "Graph":
        """Build from vertex names and (a, b) pairs; rejects loops and duplicates."""
        vs = tuple(vertices)
        es = []
        seen_edges = set()
        for a, b in edges:
            if a == b:
                raise ValidationError(f"loop edge ({a!r}, {b!r}) is not allowed")
            key = frozenset((a, b))
            if key in seen_edges:
                raise ValidationError(f"duplicate edge ({a!r}, {b!r})")
            seen_edges.add(key)
            es.append(key)
        return Graph(vs, frozenset(es))

    def index(self, v: str) -> int:
        try:
            return self.vertices.index(v)
        except ValueError:
            raise InputError(f"unknown vertex {v!r}") from None

    def check_vertex(self, v: str) -> None:
        if v not in self._adj:
            raise InputError(f"unknown vertex {v!r}")

    def adjacent(self, a: str, b: str) -> bool:
        self.check_vertex(a)
        self.check_vertex(b)
        return b in self._adj[a]

    def neighbors(self, v: str) -> tuple[str, ...]:
        """Neighbors of v in declaration order."""
        self.check_vertex(v)
        return tuple(u for u in self.vertices if u in self._adj[v])

    @property
    def n(self) -> int:
        return len(self.vertices)


def distance(g: Graph, a: str, b: str) -> int | float:
    """BFS hop distance; math.inf when a and b lie in different components."""
    g.check_vertex(a)
    g.check_vertex(b)
    if a == b:
        return 0
    dist = {a: 0}
    queue = deque([a])
    while queue:
        cur = queue.popleft()
        for nxt in g._adj[cur]:
            if nxt not in dist:
                dist[nxt] = dist[cur] + 1
                if nxt == b:
                    return dist[nxt]
                queue.append(nxt)
    return math.inf


def eccentricity(g: Graph, v: str) -> int | float:
    g.check_vertex(v)
    return max(distance(g, v, w) for w in g.vertices)


def radius(g: Graph) -> int | float:
    """min over vertices of eccentricity; infinite for disconnected graphs."""
    if not g.vertices:
        raise InputError("radius of the empty graph is undefined")
    return min(eccentricity(g, v) for v in g.vertices)


def link(g: Graph, v: str) -> tuple[str, ...]:
    """The neighbors of v (the subgraph they span is induced(g, link))."""
    return g.neighbors(v)


def induced(g: Graph, vs: Iterable[str]) -> Graph:
    """Induced subgraph on vs, keeping the ambient declaration order."""
    want = set()
    for v in vs:
        g.check_vertex(v)
        want.add(v)
    kept = tuple(v for v in g.vertices if v in want)
    es = frozenset(e for e in g.edges if e <= want)
    return Graph(kept, es)


def complement(g: Graph) -> Graph:
    """Same vertices; edges exactly the missing non-loop pairs."""
    es = frozenset(
        frozenset((a, b))
        for a, b in combinations(g.vertices, 2)
        if not g.adjacent(a, b)
    )
    return Graph(g.vertices, es)


def _connected(g: Graph) -> bool:
    if g.n <= 1:
        return True
    start = g.vertices[0]
    seen = {start}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        for nxt in g._adj[cur]:
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return len(seen) == g.n


def is_irreducible(g: Graph) -> bool:
    """True when the complement is connected, i.e. the graph product does not
    split as a direct product over a vertex partition."""
    if not g.vertices:
        raise InputError("irreducibility of the empty graph is undefined")
    return _connected(complement(g))


def dominating_pairs(g: Graph) -> list[frozenset[str]]:
    """Unordered pairs {v1, v2} with every other vertex adjacent to both,
    sorted by (index(min), index(max)). Vacuously every pair when n == 2."""
    out = []
    for v1, v2 in combinations(g.vertices, 2):
        if all(g.adjacent(u, v1) and g.adjacent(u, v2) for u in g.vertices if u not in (v1, v2)):
            out.append(frozenset((v1, v2)))
    return out  # combinations() already walks declaration order


def centers(g: Graph) -> list[str]:
    """Vertices adjacent to every other vertex, in declaration order.
    The single vertex of a 1-vertex graph is a center vacuously."""
    return [v for v in g.vertices if all(g.adjacent(v, u) for u in g.vertices if u != v)]
