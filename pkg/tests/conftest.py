"""Shared builders for the test suite."""
from __future__ import annotations

import pytest

from graphprox.graphs import Graph
from graphprox.groups import Conventions, abstract, cyclic, derive_facts
from graphprox.words import GraphProduct


def graph(vertices: str | list[str], edges: list[tuple[str, str]]) -> Graph:
    vs = list(vertices)
    return Graph.build(vs, edges)


def all_z2(g: Graph, config: Conventions = Conventions()) -> dict:
    return {v: derive_facts(cyclic(2), config) for v in g.vertices}


def gp(vertices: str | list[str], edges: list[tuple[str, str]], orders=None) -> GraphProduct:
    """Graph product of cyclic groups; orders defaults to all 2."""
    g = graph(vertices, edges)
    if orders is None:
        orders = [2] * g.n
    asn = {v: derive_facts(cyclic(n)) for v, n in zip(g.vertices, orders)}
    return GraphProduct(g, asn)


PATH3 = [("a", "b"), ("b", "c")]
PATH4 = [("a", "b"), ("b", "c"), ("c", "d")]
CYCLE4 = [("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")]
CYCLE5 = [("a", "b"), ("b", "c"), ("c", "d"), ("d", "e"), ("e", "a")]
TRIANGLE = [("a", "b"), ("b", "c"), ("a", "c")]


@pytest.fixture
def z3z3() -> GraphProduct:
    """Free product of two cyclic groups of order 3, vertices u and w."""
    return gp(["u", "w"], [], orders=[3, 3])


@pytest.fixture
def p3() -> GraphProduct:
    """Path a - b - c, all vertex groups of order 2."""
    return gp("abc", PATH3)


def spec_dict(vertices, edges, groups=None, conventions=None) -> dict:
    """Service/CLI request payload for a product of cyclic groups."""
    vs = list(vertices)
    if groups is None:
        groups = [{"kind": "cyclic", "n": 2}] * len(vs)
    out: dict = {
        "vertices": [{"name": v, "group": g} for v, g in zip(vs, groups)],
        "edges": [[a, b] for a, b in edges],
    }
    if conventions is not None:
        out["conventions"] = conventions
    return out
