"""JSON problem descriptions.

A spec file describes one graph product:

    {
      "vertices": [{"name": "a", "group": {"kind": "cyclic", "n": 2}}, ...],
      "edges": [["a", "b"], ...],
      "conventions": {"finite_groups_pp": true}        // optional
    }

Group descriptors: {"kind": "cyclic" | "dihedral" | "symmetric", "n": int},
{"kind": "table", "names": [str], "table": [[int]]}, or {"kind": "abstract",
"order": "infinite" | int}, each optionally carrying the fact flags
"properly_proximal", "amenable", "weakly_amenable_cstar1" as "true" /
"false" / "unknown".

Parsing validates everything with errors naming the offending field and
returns the graph, a fact-closed assignment, and the conventions.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Mapping

from . import groups as G
from .errors import InputError
from .graphs import Graph

__all__ = ["parse_spec", "parse_spec_text", "spec_from_dict", "spec_to_dict"]

ParsedSpec = tuple[Graph, dict[str, G.GroupSpec], G.Conventions]


def spec_from_dict(data: object) -> ParsedSpec:
    if not isinstance(data, Mapping):
        raise InputError(f"spec must be a JSON object, got {type(data).__name__}")
    extra = set(data) - {"vertices", "edges", "conventions"}
    if extra:
        raise InputError(f"unknown top-level field(s): {sorted(extra)}")
    if "vertices" not in data:
        raise InputError("spec needs a 'vertices' list")
    raw_vertices = data["vertices"]
    if not isinstance(raw_vertices, list):
        raise InputError("'vertices' must be a list")

    names: list[str] = []
    assignment: dict[str, G.GroupSpec] = {}
    for i, entry in enumerate(raw_vertices):
        where = f"vertices[{i}]"
        if not isinstance(entry, Mapping):
            raise InputError(f"{where}: must be an object with 'name' and 'group'")
        bad = set(entry) - {"name", "group"}
        if bad:
            raise InputError(f"{where}: unknown field(s) {sorted(bad)}")
        name = entry.get("name")
        if not isinstance(name, str) or not name:
            raise InputError(f"{where}: 'name' must be a non-empty string")
        if any(c.isspace() for c in name) or ":" in name:
            raise InputError(
                f"{where}: name {name!r} must not contain whitespace or ':'"
            )
        if name in assignment:
            raise InputError(f"{where}: duplicate vertex name {name!r}")
        if "group" not in entry:
            raise InputError(f"{where}: missing 'group' descriptor")
        try:
            assignment[name] = G.build_group(entry["group"])
        except InputError as e:
            raise InputError(f"{where}.group: {e}") from e
        names.append(name)

    raw_edges = data.get("edges", [])
    if not isinstance(raw_edges, list):
        raise InputError("'edges' must be a list of 2-element name lists")
    edges: list[tuple[str, str]] = []
    seen_edges: set[frozenset[str]] = set()
    for i, pair in enumerate(raw_edges):
        where = f"edges[{i}]"
        if (
            not isinstance(pair, (list, tuple))
            or len(pair) != 2
            or not all(isinstance(x, str) for x in pair)
        ):
            raise InputError(f"{where}: must be a 2-element list of vertex names")
        a, b = pair
        if a == b:
            raise InputError(f"{where}: loop edge [{a!r}, {b!r}] is not allowed")
        for x in (a, b):
            if x not in assignment:
                raise InputError(f"{where}: unknown vertex {x!r}")
        key = frozenset((a, b))
        if key in seen_edges:
            raise InputError(f"{where}: duplicate edge [{a!r}, {b!r}]")
        seen_edges.add(key)
        edges.append((a, b))

    raw_conv = data.get("conventions")
    if raw_conv is None:
        conventions = G.Conventions()
    else:
        if not isinstance(raw_conv, Mapping):
            raise InputError("'conventions' must be an object")
        bad = set(raw_conv) - {"finite_groups_pp"}
        if bad:
            raise InputError(f"conventions: unknown field(s) {sorted(bad)}")
        flag = raw_conv.get("finite_groups_pp", True)
        if not isinstance(flag, bool):
            raise InputError("conventions.finite_groups_pp must be a boolean")
        conventions = G.Conventions(finite_groups_pp=flag)

    graph = Graph.build(names, edges)
    closed = {v: G.derive_facts(s, conventions) for v, s in assignment.items()}
    return graph, closed, conventions


def parse_spec_text(text: str) -> ParsedSpec:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"spec is not valid JSON: {e}") from e
    return spec_from_dict(data)


def parse_spec(source: "str | Path") -> ParsedSpec:
    """Parse a spec from a path, or directly from JSON text (recognized by a
    leading '{')."""
    if isinstance(source, Path):
        text = _read(source)
    elif source.lstrip().startswith("{"):
        text = source
    else:
        text = _read(Path(source))
    return parse_spec_text(text)


def _read(path: Path) -> str:
    try:
        return path.read_text()
    except OSError as e:
        raise InputError(f"cannot read spec file {str(path)!r}: {e}") from e


def spec_to_dict(
    graph: Graph,
    assignment: Mapping[str, G.GroupSpec],
    conventions: G.Conventions = G.Conventions(),
) -> dict:
    """Echo a parsed spec back to the schema (fact flags as they stand)."""
    return {
        "vertices": [
            {"name": v, "group": G.group_to_descriptor(assignment[v])}
            for v in graph.vertices
        ],
        "edges": [sorted(e) for e in sorted(map(sorted, graph.edges))],
        "conventions": {"finite_groups_pp": conventions.finite_groups_pp},
    }
