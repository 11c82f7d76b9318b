"""Desk-scale Bass-Serre tree simulator for an amalgam decomposition.

The tree of G1 *_H G2 has vertex set G/G1 | G/G2 and edge set G/H, an edge
gH joining gG1 and gG2; the group acts by left multiplication. This module
materializes the ball of a chosen radius around the base vertex eG1, acts on
it, computes Gromov products and membership in the basic open sets U(x, F),
and runs an empirical relative north-south dynamics experiment.

Neighbors of gGi are g*t*Gj for t running over a left-coset transversal of
H in Gi (g*t*Gj = g*t'*Gj exactly when tH = t'H, so left cosets index the
neighbors). Cosets are named by their least canonical word, computed as a
minimum over the finite side subgroup, so vertex identity is exact.

Image vertices under the action are tracked through normal-word arithmetic
rather than by growing the ball: the geodesic from the base to g*Gc reads
off the syllables of the normal word of g, one hop per side change. That
keeps deep images cheap while the materialized ball stays small.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .amalgam import (
    AmalgamDecomposition,
    coset_transversal,
    escape_certification,
    normal_word,
)
from .errors import InputError, InternalError, OutOfBallError, ResourceBoundError
from .words import (
    Packed,
    _ball_packed_ex,
    _canonical_packed,
    _invert_packed,
    _pack,
    _unpack,
    format_word,
)

__all__ = [
    "TreeVertex",
    "TreeEdge",
    "TreeBall",
    "EndProxy",
    "build_ball",
    "act",
    "gromov_product",
    "u_membership",
    "dynamics_experiment",
    "to_dot",
]


@dataclass(frozen=True)
class TreeVertex:
    index: int
    side: int
    depth: int
    rep: "object"  # Word; kept loose to avoid a circular annotation import
    key: Packed
    parent: int | None
    parent_edge: int | None

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "side": self.side,
            "depth": self.depth,
            "coset_rep": format_word(self.rep),
        }


@dataclass(frozen=True)
class TreeEdge:
    index: int
    rep: "object"  # Word
    key: Packed
    endpoints: tuple[int, int]

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "coset_rep": format_word(self.rep),
            "endpoints": list(self.endpoints),
        }


@dataclass(frozen=True)
class EndProxy:
    """A depth-R vertex standing in for the ends of the tree beyond it."""

    vertex: int


class TreeBall:
    """The ball of the given radius around the base vertex eG1. Immutable
    after construction; the constructor verifies the tree invariants."""

    def __init__(
        self,
        decomposition: AmalgamDecomposition,
        radius: int,
        length_bound: int,
        vertices: Sequence[TreeVertex],
        edges: Sequence[TreeEdge],
        base: int,
        side_elements: tuple[tuple[Packed, ...], tuple[Packed, ...]],
        h_elements: tuple[Packed, ...],
        indices: tuple[int, int],
    ):
        self.decomposition = decomposition
        self.radius = radius
        self.length_bound = length_bound
        self.vertices = tuple(vertices)
        self.edges = tuple(edges)
        self.base = base
        self.side_elements = side_elements
        self.h_elements = h_elements
        self.indices = indices  # ([G1:H], [G2:H])
        self._by_key: dict[tuple[int, Packed], int] = {
            (v.side, v.key): v.index for v in self.vertices
        }
        self._verify()

    # -- invariants ---------------------------------------------------------

    def _verify(self) -> None:
        n, m = len(self.vertices), len(self.edges)
        if m != n - 1:
            raise InternalError(f"ball is not a tree: {n} vertices, {m} edges")
        if len(self._by_key) != n:
            raise InternalError("distinct vertices share a (side, coset) pair")
        seen = {self.base}
        adj: dict[int, list[int]] = {v.index: [] for v in self.vertices}
        for e in self.edges:
            a, b = e.endpoints
            adj[a].append(b)
            adj[b].append(a)
        frontier = [self.base]
        while frontier:
            nxt = []
            for x in frontier:
                for y in adj[x]:
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        if len(seen) != n:
            raise InternalError("ball is not connected")
        for v in self.vertices:
            if v.depth < self.radius:
                want = self.indices[v.side - 1]
                got = len(adj[v.index])
                if got != want:
                    raise InternalError(
                        f"interior side-{v.side} vertex {v.index} has degree "
                        f"{got}, expected the index {want}"
                    )

    # -- navigation ---------------------------------------------------------

    def check_vertex(self, x: int) -> int:
        if not (0 <= x < len(self.vertices)):
            raise InputError(f"no vertex {x} in a ball with {len(self.vertices)} vertices")
        return x

    def _resolve(self, x: "int | EndProxy") -> int:
        if isinstance(x, EndProxy):
            v = self.check_vertex(x.vertex)
            if self.vertices[v].depth != self.radius:
                raise InputError(
                    f"end proxy must sit on the sphere of radius {self.radius}"
                )
            return v
        return self.check_vertex(x)

    def path_edges(self, x: int, y: int) -> list[int]:
        """Edge indices along the geodesic from x to y."""
        vs = self.vertices
        up_x: list[int] = []
        up_y: list[int] = []
        while vs[x].depth > vs[y].depth:
            up_x.append(vs[x].parent_edge)
            x = vs[x].parent
        while vs[y].depth > vs[x].depth:
            up_y.append(vs[y].parent_edge)
            y = vs[y].parent
        while x != y:
            up_x.append(vs[x].parent_edge)
            up_y.append(vs[y].parent_edge)
            x, y = vs[x].parent, vs[y].parent
        return up_x + up_y[::-1]

    def distance(self, x: int, y: int) -> int:
        return len(self.path_edges(self.check_vertex(x), self.check_vertex(y)))

    def end_proxy(self, x: int) -> EndProxy:
        self.check_vertex(x)
        if self.vertices[x].depth != self.radius:
            raise InputError("end proxies live on the sphere of radius R")
        return EndProxy(x)

    def to_dict(self) -> dict:
        return {
            "radius": self.radius,
            "base": self.base,
            "indices": list(self.indices),
            "vertices": [v.to_dict() for v in self.vertices],
            "edges": [e.to_dict() for e in self.edges],
        }


# ---------------------------------------------------------------------------
# coset keys


def _least_member(
    ctx, prefix: Packed, members: Sequence[Packed]
) -> Packed:
    """Least canonical word (length, then letters) in prefix * {members}."""
    best: Packed | None = None
    for m in members:
        cand = _canonical_packed(ctx, prefix + m)
        if best is None or (len(cand), cand) < (len(best), best):
            best = cand
    if best is None:
        raise InternalError("coset has no members")
    return best


def _side_data(
    dec: AmalgamDecomposition, length_bound: int
) -> tuple[tuple[tuple[Packed, ...], tuple[Packed, ...]], tuple[Packed, ...], tuple[int, int], tuple]:
    """Full side subgroups, the H subgroup, the two indices [Gi:H], and the
    left transversals; resource-bound error when anything fails to saturate
    within the length bound."""
    ctx = dec.context
    sides: list[tuple[Packed, ...]] = []
    trans = []
    for side in (1, 2):
        idxs = dec.side_indices[side - 1]
        elems, saturated = _ball_packed_ex(ctx, length_bound, idxs, check_saturation=True)
        if not saturated:
            raise ResourceBoundError(
                f"side-{side} subgroup did not saturate within length bound "
                f"{length_bound}; retry with a larger bound (finite sides only)"
            )
        sides.append(tuple(elems))
        t = coset_transversal(dec, side, length_bound, left=True)
        if not t.complete:
            raise ResourceBoundError(
                f"incomplete side-{side} transversal at length bound {length_bound}"
            )
        trans.append(t)
    h_idxs = tuple(ctx.index[v] for v in dec.h_vertices)
    h_elems, h_sat = _ball_packed_ex(ctx, length_bound, h_idxs, check_saturation=True)
    if not h_sat:
        raise ResourceBoundError(
            f"amalgamated subgroup did not saturate within length bound {length_bound}"
        )
    indices = (len(trans[0]), len(trans[1]))
    return (sides[0], sides[1]), tuple(h_elems), indices, tuple(trans)


def build_ball(
    dec: AmalgamDecomposition, radius: int, length_bound: int | None = None
) -> TreeBall:
    """BFS the tree ball of the given radius from eG1. The length bound caps
    internal word lengths (transversal and subgroup enumeration and coset
    reps); exceeding it raises a resource-bound error suggesting a larger
    bound. Vertices are indexed by (depth, coset rep), the base first."""
    if radius < 0:
        raise InputError(f"radius must be >= 0, got {radius}")
    ctx = dec.context
    if length_bound is None:
        length_bound = 2 * radius + 4
    side_elems, h_elems, indices, trans = _side_data(dec, length_bound)
    trans_packed = tuple(tuple(_pack(t) for t in tr.reps) for tr in trans)

    # records grow as (side, key, depth, parent, parent_edge)
    recs: list[tuple[int, Packed, int, int | None, int | None]] = [(1, (), 0, None, None)]
    by_key: dict[tuple[int, Packed], int] = {(1, ()): 0}
    edge_recs: list[tuple[Packed, int, int]] = []
    frontier = [0]
    for depth in range(radius):
        nxt: list[int] = []
        for cur in frontier:
            side, key = recs[cur][0], recs[cur][1]
            other = 2 if side == 1 else 1
            for t in trans_packed[side - 1]:
                g = _canonical_packed(ctx, key + t)
                vkey = _least_member(ctx, g, side_elems[other - 1])
                if len(vkey) > length_bound:
                    raise ResourceBoundError(
                        f"coset rep of length {len(vkey)} exceeds the length "
                        f"bound {length_bound}; retry with a larger bound"
                    )
                ekey = _least_member(ctx, g, h_elems)
                found = by_key.get((other, vkey))
                if found is None:
                    idx = len(recs)
                    eidx = len(edge_recs)
                    edge_recs.append((ekey, cur, idx))
                    recs.append((other, vkey, depth + 1, cur, eidx))
                    by_key[(other, vkey)] = idx
                    nxt.append(idx)
                elif found != recs[cur][3]:
                    raise InternalError(
                        "BFS revisited a vertex other than the parent; not a tree"
                    )
        frontier = nxt

    # reindex deterministically by (depth, coset rep key)
    order = sorted(range(len(recs)), key=lambda i: (recs[i][2], recs[i][1]))
    newidx = {old: new for new, old in enumerate(order)}
    edge_order = sorted(
        range(len(edge_recs)),
        key=lambda e: (min(newidx[edge_recs[e][1]], newidx[edge_recs[e][2]]), edge_recs[e][0]),
    )
    new_eidx = {old: new for new, old in enumerate(edge_order)}
    vertices = []
    for new, old in enumerate(order):
        side, key, depth, parent, pedge = recs[old]
        vertices.append(
            TreeVertex(
                index=new,
                side=side,
                depth=depth,
                rep=_unpack(ctx, key),
                key=key,
                parent=None if parent is None else newidx[parent],
                parent_edge=None if pedge is None else new_eidx[pedge],
            )
        )
    edges = []
    for new, old in enumerate(edge_order):
        ekey, a, b = edge_recs[old]
        ends = tuple(sorted((newidx[a], newidx[b])))
        edges.append(TreeEdge(index=new, rep=_unpack(ctx, ekey), key=ekey, endpoints=ends))
    return TreeBall(
        decomposition=dec,
        radius=radius,
        length_bound=length_bound,
        vertices=vertices,
        edges=edges,
        base=newidx[0],
        side_elements=side_elems,
        h_elements=h_elems,
        indices=indices,
    )


# ---------------------------------------------------------------------------
# action, Gromov product, basic open sets


def act(ball: TreeBall, g, x: int) -> int:
    """The vertex of g * (coset of x); out-of-ball error when the image was
    not materialized (the caller may rebuild with a larger radius)."""
    ball.check_vertex(x)
    dec = ball.decomposition
    ctx = dec.context
    if g.context != ctx:
        raise InputError("word lives over a different graph product")
    v = ball.vertices[x]
    target = _canonical_packed(ctx, _pack(g) + v.key)
    vkey = _least_member(ctx, target, ball.side_elements[v.side - 1])
    found = ball._by_key.get((v.side, vkey))
    if found is None:
        raise OutOfBallError(
            f"image of vertex {x} lies outside the ball of radius {ball.radius}; "
            f"rebuild with a larger radius"
        )
    return found


def gromov_product(ball: TreeBall, x: int, y: int, o: int) -> int:
    """Distance from o to the median of the tripod on x, y, o."""
    ball.check_vertex(x), ball.check_vertex(y), ball.check_vertex(o)
    dxo = ball.distance(o, x)
    dyo = ball.distance(o, y)
    dxy = ball.distance(x, y)
    return (dxo + dyo - dxy) // 2


def u_membership(
    ball: TreeBall, x: "int | EndProxy", F: Iterable[int], y: "int | EndProxy"
) -> bool:
    """Whether y belongs to U(x, F): the geodesic between x and y avoids
    every edge of F, with x itself always a member."""
    fset = set()
    for e in F:
        if not (0 <= e < len(ball.edges)):
            raise InputError(f"no edge {e} in a ball with {len(ball.edges)} edges")
        fset.add(e)
    if x == y:
        return True
    xi = ball._resolve(x)
    yi = ball._resolve(y)
    if xi == yi:
        return True
    return not (fset and set(ball.path_edges(xi, yi)) & fset)


# ---------------------------------------------------------------------------
# virtual geodesics (no ball growth)


def _virtual_path(
    dec: AmalgamDecomposition,
    g_packed: Packed,
    target_side: int,
    side_elems: tuple[tuple[Packed, ...], tuple[Packed, ...]],
    h_elems: tuple[Packed, ...],
    budget: int,
    what: str,
) -> tuple[list[tuple[int, Packed]], list[Packed]]:
    """The geodesic from eG1 to g*G_target as (side, coset key) records plus
    the H-coset keys of its edges, one hop per side change of the normal
    word. Raises a resource-bound error beyond the depth budget."""
    ctx = dec.context
    nw = normal_word(dec, _unpack(ctx, g_packed))
    q: Packed = _pack(nw.h)
    side = 1
    verts: list[tuple[int, Packed]] = [(1, ())]
    edges: list[Packed] = []
    steps = [s for s, _ in nw.syllables]
    mults = [_pack(t) for _, t in nw.syllables]
    steps.append(target_side)
    mults.append(None)
    for s, t in zip(steps, mults):
        if s != side:
            edges.append(_least_member(ctx, q, h_elems))
            verts.append((s, _least_member(ctx, q, side_elems[s - 1])))
            side = s
            if len(verts) > budget:
                raise ResourceBoundError(
                    f"{what} exceeded the depth budget {budget}"
                )
        if t is not None:
            q = _canonical_packed(ctx, q + t)
    return verts, edges


def _common_prefix_depth(
    a: list[tuple[int, Packed]], b: list[tuple[int, Packed]]
) -> int:
    d = 0
    for x, y in zip(a, b):
        if x != y:
            break
        d += 1
    return d - 1  # depth of the deepest shared vertex


# ---------------------------------------------------------------------------
# dynamics


def dynamics_experiment(
    dec: AmalgamDecomposition,
    seq: Sequence,
    radius: int,
    scale: int = 3,
    F: Sequence[int] | None = None,
    length_bound: int | None = None,
    depth_budget: int = 512,
) -> dict:
    """Empirical relative north-south dynamics for the left action.

    Certifies that seq escapes small double cosets at the given scale
    (refusing to run otherwise), materializes the ball of the given radius,
    picks the attractor proxy a as the deepest vertex shared by the
    geodesics of the last two seq[n]*base, the repeller r likewise from the
    inverse sequence, and reports for every tracked vertex x of the ball
    whether seq[n]*x eventually enters U(a, F) within the data.

    F is a set of edge indices of the built ball; by default the edge at
    distance 2 from the base on the repeller side. Images are tracked by
    normal-word arithmetic, so they may run beyond the ball up to the depth
    budget; exceeding it raises a resource-bound error naming the n."""
    ctx = dec.context
    esc = escape_certification(dec, seq, scale)
    if not esc["certified"]:
        fail = esc["failure"]
        raise InputError(
            "sequence is not certified escaping at scale "
            f"{scale}: the last element stays in the double coset of "
            f"(t1, t2) = ({fail['t1'] or 'e'!r}, {fail['t2'] or 'e'!r}); "
            "dynamics experiment refuses to run"
        )
    ball = build_ball(dec, radius, length_bound)
    side_elems, h_elems = ball.side_elements, ball.h_elements
    sp = [_canonical_packed(ctx, _pack(w)) for w in seq]
    inv_sp = [_canonical_packed(ctx, _invert_packed(ctx, p)) for p in sp]

    def path_of(p: Packed, target_side: int, what: str):
        return _virtual_path(
            dec, p, target_side, side_elems, h_elems, depth_budget, what
        )

    base_paths = [path_of(p, 1, f"image of the base at n = {i + 1}") for i, p in enumerate(sp)]
    inv_paths = [path_of(p, 1, f"inverse image of the base at n = {i + 1}") for i, p in enumerate(inv_sp)]

    def proxy_from(paths):
        if len(paths) >= 2:
            d = _common_prefix_depth(paths[-1][0], paths[-2][0])
        else:
            d = len(paths[-1][0]) - 1
        verts, edges = paths[-1]
        return verts[: d + 1], edges[:d]

    a_verts, a_edges = proxy_from(base_paths)
    r_verts, r_edges = proxy_from(inv_paths)

    if F is None:
        if len(r_edges) >= 2:
            f_keys = {r_edges[1]}
        elif r_edges:
            f_keys = {r_edges[-1]}
        else:
            f_keys = set()
        f_desc = sorted(f_keys)
    else:
        f_keys = set()
        for e in F:
            if not (0 <= e < len(ball.edges)):
                raise InputError(
                    f"no edge {e} in a ball with {len(ball.edges)} edges"
                )
            f_keys.add(ball.edges[e].key)
        f_desc = sorted(f_keys)

    a_key = a_verts[-1]
    a_edge_set = set(a_edges)

    depths = [len(p[0]) - 1 for p in base_paths]
    tail = depths[len(depths) // 2 :]
    pattern = (
        "axis-translation"
        if depths[-1] > depths[0] and all(x <= y for x, y in zip(tail, tail[1:]))
        else "bounded-orbit"
    )

    rows = []
    converged_count = 0
    all_by: int | None = 0
    for v in ball.vertices:
        in_repeller = bool(f_keys) and bool(
            f_keys & set(_path_edge_keys(ball, v))
        )
        flags = []
        for i, p in enumerate(sp):
            y_verts, y_edges = path_of(
                _canonical_packed(ctx, p + v.key),
                v.side,
                f"image of vertex {v.index} at n = {i + 1}",
            )
            if y_verts[-1] == a_key:
                flags.append(True)
                continue
            crossing = a_edge_set ^ set(y_edges)
            flags.append(not (f_keys & crossing))
        first: int | None = None
        for i in range(len(flags) - 1, -1, -1):
            if flags[i]:
                first = i + 1  # 1-based n
            else:
                break
        converged = first is not None
        if converged:
            converged_count += 1
            if all_by is not None:
                all_by = max(all_by, first)
        else:
            all_by = None
        rows.append(
            {
                "index": v.index,
                "side": v.side,
                "depth": v.depth,
                "rep": format_word(v.rep),
                "proxy": v.depth == radius,
                "in_repeller_half": in_repeller,
                "per_n": flags,
                "first_converged_n": first,
                "converged": converged,
            }
        )

    exceptions = [r for r in rows if not r["converged"]]
    return {
        "decomposition": dec.to_dict(),
        "radius": radius,
        "scale": scale,
        "escape": esc,
        "pattern": pattern,
        "attractor": {
            "side": a_key[0],
            "rep": format_word(_unpack(ctx, a_key[1])),
            "depth": len(a_verts) - 1,
            "path_reps": [format_word(_unpack(ctx, k)) for _, k in a_verts],
        },
        "repeller": {
            "side": r_verts[-1][0],
            "rep": format_word(_unpack(ctx, r_verts[-1][1])),
            "depth": len(r_verts) - 1,
            "path_reps": [format_word(_unpack(ctx, k)) for _, k in r_verts],
        },
        "F": [format_word(_unpack(ctx, k)) for k in f_desc],
        "tracked": rows,
        "fraction_converging": converged_count / len(rows) if rows else 1.0,
        "all_converged_by_n": all_by,
        "exceptions": [
            {k: r[k] for k in ("index", "rep", "side", "depth", "in_repeller_half")}
            for r in exceptions
        ],
    }


def _path_edge_keys(ball: TreeBall, v: TreeVertex) -> list[Packed]:
    keys = []
    cur = v
    while cur.parent is not None:
        keys.append(ball.edges[cur.parent_edge].key)
        cur = ball.vertices[cur.parent]
    return keys


# ---------------------------------------------------------------------------
# DOT export


def _dot_quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(ball: TreeBall) -> str:
    """Graphviz text: side-1 vertices as circles, side-2 as squares, edges
    labeled by their H-coset reps; node order is (depth, canonical rep)."""
    lines = ["graph treeball {"]
    for v in ball.vertices:
        shape = "circle" if v.side == 1 else "square"
        label = format_word(v.rep) or "e"
        marker = " base" if v.index == ball.base else ""
        lines.append(
            f"  v{v.index} [label={_dot_quote(label)} shape={shape} "
            f"tooltip={_dot_quote(f'depth {v.depth}{marker}')}];"
        )
    for e in ball.edges:
        a, b = e.endpoints
        label = format_word(e.rep) or "e"
        lines.append(f"  v{a} -- v{b} [label={_dot_quote(label)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
