"""Words in a graph product and their normal forms.

A graph product assigns a group to each vertex of a simple graph; adjacent
vertex groups commute elementwise, and that is the only relation imposed.
A word is a sequence of letters (vertex, group element). A word is reduced
when it contains no identity letter and no pair of same-vertex letters
separated only by letters whose vertices are all adjacent to that vertex
(such a pair could be slid together and merged).

Reduced words represent a group element uniquely up to swapping adjacent
letters with commuting (adjacent) vertices. The canonical form fixes the
remaining freedom: repeatedly emit, among letters that can be slid to the
front, the one with the least vertex in declaration order. Two words are
equal in the group iff their canonical forms agree letter for letter.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from . import groups as G
from .errors import InputError, UnsupportedOperationError
from .graphs import Graph

__all__ = [
    "GraphProduct",
    "Letter",
    "Word",
    "reduce_word",
    "canonical",
    "multiply",
    "invert",
    "equals",
    "support",
    "in_parabolic",
    "enumerate_ball",
    "subsequence_products",
    "verify_intersection_lemma",
    "parse_word",
    "format_word",
    "word_key",
]

Packed = tuple[tuple[int, int], ...]


class GraphProduct:
    """A graph with a group assigned to every vertex (each of order >= 2)."""

    def __init__(self, graph: Graph, assignment: Mapping[str, G.GroupSpec]):
        self.graph = graph
        missing = [v for v in graph.vertices if v not in assignment]
        if missing:
            raise InputError(f"no group assigned to vertex {missing[0]!r}")
        extra = [v for v in assignment if v not in graph.vertices]
        if extra:
            raise InputError(f"assignment names unknown vertex {sorted(extra)[0]!r}")
        for v in graph.vertices:
            if assignment[v].order < 2:
                raise InputError(
                    f"vertex group at {v!r} must have order >= 2, got {assignment[v].describe()}"
                )
        self.groups: tuple[G.GroupSpec, ...] = tuple(assignment[v] for v in graph.vertices)
        self.index: dict[str, int] = {v: i for i, v in enumerate(graph.vertices)}
        self.adjmask: tuple[int, ...] = tuple(
            sum(1 << self.index[u] for u in graph.neighbors(v)) for v in graph.vertices
        )
        # lazy per-vertex arithmetic: (identity index, compose, inverse, order)
        self._rtl: list[tuple | None] = [None] * len(self.groups)

    def group_at(self, v: str) -> G.GroupSpec:
        return self.groups[self.graph.index(v)]

    @property
    def assignment(self) -> dict[str, G.GroupSpec]:
        return {v: self.groups[i] for i, v in enumerate(self.graph.vertices)}

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, GraphProduct)
            and self.graph == other.graph
            and self.groups == other.groups
        )

    def __hash__(self) -> int:
        return hash((self.graph, self.groups))

    # -- concrete arithmetic caches (built lazily per vertex) ---------------

    def _vrt(self, vi: int) -> tuple:
        """Arithmetic for vertex vi: (identity index, compose, inverse, order).
        Lazy so concrete fragments work inside a mixed product."""
        rt = self._rtl[vi]
        if rt is None:
            r = G._runtime(self.groups[vi])  # raises if the group is abstract
            rt = (r.identity, r.compose, r.inverse, r.order)
            self._rtl[vi] = rt
        return rt

    def require_concrete(self, what: str, vertices: Iterable[str] | None = None) -> None:
        vs = self.graph.vertices if vertices is None else tuple(vertices)
        for v in vs:
            spec = self.groups[self.index[v]]
            if not spec.concrete or not spec.finite:
                raise UnsupportedOperationError(
                    f"{what} needs concrete finite vertex groups, but {v!r} carries {spec.describe()}"
                )

    # -- construction helpers ----------------------------------------------

    def identity_word(self) -> "Word":
        return Word(self, ())

    def letter(self, v: str, element_text: str) -> "Letter":
        spec = self.group_at(v)
        return Letter(v, G.parse_element(spec, element_text))

    def word(self, text: str) -> "Word":
        return parse_word(self, text)


@dataclass(frozen=True)
class Letter:
    """One letter: a vertex and an element of its group. Identity elements are
    permitted here and removed by normalization."""

    vertex: str
    element: G.Element


@dataclass(frozen=True)
class Word:
    """A word over a graph product. Structural equality only; use equals()
    for equality as group elements."""

    context: GraphProduct
    letters: tuple[Letter, ...]

    def __post_init__(self) -> None:
        for l in self.letters:
            idx = self.context.index.get(l.vertex)
            if idx is None:
                raise InputError(f"letter uses unknown vertex {l.vertex!r}")
            if l.element.group != self.context.groups[idx]:
                raise InputError(
                    f"letter at vertex {l.vertex!r} carries an element of "
                    f"{l.element.group.describe()}, expected {self.context.groups[idx].describe()}"
                )

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return format_word(self)


# ---------------------------------------------------------------------------
# packed representation: ((vertex_index, element_index), ...)


def _pack(w: Word) -> Packed:
    ctx = w.context
    return tuple((ctx.index[l.vertex], l.element.index) for l in w.letters)


def _unpack(ctx: GraphProduct, packed: Iterable[tuple[int, int]]) -> Word:
    letters = tuple(
        Letter(ctx.graph.vertices[vi], G.Element(ctx.groups[vi], ei)) for vi, ei in packed
    )
    return Word(ctx, letters)


def _rts(ctx: GraphProduct, packed: Sequence[tuple[int, int]]) -> list:
    """The runtime list with every vertex used by packed filled in."""
    rtl = ctx._rtl
    for vi, _ in packed:
        if rtl[vi] is None:
            ctx._vrt(vi)
    return rtl


def _reduce_packed(ctx: GraphProduct, packed: Sequence[tuple[int, int]]) -> Packed:
    rt = _rts(ctx, packed)
    adj = ctx.adjmask
    out = [(vi, ei) for vi, ei in packed if ei != rt[vi][0]]
    changed = True
    while changed:
        changed = False
        n = len(out)
        for i in range(n):
            vi, ei = out[i]
            mask = adj[vi]
            for j in range(i + 1, n):
                vj, ej = out[j]
                if vj == vi:
                    merged = rt[vi][1](ei, ej)
                    del out[j]
                    if merged == rt[vi][0]:
                        del out[i]
                    else:
                        out[i] = (vi, merged)
                    changed = True
                    break
                if not (mask >> vj) & 1:
                    break
            if changed:
                break
    return tuple(out)


def _canonical_packed(ctx: GraphProduct, packed: Sequence[tuple[int, int]]) -> Packed:
    rem = list(_reduce_packed(ctx, packed))
    adj = ctx.adjmask
    out = []
    while rem:
        seen = 0
        best = -1
        best_v = None
        for p, (vi, _) in enumerate(rem):
            if seen & ~adj[vi] == 0 and (best_v is None or vi < best_v):
                best, best_v = p, vi
            seen |= 1 << vi
        out.append(rem.pop(best))
    return tuple(out)


def _invert_packed(ctx: GraphProduct, packed: Sequence[tuple[int, int]]) -> Packed:
    rt = _rts(ctx, packed)
    return tuple((vi, rt[vi][2](ei)) for vi, ei in reversed(packed))


def _support_mask(packed: Iterable[tuple[int, int]]) -> int:
    m = 0
    for vi, _ in packed:
        m |= 1 << vi
    return m


def _vertex_mask(ctx: GraphProduct, vs: Iterable[str]) -> int:
    m = 0
    for v in vs:
        ctx.graph.check_vertex(v)
        m |= 1 << ctx.index[v]
    return m


# ---------------------------------------------------------------------------
# public operations


def reduce_word(w: Word) -> Word:
    """Delete identity letters and merge same-vertex letters whenever all
    letters between them commute past; repeats to a fixpoint."""
    return _unpack(w.context, _reduce_packed(w.context, _pack(w)))


def canonical(w: Word) -> Word:
    """The canonical form: reduce, then greedily emit the least frontable
    vertex. Canonical forms are equal iff the words are equal in the group."""
    return _unpack(w.context, _canonical_packed(w.context, _pack(w)))


def _same_context(a: Word, b: Word) -> GraphProduct:
    if a.context != b.context:
        raise InputError("words live over different graph products")
    return a.context


def multiply(a: Word, b: Word) -> Word:
    ctx = _same_context(a, b)
    return _unpack(ctx, _canonical_packed(ctx, _pack(a) + _pack(b)))


def invert(a: Word) -> Word:
    ctx = a.context
    return _unpack(ctx, _canonical_packed(ctx, _invert_packed(ctx, _pack(a))))


def equals(a: Word, b: Word) -> bool:
    ctx = _same_context(a, b)
    return _canonical_packed(ctx, _pack(a)) == _canonical_packed(ctx, _pack(b))


def support(w: Word) -> frozenset[str]:
    """Vertices appearing in the reduced form (well-defined by uniqueness)."""
    red = _reduce_packed(w.context, _pack(w))
    return frozenset(w.context.graph.vertices[vi] for vi, _ in red)


def in_parabolic(w: Word, t: Iterable[str]) -> bool:
    """Whether w lies in the subgroup generated by the vertex groups of t."""
    mask = _vertex_mask(w.context, t)
    red = _reduce_packed(w.context, _pack(w))
    return _support_mask(red) & ~mask == 0


def word_key(w: Word) -> tuple:
    """Total order: by syllable length, then letter sequence. The word should
    already be canonical for the order to be meaningful across elements."""
    p = _pack(w)
    return (len(p), p)


def _generator_letters(
    ctx: GraphProduct, vertex_indices: Sequence[int] | None = None
) -> list[tuple[int, int]]:
    idxs = range(len(ctx.groups)) if vertex_indices is None else sorted(vertex_indices)
    names = [ctx.graph.vertices[i] for i in idxs]
    ctx.require_concrete("ball enumeration", names)
    gens = []
    for vi in idxs:
        ident, _, _, order = ctx._vrt(vi)
        gens.extend((vi, ei) for ei in range(order) if ei != ident)
    return gens


def _ball_packed_ex(
    ctx: GraphProduct,
    length: int,
    vertex_indices: Sequence[int] | None = None,
    check_saturation: bool = False,
) -> tuple[list[Packed], bool]:
    """Canonical packed words of syllable length <= length over the given
    vertices (None = all), sorted by (length, letters). The second value says
    whether enumeration saturated, i.e. the whole subgroup was reached; when
    check_saturation is set and the last round was full, one extra probe
    round decides it."""
    if length < 0:
        raise InputError(f"ball length must be >= 0, got {length}")
    gens = _generator_letters(ctx, vertex_indices)
    seen: dict[Packed, None] = {(): None}
    frontier: list[Packed] = [()]
    saturated = False
    for l in range(length):
        new: dict[Packed, None] = {}
        for cur in frontier:
            for g in gens:
                cand = _canonical_packed(ctx, cur + (g,))
                if len(cand) == l + 1 and cand not in seen and cand not in new:
                    new[cand] = None
        seen.update(new)
        frontier = sorted(new)
        if not frontier:
            saturated = True
            break
    else:
        if check_saturation:
            saturated = not any(
                _canonical_packed(ctx, cur + (g,)) not in seen
                for cur in frontier
                for g in gens
            )
    return sorted(seen, key=lambda p: (len(p), p)), saturated


def _ball_packed(ctx: GraphProduct, length: int) -> list[Packed]:
    """All canonical packed words of syllable length <= length, sorted."""
    return _ball_packed_ex(ctx, length)[0]


def enumerate_ball(ctx: GraphProduct, length: int) -> list[Word]:
    """Every group element of syllable length <= length, as canonical words
    sorted by (length, letter sequence). Needs concrete finite vertex groups."""
    return [_unpack(ctx, p) for p in _ball_packed(ctx, length)]


def subsequence_products(w: Word) -> list[Word]:
    """Products of order-preserved subsequences of the reduced letters of w,
    deduplicated, full subsequence first."""
    ctx = w.context
    red = _reduce_packed(ctx, _pack(w))
    k = len(red)
    out: dict[Packed, None] = {}
    for mask in range((1 << k) - 1, -1, -1):
        sub = tuple(red[i] for i in range(k) if (mask >> i) & 1)
        cand = _canonical_packed(ctx, sub)
        if cand not in out:
            out[cand] = None
    return [_unpack(ctx, p) for p in out]


def verify_intersection_lemma(
    ctx: GraphProduct,
    t1: Iterable[str],
    t2: Iterable[str],
    g: Word,
    h: Word,
    length: int,
    ball: Sequence[Word] | None = None,
) -> dict:
    """Check, over the ball of radius `length`, that every element of
    parabolic(t1) intersect g*parabolic(t2)*h lies in some c*parabolic(t1&t2)*d
    where c, d run over subsequence products of g and h.

    Returns a report dict with "pass" and the first counterexample if any.
    """
    t1m = _vertex_mask(ctx, t1)
    t2m = _vertex_mask(ctx, t2)
    meet = t1m & t2m
    if ball is None:
        ball = enumerate_ball(ctx, length)
    cs = [_pack(c) for c in subsequence_products(g)]
    ds = [_pack(d) for d in subsequence_products(h)]
    pairs = [(_invert_packed(ctx, c), _invert_packed(ctx, d)) for c in cs for d in ds]
    gp_, hp_ = _pack(g), _pack(h)
    checked = 0
    for x in ball:
        xp = _pack(x)
        if _support_mask(xp) & ~t2m:
            continue
        w = _canonical_packed(ctx, gp_ + xp + hp_)
        if _support_mask(w) & ~t1m:
            continue
        checked += 1
        ok = any(
            _support_mask(_reduce_packed(ctx, ci + w + di)) & ~meet == 0
            for ci, di in pairs
        )
        if not ok:
            return {
                "pass": False,
                "scale": length,
                "checked": checked,
                "counterexample": {
                    "x": format_word(_unpack(ctx, xp)),
                    "w": format_word(_unpack(ctx, w)),
                },
            }
    return {"pass": True, "scale": length, "checked": checked, "counterexample": None}


# ---------------------------------------------------------------------------
# text grammar: whitespace-separated "vertex:element" tokens


def parse_word(ctx: GraphProduct, text: str) -> Word:
    """Parse "a:1 b:r^2 s c:231"; the empty string is the identity. Fragments
    without a colon attach to the preceding token (dihedral names contain a
    space)."""
    raw = text.split()
    tokens: list[str] = []
    for frag in raw:
        if ":" in frag:
            tokens.append(frag)
        elif tokens:
            tokens[-1] += " " + frag
        else:
            raise InputError(f"malformed word token {frag!r} (want vertex:element)")
    letters = []
    for tok in tokens:
        v, _, etext = tok.partition(":")
        if not v or not etext:
            raise InputError(f"malformed word token {tok!r} (want vertex:element)")
        ctx.graph.check_vertex(v)
        letters.append(Letter(v, G.parse_element(ctx.group_at(v), etext)))
    return Word(ctx, tuple(letters))


def format_word(w: Word) -> str:
    return " ".join(f"{l.vertex}:{G.element_name(l.element)}" for l in w.letters)
