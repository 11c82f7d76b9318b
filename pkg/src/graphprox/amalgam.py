"""Amalgamated free product structure of a graph product at a vertex.

Removing a vertex v splits the graph product as G1 *_H G2, where G1 is the
parabolic subgroup on star(v) = {v} | link(v), G2 the one on V \\ {v}, and
H the one on link(v). H is a direct factor of G1 (G1 = G_v x H), so the
splitting is degenerate exactly when G2 = H, i.e. when v is a center.

This module builds coset transversals for the two sides, computes normal
words h * t_1 ... t_k with h in H and the t_j alternating transversal
representatives, classifies elements by the side of the first syllable, and
runs two bounded experiments: certification that a sequence escapes every
small double coset t1 * H' * t2, and an almost-malnormality scan.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Mapping, Sequence

from . import groups as G
from .errors import InputError, InternalError, ResourceBoundError
from .graphs import Graph
from .words import (
    GraphProduct,
    Word,
    Packed,
    _ball_packed,
    _ball_packed_ex,
    _canonical_packed,
    _invert_packed,
    _pack,
    _reduce_packed,
    _support_mask,
    _unpack,
    canonical,
    format_word,
    multiply,
)

__all__ = [
    "AmalgamDecomposition",
    "Transversal",
    "NormalWord",
    "TYPE_ONE",
    "TYPE_TWO",
    "TYPE_HPART",
    "decompose",
    "decompose_at_vertex",
    "coset_transversal",
    "normal_word",
    "syllable_type",
    "escape_certification",
    "invariance_check",
    "malnormality_scan",
]

TYPE_ONE = "One"
TYPE_TWO = "Two"
TYPE_HPART = "Hpart"


@dataclass(frozen=True)
class AmalgamDecomposition:
    """The splitting of a graph product at a vertex.

    g1_vertices = star(v), g2_vertices = V \\ {v}, h_vertices = link(v);
    the intersection of the sides is H and their union is everything.
    """

    context: GraphProduct
    vertex: str
    g1_vertices: tuple[str, ...]
    g2_vertices: tuple[str, ...]
    h_vertices: tuple[str, ...]

    @property
    def degenerate(self) -> bool:
        """Whether G2 = H, i.e. the vertex is adjacent to all others."""
        return self.g2_vertices == self.h_vertices

    @cached_property
    def h_mask(self) -> int:
        idx = self.context.index
        return sum(1 << idx[v] for v in self.h_vertices)

    @cached_property
    def side_indices(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        idx = self.context.index
        return (
            tuple(idx[v] for v in self.g1_vertices),
            tuple(idx[v] for v in self.g2_vertices),
        )

    def side_vertices(self, side: int) -> tuple[str, ...]:
        if side == 1:
            return self.g1_vertices
        if side == 2:
            return self.g2_vertices
        raise InputError(f"side must be 1 or 2, got {side!r}")

    def to_dict(self) -> dict:
        return {
            "vertex": self.vertex,
            "g1_vertices": list(self.g1_vertices),
            "g2_vertices": list(self.g2_vertices),
            "h_vertices": list(self.h_vertices),
            "degenerate": self.degenerate,
        }


def decompose(ctx: GraphProduct, vertex: str) -> AmalgamDecomposition:
    g = ctx.graph
    g.check_vertex(vertex)
    if g.n < 2:
        raise InputError(
            "decomposition needs at least 2 vertices; removing the only vertex is degenerate"
        )
    link = tuple(g.neighbors(vertex))
    star = tuple(v for v in g.vertices if v == vertex or g.adjacent(v, vertex))
    rest = tuple(v for v in g.vertices if v != vertex)
    return AmalgamDecomposition(ctx, vertex, star, rest, link)


def decompose_at_vertex(
    graph: Graph, assignment: Mapping[str, G.GroupSpec], vertex: str
) -> AmalgamDecomposition:
    """Split Gamma(G) at a vertex as G1 *_H G2 (see module docstring)."""
    return decompose(GraphProduct(graph, assignment), vertex)


# ---------------------------------------------------------------------------
# coset transversals


@dataclass(frozen=True)
class Transversal:
    """Representatives of distinct H-cosets among side-subgroup elements of
    syllable length <= length_bound; each rep is the least canonical word of
    its coset (by length, then letters), so the identity represents H itself.

    Right cosets Hx by default; left cosets xH when left is set (the tree
    layer needs left ones). complete means the side subgroup was finite and
    fully enumerated, so the reps cover every coset.
    """

    decomposition: AmalgamDecomposition
    side: int
    reps: tuple[Word, ...]
    complete: bool
    length_bound: int
    left: bool = False

    def __iter__(self):
        return iter(self.reps)

    def __len__(self) -> int:
        return len(self.reps)

    def __getitem__(self, i: int) -> Word:
        return self.reps[i]


def _in_same_coset(
    ctx: GraphProduct, hmask: int, x: Packed, t: Packed, left: bool
) -> bool:
    if left:
        d = _reduce_packed(ctx, _invert_packed(ctx, t) + tuple(x))
    else:
        d = _reduce_packed(ctx, tuple(x) + _invert_packed(ctx, t))
    return _support_mask(d) & ~hmask == 0


def _build_transversal(
    dec: AmalgamDecomposition, side: int, length_bound: int, left: bool
) -> Transversal:
    ctx = dec.context
    idxs = dec.side_indices[side - 1]
    elems, saturated = _ball_packed_ex(ctx, length_bound, idxs, check_saturation=True)
    hmask = dec.h_mask
    reps: list[Packed] = []
    for x in elems:
        if not any(_in_same_coset(ctx, hmask, x, t, left) for t in reps):
            reps.append(x)
    return Transversal(
        decomposition=dec,
        side=side,
        reps=tuple(_unpack(ctx, p) for p in reps),
        complete=saturated,
        length_bound=length_bound,
        left=left,
    )


_EXACT: dict[tuple, Transversal] = {}
_BEST: dict[tuple, Transversal] = {}


def coset_transversal(
    dec: AmalgamDecomposition, side: int, length_bound: int, left: bool = False
) -> Transversal:
    """Transversal of H-cosets in the side subgroup at the given length bound.

    Needs concrete finite vertex groups on that side. Marked complete when
    the side subgroup saturated within the bound."""
    dec.side_vertices(side)  # validates side
    if length_bound < 0:
        raise InputError(f"length bound must be >= 0, got {length_bound}")
    key = (dec, side, length_bound, left)
    got = _EXACT.get(key)
    if got is None:
        got = _build_transversal(dec, side, length_bound, left)
        _EXACT[key] = got
        bkey = (dec, side, left)
        best = _BEST.get(bkey)
        if best is None or (not best.complete and best.length_bound < length_bound):
            _BEST[bkey] = got
    return got


def _transversal_at_least(
    dec: AmalgamDecomposition, side: int, length_bound: int, left: bool = False
) -> Transversal:
    """A cached transversal good for coset lookups of elements of length <=
    length_bound: complete, or built at at least that bound."""
    best = _BEST.get((dec, side, left))
    if best is not None and (best.complete or best.length_bound >= length_bound):
        return best
    return coset_transversal(dec, side, length_bound, left)


def _rep_for(
    dec: AmalgamDecomposition, trans: Transversal, y: Packed
) -> Packed | None:
    ctx = dec.context
    hmask = dec.h_mask
    for t in trans.reps:
        tp = _pack(t)
        if _in_same_coset(ctx, hmask, y, tp, trans.left):
            return tp
    return None


# ---------------------------------------------------------------------------
# normal words


@dataclass(frozen=True)
class NormalWord:
    """g = h * t_1 ... t_k with h supported in H and the t_j alternating
    side-1 / side-2 transversal representatives, none the identity."""

    decomposition: AmalgamDecomposition
    h: Word
    syllables: tuple[tuple[int, Word], ...]

    @property
    def k(self) -> int:
        return len(self.syllables)

    @property
    def syllable_type(self) -> str:
        if not self.syllables:
            return TYPE_HPART
        return TYPE_ONE if self.syllables[0][0] == 1 else TYPE_TWO

    def to_word(self) -> Word:
        ctx = self.decomposition.context
        parts = _pack(self.h)
        for _, t in self.syllables:
            parts = parts + _pack(t)
        return _unpack(ctx, _canonical_packed(ctx, parts))

    def to_dict(self) -> dict:
        return {
            "h": format_word(self.h),
            "syllables": [
                {"side": side, "rep": format_word(t)} for side, t in self.syllables
            ],
            "k": self.k,
            "type": self.syllable_type,
        }


def _split_blocks(
    dec: AmalgamDecomposition, red: Packed
) -> tuple[Packed, list[tuple[int, Packed]]]:
    """Split a reduced word into an initial H-part and maximal alternating
    blocks, each containing at least one strict-side letter. H letters glue
    to the open block; the element each block represents lies in the side
    subgroup but outside H."""
    ctx = dec.context
    vidx = ctx.index[dec.vertex]
    g1set = set(dec.side_indices[0])
    h0: list[tuple[int, int]] = []
    blocks: list[tuple[int, list[tuple[int, int]]]] = []
    for let in red:
        vi = let[0]
        if vi == vidx:
            side = 1
        elif vi not in g1set:
            side = 2
        else:
            side = 0  # an H letter
        if side:
            if blocks and blocks[-1][0] == side:
                blocks[-1][1].append(let)
            else:
                blocks.append((side, [let]))
        elif blocks:
            blocks[-1][1].append(let)
        else:
            h0.append(let)
    return tuple(h0), [(s, tuple(ls)) for s, ls in blocks]


def normal_word(
    dec: AmalgamDecomposition,
    g: Word,
    transversals: Mapping[int, Transversal] | None = None,
) -> NormalWord:
    """The normal word of g: factor reduce(g) into an H-prefix and maximal
    alternating blocks, then absorb carries so every syllable becomes a
    transversal representative.

    The carry sweep runs over the blocks right to left: with h_{k+1} = e,
    y_j = B_j * h_{j+1}, t_j = rep(H y_j) and h_j = y_j * t_j^-1, so that
    g = h0 * h_1 * t_1 ... t_k follows by induction on suffixes.

    With explicit transversals a missing coset raises a resource-bound
    error naming the coset; by default transversals grow on demand."""
    ctx = dec.context
    if g.context != ctx:
        raise InputError("word lives over a different graph product")
    red = _reduce_packed(ctx, _pack(g))
    h0, blocks = _split_blocks(dec, red)
    hmask = dec.h_mask

    auto = transversals is None
    trans: dict[int, Transversal] = {}
    if auto:
        start = max(4, len(red) + 2)
        sides_needed = {side for side, _ in blocks}
        for side in sides_needed:
            trans[side] = _transversal_at_least(dec, side, start)
    else:
        for side, _ in blocks:
            if side not in transversals:
                raise InputError(f"no transversal supplied for side {side}")
            if transversals[side].left:
                raise InputError("normal words need right-coset transversals")
            trans[side] = transversals[side]

    carry: Packed = ()
    out: list[tuple[int, Packed]] = []
    for side, block in reversed(blocks):
        y = _canonical_packed(ctx, block + carry)
        t = _rep_for(dec, trans[side], y)
        if t is None and auto and len(y) > trans[side].length_bound:
            trans[side] = _transversal_at_least(dec, side, len(y))
            t = _rep_for(dec, trans[side], y)
        if t is None:
            if not auto and not trans[side].complete:
                raise ResourceBoundError(
                    f"incomplete side-{side} transversal: no representative for "
                    f"coset H({format_word(_unpack(ctx, y))}) within length bound "
                    f"{trans[side].length_bound}"
                )
            raise InternalError(
                f"no transversal representative for side-{side} coset "
                f"H({format_word(_unpack(ctx, y))})"
            )
        if not t:
            raise InternalError("a block outside H matched the coset of the identity")
        out.append((side, t))
        carry = _canonical_packed(ctx, y + _invert_packed(ctx, t))
        if _support_mask(carry) & ~hmask:
            raise InternalError("carry left the amalgamated subgroup")
    out.reverse()

    h = _canonical_packed(ctx, h0 + carry)
    nw = NormalWord(
        decomposition=dec,
        h=_unpack(ctx, h),
        syllables=tuple((side, _unpack(ctx, t)) for side, t in out),
    )
    recon = _canonical_packed(ctx, _pack(nw.to_word()))
    if recon != _canonical_packed(ctx, red):
        raise InternalError("normal word does not reconstruct the element")
    return nw


def syllable_type(dec: AmalgamDecomposition, g: Word) -> str:
    """One / Two / Hpart by the side of the first normal-word syllable
    (Hpart when g lies in H, i.e. k = 0)."""
    return normal_word(dec, g).syllable_type


# ---------------------------------------------------------------------------
# bounded experiments


def _check_words(ctx: GraphProduct, seq: Sequence[Word], what: str) -> list[Packed]:
    if not seq:
        raise InputError(f"{what} must be nonempty")
    out = []
    for w in seq:
        if w.context != ctx:
            raise InputError(f"{what} element lives over a different graph product")
        out.append(_canonical_packed(ctx, _pack(w)))
    return out


def escape_certification(
    dec: AmalgamDecomposition, seq: Sequence[Word], scale: int
) -> dict:
    """Bounded check that seq escapes every double coset t1 * P_H * t2 with
    |t1|, |t2| <= scale (P_H the parabolic subgroup on the H vertices).

    Membership in a double coset is exact (a support condition); only the
    t1, t2 range is bounded. Certification passes when the data has a clean
    tail: the last element lies in no such double coset. Early elements may
    still be caught (any short element is); those show up as violations
    and the report gives the first index from which the tail stays clean."""
    ctx = dec.context
    sp = _check_words(ctx, seq, "sequence")
    ball = _ball_packed(ctx, scale)
    inv = [_invert_packed(ctx, t) for t in ball]
    hmask = dec.h_mask
    violations: list[dict] = []
    last_violation = -1
    failure: dict | None = None
    for i, s in enumerate(sp):
        hit: tuple[Packed, Packed] | None = None
        for t1i, t1 in zip(inv, ball):
            mid = t1i + s
            for t2i, t2 in zip(inv, ball):
                d = _reduce_packed(ctx, mid + t2i)
                if _support_mask(d) & ~hmask == 0:
                    hit = (t1, t2)
                    break
            if hit:
                break
        if hit:
            violations.append(
                {
                    "index": i,
                    "t1": format_word(_unpack(ctx, hit[0])),
                    "t2": format_word(_unpack(ctx, hit[1])),
                }
            )
            last_violation = i
            if i == len(sp) - 1:
                failure = violations[-1]
    certified = failure is None
    return {
        "scale": scale,
        "ball_size": len(ball),
        "certified": certified,
        "violations": violations,
        "escaped_from_index": last_violation + 1 if certified else None,
        "failure": failure,
    }


def invariance_check(
    dec: AmalgamDecomposition, seq: Sequence[Word], g: Word, scale: int
) -> dict:
    """Escape certification for seq at the given scale, plus a per-element
    comparison of syllable_type(seq[n]) with syllable_type(seq[n] * g).

    agree_from_index is the first index of the final run of agreement, or
    None when the last element disagrees."""
    ctx = dec.context
    sp = _check_words(ctx, seq, "sequence")
    if len(set(sp)) != len(sp):
        raise InputError("sequence elements must be pairwise distinct")
    if g.context != ctx:
        raise InputError("g lives over a different graph product")
    esc = escape_certification(dec, seq, scale)
    rows = []
    for i, s in enumerate(seq):
        base = normal_word(dec, s).syllable_type
        shifted = normal_word(dec, multiply(s, g)).syllable_type
        rows.append(
            {
                "index": i,
                "word": format_word(_unpack(ctx, sp[i])),
                "type": base,
                "type_with_g": shifted,
                "agree": base == shifted,
            }
        )
    agree_from = None
    for row in reversed(rows):
        if row["agree"]:
            agree_from = row["index"]
        else:
            break
    return {
        "decomposition": dec.to_dict(),
        "g": format_word(canonical(g)),
        "scale": scale,
        "escape": esc,
        "agreement": rows,
        "agree_from_index": agree_from,
    }


def malnormality_scan(dec: AmalgamDecomposition, l_g: int, l_h: int) -> dict:
    """For every g in ball(l_g) with support not inside the H vertices, count
    the h in the H-subgroup ball(l_h) with g*h*g^-1 back in the H parabolic;
    report the maximum count and an attaining g. A bounded certificate at
    these scales, not a proof of almost malnormality."""
    if dec.degenerate:
        raise InputError(
            "malnormality scan rejected: decomposition is degenerate (G2 = H)"
        )
    ctx = dec.context
    ball = _ball_packed(ctx, l_g)
    h_idxs = tuple(ctx.index[v] for v in dec.h_vertices)
    hball, hsat = _ball_packed_ex(ctx, l_h, h_idxs, check_saturation=True)
    hmask = dec.h_mask
    best = 0
    witness: Packed | None = None
    candidates = 0
    for gp in ball:
        if _support_mask(gp) & ~hmask == 0:
            continue
        candidates += 1
        ginv = _invert_packed(ctx, gp)
        count = 0
        for hp in hball:
            conj = _reduce_packed(ctx, gp + hp + ginv)
            if _support_mask(conj) & ~hmask == 0:
                count += 1
        if witness is None or count > best:
            best = count
            witness = gp
    return {
        "decomposition": dec.to_dict(),
        "l_g": l_g,
        "l_h": l_h,
        "h_ball_size": len(hball),
        "h_ball_saturated": hsat,
        "candidates": candidates,
        "max_count": best if witness is not None else 0,
        "witness": format_word(_unpack(ctx, witness)) if witness is not None else None,
        "note": "bounded certificate at the given scales, not a proof",
    }
