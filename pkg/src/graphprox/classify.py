"""Deciding proper proximality of a graph product from its graph shape and
three-valued vertex-group facts.

Rules, applied in order of precedence to the current induced subgraph:

  Base0  no vertices: the trivial group, not properly proximal.
  Base1  one vertex: the verdict is that group's own flag.
  Rule3  some vertex v is adjacent to all others (radius <= 1): the product
         splits off G_v as a direct factor; verdict = AND(flag(G_v), rest).
  Rule2  radius >= 2 but two vertices v1, v2 dominate all others (then v1, v2
         are non-adjacent and the product splits as (G_v1 * G_v2) x rest):
         the free-product factor is properly proximal iff some |G_vi| >= 3
         (the order-2/order-2 case is infinite dihedral, amenable);
         verdict = AND(that, rest), an empty rest counting as True.
  Rule1  radius >= 2 and no dominating pair: properly proximal outright,
         whatever the vertex groups.

Conjunctions are Kleene three-valued; unknown flags surface in needed_facts
exactly when they block the verdict.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping

from .errors import InputError, InternalError
from .graphs import Graph, centers, dominating_pairs, induced
from .groups import Conventions, GroupSpec, Tri, facts_closed, tri_and, tri_str

__all__ = [
    "STATUS_PP",
    "STATUS_NOT_PP",
    "STATUS_UNKNOWN",
    "RuleApplication",
    "Verdict",
    "classify",
    "cartan_report",
]

STATUS_PP = "properly_proximal"
STATUS_NOT_PP = "not_properly_proximal"
STATUS_UNKNOWN = "unknown"


def _status(v: Tri) -> str:
    if v is True:
        return STATUS_PP
    if v is False:
        return STATUS_NOT_PP
    return STATUS_UNKNOWN


@dataclass(frozen=True)
class RuleApplication:
    """One recorded rule application; local_result is the verdict of the
    subgraph the rule was applied to (its witness satisfies the rule's
    graph-side precondition)."""

    rule: str
    witness: tuple[str, ...]
    subgraph: tuple[str, ...]
    local_result: Tri

    def to_dict(self) -> dict:
        return {
            "rule": self.rule,
            "witness": list(self.witness),
            "subgraph": list(self.subgraph),
            "local_result": tri_str(self.local_result),
        }


@dataclass(frozen=True)
class Verdict:
    status: str
    trace: tuple[RuleApplication, ...]
    needed_facts: tuple[tuple[str, str], ...]

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "trace": [r.to_dict() for r in self.trace],
            "needed_facts": [list(nf) for nf in self.needed_facts],
        }


# A strategy overrides the default witness (and, for agreement experiments,
# the Rule3-over-Rule2 precedence) at each recursion node. It receives the
# current induced subgraph, its centers and its dominating pairs, and returns
# ("rule3", center), ("rule2", (v1, v2)) or None for the default choice.
Strategy = Callable[[Graph, list[str], list[tuple[str, str]]], tuple | None]


def _sorted_pairs(g: Graph, pairs) -> list[tuple[str, str]]:
    out = []
    for p in pairs:
        a, b = sorted(p, key=g.index)
        out.append((a, b))
    return sorted(out, key=lambda ab: (g.index(ab[0]), g.index(ab[1])))


def classify(
    graph: Graph,
    assignment: Mapping[str, GroupSpec],
    config: Conventions = Conventions(),
    strategy: Strategy | None = None,
) -> Verdict:
    """Classify the graph product. Fact records must be closed via
    derive_facts with the same conventions; every group order must be >= 2."""
    for v in graph.vertices:
        if v not in assignment:
            raise InputError(f"no group assigned to vertex {v!r}")
        spec = assignment[v]
        if spec.order < 2:
            raise InputError(f"vertex group at {v!r} must have order >= 2")
        if not facts_closed(spec, config):
            raise InternalError(
                f"facts at vertex {v!r} are not closed under derive_facts"
            )

    trace: list[RuleApplication] = []
    needed: list[tuple[str, str]] = []

    def rec(vs: tuple[str, ...]) -> tuple[Tri, list[RuleApplication], list[tuple[str, str]]]:
        sub = induced(graph, vs)
        if len(vs) == 0:
            return False, [RuleApplication("Base0", (), (), False)], []
        if len(vs) == 1:
            v = vs[0]
            flag = assignment[v].facts.properly_proximal
            rec_ = RuleApplication("Base1", (v,), vs, flag)
            need = [(v, "properly_proximal")] if flag is None else []
            return flag, [rec_], need

        cs = centers(sub)
        pairs = _sorted_pairs(sub, dominating_pairs(sub))
        choice = strategy(sub, cs, pairs) if strategy is not None else None

        if choice is not None:
            rule_name, witness = choice
        elif cs:
            rule_name, witness = "rule3", cs[0]
        elif pairs:
            rule_name, witness = "rule2", pairs[0]
        else:
            rule_name, witness = "rule1", None

        if rule_name == "rule3":
            v = witness
            if v not in cs:
                raise InternalError(f"strategy chose non-center {v!r} for Rule3")
            flag = assignment[v].facts.properly_proximal
            rest_vs = tuple(u for u in vs if u != v)
            rest, rest_trace, rest_need = rec(rest_vs)
            result = tri_and(flag, rest)
            need = []
            if result is None:
                if flag is None:
                    need.append((v, "properly_proximal"))
                if rest is None:
                    need.extend(rest_need)
            return result, [RuleApplication("Rule3", (v,), vs, result)] + rest_trace, need

        if rule_name == "rule2":
            v1, v2 = witness
            if (v1, v2) not in pairs and (v2, v1) not in pairs:
                raise InternalError(f"strategy chose a non-dominating pair {(v1, v2)!r}")
            if sub.adjacent(v1, v2):
                raise InternalError(
                    f"Rule2 needs a non-adjacent pair, {(v1, v2)!r} is adjacent"
                )
            factor = assignment[v1].order >= 3 or assignment[v2].order >= 3
            fp_rec = RuleApplication("FreeProductBase", (v1, v2), (v1, v2), factor)
            rest_vs = tuple(u for u in vs if u not in (v1, v2))
            if rest_vs:
                rest, rest_trace, rest_need = rec(rest_vs)
            else:
                rest, rest_trace, rest_need = True, [], []
            result = tri_and(factor, rest)
            need = []
            if result is None and rest is None:
                need.extend(rest_need)
            head = RuleApplication("Rule2", (v1, v2), vs, result)
            return result, [head, fp_rec] + rest_trace, need

        return True, [RuleApplication("Rule1", (), vs, True)], []

    result, trace, needed = rec(graph.vertices)
    seen = set()
    needed_unique = []
    for nf in needed:
        if nf not in seen:
            seen.add(nf)
            needed_unique.append(nf)
    if result is not None:
        needed_unique = []
    return Verdict(_status(result), tuple(trace), tuple(needed_unique))


def cartan_report(
    graph: Graph,
    assignment: Mapping[str, GroupSpec],
    config: Conventions = Conventions(),
) -> dict:
    """Consequence report: a properly proximal graph product of groups that
    are weakly amenable with constant 1 gives a group von Neumann algebra
    with no Cartan subalgebra, hence C*-rigidity of the reduced C*-algebra.

    applicable: "true" (with no_cartan/c_rigid), "false" (with reason), or
    "unknown" (with needed_facts)."""
    verdict = classify(graph, assignment, config)
    pp: Tri = {STATUS_PP: True, STATUS_NOT_PP: False, STATUS_UNKNOWN: None}[verdict.status]
    wa_flags = [(v, assignment[v].facts.weakly_amenable_cstar1) for v in graph.vertices]
    hypo = tri_and(pp, *[f for _, f in wa_flags])
    out: dict = {"applicable": tri_str(hypo), "verdict": verdict.to_dict()}
    if hypo is True:
        out["no_cartan"] = True
        out["c_rigid"] = True
    elif hypo is False:
        if pp is False:
            out["reason"] = "the graph product is not properly proximal"
        else:
            bad = [v for v, f in wa_flags if f is False]
            out["reason"] = (
                f"vertex group at {bad[0]!r} is flagged not weakly amenable with constant 1"
            )
    else:
        need = list(verdict.needed_facts)
        need.extend((v, "weakly_amenable_cstar1") for v, f in wa_flags if f is None)
        out["needed_facts"] = [list(nf) for nf in need]
    return out
