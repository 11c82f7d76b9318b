import pytest

from graphprox.classify import (
    STATUS_NOT_PP,
    STATUS_PP,
    STATUS_UNKNOWN,
    cartan_report,
    classify,
)
from graphprox.errors import InputError
from graphprox.groups import (
    Conventions,
    Facts,
    INFINITE,
    abstract,
    cyclic,
    derive_facts,
)

from conftest import CYCLE4, CYCLE5, PATH4, all_z2, graph


def z2():
    return derive_facts(cyclic(2))


def z3():
    return derive_facts(cyclic(3))


def inf_amenable():
    return derive_facts(abstract(INFINITE, Facts(amenable=True)))


def inf_pp():
    return derive_facts(abstract(INFINITE, Facts(properly_proximal=True)))


def inf_unknown():
    return derive_facts(abstract(INFINITE))


def test_free_product_z2_z2_not_pp():
    # the infinite dihedral group is amenable
    g = graph("ab", [])
    v = classify(g, {"a": z2(), "b": z2()})
    assert v.status == STATUS_NOT_PP
    assert v.needed_facts == ()


def test_free_product_z2_z3_pp():
    g = graph("ab", [])
    v = classify(g, {"a": z2(), "b": z3()})
    assert v.status == STATUS_PP


def test_c4_not_pp():
    g = graph("abcd", CYCLE4)
    v = classify(g, all_z2(g))
    assert v.status == STATUS_NOT_PP
    assert [r.rule for r in v.trace].count("Rule2") == 2


def test_c5_pp_via_rule1():
    g = graph("abcde", CYCLE5)
    v = classify(g, all_z2(g))
    assert v.status == STATUS_PP
    assert v.trace[0].rule == "Rule1"


def test_p4_pp_via_rule1():
    g = graph("abcd", PATH4)
    v = classify(g, all_z2(g))
    assert v.status == STATUS_PP
    assert v.trace[0].rule == "Rule1"


def test_star_with_amenable_center_not_pp():
    # K_{1,3}: center x joined to three leaves
    g = graph(["x", "a", "b", "c"], [("x", "a"), ("x", "b"), ("x", "c")])
    asn = all_z2(g)
    asn["x"] = inf_amenable()
    v = classify(g, asn)
    assert v.status == STATUS_NOT_PP
    assert v.trace[0].rule == "Rule3"
    assert v.trace[0].witness == ("x",)


def test_single_unknown_vertex():
    g = graph("a", [])
    v = classify(g, {"a": inf_unknown()})
    assert v.status == STATUS_UNKNOWN
    assert v.needed_facts == (("a", "properly_proximal"),)


def test_empty_graph_not_pp():
    v = classify(graph([], []), {})
    assert v.status == STATUS_NOT_PP
    assert v.trace[0].rule == "Base0"


def test_single_finite_vertex_follows_convention():
    g = graph("a", [])
    assert classify(g, {"a": z2()}).status == STATUS_PP
    config = Conventions(finite_groups_pp=False)
    asn = {"a": derive_facts(cyclic(2), config)}
    assert classify(g, asn, config).status == STATUS_NOT_PP


def test_rule3_peels_centers():
    # triangle of finite groups: three nested Rule3 steps down to Base1
    g = graph("abc", [("a", "b"), ("b", "c"), ("a", "c")])
    v = classify(g, all_z2(g))
    assert v.status == STATUS_PP
    assert [r.rule for r in v.trace] == ["Rule3", "Rule3", "Base1"]


def test_rule2_empty_rest():
    # two vertices, no edge, one of order 3: free product base alone
    g = graph("ab", [])
    v = classify(g, {"a": z3(), "b": z3()})
    assert v.status == STATUS_PP
    assert v.trace[0].rule == "Rule2"
    assert len(v.trace) == 2  # Rule2 head + FreeProductBase, no rest branch


def test_unknown_center_blocks():
    g = graph(["x", "a", "b"], [("x", "a"), ("x", "b")])
    asn = all_z2(g)
    asn["x"] = inf_unknown()
    v = classify(g, asn)
    # rest = {a, b} edgeless all-Z2 is NotPP, so the conjunction resolves
    assert v.status == STATUS_NOT_PP


def test_unknown_surfaces_in_needed_facts():
    g = graph(["x", "a", "b"], [("x", "a"), ("x", "b")])
    asn = {"x": inf_unknown(), "a": z3(), "b": z3()}
    v = classify(g, asn)
    assert v.status == STATUS_UNKNOWN
    assert v.needed_facts == (("x", "properly_proximal"),)


def test_all_pp_vertex_groups_classify_pp():
    for edges in ([], CYCLE4, [("a", "b")], [("a", "b"), ("c", "d")]):
        g = graph("abcd", edges)
        asn = {v: inf_pp() for v in g.vertices}
        assert classify(g, asn).status == STATUS_PP, edges


def test_verdict_invariant_under_witness_choice():
    # P3 has a center (b) and a dominating pair (a, c): both routes agree
    g = graph("abc", [("a", "b"), ("b", "c")])
    asn = all_z2(g)
    default = classify(g, asn).status

    def force_rule2(sub, cs, pairs):
        for p in pairs:
            v1, v2 = sorted(p, key=sub.index)
            if not sub.adjacent(v1, v2):
                return ("rule2", (v1, v2))
        return None

    forced = classify(g, asn, strategy=force_rule2).status
    assert forced == default == STATUS_NOT_PP


def test_strategy_rejects_bad_witness():
    from graphprox.errors import InternalError

    g = graph("abc", [("a", "b"), ("b", "c")])
    asn = all_z2(g)
    with pytest.raises(InternalError):
        classify(g, asn, strategy=lambda sub, cs, pairs: ("rule3", "a") if "a" in sub.vertices and "a" not in cs else None)


def test_classify_input_errors():
    g = graph("ab", [])
    with pytest.raises(InputError, match="no group"):
        classify(g, {"a": z2()})
    with pytest.raises(InputError, match="order"):
        classify(g, {"a": z2(), "b": derive_facts(cyclic(1))})


def test_verdict_to_dict_shape():
    g = graph("ab", [])
    d = classify(g, {"a": z2(), "b": z2()}).to_dict()
    assert set(d) == {"status", "trace", "needed_facts"}
    assert d["trace"][0]["rule"] == "Rule2"
    assert d["trace"][0]["local_result"] == "false"


# ---------------------------------------------------------------------------
# the Cartan consequence report


def wa(spec):
    from dataclasses import replace

    return derive_facts(replace(spec, facts=replace(spec.facts, weakly_amenable_cstar1=True)))


def test_cartan_c5_all_flagged():
    g = graph("abcde", CYCLE5)
    asn = {v: wa(cyclic(2)) for v in g.vertices}
    rep = cartan_report(g, asn)
    assert rep["applicable"] == "true"
    assert rep["no_cartan"] is True
    assert rep["c_rigid"] is True


def test_cartan_c4_inapplicable():
    g = graph("abcd", CYCLE4)
    asn = {v: wa(cyclic(2)) for v in g.vertices}
    rep = cartan_report(g, asn)
    assert rep["applicable"] == "false"
    assert "reason" in rep


def test_cartan_unknown_flag():
    g = graph("abcde", CYCLE5)
    asn = {v: wa(cyclic(2)) for v in g.vertices}
    asn["a"] = derive_facts(cyclic(2))  # weakly_amenable flag left unknown
    rep = cartan_report(g, asn)
    assert rep["applicable"] == "unknown"
    assert ["a", "weakly_amenable_cstar1"] in [list(x) for x in rep["needed_facts"]]
