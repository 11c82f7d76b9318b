import itertools

import pytest
from hypothesis import given, strategies as st

from graphprox.errors import ConsistencyError, InputError, ValidationError
from graphprox.groups import (
    Conventions,
    Facts,
    INFINITE,
    abstract,
    build_group,
    compose,
    cyclic,
    derive_facts,
    dihedral,
    element_name,
    elements,
    group_to_descriptor,
    identity,
    inverse,
    is_identity,
    parse_element,
    parse_tri,
    symmetric,
    table_group,
    tri_and,
    tri_or,
)


def test_tri_logic():
    assert tri_and(True, True) is True
    assert tri_and(True, False) is False
    assert tri_and(None, False) is False  # False absorbs unknown
    assert tri_and(True, None) is None
    assert tri_or(False, None) is None
    assert tri_or(None, True) is True


def test_parse_tri():
    assert parse_tri("true") is True
    assert parse_tri("False") is False
    assert parse_tri("unknown") is None
    assert parse_tri(None) is None
    with pytest.raises(InputError):
        parse_tri("maybe")


def test_cyclic_arithmetic():
    z5 = cyclic(5)
    assert z5.order == 5
    els = elements(z5)
    assert len(els) == 5
    e = identity(z5)
    assert is_identity(e)
    g = parse_element(z5, "2")
    h = parse_element(z5, "4")
    assert element_name(compose(g, h)) == "1"
    assert is_identity(compose(g, inverse(g)))


def _group_laws(spec):
    els = elements(spec)
    e = identity(spec)
    for a in els:
        assert compose(a, e) == a == compose(e, a)
        assert is_identity(compose(a, inverse(a)))
    for a, b, c in itertools.islice(itertools.product(els, repeat=3), 512):
        assert compose(compose(a, b), c) == compose(a, compose(b, c))


def test_dihedral_laws():
    d4 = dihedral(4)
    assert d4.order == 8
    _group_laws(d4)


def test_symmetric_laws():
    s3 = symmetric(3)
    assert s3.order == 6
    _group_laws(s3)
    # S3 is nonabelian
    els = elements(s3)
    assert any(compose(a, b) != compose(b, a) for a in els for b in els)


def test_symmetric_refuses_large_n():
    with pytest.raises(ValidationError):
        symmetric(9)


def test_table_group_klein():
    names = ["e", "x", "y", "xy"]
    table = [
        [0, 1, 2, 3],
        [1, 0, 3, 2],
        [2, 3, 0, 1],
        [3, 2, 1, 0],
    ]
    k4 = table_group(names, table)
    assert k4.order == 4
    _group_laws(k4)
    assert element_name(compose(parse_element(k4, "x"), parse_element(k4, "y"))) == "xy"


def test_table_group_rejects_broken_tables():
    with pytest.raises(ValidationError, match="2x2"):
        table_group(["e", "x"], [[0, 1]])
    with pytest.raises(ValidationError):
        table_group(["e", "x"], [[0, 1], [1, 1]])  # not a Latin square
    with pytest.raises(ValidationError):
        table_group(["e", "e"], [[0, 1], [1, 0]])  # duplicate names


def test_abstract_groups():
    inf = abstract(INFINITE)
    assert not inf.finite
    fin = abstract(12)
    assert fin.finite and fin.order == 12
    with pytest.raises(ValidationError):
        abstract(0)


def test_elements_refused_for_abstract():
    with pytest.raises(Exception):
        elements(abstract(INFINITE))


def test_build_group_descriptors():
    assert build_group({"kind": "cyclic", "n": 3}).order == 3
    assert build_group({"kind": "dihedral", "n": 3}).order == 6
    g = build_group({"kind": "abstract", "order": "infinite", "amenable": "true"})
    assert not g.finite and g.facts.amenable is True
    g2 = build_group(
        {"kind": "abstract", "order": "infinite", "properly_proximal": "unknown"}
    )
    assert g2.facts.properly_proximal is None
    with pytest.raises(InputError):
        build_group({"kind": "octonion"})
    with pytest.raises(InputError):
        build_group({"kind": "cyclic", "n": 3, "flavor": "sour"})


def test_flags_allowed_on_concrete_kinds():
    g = build_group({"kind": "cyclic", "n": 2, "weakly_amenable_cstar1": "true"})
    assert g.facts.weakly_amenable_cstar1 is True


def test_descriptor_round_trip():
    for d in (
        {"kind": "cyclic", "n": 4},
        {"kind": "symmetric", "n": 3},
        {"kind": "abstract", "order": "infinite", "amenable": "true"},
        {"kind": "abstract", "order": 7},
    ):
        g = build_group(d)
        assert build_group(group_to_descriptor(g)) == g


def test_derive_facts_finite_convention():
    g = derive_facts(cyclic(2))
    assert g.facts.properly_proximal is True
    g2 = derive_facts(cyclic(2), Conventions(finite_groups_pp=False))
    assert g2.facts.properly_proximal is False


def test_derive_facts_infinite_amenable():
    g = derive_facts(abstract(INFINITE, Facts(amenable=True)))
    assert g.facts.properly_proximal is False
    # unknown stays unknown for a plain infinite group
    g2 = derive_facts(abstract(INFINITE))
    assert g2.facts.properly_proximal is None


def test_derive_facts_contradiction():
    with pytest.raises(ConsistencyError):
        derive_facts(abstract(INFINITE, Facts(amenable=True, properly_proximal=True)))
    with pytest.raises(ConsistencyError):
        derive_facts(abstract(5, Facts(amenable=False)))


def test_derive_facts_idempotent():
    g = derive_facts(dihedral(3))
    assert derive_facts(g) == g


@given(st.integers(min_value=1, max_value=12), st.data())
def test_cyclic_commutes(n, data):
    zn = cyclic(n)
    i = data.draw(st.integers(min_value=0, max_value=n - 1))
    j = data.draw(st.integers(min_value=0, max_value=n - 1))
    a, b = elements(zn)[i], elements(zn)[j]
    assert compose(a, b) == compose(b, a)
