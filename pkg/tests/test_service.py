import warnings

import pytest

with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    from fastapi.testclient import TestClient

from graphprox import __version__
from graphprox.service.app import app

from conftest import CYCLE4, CYCLE5, PATH3, TRIANGLE, spec_dict


@pytest.fixture(scope="module")
def client():
    return TestClient(app, raise_server_exceptions=False)


Z3Z3 = spec_dict(["u", "w"], [], groups=[{"kind": "cyclic", "n": 3}] * 2)
P3 = spec_dict("abc", PATH3)
C4 = spec_dict("abcd", CYCLE4)


def test_health(client):
    r = client.get("/health")
    assert r.status_code == 200
    assert r.json() == {"status": "ok", "version": __version__}


def test_classify(client):
    r = client.post("/classify", json={"spec": C4})
    assert r.status_code == 200
    body = r.json()
    assert body["status"] == "not_properly_proximal"
    assert body["trace"][0]["rule"] == "Rule2"


def test_classify_c5(client):
    r = client.post("/classify", json={"spec": spec_dict("abcde", CYCLE5)})
    assert r.json()["status"] == "properly_proximal"


def test_classify_bad_spec_is_400(client):
    bad = spec_dict("ab", [("a", "z")])
    r = client.post("/classify", json={"spec": bad})
    assert r.status_code == 400
    assert "edges[0]" in r.json()["error"]


def test_schema_violation_is_422(client):
    r = client.post("/classify", json={"spec": C4, "surprise": 1})
    assert r.status_code == 422


def test_cartan(client):
    r = client.post("/cartan", json={"spec": C4})
    assert r.status_code == 200
    assert r.json()["applicable"] == "false"


def test_word_reduce_and_canonical(client):
    r = client.post("/word/reduce", json={"spec": P3, "word": "a:1 a:1 c:1"})
    assert r.status_code == 200
    assert r.json()["result"] == "c:1"
    r2 = client.post("/word/canonical", json={"spec": P3, "word": "b:1 a:1"})
    assert r2.json()["result"] == "a:1 b:1"


def test_word_eq(client):
    r = client.post("/word/eq", json={"spec": P3, "w1": "a:1 b:1", "w2": "b:1 a:1"})
    assert r.json() == {"equal": True}
    r2 = client.post("/word/eq", json={"spec": P3, "w1": "a:1 c:1", "w2": "c:1 a:1"})
    assert r2.json() == {"equal": False}


def test_word_parse_error_is_400(client):
    r = client.post("/word/reduce", json={"spec": P3, "word": "q:1"})
    assert r.status_code == 400


def test_ball(client):
    r = client.post("/ball", json={"spec": Z3Z3, "length": 2})
    assert r.status_code == 200
    body = r.json()
    assert body["count"] == 13
    assert body["elements"][0] == ""
    assert len(body["elements"]) == 13


def test_ball_negative_length_is_422(client):
    r = client.post("/ball", json={"spec": Z3Z3, "length": -1})
    assert r.status_code == 422


def test_decompose(client):
    r = client.post("/decompose", json={"spec": P3, "vertex": "a"})
    assert r.status_code == 200
    d = r.json()["decomposition"]
    assert d["g1_vertices"] == ["a", "b"]
    assert d["g2_vertices"] == ["b", "c"]
    assert d["h_vertices"] == ["b"]
    assert d["degenerate"] is False


def test_decompose_with_transversal(client):
    r = client.post(
        "/decompose", json={"spec": Z3Z3, "vertex": "u", "side": 1, "length": 4}
    )
    t = r.json()["transversal"]
    assert t["reps"] == ["", "u:1", "u:2"]
    assert t["complete"] is True


def test_decompose_unknown_vertex_is_400(client):
    r = client.post("/decompose", json={"spec": P3, "vertex": "q"})
    assert r.status_code == 400


def test_normalword(client):
    r = client.post(
        "/normalword", json={"spec": P3, "vertex": "a", "word": "b:1 a:1 c:1"}
    )
    assert r.status_code == 200
    body = r.json()
    assert body["h"] == "b:1"
    assert body["syllables"] == [
        {"side": 1, "rep": "a:1"},
        {"side": 2, "rep": "c:1"},
    ]
    assert body["k"] == 2
    assert body["type"] == "One"


def test_check_intersection(client):
    r = client.post(
        "/check/intersection",
        json={
            "spec": P3,
            "t1": ["a", "b"],
            "t2": ["b", "c"],
            "g": "a:1",
            "h": "",
            "length": 6,
        },
    )
    assert r.status_code == 200
    assert r.json()["pass"] is True


def test_check_invariance(client):
    seq = ["u:1 w:1", "u:1 w:1 u:1 w:1", "u:1 w:1 u:1 w:1 u:1 w:1",
           "u:1 w:1 u:1 w:1 u:1 w:1 u:1 w:1"]
    r = client.post(
        "/check/invariance",
        json={"spec": Z3Z3, "vertex": "u", "seq": seq, "g": "u:1", "scale": 2},
    )
    assert r.status_code == 200
    body = r.json()
    assert all(row["agree"] for row in body["agreement"])


def test_scan_malnormal(client):
    r = client.post(
        "/scan/malnormal", json={"spec": P3, "vertex": "a", "l_g": 3, "l_h": 3}
    )
    assert r.status_code == 200
    assert r.json()["max_count"] == 2


def test_scan_malnormal_degenerate_is_400(client):
    tri = spec_dict("abc", TRIANGLE)
    r = client.post(
        "/scan/malnormal", json={"spec": tri, "vertex": "a", "l_g": 2, "l_h": 2}
    )
    assert r.status_code == 400
    assert "degenerate" in r.json()["error"]


def test_tree(client):
    r = client.post("/tree", json={"spec": Z3Z3, "vertex": "u", "radius": 2})
    assert r.status_code == 200
    body = r.json()
    assert body["depth_counts"] == [1, 3, 6]
    assert "dot" not in body


def test_tree_with_dot(client):
    r = client.post(
        "/tree", json={"spec": Z3Z3, "vertex": "u", "radius": 1, "dot": True}
    )
    assert "graph treeball" in r.json()["dot"]


def test_tree_resource_bound_is_409(client):
    r = client.post(
        "/tree", json={"spec": Z3Z3, "vertex": "u", "radius": 4, "length_bound": 2}
    )
    assert r.status_code == 409


def test_tree_infinite_side_is_409(client):
    p4 = spec_dict("abcd", [("a", "b"), ("b", "c"), ("c", "d")])
    r = client.post("/tree", json={"spec": p4, "vertex": "b", "radius": 2})
    assert r.status_code == 409


def test_dynamics(client):
    seq = []
    word = []
    for _ in range(6):
        word += ["u:1", "w:1"]
        seq.append(" ".join(word))
    r = client.post(
        "/dynamics", json={"spec": Z3Z3, "vertex": "u", "seq": seq, "radius": 3}
    )
    assert r.status_code == 200
    body = r.json()
    assert body["pattern"] == "axis-translation"
    assert body["fraction_converging"] == 1.0


def test_dynamics_uncertified_is_400(client):
    r = client.post(
        "/dynamics",
        json={"spec": Z3Z3, "vertex": "u", "seq": ["u:1 w:1"], "radius": 3},
    )
    assert r.status_code == 400
    assert "certified" in r.json()["error"]
