import json

import pytest

from graphprox.cli import run

from conftest import CYCLE4, PATH3, spec_dict


@pytest.fixture(scope="module")
def c4_path(tmp_path_factory):
    p = tmp_path_factory.mktemp("specs") / "c4.json"
    p.write_text(json.dumps(spec_dict("abcd", CYCLE4)))
    return str(p)


@pytest.fixture(scope="module")
def p3_path(tmp_path_factory):
    p = tmp_path_factory.mktemp("specs") / "p3.json"
    p.write_text(json.dumps(spec_dict("abc", PATH3)))
    return str(p)


@pytest.fixture(scope="module")
def z3z3_path(tmp_path_factory):
    p = tmp_path_factory.mktemp("specs") / "z3z3.json"
    data = spec_dict(["u", "w"], [], groups=[{"kind": "cyclic", "n": 3}] * 2)
    p.write_text(json.dumps(data))
    return str(p)


def test_classify_c4(c4_path, capsys):
    assert run(["classify", c4_path, "--trace"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("status: not_properly_proximal")
    assert out.count("Rule2") == 2


def test_classify_inline_spec(capsys):
    inline = json.dumps(spec_dict("ab", []))
    assert run(["classify", inline]) == 0
    assert "not_properly_proximal" in capsys.readouterr().out


def test_classify_expect_mismatch(c4_path, capsys):
    assert run(["classify", c4_path, "--expect", "pp"]) == 1
    err = capsys.readouterr().err
    assert "expectation failed" in err


def test_classify_expect_match(c4_path):
    assert run(["classify", c4_path, "--expect", "not_pp"]) == 0


def test_classify_json_round_trips(c4_path, capsys):
    assert run(["classify", c4_path, "--format", "json"]) == 0
    body = json.loads(capsys.readouterr().out)
    assert body["status"] == "not_properly_proximal"
    assert isinstance(body["trace"], list)


def test_missing_file_is_exit_2(capsys):
    assert run(["classify", "/no/such/spec.json"]) == 2
    assert "error:" in capsys.readouterr().err


def test_invalid_spec_is_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(spec_dict("ab", [("a", "a")])))
    assert run(["classify", str(bad)]) == 2
    assert "loop" in capsys.readouterr().err


def test_word_eq_true(p3_path, capsys):
    assert run(["word", "eq", p3_path, "--w1", "a:1 b:1", "--w2", "b:1 a:1"]) == 0
    assert capsys.readouterr().out.strip() == "true"


def test_word_eq_false(p3_path, capsys):
    assert run(["word", "eq", p3_path, "--w1", "a:1 c:1", "--w2", "c:1 a:1"]) == 0
    assert capsys.readouterr().out.strip() == "false"


def test_word_reduce_identity_prints_e(p3_path, capsys):
    assert run(["word", "reduce", p3_path, "--word", "a:1 a:1"]) == 0
    assert capsys.readouterr().out.strip() == "e"


def test_word_canonical(p3_path, capsys):
    assert run(["word", "canonical", p3_path, "--word", "c:1 b:1 a:1"]) == 0
    assert capsys.readouterr().out.strip() == "b:1 c:1 a:1"


def test_bad_word_is_exit_2(p3_path, capsys):
    assert run(["word", "reduce", p3_path, "--word", "z:9"]) == 2


def test_ball(z3z3_path, capsys):
    assert run(["ball", z3z3_path, "--length", "2"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "count: 13"
    assert lines[1] == "e"
    assert len(lines) == 14


def test_check_intersection_pass(p3_path, capsys):
    code = run(
        [
            "check", "intersection", p3_path,
            "--t1", "a,b", "--t2", "b,c", "--g", "a:1", "--h", "", "--len", "6",
        ]
    )
    assert code == 0
    assert capsys.readouterr().out.splitlines()[0] == "pass"


def test_decompose(p3_path, capsys):
    assert run(["decompose", p3_path, "--vertex", "a", "--side", "2"]) == 0
    out = capsys.readouterr().out
    assert "G1: a, b" in out
    assert "transversal side 2" in out and "e, c:1" in out


def test_normalword(p3_path, capsys):
    assert run(["normalword", p3_path, "--vertex", "a", "--word", "b:1 a:1 c:1"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "h: b:1"
    assert out[1] == "syllable 1: side 1, a:1"
    assert out[2] == "syllable 2: side 2, c:1"
    assert out[-1] == "type: One"


def test_scan_malnormal(p3_path, capsys):
    assert run(["scan", "malnormal", p3_path, "--vertex", "a", "--lg", "3", "--lh", "3"]) == 0
    assert "max_count: 2" in capsys.readouterr().out


def test_tree(z3z3_path, capsys):
    assert run(["tree", z3z3_path, "--vertex", "u", "--radius", "2"]) == 0
    out = capsys.readouterr().out
    assert "depth_counts: 1, 3, 6" in out


def test_tree_dot_stdout(z3z3_path, capsys):
    assert run(["tree", z3z3_path, "--vertex", "u", "--radius", "1", "--dot", "-"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("graph treeball")
    assert out.isascii()


def test_tree_dot_file(z3z3_path, tmp_path, capsys):
    target = tmp_path / "ball.dot"
    assert run(["tree", z3z3_path, "--vertex", "u", "--radius", "1", "--dot", str(target)]) == 0
    assert target.read_text().startswith("graph treeball")


def test_tree_resource_bound_is_exit_3(z3z3_path, capsys):
    code = run(["tree", z3z3_path, "--vertex", "u", "--radius", "4", "--length-bound", "2"])
    assert code == 3


def test_dynamics(z3z3_path, capsys):
    seq = []
    word = []
    for _ in range(6):
        word += ["u:1", "w:1"]
        seq.append(" ".join(word))
    code = run(["dynamics", z3z3_path, "--vertex", "u", "--seq", ";".join(seq), "--radius", "3"])
    assert code == 0
    out = capsys.readouterr().out
    assert "pattern: axis-translation" in out
    assert "fraction_converging: 1.0" in out


def test_dynamics_uncertified_is_exit_2(z3z3_path, capsys):
    code = run(["dynamics", z3z3_path, "--vertex", "u", "--seq", "u:1 w:1", "--radius", "3"])
    assert code == 2
    assert "certified" in capsys.readouterr().err


def test_byte_identical_reruns(c4_path, z3z3_path, capsys):
    run(["classify", c4_path, "--trace", "--format", "json"])
    first = capsys.readouterr().out
    run(["classify", c4_path, "--trace", "--format", "json"])
    assert capsys.readouterr().out == first
    run(["tree", z3z3_path, "--vertex", "u", "--radius", "2", "--dot", "-"])
    dot1 = capsys.readouterr().out
    run(["tree", z3z3_path, "--vertex", "u", "--radius", "2", "--dot", "-"])
    assert capsys.readouterr().out == dot1


def test_output_is_ascii(z3z3_path, p3_path, capsys):
    run(["ball", z3z3_path, "--length", "3"])
    assert capsys.readouterr().out.isascii()
    run(["normalword", p3_path, "--vertex", "a", "--word", "b:1 a:1 c:1"])
    assert capsys.readouterr().out.isascii()
