"""Batch command line front end.

A thin client of the HTTP service: every command posts to an endpoint,
by default against an in-process instance of the app, or against a remote
server with --server URL. Output is deterministic; --format picks plain
text (default) or pretty-printed JSON with sorted keys.

Exit codes: 0 success / check passed; 1 check failed or an unmet
--expect; 2 invalid input; 3 resource bound exceeded.

Words use the grammar "vertex:element ...", e.g. "a:1 b:r^2 s"; the empty
string is the identity, displayed as "e" in text output.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Callable, Sequence

from .errors import InputError

STATUS_WORDS = {
    "pp": "properly_proximal",
    "not_pp": "not_properly_proximal",
    "unknown": "unknown",
}


def _w(text: str) -> str:
    """Identity words display as 'e' in text output."""
    return text if text else "e"


class Client:
    """POSTs against the in-process app, or a remote server when given."""

    def __init__(self, server: str | None = None):
        if server is None:
            import warnings

            with warnings.catch_warnings():
                # starlette warns about the installed httpx major version
                warnings.simplefilter("ignore")
                from fastapi.testclient import TestClient

            from .service.app import app

            self._client = TestClient(app, raise_server_exceptions=False)
        else:
            import httpx

            self._client = httpx.Client(base_url=server, timeout=600.0)

    def post(self, path: str, payload: dict) -> tuple[int, dict]:
        r = self._client.post(path, json=payload)
        return r.status_code, _safe_json(r)

    def get(self, path: str) -> tuple[int, dict]:
        r = self._client.get(path)
        return r.status_code, _safe_json(r)


def _safe_json(response) -> dict:
    try:
        data = response.json()
    except ValueError:
        return {"error": response.text.strip() or "unparseable response"}
    if isinstance(data, dict):
        return data
    return {"value": data}


def _load_spec(source: str) -> dict:
    """The spec argument is a path, or inline JSON when it starts with '{'."""
    text = source if source.lstrip().startswith("{") else _read_file(source)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"spec is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise InputError("spec must be a JSON object")
    return data


def _read_file(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise InputError(f"cannot read spec file {path!r}: {e}") from e


def _split_csv(text: str) -> list[str]:
    return [part for part in (p.strip() for p in text.split(",")) if part]


def _split_words(text: str) -> list[str]:
    """Semicolon-separated word list; a trailing semicolon is tolerated."""
    parts = [p.strip() for p in text.split(";")]
    if parts and parts[-1] == "":
        parts.pop()
    return parts


def _exit_for(status: int) -> int:
    if 200 <= status < 300:
        return 0
    if status in (400, 422):
        return 2
    if status == 409:
        return 3
    return 1


def _describe_error(payload: dict) -> str:
    if "error" in payload:
        return str(payload["error"])
    detail = payload.get("detail")
    if isinstance(detail, list) and detail:
        first = detail[0]
        loc = ".".join(str(x) for x in first.get("loc", ()))
        return f"{loc}: {first.get('msg', 'invalid')}"
    return str(detail or payload)


# ---------------------------------------------------------------------------
# text renderers (payload -> lines)


def _r_classify(p: dict, args) -> list[str]:
    lines = [f"status: {p['status']}"]
    if args.trace:
        lines.append("trace:")
        for t in p["trace"]:
            witness = ",".join(t["witness"]) or "-"
            sub = ",".join(t["subgraph"]) or "-"
            lines.append(
                f"  {t['rule']} witness={witness} subgraph={sub} -> {t['local_result']}"
            )
    for v, fact in p["needed_facts"]:
        lines.append(f"needed: {v}.{fact}")
    return lines


def _r_cartan(p: dict, args) -> list[str]:
    lines = [f"applicable: {p['applicable']}"]
    if "no_cartan" in p:
        lines.append(f"no_cartan: {str(p['no_cartan']).lower()}")
        lines.append(f"c_rigid: {str(p['c_rigid']).lower()}")
    if "reason" in p:
        lines.append(f"reason: {p['reason']}")
    for v, fact in p.get("needed_facts", ()):
        lines.append(f"needed: {v}.{fact}")
    return lines


def _r_word(p: dict, args) -> list[str]:
    return [_w(p["result"])]


def _r_word_eq(p: dict, args) -> list[str]:
    return [str(p["equal"]).lower()]


def _r_ball(p: dict, args) -> list[str]:
    return [f"count: {p['count']}"] + [_w(e) for e in p["elements"]]


def _r_decompose(p: dict, args) -> list[str]:
    d = p["decomposition"]
    lines = [
        f"vertex: {d['vertex']}",
        f"G1: {', '.join(d['g1_vertices'])}",
        f"G2: {', '.join(d['g2_vertices'])}",
        f"H: {', '.join(d['h_vertices']) or '-'}",
        f"degenerate: {str(d['degenerate']).lower()}",
    ]
    if "transversal" in p:
        t = p["transversal"]
        state = "complete" if t["complete"] else "partial"
        lines.append(
            f"transversal side {t['side']} ({state}, bound {t['length_bound']}): "
            + ", ".join(_w(r) for r in t["reps"])
        )
    return lines


def _r_normalword(p: dict, args) -> list[str]:
    lines = [f"h: {_w(p['h'])}"]
    for i, s in enumerate(p["syllables"], start=1):
        lines.append(f"syllable {i}: side {s['side']}, {_w(s['rep'])}")
    lines.append(f"k: {p['k']}")
    lines.append(f"type: {p['type']}")
    return lines


def _r_intersection(p: dict, args) -> list[str]:
    lines = ["pass" if p["pass"] else "fail"]
    lines.append(f"checked: {p['checked']}")
    lines.append(f"scale: {p['scale']}")
    if not p["pass"]:
        c = p["counterexample"]
        lines.append(f"counterexample: x = {_w(c['x'])}, w = {_w(c['w'])}")
    return lines


def _r_malnormal(p: dict, args) -> list[str]:
    return [
        f"l_g: {p['l_g']}",
        f"l_h: {p['l_h']}",
        f"h_ball: {p['h_ball_size']}",
        f"candidates: {p['candidates']}",
        f"max_count: {p['max_count']}",
        f"witness: {_w(p['witness']) if p['witness'] is not None else '-'}",
        f"note: {p['note']}",
    ]


def _r_invariance(p: dict, args) -> list[str]:
    esc = p["escape"]
    if esc["certified"]:
        head = f"escape: certified at scale {esc['scale']} (clean from index {esc['escaped_from_index']})"
    else:
        f = esc["failure"]
        head = (
            f"escape: failed at scale {esc['scale']} "
            f"(t1 = {_w(f['t1'])}, t2 = {_w(f['t2'])})"
        )
    lines = [head]
    for row in p["agreement"]:
        mark = "agree" if row["agree"] else "DISAGREE"
        lines.append(
            f"n={row['index']}: {row['type']} vs {row['type_with_g']} ({mark})"
        )
    tail = p["agree_from_index"]
    lines.append(f"agree_from_index: {tail if tail is not None else '-'}")
    return lines


def _r_tree(p: dict, args) -> list[str]:
    t = p["tree"]
    return [
        f"vertices: {len(t['vertices'])}",
        f"edges: {len(t['edges'])}",
        "depth_counts: " + ", ".join(str(c) for c in p["depth_counts"]),
        f"indices: {t['indices'][0]}, {t['indices'][1]}",
    ]


def _r_dynamics(p: dict, args) -> list[str]:
    esc = p["escape"]
    a, r = p["attractor"], p["repeller"]
    return [
        f"pattern: {p['pattern']}",
        f"escape: certified at scale {esc['scale']} (clean from index {esc['escaped_from_index']})",
        f"attractor: depth {a['depth']}, rep {_w(a['rep'])}",
        f"repeller: depth {r['depth']}, rep {_w(r['rep'])}",
        "F: " + (", ".join(_w(k) for k in p["F"]) or "-"),
        f"tracked: {len(p['tracked'])}",
        f"fraction_converging: {p['fraction_converging']}",
        f"all_converged_by_n: {p['all_converged_by_n'] if p['all_converged_by_n'] is not None else '-'}",
        f"exceptions: {len(p['exceptions'])}",
    ]


# ---------------------------------------------------------------------------
# command handlers


def _emit(payload: dict, args, render: Callable[[dict, object], list[str]]) -> None:
    if args.format == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print("\n".join(render(payload, args)))


def _cmd_classify(args, client: Client) -> int:
    status, payload = client.post("/classify", {"spec": _load_spec(args.spec)})
    code = _exit_for(status)
    if code:
        print(f"error: {_describe_error(payload)}", file=sys.stderr)
        return code
    _emit(payload, args, _r_classify)
    if args.expect and payload["status"] != STATUS_WORDS[args.expect]:
        print(
            f"expectation failed: wanted {STATUS_WORDS[args.expect]}, "
            f"got {payload['status']}",
            file=sys.stderr,
        )
        return 1
    return 0


def _cmd_cartan(args, client: Client) -> int:
    status, payload = client.post("/cartan", {"spec": _load_spec(args.spec)})
    code = _exit_for(status)
    if code:
        print(f"error: {_describe_error(payload)}", file=sys.stderr)
        return code
    _emit(payload, args, _r_cartan)
    return 0


def _cmd_word(args, client: Client) -> int:
    spec = _load_spec(args.spec)
    if args.subcommand == "eq":
        status, payload = client.post(
            "/word/eq", {"spec": spec, "w1": args.w1, "w2": args.w2}
        )
        render = _r_word_eq
    else:
        status, payload = client.post(
            f"/word/{args.subcommand}", {"spec": spec, "word": args.word}
        )
        render = _r_word
    code = _exit_for(status)
    if code:
        print(f"error: {_describe_error(payload)}", file=sys.stderr)
        return code
    _emit(payload, args, render)
    return 0


def _cmd_ball(args, client: Client) -> int:
    status, payload = client.post(
        "/ball", {"spec": _load_spec(args.spec), "length": args.length}
    )
    code = _exit_for(status)
    if code:
        print(f"error: {_describe_error(payload)}", file=sys.stderr)
        return code
    _emit(payload, args, _r_ball)
    return 0


def _cmd_decompose(args, client: Client) -> int:
    req: dict = {"spec": _load_spec(args.spec), "vertex": args.vertex}
    if args.side is not None:
        req["side"] = args.side
        req["length"] = args.length
    status, payload = client.post("/decompose", req)
    code = _exit_for(status)
    if code:
        print(f"error: {_describe_error(payload)}", file=sys.stderr)
        return code
    _emit(payload, args, _r_decompose)
    return 0


def _cmd_normalword(args, client: Client) -> int:
    status, payload = client.post(
        "/normalword",
        {"spec": _load_spec(args.spec), "vertex": args.vertex, "word": args.word},
    )
    code = _exit_for(status)
    if code:
        print(f"error: {_describe_error(payload)}", file=sys.stderr)
        return code
    _emit(payload, args, _r_normalword)
    return 0


def _cmd_check(args, client: Client) -> int:
    spec = _load_spec(args.spec)
    if args.subcommand == "intersection":
        status, payload = client.post(
            "/check/intersection",
            {
                "spec": spec,
                "t1": _split_csv(args.t1),
                "t2": _split_csv(args.t2),
                "g": args.g,
                "h": args.h,
                "length": args.len,
            },
        )
        code = _exit_for(status)
        if code:
            print(f"error: {_describe_error(payload)}", file=sys.stderr)
            return code
        _emit(payload, args, _r_intersection)
        return 0 if payload["pass"] else 1
    status, payload = client.post(
        "/check/invariance",
        {
            "spec": spec,
            "vertex": args.vertex,
            "seq": _split_words(args.seq),
            "g": args.g,
            "scale": args.scale,
        },
    )
    code = _exit_for(status)
    if code:
        print(f"error: {_describe_error(payload)}", file=sys.stderr)
        return code
    _emit(payload, args, _r_invariance)
    return 0 if payload["escape"]["certified"] else 1


def _cmd_scan(args, client: Client) -> int:
    status, payload = client.post(
        "/scan/malnormal",
        {
            "spec": _load_spec(args.spec),
            "vertex": args.vertex,
            "l_g": args.lg,
            "l_h": args.lh,
        },
    )
    code = _exit_for(status)
    if code:
        print(f"error: {_describe_error(payload)}", file=sys.stderr)
        return code
    _emit(payload, args, _r_malnormal)
    return 0


def _cmd_tree(args, client: Client) -> int:
    req: dict = {
        "spec": _load_spec(args.spec),
        "vertex": args.vertex,
        "radius": args.radius,
        "dot": args.dot is not None,
    }
    if args.length_bound is not None:
        req["length_bound"] = args.length_bound
    status, payload = client.post("/tree", req)
    code = _exit_for(status)
    if code:
        print(f"error: {_describe_error(payload)}", file=sys.stderr)
        return code
    if args.dot == "-":
        print(payload["dot"], end="")
        return 0
    if args.dot is not None:
        Path(args.dot).write_text(payload["dot"])
    _emit(payload, args, _r_tree)
    return 0


def _cmd_dynamics(args, client: Client) -> int:
    req: dict = {
        "spec": _load_spec(args.spec),
        "vertex": args.vertex,
        "seq": _split_words(args.seq),
        "radius": args.radius,
        "scale": args.scale,
    }
    if args.f_edges is not None:
        req["f_edges"] = [int(x) for x in _split_csv(args.f_edges)]
    status, payload = client.post("/dynamics", req)
    code = _exit_for(status)
    if code:
        print(f"error: {_describe_error(payload)}", file=sys.stderr)
        return code
    _emit(payload, args, _r_dynamics)
    return 0


def _cmd_serve(args, client: Client) -> int:
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=args.host, port=args.port)
    return 0


# ---------------------------------------------------------------------------
# parser


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--format", choices=("text", "json"), default="text", help="output format"
    )
    common.add_argument(
        "--server", default=None, help="remote service URL (default: in-process)"
    )

    p = argparse.ArgumentParser(
        prog="graphprox",
        description="Proper proximality of graph products, normal forms, "
        "amalgam decompositions, and Bass-Serre tree experiments.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    sc = sub.add_parser("classify", parents=[common], help="classify a graph product")
    sc.add_argument("spec")
    sc.add_argument("--trace", action="store_true", help="show the recursion trace")
    sc.add_argument("--expect", choices=sorted(STATUS_WORDS), default=None)
    sc.set_defaults(func=_cmd_classify)

    sca = sub.add_parser("cartan", parents=[common], help="Cartan-rigidity report")
    sca.add_argument("spec")
    sca.set_defaults(func=_cmd_cartan)

    sw = sub.add_parser("word", parents=[common], help="word normal forms")
    wsub = sw.add_subparsers(dest="subcommand", required=True)
    for name in ("reduce", "canonical"):
        wp = wsub.add_parser(name, parents=[common])
        wp.add_argument("spec")
        wp.add_argument("--word", required=True)
        wp.set_defaults(func=_cmd_word)
    weq = wsub.add_parser("eq", parents=[common])
    weq.add_argument("spec")
    weq.add_argument("--w1", required=True)
    weq.add_argument("--w2", required=True)
    weq.set_defaults(func=_cmd_word)

    sb = sub.add_parser("ball", parents=[common], help="enumerate a ball")
    sb.add_argument("spec")
    sb.add_argument("--length", type=int, required=True)
    sb.set_defaults(func=_cmd_ball)

    sd = sub.add_parser("decompose", parents=[common], help="amalgam decomposition")
    sd.add_argument("spec")
    sd.add_argument("--vertex", required=True)
    sd.add_argument("--side", type=int, choices=(1, 2), default=None)
    sd.add_argument("--length", type=int, default=4, help="transversal length bound")
    sd.set_defaults(func=_cmd_decompose)

    sn = sub.add_parser("normalword", parents=[common], help="amalgam normal word")
    sn.add_argument("spec")
    sn.add_argument("--vertex", required=True)
    sn.add_argument("--word", required=True)
    sn.set_defaults(func=_cmd_normalword)

    sch = sub.add_parser("check", parents=[common], help="bounded lemma checks")
    chsub = sch.add_subparsers(dest="subcommand", required=True)
    ci = chsub.add_parser("intersection", parents=[common])
    ci.add_argument("spec")
    ci.add_argument("--t1", required=True, help="comma-separated vertices")
    ci.add_argument("--t2", required=True, help="comma-separated vertices")
    ci.add_argument("--g", default="")
    ci.add_argument("--h", default="")
    ci.add_argument("--len", type=int, required=True)
    ci.set_defaults(func=_cmd_check)
    cv = chsub.add_parser("invariance", parents=[common])
    cv.add_argument("spec")
    cv.add_argument("--vertex", required=True)
    cv.add_argument("--seq", required=True, help="semicolon-separated words")
    cv.add_argument("--g", default="")
    cv.add_argument("--scale", type=int, default=3)
    cv.set_defaults(func=_cmd_check)

    ss = sub.add_parser("scan", parents=[common], help="bounded scans")
    ssub = ss.add_subparsers(dest="subcommand", required=True)
    sm = ssub.add_parser("malnormal", parents=[common])
    sm.add_argument("spec")
    sm.add_argument("--vertex", required=True)
    sm.add_argument("--lg", type=int, required=True)
    sm.add_argument("--lh", type=int, required=True)
    sm.set_defaults(func=_cmd_scan)

    st = sub.add_parser("tree", parents=[common], help="Bass-Serre tree ball")
    st.add_argument("spec")
    st.add_argument("--vertex", required=True)
    st.add_argument("--radius", type=int, required=True)
    st.add_argument("--length-bound", type=int, default=None)
    st.add_argument("--dot", default=None, metavar="FILE", help="write DOT ('-' = stdout)")
    st.set_defaults(func=_cmd_tree)

    sy = sub.add_parser("dynamics", parents=[common], help="north-south dynamics")
    sy.add_argument("spec")
    sy.add_argument("--vertex", required=True)
    sy.add_argument("--seq", required=True, help="semicolon-separated words")
    sy.add_argument("--radius", type=int, required=True)
    sy.add_argument("--scale", type=int, default=3)
    sy.add_argument("--f-edges", default=None, help="comma-separated edge indices")
    sy.set_defaults(func=_cmd_dynamics)

    sv = sub.add_parser("serve", parents=[common], help="run the HTTP service")
    sv.add_argument("--host", default="127.0.0.1")
    sv.add_argument("--port", type=int, default=8000)
    sv.set_defaults(func=_cmd_serve)

    return p


def run(argv: Sequence[str]) -> int:
    args = _build_parser().parse_args(argv)
    try:
        client = Client(args.server) if args.func is not _cmd_serve else None
        return args.func(args, client)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    entrypoint()
