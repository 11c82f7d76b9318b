"""FastAPI service exposing the toolkit.

One endpoint per operation; every request carries a spec-file description
of the graph product. Input problems map to 400, resource bounds to 409,
internal invariant failures to 500; shape errors are FastAPI's usual 422.
"""
from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__, amalgam, classify, tree
from ..errors import GraphproxError, InputError, ResourceBoundError
from ..words import (
    GraphProduct,
    canonical,
    enumerate_ball,
    equals,
    format_word,
    parse_word,
    reduce_word,
    verify_intersection_lemma,
)
from .models import (
    BallRequest,
    CartanRequest,
    ClassifyRequest,
    DecomposeRequest,
    DynamicsRequest,
    IntersectionRequest,
    InvarianceRequest,
    MalnormalRequest,
    NormalWordRequest,
    SpecModel,
    TreeRequest,
    WordEqRequest,
    WordRequest,
)

app = FastAPI(title="graphprox", version=__version__)


def _error_payload(exc: Exception) -> dict:
    return {"error": str(exc), "kind": type(exc).__name__}


@app.exception_handler(InputError)
async def _input_error(request: Request, exc: InputError) -> JSONResponse:
    return JSONResponse(status_code=400, content=_error_payload(exc))


@app.exception_handler(ResourceBoundError)
async def _resource_error(request: Request, exc: ResourceBoundError) -> JSONResponse:
    return JSONResponse(status_code=409, content=_error_payload(exc))


@app.exception_handler(GraphproxError)
async def _internal_error(request: Request, exc: GraphproxError) -> JSONResponse:
    return JSONResponse(status_code=500, content=_error_payload(exc))


def _ctx(spec: SpecModel) -> tuple[GraphProduct, object]:
    graph, assignment, conventions = spec.build()
    return GraphProduct(graph, assignment), conventions


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/classify")
def classify_endpoint(req: ClassifyRequest) -> dict:
    graph, assignment, conventions = req.spec.build()
    return classify.classify(graph, assignment, conventions).to_dict()


@app.post("/cartan")
def cartan_endpoint(req: CartanRequest) -> dict:
    graph, assignment, conventions = req.spec.build()
    return classify.cartan_report(graph, assignment, conventions)


@app.post("/word/reduce")
def word_reduce(req: WordRequest) -> dict:
    ctx, _ = _ctx(req.spec)
    out = reduce_word(parse_word(ctx, req.word))
    return {"input": req.word, "result": format_word(out), "length": len(out)}


@app.post("/word/canonical")
def word_canonical(req: WordRequest) -> dict:
    ctx, _ = _ctx(req.spec)
    out = canonical(parse_word(ctx, req.word))
    return {"input": req.word, "result": format_word(out), "length": len(out)}


@app.post("/word/eq")
def word_eq(req: WordEqRequest) -> dict:
    ctx, _ = _ctx(req.spec)
    return {"equal": equals(parse_word(ctx, req.w1), parse_word(ctx, req.w2))}


@app.post("/ball")
def ball_endpoint(req: BallRequest) -> dict:
    ctx, _ = _ctx(req.spec)
    elements = enumerate_ball(ctx, req.length)
    return {
        "length": req.length,
        "count": len(elements),
        "elements": [format_word(w) for w in elements],
    }


@app.post("/decompose")
def decompose_endpoint(req: DecomposeRequest) -> dict:
    ctx, _ = _ctx(req.spec)
    dec = amalgam.decompose(ctx, req.vertex)
    out: dict = {"decomposition": dec.to_dict()}
    if req.side is not None:
        t = amalgam.coset_transversal(dec, req.side, req.length)
        out["transversal"] = {
            "side": t.side,
            "reps": [format_word(w) for w in t.reps],
            "complete": t.complete,
            "length_bound": t.length_bound,
        }
    return out


@app.post("/normalword")
def normalword_endpoint(req: NormalWordRequest) -> dict:
    ctx, _ = _ctx(req.spec)
    dec = amalgam.decompose(ctx, req.vertex)
    word = parse_word(ctx, req.word)
    nw = amalgam.normal_word(dec, word)
    out = nw.to_dict()
    out["input"] = req.word
    out["reconstructed"] = format_word(nw.to_word())
    return out


@app.post("/check/intersection")
def intersection_endpoint(req: IntersectionRequest) -> dict:
    ctx, _ = _ctx(req.spec)
    return verify_intersection_lemma(
        ctx,
        req.t1,
        req.t2,
        parse_word(ctx, req.g),
        parse_word(ctx, req.h),
        req.length,
    )


@app.post("/scan/malnormal")
def malnormal_endpoint(req: MalnormalRequest) -> dict:
    ctx, _ = _ctx(req.spec)
    dec = amalgam.decompose(ctx, req.vertex)
    return amalgam.malnormality_scan(dec, req.l_g, req.l_h)


@app.post("/check/invariance")
def invariance_endpoint(req: InvarianceRequest) -> dict:
    ctx, _ = _ctx(req.spec)
    dec = amalgam.decompose(ctx, req.vertex)
    seq = [parse_word(ctx, s) for s in req.seq]
    return amalgam.invariance_check(dec, seq, parse_word(ctx, req.g), req.scale)


@app.post("/tree")
def tree_endpoint(req: TreeRequest) -> dict:
    ctx, _ = _ctx(req.spec)
    dec = amalgam.decompose(ctx, req.vertex)
    ball = tree.build_ball(dec, req.radius, req.length_bound)
    counts = [0] * (req.radius + 1)
    for v in ball.vertices:
        counts[v.depth] += 1
    out: dict = {"tree": ball.to_dict(), "depth_counts": counts}
    if req.dot:
        out["dot"] = tree.to_dot(ball)
    return out


@app.post("/dynamics")
def dynamics_endpoint(req: DynamicsRequest) -> dict:
    ctx, _ = _ctx(req.spec)
    dec = amalgam.decompose(ctx, req.vertex)
    seq = [parse_word(ctx, s) for s in req.seq]
    return tree.dynamics_experiment(
        dec,
        seq,
        req.radius,
        scale=req.scale,
        F=req.f_edges,
        length_bound=None,
    )
