"""Pydantic request models for the HTTP service.

Every request embeds the spec-file schema under "spec"; the remaining
fields are the per-operation parameters. Validation beyond shape (group
tables, edge sanity, fact consistency) happens in the core modules, whose
errors map to 400/409 responses.
"""
from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field

from ..specfile import ParsedSpec, spec_from_dict


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class VertexModel(_Strict):
    name: str
    group: dict


class SpecModel(_Strict):
    vertices: list[VertexModel]
    edges: list[list[str]] = Field(default_factory=list)
    conventions: dict | None = None

    def build(self) -> ParsedSpec:
        return spec_from_dict(self.model_dump())


class SpecRequest(_Strict):
    spec: SpecModel


class ClassifyRequest(SpecRequest):
    pass


class CartanRequest(SpecRequest):
    pass


class WordRequest(SpecRequest):
    word: str = ""


class WordEqRequest(SpecRequest):
    w1: str = ""
    w2: str = ""


class BallRequest(SpecRequest):
    length: int = Field(ge=0)


class DecomposeRequest(SpecRequest):
    vertex: str
    side: int | None = Field(default=None, ge=1, le=2)
    length: int = Field(default=4, ge=0)


class NormalWordRequest(SpecRequest):
    vertex: str
    word: str = ""


class IntersectionRequest(SpecRequest):
    t1: list[str] = Field(default_factory=list)
    t2: list[str] = Field(default_factory=list)
    g: str = ""
    h: str = ""
    length: int = Field(ge=0)


class MalnormalRequest(SpecRequest):
    vertex: str
    l_g: int = Field(ge=0)
    l_h: int = Field(ge=0)


class InvarianceRequest(SpecRequest):
    vertex: str
    seq: list[str]
    g: str = ""
    scale: int = Field(default=3, ge=0)


class TreeRequest(SpecRequest):
    vertex: str
    radius: int = Field(ge=0)
    length_bound: int | None = Field(default=None, ge=0)
    dot: bool = False


class DynamicsRequest(SpecRequest):
    vertex: str
    seq: list[str]
    radius: int = Field(ge=0)
    scale: int = Field(default=3, ge=0)
    f_edges: list[int] | None = None
