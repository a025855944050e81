"""Request and response models for the HTTP service."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel


class ErrorInfo(BaseModel):
    code: Literal["validation", "resource", "io"]
    message: str


class ErrorResponse(BaseModel):
    error: ErrorInfo


class HealthResponse(BaseModel):
    status: str
    version: str


class GenRequest(BaseModel):
    model: Literal["sp1", "sp2", "den"]
    n: int
    edges: int | None = None
    seed: int = 0
    out_path: str


class GenResponse(BaseModel):
    out_path: str
    n: int
    edge_count: int


class ShardRequest(BaseModel):
    graph_path: str
    shards: int
    out_dir: str
    dangling: Literal["self-loop", "reject"] = "self-loop"


class ShardResponse(BaseModel):
    out_dir: str
    shards: int
    n: int
    nnz: int


class HitRequest(BaseModel):
    graph_path: str | None = None
    shard_dir: str | None = None
    start: int | None = None
    start_dist_path: str | None = None
    uniform: bool = False
    horizon: int
    order: Literal[0, 1] = 0
    engine: Literal["mem", "stream"] | None = None
    out_path: str
    fmt: Literal["tsv", "json"] = "tsv"
    quiet: bool = False
    threads: int = 1


class HitResponse(BaseModel):
    out_path: str
    n: int
    T: int
    order: int
    backend: str
    passes: int
    wall_time_s: float | None = None


class ExactRequest(BaseModel):
    graph_path: str
    method: Literal["recursive", "first-passage", "paths"]
    start: int | None = None
    horizon: int
    out_path: str
    fmt: Literal["tsv", "json"] = "tsv"


class ExactResponse(BaseModel):
    out_path: str
    method: str
    n: int
    T: int


class SampleDiagRequest(BaseModel):
    graph_path: str
    horizon: int
    eps: float | None = None
    rho: float | None = None
    walks: int | None = None
    seed: int
    out_path: str


class SampleDiagResponse(BaseModel):
    out_path: str
    walks: int
    n: int
    T: int


class EvalRequest(BaseModel):
    models: list[Literal["sp1", "sp2", "den"]]
    sizes: list[int]
    edges: list[int]
    instances: int = 30
    horizon: int = 10
    order: Literal[0, 1] = 0
    seed: int = 0
    out_path: str
    threads: int = 1


class EvalResponse(BaseModel):
    out_path: str
    report: dict
    table: str
