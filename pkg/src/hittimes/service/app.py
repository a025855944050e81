"""FastAPI service exposing the hitting-time toolkit.

Each endpoint wraps one pipeline from ``hittimes.workflows``; input and
output paths in a request are resolved on the server's filesystem.  Run
standalone with ``uvicorn hittimes.service:app``.  Failures map to a
structured payload ``{"error": {"code", "message"}}`` where the code is
one of validation / resource / io.
"""

from __future__ import annotations

from fastapi import FastAPI
from fastapi.responses import JSONResponse

from .. import __version__, workflows
from ..errors import HittimesError, failure_class_of
from . import schemas

_STATUS = {"validation": 400, "resource": 413, "io": 500}


def _error_response(exc: BaseException) -> JSONResponse:
    code = failure_class_of(exc)
    return JSONResponse(
        status_code=_STATUS[code],
        content={"error": {"code": code, "message": str(exc)}},
    )


def create_app() -> FastAPI:
    app = FastAPI(
        title="hittimes",
        version=__version__,
        description=(
            "Approximate mean truncated random-walk hitting times on directed "
            "graphs: generators, approximation engines, exact oracles, a "
            "Monte-Carlo estimator and an accuracy benchmark."
        ),
    )

    @app.exception_handler(HittimesError)
    async def _hittimes_error(request, exc: HittimesError):
        return _error_response(exc)

    @app.exception_handler(OSError)
    async def _os_error(request, exc: OSError):
        return _error_response(exc)

    @app.get("/v1/health", response_model=schemas.HealthResponse)
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post(
        "/v1/gen",
        response_model=schemas.GenResponse,
        responses={400: {"model": schemas.ErrorResponse}},
    )
    def gen(req: schemas.GenRequest) -> dict:
        return workflows.run_gen(req.model, req.n, req.edges, req.seed, req.out_path)

    @app.post(
        "/v1/shard",
        response_model=schemas.ShardResponse,
        responses={400: {"model": schemas.ErrorResponse}},
    )
    def shard(req: schemas.ShardRequest) -> dict:
        return workflows.run_shard(req.graph_path, req.shards, req.out_dir, req.dangling)

    @app.post(
        "/v1/hit",
        response_model=schemas.HitResponse,
        response_model_exclude_none=True,
        responses={400: {"model": schemas.ErrorResponse}},
    )
    def hit(req: schemas.HitRequest) -> dict:
        return workflows.run_hit(
            req.graph_path,
            req.shard_dir,
            req.start,
            req.start_dist_path,
            req.uniform,
            req.horizon,
            order=req.order,
            engine=req.engine,
            out_path=req.out_path,
            fmt=req.fmt,
            quiet=req.quiet,
            threads=req.threads,
        )

    @app.post(
        "/v1/exact",
        response_model=schemas.ExactResponse,
        responses={400: {"model": schemas.ErrorResponse}},
    )
    def exact(req: schemas.ExactRequest) -> dict:
        return workflows.run_exact(
            req.graph_path, req.method, req.start, req.horizon, req.out_path, req.fmt
        )

    @app.post(
        "/v1/sample-diag",
        response_model=schemas.SampleDiagResponse,
        responses={400: {"model": schemas.ErrorResponse}},
    )
    def sample_diag(req: schemas.SampleDiagRequest) -> dict:
        return workflows.run_sample_diag(
            req.graph_path, req.horizon, req.eps, req.rho, req.walks, req.seed, req.out_path
        )

    @app.post(
        "/v1/eval",
        response_model=schemas.EvalResponse,
        responses={400: {"model": schemas.ErrorResponse}},
    )
    def eval_benchmark(req: schemas.EvalRequest) -> dict:
        return workflows.run_eval(
            req.models,
            req.sizes,
            req.edges,
            req.instances,
            req.horizon,
            req.order,
            req.seed,
            req.out_path,
            threads=req.threads,
        )

    return app


app = create_app()
