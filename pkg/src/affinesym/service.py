"""FastAPI service wrapping the workbench.

All computation is pure and stateless, so the service is a thin request ->
RunResult mapping: each command has a POST endpoint taking the shared config
body; artifacts (JSON report, OBJ mesh, CSV trajectory) come back inline in
the `files` field and the client decides where to write them.

Numerical failures (degenerate surface, blow-up, inadmissible curve, ...)
map to HTTP 400 with the exception type in the payload; malformed configs
are FastAPI's standard 422.
"""

from __future__ import annotations

import json

from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import JSONResponse
from pydantic import ValidationError

from . import __version__
from .catalog import sphere_names, surface3_names
from .config import CommandName, ConfigBody, RunConfig, RunResult
from .errors import GeometryError
from .runners import execute

app = FastAPI(
    title="affinesym",
    description="Equiaffine geometry workbench: Blaschke invariants, "
    "pointwise symmetry classification, affine-sphere family constructions, "
    "structure-equation flows.",
    version=__version__,
)


@app.exception_handler(GeometryError)
async def _geometry_error(request: Request, exc: GeometryError):
    return JSONResponse(
        status_code=400,
        content={"error": {"type": type(exc).__name__, "detail": str(exc)}},
    )


@app.get("/v1/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.get("/v1/catalog")
def catalog() -> dict:
    return {"spheres": sphere_names(), "surfaces": surface3_names()}


def _make_endpoint(command: CommandName):
    def endpoint(body: ConfigBody) -> RunResult:
        try:
            cfg = RunConfig(command=command, **body.model_dump())
        except ValidationError as exc:
            # cross-field requirements (e.g. flow block present) surface as
            # the same 422 shape FastAPI uses for per-field failures
            raise HTTPException(status_code=422, detail=json.loads(exc.json()))
        return execute(cfg)

    endpoint.__name__ = command
    return endpoint


for _command in ("invariants", "classify", "construct", "verify", "flow"):
    app.post(f"/v1/{_command}", response_model=RunResult)(_make_endpoint(_command))
