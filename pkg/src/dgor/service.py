"""Stateless HTTP service exposing the calculator endpoints under /api/v1.

Bodies are JSON mirroring the library types; responses come from the same
serialization path as the CLI, so identical logical inputs yield
byte-identical documents. Validation failures return 422 with a
machine-readable problem code.
"""
from __future__ import annotations

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse

from . import api
from .errors import DgorError, UsageError


def _json_response(document: dict, status_code: int = 200) -> Response:
    from .serialize import dumps

    return Response(content=dumps(document), status_code=status_code,
                    media_type="application/json")


def create_app() -> FastAPI:
    app = FastAPI(title="dgor service", docs_url=None, redoc_url=None)

    @app.exception_handler(DgorError)
    async def _dgor_error(_request: Request, exc: DgorError):
        return _json_response({"error": api.error_document(exc)}, status_code=422)

    async def _body(request: Request) -> dict:
        try:
            payload = await request.json()
        except Exception:
            raise UsageError("request body must be a JSON object")
        if not isinstance(payload, dict):
            raise UsageError("request body must be a JSON object")
        return payload

    @app.get("/healthz")
    async def healthz():
        return JSONResponse({"status": "ok"})

    @app.post("/api/v1/dgor")
    async def dgor_endpoint(request: Request):
        return _json_response(api.compute_request(await _body(request)))

    @app.post("/api/v1/samplesize")
    async def samplesize_endpoint(request: Request):
        return _json_response(api.samplesize_request(await _body(request)))

    @app.post("/api/v1/coords")
    async def coords_endpoint(request: Request):
        return _json_response(api.coords_request(await _body(request)))

    return app
