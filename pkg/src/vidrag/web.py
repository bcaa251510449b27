"""HTTP surface for the query pipeline.

All bodies are JSON UTF-8; errors come back as
{"error": {"code", "message", "field"?}} with 4xx/5xx statuses. Request
validation is explicit so malformed bodies produce 400s with the offending
field named. The engine (index, providers, catalog) is immutable and shared
across concurrent requests.
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles

from .errors import ProviderError, VidragError
from .service import RagEngine, payload_as_dict
from .transcript import render

__all__ = ["create_app", "serve"]


def _error(status: int, code: str, message: str, field: str | None = None) -> JSONResponse:
    body: dict = {"error": {"code": code, "message": message}}
    if field:
        body["error"]["field"] = field
    return JSONResponse(status_code=status, content=body)


def create_app(engine: RagEngine, version: str, static_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="vidrag", version=version)

    @app.exception_handler(ProviderError)
    async def provider_error(_request: Request, exc: ProviderError):
        return _error(502, exc.code, str(exc))

    @app.exception_handler(VidragError)
    async def vidrag_error(_request: Request, exc: VidragError):
        return _error(500, exc.code, str(exc))

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": version, "entries": len(engine.index)}

    @app.get("/v1/tools")
    def tools() -> dict:
        return {
            "tools": [
                {
                    "tool_id": tool.tool_id,
                    "description": tool.description,
                    "video_count": len(tool.video_ids),
                }
                for tool in engine.tools
            ]
        }

    @app.get("/v1/videos/{video_id}/transcript")
    def transcript(video_id: str):
        doc = engine.docs.get(video_id)
        if doc is None:
            return _error(404, "unknown_video", f"no video {video_id!r} in catalog")
        return PlainTextResponse(render(doc.aligned()))

    @app.post("/v1/query")
    async def query(request: Request):
        try:
            body = json.loads(await request.body())
        except json.JSONDecodeError:
            return _error(400, "invalid_json", "request body is not valid JSON")
        if not isinstance(body, dict):
            return _error(400, "invalid_request", "body must be a JSON object")
        query_text = body.get("query")
        if not isinstance(query_text, str) or not query_text.strip():
            return _error(
                400, "invalid_request", "field 'query' must be a non-empty string",
                field="query",
            )
        k = body.get("k", None)
        if k is not None and (isinstance(k, bool) or not isinstance(k, int) or k < 1):
            return _error(
                400, "invalid_request", "field 'k' must be an integer >= 1", field="k"
            )
        tool_id = body.get("tool", None)
        if tool_id is not None:
            if not isinstance(tool_id, str):
                return _error(
                    400, "invalid_request", "field 'tool' must be a string", field="tool"
                )
            if engine.tool_by_id(tool_id) is None:
                return _error(
                    400, "invalid_request", f"unknown tool {tool_id!r}", field="tool"
                )
        result = engine.answer_query(query_text, k=k, tool_id=tool_id)
        return JSONResponse(payload_as_dict(result))

    if static_dir and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app


def serve(
    engine: RagEngine,
    version: str,
    host: str = "127.0.0.1",
    port: int = 8040,
    static_dir: str | Path | None = None,
) -> None:
    import uvicorn

    uvicorn.run(create_app(engine, version, static_dir), host=host, port=port)
