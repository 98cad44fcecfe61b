"""HTTP facade for interactive synthesis sessions.

Endpoints (JSON unless noted):

    POST /sessions                    multipart: matrix CSV, optional dk JSON,
                                      optional form fields phi / or_groups /
                                      or_budget_ms
    GET  /sessions/{id}               session snapshot
    POST /sessions/{id}/answer        {"answer": ...} -> next question or done
    GET  /sessions/{id}/afm           the synthesized model document
    GET  /sessions/{id}/export        ?format=afm-json|text (plain bytes)

Error bodies carry machine-readable `stage` and `code` fields.
"""

from __future__ import annotations

import json

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse

from .errors import ForgeError
from .model import render_text
from .session import IllegalAnswer, SessionStore


def _error(status: int, stage: str, code: str, message: str) -> JSONResponse:
    return JSONResponse({"stage": stage, "code": code, "message": message},
                        status_code=status)


def _forge_error(status: int, e: ForgeError) -> JSONResponse:
    return _error(status, e.stage, e.code, str(e))


def create_app(persist_dir: str | None = None, store: SessionStore | None = None) -> FastAPI:
    app = FastAPI(title="afm-forge sessions")
    app.state.store = store or SessionStore(persist_dir)

    def _get(session_id):
        return app.state.store.get(session_id)

    async def _read_part(part) -> str:
        if hasattr(part, "read"):
            data = await part.read()
            return data.decode("utf-8") if isinstance(data, bytes) else str(data)
        return str(part)

    @app.post("/sessions")
    async def create_session(request: Request):
        form = await request.form()
        matrix = form.get("matrix")
        if matrix is None:
            return _error(400, "session", "MissingMatrix", "multipart field 'matrix' required")
        csv_text = await _read_part(matrix)
        dk = form.get("dk")
        dk_text = None if dk is None else await _read_part(dk)
        options = {
            "phi": str(form.get("phi", "on")).lower() not in ("off", "false", "0"),
            "or_groups": str(form.get("or_groups", "off")).lower() in ("on", "true", "1"),
        }
        if form.get("or_budget_ms"):
            options["or_budget_ms"] = int(form.get("or_budget_ms"))
        try:
            session = app.state.store.create(csv_text, dk_text, options)
        except ForgeError as e:
            return _forge_error(400, e)
        state = session.step()
        return {"id": session.id, "status": state.status, "question": state.question}

    @app.get("/sessions/{session_id}")
    def get_state(session_id: str):
        session = _get(session_id)
        if session is None:
            return _error(404, "session", "UnknownSession", session_id)
        return session.snapshot()

    @app.post("/sessions/{session_id}/answer")
    async def answer(session_id: str, request: Request):
        session = _get(session_id)
        if session is None:
            return _error(404, "session", "UnknownSession", session_id)
        try:
            body = await request.json()
        except json.JSONDecodeError:
            return _error(400, "session", "BadRequest", "body must be JSON")
        if not isinstance(body, dict) or "answer" not in body:
            return _error(400, "session", "BadRequest", 'body must carry an "answer" field')
        try:
            state = session.answer(body["answer"])
        except IllegalAnswer as e:
            return _forge_error(409, e)
        except ForgeError as e:
            return _forge_error(409, e)
        app.state.store.save(session)
        return {"id": session.id, "status": state.status, "question": state.question}

    @app.get("/sessions/{session_id}/afm")
    def get_afm(session_id: str):
        session = _get(session_id)
        if session is None:
            return _error(404, "session", "UnknownSession", session_id)
        try:
            return json.loads(session.export_json())
        except IllegalAnswer as e:
            return _forge_error(409, e)

    @app.get("/sessions/{session_id}/export")
    def export(session_id: str, format: str = "afm-json"):
        session = _get(session_id)
        if session is None:
            return _error(404, "session", "UnknownSession", session_id)
        try:
            payload = session.export_json()
        except IllegalAnswer as e:
            return _forge_error(409, e)
        if format == "afm-json":
            return PlainTextResponse(payload, media_type="application/json")
        if format == "text":
            state = session.step()
            return PlainTextResponse(render_text(state.model))
        return _error(400, "session", "BadFormat", f"unknown format {format!r}")

    return app
