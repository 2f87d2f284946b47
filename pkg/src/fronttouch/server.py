"""Live session service: WebSocket text frames carrying the JSON messages
documented in protocol.md.

The server is a thin adapter over SessionEngine; every interaction decision
happens in the engine, so replaying a recorded session's events offline
yields the same TrialRecords the live session produced.
"""

from __future__ import annotations

import json

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .config import DEFAULTS, SessionDefaults
from .engine import EngineOutput, SessionEngine
from .tasks import TrialRecord
from .trace import MonotonicityError, SchemaError, TraceHeader, parse_event


def trial_message(record: TrialRecord) -> dict:
    return {
        "type": "trial",
        "session_id": record.session_id,
        "participant": record.participant,
        "technique": record.technique,
        "task": record.task,
        "trial": record.trial_index,
        "target": record.target_id,
        "start_ms": record.t_start_ms,
        "commit_ms": record.t_commit_ms,
        "correct": record.correct,
        "errors": record.error_commits,
        "presented": record.presented,
        "transcribed": record.transcription,
    }


def output_messages(engine: SessionEngine, out: EngineOutput, t_ms: int) -> list[dict]:
    messages: list[dict] = []
    if out.cursor is not None:
        messages.append({"type": "cursor", "theta1_deg": out.cursor[0], "theta2_deg": out.cursor[1]})
    for ui in out.ui_events:
        messages.append({"type": "ui_event", "kind": ui.kind, "node_id": ui.node_id, "t_ms": t_ms})
    for t in out.key_clicks:
        messages.append({"type": "key_click", "t_ms": t})
    for record in out.completed:
        messages.append(trial_message(record))
    if out.scene_changed:
        messages.append({"type": "scene", "nodes": engine.snapshot()})
    if out.done:
        messages.append(summary_message(engine))
    return messages


def summary_message(engine: SessionEngine) -> dict:
    records = [{k: v for k, v in trial_message(r).items() if k != "type"} for r in engine.records]
    return {"type": "summary", "records": records}


def error_message(code: str, detail: str) -> dict:
    return {"type": "error", "code": code, "detail": detail}


def create_app(defaults: SessionDefaults = DEFAULTS) -> FastAPI:
    app = FastAPI(title="fronttouch session server")

    @app.get("/health")
    async def health():
        return {"ok": True}

    @app.websocket("/session")
    async def session(ws: WebSocket):
        await ws.accept()
        engine: SessionEngine | None = None

        async def send(message: dict) -> None:
            await ws.send_text(json.dumps(message, separators=(",", ":")))

        try:
            while True:
                raw = await ws.receive_text()
                try:
                    data = json.loads(raw)
                    if not isinstance(data, dict):
                        raise ValueError("message is not an object")
                except ValueError as exc:
                    await send(error_message("schema", str(exc)))
                    continue

                kind = data.get("type")
                if kind == "start_session":
                    try:
                        header = TraceHeader(
                            task=data["task"],
                            technique=data["technique"],
                            seed=int(data.get("seed", 0)),
                            mapping_mode=data.get("mapping_mode"),
                            participant=int(data.get("participant", 0)),
                            session_index=int(data.get("session", 0)),
                        )
                        engine = SessionEngine(header, defaults=defaults)
                    except (KeyError, ValueError) as exc:
                        await send(error_message("config", str(exc)))
                        continue
                    await send({"type": "scene", "nodes": engine.snapshot()})
                elif kind in ("touch", "head"):
                    if engine is None:
                        await send(error_message("no_session", "send start_session first"))
                        continue
                    try:
                        event = parse_event(data, line=0)
                    except SchemaError as exc:
                        await send(error_message("schema", str(exc)))
                        continue
                    try:
                        out = engine.process(event)
                    except MonotonicityError as exc:
                        await send(error_message("monotonicity", str(exc)))
                        continue
                    for message in output_messages(engine, out, event.t_ms):
                        await send(message)
                elif kind == "end_session":
                    if engine is not None:
                        engine.finalize()
                        await send(summary_message(engine))
                        engine = None
                else:
                    await send(error_message("schema", f"unknown message type {kind!r}"))
        except WebSocketDisconnect:
            return

    return app


def serve(port: int, host: str = "127.0.0.1") -> None:
    import uvicorn

    uvicorn.run(create_app(), host=host, port=port, log_level="warning")
