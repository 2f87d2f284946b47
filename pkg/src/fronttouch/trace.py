"""Event-trace files: JSONL with a header line, then touch / head events.

The first line is {"type":"header","task":...,"technique":...,"seed":...,
"mapping_mode":...} (plus optional participant / session fields); every
following line is one event. See protocol.md for the exact schema.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .config import MAPPING_MODES, TASKS, TECHNIQUES
from .techniques import HeadPose, TouchEvent


class SchemaError(ValueError):
    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"{message}{where}")


class MonotonicityError(ValueError):
    """Timestamps regressed within one event source."""


@dataclass(frozen=True)
class TraceHeader:
    task: str
    technique: str
    seed: int
    mapping_mode: str | None = None
    participant: int = 0
    session_index: int = 0

    def to_json_dict(self) -> dict:
        d = {
            "type": "header",
            "task": self.task,
            "technique": self.technique,
            "seed": self.seed,
            "mapping_mode": self.mapping_mode,
        }
        if self.participant:
            d["participant"] = self.participant
        if self.session_index:
            d["session"] = self.session_index
        return d


def parse_header(d: dict, line: int = 1) -> TraceHeader:
    try:
        task = d["task"]
        technique = d["technique"]
        seed = int(d["seed"])
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"bad header: {exc}", line) from exc
    if task not in TASKS:
        raise SchemaError(f"unknown task {task!r}", line)
    if technique not in TECHNIQUES:
        raise SchemaError(f"unknown technique {technique!r}", line)
    mode = d.get("mapping_mode")
    if mode is not None and mode not in MAPPING_MODES:
        raise SchemaError(f"unknown mapping_mode {mode!r}", line)
    return TraceHeader(
        task=task,
        technique=technique,
        seed=seed,
        mapping_mode=mode,
        participant=int(d.get("participant", 0)),
        session_index=int(d.get("session", 0)),
    )


def parse_event(d: dict, line: int) -> TouchEvent | HeadPose:
    kind = d.get("type")
    try:
        if kind == "touch":
            action = d["action"]
            if action not in ("down", "move", "up"):
                raise SchemaError(f"bad touch action {action!r}", line)
            source = d.get("source", "front")
            if source not in ("front", "side"):
                raise SchemaError(f"bad source {source!r}", line)
            return TouchEvent(
                t_ms=int(d["t_ms"]),
                action=action,
                finger=int(d["finger"]),
                x=int(d["x"]),
                y=int(d["y"]),
                source=source,
            )
        if kind == "head":
            return HeadPose(t_ms=int(d["t_ms"]), yaw_deg=float(d["yaw_deg"]), pitch_deg=float(d["pitch_deg"]))
    except SchemaError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"bad event: {exc}", line) from exc
    raise SchemaError(f"unknown event type {kind!r}", line)


def event_to_json_dict(event: TouchEvent | HeadPose) -> dict:
    if isinstance(event, TouchEvent):
        return {
            "type": "touch",
            "action": event.action,
            "finger": event.finger,
            "x": event.x,
            "y": event.y,
            "t_ms": event.t_ms,
            "source": event.source,
        }
    return {
        "type": "head",
        "yaw_deg": round(event.yaw_deg, 4),
        "pitch_deg": round(event.pitch_deg, 4),
        "t_ms": event.t_ms,
    }


def read_trace(path) -> tuple[TraceHeader, list[TouchEvent | HeadPose]]:
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise SchemaError("empty trace", 1)

    def load(line_no: int, text: str) -> dict:
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc.msg}", line_no) from exc
        if not isinstance(d, dict):
            raise SchemaError("record is not an object", line_no)
        return d

    head = load(1, lines[0])
    if head.get("type") != "header":
        raise SchemaError("first line must be the header", 1)
    header = parse_header(head, 1)
    events = []
    for i, text in enumerate(lines[1:], start=2):
        if not text.strip():
            continue
        events.append(parse_event(load(i, text), i))
    return header, events


def write_trace(path, header: TraceHeader, events) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(header.to_json_dict(), separators=(",", ":")) + "\n")
        for event in events:
            fh.write(json.dumps(event_to_json_dict(event), separators=(",", ":")) + "\n")


def check_monotone(events) -> None:
    """Raise MonotonicityError if any source's timestamps regress."""
    last: dict[str, int] = {}
    for event in events:
        key = event.source if isinstance(event, TouchEvent) else "head"
        if key in last and event.t_ms < last[key]:
            raise MonotonicityError(f"t_ms {event.t_ms} after {last[key]} on source {key!r}")
        last[key] = event.t_ms
