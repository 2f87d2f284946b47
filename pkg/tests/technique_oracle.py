"""Second route for the technique state machines.

Replays concrete touch events through the declarative transition tables from
techniques.legal_transitions. A small classifier turns each event into an
abstract symbol using only the documented finger-role rules plus the current
*table* state, so commits and cursor actions here come from the tables, not
from the machine code under test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from fronttouch.config import TechniqueConfig
from fronttouch.mapping import MappingMode
from fronttouch.techniques import (
    Commit,
    CursorMoved,
    TouchEvent,
    legal_transitions,
)


@dataclass
class _FingerRec:
    t_down: int
    x0: int
    y0: int
    max_disp: float = 0.0
    role: str = "ignored"  # active / other / ignored


@dataclass
class TableReplayer:
    technique: str
    mode: MappingMode | None
    cfg: TechniqueConfig = field(default_factory=TechniqueConfig)

    def __post_init__(self) -> None:
        self.table = legal_transitions(self.technique)
        self.state = "idle"
        self.fingers: dict[int, _FingerRec] = {}
        self.window_deadline: int | None = None
        self.window_anchor: tuple[int, int] | None = None
        self.last_commit: int | None = None
        self.gaze = self.technique in ("side-gaze", "front-gaze")

    # -- classification -------------------------------------------------------

    def _down_symbol(self, ev: TouchEvent) -> tuple[str, str]:
        """(symbol, role assigned to the finger)."""
        if self.gaze:
            return "down", "other"
        s = self.state
        if self.technique in ("front-world", "front-view"):
            if s in ("idle", "dead"):
                return "down_active", "active"
            if s == "touch":
                return "down_other", "other"
        elif self.technique == "two-fingers":
            if s == "idle":
                return "down_active", "active"
            if s == "drag":
                return "down_other", "other"
            return "down_ignored", "ignored"
        elif self.technique == "drag-n-tap":
            if s in ("idle", "idle_x"):
                return "down_active", "active"
            if s in ("wait", "wait_x"):
                if (
                    self.window_deadline is not None
                    and ev.t_ms <= self.window_deadline
                    and math.hypot(ev.x - self.window_anchor[0], ev.y - self.window_anchor[1])
                    <= self.cfg.retap_radius_px
                ):
                    return "down_retap", "active"
                return "down_fresh", "active"
            return "down_ignored", "ignored"
        raise AssertionError(f"unclassifiable down in state {self.state}")

    def _symbol(self, ev: TouchEvent) -> str | None:
        if ev.action == "down":
            sym, role = self._down_symbol(ev)
            self.fingers[ev.finger] = _FingerRec(ev.t_ms, ev.x, ev.y, role=role)
            return sym
        rec = self.fingers.get(ev.finger)
        if rec is None:
            return None
        rec.max_disp = max(rec.max_disp, math.hypot(ev.x - rec.x0, ev.y - rec.y0))
        if ev.action == "move":
            if self.gaze:
                return "move"
            if rec.role == "active":
                kind = "small" if rec.max_disp <= self.cfg.tap_max_move_px else "big"
                return f"move_active_{kind}"
            return f"move_{rec.role}"
        # up
        del self.fingers[ev.finger]
        is_tap = (ev.t_ms - rec.t_down) <= self.cfg.tap_max_ms and rec.max_disp <= self.cfg.tap_max_move_px
        suffix = "tap" if is_tap else "drag"
        if self.gaze:
            return f"up_{suffix}"
        return f"up_{rec.role}_{suffix}"

    # -- replay ----------------------------------------------------------------

    def step(self, ev: TouchEvent) -> list:
        symbol = self._symbol(ev)
        if symbol is None:
            return []
        key = (self.state, symbol)
        assert key in self.table, f"{self.technique}: no transition for {key}"
        next_state, abstract_actions = self.table[key]
        # drag-n-tap window bookkeeping keys off table transitions
        if self.technique == "drag-n-tap":
            if next_state in ("wait", "wait_x") and symbol.startswith("up_active"):
                self.window_deadline = ev.t_ms + self.cfg.retap_window_ms
                self.window_anchor = (ev.x, ev.y)
            elif next_state in ("idle", "idle_x") and "commit" in abstract_actions:
                self.window_deadline = None
                self.window_anchor = None
        self.state = next_state

        out = []
        for act in abstract_actions:
            if act == "map_down":
                if self.mode is not MappingMode.RELATIVE:
                    out.append("cursor")
            elif act in ("map_move", "map_catchup"):
                out.append("cursor")
            elif act == "commit":
                if (
                    self.cfg.debounce_enabled
                    and self.last_commit is not None
                    and ev.t_ms - self.last_commit < self.cfg.debounce_ms
                ):
                    continue
                self.last_commit = ev.t_ms
                out.append(("commit", ev.t_ms))
            else:  # pragma: no cover
                raise AssertionError(f"unknown abstract action {act}")
        return out


def abstract_machine_actions(actions) -> list:
    """Project concrete machine actions onto the oracle's vocabulary."""
    out = []
    for a in actions:
        if isinstance(a, CursorMoved):
            out.append("cursor")
        elif isinstance(a, Commit):
            out.append(("commit", a.t_ms))
    return out


def legal_event_sequences(max_len: int, fingers=(0, 1)):
    """All per-finger-legal action sequences up to max_len over
    {down, move, up} x fingers (each finger obeys (down move* up)*)."""
    alphabet = [(act, f) for act in ("down", "move", "up") for f in fingers]

    def extend(seq, down_state):
        yield seq
        if len(seq) == max_len:
            return
        for act, f in alphabet:
            if act == "down" and down_state.get(f):
                continue
            if act in ("move", "up") and not down_state.get(f):
                continue
            new_state = dict(down_state)
            new_state[f] = act != "up"
            yield from extend(seq + [(act, f)], new_state)

    yield from (s for s in extend([], {}) if s)
