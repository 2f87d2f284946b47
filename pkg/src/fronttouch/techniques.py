"""State machines for the six selection techniques.

Finger-role rules, shared by the machines and the transition tables:

  - gaze techniques (side-gaze, front-gaze) assign no roles; every finger's
    own down..up pair is a potential commit tap and the cursor is pinned at
    (0, 0) relative to the view.
  - single-finger front techniques (front-world, front-view) track the first
    finger that lands while no finger is tracked; extra fingers are ignored.
  - two-fingers: the first finger down is the dragger, the next is the
    tapper. Roles never swap mid-gesture; if the dragger lifts early the
    gesture is broken until every finger has lifted.
  - drag-n-tap: one tracked finger drags; its lift opens a retap window.
    A down inside the window and radius arms a commit tap that leaves the
    cursor frozen; anything else starts a fresh drag.

A down..up pair counts as a tap iff its duration and maximum displacement
stay within the configured thresholds. Commits within the debounce window
of the previous commit are suppressed (the double-tap guard).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .config import GAZE_TECHNIQUES, TECHNIQUES, TechniqueConfig
from .mapping import OFF_SCREEN, MappingMode, MappingModel, in_panel, map_touch


@dataclass(frozen=True)
class TouchEvent:
    t_ms: int
    action: str  # down / move / up
    finger: int
    x: int
    y: int
    source: str = "front"  # front / side


@dataclass(frozen=True)
class HeadPose:
    t_ms: int
    yaw_deg: float
    pitch_deg: float


@dataclass(frozen=True)
class CursorMoved:
    theta1: float
    theta2: float


@dataclass(frozen=True)
class Commit:
    theta1: float
    theta2: float
    t_ms: int


@dataclass(frozen=True)
class OffScreenCancel:
    t_ms: int


Action = CursorMoved | Commit | OffScreenCancel


@dataclass
class _Finger:
    t_down: int
    x0: int
    y0: int
    x: int
    y: int
    max_disp: float = 0.0

    def move_to(self, x: int, y: int) -> None:
        self.x = x
        self.y = y
        self.max_disp = max(self.max_disp, math.hypot(x - self.x0, y - self.y0))


class TechniqueMachine:
    """Shared plumbing: finger tracking, tap classification, debounce."""

    name: str = ""
    pad: str = "front"
    uses_mapping: bool = False

    def __init__(self, model: MappingModel | None, cfg: TechniqueConfig | None = None) -> None:
        self.model = model
        self.cfg = cfg or TechniqueConfig()
        self.cursor: tuple[float, float] = (0.0, 0.0)
        self.fingers: dict[int, _Finger] = {}
        self.last_commit_ms: int | None = None
        if self.uses_mapping and model is None:
            raise ValueError(f"{self.name} requires a mapping model")

    # -- helpers ------------------------------------------------------------

    def _is_tap(self, f: _Finger, t_up: int) -> bool:
        return (t_up - f.t_down) <= self.cfg.tap_max_ms and f.max_disp <= self.cfg.tap_max_move_px

    def _commit(self, t_ms: int, cursor: tuple[float, float]) -> list[Action]:
        if (
            self.cfg.debounce_enabled
            and self.last_commit_ms is not None
            and t_ms - self.last_commit_ms < self.cfg.debounce_ms
        ):
            return []
        self.last_commit_ms = t_ms
        return [Commit(cursor[0], cursor[1], t_ms)]

    def _map(self, action: str, x: int, y: int) -> list[Action]:
        """Run the event through the mapping model; CursorMoved unless the
        mode leaves the cursor alone (a relative-mode down only re-anchors)."""
        result = map_touch(self.model, action, x, y)
        if result is OFF_SCREEN:
            raise AssertionError("bounds are checked before mapping")
        self.cursor = result
        if action == "down" and self.model.mode is MappingMode.RELATIVE:
            return []
        if action == "up":
            return []
        return [CursorMoved(result[0], result[1])]

    def step(self, event: TouchEvent | HeadPose) -> list[Action]:
        if isinstance(event, HeadPose):
            return []
        if event.source != self.pad:
            return []
        if not in_panel(event.x, event.y):
            return self._off_screen(event)
        return self._step_touch(event)

    # -- per-technique hooks --------------------------------------------------

    def _step_touch(self, event: TouchEvent) -> list[Action]:
        raise NotImplementedError

    def _off_screen(self, event: TouchEvent) -> list[Action]:
        self.fingers.pop(event.finger, None)
        if self.uses_mapping:
            self.model.reset_anchor()
        return [OffScreenCancel(event.t_ms)]


class GazeMachine(TechniqueMachine):
    """Head points, a tap on the designated pad commits; cursor stays (0, 0)."""

    uses_mapping = False

    def _step_touch(self, event: TouchEvent) -> list[Action]:
        if event.action == "down":
            self.fingers[event.finger] = _Finger(event.t_ms, event.x, event.y, event.x, event.y)
            return []
        f = self.fingers.get(event.finger)
        if f is None:
            return []
        if event.action == "move":
            f.move_to(event.x, event.y)
            return []
        # up
        del self.fingers[event.finger]
        f.move_to(event.x, event.y)
        if self._is_tap(f, event.t_ms):
            return self._commit(event.t_ms, (0.0, 0.0))
        return []


class SideGazeMachine(GazeMachine):
    name = "side-gaze"
    pad = "side"


class FrontGazeMachine(GazeMachine):
    name = "front-gaze"
    pad = "front"


class FrontTapMachine(TechniqueMachine):
    """Single finger drags the cursor; a quick, still lift commits there."""

    uses_mapping = True

    def __init__(self, model, cfg=None) -> None:
        super().__init__(model, cfg)
        self.primary: int | None = None

    def _step_touch(self, event: TouchEvent) -> list[Action]:
        if event.action == "down":
            self.fingers[event.finger] = _Finger(event.t_ms, event.x, event.y, event.x, event.y)
            if self.primary is None:
                self.primary = event.finger
                return self._map("down", event.x, event.y)
            return []
        f = self.fingers.get(event.finger)
        if f is None:
            return []
        if event.action == "move":
            f.move_to(event.x, event.y)
            if event.finger == self.primary:
                return self._map("move", event.x, event.y)
            return []
        # up
        del self.fingers[event.finger]
        f.move_to(event.x, event.y)
        if event.finger != self.primary:
            return []
        self.primary = None
        actions = self._map("up", event.x, event.y)
        if self._is_tap(f, event.t_ms):
            actions.extend(self._commit(event.t_ms, self.cursor))
        return actions

    def _off_screen(self, event: TouchEvent) -> list[Action]:
        if event.finger == self.primary:
            self.primary = None
        return super()._off_screen(event)


class FrontWorldMachine(FrontTapMachine):
    name = "front-world"


class FrontViewMachine(FrontTapMachine):
    name = "front-view"


class TwoFingersMachine(TechniqueMachine):
    """First finger drags; a tap of a second finger, while the first stays
    down, commits at the cursor position sampled at the tap finger's down."""

    name = "two-fingers"
    uses_mapping = True

    def __init__(self, model, cfg=None) -> None:
        super().__init__(model, cfg)
        self.dragger: int | None = None
        self.tapper: int | None = None
        self.tap_cursor: tuple[float, float] | None = None
        self.broken = False

    def _step_touch(self, event: TouchEvent) -> list[Action]:
        if event.action == "down":
            self.fingers[event.finger] = _Finger(event.t_ms, event.x, event.y, event.x, event.y)
            if self.broken:
                return []
            if self.dragger is None:
                self.dragger = event.finger
                return self._map("down", event.x, event.y)
            if self.tapper is None:
                self.tapper = event.finger
                self.tap_cursor = self.cursor
            return []
        f = self.fingers.get(event.finger)
        if f is None:
            return []
        if event.action == "move":
            f.move_to(event.x, event.y)
            if event.finger == self.dragger:
                return self._map("move", event.x, event.y)
            return []
        # up
        del self.fingers[event.finger]
        f.move_to(event.x, event.y)
        if event.finger == self.dragger:
            self.dragger = None
            self.tapper = None
            self.tap_cursor = None
            if self.fingers:
                self.broken = True  # gesture ends only when every finger lifts
            return self._map("up", event.x, event.y)
        if event.finger == self.tapper:
            self.tapper = None
            commit_at = self.tap_cursor
            self.tap_cursor = None
            if self._is_tap(f, event.t_ms):
                return self._commit(event.t_ms, commit_at)
            return []
        if self.broken and not self.fingers:
            self.broken = False
        return []

    def _off_screen(self, event: TouchEvent) -> list[Action]:
        if event.finger == self.dragger:
            self.dragger = None
            self.tapper = None
            self.tap_cursor = None
            if event.finger in self.fingers and len(self.fingers) > 1:
                self.broken = True
        elif event.finger == self.tapper:
            self.tapper = None
            self.tap_cursor = None
        actions = super()._off_screen(event)
        if self.broken and not self.fingers:
            self.broken = False
        return actions


class DragNTapMachine(TechniqueMachine):
    """Drag, lift, then retap near the release point to commit at the
    cursor's resting position; the committing tap never moves the cursor."""

    name = "drag-n-tap"
    uses_mapping = True

    def __init__(self, model, cfg=None) -> None:
        super().__init__(model, cfg)
        self.phase = "idle"  # idle / drag / wait / pending
        self.tracked: int | None = None
        self.window_deadline: int | None = None
        self.window_anchor: tuple[int, int] | None = None

    def _open_window(self, t_ms: int, x: int, y: int) -> None:
        self.phase = "wait"
        self.tracked = None
        self.window_deadline = t_ms + self.cfg.retap_window_ms
        self.window_anchor = (x, y)

    def _is_retap_down(self, event: TouchEvent) -> bool:
        if self.window_deadline is None or event.t_ms > self.window_deadline:
            return False
        ax, ay = self.window_anchor
        return math.hypot(event.x - ax, event.y - ay) <= self.cfg.retap_radius_px

    def _step_touch(self, event: TouchEvent) -> list[Action]:
        if event.action == "down":
            self.fingers[event.finger] = _Finger(event.t_ms, event.x, event.y, event.x, event.y)
            if self.phase == "idle":
                self.phase = "drag"
                self.tracked = event.finger
                return self._map("down", event.x, event.y)
            if self.phase == "wait":
                if self._is_retap_down(event):
                    self.phase = "pending"
                    self.tracked = event.finger
                    return []
                self.phase = "drag"
                self.tracked = event.finger
                return self._map("down", event.x, event.y)
            return []  # extra finger during drag/pending: ignored
        f = self.fingers.get(event.finger)
        if f is None:
            return []
        if event.action == "move":
            f.move_to(event.x, event.y)
            if event.finger != self.tracked:
                return []
            if self.phase == "drag":
                return self._map("move", event.x, event.y)
            if self.phase == "pending" and f.max_disp > self.cfg.tap_max_move_px:
                # the retap wandered: it is a drag now; catch the cursor up
                self.phase = "drag"
                map_touch(self.model, "down", f.x0, f.y0)
                result = map_touch(self.model, "move", event.x, event.y)
                self.cursor = result
                return [CursorMoved(result[0], result[1])]
            return []
        # up
        del self.fingers[event.finger]
        f.move_to(event.x, event.y)
        if event.finger != self.tracked:
            return []
        if self.phase == "drag":
            actions = self._map("up", event.x, event.y)
            self._open_window(event.t_ms, event.x, event.y)
            return actions
        if self.phase == "pending":
            if self._is_tap(f, event.t_ms):
                self.phase = "idle"
                self.tracked = None
                self.window_deadline = None
                self.window_anchor = None
                return self._commit(event.t_ms, self.cursor)
            self._open_window(event.t_ms, event.x, event.y)
            return []
        return []

    def _off_screen(self, event: TouchEvent) -> list[Action]:
        if event.finger == self.tracked:
            # a gesture that leaves the pad fails outright: no retap window
            self.phase = "idle"
            self.tracked = None
            self.window_deadline = None
            self.window_anchor = None
        return super()._off_screen(event)


_MACHINES = {
    "side-gaze": SideGazeMachine,
    "front-gaze": FrontGazeMachine,
    "front-world": FrontWorldMachine,
    "front-view": FrontViewMachine,
    "two-fingers": TwoFingersMachine,
    "drag-n-tap": DragNTapMachine,
}


def make_technique(name: str, model: MappingModel | None = None, cfg: TechniqueConfig | None = None) -> TechniqueMachine:
    if name not in _MACHINES:
        raise ValueError(f"unknown technique {name!r}; expected one of {', '.join(TECHNIQUES)}")
    return _MACHINES[name](model, cfg)


def technique_pad(name: str) -> str:
    return "side" if name == "side-gaze" else "front"


def is_gaze(name: str) -> bool:
    return name in GAZE_TECHNIQUES


# ---------------------------------------------------------------------------
# Declarative transition tables.
#
# Abstract symbols (the enumeration oracle derives them from concrete events
# using the documented finger-role rules):
#   down_active      a down that acquires the tracked / dragger role
#   down_other       a down taking the secondary role (tapper / ignored extra)
#   down_ignored     a down while roles are frozen (broken gesture, busy phase)
#   down_retap       drag-n-tap: down inside the retap window and radius
#   down_fresh       drag-n-tap: down in wait phase that starts a new drag
#   move_active_small / move_active_big   tracked finger move, cumulative
#                    displacement within / beyond the tap movement threshold
#   move_other, move_ignored               non-tracked finger moves
#   up_active_tap / up_active_drag         tracked finger lift, tap or not
#   up_other_tap / up_other_drag, up_ignored_tap / up_ignored_drag
#   down / move / up_tap / up_drag         gaze techniques (roleless)
#
# Abstract actions:
#   map_down, map_move   cursor update through the mapping mode
#   map_catchup          pending retap degraded to a drag (single cursor jump)
#   commit               selection commit (debounce applied downstream)
# ---------------------------------------------------------------------------

TransitionTable = dict[tuple[str, str], tuple[str, tuple[str, ...]]]

_GAZE_TABLE: TransitionTable = {
    ("idle", "down"): ("t1", ()),
    ("t1", "down"): ("t2", ()),
    ("t1", "move"): ("t1", ()),
    ("t1", "up_tap"): ("idle", ("commit",)),
    ("t1", "up_drag"): ("idle", ()),
    ("t2", "move"): ("t2", ()),
    ("t2", "up_tap"): ("t1", ("commit",)),
    ("t2", "up_drag"): ("t1", ()),
}

_FRONT_TAP_TABLE: TransitionTable = {
    ("idle", "down_active"): ("touch", ("map_down",)),
    ("touch", "move_active_small"): ("touch", ("map_move",)),
    ("touch", "move_active_big"): ("touch", ("map_move",)),
    ("touch", "up_active_tap"): ("idle", ("commit",)),
    ("touch", "up_active_drag"): ("idle", ()),
    ("touch", "down_other"): ("touch_x", ()),
    ("touch_x", "move_active_small"): ("touch_x", ("map_move",)),
    ("touch_x", "move_active_big"): ("touch_x", ("map_move",)),
    ("touch_x", "move_other"): ("touch_x", ()),
    ("touch_x", "up_other_tap"): ("touch", ()),
    ("touch_x", "up_other_drag"): ("touch", ()),
    ("touch_x", "up_active_tap"): ("dead", ("commit",)),
    ("touch_x", "up_active_drag"): ("dead", ()),
    ("dead", "down_active"): ("touch_x", ("map_down",)),
    ("dead", "move_other"): ("dead", ()),
    ("dead", "up_other_tap"): ("idle", ()),
    ("dead", "up_other_drag"): ("idle", ()),
}

_TWO_FINGERS_TABLE: TransitionTable = {
    ("idle", "down_active"): ("drag", ("map_down",)),
    ("drag", "move_active_small"): ("drag", ("map_move",)),
    ("drag", "move_active_big"): ("drag", ("map_move",)),
    ("drag", "up_active_tap"): ("idle", ()),
    ("drag", "up_active_drag"): ("idle", ()),
    ("drag", "down_other"): ("drag_tap", ()),
    ("drag_tap", "move_active_small"): ("drag_tap", ("map_move",)),
    ("drag_tap", "move_active_big"): ("drag_tap", ("map_move",)),
    ("drag_tap", "move_other"): ("drag_tap", ()),
    ("drag_tap", "up_other_tap"): ("drag", ("commit",)),
    ("drag_tap", "up_other_drag"): ("drag", ()),
    ("drag_tap", "up_active_tap"): ("broken", ()),
    ("drag_tap", "up_active_drag"): ("broken", ()),
    # broken-gesture states are named by which roles are still down:
    # broken = {tapper}, broken_i = {ignored}, broken2 = {tapper, ignored},
    # broken2i = {ignored, ignored}
    ("broken", "move_other"): ("broken", ()),
    ("broken", "up_other_tap"): ("idle", ()),
    ("broken", "up_other_drag"): ("idle", ()),
    ("broken", "down_ignored"): ("broken2", ()),
    ("broken2", "move_other"): ("broken2", ()),
    ("broken2", "move_ignored"): ("broken2", ()),
    ("broken2", "up_other_tap"): ("broken_i", ()),
    ("broken2", "up_other_drag"): ("broken_i", ()),
    ("broken2", "up_ignored_tap"): ("broken", ()),
    ("broken2", "up_ignored_drag"): ("broken", ()),
    ("broken_i", "move_ignored"): ("broken_i", ()),
    ("broken_i", "up_ignored_tap"): ("idle", ()),
    ("broken_i", "up_ignored_drag"): ("idle", ()),
    ("broken_i", "down_ignored"): ("broken2i", ()),
    ("broken2i", "move_ignored"): ("broken2i", ()),
    ("broken2i", "up_ignored_tap"): ("broken_i", ()),
    ("broken2i", "up_ignored_drag"): ("broken_i", ()),
}

_DRAG_N_TAP_TABLE: TransitionTable = {
    ("idle", "down_active"): ("drag", ("map_down",)),
    ("drag", "move_active_small"): ("drag", ("map_move",)),
    ("drag", "move_active_big"): ("drag", ("map_move",)),
    ("drag", "up_active_tap"): ("wait", ()),
    ("drag", "up_active_drag"): ("wait", ()),
    ("drag", "down_ignored"): ("drag_x", ()),
    ("drag_x", "move_active_small"): ("drag_x", ("map_move",)),
    ("drag_x", "move_active_big"): ("drag_x", ("map_move",)),
    ("drag_x", "move_ignored"): ("drag_x", ()),
    ("drag_x", "up_ignored_tap"): ("drag", ()),
    ("drag_x", "up_ignored_drag"): ("drag", ()),
    ("drag_x", "up_active_tap"): ("wait_x", ()),
    ("drag_x", "up_active_drag"): ("wait_x", ()),
    ("wait", "down_retap"): ("pending", ()),
    ("wait", "down_fresh"): ("drag", ("map_down",)),
    ("pending", "move_active_small"): ("pending", ()),
    ("pending", "move_active_big"): ("drag", ("map_catchup",)),
    ("pending", "up_active_tap"): ("idle", ("commit",)),
    ("pending", "up_active_drag"): ("wait", ()),
    ("pending", "down_ignored"): ("pending_x", ()),
    ("pending_x", "move_active_small"): ("pending_x", ()),
    ("pending_x", "move_active_big"): ("drag_x", ("map_catchup",)),
    ("pending_x", "move_ignored"): ("pending_x", ()),
    ("pending_x", "up_active_tap"): ("idle_x", ("commit",)),
    ("pending_x", "up_active_drag"): ("wait_x", ()),
    ("pending_x", "up_ignored_tap"): ("pending", ()),
    ("pending_x", "up_ignored_drag"): ("pending", ()),
    ("wait_x", "down_retap"): ("pending_x", ()),
    ("wait_x", "down_fresh"): ("drag_x", ("map_down",)),
    ("wait_x", "move_ignored"): ("wait_x", ()),
    ("wait_x", "up_ignored_tap"): ("wait", ()),
    ("wait_x", "up_ignored_drag"): ("wait", ()),
    ("idle_x", "move_ignored"): ("idle_x", ()),
    ("idle_x", "up_ignored_tap"): ("idle", ()),
    ("idle_x", "up_ignored_drag"): ("idle", ()),
    ("idle_x", "down_active"): ("drag_x", ("map_down",)),
}

_TABLES = {
    "side-gaze": _GAZE_TABLE,
    "front-gaze": _GAZE_TABLE,
    "front-world": _FRONT_TAP_TABLE,
    "front-view": _FRONT_TAP_TABLE,
    "two-fingers": _TWO_FINGERS_TABLE,
    "drag-n-tap": _DRAG_N_TAP_TABLE,
}


def legal_transitions(technique: str) -> TransitionTable:
    """Machine-readable (state, symbol) -> (state, actions) table."""
    if technique not in _TABLES:
        raise ValueError(f"unknown technique {technique!r}")
    return dict(_TABLES[technique])


def format_transition_table(technique: str) -> str:
    """Markdown rendering of a technique's transition table."""
    rows = [f"| state | event | next state | actions |", "|---|---|---|---|"]
    for (state, symbol), (nxt, actions) in sorted(legal_transitions(technique).items()):
        rows.append(f"| {state} | {symbol} | {nxt} | {', '.join(actions) or '-'} |")
    return "\n".join(rows)
