"""One interactive session: scene + mapping + technique + task, event in,
cursor / UI events / trial records out.

The engine owns all interaction semantics; the session server forwards its
outputs verbatim, and offline replay feeds it the same events, which is what
makes online and offline runs equivalent by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .config import (
    DEFAULT_TECHNIQUE_MODE,
    DEFAULTS,
    GAZE_TECHNIQUES,
    PRACTICE_PHRASES,
    SessionDefaults,
    TASKS,
    TECHNIQUES,
    default_mapping_coefficients,
)


@lru_cache(maxsize=1)
def _default_coefficients() -> dict:
    return default_mapping_coefficients()
from .mapping import MappingMode, MappingModel
from .picking import PickResult, UiEvent, emit_ui_event, make_ray, pick
from .scene import Attachment, Camera, build_binary_scene, build_keyboard_scene, build_menu_scene
from .tasks import (
    BinaryTaskRunner,
    KeyboardTaskRunner,
    MenuTaskRunner,
    TrialRecord,
    load_phrase_set,
    sample_phrases,
)
from .techniques import Commit, CursorMoved, HeadPose, OffScreenCancel, TouchEvent, make_technique
from .trace import MonotonicityError, TraceHeader


@dataclass
class EngineOutput:
    """What one event caused."""

    cursor: tuple[float, float] | None = None
    ui_events: list[UiEvent] = field(default_factory=list)
    key_clicks: list[int] = field(default_factory=list)
    completed: list[TrialRecord] = field(default_factory=list)
    off_screen: bool = False
    scene_changed: bool = False
    done: bool = False


def resolve_mapping_mode(technique: str, mapping_mode: str | None) -> MappingMode | None:
    if technique in GAZE_TECHNIQUES:
        if mapping_mode is not None:
            raise ValueError(f"{technique} is gaze-directed and takes no mapping mode")
        return None
    mode = mapping_mode or DEFAULT_TECHNIQUE_MODE[technique]
    return MappingMode(mode)


class SessionEngine:
    def __init__(
        self,
        header: TraceHeader,
        defaults: SessionDefaults = DEFAULTS,
        phrases: list[str] | None = None,
        mapping_model: MappingModel | None = None,
    ) -> None:
        if header.task not in TASKS:
            raise ValueError(f"unknown task {header.task!r}")
        if header.technique not in TECHNIQUES:
            raise ValueError(f"unknown technique {header.technique!r}")
        self.header = header
        self.defaults = defaults
        mode = resolve_mapping_mode(header.technique, header.mapping_mode)

        self.scene = self._build_scene(header.task, header.technique, defaults)
        self.camera = Camera()
        self.scene.update_world_transforms(self.camera)

        model = None
        if mode is not None:
            if mapping_model is not None:
                model = mapping_model
                model.mode = mode
            else:
                model = MappingModel.from_json_dict(
                    _default_coefficients(),
                    mode=mode,
                    correction_fraction=defaults.mapping.correction_fraction,
                )
        self.model = model
        self.machine = make_technique(header.technique, model, defaults.technique)

        session_id = f"p{header.participant:02d}-{header.technique}-s{header.session_index}"
        task_seed = header.seed * 1000003 + header.participant * 1009 + header.session_index
        if header.task == "menu15":
            self.runner = MenuTaskRunner(
                self.scene, session_id, header.participant, header.technique, seed=task_seed
            )
        elif header.task == "binary":
            self.runner = BinaryTaskRunner(
                self.scene, session_id, header.participant, header.technique, seed=task_seed
            )
        else:
            if phrases is None:
                phrases = sample_phrases(
                    load_phrase_set(), count=5, seed=header.seed, exclude=PRACTICE_PHRASES
                )
            self.runner = KeyboardTaskRunner(
                self.scene, session_id, header.participant, header.technique, phrases
            )

        # prime the hover state: the cursor is visible at view center from t=0
        self.prev_pick: PickResult | None = pick(self.scene, make_ray(self.camera, self.machine.cursor))
        self._last_t: dict[str, int] = {}

    @staticmethod
    def _build_scene(task: str, technique: str, defaults: SessionDefaults):
        sc = defaults.scene
        attachment = Attachment.VIEW_FIXED if technique == "front-view" else Attachment.WORLD_FIXED
        if task == "binary":
            return build_binary_scene(
                attachment=attachment,
                half_yaw_deg=sc.binary_half_yaw_deg,
                pitch_deg=sc.binary_pitch_deg,
                gap_deg=sc.binary_gap_deg,
                radius_m=sc.sphere_radius_m,
            )
        if task == "menu15":
            return build_menu_scene(
                rows=sc.menu_rows,
                cols=sc.menu_cols,
                button_yaw_deg=sc.menu_button_yaw_deg,
                button_pitch_deg=sc.menu_button_pitch_deg,
                gap_deg=sc.menu_gap_deg,
                radius_m=sc.sphere_radius_m,
                attachment=attachment,
            )
        return build_keyboard_scene(
            key_yaw_deg=sc.key_yaw_deg,
            key_pitch_deg=sc.key_pitch_deg,
            gap_deg=sc.key_gap_deg,
            center_pitch_deg=sc.keyboard_center_pitch_deg,
            radius_m=sc.sphere_radius_m,
            attachment=attachment,
        )

    # -- state queries (used by the simulator and the server) --------------------

    @property
    def cursor(self) -> tuple[float, float]:
        return self.machine.cursor

    @property
    def hover_node_id(self) -> int | None:
        return self.prev_pick.node_id if self.prev_pick is not None else None

    def goal_node_id(self) -> int | None:
        return self.runner.goal_node_id()

    def is_done(self) -> bool:
        return self.runner.is_done()

    @property
    def records(self) -> list[TrialRecord]:
        return self.runner.records

    def snapshot(self) -> list[dict]:
        return self.scene.snapshot()

    # -- event pump -----------------------------------------------------------------

    def _check_monotone(self, event: TouchEvent | HeadPose) -> None:
        key = event.source if isinstance(event, TouchEvent) else "head"
        last = self._last_t.get(key)
        if last is not None and event.t_ms < last:
            raise MonotonicityError(f"t_ms {event.t_ms} after {last} on source {key!r}")
        self._last_t[key] = event.t_ms

    def process(self, event: TouchEvent | HeadPose) -> EngineOutput:
        self._check_monotone(event)
        out = EngineOutput()
        if isinstance(event, HeadPose):
            self.camera = Camera(head_yaw=event.yaw_deg, head_pitch=event.pitch_deg)
            if self.scene.has_view_fixed:
                self.scene.update_world_transforms(self.camera)
            self._repick(out, event.t_ms, commit_at=None)
            return out

        for action in self.machine.step(event):
            if isinstance(action, CursorMoved):
                out.cursor = (action.theta1, action.theta2)
                self._repick(out, event.t_ms, commit_at=None)
            elif isinstance(action, Commit):
                self._repick(out, event.t_ms, commit_at=(action.theta1, action.theta2))
            elif isinstance(action, OffScreenCancel):
                out.off_screen = True
        return out

    def _repick(self, out: EngineOutput, t_ms: int, commit_at: tuple[float, float] | None) -> None:
        cursor = commit_at if commit_at is not None else self.machine.cursor
        new_pick = pick(self.scene, make_ray(self.camera, cursor))
        events = emit_ui_event(self.scene, self.prev_pick, new_pick, commit=commit_at is not None)
        self.prev_pick = new_pick
        for ui in events:
            out.ui_events.append(ui)
            if ui.kind == "select":
                update = self.runner.on_select(ui.node_id, t_ms)
            elif ui.kind == "select_miss":
                update = self.runner.on_miss(t_ms)
            else:
                continue
            out.completed.extend(update.completed)
            out.scene_changed = out.scene_changed or update.scene_changed
            if update.key_click:
                out.key_clicks.append(t_ms)
            out.done = out.done or update.done

    def finalize(self) -> list[TrialRecord]:
        self.runner.finalize()
        return self.runner.records


def replay_events(header: TraceHeader, events, defaults: SessionDefaults = DEFAULTS,
                  phrases: list[str] | None = None) -> tuple[list[TrialRecord], SessionEngine]:
    """Deterministic offline replay of one session's events."""
    engine = SessionEngine(header, defaults=defaults, phrases=phrases)
    for event in events:
        engine.process(event)
        if engine.is_done():
            break
    return engine.finalize(), engine
