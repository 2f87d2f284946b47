"""Synthetic participants: generate event streams that drive each technique
through each task, calibrated to the measured first-touch dispersion.

The simulator runs the real engine in lockstep (closed loop): it reads the
hover state back after every movement, corrects like a user watching the
cursor, and records exactly the events it sent. Replaying the recorded
trace therefore reproduces the same TrialRecords byte for byte.

Simulated results are NOT a reproduction of human study means; they exist
to exercise the harness and to satisfy the engine's behavioral properties.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats as _sps

from .config import (
    DEFAULTS,
    GAZE_TECHNIQUES,
    CalibrationNoiseConfig,
    NoiseConfig,
    SessionDefaults,
    UserConfig,
)
from .engine import SessionEngine
from .mapping import CalibrationSample, TouchPoint
from .tasks import TrialRecord, latin_square
from .techniques import HeadPose, TouchEvent, technique_pad
from .trace import TraceHeader

HEAD_TICK_MS = 25
DRAG_TICK_MS = 20


class NoiseModel:
    """Samples the synthetic user's motor noise from a NoiseConfig."""

    def __init__(self, cfg: NoiseConfig) -> None:
        self.cfg = cfg

    def touch_offset(self, rng) -> tuple[float, float]:
        s = self.cfg.touch_sigma_px
        if s == 0.0:
            return (0.0, 0.0)
        return (rng.normal(0.0, s), rng.normal(0.0, s * self.cfg.axis_ratio))

    def correction_offset(self, rng) -> tuple[float, float]:
        s = self.cfg.correction_noise_px
        return (rng.normal(0.0, s), rng.normal(0.0, s)) if s else (0.0, 0.0)

    def retap_offset(self, rng) -> tuple[float, float]:
        s = self.cfg.retap_noise_px
        return (rng.normal(0.0, s), rng.normal(0.0, s)) if s else (0.0, 0.0)

    def settle_offset(self, rng) -> tuple[float, float]:
        s = self.cfg.head_settle_noise_deg
        return (rng.normal(0.0, s), rng.normal(0.0, s)) if s else (0.0, 0.0)

    def timing_jitter(self, rng, sweep_ms: float) -> float:
        """Tap-timing error of a gaze selection; longer sweeps are harder to
        time, up to the configured cap."""
        cap = self.cfg.tap_timing_jitter_ms
        s = min(cap, 5.0 + 0.12 * sweep_ms)
        return rng.normal(0.0, s) if s > 0 else 0.0


@dataclass
class SimulationResult:
    header: TraceHeader
    events: list
    records: list[TrialRecord]
    abandoned: int = 0
    off_screen_cancels: int = 0


class _Session:
    """Drives one engine session and records the emitted events."""

    def __init__(self, engine: SessionEngine, user: UserConfig, noise: NoiseModel, rng) -> None:
        self.engine = engine
        self.user = user
        self.noise = noise
        self.rng = rng
        self.t = 0
        self.events: list = []
        self.head = (0.0, 0.0)
        self.pad = technique_pad(engine.header.technique)
        self.off_screen_cancels = 0
        self.finger_down_at: tuple[int, int] | None = None  # two-fingers drag finger

    # -- low-level emitters ------------------------------------------------------

    def _feed(self, event):
        self.events.append(event)
        out = self.engine.process(event)
        if out.off_screen:
            self.off_screen_cancels += 1
        return out

    def touch(self, action: str, finger: int, x: float, y: float, source: str | None = None):
        return self._feed(
            TouchEvent(
                t_ms=self.t,
                action=action,
                finger=finger,
                x=int(round(x)),
                y=int(round(y)),
                source=source or self.pad,
            )
        )

    def head_to(self, yaw: float, pitch: float):
        self.head = (round(float(yaw), 4), round(float(pitch), 4))
        return self._feed(HeadPose(t_ms=self.t, yaw_deg=self.head[0], pitch_deg=self.head[1]))

    def wait(self, ms: float) -> None:
        self.t += max(0, int(round(ms)))

    # -- shared motions -----------------------------------------------------------

    def target_angles(self, node_id: int) -> tuple[float, float]:
        return self.engine.scene.angular_center(node_id)

    def sweep_head(self, yaw: float, pitch: float) -> None:
        """Constant-velocity head sweep, one pose event per tick."""
        dy = yaw - self.head[0]
        dp = pitch - self.head[1]
        dist = math.hypot(dy, dp)
        if dist < 1e-9:
            return
        duration = dist / self.user.head_velocity_deg_s * 1000.0
        steps = max(1, int(duration / HEAD_TICK_MS))
        y0, p0 = self.head
        for k in range(1, steps + 1):
            self.wait(duration / steps)
            frac = k / steps
            self.head_to(y0 + dy * frac, p0 + dp * frac)

    def drag_finger(self, finger: int, start: tuple[int, int], end: tuple[float, float]):
        """Straight-line drag with move events at the drag velocity."""
        x0, y0 = start
        dist = math.hypot(end[0] - x0, end[1] - y0)
        if dist < 1.0:
            return start
        duration = dist / self.user.drag_velocity_px_s * 1000.0
        steps = max(1, int(duration / DRAG_TICK_MS))
        for k in range(1, steps + 1):
            self.wait(duration / steps)
            frac = k / steps
            self.touch("move", finger, x0 + (end[0] - x0) * frac, y0 + (end[1] - y0) * frac)
        return (int(round(end[0])), int(round(end[1])))

    # -- technique strategies -------------------------------------------------------

    def run(self) -> int:
        """Play the whole session; returns the number of abandoned trials."""
        technique = self.engine.header.technique
        abandoned = 0
        budget = self.user.trial_attempt_budget
        while not self.engine.is_done():
            goal = self.engine.goal_node_id()
            attempts = 0
            progressed = False
            while not progressed and attempts < budget:
                attempts += 1
                if technique in GAZE_TECHNIQUES:
                    progressed = self._attempt_gaze(goal)
                elif technique == "two-fingers":
                    progressed = self._attempt_two_fingers(goal)
                elif technique == "drag-n-tap":
                    progressed = self._attempt_drag_n_tap(goal)
                else:
                    progressed = self._attempt_blind_tap(goal)
            if not progressed:
                abandoned += 1
                break  # runaway trial: give up on the session
            self.wait(self.user.inter_trial_pause_ms)
        self._release_fingers()
        return abandoned

    def _goal_advanced(self, goal: int) -> bool:
        return self.engine.goal_node_id() != goal or self.engine.is_done()

    def _attempt_gaze(self, goal: int) -> bool:
        self.wait(self.user.planning_ms + self.user.reaction_ms)
        target = self.target_angles(goal)
        noise = self.noise.settle_offset(self.rng)
        aim = (target[0] + noise[0], target[1] + noise[1])
        y0, p0 = self.head
        dy = aim[0] - y0
        dp = aim[1] - p0
        dist = math.hypot(dy, dp)
        v = self.user.head_velocity_deg_s
        overshoot = min(self.noise.cfg.head_overshoot_cap_deg, self.noise.cfg.head_overshoot_frac * dist)
        t_cross = dist / v * 1000.0  # first time the sweep crosses the target
        out_ms = (dist + overshoot) / v * 1000.0
        back_ms = overshoot / (v / 2.0) * 1000.0  # settling back is slower

        def pose_at(ms: float) -> tuple[float, float]:
            if dist < 1e-9:
                return aim
            if ms <= out_ms:
                s = (ms / 1000.0) * v
            else:
                s = dist + overshoot - min(back_ms, ms - out_ms) / 1000.0 * (v / 2.0)
            frac = s / dist
            return (y0 + dy * frac, p0 + dp * frac)

        # the tap's lift commits; mistiming lands it short of or past the target
        care = self.user.keyboard_tap_care if self.engine.header.task == "keyboard" else 1.0
        jitter = self.noise.timing_jitter(self.rng, t_cross) * care
        tap_up_at = self.t + max(15.0, t_cross + jitter)
        tap_down_at = max(self.t + 5.0, tap_up_at - self.user.tap_down_up_ms)
        pad_x, pad_y = 600, 500

        schedule: list[tuple[int, int, tuple]] = []
        total_ms = out_ms + back_ms
        steps = max(1, int(total_ms / HEAD_TICK_MS)) if dist > 1e-9 else 0
        for k in range(1, steps + 1):
            ms = total_ms * k / steps
            yaw, pitch = pose_at(ms)
            schedule.append((int(round(self.t + ms)), 0, ("head", yaw, pitch)))
        schedule.append((int(round(tap_down_at)), 1, ("down",)))
        schedule.append((int(round(tap_up_at)), 1, ("up",)))
        schedule.sort(key=lambda item: (item[0], item[1]))
        for t, _, entry in schedule:
            self.t = max(self.t, t)
            if entry[0] == "head":
                self.head_to(entry[1], entry[2])
            else:
                self.touch(entry[0], 0, pad_x, pad_y)
        self.wait(self.user.feedback_check_ms)
        return self._goal_advanced(goal)

    def _aim_pixels(self, goal: int) -> tuple[float, float]:
        angles = self.target_angles(goal)
        return self.engine.model.pixels_of(angles[0], angles[1])

    def _attempt_blind_tap(self, goal: int) -> bool:
        self.wait(self.user.planning_ms + self.user.reaction_ms)
        aim = self._aim_pixels(goal)
        noise = self.noise.touch_offset(self.rng)
        x, y = aim[0] + noise[0], aim[1] + noise[1]
        self.touch("down", 0, x, y)
        self.wait(self.user.tap_down_up_ms)
        self.touch("up", 0, x, y)
        self.wait(self.user.feedback_check_ms)
        return self._goal_advanced(goal)

    def _cursor_on_goal(self, goal: int) -> bool:
        return self.engine.hover_node_id == goal

    def _attempt_two_fingers(self, goal: int) -> bool:
        self.wait(self.user.planning_ms)
        if self.finger_down_at is None:
            self.wait(self.user.reaction_ms)
            aim = self._aim_pixels(goal)
            noise = self.noise.touch_offset(self.rng)
            pos = (int(round(aim[0] + noise[0])), int(round(aim[1] + noise[1])))
            self.touch("down", 0, *pos)
            if not (0 <= pos[0] <= 2559 and 0 <= pos[1] <= 1439):
                # landed off the pad: the gesture was cancelled, start over
                self.wait(self.user.tap_down_up_ms)
                self.touch("up", 0, *pos)
                self.finger_down_at = None
                self.wait(self.user.reaction_ms)
                return self._goal_advanced(goal)
            self.finger_down_at = pos
            self.wait(self.user.feedback_check_ms)

        corrections = 0
        while not self._cursor_on_goal(goal) and corrections < self.user.corrective_iterations:
            corrections += 1
            aim = self._aim_pixels(goal)
            noise = self.noise.correction_offset(self.rng)
            self.finger_down_at = self.drag_finger(
                0, self.finger_down_at, (aim[0] + noise[0], aim[1] + noise[1])
            )
            self.wait(self.user.feedback_check_ms)
        if not self._cursor_on_goal(goal):
            return self._goal_advanced(goal)

        # second finger taps beside the dragger
        ax, ay = self.finger_down_at
        side = 1.0 if ax < 1900 else -1.0
        tap_noise = self.noise.retap_offset(self.rng)
        bx = ax + side * 240 + tap_noise[0]
        by = ay + 110 + tap_noise[1] if ay < 1100 else ay - 110 + tap_noise[1]
        self.touch("down", 1, bx, by)
        self.wait(self.user.tap_down_up_ms)
        self.touch("up", 1, bx, by)
        self.wait(self.user.feedback_check_ms)
        return self._goal_advanced(goal)

    def _attempt_drag_n_tap(self, goal: int) -> bool:
        self.wait(self.user.planning_ms + self.user.reaction_ms)
        # place the finger somewhere comfortable; relative mapping keeps the cursor
        start_noise = self.noise.touch_offset(self.rng)
        pos = (
            int(round(min(2300, max(260, 1280 + start_noise[0] * 0.5)))),
            int(round(min(1250, max(190, 720 + start_noise[1] * 0.5)))),
        )
        self.touch("down", 0, *pos)
        self.wait(self.user.feedback_check_ms)

        corrections = 0
        while not self._cursor_on_goal(goal) and corrections <= self.user.corrective_iterations:
            corrections += 1
            cursor = self.engine.cursor
            target = self.target_angles(goal)
            model = self.engine.model
            dx = (target[0] - cursor[0]) * model.ax
            dy = (target[1] - cursor[1]) * model.ay
            noise = self.noise.correction_offset(self.rng)
            end = (pos[0] + dx + noise[0], pos[1] + dy + noise[1])
            if not (30 <= end[0] <= 2529 and 30 <= end[1] <= 1409):
                # clutch: drag as far as the pad allows, lift at the edge,
                # re-anchor from the center (far outside the retap radius)
                clipped = (min(2529.0, max(30.0, end[0])), min(1409.0, max(30.0, end[1])))
                pos = self.drag_finger(0, pos, clipped)
                self.touch("up", 0, *pos)
                self.wait(self.user.reaction_ms)
                pos = (1280, 720)
                self.touch("down", 0, *pos)
                self.wait(self.user.feedback_check_ms)
                continue
            pos = self.drag_finger(0, pos, end)
            self.wait(self.user.feedback_check_ms)
        on_goal = self._cursor_on_goal(goal)
        self.touch("up", 0, *pos)  # lift opens the retap window
        if not on_goal:
            self.wait(self.user.reaction_ms)
            return self._goal_advanced(goal)
        retap_noise = self.noise.retap_offset(self.rng)
        self.wait(min(220, self.user.reaction_ms))
        rx, ry = pos[0] + retap_noise[0], pos[1] + retap_noise[1]
        self.touch("down", 0, rx, ry)
        self.wait(self.user.tap_down_up_ms)
        self.touch("up", 0, rx, ry)
        self.wait(self.user.feedback_check_ms)
        return self._goal_advanced(goal)

    def _release_fingers(self) -> None:
        if self.finger_down_at is not None:
            self.wait(30)
            self.touch("up", 0, *self.finger_down_at)
            self.finger_down_at = None


def participant_rng(seed: int, participant: int, technique: str, session: int):
    from .config import TECHNIQUES

    return np.random.default_rng([seed, participant, TECHNIQUES.index(technique), session])


def simulate_participant(
    header: TraceHeader,
    user: UserConfig | None = None,
    noise: NoiseConfig | None = None,
    defaults: SessionDefaults = DEFAULTS,
    phrases: list[str] | None = None,
) -> SimulationResult:
    """One participant, one technique, one session; returns the event trace
    and the TrialRecords the engine produced while generating it."""
    user = user or defaults.user
    noise_model = NoiseModel(noise or defaults.noise)
    rng = participant_rng(header.seed, header.participant, header.technique, header.session_index)
    engine = SessionEngine(header, defaults=defaults, phrases=phrases)
    session = _Session(engine, user, noise_model, rng)
    abandoned = session.run()
    records = engine.finalize()
    return SimulationResult(
        header=header,
        events=session.events,
        records=records,
        abandoned=abandoned,
        off_screen_cancels=session.off_screen_cancels,
    )


# --- full study protocols -----------------------------------------------------------

PRESTUDY2_TECHNIQUES = ("side-gaze", "front-gaze", "front-world", "front-view")
STUDY1_TECHNIQUES = ("side-gaze", "two-fingers", "drag-n-tap")
STUDY2_TECHNIQUES = ("side-gaze", "two-fingers")


def _study(
    techniques: tuple[str, ...],
    task: str,
    participants: int,
    sessions: int,
    seed: int,
    user: UserConfig | None,
    noise: NoiseConfig | None,
    defaults: SessionDefaults,
    on_session=None,
) -> list[SimulationResult]:
    """Latin-square ordered technique blocks for every participant."""
    square = latin_square(len(techniques))
    results = []
    for p in range(participants):
        order = square[p % len(square)]
        for tech_index in order:
            technique = techniques[tech_index]
            for s in range(sessions):
                header = TraceHeader(
                    task=task,
                    technique=technique,
                    seed=seed,
                    mapping_mode=None,
                    participant=p,
                    session_index=s,
                )
                result = simulate_participant(header, user, noise, defaults)
                results.append(result)
                if on_session is not None:
                    on_session(result)
    return results


def simulate_prestudy2(participants: int = 18, seed: int = 0, user=None, noise=None,
                       defaults: SessionDefaults = DEFAULTS, on_session=None) -> list[SimulationResult]:
    """Binary-plane selection, four methods, 20 trials each."""
    return _study(PRESTUDY2_TECHNIQUES, "binary", participants, 1, seed, user, noise, defaults, on_session)


def simulate_study1(participants: int = 20, seed: int = 0, user=None, noise=None,
                    defaults: SessionDefaults = DEFAULTS, on_session=None) -> list[SimulationResult]:
    """Menu selection: three techniques, three sessions of 14 trials."""
    return _study(STUDY1_TECHNIQUES, "menu15", participants, 3, seed, user, noise, defaults, on_session)


def simulate_study2(participants: int = 25, seed: int = 0, user=None, noise=None,
                    defaults: SessionDefaults = DEFAULTS, on_session=None) -> list[SimulationResult]:
    """Keyboard transcription with the side and two-finger techniques."""
    return _study(STUDY2_TECHNIQUES, "keyboard", participants, 1, seed, user, noise, defaults, on_session)


# --- calibration traces ----------------------------------------------------------------

def _participant_offsets(n: int, calib: CalibrationNoiseConfig) -> tuple[np.ndarray, np.ndarray]:
    """Fixed population of personal touch biases: stratified radii, evenly
    spread angles, then exact per-axis standardization so the pooled spread
    is the same for every seed."""
    if n == 1:
        return np.zeros(1), np.zeros(1)
    r = _sps.chi.ppf((np.arange(n) + 0.5) / n, df=2)
    theta = np.mod(np.arange(n) * 2.39996322972865332, 2.0 * np.pi)  # golden angle
    ox = r * np.cos(theta)
    oy = r * np.sin(theta)
    ox = (ox - ox.mean()) / ox.std() * calib.between_sigma_x_px
    oy = (oy - oy.mean()) / oy.std() * calib.between_sigma_y_px
    return ox, oy


def simulate_calibration(
    participants: int = 10,
    sessions: int = 6,
    seed: int = 0,
    defaults: SessionDefaults = DEFAULTS,
) -> list[CalibrationSample]:
    """Calibration protocol: every participant touches each grid target once
    per session through the planted map plus personal bias and motor noise."""
    sc = defaults.scene
    mc = defaults.mapping
    calib = defaults.calibration_noise
    grid_t1 = np.linspace(-sc.grid_half_yaw_deg, sc.grid_half_yaw_deg, sc.grid_cols)
    grid_t2 = np.linspace(-sc.grid_half_pitch_deg, sc.grid_half_pitch_deg, sc.grid_rows)
    ox, oy = _participant_offsets(participants, calib)
    samples: list[CalibrationSample] = []
    for p in range(participants):
        rng = np.random.default_rng([seed, p, 977])
        for s in range(sessions):
            order = [(t1, t2) for t1 in grid_t1 for t2 in grid_t2]
            rng.shuffle(order)
            for t1, t2 in order:
                for _ in range(1000):
                    x = mc.ax * t1 + mc.bx + ox[p] + rng.normal(0.0, calib.within_sigma_x_px)
                    y = mc.ay * t2 + mc.by + oy[p] + rng.normal(0.0, calib.within_sigma_y_px)
                    xi, yi = int(round(x)), int(round(y))
                    if 0 <= xi <= 2559 and 0 <= yi <= 1439:
                        break
                else:
                    raise RuntimeError("calibration target unreachable within the panel")
                samples.append(
                    CalibrationSample(
                        target_theta1=float(t1),
                        target_theta2=float(t2),
                        touch=TouchPoint(xi, yi),
                        participant_id=p,
                        session_index=s,
                    )
                )
    return samples


def zeroed_noise(defaults: SessionDefaults = DEFAULTS) -> NoiseConfig:
    return defaults.noise.zeroed()
