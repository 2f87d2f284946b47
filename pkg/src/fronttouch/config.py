"""Default parameters for scenes, techniques, mapping, and simulated users.

Every value a study could reasonably tune lives here so traces, tests, and
the session server share one source of truth.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from importlib import resources

PANEL_WIDTH = 2560
PANEL_HEIGHT = 1440
PANEL_X_MAX = PANEL_WIDTH - 1
PANEL_Y_MAX = PANEL_HEIGHT - 1

TECHNIQUES = (
    "side-gaze",
    "front-gaze",
    "front-world",
    "front-view",
    "two-fingers",
    "drag-n-tap",
)
GAZE_TECHNIQUES = ("side-gaze", "front-gaze")

MAPPING_MODES = ("absolute", "relative", "hybrid")

# Per-technique default touch-to-angle mapping mode. Gaze techniques take none.
DEFAULT_TECHNIQUE_MODE = {
    "front-world": "absolute",
    "front-view": "absolute",
    "two-fingers": "absolute",
    "drag-n-tap": "relative",
}

TASKS = ("binary", "menu15", "keyboard")


@dataclass(frozen=True)
class SceneConfig:
    """Geometry of the three experiment UIs (angular sizes in degrees)."""

    sphere_radius_m: float = 2.0
    # 5x3 menu: 12 x 10 degree buttons with 1 degree gaps
    menu_rows: int = 3
    menu_cols: int = 5
    menu_button_yaw_deg: float = 12.0
    menu_button_pitch_deg: float = 10.0
    menu_gap_deg: float = 1.0
    # binary task: two half-planes split at yaw 0
    binary_half_yaw_deg: float = 30.0
    binary_pitch_deg: float = 30.0
    binary_gap_deg: float = 0.5
    # keyboard: 10-key top row, 4.5 x 5 degree keys
    key_yaw_deg: float = 4.5
    key_pitch_deg: float = 5.0
    key_gap_deg: float = 0.3
    keyboard_center_pitch_deg: float = -8.0
    # calibration target grid (extent unpublished; kept configurable)
    grid_cols: int = 13
    grid_rows: int = 9
    grid_half_yaw_deg: float = 22.0
    grid_half_pitch_deg: float = 10.0


@dataclass(frozen=True)
class TechniqueConfig:
    """Tap discrimination and gesture thresholds shared by the state machines."""

    tap_max_ms: int = 200
    tap_max_move_px: int = 20
    retap_window_ms: int = 400
    retap_radius_px: int = 60
    debounce_ms: int = 150
    debounce_enabled: bool = True


@dataclass(frozen=True)
class MappingConfig:
    ax: float = 40.0
    bx: float = 1280.0
    ay: float = -35.0
    by: float = 720.0
    correction_fraction: float = 0.25
    # only "linear" is implemented; a velocity-gain profile is future work
    gain_profile: str = "linear"


@dataclass(frozen=True)
class NoiseConfig:
    """Scales of the synthetic user's motor noise.

    touch dispersion target is the mean radial first-touch error in pixels;
    the generator converts it to a Rayleigh scale sigma = target / sqrt(pi/2).
    """

    touch_dispersion_px: float = 184.0
    axis_ratio: float = 1.0  # sigma_y / sigma_x; 1.0 = isotropic
    tap_timing_jitter_ms: float = 40.0
    head_settle_noise_deg: float = 0.8
    head_overshoot_frac: float = 0.1  # momentum carries the sweep past the target
    head_overshoot_cap_deg: float = 2.0
    correction_noise_px: float = 10.0
    retap_noise_px: float = 12.0

    @property
    def touch_sigma_px(self) -> float:
        return self.touch_dispersion_px / math.sqrt(math.pi / 2.0)

    def zeroed(self) -> "NoiseConfig":
        return replace(
            self,
            touch_dispersion_px=0.0,
            tap_timing_jitter_ms=0.0,
            head_settle_noise_deg=0.0,
            head_overshoot_frac=0.0,
            correction_noise_px=0.0,
            retap_noise_px=0.0,
        )


@dataclass(frozen=True)
class CalibrationNoiseConfig:
    """Noise split for calibration traces.

    Within-participant touch noise is small and anisotropic (the pad's short
    axis is easier to judge); most of the pooled per-target spread comes from
    personal constant offsets that differ across participants. The offsets
    form a fixed stratified population with exact per-axis spread, so the
    pooled dispersion statistic is stable across seeds while per-participant
    fits stay sharp.
    """

    within_sigma_x_px: float = 25.0
    within_sigma_y_px: float = 12.0
    between_sigma_x_px: float = 151.0
    between_sigma_y_px: float = 134.0


@dataclass(frozen=True)
class UserConfig:
    """Behavioral parameters of the synthetic participant."""

    reaction_ms: int = 180
    planning_ms: int = 250
    head_velocity_deg_s: float = 60.0
    drag_velocity_px_s: float = 2200.0
    corrective_iterations: int = 3
    feedback_check_ms: int = 120
    tap_down_up_ms: int = 80
    keyboard_tap_care: float = 0.45  # typing is paced; tap timing tightens
    inter_trial_pause_ms: int = 150
    trial_attempt_budget: int = 60


@dataclass(frozen=True)
class SessionDefaults:
    scene: SceneConfig = field(default_factory=SceneConfig)
    technique: TechniqueConfig = field(default_factory=TechniqueConfig)
    mapping: MappingConfig = field(default_factory=MappingConfig)
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    calibration_noise: CalibrationNoiseConfig = field(default_factory=CalibrationNoiseConfig)
    user: UserConfig = field(default_factory=UserConfig)


DEFAULTS = SessionDefaults()

# Practice phrases are fixed across participants and excluded from test draws.
PRACTICE_PHRASES = (
    "the quick brown fox jumps",
    "practice makes perfect now",
)


def default_mapping_coefficients() -> dict:
    """Fitted coefficients shipped with the package (from the synthetic
    calibration protocol; see the calibrate CLI to refit from any trace)."""
    text = resources.files("fronttouch.data").joinpath("default_mapping.json").read_text()
    return json.loads(text)
