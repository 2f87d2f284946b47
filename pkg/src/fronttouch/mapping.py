"""Touchpad-to-angle mapping: calibration fit and the three cursor modes.

The fit regresses pixels on angles (the direction the calibration data is
collected in), so the absolute cursor mapping is the inverse affine map.
Relative mode integrates pixel deltas through the fitted slopes; hybrid mode
is relative plus a fractional pull toward the absolute position on every
touch-down, which is what tames the jumping-cursor problem without breaking
drags.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .config import PANEL_X_MAX, PANEL_Y_MAX


class DegenerateFit(ValueError):
    """Raised when an axis of the calibration data has no variance."""


class MappingMode(Enum):
    ABSOLUTE = "absolute"
    RELATIVE = "relative"
    HYBRID = "hybrid"


class _OffScreen:
    """Sentinel for touches outside the panel's active area."""

    def __repr__(self) -> str:  # pragma: no cover
        return "OFF_SCREEN"


OFF_SCREEN = _OffScreen()


def in_panel(x: int, y: int) -> bool:
    return 0 <= x <= PANEL_X_MAX and 0 <= y <= PANEL_Y_MAX


@dataclass(frozen=True)
class TouchPoint:
    """Validated panel coordinate; raw events may carry out-of-bounds values,
    which the pipeline treats as an off-screen condition rather than clamping."""

    x: int
    y: int

    def __post_init__(self) -> None:
        if not in_panel(self.x, self.y):
            raise ValueError(f"touch point ({self.x}, {self.y}) outside panel")


@dataclass(frozen=True)
class CalibrationSample:
    target_theta1: float
    target_theta2: float
    touch: TouchPoint
    participant_id: int = 0
    session_index: int = 0


@dataclass
class MappingModel:
    """Affine pixel<->angle map plus fit diagnostics and per-session cursor state."""

    ax: float
    bx: float
    ay: float
    by: float
    r_x: float = 1.0
    r_y: float = 1.0
    dispersion_px: float = 0.0
    mode: MappingMode = MappingMode.ABSOLUTE
    correction_fraction: float = 0.25
    # anchor: last touch point and the cursor angles it was mapped at
    anchor_point: tuple[float, float] | None = field(default=None, repr=False)
    anchor_cursor: tuple[float, float] = field(default=(0.0, 0.0), repr=False)

    def __post_init__(self) -> None:
        if self.ax == 0.0 or self.ay == 0.0:
            raise ValueError("mapping slopes must be nonzero")
        if not (0.0 < self.correction_fraction <= 1.0):
            raise ValueError("correction_fraction must be in (0, 1]")

    def angles_of(self, x: float, y: float) -> tuple[float, float]:
        """Absolute image of a panel point under the inverse fit."""
        return ((x - self.bx) / self.ax, (y - self.by) / self.ay)

    def pixels_of(self, theta1: float, theta2: float) -> tuple[float, float]:
        return (self.ax * theta1 + self.bx, self.ay * theta2 + self.by)

    def reset_anchor(self) -> None:
        self.anchor_point = None

    def to_json_dict(self) -> dict:
        return {
            "ax": self.ax,
            "bx": self.bx,
            "ay": self.ay,
            "by": self.by,
            "r_x": self.r_x,
            "r_y": self.r_y,
            "dispersion_px": self.dispersion_px,
        }

    @staticmethod
    def from_json_dict(d: dict, mode: MappingMode = MappingMode.ABSOLUTE, correction_fraction: float = 0.25) -> "MappingModel":
        return MappingModel(
            ax=float(d["ax"]),
            bx=float(d["bx"]),
            ay=float(d["ay"]),
            by=float(d["by"]),
            r_x=float(d.get("r_x", 1.0)),
            r_y=float(d.get("r_y", 1.0)),
            dispersion_px=float(d.get("dispersion_px", 0.0)),
            mode=mode,
            correction_fraction=correction_fraction,
        )


def fit_linear_map(samples: list[CalibrationSample]) -> MappingModel:
    """Least-squares fit of pixel = a * angle + b per axis.

    Also reports Pearson correlations and the touch dispersion: the mean,
    over calibration targets, of the mean radial distance between that
    target's samples and their centroid.
    """
    if len(samples) < 2:
        raise DegenerateFit("need at least two samples")
    t1 = np.array([s.target_theta1 for s in samples], dtype=float)
    t2 = np.array([s.target_theta2 for s in samples], dtype=float)
    xs = np.array([s.touch.x for s in samples], dtype=float)
    ys = np.array([s.touch.y for s in samples], dtype=float)
    if np.unique(t1).size < 2:
        raise DegenerateFit("horizontal angle has no variance")
    if np.unique(t2).size < 2:
        raise DegenerateFit("elevation angle has no variance")

    ax, bx = np.polyfit(t1, xs, 1)
    ay, by = np.polyfit(t2, ys, 1)
    r_x = float(np.corrcoef(t1, xs)[0, 1])
    r_y = float(np.corrcoef(t2, ys)[0, 1])

    per_target: dict[tuple[float, float], list[int]] = {}
    for i, s in enumerate(samples):
        per_target.setdefault((s.target_theta1, s.target_theta2), []).append(i)
    target_means = []
    for idx in per_target.values():
        px = xs[idx]
        py = ys[idx]
        radial = np.hypot(px - px.mean(), py - py.mean())
        target_means.append(float(radial.mean()))
    dispersion = float(np.mean(target_means))

    return MappingModel(ax=float(ax), bx=float(bx), ay=float(ay), by=float(by),
                        r_x=r_x, r_y=r_y, dispersion_px=dispersion)


def map_touch(model: MappingModel, action: str, x: int, y: int):
    """New cursor angles for a touch event, or OFF_SCREEN.

    action is "down", "move", or "up". Down semantics depend on the mode:
    absolute jumps to the mapped point, relative only re-anchors, hybrid
    re-anchors and pulls the cursor a fixed fraction toward the absolute
    point. Off-panel coordinates never move the cursor.
    """
    if not in_panel(x, y):
        model.reset_anchor()
        return OFF_SCREEN

    # hybrid with full correction degenerates to absolute, bit for bit
    absolute = model.mode is MappingMode.ABSOLUTE or (
        model.mode is MappingMode.HYBRID and model.correction_fraction == 1.0
    )
    cursor = model.anchor_cursor
    if action == "down":
        if absolute:
            cursor = model.angles_of(x, y)
        elif model.mode is MappingMode.HYBRID:
            target = model.angles_of(x, y)
            f = model.correction_fraction
            cursor = (
                cursor[0] + f * (target[0] - cursor[0]),
                cursor[1] + f * (target[1] - cursor[1]),
            )
        model.anchor_point = (float(x), float(y))
        model.anchor_cursor = cursor
        return cursor
    if action == "move":
        if absolute:
            cursor = model.angles_of(x, y)
        else:
            if model.anchor_point is None:
                # move without a preceding down: anchor here, no jump
                model.anchor_point = (float(x), float(y))
                return cursor
            dx = x - model.anchor_point[0]
            dy = y - model.anchor_point[1]
            cursor = (cursor[0] + dx / model.ax, cursor[1] + dy / model.ay)
        model.anchor_point = (float(x), float(y))
        model.anchor_cursor = cursor
        return cursor
    if action == "up":
        model.reset_anchor()
        return cursor
    raise ValueError(f"unknown touch action {action!r}")


def jump_distance(model: MappingModel, before: tuple[float, float], x: int, y: int) -> float:
    """Angular distance the cursor would travel on a touch-down at (x, y)."""
    if model.mode is MappingMode.RELATIVE:
        raise ValueError("jump distance is defined for absolute and hybrid modes")
    target = model.angles_of(x, y)
    dist = math.hypot(target[0] - before[0], target[1] - before[1])
    if model.mode is MappingMode.HYBRID:
        return model.correction_fraction * dist
    return dist


def read_calibration_jsonl(path) -> list[CalibrationSample]:
    """Calibration trace: one JSON record per line (see protocol.md)."""
    samples = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                d = json.loads(line)
                samples.append(
                    CalibrationSample(
                        target_theta1=float(d["target_theta1"]),
                        target_theta2=float(d["target_theta2"]),
                        touch=TouchPoint(int(d["x"]), int(d["y"])),
                        participant_id=int(d.get("participant", 0)),
                        session_index=int(d.get("session", 0)),
                    )
                )
            except (KeyError, ValueError, TypeError) as exc:
                raise ValueError(f"bad calibration record at line {lineno}: {exc}") from exc
    return samples


def write_calibration_jsonl(path, samples: list[CalibrationSample]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for s in samples:
            fh.write(
                json.dumps(
                    {
                        "target_theta1": s.target_theta1,
                        "target_theta2": s.target_theta2,
                        "x": s.touch.x,
                        "y": s.touch.y,
                        "participant": s.participant_id,
                        "session": s.session_index,
                    },
                    separators=(",", ":"),
                )
                + "\n"
            )
