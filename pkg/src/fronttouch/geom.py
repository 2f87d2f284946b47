"""Minimal 3D math: vectors as tuples, 3x3 rotations, rigid transforms, AABBs.

Conventions used throughout the engine:
  - right-handed, y-up; the viewer looks down -z at yaw = pitch = 0
  - positive yaw turns right (+x), positive pitch looks up (+y)
  - angles in degrees, distances in meters
"""

from __future__ import annotations

import math
from dataclasses import dataclass

Vec3 = tuple[float, float, float]
Mat3 = tuple[tuple[float, float, float], ...]

IDENTITY3: Mat3 = ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0))


def vadd(a: Vec3, b: Vec3) -> Vec3:
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def vsub(a: Vec3, b: Vec3) -> Vec3:
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def vscale(a: Vec3, s: float) -> Vec3:
    return (a[0] * s, a[1] * s, a[2] * s)


def dot(a: Vec3, b: Vec3) -> float:
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def cross(a: Vec3, b: Vec3) -> Vec3:
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


def norm(a: Vec3) -> float:
    return math.sqrt(dot(a, a))


def normalize(a: Vec3) -> Vec3:
    n = norm(a)
    if n == 0.0:
        raise ValueError("cannot normalize zero vector")
    return (a[0] / n, a[1] / n, a[2] / n)


def mat_vec(m: Mat3, v: Vec3) -> Vec3:
    return (
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    )


def mat_mul(a: Mat3, b: Mat3) -> Mat3:
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(3)) for j in range(3))
        for i in range(3)
    )


def rot_yaw_pitch(yaw_deg: float, pitch_deg: float) -> Mat3:
    """Rotation taking the rest frame to a frame looking at (yaw, pitch).

    Applied to the forward axis (0, 0, -1) this yields
    (sin yaw * cos pitch, sin pitch, -cos yaw * cos pitch).
    """
    y = math.radians(yaw_deg)
    p = math.radians(pitch_deg)
    cy, sy = math.cos(y), math.sin(y)
    cp, sp = math.cos(p), math.sin(p)
    # R_y(-yaw) @ R_x(pitch)
    return (
        (cy, -sy * sp, -sy * cp),
        (0.0, cp, -sp),
        (sy, cy * sp, cy * cp),
    )


def direction_from_angles(yaw_deg: float, pitch_deg: float) -> Vec3:
    """Unit view direction for a yaw/pitch pair."""
    y = math.radians(yaw_deg)
    p = math.radians(pitch_deg)
    cp = math.cos(p)
    return (math.sin(y) * cp, math.sin(p), -math.cos(y) * cp)


def angles_from_direction(d: Vec3) -> tuple[float, float]:
    """Inverse of direction_from_angles; returns (yaw, pitch) in degrees."""
    pitch = math.degrees(math.asin(max(-1.0, min(1.0, d[1]))))
    yaw = math.degrees(math.atan2(d[0], -d[2]))
    return yaw, pitch


@dataclass(frozen=True)
class Transform:
    """Rigid transform: rotate then translate."""

    rotation: Mat3 = IDENTITY3
    translation: Vec3 = (0.0, 0.0, 0.0)

    def apply(self, p: Vec3) -> Vec3:
        return vadd(mat_vec(self.rotation, p), self.translation)

    def compose(self, other: "Transform") -> "Transform":
        """self o other: apply `other` first, then `self`."""
        return Transform(
            rotation=mat_mul(self.rotation, other.rotation),
            translation=vadd(mat_vec(self.rotation, other.translation), self.translation),
        )

    @staticmethod
    def identity() -> "Transform":
        return Transform()

    @staticmethod
    def from_yaw_pitch(yaw_deg: float, pitch_deg: float, translation: Vec3 = (0.0, 0.0, 0.0)) -> "Transform":
        return Transform(rotation=rot_yaw_pitch(yaw_deg, pitch_deg), translation=translation)


@dataclass(frozen=True)
class Aabb:
    """Axis-aligned box; the empty box has min > max on every axis."""

    min: Vec3
    max: Vec3

    @staticmethod
    def empty() -> "Aabb":
        inf = math.inf
        return Aabb((inf, inf, inf), (-inf, -inf, -inf))

    def is_empty(self) -> bool:
        return self.min[0] > self.max[0] or self.min[1] > self.max[1] or self.min[2] > self.max[2]

    def union(self, other: "Aabb") -> "Aabb":
        if self.is_empty():
            return other
        if other.is_empty():
            return self
        return Aabb(
            (
                min(self.min[0], other.min[0]),
                min(self.min[1], other.min[1]),
                min(self.min[2], other.min[2]),
            ),
            (
                max(self.max[0], other.max[0]),
                max(self.max[1], other.max[1]),
                max(self.max[2], other.max[2]),
            ),
        )

    def contains_box(self, other: "Aabb", slack: float = 1e-9) -> bool:
        if other.is_empty():
            return True
        if self.is_empty():
            return False
        return all(self.min[i] <= other.min[i] + slack for i in range(3)) and all(
            self.max[i] >= other.max[i] - slack for i in range(3)
        )

    def contains_point(self, p: Vec3, slack: float = 0.0) -> bool:
        if self.is_empty():
            return False
        return all(self.min[i] - slack <= p[i] <= self.max[i] + slack for i in range(3))

    def overlaps(self, other: "Aabb") -> bool:
        if self.is_empty() or other.is_empty():
            return False
        return all(self.min[i] <= other.max[i] and other.min[i] <= self.max[i] for i in range(3))

    @staticmethod
    def from_points(points) -> "Aabb":
        box = Aabb.empty()
        xs = [p[0] for p in points]
        ys = [p[1] for p in points]
        zs = [p[2] for p in points]
        if not xs:
            return box
        return Aabb((min(xs), min(ys), min(zs)), (max(xs), max(ys), max(zs)))
