"""Ray picking over the scene tree.

The traversal uses the scene hierarchy itself as the bounding-volume
hierarchy: a subtree is skipped as soon as the ray's parameter interval,
clipped by the node's box, becomes empty. Surviving nodes get exact
ray/triangle tests and the nearest hit wins (ties go to the lower node id
so results are reproducible).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .geom import Aabb, Vec3, cross, direction_from_angles, dot, vsub
from .scene import Camera, Scene

DEFAULT_T_MAX = 100.0
TIE_EPS = 1e-9
_DEGENERATE_EPS = 1e-12

SELECTABLE_KINDS = frozenset({"button", "plane", "key"})


@dataclass(frozen=True)
class Ray:
    origin: Vec3
    direction: Vec3  # unit length
    t_min: float = 0.0
    t_max: float = DEFAULT_T_MAX

    def at(self, t: float) -> Vec3:
        return (
            self.origin[0] + t * self.direction[0],
            self.origin[1] + t * self.direction[1],
            self.origin[2] + t * self.direction[2],
        )


@dataclass(frozen=True)
class PickResult:
    node_id: int
    t: float
    hit_point: Vec3


@dataclass
class PickStats:
    """Filled in when a caller passes it to pick(); used by tests."""

    visited: int = 0
    skipped_subtrees: list[int] = field(default_factory=list)


def make_ray(camera: Camera, cursor: tuple[float, float], t_max: float = DEFAULT_T_MAX) -> Ray:
    """Ray from the viewpoint through the cursor.

    The cursor angles are view-relative; gaze techniques keep them at (0, 0)
    so the ray follows the head alone.
    """
    theta1, theta2 = cursor
    if not (math.isfinite(theta1) and math.isfinite(theta2)):
        raise ValueError("cursor angles must be finite")
    direction = direction_from_angles(camera.head_yaw + theta1, camera.head_pitch + theta2)
    return Ray(origin=camera.position, direction=direction, t_min=0.0, t_max=t_max)


def ray_aabb_clip(ray: Ray, box: Aabb) -> tuple[float, float] | None:
    """Slab clip of the ray's [t_min, t_max] interval against a box.

    Returns the surviving (t0, t1) subinterval, boundary touches included,
    or None when the ray misses the box.
    """
    if box.is_empty():
        return None
    t0 = ray.t_min
    t1 = ray.t_max
    for axis in range(3):
        o = ray.origin[axis]
        d = ray.direction[axis]
        lo = box.min[axis]
        hi = box.max[axis]
        if d == 0.0:
            if o < lo or o > hi:
                return None
            continue
        inv = 1.0 / d
        ta = (lo - o) * inv
        tb = (hi - o) * inv
        if ta > tb:
            ta, tb = tb, ta
        if ta > t0:
            t0 = ta
        if tb < t1:
            t1 = tb
        if t0 > t1:
            return None
    return (t0, t1)


def ray_triangle(ray: Ray, v0: Vec3, v1: Vec3, v2: Vec3) -> float | None:
    """Smallest t in [t_min, t_max] where the ray meets the triangle
    (interior or edge); None on miss or for degenerate triangles."""
    e1 = vsub(v1, v0)
    e2 = vsub(v2, v0)
    pvec = cross(ray.direction, e2)
    det = dot(e1, pvec)
    if abs(det) < _DEGENERATE_EPS:
        return None
    inv_det = 1.0 / det
    tvec = vsub(ray.origin, v0)
    u = dot(tvec, pvec) * inv_det
    if u < -_DEGENERATE_EPS or u > 1.0 + _DEGENERATE_EPS:
        return None
    qvec = cross(tvec, e1)
    v = dot(ray.direction, qvec) * inv_det
    if v < -_DEGENERATE_EPS or u + v > 1.0 + _DEGENERATE_EPS:
        return None
    t = dot(e2, qvec) * inv_det
    if t < ray.t_min or t > ray.t_max:
        return None
    return t


def pick(scene: Scene, ray: Ray, stats: PickStats | None = None) -> PickResult | None:
    """Nearest mesh-bearing node hit by the ray, or None."""
    best_t = math.inf
    best_id: int | None = None

    def visit(node_id: int) -> None:
        nonlocal best_t, best_id
        node = scene.nodes[node_id]
        if stats is not None:
            stats.visited += 1
        clipped = ray_aabb_clip(ray, node.bounds)
        if clipped is None:
            if stats is not None:
                stats.skipped_subtrees.append(node_id)
            return
        if node.world_mesh is not None:
            for a, b, c in node.world_mesh:
                t = ray_triangle(ray, a, b, c)
                if t is None:
                    continue
                if t < best_t - TIE_EPS or (abs(t - best_t) <= TIE_EPS and node_id < best_id):
                    best_t = t
                    best_id = node_id
        for child in node.children:
            visit(child)

    visit(scene.root_id)
    if best_id is None:
        return None
    return PickResult(node_id=best_id, t=best_t, hit_point=ray.at(best_t))


@dataclass(frozen=True)
class UiEvent:
    kind: str  # hover_enter / hover_exit / select / select_miss
    node_id: int | None = None


def emit_ui_event(
    scene: Scene,
    prev_pick: PickResult | None,
    new_pick: PickResult | None,
    commit: bool,
) -> list[UiEvent]:
    """Hover transitions plus Select / SelectMiss on commit.

    Select fires only for selectable roles (button, plane, key); a commit over
    nothing selectable is a SelectMiss, which task scoring counts as an error.
    """
    events: list[UiEvent] = []
    prev_id = prev_pick.node_id if prev_pick is not None else None
    new_id = new_pick.node_id if new_pick is not None else None
    if prev_id != new_id:
        if prev_id is not None:
            events.append(UiEvent("hover_exit", prev_id))
        if new_id is not None:
            events.append(UiEvent("hover_enter", new_id))
    if commit:
        role = scene.nodes[new_id].role if new_id is not None else None
        if role is not None and role.kind in SELECTABLE_KINDS:
            events.append(UiEvent("select", new_id))
        else:
            events.append(UiEvent("select_miss", None))
    return events
