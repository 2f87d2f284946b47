"""Scene graph, procedural UI construction, and world-transform refresh.

Nodes form a tree. Leaf UI elements are flat quads (two triangles) facing
the viewer position, placed on a sphere around the origin. Group nodes carry
no mesh; their bounds are the union of their subtree, which is what the
picking traversal culls against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .geom import Aabb, Transform, Vec3, angles_from_direction, normalize


class Attachment(Enum):
    WORLD_FIXED = "world-fixed"
    VIEW_FIXED = "view-fixed"


@dataclass(frozen=True)
class UiRole:
    """What a node means to the UI layer.

    kind: one of button / plane / key / cursor / text
    value: button label index, plane index, key character or control token,
           or a text-slot name ("presented" / "transcribed")
    """

    kind: str
    value: object = None


@dataclass(frozen=True)
class Camera:
    """Head pose; the viewpoint itself is pinned at the scene origin."""

    head_yaw: float = 0.0
    head_pitch: float = 0.0

    position: Vec3 = (0.0, 0.0, 0.0)

    def pose(self) -> Transform:
        return Transform.from_yaw_pitch(self.head_yaw, self.head_pitch)


Triangle = tuple[Vec3, Vec3, Vec3]


@dataclass
class SceneNode:
    id: int
    transform: Transform
    attachment: Attachment = Attachment.WORLD_FIXED
    role: UiRole | None = None
    mesh: list[Triangle] | None = None
    corners: list[Vec3] | None = None
    text: str | None = None
    color: str = "neutral"
    parent: int | None = None
    children: list[int] = field(default_factory=list)
    # derived by Scene.update_world_transforms
    world: Transform = field(default_factory=Transform.identity)
    world_mesh: list[Triangle] | None = None
    world_corners: list[Vec3] | None = None
    bounds: Aabb = field(default_factory=Aabb.empty)


class Scene:
    """Node store plus the world-transform / bounds refresh pass."""

    def __init__(self) -> None:
        self.nodes: dict[int, SceneNode] = {}
        self.root_id: int | None = None
        self._next_id = 0
        self.has_view_fixed = False
        self._camera = Camera()

    def add_node(
        self,
        parent: int | None,
        transform: Transform = Transform.identity(),
        attachment: Attachment = Attachment.WORLD_FIXED,
        role: UiRole | None = None,
        mesh: list[Triangle] | None = None,
        corners: list[Vec3] | None = None,
        text: str | None = None,
        color: str = "neutral",
    ) -> int:
        node_id = self._next_id
        self._next_id += 1
        node = SceneNode(
            id=node_id,
            transform=transform,
            attachment=attachment,
            role=role,
            mesh=mesh,
            corners=corners,
            text=text,
            color=color,
            parent=parent,
        )
        self.nodes[node_id] = node
        if parent is None:
            if self.root_id is not None:
                raise ValueError("scene already has a root")
            self.root_id = node_id
        else:
            self.nodes[parent].children.append(node_id)
        if attachment is Attachment.VIEW_FIXED:
            self.has_view_fixed = True
        return node_id

    @property
    def root(self) -> SceneNode:
        return self.nodes[self.root_id]

    def update_world_transforms(self, camera: Camera) -> None:
        """Recompute world transforms top-down and bounds bottom-up."""
        self._camera = camera
        head = camera.pose()
        self._update_node(self.root_id, Transform.identity(), head)

    def _update_node(self, node_id: int, parent_world: Transform, head: Transform) -> Aabb:
        node = self.nodes[node_id]
        if node.attachment is Attachment.VIEW_FIXED:
            node.world = head.compose(node.transform)
        else:
            node.world = parent_world.compose(node.transform)
        bounds = Aabb.empty()
        if node.mesh is not None:
            w = node.world
            node.world_mesh = [(w.apply(a), w.apply(b), w.apply(c)) for a, b, c in node.mesh]
            pts = [p for tri in node.world_mesh for p in tri]
            bounds = bounds.union(Aabb.from_points(pts))
        if node.corners is not None:
            node.world_corners = [node.world.apply(p) for p in node.corners]
        for child in node.children:
            bounds = bounds.union(self._update_node(child, node.world, head))
        node.bounds = bounds
        return bounds

    def iter_nodes(self):
        return self.nodes.values()

    def find_by_role(self, kind: str) -> list[SceneNode]:
        return [n for n in self.nodes.values() if n.role is not None and n.role.kind == kind]

    def node_by_role_value(self, kind: str, value) -> SceneNode:
        for n in self.nodes.values():
            if n.role is not None and n.role.kind == kind and n.role.value == value:
                return n
        raise KeyError(f"no {kind} node with value {value!r}")

    def angular_center(self, node_id: int) -> tuple[float, float]:
        """(yaw, pitch) of the node's world mesh centroid as seen from origin."""
        node = self.nodes[node_id]
        if not node.world_mesh:
            raise ValueError(f"node {node_id} has no mesh")
        pts = [p for tri in node.world_mesh for p in tri]
        cx = sum(p[0] for p in pts) / len(pts)
        cy = sum(p[1] for p in pts) / len(pts)
        cz = sum(p[2] for p in pts) / len(pts)
        return angles_from_direction(normalize((cx, cy, cz)))

    def snapshot(self) -> list[dict]:
        """JSON-ready node list (see protocol.md for the schema)."""
        out = []
        for n in self.nodes.values():
            role = None
            if n.role is not None:
                role = {"kind": n.role.kind, "value": n.role.value}
            out.append(
                {
                    "id": n.id,
                    "parent": n.parent,
                    "role": role,
                    "color": n.color,
                    "corners": [list(p) for p in n.world_corners] if n.world_corners else None,
                    "text": n.text,
                }
            )
        return out


def _facing_quad(yaw_deg: float, pitch_deg: float, yaw_size_deg: float, pitch_size_deg: float, radius_m: float):
    """Local mesh + transform for a flat quad of the given angular size,
    centered on the (yaw, pitch) direction at `radius_m`, facing the origin."""
    w = 2.0 * radius_m * math.tan(math.radians(yaw_size_deg) / 2.0)
    h = 2.0 * radius_m * math.tan(math.radians(pitch_size_deg) / 2.0)
    c00 = (-w / 2.0, -h / 2.0, 0.0)
    c10 = (w / 2.0, -h / 2.0, 0.0)
    c11 = (w / 2.0, h / 2.0, 0.0)
    c01 = (-w / 2.0, h / 2.0, 0.0)
    mesh = [(c00, c10, c11), (c00, c11, c01)]
    corners = [c00, c10, c11, c01]
    rot = Transform.from_yaw_pitch(yaw_deg, pitch_deg)
    transform = Transform(rotation=rot.rotation, translation=rot.apply((0.0, 0.0, -radius_m)))
    return mesh, corners, transform


def _grouped(items: list[tuple[float, object]], max_children: int = 12) -> list:
    """Recursively chunk an ordered (position, payload) list into a nesting
    whose fan-out stays at or below max_children."""
    while len(items) > max_children:
        chunks = []
        size = max(2, math.ceil(len(items) / max_children))
        for i in range(0, len(items), size):
            chunk = items[i : i + size]
            chunks.append((chunk[0][0], [payload for _, payload in chunk]))
        items = chunks
    return [payload for _, payload in items]


def build_button_grid(
    rows: int,
    cols: int,
    button_yaw_deg: float,
    button_pitch_deg: float,
    gap_deg: float,
    radius_m: float = 2.0,
    attachment: Attachment = Attachment.WORLD_FIXED,
) -> Scene:
    """Grid of congruent buttons numbered row-major, the grid centered so the
    middle cell looks straight ahead. Rows (and long rows' columns) are
    grouped under intermediate nodes so bounding-box culling has a hierarchy
    to work with."""
    if rows < 1 or cols < 1:
        raise ValueError("grid dimensions must be positive")
    scene = Scene()
    pitch_step = button_pitch_deg + gap_deg
    yaw_step = button_yaw_deg + gap_deg
    grid_root = scene.add_node(None, attachment=attachment)

    def add_button(parent: int, label: int, yaw: float, pitch: float) -> None:
        mesh, corners, tf = _facing_quad(yaw, pitch, button_yaw_deg, button_pitch_deg, radius_m)
        scene.add_node(parent, transform=tf, role=UiRole("button", label), mesh=mesh, corners=corners)

    def add_level(parent: int, spec) -> None:
        if isinstance(spec, tuple):
            label, yaw, pitch = spec
            add_button(parent, label, yaw, pitch)
        else:
            group = scene.add_node(parent)
            for child in spec:
                add_level(group, child)

    row_specs = []
    for i in range(rows):
        pitch = ((rows - 1) / 2.0 - i) * pitch_step
        cells = []
        for j in range(cols):
            yaw = (j - (cols - 1) / 2.0) * yaw_step
            cells.append((yaw, (i * cols + j, yaw, pitch)))
        row_specs.append((pitch, _grouped(cells)))
    for spec in _grouped(row_specs):
        add_level(grid_root, spec)

    scene.update_world_transforms(Camera())
    return scene


def build_menu_scene(
    rows: int = 3,
    cols: int = 5,
    button_yaw_deg: float = 12.0,
    button_pitch_deg: float = 10.0,
    gap_deg: float = 1.0,
    radius_m: float = 2.0,
    attachment: Attachment = Attachment.WORLD_FIXED,
) -> Scene:
    """The menu-selection UI (15 equal buttons by default, middle index 7)."""
    return build_button_grid(rows, cols, button_yaw_deg, button_pitch_deg, gap_deg, radius_m, attachment)


def build_binary_scene(
    attachment: Attachment = Attachment.WORLD_FIXED,
    half_yaw_deg: float = 30.0,
    pitch_deg: float = 30.0,
    gap_deg: float = 0.5,
    radius_m: float = 2.0,
) -> Scene:
    """Two equal planes split by a vertical center line; left red, right blue."""
    scene = Scene()
    root = scene.add_node(None, attachment=attachment)
    size = half_yaw_deg - gap_deg / 2.0
    if size <= 0:
        raise ValueError("half_yaw_deg must exceed half the gap")
    offset = (half_yaw_deg + gap_deg / 2.0) / 2.0
    for index, (yaw, color) in enumerate([(-offset, "red"), (offset, "blue")]):
        mesh, corners, tf = _facing_quad(yaw, 0.0, size, pitch_deg, radius_m)
        scene.add_node(root, transform=tf, role=UiRole("plane", index), mesh=mesh, corners=corners, color=color)
    scene.update_world_transforms(Camera())
    return scene


@dataclass(frozen=True)
class KeySpec:
    value: str  # 'a'..'z', ' ', or a control token: 'backspace' / 'done'
    width_units: float = 1.0


@dataclass(frozen=True)
class KeyboardLayout:
    rows: tuple[tuple[KeySpec, ...], ...]

    @staticmethod
    def qwerty() -> "KeyboardLayout":
        rows = [
            [KeySpec(c) for c in "qwertyuiop"],
            [KeySpec(c) for c in "asdfghjkl"],
            [KeySpec(c) for c in "zxcvbnm"] + [KeySpec("backspace", 1.6)],
            [KeySpec(" ", 5.0), KeySpec("done", 1.6)],
        ]
        return KeyboardLayout(tuple(tuple(r) for r in rows))


def build_keyboard_scene(
    layout: KeyboardLayout | None = None,
    key_yaw_deg: float = 4.5,
    key_pitch_deg: float = 5.0,
    gap_deg: float = 0.3,
    center_pitch_deg: float = -8.0,
    radius_m: float = 2.0,
    attachment: Attachment = Attachment.WORLD_FIXED,
) -> Scene:
    """QWERTY keyboard plus presented-phrase and transcription text slots."""
    layout = layout or KeyboardLayout.qwerty()
    seen: set[str] = set()
    for row in layout.rows:
        for key in row:
            if key.value in seen:
                raise ValueError(f"duplicate key {key.value!r} in layout")
            seen.add(key.value)

    scene = Scene()
    root = scene.add_node(None, attachment=attachment)
    n_rows = len(layout.rows)
    pitch_step = key_pitch_deg + gap_deg
    for i, row in enumerate(layout.rows):
        pitch = center_pitch_deg + ((n_rows - 1) / 2.0 - i) * pitch_step
        widths = [k.width_units * key_yaw_deg for k in row]
        total = sum(widths) + gap_deg * (len(row) - 1)
        cursor = -total / 2.0
        for key, width in zip(row, widths):
            yaw = cursor + width / 2.0
            mesh, corners, tf = _facing_quad(yaw, pitch, width, key_pitch_deg, radius_m)
            scene.add_node(root, transform=tf, role=UiRole("key", key.value), mesh=mesh, corners=corners)
            cursor += width + gap_deg

    top_pitch = center_pitch_deg + ((n_rows - 1) / 2.0) * pitch_step
    for slot, pitch in (("presented", top_pitch + 2.2 * pitch_step), ("transcribed", top_pitch + 1.2 * pitch_step)):
        mesh, corners, tf = _facing_quad(0.0, pitch, 30.0, 4.0, radius_m)
        color = "green" if slot == "presented" else "neutral"
        scene.add_node(root, transform=tf, role=UiRole("text", slot), mesh=mesh, corners=corners, text="", color=color)

    scene.update_world_transforms(Camera())
    return scene
