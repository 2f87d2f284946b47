// Perspective projection of world-space points from the current head pose.
//
// World frame matches the engine: viewer at the origin, -z forward at zero
// pose, +x right, +y up; positive yaw turns right, positive pitch looks up.

export interface Vec3 {
  x: number;
  y: number;
  z: number;
}

export interface Projected {
  sx: number;
  sy: number;
  depth: number; // distance along the view axis, positive in front
}

const DEG = Math.PI / 180;

// view = R^T * world, the inverse of the head rotation
export function worldToView(p: Vec3, yawDeg: number, pitchDeg: number): Vec3 {
  const cy = Math.cos(yawDeg * DEG);
  const sy = Math.sin(yawDeg * DEG);
  const cp = Math.cos(pitchDeg * DEG);
  const sp = Math.sin(pitchDeg * DEG);
  // head rotation R = Ry(-yaw) * Rx(pitch); columns below are R transposed
  const x1 = cy * p.x + 0 * p.y + sy * p.z;
  const y1 = -sy * sp * p.x + cp * p.y + cy * sp * p.z;
  const z1 = -sy * cp * p.x - sp * p.y + cy * cp * p.z;
  return { x: x1, y: y1, z: z1 };
}

export function directionFromAngles(yawDeg: number, pitchDeg: number): Vec3 {
  const cp = Math.cos(pitchDeg * DEG);
  return {
    x: Math.sin(yawDeg * DEG) * cp,
    y: Math.sin(pitchDeg * DEG),
    z: -Math.cos(yawDeg * DEG) * cp,
  };
}

export class Projector {
  constructor(
    public width: number,
    public height: number,
    public fovYDeg = 62,
  ) {}

  get focal(): number {
    return this.height / 2 / Math.tan((this.fovYDeg / 2) * DEG);
  }

  project(p: Vec3, yawDeg: number, pitchDeg: number): Projected | null {
    const v = worldToView(p, yawDeg, pitchDeg);
    const depth = -v.z;
    if (depth < 0.05) {
      return null; // behind or grazing the camera plane
    }
    const f = this.focal;
    return {
      sx: this.width / 2 + (f * v.x) / depth,
      sy: this.height / 2 - (f * v.y) / depth,
      depth,
    };
  }
}
