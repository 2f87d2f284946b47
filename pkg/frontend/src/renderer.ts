// Canvas rendering of the scene snapshot plus cursor and feedback overlays.

import { ClientSession } from "./session.js";
import { Projector, directionFromAngles } from "./projection.js";
import { SceneNode } from "./protocol.js";

const COLORS: Record<string, string> = {
  red: "#e05546",
  blue: "#4a7fd4",
  green: "#4caf6e",
  neutral: "#5a6472",
};

export class Renderer {
  private projector: Projector;

  constructor(private canvas: HTMLCanvasElement) {
    this.projector = new Projector(canvas.width, canvas.height);
  }

  draw(session: ClientSession, yawDeg: number, pitchDeg: number): void {
    const ctx = this.canvas.getContext("2d")!;
    const { width, height } = this.canvas;
    this.projector.width = width;
    this.projector.height = height;
    ctx.fillStyle = "#14181f";
    ctx.fillRect(0, 0, width, height);

    const quads: { node: SceneNode; pts: { sx: number; sy: number }[]; depth: number }[] = [];
    for (const node of session.nodes.values()) {
      if (!node.corners) {
        continue;
      }
      const pts = [];
      let depth = 0;
      let behind = false;
      for (const [x, y, z] of node.corners) {
        const p = this.projector.project({ x, y, z }, yawDeg, pitchDeg);
        if (!p) {
          behind = true;
          break;
        }
        pts.push(p);
        depth = Math.max(depth, p.depth);
      }
      if (!behind && pts.length === 4) {
        quads.push({ node, pts, depth });
      }
    }
    quads.sort((a, b) => b.depth - a.depth); // painter's order

    for (const { node, pts } of quads) {
      ctx.beginPath();
      ctx.moveTo(pts[0].sx, pts[0].sy);
      for (let i = 1; i < 4; i++) {
        ctx.lineTo(pts[i].sx, pts[i].sy);
      }
      ctx.closePath();
      const flashing = session.isFlashing(node.id);
      const fill = flashing ? COLORS.green : COLORS[node.color] ?? COLORS.neutral;
      if (node.role?.kind === "text") {
        ctx.fillStyle = "#1d232d";
        ctx.fill();
        const cx = (pts[0].sx + pts[2].sx) / 2;
        const cy = (pts[0].sy + pts[2].sy) / 2;
        ctx.fillStyle = node.role.value === "presented" ? "#63d38a" : "#e8a64f";
        ctx.font = "16px system-ui, sans-serif";
        ctx.textAlign = "center";
        ctx.textBaseline = "middle";
        ctx.fillText(node.text ?? "", cx, cy);
        continue;
      }
      ctx.fillStyle = fill;
      ctx.fill();
      ctx.lineWidth = session.hoverNode === node.id ? 3 : 1;
      ctx.strokeStyle = session.hoverNode === node.id ? "#f5f7fa" : "#263040";
      ctx.stroke();
      const label = this.labelOf(node);
      if (label) {
        const cx = (pts[0].sx + pts[2].sx) / 2;
        const cy = (pts[0].sy + pts[2].sy) / 2;
        ctx.fillStyle = "#f2f5f8";
        ctx.font = "14px system-ui, sans-serif";
        ctx.textAlign = "center";
        ctx.textBaseline = "middle";
        ctx.fillText(label, cx, cy);
      }
    }

    this.drawCursor(ctx, session, yawDeg, pitchDeg);
  }

  private labelOf(node: SceneNode): string | null {
    const role = node.role;
    if (!role) {
      return null;
    }
    if (role.kind === "button") {
      return String(role.value);
    }
    if (role.kind === "key") {
      const v = String(role.value);
      if (v === " ") return "space";
      if (v === "backspace") return "<-";
      if (v === "done") return "done";
      return v;
    }
    return null;
  }

  private drawCursor(ctx: CanvasRenderingContext2D, session: ClientSession, yawDeg: number, pitchDeg: number): void {
    // the cursor lives at (head + theta) on the 2 m sphere
    const dir = directionFromAngles(yawDeg + session.cursor.theta1, pitchDeg + session.cursor.theta2);
    const p = this.projector.project({ x: dir.x * 2, y: dir.y * 2, z: dir.z * 2 }, yawDeg, pitchDeg);
    if (!p) {
      return;
    }
    ctx.strokeStyle = "#fdfdfd";
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.moveTo(p.sx - 9, p.sy);
    ctx.lineTo(p.sx + 9, p.sy);
    ctx.moveTo(p.sx, p.sy - 9);
    ctx.lineTo(p.sx, p.sy + 9);
    ctx.stroke();
    ctx.beginPath();
    ctx.arc(p.sx, p.sy, 4, 0, Math.PI * 2);
    ctx.stroke();
  }
}
