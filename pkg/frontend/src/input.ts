// Pointer and keyboard input -> protocol messages.
//
// DOM-free: the caller feeds abstract pointer events with screen
// coordinates and a target surface; this mapper owns finger bookkeeping,
// session-relative timestamps, head-drag integration, and the modifier-key
// second finger used to play two-fingers on single-pointer hardware.

import { PadViewport } from "./padmap.js";
import { ClientMsg, HeadMsg, PadSource, TouchMsg } from "./protocol.js";

export type Surface = "pad" | "side" | "canvas";

export interface PointerSample {
  kind: "down" | "move" | "up";
  x: number;
  y: number;
  surface: Surface;
}

const HEAD_DEG_PER_PX = 0.22;
const YAW_LIMIT = 175;
const PITCH_LIMIT = 85;

export class InputMapper {
  private started = false;
  private t0 = 0;
  private primaryDown: Surface | null = null;
  private lastPanel: { x: number; y: number } | null = null;
  private shiftDown = false;
  private headDrag: { x: number; y: number } | null = null;
  yaw = 0;
  pitch = 0;

  constructor(
    public pad: PadViewport,
    public sidePad: PadViewport,
    private now: () => number = () => performance.now(),
  ) {}

  startSession(): void {
    this.started = true;
    this.t0 = this.now();
    this.primaryDown = null;
    this.lastPanel = null;
    this.shiftDown = false;
    this.headDrag = null;
    this.yaw = 0;
    this.pitch = 0;
  }

  endSession(): void {
    this.started = false;
  }

  private t(): number {
    return Math.max(0, Math.round(this.now() - this.t0));
  }

  private touch(action: TouchMsg["action"], finger: number, x: number, y: number, source: PadSource): TouchMsg {
    return { type: "touch", action, finger, x, y, t_ms: this.t(), source };
  }

  private headMsg(): HeadMsg {
    return {
      type: "head",
      yaw_deg: Math.round(this.yaw * 100) / 100,
      pitch_deg: Math.round(this.pitch * 100) / 100,
      t_ms: this.t(),
    };
  }

  pointer(sample: PointerSample): ClientMsg[] {
    if (!this.started) {
      return []; // input before the session starts is discarded
    }
    if (sample.surface === "canvas") {
      return this.headPointer(sample);
    }
    const viewport = sample.surface === "pad" ? this.pad : this.sidePad;
    const source: PadSource = sample.surface === "pad" ? "front" : "side";
    const p = viewport.toPanel(sample.x, sample.y);
    if (sample.kind === "down") {
      this.primaryDown = sample.surface;
      this.lastPanel = { x: p.x, y: p.y };
      return [this.touch("down", 0, p.x, p.y, source)];
    }
    if (this.primaryDown !== sample.surface) {
      return []; // stray move/up without a down on this surface
    }
    this.lastPanel = { x: p.x, y: p.y };
    if (sample.kind === "move") {
      return [this.touch("move", 0, p.x, p.y, source)];
    }
    this.primaryDown = null;
    return [this.touch("up", 0, p.x, p.y, source)];
  }

  private headPointer(sample: PointerSample): ClientMsg[] {
    if (sample.kind === "down") {
      this.headDrag = { x: sample.x, y: sample.y };
      return [];
    }
    if (this.headDrag === null) {
      return [];
    }
    if (sample.kind === "up") {
      this.headDrag = null;
      return [];
    }
    const dx = sample.x - this.headDrag.x;
    const dy = sample.y - this.headDrag.y;
    this.headDrag = { x: sample.x, y: sample.y };
    this.yaw = clamp(this.yaw + dx * HEAD_DEG_PER_PX, -YAW_LIMIT, YAW_LIMIT);
    this.pitch = clamp(this.pitch - dy * HEAD_DEG_PER_PX, -PITCH_LIMIT, PITCH_LIMIT);
    return [this.headMsg()];
  }

  turnHead(dYaw: number, dPitch: number): ClientMsg[] {
    if (!this.started) {
      return [];
    }
    this.yaw = clamp(this.yaw + dYaw, -YAW_LIMIT, YAW_LIMIT);
    this.pitch = clamp(this.pitch + dPitch, -PITCH_LIMIT, PITCH_LIMIT);
    return [this.headMsg()];
  }

  // Shift emulates the tap finger of two-fingers while the pointer drags.
  modifier(down: boolean): ClientMsg[] {
    if (!this.started || down === this.shiftDown) {
      return [];
    }
    this.shiftDown = down;
    if (this.primaryDown !== "pad" || this.lastPanel === null) {
      return []; // a second finger only makes sense during a front-pad drag
    }
    const { x, y } = this.lastPanel;
    // land the emulated finger beside the real one, staying on the panel
    const tx = x < 2260 ? x + 260 : x - 260;
    const ty = y < 1280 ? y + 120 : y - 120;
    if (down) {
      return [this.touch("down", 1, tx, ty, "front")];
    }
    return [this.touch("up", 1, tx, ty, "front")];
  }
}

function clamp(v: number, lo: number, hi: number): number {
  return Math.min(hi, Math.max(lo, v));
}
