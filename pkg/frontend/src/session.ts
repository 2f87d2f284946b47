// Client-side session state: scene mirror, cursor, hover/flash feedback,
// and running metrics folded from server messages. Pure data; rendering and
// sockets live elsewhere.

import {
  SceneNode,
  ServerMsg,
  TrialRecordFields,
} from "./protocol.js";

export interface Metrics {
  trials: number;
  correct: number;
  accuracyPct: number;
  meanTimeS: number;
  errors: number;
  wpm: number | null; // keyboard only, mean over finished phrases
}

export class ClientSession {
  nodes = new Map<number, SceneNode>();
  cursor: { theta1: number; theta2: number } = { theta1: 0, theta2: 0 };
  hoverNode: number | null = null;
  flashes = new Map<number, number>(); // node id -> flash deadline (ms clock)
  records: TrialRecordFields[] = [];
  summary: TrialRecordFields[] | null = null;
  keyClicks = 0;
  lastError: string | null = null;

  constructor(private now: () => number = () => performance.now()) {}

  get presented(): string {
    return this.textOf("presented");
  }

  get transcribed(): string {
    return this.textOf("transcribed");
  }

  private textOf(slot: string): string {
    for (const node of this.nodes.values()) {
      if (node.role?.kind === "text" && node.role.value === slot) {
        return node.text ?? "";
      }
    }
    return "";
  }

  apply(msg: ServerMsg): void {
    switch (msg.type) {
      case "scene":
        this.nodes = new Map(msg.nodes.map((n) => [n.id, n]));
        break;
      case "cursor":
        this.cursor = { theta1: msg.theta1_deg, theta2: msg.theta2_deg };
        break;
      case "ui_event":
        if (msg.kind === "hover_enter") {
          this.hoverNode = msg.node_id;
        } else if (msg.kind === "hover_exit" && this.hoverNode === msg.node_id) {
          this.hoverNode = null;
        } else if (msg.kind === "select" && msg.node_id !== null) {
          this.flashes.set(msg.node_id, this.now() + 350);
        }
        break;
      case "key_click":
        this.keyClicks += 1;
        break;
      case "trial":
        this.records.push(msg);
        break;
      case "summary":
        this.summary = msg.records;
        break;
      case "error":
        this.lastError = `${msg.code}: ${msg.detail}`;
        break;
    }
  }

  isFlashing(nodeId: number): boolean {
    const until = this.flashes.get(nodeId);
    if (until === undefined) {
      return false;
    }
    if (this.now() > until) {
      this.flashes.delete(nodeId);
      return false;
    }
    return true;
  }

  metrics(): Metrics {
    const n = this.records.length;
    const correct = this.records.filter((r) => r.correct).length;
    const errors = this.records.reduce((acc, r) => acc + r.errors, 0);
    const meanTime =
      n === 0 ? 0 : this.records.reduce((acc, r) => acc + (r.commit_ms - r.start_ms), 0) / n / 1000;
    let wpm: number | null = null;
    const phrases = this.records.filter(
      (r) => r.task === "keyboard" && r.transcribed && r.commit_ms > r.start_ms,
    );
    if (phrases.length > 0) {
      wpm =
        phrases.reduce(
          (acc, r) => acc + ((r.transcribed!.length - 1) / ((r.commit_ms - r.start_ms) / 1000)) * 12,
          0,
        ) / phrases.length;
    }
    return {
      trials: n,
      correct,
      accuracyPct: n === 0 ? 100 : (100 * correct) / n,
      meanTimeS: meanTime,
      errors,
      wpm,
    };
  }
}
