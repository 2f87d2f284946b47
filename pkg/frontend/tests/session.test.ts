import { describe, expect, it } from "vitest";

import { ClientSession } from "../src/session.js";
import { SceneMsg, ServerMsg } from "../src/protocol.js";

const sceneMsg: SceneMsg = {
  type: "scene",
  nodes: [
    { id: 0, parent: null, role: null, color: "neutral", corners: null, text: null },
    {
      id: 1,
      parent: 0,
      role: { kind: "text", value: "presented" },
      color: "green",
      corners: null,
      text: "the cat",
    },
    {
      id: 2,
      parent: 0,
      role: { kind: "text", value: "transcribed" },
      color: "neutral",
      corners: null,
      text: "the c",
    },
  ],
};

describe("client session", () => {
  it("mirrors scene text nodes", () => {
    const s = new ClientSession(() => 0);
    s.apply(sceneMsg);
    expect(s.presented).toBe("the cat");
    expect(s.transcribed).toBe("the c");
  });

  it("tracks hover and select flashes", () => {
    let t = 0;
    const s = new ClientSession(() => t);
    s.apply({ type: "ui_event", kind: "hover_enter", node_id: 4, t_ms: 10 } as ServerMsg);
    expect(s.hoverNode).toBe(4);
    s.apply({ type: "ui_event", kind: "select", node_id: 4, t_ms: 20 } as ServerMsg);
    expect(s.isFlashing(4)).toBe(true);
    t = 1000;
    expect(s.isFlashing(4)).toBe(false);
    s.apply({ type: "ui_event", kind: "hover_exit", node_id: 4, t_ms: 30 } as ServerMsg);
    expect(s.hoverNode).toBeNull();
  });

  it("computes metrics from trial messages", () => {
    const s = new ClientSession(() => 0);
    const base = {
      type: "trial" as const,
      session_id: "s",
      participant: 0,
      technique: "two-fingers" as const,
      task: "menu15" as const,
      target: 3,
      presented: null,
      transcribed: null,
    };
    s.apply({ ...base, trial: 0, start_ms: 0, commit_ms: 1000, correct: true, errors: 0 });
    s.apply({ ...base, trial: 1, start_ms: 1000, commit_ms: 4000, correct: false, errors: 2 });
    const m = s.metrics();
    expect(m.trials).toBe(2);
    expect(m.accuracyPct).toBeCloseTo(50);
    expect(m.meanTimeS).toBeCloseTo(2.0);
    expect(m.errors).toBe(2);
    expect(m.wpm).toBeNull();
  });

  it("computes wpm for keyboard phrases", () => {
    const s = new ClientSession(() => 0);
    s.apply({
      type: "trial",
      session_id: "s",
      participant: 0,
      technique: "side-gaze",
      task: "keyboard",
      trial: 0,
      target: 0,
      start_ms: 0,
      commit_ms: 30000,
      correct: true,
      errors: 0,
      presented: "x".repeat(26),
      transcribed: "x".repeat(26),
    });
    expect(s.metrics().wpm).toBeCloseTo(10.0);
  });

  it("echoes the last trial's transcription", () => {
    const s = new ClientSession(() => 0);
    s.apply({
      type: "trial",
      session_id: "s",
      participant: 0,
      technique: "side-gaze",
      task: "keyboard",
      trial: 0,
      target: 0,
      start_ms: 0,
      commit_ms: 5000,
      correct: true,
      errors: 0,
      presented: "abc",
      transcribed: "abc",
    });
    expect(s.records[0].transcribed).toBe("abc");
  });

  it("keeps the summary", () => {
    const s = new ClientSession(() => 0);
    s.apply({ type: "summary", records: [] });
    expect(s.summary).toEqual([]);
  });
});
