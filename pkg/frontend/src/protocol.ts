// Message types for the session server's WebSocket protocol (see ../protocol.md).

export type Task = "binary" | "menu15" | "keyboard";
export type Technique =
  | "side-gaze"
  | "front-gaze"
  | "front-world"
  | "front-view"
  | "two-fingers"
  | "drag-n-tap";
export type MappingMode = "absolute" | "relative" | "hybrid" | null;
export type PadSource = "front" | "side";

export const TECHNIQUES: Technique[] = [
  "side-gaze",
  "front-gaze",
  "front-world",
  "front-view",
  "two-fingers",
  "drag-n-tap",
];
export const TASKS: Task[] = ["binary", "menu15", "keyboard"];
export const GAZE_TECHNIQUES: Technique[] = ["side-gaze", "front-gaze"];

export interface StartSessionMsg {
  type: "start_session";
  task: Task;
  technique: Technique;
  mapping_mode: MappingMode;
  seed: number;
  participant?: number;
  session?: number;
}

export interface TouchMsg {
  type: "touch";
  action: "down" | "move" | "up";
  finger: number;
  x: number;
  y: number;
  t_ms: number;
  source: PadSource;
}

export interface HeadMsg {
  type: "head";
  yaw_deg: number;
  pitch_deg: number;
  t_ms: number;
}

export interface EndSessionMsg {
  type: "end_session";
}

export type ClientMsg = StartSessionMsg | TouchMsg | HeadMsg | EndSessionMsg;

export interface SceneNode {
  id: number;
  parent: number | null;
  role: { kind: "button" | "plane" | "key" | "cursor" | "text"; value: unknown } | null;
  color: "red" | "blue" | "green" | "neutral";
  corners: [number, number, number][] | null;
  text: string | null;
}

export interface SceneMsg {
  type: "scene";
  nodes: SceneNode[];
}

export interface CursorMsg {
  type: "cursor";
  theta1_deg: number;
  theta2_deg: number;
}

export interface UiEventMsg {
  type: "ui_event";
  kind: "hover_enter" | "hover_exit" | "select" | "select_miss";
  node_id: number | null;
  t_ms: number;
}

export interface KeyClickMsg {
  type: "key_click";
  t_ms: number;
}

export interface TrialRecordFields {
  session_id: string;
  participant: number;
  technique: Technique;
  task: Task;
  trial: number;
  target: number;
  start_ms: number;
  commit_ms: number;
  correct: boolean;
  errors: number;
  presented: string | null;
  transcribed: string | null;
}

export interface TrialMsg extends TrialRecordFields {
  type: "trial";
}

export interface SummaryMsg {
  type: "summary";
  records: TrialRecordFields[];
}

export interface ErrorMsg {
  type: "error";
  code: "schema" | "config" | "no_session" | "monotonicity";
  detail: string;
}

export type ServerMsg = SceneMsg | CursorMsg | UiEventMsg | KeyClickMsg | TrialMsg | SummaryMsg | ErrorMsg;

export function encode(msg: ClientMsg): string {
  return JSON.stringify(msg);
}

export function decode(text: string): ServerMsg {
  const msg = JSON.parse(text) as ServerMsg;
  if (typeof msg !== "object" || msg === null || typeof (msg as { type?: unknown }).type !== "string") {
    throw new Error("malformed server message");
  }
  return msg;
}
