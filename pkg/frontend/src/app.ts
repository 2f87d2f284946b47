// Wiring: DOM events -> InputMapper -> WebSocket; server messages ->
// ClientSession -> Renderer + metrics panel.

import { keyClick } from "./audio.js";
import { InputMapper, Surface } from "./input.js";
import { PadViewport } from "./padmap.js";
import { decode, encode, ClientMsg, Task, Technique, GAZE_TECHNIQUES } from "./protocol.js";
import { Renderer } from "./renderer.js";
import { ClientSession } from "./session.js";

function el<T extends HTMLElement>(id: string): T {
  return document.getElementById(id) as T;
}

const canvas = el<HTMLCanvasElement>("scene");
const padCanvas = el<HTMLCanvasElement>("pad");
const sideCanvas = el<HTMLCanvasElement>("sidepad");
const statusEl = el<HTMLDivElement>("status");
const metricsEl = el<HTMLDivElement>("metrics");
const taskSel = el<HTMLSelectElement>("task");
const techniqueSel = el<HTMLSelectElement>("technique");
const startBtn = el<HTMLButtonElement>("start");

let session = new ClientSession();
let socket: WebSocket | null = null;
const renderer = new Renderer(canvas);

function padRect(c: HTMLCanvasElement) {
  return { x: 0, y: 0, width: c.width, height: c.height };
}

const mapper = new InputMapper(new PadViewport(padRect(padCanvas)), new PadViewport(padRect(sideCanvas)));

function send(messages: ClientMsg[]): void {
  if (!socket || socket.readyState !== WebSocket.OPEN) {
    return;
  }
  for (const msg of messages) {
    socket.send(encode(msg));
  }
}

function setStatus(text: string): void {
  statusEl.textContent = text;
}

function start(): void {
  const task = taskSel.value as Task;
  const technique = techniqueSel.value as Technique;
  socket?.close();
  session = new ClientSession();
  const url = `ws://${location.hostname}:8070/session`;
  socket = new WebSocket(url);
  socket.onopen = () => {
    mapper.startSession();
    send([
      {
        type: "start_session",
        task,
        technique,
        mapping_mode: null,
        seed: Math.floor(Math.random() * 1e6),
      },
    ]);
    setStatus(`${technique} / ${task} - running`);
  };
  socket.onmessage = (ev) => {
    const msg = decode(ev.data as string);
    session.apply(msg);
    if (msg.type === "key_click") {
      keyClick();
    }
    if (msg.type === "summary") {
      setStatus("session complete - summary below");
    }
    if (msg.type === "error") {
      setStatus(`server error ${msg.code}: ${msg.detail}`);
    }
  };
  socket.onclose = () => {
    mapper.endSession();
    setStatus("disconnected");
  };
  socket.onerror = () => setStatus("connection failed - is `fronttouch serve --port 8070` running?");
}

startBtn.onclick = start;

function surfacePointer(c: HTMLCanvasElement, surface: Surface): void {
  const local = (ev: PointerEvent) => {
    const rect = c.getBoundingClientRect();
    return {
      x: ((ev.clientX - rect.left) / rect.width) * c.width,
      y: ((ev.clientY - rect.top) / rect.height) * c.height,
    };
  };
  c.addEventListener("pointerdown", (ev) => {
    c.setPointerCapture(ev.pointerId);
    const { x, y } = local(ev);
    send(mapper.pointer({ kind: "down", x, y, surface }));
  });
  c.addEventListener("pointermove", (ev) => {
    if (ev.buttons === 0) {
      return;
    }
    const { x, y } = local(ev);
    send(mapper.pointer({ kind: "move", x, y, surface }));
  });
  c.addEventListener("pointerup", (ev) => {
    const { x, y } = local(ev);
    send(mapper.pointer({ kind: "up", x, y, surface }));
  });
}

surfacePointer(padCanvas, "pad");
surfacePointer(sideCanvas, "side");
surfacePointer(canvas, "canvas");

window.addEventListener("keydown", (ev) => {
  if (ev.key === "Shift" && !ev.repeat) {
    send(mapper.modifier(true));
  }
  const step = 3;
  if (ev.key === "ArrowLeft") send(mapper.turnHead(-step, 0));
  if (ev.key === "ArrowRight") send(mapper.turnHead(step, 0));
  if (ev.key === "ArrowUp") send(mapper.turnHead(0, step));
  if (ev.key === "ArrowDown") send(mapper.turnHead(0, -step));
});
window.addEventListener("keyup", (ev) => {
  if (ev.key === "Shift") {
    send(mapper.modifier(false));
  }
});

function drawPads(): void {
  for (const [c, label] of [
    [padCanvas, "front pad (drag; hold Shift = second finger)"],
    [sideCanvas, "side pad"],
  ] as const) {
    const ctx = c.getContext("2d")!;
    ctx.fillStyle = "#1c222c";
    ctx.fillRect(0, 0, c.width, c.height);
    ctx.strokeStyle = "#39455a";
    ctx.strokeRect(1, 1, c.width - 2, c.height - 2);
    ctx.fillStyle = "#8b97a8";
    ctx.font = "12px system-ui, sans-serif";
    ctx.textAlign = "center";
    ctx.fillText(label, c.width / 2, 16);
  }
}

function renderMetrics(): void {
  const m = session.metrics();
  const gaze = GAZE_TECHNIQUES.includes(techniqueSel.value as Technique);
  const lines = [
    `trials: ${m.trials}`,
    `accuracy: ${m.accuracyPct.toFixed(1)}%`,
    `mean time: ${m.meanTimeS.toFixed(2)} s`,
    `error commits: ${m.errors}`,
  ];
  if (m.wpm !== null) {
    lines.push(`wpm: ${m.wpm.toFixed(2)}`);
  }
  if (session.presented) {
    lines.push(`presented: ${session.presented}`);
    lines.push(`typed: ${session.transcribed}`);
  }
  if (gaze) {
    lines.push("gaze technique: steer with head (drag the scene / arrow keys), tap the pad");
  }
  if (session.lastError) {
    lines.push(`last error: ${session.lastError}`);
  }
  metricsEl.textContent = lines.join("\n");
}

function frame(): void {
  renderer.draw(session, mapper.yaw, mapper.pitch);
  drawPads();
  renderMetrics();
  requestAnimationFrame(frame);
}

setStatus("pick a task and technique, then start (server: fronttouch serve --port 8070)");
frame();
