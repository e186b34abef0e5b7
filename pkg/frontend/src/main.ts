// Browser entry point: websocket wiring, input polling at the server
// tick rate, and a requestAnimationFrame render loop. The server is
// authoritative; this file only relays telemetry and input.

import { SteerClient } from "./client.js";
import { CorrectionStream, gamepadAxes, keyboardAxes, mergeAxes } from "./input.js";
import { makeSetSpeed, makeSimple } from "./protocol.js";
import { buildScene, fitView } from "./scene.js";
import { drawScene } from "./render.js";

const canvasMaybe = document.getElementById("view") as HTMLCanvasElement | null;
if (!canvasMaybe) throw new Error("canvas #view not found");
const canvas: HTMLCanvasElement = canvasMaybe;
const ctxMaybe = canvas.getContext("2d");
if (!ctxMaybe) throw new Error("2D context unavailable");
const ctx: CanvasRenderingContext2D = ctxMaybe;

const statusMaybe = document.getElementById("status") as HTMLDivElement | null;
const readoutMaybe = document.getElementById("readout") as HTMLDivElement | null;
if (!statusMaybe || !readoutMaybe) throw new Error("toolbar elements not found");
const statusDiv: HTMLDivElement = statusMaybe;
const readoutDiv: HTMLDivElement = readoutMaybe;

const params = new URLSearchParams(location.search);
const wsUrl = params.get("ws") ?? `ws://${location.hostname || "127.0.0.1"}:8765`;

const client = new SteerClient();
client.onProtocolError = (detail) => console.warn("protocol:", detail);

let view = fitView({ N_f: 1, directrix: [[0, 0, 0]], radii: [1], mean_q: [[1, 0, 0, 0]],
                     sigma_q: [0], frames: [{ t: [0, 0, 1], x: [1, 0, 0], y: [0, 1, 0] }],
                     meta: { N_f: 1, r_min: 0, source_demo_ids: [] } },
                   canvas.clientWidth || 800, canvas.clientHeight || 600);
let viewDirty = true;
let lastHz = 0;
client.onChange = () => {
  if (client.state.canal !== null && viewDirty) {
    view = fitView(client.state.canal, canvas.width, canvas.height, view.yaw, view.pitch);
    viewDirty = false;
  }
  if (client.state.tickHz !== lastHz) {
    lastHz = client.state.tickHz;
    restartInputLoop();
  }
};

function connect(): void {
  const ws = new WebSocket(wsUrl);
  client.attach(ws);
  viewDirty = true;
  ws.onopen = () => client.handleOpen();
  ws.onmessage = (ev) => client.handleMessage(String(ev.data));
  ws.onclose = () => {
    client.handleClose();
    setTimeout(connect, 1000); // reconnect banner shows meanwhile
  };
}
connect();

// ------------------------- input -------------------------
const keysDown = new Set<string>();
let paused = false;

window.addEventListener("keydown", (ev) => {
  if (ev.repeat) return;
  switch (ev.key) {
    case "b":
      client.send(makeSimple("backtrack"));
      return;
    case "g":
      client.send(makeSimple("grip"));
      return;
    case " ":
      paused = !paused;
      client.send(makeSimple(paused ? "pause" : "resume"));
      ev.preventDefault();
      return;
    case "1":
    case "2":
    case "3":
      client.send(makeSetSpeed(Number(ev.key)));
      return;
    default:
      keysDown.add(ev.key);
  }
});
window.addEventListener("keyup", (ev) => keysDown.delete(ev.key));
window.addEventListener("blur", () => keysDown.clear());

const stream = new CorrectionStream();
let inputTimer: number | null = null;

function pollInput(): void {
  if (client.state.status !== "connected") {
    return;
  }
  const pads = navigator.getGamepads?.() ?? [];
  const gp = pads.find(Boolean);
  const pad = gp ? gamepadAxes(gp.axes?.[0] ?? 0, gp.axes?.[1] ?? 0) : { kx: 0, ky: 0 };
  if (gp?.buttons?.[1]?.pressed) client.send(makeSimple("backtrack"));
  const axes = mergeAxes(keyboardAxes(keysDown), pad);
  for (const cmd of stream.step(axes)) {
    client.send(cmd);
  }
}

function restartInputLoop(): void {
  if (inputTimer !== null) clearInterval(inputTimer);
  // corrections stream at the server tick rate
  inputTimer = window.setInterval(pollInput, 1000 / client.state.tickHz);
}
restartInputLoop();

// ------------------------- orbit ------------------------
let dragging = false;
let lastXY: [number, number] = [0, 0];
canvas.addEventListener("mousedown", (ev) => {
  dragging = true;
  lastXY = [ev.clientX, ev.clientY];
});
window.addEventListener("mouseup", () => (dragging = false));
window.addEventListener("mousemove", (ev) => {
  if (!dragging) return;
  view.yaw += (ev.clientX - lastXY[0]) * 0.008;
  view.pitch += (ev.clientY - lastXY[1]) * 0.008;
  lastXY = [ev.clientX, ev.clientY];
});

// ------------------------- render -----------------------
function resize(): void {
  canvas.width = canvas.clientWidth;
  canvas.height = canvas.clientHeight;
  if (client.state.canal !== null) {
    view = fitView(client.state.canal, canvas.width, canvas.height, view.yaw, view.pitch);
  }
}
window.addEventListener("resize", resize);
resize();

function frame(): void {
  const st = client.state;
  if (st.status === "connected" && st.canal !== null) {
    statusDiv.textContent = `connected - ${wsUrl}`;
    statusDiv.className = "ok";
    const prims = buildScene(st.canal, st.lastState, view,
                             { diskStride: 10, trail: st.trail });
    drawScene(ctx, prims, canvas.width, canvas.height);
    if (st.lastState !== null) {
      const s = st.lastState;
      readoutDiv.textContent =
        `phase ${s.phase}  disk ${s.s}/${st.canal.N_f}  d ${s.d.toFixed(3)}` +
        `  r ${s.radius.toFixed(3)}m${s.correcting ? "  [correcting]" : ""}` +
        `${paused ? "  [paused]" : ""}`;
    }
  } else {
    statusDiv.textContent = st.status === "disconnected"
      ? `disconnected - retrying ${wsUrl}`
      : `connecting to ${wsUrl}`;
    statusDiv.className = st.status === "disconnected" ? "bad" : "";
  }
  requestAnimationFrame(frame);
}
requestAnimationFrame(frame);
