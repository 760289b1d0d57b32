// Front panel wiring: WebSocket in, canvas out, controls back to the server.

import { ClientMessage, SnapshotGate, SnapshotMessage, decodeServerMessage,
         encodeClientMessage } from "./protocol.js";
import { PointerThrottle, bindingFor, pointerMessage } from "./pointer.js";
import { PANEL_SLIDERS, checkParam, paramMessage } from "./params.js";
import { defaultView } from "./view.js";
import { renderSnapshot } from "./render.js";

const canvas = document.getElementById("scene") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const panel = document.getElementById("params")!;
const statusEl = document.getElementById("status")!;
const disk = document.getElementById("disk") as HTMLCanvasElement;

const view = defaultView();
const gate = new SnapshotGate();
let latest: SnapshotMessage | null = null;
let currentScenario = "";
const currentValues: Record<string, number> = {};
const sliderEls: Record<string, HTMLInputElement> = {};
let lastSent: Record<string, number> = {};

const ws = new WebSocket(`ws://${location.host}/ws`);
const throttle = new PointerThrottle(
  (msg) => ws.readyState === WebSocket.OPEN && ws.send(encodeClientMessage(msg)),
  (flush) => requestAnimationFrame(flush),
);

ws.onopen = () => { statusEl.textContent = "connected"; };
ws.onclose = () => { statusEl.textContent = "disconnected"; };
ws.onmessage = (ev) => {
  const msg = decodeServerMessage(String(ev.data));
  if (msg === null) return;
  if (msg.type === "snapshot") {
    if (gate.accept(msg)) latest = msg;
    if (msg.scenario !== currentScenario) {
      currentScenario = msg.scenario;
      buildPanel(msg.scenario);
    }
  } else if (msg.type === "reject") {
    // slider reverts to the last applied value and shows why
    statusEl.textContent = `rejected: ${msg.reason}`;
    for (const [key, el] of Object.entries(sliderEls)) {
      if (key in lastSent) el.value = String(lastSent[key]);
    }
  } else if (msg.type === "ack") {
    lastSent = { ...currentValues };
  }
};

function send(msg: ClientMessage): void {
  if (ws.readyState === WebSocket.OPEN) ws.send(encodeClientMessage(msg));
}

// -- pointer ------------------------------------------------------------------

let dragging = false;
canvas.addEventListener("pointerdown", (e) => { dragging = true; forward(e); });
window.addEventListener("pointerup", () => { dragging = false; });
canvas.addEventListener("pointermove", (e) => { if (dragging) forward(e); });

function forward(e: PointerEvent): void {
  const rect = canvas.getBoundingClientRect();
  const binding = bindingFor(currentScenario, e.shiftKey);
  throttle.move(pointerMessage(e.clientX, e.clientY, rect, binding));
}

// -- orbit disk (camera only, no server traffic) -------------------------------

let diskDrag = false;
disk.addEventListener("pointerdown", () => { diskDrag = true; });
window.addEventListener("pointerup", () => { diskDrag = false; });
window.addEventListener("pointermove", (e) => {
  if (!diskDrag) return;
  const rect = disk.getBoundingClientRect();
  view.orbit = Math.atan2(e.clientY - rect.top - rect.height / 2,
                          e.clientX - rect.left - rect.width / 2);
  drawDisk();
});

function drawDisk(): void {
  const c = disk.getContext("2d")!;
  const r = disk.width / 2;
  c.clearRect(0, 0, disk.width, disk.height);
  c.strokeStyle = "#7a8aa0";
  c.lineWidth = 3;
  c.beginPath();
  c.arc(r, r, r - 4, 0, 2 * Math.PI);
  c.stroke();
  c.strokeStyle = "#ffcc00";
  c.beginPath();
  c.moveTo(r, r);
  c.lineTo(r + (r - 6) * Math.cos(view.orbit), r + (r - 6) * Math.sin(view.orbit));
  c.stroke();
}

// -- parameter panel ------------------------------------------------------------

function buildPanel(scenario: string): void {
  panel.innerHTML = "";
  for (const spec of PANEL_SLIDERS[scenario] ?? []) {
    const row = document.createElement("label");
    row.className = "param-row";
    const name = document.createElement("span");
    name.textContent = spec.label;
    const input = document.createElement("input");
    input.type = "range";
    input.min = String(spec.min);
    input.max = String(spec.max);
    input.step = String(spec.step);
    input.addEventListener("change", () => {
      const value = Number(input.value);
      const check = checkParam(spec.key, value, currentValues);
      if (!check.ok) {
        statusEl.textContent = check.hint ?? "blocked";
        if (spec.key in currentValues) input.value = String(currentValues[spec.key]);
        return;
      }
      currentValues[spec.key] = value;
      send(paramMessage(spec.key, value));
    });
    sliderEls[spec.key] = input;
    row.appendChild(name);
    row.appendChild(input);
    panel.appendChild(row);
  }
  const reset = document.createElement("button");
  reset.textContent = "reset";
  reset.addEventListener("click", () => send({ type: "reset" }));
  panel.appendChild(reset);

  for (const name of ["friction", "coriolis", "precession"]) {
    const btn = document.createElement("button");
    btn.textContent = name;
    btn.addEventListener("click", () => send({ type: "scenario", name }));
    panel.appendChild(btn);
  }
}

// -- render loop: newest snapshot only ------------------------------------------

function frame(): void {
  if (latest !== null) renderSnapshot(ctx, latest, view);
  requestAnimationFrame(frame);
}

drawDisk();
requestAnimationFrame(frame);
