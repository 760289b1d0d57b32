// Canvas painting of one snapshot. Thin: all geometry comes from view.ts.

import type { SnapshotMessage, Vec3 } from "./protocol.js";
import { ArrowSegment, ViewState, hudStrings, isSupportedScenario, layoutArrows,
         project, scoreBadge } from "./view.js";

const ARROW_COLORS: Record<string, string> = {
  gravity_tangential: "#d9534f",
  normal: "#5bc0de",
  friction: "#f0ad4e",
  applied: "#5cb85c",
  deflection: "#d9534f",
  centrifugal: "#aa66cc",
  left_hand: "#5cb85c",
  right_hand: "#5cb85c",
  torque: "#f0ad4e",
};

function v3(xs: unknown): Vec3 {
  const a = xs as number[];
  return [a[0] ?? 0, a[1] ?? 0, a[2] ?? 0];
}

export function renderSnapshot(ctx: CanvasRenderingContext2D, snap: SnapshotMessage,
                               view: ViewState): void {
  const w = ctx.canvas.width, h = ctx.canvas.height;
  const cx = w / 2, cy = h / 2;
  ctx.clearRect(0, 0, w, h);
  ctx.fillStyle = "#10141a";
  ctx.fillRect(0, 0, w, h);

  if (!isSupportedScenario(snap.scenario)) {
    ctx.fillStyle = "#ccc";
    ctx.font = "16px sans-serif";
    ctx.fillText(`unsupported scenario: ${snap.scenario}`, 20, 40);
    return;
  }

  if (snap.flags && snap.flags["error"]) {
    ctx.fillStyle = "#d9534f";
    ctx.font = "16px sans-serif";
    ctx.fillText(`scenario error: ${snap.flags["error"]}`, 20, 40);
    return;
  }

  if (snap.scenario === "friction") drawFriction(ctx, snap, view, cx, cy);
  else if (snap.scenario === "coriolis") drawCoriolis(ctx, snap, view, cx, cy);
  else drawPrecession(ctx, snap, view, cx, cy);

  for (const seg of layoutArrows(snap.arrows, view)) {
    drawArrow(ctx, seg, view, cx, cy);
  }
  drawHud(ctx, snap);
}

function line(ctx: CanvasRenderingContext2D, a: [number, number], b: [number, number],
              color: string, width = 2): void {
  ctx.strokeStyle = color;
  ctx.lineWidth = width;
  ctx.beginPath();
  ctx.moveTo(a[0], a[1]);
  ctx.lineTo(b[0], b[1]);
  ctx.stroke();
}

function dot(ctx: CanvasRenderingContext2D, p: [number, number], r: number,
             color: string): void {
  ctx.fillStyle = color;
  ctx.beginPath();
  ctx.arc(p[0], p[1], r, 0, 2 * Math.PI);
  ctx.fill();
}

function drawArrow(ctx: CanvasRenderingContext2D, seg: ArrowSegment, view: ViewState,
                   cx: number, cy: number): void {
  const a = project(view, seg.from, cx, cy);
  const b = project(view, seg.to, cx, cy);
  const color = ARROW_COLORS[seg.label] ?? "#ffffff";
  line(ctx, a, b, color, 2.5);
  const ang = Math.atan2(b[1] - a[1], b[0] - a[0]);
  ctx.beginPath();
  ctx.moveTo(b[0], b[1]);
  ctx.lineTo(b[0] - 9 * Math.cos(ang - 0.45), b[1] - 9 * Math.sin(ang - 0.45));
  ctx.lineTo(b[0] - 9 * Math.cos(ang + 0.45), b[1] - 9 * Math.sin(ang + 0.45));
  ctx.closePath();
  ctx.fillStyle = color;
  ctx.fill();
  ctx.font = "11px sans-serif";
  ctx.fillText(`${seg.label} ${seg.magnitude.toFixed(2)} N`, b[0] + 6, b[1] - 4);
}

function drawFriction(ctx: CanvasRenderingContext2D, snap: SnapshotMessage,
                      view: ViewState, cx: number, cy: number): void {
  const theta = snap.bodies["theta"] as number;
  const half = snap.bodies["track_half_length"] as number;
  const u: Vec3 = [Math.cos(theta), Math.sin(theta), 0];
  const a = project(view, [-u[0] * half, -u[1] * half, 0], cx, cy);
  const b = project(view, [u[0] * half, u[1] * half, 0], cx, cy);
  line(ctx, a, b, "#3d4a5c", 6);
  const block = v3(snap.bodies["block_pos"]);
  dot(ctx, project(view, block, cx, cy), 10, snap.bodies["grabbed"] ? "#5cb85c" : "#d8dee9");
  dot(ctx, project(view, v3(snap.bodies["pointer"]), cx, cy), 4, "#ffcc00");
}

function drawCoriolis(ctx: CanvasRenderingContext2D, snap: SnapshotMessage,
                      view: ViewState, cx: number, cy: number): void {
  const r = snap.bodies["platform_radius"] as number;
  const spin = (snap.hud["platform_omega"] ?? 0) * snap.t;
  ctx.strokeStyle = "#3d4a5c";
  ctx.lineWidth = 2;
  ctx.beginPath();
  for (let i = 0; i <= 64; i++) {
    const a = (i / 64) * 2 * Math.PI;
    const p = project(view, [r * Math.cos(a), r * Math.sin(a), 0], cx, cy);
    if (i === 0) ctx.moveTo(p[0], p[1]);
    else ctx.lineTo(p[0], p[1]);
  }
  ctx.stroke();
  // spin texture: spokes turning with the recorded platform rate
  for (let s = 0; s < 4; s++) {
    const a = spin + (s / 4) * 2 * Math.PI;
    line(ctx, project(view, [0, 0, 0], cx, cy),
         project(view, [r * Math.cos(a), r * Math.sin(a), 0], cx, cy), "#232d3a", 1);
  }
  const goal = v3(snap.bodies["goal_center"]);
  const gr = snap.bodies["goal_radius"] as number;
  ctx.strokeStyle = "#5cb85c";
  ctx.beginPath();
  for (let i = 0; i <= 32; i++) {
    const a = (i / 32) * 2 * Math.PI;
    const p = project(view, [goal[0] + gr * Math.cos(a), goal[1] + gr * Math.sin(a), 0], cx, cy);
    if (i === 0) ctx.moveTo(p[0], p[1]);
    else ctx.lineTo(p[0], p[1]);
  }
  ctx.stroke();
  dot(ctx, project(view, v3(snap.bodies["puck"]), cx, cy), 8,
      snap.bodies["kind"] === "ball" ? "#d8dee9" : "#8fbcbb");
  dot(ctx, project(view, v3(snap.bodies["pointer"]), cx, cy), 4, "#ffcc00");
  const badge = scoreBadge(snap);
  if (badge !== null) {
    ctx.fillStyle = "#5cb85c";
    ctx.font = "bold 18px sans-serif";
    ctx.fillText(`goals ${badge}`, 16, 28);
    ctx.font = "12px sans-serif";
    ctx.fillStyle = "#ccc";
    ctx.fillText(String(snap.bodies["outcome"]), 16, 46);
  }
}

function drawPrecession(ctx: CanvasRenderingContext2D, snap: SnapshotMessage,
                        view: ViewState, cx: number, cy: number): void {
  const axis = v3(snap.bodies["axis"]);
  const d = snap.bodies["handle_half_length"] as number;
  const wr = snap.bodies["wheel_radius"] as number;
  const lh = project(view, [-axis[0] * d, -axis[1] * d, -axis[2] * d], cx, cy);
  const rh = project(view, [axis[0] * d, axis[1] * d, axis[2] * d], cx, cy);
  line(ctx, lh, rh, "#d8dee9", 4);
  // wheel disc: circle in the plane perpendicular to the axis
  let ref: Vec3 = Math.abs(axis[2]) < 0.9 ? [0, 0, 1] : [1, 0, 0];
  const e1 = norm3(cross3(axis, ref));
  const e2 = norm3(cross3(axis, e1));
  ctx.strokeStyle = "#7a8aa0";
  ctx.lineWidth = 3;
  ctx.beginPath();
  for (let i = 0; i <= 48; i++) {
    const a = (i / 48) * 2 * Math.PI;
    const p: Vec3 = [
      wr * (e1[0] * Math.cos(a) + e2[0] * Math.sin(a)),
      wr * (e1[1] * Math.cos(a) + e2[1] * Math.sin(a)),
      wr * (e1[2] * Math.cos(a) + e2[2] * Math.sin(a)),
    ];
    const q = project(view, p, cx, cy);
    if (i === 0) ctx.moveTo(q[0], q[1]);
    else ctx.lineTo(q[0], q[1]);
  }
  ctx.stroke();
  dot(ctx, project(view, v3(snap.bodies["pointer_left"]), cx, cy), 4, "#ffcc00");
  dot(ctx, project(view, v3(snap.bodies["pointer_right"]), cx, cy), 4, "#ff8800");
  if (snap.flags && snap.flags["free_rod"]) {
    ctx.fillStyle = "#f0ad4e";
    ctx.font = "14px sans-serif";
    ctx.fillText("no gyroscopic stiffness (wheel stopped)", 16, 28);
  }
}

function drawHud(ctx: CanvasRenderingContext2D, snap: SnapshotMessage): void {
  const entries = Object.entries(hudStrings(snap.hud));
  ctx.font = "13px ui-monospace, monospace";
  let y = ctx.canvas.height - 12 - 16 * (entries.length - 1);
  for (const [label, text] of entries) {
    ctx.fillStyle = "#9aa7b8";
    ctx.fillText(label.padEnd(20), 16, y);
    ctx.fillStyle = "#e8edf4";
    ctx.fillText(text, 180, y);
    y += 16;
  }
}

function cross3(a: Vec3, b: Vec3): Vec3 {
  return [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
}

function norm3(a: Vec3): Vec3 {
  const n = Math.hypot(a[0], a[1], a[2]) || 1;
  return [a[0] / n, a[1] / n, a[2] / n];
}
