// Scene layout: snapshot -> drawable primitives. Pure geometry so the render
// path is testable without a canvas; painting happens in render.ts.

import type { ArrowData, SnapshotMessage, Vec3 } from "./protocol.js";

export interface ViewState {
  orbit: number;        // rad, driven by the disk widget
  elevation: number;    // rad
  zoom: number;         // canvas px per scene m
  arrowScale: number;   // scene m of drawn arrow per newton
}

export function defaultView(): ViewState {
  return { orbit: 0.6, elevation: 0.45, zoom: 320, arrowScale: 0.02 };
}

// Orthographic orbit projection: scene (x, y, z) -> canvas px (right, down).
export function project(view: ViewState, p: Vec3, cx: number, cy: number): [number, number] {
  const co = Math.cos(view.orbit), so = Math.sin(view.orbit);
  const ce = Math.cos(view.elevation), se = Math.sin(view.elevation);
  const rx = p[0] * co + p[2] * so;
  const rz = -p[0] * so + p[2] * co;
  const ry = p[1] * ce - rz * se;
  return [cx + rx * view.zoom, cy - ry * view.zoom];
}

export interface ArrowSegment {
  from: Vec3;           // scene coords
  to: Vec3;
  label: string;
  lengthScene: number;  // = magnitude_n * arrowScale, the drawn length in scene m
  magnitude: number;
}

// One segment per snapshot arrow; zero-magnitude arrows are omitted (hidden).
export function layoutArrows(arrows: ArrowData[], view: ViewState): ArrowSegment[] {
  const out: ArrowSegment[] = [];
  for (const a of arrows) {
    const mag = Math.hypot(a.vec[0], a.vec[1], a.vec[2]);
    if (a.magnitude_n === 0 || mag === 0) continue;
    const len = a.magnitude_n * view.arrowScale;
    const unit: Vec3 = [a.vec[0] / mag, a.vec[1] / mag, a.vec[2] / mag];
    out.push({
      from: a.origin,
      to: [a.origin[0] + unit[0] * len, a.origin[1] + unit[1] * len, a.origin[2] + unit[2] * len],
      label: a.label,
      lengthScene: len,
      magnitude: a.magnitude_n,
    });
  }
  return out;
}

// HUD text is the snapshot value formatted to two decimals, nothing else:
// the panel must never run physics of its own.
export function hudStrings(hud: Record<string, number>): Record<string, string> {
  const out: Record<string, string> = {};
  for (const [label, value] of Object.entries(hud)) {
    out[label] = value.toFixed(2);
  }
  return out;
}

export function scoreBadge(snap: SnapshotMessage): string | null {
  if (snap.score === null || snap.score === undefined) return null;
  const attempts = snap.bodies["attempts"];
  if (typeof attempts === "number") return `${snap.score} / ${attempts}`;
  return String(snap.score);
}

export const SUPPORTED_SCENARIOS = ["friction", "coriolis", "precession"] as const;

export function isSupportedScenario(name: string): boolean {
  return (SUPPORTED_SCENARIOS as readonly string[]).includes(name);
}
