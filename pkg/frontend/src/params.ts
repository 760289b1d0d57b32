// Parameter sliders: ranges mirror the server-side invariants so obviously
// bad values never leave the panel; the server still has the final word and
// a rejection reverts the control.

import type { ClientMessage } from "./protocol.js";

export interface SliderSpec {
  key: string;
  label: string;
  min: number;
  max: number;
  step: number;
}

export const PANEL_SLIDERS: Record<string, SliderSpec[]> = {
  friction: [
    { key: "friction.theta_deg", label: "incline angle (deg)", min: 0, max: 89, step: 1 },
    { key: "friction.mu_s", label: "static friction", min: 0, max: 1.5, step: 0.01 },
    { key: "friction.mu_k", label: "kinetic friction", min: 0, max: 1.5, step: 0.01 },
    { key: "friction.mass_kg", label: "mass (kg)", min: 0.1, max: 10, step: 0.1 },
  ],
  coriolis: [
    { key: "coriolis.omega", label: "platform spin (rad/s)", min: -5, max: 5, step: 0.1 },
    { key: "coriolis.drag", label: "surface drag", min: 0, max: 5, step: 0.1 },
    { key: "coriolis.haptic_gain", label: "deflection feel", min: 0, max: 3, step: 0.1 },
  ],
  precession: [
    { key: "precession.spin_rate", label: "wheel spin (rad/s)", min: 0, max: 200, step: 1 },
    { key: "precession.wheel_mass_kg", label: "wheel weight (kg)", min: 0.1, max: 5, step: 0.1 },
    { key: "precession.handle_half_len_m", label: "handle length (m)", min: 0.05, max: 0.5, step: 0.01 },
  ],
};

export interface ParamCheck {
  ok: boolean;
  hint?: string;
}

// Client-side mirror of the cross-field invariants the server enforces.
export function checkParam(key: string, value: number,
                           current: Record<string, number>): ParamCheck {
  if (key === "friction.mu_k" && value > (current["friction.mu_s"] ?? Infinity)) {
    return { ok: false, hint: "kinetic friction cannot exceed static friction" };
  }
  if (key === "friction.mu_s" && value < (current["friction.mu_k"] ?? 0)) {
    return { ok: false, hint: "static friction cannot drop below kinetic friction" };
  }
  if (key === "precession.spin_rate" && (value < 0 || value > 200)) {
    return { ok: false, hint: "spin rate is limited to [0, 200] rad/s" };
  }
  return { ok: true };
}

export function paramMessage(key: string, value: number | boolean): ClientMessage {
  return { type: "param", name: key, value };
}
