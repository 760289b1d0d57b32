import { describe, expect, it } from "vitest";

import { PANEL_SLIDERS, checkParam, paramMessage } from "../src/params.js";

describe("panel sliders", () => {
  it("every lab exposes its tunables", () => {
    expect(PANEL_SLIDERS.friction.map((s) => s.key)).toContain("friction.mu_s");
    expect(PANEL_SLIDERS.coriolis.map((s) => s.key)).toContain("coriolis.omega");
    const keys = PANEL_SLIDERS.precession.map((s) => s.key);
    expect(keys).toContain("precession.spin_rate");        // angular velocity
    expect(keys).toContain("precession.wheel_mass_kg");    // wheel weight
    expect(keys).toContain("precession.handle_half_len_m"); // handle length
  });

  it("spin slider range mirrors the server bound", () => {
    const spin = PANEL_SLIDERS.precession.find((s) => s.key === "precession.spin_rate")!;
    expect(spin.min).toBe(0);
    expect(spin.max).toBe(200);
  });
});

describe("checkParam mirrors server invariants", () => {
  it("blocks mu_k above mu_s with a hint", () => {
    const res = checkParam("friction.mu_k", 0.9, { "friction.mu_s": 0.6 });
    expect(res.ok).toBe(false);
    expect(res.hint).toMatch(/static/);
  });

  it("blocks mu_s below mu_k", () => {
    expect(checkParam("friction.mu_s", 0.1, { "friction.mu_k": 0.3 }).ok).toBe(false);
  });

  it("accepts valid values", () => {
    expect(checkParam("friction.mu_k", 0.3, { "friction.mu_s": 0.6 }).ok).toBe(true);
    expect(checkParam("coriolis.omega", -2.0, {}).ok).toBe(true);
  });

  it("enforces the spin ceiling", () => {
    expect(checkParam("precession.spin_rate", 500, {}).ok).toBe(false);
  });
});

describe("paramMessage", () => {
  it("emits the wire schema with the live key name", () => {
    expect(paramMessage("precession.spin_rate", 100)).toEqual(
      { type: "param", name: "precession.spin_rate", value: 100 });
  });
});
