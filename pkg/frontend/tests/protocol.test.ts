import { describe, expect, it } from "vitest";

import { SnapshotGate, decodeServerMessage, encodeClientMessage } from "../src/protocol.js";
import type { SnapshotMessage } from "../src/protocol.js";

function snap(t: number, scenario = "friction"): SnapshotMessage {
  return { v: 1, type: "snapshot", t, scenario, bodies: {}, arrows: [], hud: {},
           score: null, flags: {}, arrow_scale: 0.02 };
}

describe("decodeServerMessage", () => {
  it("accepts a well-formed snapshot", () => {
    const msg = decodeServerMessage(JSON.stringify(snap(0.5)));
    expect(msg).not.toBeNull();
    expect(msg!.type).toBe("snapshot");
  });

  it("rejects unknown protocol versions", () => {
    const bad = { ...snap(0.5), v: 2 };
    expect(decodeServerMessage(JSON.stringify(bad))).toBeNull();
  });

  it("rejects garbage and unknown types", () => {
    expect(decodeServerMessage("nonsense")).toBeNull();
    expect(decodeServerMessage("[1,2]")).toBeNull();
    expect(decodeServerMessage(JSON.stringify({ v: 1, type: "warp" }))).toBeNull();
  });

  it("passes ack/reject/error through", () => {
    const rej = decodeServerMessage(JSON.stringify({ v: 1, type: "reject", of: "param", reason: "no" }));
    expect(rej!.type).toBe("reject");
  });
});

describe("SnapshotGate", () => {
  it("drops stale and duplicate frames", () => {
    const gate = new SnapshotGate();
    expect(gate.accept(snap(0.1))).toBe(true);
    expect(gate.accept(snap(0.2))).toBe(true);
    expect(gate.accept(snap(0.2))).toBe(false);
    expect(gate.accept(snap(0.15))).toBe(false);
    expect(gate.accept(snap(0.3))).toBe(true);
  });

  it("resets on scenario switch so time may restart", () => {
    const gate = new SnapshotGate();
    expect(gate.accept(snap(5.0, "friction"))).toBe(true);
    expect(gate.accept(snap(0.0, "coriolis"))).toBe(true);
    expect(gate.accept(snap(0.0, "coriolis"))).toBe(false);
  });
});

describe("encodeClientMessage", () => {
  it("round-trips the pointer schema", () => {
    const text = encodeClientMessage({ type: "pointer", pos: [1, -1, 0], device: 0 });
    expect(JSON.parse(text)).toEqual({ type: "pointer", pos: [1, -1, 0], device: 0 });
  });
});
