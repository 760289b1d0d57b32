import { describe, expect, it } from "vitest";

import { PointerThrottle, bindingFor, dragToNormalized, pointerMessage } from "../src/pointer.js";
import type { ClientMessage } from "../src/protocol.js";

const RECT = { left: 10, top: 20, width: 400, height: 300 };

describe("dragToNormalized", () => {
  it("centre maps to the origin", () => {
    expect(dragToNormalized(210, 170, RECT)).toEqual([0, -0, 0]);
  });

  it("corners map to exactly +-1", () => {
    expect(dragToNormalized(410, 20, RECT)).toEqual([1, 1, 0]);
    expect(dragToNormalized(10, 320, RECT)).toEqual([-1, -1, 0]);
    expect(dragToNormalized(410, 320, RECT)).toEqual([1, -1, 0]);
    expect(dragToNormalized(10, 20, RECT)).toEqual([-1, 1, 0]);
  });

  it("clamps outside the canvas", () => {
    expect(dragToNormalized(9999, -9999, RECT)).toEqual([1, 1, 0]);
  });

  it("screen y down is scene y up", () => {
    const [, ny] = dragToNormalized(210, 20, RECT); // top edge
    expect(ny).toBe(1);
  });
});

describe("bindingFor", () => {
  it("each lab drags in its own plane", () => {
    expect(bindingFor("friction").plane).toBe("incline");
    expect(bindingFor("coriolis").plane).toBe("platform");
    expect(bindingFor("precession").plane).toBe("handles");
  });

  it("modifier selects the second hand only in the two-device lab", () => {
    expect(bindingFor("precession", true).device).toBe(1);
    expect(bindingFor("precession", false).device).toBe(0);
    expect(bindingFor("friction", true).device).toBe(0);
  });
});

describe("pointerMessage", () => {
  it("emits the wire schema", () => {
    const msg = pointerMessage(410, 320, RECT, bindingFor("coriolis"));
    expect(msg).toEqual({ type: "pointer", pos: [1, -1, 0], device: 0 });
  });
});

describe("PointerThrottle", () => {
  it("sends at most once per animation frame, newest wins", () => {
    const sent: ClientMessage[] = [];
    const frames: Array<() => void> = [];
    const throttle = new PointerThrottle((m) => sent.push(m), (f) => frames.push(f));

    const msg = (x: number): ClientMessage => ({ type: "pointer", pos: [x, 0, 0], device: 0 });
    throttle.move(msg(0.1));
    throttle.move(msg(0.2));
    throttle.move(msg(0.3));
    expect(sent).toEqual([]);
    expect(frames.length).toBe(1);

    frames[0]();
    expect(sent).toEqual([msg(0.3)]);

    throttle.move(msg(0.4));
    expect(frames.length).toBe(2);
    frames[1]();
    expect(sent).toEqual([msg(0.3), msg(0.4)]);
  });
});
