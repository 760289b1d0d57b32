// Mouse/touch drag -> normalized pointer messages: the mouse stands in for
// the haptic stylus, one message per animation frame at most.

import type { ClientMessage, Vec3 } from "./protocol.js";

export interface PointerBinding {
  scenario: string;
  plane: string;        // which scene plane the 2-D drag spans
  device: 0 | 1;
}

export function bindingFor(scenario: string, modifierHeld = false): PointerBinding {
  switch (scenario) {
    case "friction":
      return { scenario, plane: "incline", device: 0 };
    case "coriolis":
      return { scenario, plane: "platform", device: 0 };
    case "precession":
      // second hand on the modifier key; no special hardware needed
      return { scenario, plane: "handles", device: modifierHeld ? 1 : 0 };
    default:
      return { scenario, plane: "none", device: 0 };
  }
}

function clamp(v: number): number {
  return Math.min(1, Math.max(-1, v));
}

export interface CanvasRect {
  left: number;
  top: number;
  width: number;
  height: number;
}

// Canvas pixel -> [-1, 1]^3 with screen-y flipped to scene-y; the drag plane
// leaves the third component at 0.
export function dragToNormalized(x: number, y: number, rect: CanvasRect): Vec3 {
  const nx = clamp((x - rect.left - rect.width / 2) / (rect.width / 2));
  const ny = clamp(-(y - rect.top - rect.height / 2) / (rect.height / 2));
  return [nx, ny, 0];
}

export function pointerMessage(x: number, y: number, rect: CanvasRect,
                               binding: PointerBinding): ClientMessage {
  return { type: "pointer", pos: dragToNormalized(x, y, rect), device: binding.device };
}

// Collapses a burst of moves into one message per animation frame.
export class PointerThrottle {
  private pending: ClientMessage | null = null;
  private armed = false;

  constructor(private send: (msg: ClientMessage) => void,
              private schedule: (flush: () => void) => void) {}

  move(msg: ClientMessage): void {
    this.pending = msg;
    if (!this.armed) {
      this.armed = true;
      this.schedule(() => this.flush());
    }
  }

  flush(): void {
    this.armed = false;
    if (this.pending !== null) {
      this.send(this.pending);
      this.pending = null;
    }
  }
}
