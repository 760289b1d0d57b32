// Wire schemas for the lab service: snapshots in, pointer/param/control out.
// All physics lives server-side; this module only encodes and decodes.

export const PROTOCOL_VERSION = 1;

export type Vec3 = [number, number, number];

export interface ArrowData {
  origin: Vec3;
  vec: Vec3;
  label: string;
  magnitude_n: number;
}

export interface SnapshotMessage {
  v: number;
  type: "snapshot";
  t: number;
  scenario: string;
  bodies: Record<string, unknown>;
  arrows: ArrowData[];
  hud: Record<string, number>;
  score: number | null;
  flags: Record<string, unknown>;
  arrow_scale: number;
}

export interface AckMessage { v: number; type: "ack"; of: string }
export interface RejectMessage { v: number; type: "reject"; of: string; reason: string }
export interface ErrorMessage { v: number; type: "error"; reason: string }

export type ServerMessage = SnapshotMessage | AckMessage | RejectMessage | ErrorMessage;

export type ClientMessage =
  | { type: "pointer"; pos: Vec3; device: 0 | 1 }
  | { type: "param"; name: string; value: number | boolean }
  | { type: "scenario"; name: string; variant?: string }
  | { type: "reset" };

export function decodeServerMessage(text: string): ServerMessage | null {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch {
    return null;
  }
  if (typeof raw !== "object" || raw === null) return null;
  const msg = raw as Record<string, unknown>;
  if (msg.v !== PROTOCOL_VERSION) return null;
  switch (msg.type) {
    case "snapshot": {
      if (typeof msg.t !== "number" || typeof msg.scenario !== "string") return null;
      if (!Array.isArray(msg.arrows)) return null;
      return msg as unknown as SnapshotMessage;
    }
    case "ack":
    case "reject":
    case "error":
      return msg as unknown as ServerMessage;
    default:
      return null;
  }
}

export function encodeClientMessage(msg: ClientMessage): string {
  return JSON.stringify(msg);
}

// Keeps only frames that move time forward; stale or duplicate frames drop.
export class SnapshotGate {
  private lastT = -Infinity;
  private lastScenario = "";

  accept(snap: SnapshotMessage): boolean {
    if (snap.scenario !== this.lastScenario) {
      this.lastScenario = snap.scenario;
      this.lastT = snap.t;
      return true;
    }
    if (snap.t <= this.lastT) return false;
    this.lastT = snap.t;
    return true;
  }
}
