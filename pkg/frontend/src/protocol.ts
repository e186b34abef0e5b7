// Frame parsing and command construction. Every outgoing command is
// validated against the v1 schema before it is allowed on the wire.

import type { CommandPayload, FrameAxes, ServerFrame, Vec3 } from "./types.js";

export const PROTOCOL_VERSION = 1;

function isFiniteNumber(v: unknown): v is number {
  return typeof v === "number" && Number.isFinite(v);
}

function isNumberArray(v: unknown, n: number): boolean {
  return Array.isArray(v) && v.length === n && v.every(isFiniteNumber);
}

export function isVec3(v: unknown): v is Vec3 {
  return isNumberArray(v, 3);
}

function isFrameAxes(v: unknown): v is FrameAxes {
  if (typeof v !== "object" || v === null) return false;
  const o = v as Record<string, unknown>;
  return isVec3(o.t) && isVec3(o.x) && isVec3(o.y);
}

function isHello(p: Record<string, unknown>): boolean {
  return isFiniteNumber(p.protocol_version) && isFiniteNumber(p.tick_hz);
}

function isCanal(p: Record<string, unknown>): boolean {
  if (!isFiniteNumber(p.N_f)) return false;
  const n = p.N_f as number;
  const lists: [unknown, (x: unknown) => boolean][] = [
    [p.directrix, isVec3],
    [p.radii, isFiniteNumber],
    [p.mean_q, (x) => isNumberArray(x, 4)],
    [p.sigma_q, isFiniteNumber],
    [p.frames, isFrameAxes],
  ];
  return lists.every(([list, check]) =>
    Array.isArray(list) && list.length === n && list.every(check));
}

function isState(p: Record<string, unknown>): boolean {
  const pose = p.pose as Record<string, unknown> | undefined;
  return (
    isFiniteNumber(p.tick) &&
    typeof p.phase === "string" &&
    isFiniteNumber(p.s) &&
    isFiniteNumber(p.d) &&
    typeof p.correcting === "boolean" &&
    isFiniteNumber(p.radius) &&
    pose !== undefined && isVec3(pose.p) && isNumberArray(pose.q, 4) &&
    isFrameAxes(p.frame)
  );
}

/** Parse one incoming text frame; returns null for anything off-schema. */
export function parseServerFrame(raw: string): ServerFrame | null {
  let doc: unknown;
  try {
    doc = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof doc !== "object" || doc === null) return null;
  const frame = doc as { kind?: unknown; payload?: unknown };
  if (typeof frame.kind !== "string" || typeof frame.payload !== "object" ||
      frame.payload === null) {
    return null;
  }
  const payload = frame.payload as Record<string, unknown>;
  switch (frame.kind) {
    case "hello":
      return isHello(payload) ? (doc as ServerFrame) : null;
    case "canal":
      return isCanal(payload) ? (doc as ServerFrame) : null;
    case "state":
      return isState(payload) ? (doc as ServerFrame) : null;
    case "error":
      return typeof payload.code === "string" ? (doc as ServerFrame) : null;
    default:
      return null;
  }
}

const clamp1 = (v: number): number => Math.max(-1, Math.min(1, v));

export function makeCorrection(kx: number, ky: number): CommandPayload {
  return { type: "correction", kx: clamp1(kx), ky: clamp1(ky) };
}

export function makeSimple(
  type: "correction_end" | "backtrack" | "pause" | "resume" | "grip",
): CommandPayload {
  return { type };
}

export function makeSetSpeed(v: number): CommandPayload {
  return { type: "set_speed", v: Math.max(1, Math.round(v)) };
}

/** Schema gate: true only for commands legal to put on the wire. */
export function validateCommand(cmd: unknown): cmd is CommandPayload {
  if (typeof cmd !== "object" || cmd === null) return false;
  const c = cmd as Record<string, unknown>;
  switch (c.type) {
    case "correction":
      return isFiniteNumber(c.kx) && isFiniteNumber(c.ky) &&
        Math.abs(c.kx) <= 1 && Math.abs(c.ky) <= 1;
    case "set_speed":
      return isFiniteNumber(c.v) && c.v >= 1 && Number.isInteger(c.v);
    case "correction_end":
    case "backtrack":
    case "pause":
    case "resume":
    case "grip":
      return true;
    default:
      return false;
  }
}

/** Serialize a command frame; throws rather than emitting an invalid frame. */
export function encodeCommand(cmd: CommandPayload): string {
  if (!validateCommand(cmd)) {
    throw new Error(`refusing to send off-schema command: ${JSON.stringify(cmd)}`);
  }
  return JSON.stringify({ kind: "command", payload: cmd });
}
