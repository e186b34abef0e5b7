// Keyboard and gamepad state -> correction command stream.
//
// While the stick or arrow keys are deflected the tracker emits one
// correction per tick; releasing emits a single correction_end.

import { makeCorrection, makeSimple } from "./protocol.js";
import type { CommandPayload } from "./types.js";

export const DEADZONE = 0.1;

/** Per-axis deadzone with rescale: (|v| - dz) / (1 - dz), sign kept. */
export function applyDeadzone(v: number, dz: number = DEADZONE): number {
  const mag = Math.abs(v);
  if (mag <= dz) return 0;
  const scaled = (mag - dz) / (1 - dz);
  return Math.sign(v) * Math.min(1, scaled);
}

export interface Axes {
  kx: number;
  ky: number;
}

/** Arrow keys (and WASD) to axes: right = +kx, up = +ky. */
export function keyboardAxes(keys: ReadonlySet<string>): Axes {
  const right = keys.has("ArrowRight") || keys.has("d") ? 1 : 0;
  const left = keys.has("ArrowLeft") || keys.has("a") ? 1 : 0;
  const up = keys.has("ArrowUp") || keys.has("w") ? 1 : 0;
  const down = keys.has("ArrowDown") || keys.has("s") ? 1 : 0;
  return { kx: right - left, ky: up - down };
}

/** Gamepad stick to axes: deadzone per axis, screen-up = +ky. */
export function gamepadAxes(rawX: number, rawY: number): Axes {
  return { kx: applyDeadzone(rawX), ky: applyDeadzone(-rawY) };
}

const clamp1 = (v: number): number => Math.max(-1, Math.min(1, v));

export function mergeAxes(a: Axes, b: Axes): Axes {
  return { kx: clamp1(a.kx + b.kx), ky: clamp1(a.ky + b.ky) };
}

export class CorrectionStream {
  private deflected = false;

  /** Commands to send this tick for the current deflection. */
  step(axes: Axes): CommandPayload[] {
    const active = axes.kx !== 0 || axes.ky !== 0;
    if (active) {
      this.deflected = true;
      return [makeCorrection(axes.kx, axes.ky)];
    }
    if (this.deflected) {
      this.deflected = false;
      return [makeSimple("correction_end")];
    }
    return [];
  }
}
