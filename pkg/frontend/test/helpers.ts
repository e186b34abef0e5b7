// Shared payload builders for tests.

import type { CanalPayload, StatePayload, Vec3 } from "../src/types.js";

export function straightCanal(n = 40, radius = 0.25): CanalPayload {
  const directrix: Vec3[] = [];
  for (let i = 0; i < n; i++) {
    directrix.push([0, 0, i / (n - 1)]);
  }
  return {
    N_f: n,
    directrix,
    radii: new Array(n).fill(radius),
    mean_q: new Array(n).fill([1, 0, 0, 0]),
    sigma_q: new Array(n).fill(0.2),
    frames: new Array(n).fill({ t: [0, 0, 1], x: [1, 0, 0], y: [0, 1, 0] }),
    meta: { N_f: n, r_min: 1e-4, source_demo_ids: ["a", "b"] },
  };
}

export function stateAt(canal: CanalPayload, s: number,
                        opts: Partial<StatePayload> = {}): StatePayload {
  const c = canal.directrix[s - 1];
  return {
    tick: 0,
    phase: "to_place",
    s,
    d: (2 * (s - 1)) / (canal.N_f - 1) - 1,
    pose: { p: [c[0], c[1], c[2]], q: [1, 0, 0, 0] },
    correcting: false,
    radius: canal.radii[s - 1],
    frame: canal.frames[s - 1],
    ...opts,
  };
}

export function wire(kind: string, payload: unknown): string {
  return JSON.stringify({ kind, payload });
}
