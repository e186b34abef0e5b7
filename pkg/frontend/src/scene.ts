// Pure scene construction: canal + latest state -> drawable primitives
// in screen coordinates. No canvas or DOM here, so everything is
// directly unit-testable; rendering happens in render.ts.

import type { CanalPayload, StatePayload, Vec3 } from "./types.js";

export interface View {
  yaw: number;    // rotation about world z, radians
  pitch: number;  // tilt toward the camera, radians
  scale: number;  // world meters -> pixels
  cx: number;     // screen center x
  cy: number;     // screen center y
  ox: number;     // world-space center the view orbits, x
  oy: number;
  oz: number;
}

export type Pt = [number, number];

export type Primitive =
  | { kind: "polyline"; pts: Pt[]; color: string; width: number; close?: boolean }
  | { kind: "arrow"; from: Pt; to: Pt; color: string; width: number }
  | { kind: "dot"; at: Pt; r: number; color: string };

/** Orthographic projection of a world point under the view. */
export function project(p: Vec3, view: View): Pt {
  const x = p[0] - view.ox;
  const y = p[1] - view.oy;
  const z = p[2] - view.oz;
  const cy = Math.cos(view.yaw);
  const sy = Math.sin(view.yaw);
  const cp = Math.cos(view.pitch);
  const sp = Math.sin(view.pitch);
  // yaw about z, then pitch about the screen-x axis
  const rx = cy * x + sy * y;
  const ry = -sy * x + cy * y;
  const u = rx;
  const v = cp * z - sp * ry;
  return [view.cx + view.scale * u, view.cy - view.scale * v];
}

/** Fit the canal's bounding box into the viewport at the given angles. */
export function fitView(canal: CanalPayload, width: number, height: number,
                        yaw = -0.6, pitch = -1.0): View {
  const pts = canal.directrix;
  const lo = [Infinity, Infinity, Infinity];
  const hi = [-Infinity, -Infinity, -Infinity];
  for (const p of pts) {
    for (let i = 0; i < 3; i++) {
      lo[i] = Math.min(lo[i], p[i]);
      hi[i] = Math.max(hi[i], p[i]);
    }
  }
  const rmax = Math.max(...canal.radii);
  const extent = Math.max(hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2], 1e-6) + 2 * rmax;
  const view: View = {
    yaw, pitch,
    scale: 0.42 * Math.min(width, height) / extent,
    cx: width / 2, cy: height / 2,
    ox: (lo[0] + hi[0]) / 2, oy: (lo[1] + hi[1]) / 2, oz: (lo[2] + hi[2]) / 2,
  };
  return view;
}

function add(a: Vec3, b: Vec3, s: number): Vec3 {
  return [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]];
}

function circlePoints(center: Vec3, xAxis: Vec3, yAxis: Vec3, r: number,
                      segments: number, view: View): Pt[] {
  const pts: Pt[] = [];
  for (let i = 0; i < segments; i++) {
    const a = (2 * Math.PI * i) / segments;
    const p = add(add(center, xAxis, r * Math.cos(a)), yAxis, r * Math.sin(a));
    pts.push(project(p, view));
  }
  return pts;
}

export interface SceneOptions {
  diskStride: number;    // draw every k-th disk
  trail: Vec3[];         // breadcrumb of past poses
}

export const COLORS = {
  directrix: "#8fa7c9",
  disk: "#3c4a5e",
  currentDisk: "#e8e8e8",
  xAxis: "#e05555",
  yAxis: "#4fca59",
  marker: "#ffb347",
  trail: "#6b7a90",
};

/** Canal extent used to keep axis arrows visible on shrunken disks. */
function canalExtent(canal: CanalPayload): number {
  let m = 0;
  const a = canal.directrix[0];
  for (const p of canal.directrix) {
    m = Math.max(m, Math.hypot(p[0] - a[0], p[1] - a[1], p[2] - a[2]));
  }
  return Math.max(m, 1e-6);
}

export function buildScene(canal: CanalPayload, state: StatePayload | null,
                           view: View, opts: SceneOptions): Primitive[] {
  const prims: Primitive[] = [];
  prims.push({
    kind: "polyline",
    pts: canal.directrix.map((p) => project(p, view)),
    color: COLORS.directrix,
    width: 1.5,
  });
  for (let s = 0; s < canal.N_f; s += opts.diskStride) {
    const f = canal.frames[s];
    prims.push({
      kind: "polyline",
      pts: circlePoints(canal.directrix[s], f.x, f.y, canal.radii[s], 24, view),
      color: COLORS.disk,
      width: 1,
      close: true,
    });
  }
  for (const p of opts.trail) {
    prims.push({ kind: "dot", at: project(p, view), r: 1.5, color: COLORS.trail });
  }
  if (state !== null) {
    const s = state.s - 1;
    const center = canal.directrix[s];
    const f = state.frame;
    // correcting thickens the highlighted disk outline
    prims.push({
      kind: "polyline",
      pts: circlePoints(center, f.x, f.y, Math.max(state.radius, 1e-6), 48, view),
      color: COLORS.currentDisk,
      width: state.correcting ? 4 : 2,
      close: true,
    });
    const arrowLen = Math.max(state.radius, 0.05 * canalExtent(canal));
    prims.push({
      kind: "arrow",
      from: project(center, view),
      to: project(add(center, f.x, arrowLen), view),
      color: COLORS.xAxis,
      width: 2,
    });
    prims.push({
      kind: "arrow",
      from: project(center, view),
      to: project(add(center, f.y, arrowLen), view),
      color: COLORS.yAxis,
      width: 2,
    });
    prims.push({ kind: "dot", at: project(state.pose.p, view), r: 5, color: COLORS.marker });
  }
  return prims;
}
