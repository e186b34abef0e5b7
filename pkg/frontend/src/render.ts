// Canvas 2D rendering of scene primitives.

import type { Primitive, Pt } from "./scene.js";

function arrowHead(ctx: CanvasRenderingContext2D, from: Pt, to: Pt, color: string): void {
  const dx = to[0] - from[0];
  const dy = to[1] - from[1];
  const len = Math.hypot(dx, dy);
  if (len < 1e-6) return;
  const ux = dx / len;
  const uy = dy / len;
  const size = Math.min(10, 0.35 * len);
  ctx.beginPath();
  ctx.moveTo(to[0], to[1]);
  ctx.lineTo(to[0] - size * (ux + 0.5 * uy), to[1] - size * (uy - 0.5 * ux));
  ctx.lineTo(to[0] - size * (ux - 0.5 * uy), to[1] - size * (uy + 0.5 * ux));
  ctx.closePath();
  ctx.fillStyle = color;
  ctx.fill();
}

export function drawScene(ctx: CanvasRenderingContext2D, prims: Primitive[],
                          width: number, height: number): void {
  ctx.clearRect(0, 0, width, height);
  for (const prim of prims) {
    switch (prim.kind) {
      case "polyline": {
        if (prim.pts.length < 2) break;
        ctx.beginPath();
        ctx.moveTo(prim.pts[0][0], prim.pts[0][1]);
        for (let i = 1; i < prim.pts.length; i++) {
          ctx.lineTo(prim.pts[i][0], prim.pts[i][1]);
        }
        if (prim.close) ctx.closePath();
        ctx.strokeStyle = prim.color;
        ctx.lineWidth = prim.width;
        ctx.stroke();
        break;
      }
      case "arrow": {
        ctx.beginPath();
        ctx.moveTo(prim.from[0], prim.from[1]);
        ctx.lineTo(prim.to[0], prim.to[1]);
        ctx.strokeStyle = prim.color;
        ctx.lineWidth = prim.width;
        ctx.stroke();
        arrowHead(ctx, prim.from, prim.to, prim.color);
        break;
      }
      case "dot": {
        ctx.beginPath();
        ctx.arc(prim.at[0], prim.at[1], prim.r, 0, 2 * Math.PI);
        ctx.fillStyle = prim.color;
        ctx.fill();
        break;
      }
    }
  }
}
