/** Canvas rendering of the map view: hulls, path, trail, arrows, handles. */

import { convexHull, sampleSegment, XY } from "./geometry.js";
import { SceneModel } from "./scene.js";
import { ViewTransform } from "./transform.js";

const COLORS = {
  hullFill: "rgba(120, 160, 220, 0.08)",
  hullEdge: "rgba(120, 160, 220, 0.35)",
  path: "#33b349",
  trail: "#3b7ddd",
  arrow: "#d64545",
  endpoint: "#2458c5",
  free: "#2458c5",
  locked: "#8d93a0",
  rover: "#e8a020",
  dragging: "#f2c14e",
};

export function drawScene(
  ctx: CanvasRenderingContext2D,
  scene: SceneModel,
  view: ViewTransform,
  options: { showHulls: boolean; showArrows: boolean },
): void {
  ctx.clearRect(0, 0, view.width, view.height);

  // convex hulls of each segment's control polygon
  if (options.showHulls) {
    for (const seg of scene.segments) {
      const hull = convexHull(seg.points as XY[]);
      if (hull.length < 3) continue;
      ctx.beginPath();
      hull.forEach(([x, y], i) => {
        const s = view.worldToScreen(x, y);
        if (i === 0) ctx.moveTo(s.x, s.y);
        else ctx.lineTo(s.x, s.y);
      });
      ctx.closePath();
      ctx.fillStyle = COLORS.hullFill;
      ctx.strokeStyle = COLORS.hullEdge;
      ctx.lineWidth = 1;
      ctx.fill();
      ctx.stroke();
    }
  }

  // desired path
  ctx.strokeStyle = COLORS.path;
  ctx.lineWidth = 2;
  ctx.beginPath();
  for (const seg of scene.segments) {
    sampleSegment(seg.points as XY[]).forEach(([x, y], i) => {
      const s = view.worldToScreen(x, y);
      if (i === 0) ctx.moveTo(s.x, s.y);
      else ctx.lineTo(s.x, s.y);
    });
  }
  ctx.stroke();

  // field arrows at the current parameter
  if (options.showArrows && scene.arrows.length > 0) {
    ctx.strokeStyle = COLORS.arrow;
    ctx.lineWidth = 1;
    const len = 14;
    for (const [x, y, ux, uy] of scene.arrows) {
      if (ux === 0 && uy === 0) continue;
      const s = view.worldToScreen(x, y);
      const tipX = s.x + ux * len;
      const tipY = s.y - uy * len;
      ctx.beginPath();
      ctx.moveTo(s.x, s.y);
      ctx.lineTo(tipX, tipY);
      ctx.moveTo(tipX, tipY);
      ctx.lineTo(tipX - (ux * 0.35 + uy * 0.25) * len * 0.5, tipY + (uy * 0.35 - ux * 0.25) * len * 0.5);
      ctx.moveTo(tipX, tipY);
      ctx.lineTo(tipX - (ux * 0.35 - uy * 0.25) * len * 0.5, tipY + (uy * 0.35 + ux * 0.25) * len * 0.5);
      ctx.stroke();
    }
  }

  // rover trail with gap breaks
  ctx.strokeStyle = COLORS.trail;
  ctx.lineWidth = 1.6;
  ctx.beginPath();
  scene.trail.forEach((x, y, startsStroke) => {
    const s = view.worldToScreen(x, y);
    if (startsStroke) ctx.moveTo(s.x, s.y);
    else ctx.lineTo(s.x, s.y);
  });
  ctx.stroke();

  // control points: diamonds, locked ones muted and inert
  for (const p of scene.points) {
    const pos = scene.pointPosition(p);
    const s = view.worldToScreen(pos.x, pos.y);
    const r = p.role === "endpoint" ? 7 : 5.5;
    const key = `${p.segment}:${p.index}`;
    ctx.beginPath();
    ctx.moveTo(s.x, s.y - r);
    ctx.lineTo(s.x + r, s.y);
    ctx.lineTo(s.x, s.y + r);
    ctx.lineTo(s.x - r, s.y);
    ctx.closePath();
    if (scene.dragOverrides.has(key)) {
      ctx.fillStyle = COLORS.dragging;
    } else if (p.role === "continuity_locked") {
      ctx.fillStyle = COLORS.locked;
    } else {
      ctx.fillStyle = p.role === "endpoint" ? COLORS.endpoint : COLORS.free;
    }
    ctx.globalAlpha = p.role === "continuity_locked" ? 0.55 : 1.0;
    ctx.fill();
    ctx.globalAlpha = 1.0;
  }

  // rover marker oriented by heading
  if (scene.record) {
    const { x, y, theta } = scene.record;
    const s = view.worldToScreen(x, y);
    const size = 9;
    ctx.fillStyle = COLORS.rover;
    ctx.beginPath();
    ctx.moveTo(s.x + size * Math.cos(-theta), s.y + size * Math.sin(-theta));
    ctx.lineTo(s.x + size * 0.6 * Math.cos(-theta + 2.5), s.y + size * 0.6 * Math.sin(-theta + 2.5));
    ctx.lineTo(s.x + size * 0.6 * Math.cos(-theta - 2.5), s.y + size * 0.6 * Math.sin(-theta - 2.5));
    ctx.closePath();
    ctx.fill();
  }
}
