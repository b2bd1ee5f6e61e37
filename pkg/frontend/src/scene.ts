/** Client-side scene state: points, segments, trail, arrows, latest record.

Holds only what the server sent.  Locked control points are kept for
rendering but are never draggable, and the segment geometry used for
drawing always comes from the server's point set.
*/

import { TrailBuffer } from "./trail.js";
import {
  FieldFrameMsg,
  PointInfo,
  RecordMsg,
  SegmentSpec,
  ServerMsg,
  SessionMode,
  SnapshotMsg,
  StepRecord,
} from "./types.js";

export interface HandleHit {
  point: PointInfo;
  distancePx: number;
}

const HIT_RADIUS_PX = 12;

export class SceneModel {
  sessionId = "";
  mode: SessionMode = "paused";
  step = 0;
  multiplier = 1;
  splineVersion = -1;
  degree = 5;
  points: PointInfo[] = [];
  segments: SegmentSpec[] = [];
  record: StepRecord | null = null;
  trail = new TrailBuffer(10000);
  arrows: [number, number, number, number][] = [];
  warnings: string[] = [];
  guidance = { k1: 0.5, k2: 0.5, k_theta: 3.0, direction: 1 };
  setpoint = { v_min: 1.7, v_max: 2.7, c_kappa: 10.0 };
  /** Local overrides while a drag is in flight: key "seg:idx" -> (x, y). */
  dragOverrides = new Map<string, { x: number; y: number }>();
  /** Key of the handle being dragged; its override survives server updates. */
  activeDragKey: string | null = null;

  /** Drop stale drag overrides once the server has spoken. */
  private settleOverrides(): void {
    for (const key of [...this.dragOverrides.keys()]) {
      if (key !== this.activeDragKey) this.dragOverrides.delete(key);
    }
  }

  apply(msg: ServerMsg): void {
    switch (msg.type) {
      case "snapshot":
        this.applySnapshot(msg);
        break;
      case "record":
        this.applyRecord(msg);
        break;
      case "spline":
        this.splineVersion = msg.spline_version;
        this.points = msg.points;
        this.segments = msg.segments;
        this.settleOverrides();
        break;
      case "status":
        this.mode = msg.mode;
        this.step = msg.step;
        this.multiplier = msg.multiplier;
        this.points = msg.points;
        this.guidance = msg.guidance;
        this.setpoint = msg.setpoint;
        if (msg.spline_version !== this.splineVersion) {
          this.splineVersion = msg.spline_version;
          this.rebuildSegmentsFromPoints();
        }
        break;
      case "gap":
        this.trail.markGap();
        break;
      case "field_frame":
        this.applyFieldFrame(msg);
        break;
      default:
        break;
    }
  }

  private applySnapshot(msg: SnapshotMsg): void {
    this.sessionId = msg.id;
    this.mode = msg.mode;
    this.step = msg.step;
    this.multiplier = msg.multiplier;
    this.splineVersion = msg.spline_version;
    this.points = msg.points;
    this.warnings = msg.warnings;
    this.guidance = msg.guidance;
    this.setpoint = msg.setpoint;
    this.degree = msg.scenario.spline.degree ?? 5;
    this.rebuildSegmentsFromPoints();
    this.trail.clear();
    this.record = msg.record;
    if (msg.record) this.trail.push(msg.record.x, msg.record.y);
  }

  private applyRecord(msg: RecordMsg): void {
    this.step = msg.step;
    this.record = msg.record;
    this.trail.push(msg.record.x, msg.record.y);
    if (msg.spline_version !== this.splineVersion) {
      this.splineVersion = msg.spline_version;
      this.points = msg.points;
      this.rebuildSegmentsFromPoints();
      this.settleOverrides();
    } else {
      this.points = msg.points;
    }
  }

  applyFieldFrame(msg: FieldFrameMsg): void {
    this.arrows = msg.rows;
  }

  /** Segment point lists reassembled from the flat indexed point set. */
  rebuildSegmentsFromPoints(): void {
    const bySegment = new Map<number, PointInfo[]>();
    for (const p of this.points) {
      const list = bySegment.get(p.segment) ?? [];
      list.push(p);
      bySegment.set(p.segment, list);
    }
    const segments: SegmentSpec[] = [];
    const ids = [...bySegment.keys()].sort((a, b) => a - b);
    for (const s of ids) {
      const pts = bySegment.get(s)!.sort((a, b) => a.index - b.index);
      segments.push({ points: pts.map((p) => [p.x, p.y]) });
    }
    this.segments = segments;
  }

  /** Effective position of a control point, honoring an in-flight drag. */
  pointPosition(p: PointInfo): { x: number; y: number } {
    const override = this.dragOverrides.get(`${p.segment}:${p.index}`);
    return override ?? { x: p.x, y: p.y };
  }

  /** Nearest handle (any role) within the pick radius, draggables first. */
  hitTest(
    screenX: number,
    screenY: number,
    worldToScreen: (x: number, y: number) => { x: number; y: number },
  ): HandleHit | null {
    let best: HandleHit | null = null;
    for (const p of this.points) {
      const pos = this.pointPosition(p);
      const s = worldToScreen(pos.x, pos.y);
      const d = Math.hypot(s.x - screenX, s.y - screenY);
      if (d > HIT_RADIUS_PX) continue;
      const draggable = p.role !== "continuity_locked";
      if (
        best === null ||
        (draggable && best.point.role === "continuity_locked") ||
        (draggable === (best.point.role !== "continuity_locked") && d < best.distancePx)
      ) {
        best = { point: p, distancePx: d };
      }
    }
    return best;
  }
}
