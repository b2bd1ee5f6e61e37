/** Drag controller for control-point handles.

Free points and endpoints stream debounced move commands while dragging;
the locked points never produce a command, only a lock notice.  On server
rejection the handle snaps back to the last authoritative position.
*/

import { RateLimiter } from "./ratelimit.js";
import { SceneModel } from "./scene.js";
import { SessionClient } from "./session.js";
import { MoveCommand, PointInfo } from "./types.js";

export interface DragCallbacks {
  onLockedAttempt?: (p: PointInfo) => void;
  onRejected?: (p: PointInfo, reason: string) => void;
  onMoved?: (p: PointInfo) => void;
}

export class DragController {
  private active: PointInfo | null = null;
  private limiter: RateLimiter<MoveCommand>;
  commandsSent = 0;

  constructor(
    private readonly scene: SceneModel,
    private readonly client: SessionClient,
    private readonly callbacks: DragCallbacks = {},
    intervalMs = 50,
    now?: () => number,
  ) {
    this.limiter = new RateLimiter<MoveCommand>(
      (cmd) => this.dispatch(cmd),
      intervalMs,
      now,
    );
  }

  private dispatch(cmd: MoveCommand): void {
    this.commandsSent += 1;
    const key = `${cmd.segment}:${cmd.index}`;
    const point = this.active ?? this.findPoint(cmd.segment, cmd.index);
    this.client.command(cmd).then((outcome) => {
      if (!outcome.ok) {
        // snap back: drop the local position and abandon the drag
        if (this.active !== null && `${this.active.segment}:${this.active.index}` === key) {
          this.cancel();
        }
        this.scene.dragOverrides.delete(key);
        if (point && this.callbacks.onRejected) {
          this.callbacks.onRejected(point, outcome.error?.reason ?? "rejected");
        }
        return;
      }
      // acknowledged: the authoritative spline precedes the ack, so once
      // the drag is over this handle the local override is redundant
      if (this.scene.activeDragKey !== key) {
        this.scene.dragOverrides.delete(key);
      }
      if (point && this.callbacks.onMoved) this.callbacks.onMoved(point);
    });
  }

  private findPoint(segment: number, index: number): PointInfo | null {
    return (
      this.scene.points.find((p) => p.segment === segment && p.index === index) ?? null
    );
  }

  get dragging(): boolean {
    return this.active !== null;
  }

  /** Pointer-down on a handle; returns whether a drag actually began. */
  begin(point: PointInfo): boolean {
    if (point.role === "continuity_locked") {
      if (this.callbacks.onLockedAttempt) this.callbacks.onLockedAttempt(point);
      return false;
    }
    this.active = point;
    this.scene.activeDragKey = `${point.segment}:${point.index}`;
    return true;
  }

  /** Pointer move in world coordinates while a drag is active. */
  move(x: number, y: number): void {
    if (this.active === null) return;
    const p = this.active;
    this.scene.dragOverrides.set(`${p.segment}:${p.index}`, { x, y });
    this.limiter.submit({ kind: "move_free_point", segment: p.segment, index: p.index, x, y });
  }

  /** Pointer-up: flush the final position.

  The local override stays in place until the server's recomputed spline
  arrives, so the handle never flickers back to its pre-drag position.
  */
  end(): void {
    if (this.active === null) return;
    this.scene.activeDragKey = null;
    this.active = null;
    this.limiter.flush();
  }

  cancel(): void {
    if (this.active !== null) {
      this.scene.dragOverrides.delete(`${this.active.segment}:${this.active.index}`);
    }
    this.limiter.cancel();
    this.scene.activeDragKey = null;
    this.active = null;
  }
}
