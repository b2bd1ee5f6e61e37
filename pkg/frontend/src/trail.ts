/** Fixed-capacity ring buffer for the rover trace, with gap markers.

Dropped stream records must show as breaks in the trail, so each slot
carries a "starts a new stroke" flag alongside the position.
*/

export class TrailBuffer {
  private xs: Float64Array;
  private ys: Float64Array;
  private breaks: Uint8Array;
  private head = 0; // next write slot
  private count = 0;
  private pendingBreak = true; // first point always starts a stroke

  constructor(readonly capacity = 10000) {
    this.xs = new Float64Array(capacity);
    this.ys = new Float64Array(capacity);
    this.breaks = new Uint8Array(capacity);
  }

  get length(): number {
    return this.count;
  }

  push(x: number, y: number): void {
    this.xs[this.head] = x;
    this.ys[this.head] = y;
    this.breaks[this.head] = this.pendingBreak ? 1 : 0;
    this.pendingBreak = false;
    this.head = (this.head + 1) % this.capacity;
    if (this.count < this.capacity) this.count += 1;
  }

  /** The next pushed point starts a new stroke (after a stream gap). */
  markGap(): void {
    this.pendingBreak = true;
  }

  clear(): void {
    this.head = 0;
    this.count = 0;
    this.pendingBreak = true;
  }

  /** Oldest-to-newest traversal. */
  forEach(fn: (x: number, y: number, startsStroke: boolean) => void): void {
    const start = (this.head - this.count + this.capacity) % this.capacity;
    for (let k = 0; k < this.count; k += 1) {
      const i = (start + k) % this.capacity;
      // the oldest retained point starts a stroke even if it did not originally
      fn(this.xs[i], this.ys[i], k === 0 || this.breaks[i] === 1);
    }
  }

  points(): { x: number; y: number; startsStroke: boolean }[] {
    const out: { x: number; y: number; startsStroke: boolean }[] = [];
    this.forEach((x, y, s) => out.push({ x, y, startsStroke: s }));
    return out;
  }
}
