/** Trailing-edge rate limiter for drag streams.

The first submission goes out immediately; while throttled, only the most
recent payload is kept and flushed when the interval elapses.  At the
default 50 ms interval a continuous drag emits at most 20 commands per
second and the final position is never lost.
*/

export class RateLimiter<T> {
  private last = -Infinity;
  private pending: T | null = null;
  private timer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private readonly send: (payload: T) => void,
    private readonly intervalMs = 50,
    private readonly now: () => number = () => Date.now(),
  ) {}

  submit(payload: T): void {
    const t = this.now();
    if (t - this.last >= this.intervalMs && this.timer === null) {
      this.last = t;
      this.send(payload);
      return;
    }
    this.pending = payload;
    if (this.timer === null) {
      const wait = Math.max(this.intervalMs - (t - this.last), 0);
      this.timer = setTimeout(() => this.flush(), wait);
    }
  }

  /** Emit the held payload immediately, if any. */
  flush(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    if (this.pending !== null) {
      this.last = this.now();
      const p = this.pending;
      this.pending = null;
      this.send(p);
    }
  }

  cancel(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    this.pending = null;
  }
}
