import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { RateLimiter } from "../src/ratelimit.js";

describe("RateLimiter", () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  it("sends the first payload immediately", () => {
    const sent: number[] = [];
    const rl = new RateLimiter<number>((v) => sent.push(v), 50, () => Date.now());
    rl.submit(1);
    expect(sent).toEqual([1]);
  });

  it("coalesces a burst to the trailing value", () => {
    const sent: number[] = [];
    const rl = new RateLimiter<number>((v) => sent.push(v), 50, () => Date.now());
    rl.submit(1);
    rl.submit(2);
    rl.submit(3);
    rl.submit(4);
    expect(sent).toEqual([1]);
    vi.advanceTimersByTime(49);
    expect(sent).toEqual([1]);
    vi.advanceTimersByTime(1);
    expect(sent).toEqual([1, 4]);
  });

  it("caps a continuous stream at the configured rate", () => {
    const sent: number[] = [];
    const rl = new RateLimiter<number>((v) => sent.push(v), 50, () => Date.now());
    // 1 kHz of submissions for one second
    for (let ms = 0; ms < 1000; ms += 1) {
      rl.submit(ms);
      vi.advanceTimersByTime(1);
    }
    rl.flush();
    expect(sent.length).toBeLessThanOrEqual(21); // <= 20 per second plus the flush
    expect(sent[sent.length - 1]).toBe(999); // the final position survives
  });

  it("flush emits the pending payload at once", () => {
    const sent: number[] = [];
    const rl = new RateLimiter<number>((v) => sent.push(v), 50, () => Date.now());
    rl.submit(1);
    rl.submit(2);
    rl.flush();
    expect(sent).toEqual([1, 2]);
    rl.flush(); // nothing pending; no duplicates
    expect(sent).toEqual([1, 2]);
  });

  it("cancel drops the pending payload", () => {
    const sent: number[] = [];
    const rl = new RateLimiter<number>((v) => sent.push(v), 50, () => Date.now());
    rl.submit(1);
    rl.submit(2);
    rl.cancel();
    vi.advanceTimersByTime(200);
    expect(sent).toEqual([1]);
  });
});
