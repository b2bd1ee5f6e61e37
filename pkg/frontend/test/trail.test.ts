import { describe, expect, it } from "vitest";

import { TrailBuffer } from "../src/trail.js";

describe("TrailBuffer", () => {
  it("keeps points in order and starts one stroke", () => {
    const t = new TrailBuffer(8);
    t.push(0, 0);
    t.push(1, 1);
    t.push(2, 2);
    const pts = t.points();
    expect(pts.map((p) => p.x)).toEqual([0, 1, 2]);
    expect(pts.map((p) => p.startsStroke)).toEqual([true, false, false]);
  });

  it("wraps around at capacity", () => {
    const t = new TrailBuffer(4);
    for (let i = 0; i < 10; i += 1) t.push(i, -i);
    expect(t.length).toBe(4);
    const pts = t.points();
    expect(pts.map((p) => p.x)).toEqual([6, 7, 8, 9]);
    expect(pts[0].startsStroke).toBe(true); // oldest retained point restarts
  });

  it("gap markers break the stroke", () => {
    const t = new TrailBuffer(10);
    t.push(0, 0);
    t.push(1, 0);
    t.markGap();
    t.push(5, 0);
    t.push(6, 0);
    const strokes = t.points().map((p) => p.startsStroke);
    expect(strokes).toEqual([true, false, true, false]);
  });

  it("clear resets everything", () => {
    const t = new TrailBuffer(4);
    t.push(1, 2);
    t.clear();
    expect(t.length).toBe(0);
    t.push(7, 8);
    expect(t.points()).toEqual([{ x: 7, y: 8, startsStroke: true }]);
  });

  it("handles ten thousand points cheaply", () => {
    const t = new TrailBuffer(10000);
    for (let i = 0; i < 25000; i += 1) t.push(i * 0.01, Math.sin(i * 0.01));
    expect(t.length).toBe(10000);
    let n = 0;
    t.forEach(() => { n += 1; });
    expect(n).toBe(10000);
  });
});
