/** Presentation-only geometry: polyline sampling and hulls for drawing.

Everything here exists to turn server-provided control points into pixels.
No control point, error, or command value is ever produced on this side;
the authoritative locked points always arrive from the server.
*/

export type XY = [number, number];

function binomialRow(n: number): number[] {
  const row = [1];
  for (let k = 1; k <= n; k += 1) {
    row.push((row[k - 1] * (n - k + 1)) / k);
  }
  return row;
}

/** Dense polyline of one Bezier segment for canvas drawing. */
export function sampleSegment(points: XY[], samples = 48): XY[] {
  const n = points.length - 1;
  const binom = binomialRow(n);
  const out: XY[] = [];
  for (let s = 0; s <= samples; s += 1) {
    const w = s / samples;
    let x = 0;
    let y = 0;
    for (let k = 0; k <= n; k += 1) {
      const b = binom[k] * Math.pow(w, k) * Math.pow(1 - w, n - k);
      x += b * points[k][0];
      y += b * points[k][1];
    }
    out.push([x, y]);
  }
  return out;
}

/** Convex hull of the control points, counter-clockwise (for the overlay). */
export function convexHull(points: XY[]): XY[] {
  const uniq = [...new Map(points.map((p) => [`${p[0]},${p[1]}`, p])).values()];
  uniq.sort((a, b) => (a[0] === b[0] ? a[1] - b[1] : a[0] - b[0]));
  if (uniq.length <= 2) return uniq;
  const cross = (o: XY, a: XY, b: XY) =>
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
  const lower: XY[] = [];
  for (const p of uniq) {
    while (lower.length >= 2 && cross(lower[lower.length - 2], lower[lower.length - 1], p) <= 0) {
      lower.pop();
    }
    lower.push(p);
  }
  const upper: XY[] = [];
  for (const p of [...uniq].reverse()) {
    while (upper.length >= 2 && cross(upper[upper.length - 2], upper[upper.length - 1], p) <= 0) {
      upper.pop();
    }
    upper.push(p);
  }
  const hull = [...lower.slice(0, -1), ...upper.slice(0, -1)];
  return hull.length < 3 ? [uniq[0], uniq[uniq.length - 1]] : hull;
}
