/** World (meters, y up) to canvas (pixels, y down) mapping with pan/zoom. */

export interface Pt {
  x: number;
  y: number;
}

export class ViewTransform {
  scale: number; // pixels per meter
  cx: number; // world point shown at the canvas centre
  cy: number;
  width: number;
  height: number;

  constructor(width: number, height: number, scale = 10, cx = 0, cy = 0) {
    this.width = width;
    this.height = height;
    this.scale = scale;
    this.cx = cx;
    this.cy = cy;
  }

  worldToScreen(x: number, y: number): Pt {
    return {
      x: this.width / 2 + (x - this.cx) * this.scale,
      y: this.height / 2 - (y - this.cy) * this.scale,
    };
  }

  screenToWorld(px: number, py: number): Pt {
    return {
      x: this.cx + (px - this.width / 2) / this.scale,
      y: this.cy - (py - this.height / 2) / this.scale,
    };
  }

  /** Centre and zoom so all points fit with a fractional margin. */
  fitBounds(points: Iterable<Pt>, margin = 0.15): void {
    let minX = Infinity;
    let maxX = -Infinity;
    let minY = Infinity;
    let maxY = -Infinity;
    let any = false;
    for (const p of points) {
      any = true;
      minX = Math.min(minX, p.x);
      maxX = Math.max(maxX, p.x);
      minY = Math.min(minY, p.y);
      maxY = Math.max(maxY, p.y);
    }
    if (!any) return;
    this.cx = (minX + maxX) / 2;
    this.cy = (minY + maxY) / 2;
    const spanX = Math.max(maxX - minX, 1e-6) * (1 + 2 * margin);
    const spanY = Math.max(maxY - minY, 1e-6) * (1 + 2 * margin);
    this.scale = Math.min(this.width / spanX, this.height / spanY);
  }

  zoomAt(px: number, py: number, factor: number): void {
    const before = this.screenToWorld(px, py);
    this.scale *= factor;
    const after = this.screenToWorld(px, py);
    this.cx += before.x - after.x;
    this.cy += before.y - after.y;
  }

  panPixels(dx: number, dy: number): void {
    this.cx -= dx / this.scale;
    this.cy += dy / this.scale;
  }
}
