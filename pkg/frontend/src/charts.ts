/** Minimal strip charts for the error and speed panels; no chart library. */

export interface SeriesSpec {
  key: string;
  color: string;
  label: string;
}

interface Sample {
  t: number;
  values: number[];
}

/** Minimal subset of CanvasRenderingContext2D the charts draw with. */
export interface Ctx2D {
  clearRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  stroke(): void;
  fillText(text: string, x: number, y: number): void;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  fillStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  font: string;
  globalAlpha: number;
}

export class StripChart {
  private samples: Sample[] = [];

  constructor(
    readonly series: SeriesSpec[],
    readonly windowSeconds = 30,
    readonly maxSamples = 3000,
  ) {}

  push(t: number, values: number[]): void {
    this.samples.push({ t, values });
    const cutoff = t - this.windowSeconds;
    let drop = 0;
    while (drop < this.samples.length && this.samples[drop].t < cutoff) drop += 1;
    if (drop > 0) this.samples = this.samples.slice(drop);
    if (this.samples.length > this.maxSamples) {
      this.samples = this.samples.filter((_, i) => i % 2 === 0);
    }
  }

  clear(): void {
    this.samples = [];
  }

  get count(): number {
    return this.samples.length;
  }

  draw(ctx: Ctx2D, width: number, height: number): void {
    ctx.clearRect(0, 0, width, height);
    if (this.samples.length < 2) return;
    const t0 = this.samples[0].t;
    const t1 = this.samples[this.samples.length - 1].t;
    const span = Math.max(t1 - t0, 1e-9);
    let lo = Infinity;
    let hi = -Infinity;
    for (const s of this.samples) {
      for (const v of s.values) {
        if (Number.isFinite(v)) {
          lo = Math.min(lo, v);
          hi = Math.max(hi, v);
        }
      }
    }
    if (!Number.isFinite(lo) || !Number.isFinite(hi)) return;
    if (hi - lo < 1e-9) {
      hi += 0.5;
      lo -= 0.5;
    }
    const pad = 0.08 * (hi - lo);
    lo -= pad;
    hi += pad;

    // zero line
    if (lo < 0 && hi > 0) {
      const zy = height - ((0 - lo) / (hi - lo)) * height;
      ctx.strokeStyle = "#555";
      ctx.lineWidth = 1;
      ctx.globalAlpha = 0.6;
      ctx.beginPath();
      ctx.moveTo(0, zy);
      ctx.lineTo(width, zy);
      ctx.stroke();
      ctx.globalAlpha = 1.0;
    }

    this.series.forEach((spec, si) => {
      ctx.strokeStyle = spec.color;
      ctx.lineWidth = 1.4;
      ctx.beginPath();
      let started = false;
      for (const s of this.samples) {
        const v = s.values[si];
        if (!Number.isFinite(v)) {
          started = false;
          continue;
        }
        const x = ((s.t - t0) / span) * width;
        const y = height - ((v - lo) / (hi - lo)) * height;
        if (started) {
          ctx.lineTo(x, y);
        } else {
          ctx.moveTo(x, y);
          started = true;
        }
      }
      ctx.stroke();
    });

    ctx.font = "10px sans-serif";
    ctx.fillStyle = "#9aa0a6";
    ctx.fillText(hi.toFixed(2), 4, 11);
    ctx.fillText(lo.toFixed(2), 4, height - 3);
    let xoff = 44;
    for (const spec of this.series) {
      ctx.fillStyle = spec.color;
      ctx.fillText(spec.label, xoff, 11);
      xoff += spec.label.length * 6 + 14;
    }
  }
}
