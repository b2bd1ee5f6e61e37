"""Post-run metrics: distance to path, bound verification, energy traces.

Works directly on log objects (anything exposing ``array(column)`` and a
scenario dict), so it never needs the simulator at import time.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass

import numpy as np

from .bezier import BezierSpline
from .gvf import GuidanceGains

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0  # golden-section step ratio


class PathDistanceIndex:
    """Dense (w, f(w)) sample table for nearest-point queries.

    A query does a global scan over the table, then refines locally:
    parabolic for per-step logging speed, golden-section when the caller
    wants the documented 1e-4 m accuracy.
    """

    def __init__(self, spline: BezierSpline, per_segment: int = 4096):
        if per_segment < 4:
            raise ValueError("per_segment must be at least 4")
        self.spline = spline
        self.per_segment = int(per_segment)
        n = spline.num_segments
        self.ws = np.linspace(0.0, float(n), n * self.per_segment + 1)
        pts = np.array([spline._point_xy(w) for w in self.ws])
        self.xs = np.ascontiguousarray(pts[:, 0])
        self.ys = np.ascontiguousarray(pts[:, 1])

    def _dist_at(self, w, x, y):
        fx, fy = self.spline._point_xy(w)
        return (fx - x) ** 2 + (fy - y) ** 2

    def nearest(self, x, y, refine: str = "parabolic") -> tuple[float, float]:
        """(w, distance) of the nearest sampled path point, locally refined."""
        x = float(x)
        y = float(y)
        d2 = (self.xs - x) ** 2 + (self.ys - y) ** 2
        i = int(np.argmin(d2))
        w = float(self.ws[i])
        best = float(d2[i])
        if refine is None:
            return w, math.sqrt(best)

        lo = float(self.ws[max(i - 1, 0)])
        hi = float(self.ws[min(i + 1, len(self.ws) - 1)])
        if refine == "parabolic" and 0 < i < len(self.ws) - 1:
            d_lo = float(d2[i - 1])
            d_hi = float(d2[i + 1])
            denom = d_lo - 2.0 * best + d_hi
            if denom > 0.0:
                step = 0.5 * (d_lo - d_hi) / denom
                w_ref = w + step * (hi - lo) / 2.0
                w_ref = min(max(w_ref, lo), hi)
                d_ref = self._dist_at(w_ref, x, y)
                if d_ref < best:
                    return w_ref, math.sqrt(d_ref)
            return w, math.sqrt(best)
        if refine == "golden":
            a, b = lo, hi
            c = b - _INV_PHI * (b - a)
            d = a + _INV_PHI * (b - a)
            fc = self._dist_at(c, x, y)
            fd = self._dist_at(d, x, y)
            while b - a > 1e-12:
                if fc < fd:
                    b, d, fd = d, c, fc
                    c = b - _INV_PHI * (b - a)
                    fc = self._dist_at(c, x, y)
                else:
                    a, c, fc = c, d, fd
                    d = a + _INV_PHI * (b - a)
                    fd = self._dist_at(d, x, y)
            w_ref = 0.5 * (a + b)
            d_ref = self._dist_at(w_ref, x, y)
            if d_ref < best:
                return w_ref, math.sqrt(d_ref)
            return w, math.sqrt(best)
        return w, math.sqrt(best)

    def query(self, x, y, refine: str = "parabolic") -> float:
        """Distance from (x, y) to the path."""
        return self.nearest(x, y, refine=refine)[1]


def distance_to_path(p, index: PathDistanceIndex) -> float:
    """Minimum Euclidean distance from point ``p`` to the indexed path."""
    return index.query(float(p[0]), float(p[1]), refine="golden")


@dataclass
class BoundReport:
    bound_d: float
    threshold: float
    converged: bool
    post_transient_start: float
    violations: int
    max_error_post: float
    margin: float

    @property
    def ok(self) -> bool:
        return self.converged and self.violations == 0

    def as_dict(self) -> dict:
        return {
            "bound_d": self.bound_d,
            "threshold": self.threshold,
            "converged": self.converged,
            "post_transient_start": self.post_transient_start,
            "violations": self.violations,
            "max_error_post": self.max_error_post,
            "margin": self.margin,
            "ok": self.ok,
        }


def verify_bound(log, bound_d: float, gains: GuidanceGains,
                 spline: BezierSpline | None = None, settle: float = 5.0) -> BoundReport:
    """Check the disturbance error bound sup|d| / sqrt(lambda_min) on a log.

    "Post-transient" starts once the error has stayed at or below the
    threshold for ``settle`` seconds; any later excursion above it is a
    violation.  Unequal gains need the spline to compute a per-step
    lambda_min from the logged parameter.
    """
    e = log.array("e_norm")
    t = log.array("t")
    if gains.equal:
        thr = np.full_like(e, bound_d / gains.k1)
    else:
        if spline is None:
            raise ValueError("unequal gains need the spline for per-step eigenvalues")
        from .gvf import q_eigenvalues
        ws = log.array("w")
        thr = np.array([bound_d / math.sqrt(q_eigenvalues(spline, w, gains)[0]) for w in ws])

    below = e <= thr
    if len(t) > 1:
        dt = float(t[1] - t[0])
    else:
        dt = 1.0
    window = max(1, int(round(settle / dt)))
    start = None
    run_len = 0
    for i, ok_i in enumerate(below):
        run_len = run_len + 1 if ok_i else 0
        if run_len >= window:
            start = i
            break
    if start is None:
        return BoundReport(bound_d, float(thr[0]), False, math.nan, 0, float(e.max(initial=0.0)),
                           -math.inf)
    post = slice(start, None)
    exceed = e[post] > thr[post]
    violations = int(np.count_nonzero(exceed))
    max_post = float(e[post].max())
    margin = float((thr[post] - e[post]).min())
    return BoundReport(bound_d, float(thr[0]), True, float(t[start]), violations, max_post, margin)


def lyapunov_trace(log, tol: float = 1e-9) -> tuple[np.ndarray, bool]:
    """Energy series and whether it never rises by more than ``tol`` per step."""
    v = log.array("lyapunov")
    if len(v) < 2:
        return v, True
    nonincreasing = bool(np.all(np.diff(v) <= tol))
    return v, nonincreasing


def fit_decay_rate(t, values, floor: float = 1e-30) -> float:
    """Least-squares exponential decay rate of ``values`` (positive = decaying)."""
    t = np.asarray(t, dtype=float)
    v = np.clip(np.asarray(values, dtype=float), floor, None)
    if len(t) < 2:
        raise ValueError("need at least two samples")
    slope = np.polyfit(t, np.log(v), 1)[0]
    return float(-slope)


def convergence_time(log, level: float, hold: float = 0.0) -> float:
    """First time e_path drops to ``level`` and stays there for ``hold`` seconds.

    Returns NaN when the run never converges.
    """
    e = log.array("e_path")
    t = log.array("t")
    if len(t) == 0:
        return math.nan
    dt = float(t[1] - t[0]) if len(t) > 1 else 1.0
    window = max(1, int(round(hold / dt))) if hold > 0 else 1
    run_len = 0
    for i, val in enumerate(e):
        run_len = run_len + 1 if val <= level else 0
        if run_len >= window:
            return float(t[i - window + 1])
    return math.nan


def summarize(log, bound_d: float | None = None,
              gains: GuidanceGains | None = None,
              spline: BezierSpline | None = None) -> dict:
    """Headline metrics of a run, plus the bound report when a bound is given."""
    out = {
        "steps": len(log),
        "duration": float(log.array("t")[-1]) if len(log) else 0.0,
        "final_e_path": float(log.array("e_path")[-1]) if len(log) else math.nan,
        "max_e_path": float(log.array("e_path").max()) if len(log) else math.nan,
        "max_abs_u_v": float(np.abs(log.array("u_v")).max()) if len(log) else 0.0,
        "w_resets": int(log.array("w_reset").sum()) if len(log) else 0,
    }
    _, nonincreasing = lyapunov_trace(log)
    out["lyapunov_nonincreasing"] = nonincreasing
    if bound_d is not None and gains is not None:
        out["bound"] = verify_bound(log, bound_d, gains, spline=spline).as_dict()
    return out


# Column groups mirroring the standard telemetry panels.
PANELS = {
    "errors": ["t", "phi1", "phi2", "w"],
    "path_error": ["t", "e_path", "d_norm"],
    "speed": ["t", "v_ref", "v_raw", "v_filtered"],
    "throttle": ["t", "u_v", "u_v_p", "u_v_i", "u_v_d", "u_v_ff"],
    "curvature": ["t", "kappa"],
    "energy": ["t", "lyapunov", "e_norm"],
}


def write_report(log, outdir, bound_d: float | None = None,
                 gains: GuidanceGains | None = None,
                 spline: BezierSpline | None = None) -> dict:
    """Write summary.json plus one CSV per telemetry panel; returns the summary."""
    os.makedirs(outdir, exist_ok=True)
    summary = summarize(log, bound_d=bound_d, gains=gains, spline=spline)
    with open(os.path.join(outdir, "summary.json"), "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    for panel, cols in PANELS.items():
        arrays = [log.array(c) for c in cols]
        with open(os.path.join(outdir, f"{panel}.csv"), "w", encoding="utf-8",
                  newline="") as fh:
            fh.write(",".join(cols) + "\n")
            for row in zip(*arrays):
                fh.write(",".join(repr(float(v)) for v in row) + "\n")
    return summary
