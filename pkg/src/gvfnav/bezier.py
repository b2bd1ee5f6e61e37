"""Planar Bezier splines with enforced joint continuity.

A path is a chain of equal-degree Bezier segments evaluated on a single
parameter ``w`` running from 0 to the segment count.  Joint smoothness is
not an optimization problem here: the first control points of every
segment after the first are locked by closed-form recurrences, so a user
only ever places endpoints and the remaining free control points.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, DegenerateTangentError, DomainError

# |f'| at or below this (m per unit-w) counts as a degenerate tangent.
EPS_TANGENT = 1e-9
# Relative tolerance for the joint-continuity identities.
JOINT_RTOL = 1e-9


class Continuity(Enum):
    C0 = 0
    C1 = 1
    C2 = 2

    @property
    def order(self) -> int:
        return self.value


class PointRole(str, Enum):
    ENDPOINT = "endpoint"
    FREE_CONTROL = "free_control"
    CONTINUITY_LOCKED = "continuity_locked"


@dataclass(frozen=True)
class FreePointIndex:
    """Addresses one control point and how it may be edited."""

    segment: int
    index: int
    role: PointRole


@lru_cache(maxsize=None)
def _binomial_row(n: int) -> tuple:
    return tuple(math.comb(n, k) for k in range(n + 1))


def _bernstein_xy(xy, binom, w):
    """Evaluate sum_k beta_k C(n,k) w^k (1-w)^(n-k) for 2-d control points."""
    n = len(xy) - 1
    if n == 0:
        return xy[0]
    u = 1.0 - w
    upow = [1.0] * (n + 1)
    acc = 1.0
    for k in range(n - 1, -1, -1):
        acc *= u
        upow[k] = acc
    x = 0.0
    y = 0.0
    wk = 1.0
    for k in range(n + 1):
        b = binom[k] * wk * upow[k]
        px, py = xy[k]
        x += b * px
        y += b * py
        wk *= w
    return x, y


class BezierSegment:
    """One Bezier curve of degree ``n`` given by ``n + 1`` control points."""

    def __init__(self, points):
        pts = np.array(points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] < 2 or pts.shape[1] != 2:
            raise ConfigurationError("a segment needs at least two (x, y) control points")
        if not np.isfinite(pts).all():
            raise ConfigurationError("control points must be finite")
        pts.setflags(write=False)
        self.points = pts
        self.degree = pts.shape[0] - 1
        self._xy = [(float(p[0]), float(p[1])) for p in pts]
        self._binom = _binomial_row(self.degree)
        d1 = self.degree * np.diff(pts, axis=0)
        self._d1 = [(float(p[0]), float(p[1])) for p in d1]
        self._binom1 = _binomial_row(self.degree - 1)
        if self.degree >= 2:
            d2 = (self.degree - 1) * np.diff(d1, axis=0)
            self._d2 = [(float(p[0]), float(p[1])) for p in d2]
            self._binom2 = _binomial_row(self.degree - 2)
        else:
            self._d2 = None
            self._binom2 = None

    def _check_w(self, w):
        if not 0.0 <= w <= 1.0:
            raise DomainError(f"segment parameter {w!r} outside [0, 1]")

    def _point_xy(self, w):
        return _bernstein_xy(self._xy, self._binom, w)

    def _derivative_xy(self, w, order):
        if order == 1:
            return _bernstein_xy(self._d1, self._binom1, w)
        if self._d2 is None:
            return (0.0, 0.0)
        return _bernstein_xy(self._d2, self._binom2, w)

    def point(self, w: float) -> np.ndarray:
        """Curve position at ``w`` in [0, 1]."""
        self._check_w(w)
        return np.array(self._point_xy(w))

    def derivative(self, w: float, order: int = 1) -> np.ndarray:
        """First or second derivative with respect to ``w`` (hodograph form)."""
        if order not in (1, 2):
            raise ValueError("order must be 1 or 2")
        self._check_w(w)
        return np.array(self._derivative_xy(w, order))

    def __eq__(self, other):
        return isinstance(other, BezierSegment) and np.array_equal(self.points, other.points)

    def __repr__(self):
        return f"BezierSegment(degree={self.degree})"


def signed_curvature(d1x, d1y, d2x, d2y):
    """Curvature of a parametric curve from its first and second derivatives."""
    speed_sq = d1x * d1x + d1y * d1y
    if speed_sq <= EPS_TANGENT * EPS_TANGENT:
        raise DegenerateTangentError(
            f"tangent norm {math.sqrt(speed_sq):.3e} at or below {EPS_TANGENT:.0e}"
        )
    return (d1x * d2y - d2x * d1y) / speed_sq**1.5


def joint_defects(segments: Sequence[BezierSegment], continuity: Continuity):
    """Check the joint identities and list mismatches as (joint, what, error)."""
    defects = []
    n = segments[0].degree
    for i in range(len(segments) - 1):
        a = segments[i].points
        b = segments[i + 1].points
        scale = max(1.0, float(np.abs(a).max()), float(np.abs(b).max()))
        tol = JOINT_RTOL * scale
        checks = [("position", a[n], b[0])]
        if continuity.order >= 1:
            checks.append(("first_derivative", 2.0 * a[n] - a[n - 1], b[1]))
        if continuity.order >= 2:
            checks.append(("second_derivative", 4.0 * a[n] - 4.0 * a[n - 1] + a[n - 2], b[2]))
        for what, want, got in checks:
            err = float(np.max(np.abs(want - got)))
            if err > tol:
                defects.append((i, what, err))
    return defects


class BezierSpline:
    """Piecewise Bezier path f(w) on w in [0, N], N the number of segments."""

    def __init__(self, segments: Sequence[BezierSegment], continuity: Continuity = Continuity.C2,
                 validate: bool = True):
        segments = [s if isinstance(s, BezierSegment) else BezierSegment(s) for s in segments]
        if not segments:
            raise ConfigurationError("a spline needs at least one segment")
        if len({s.degree for s in segments}) != 1:
            raise ConfigurationError("all segments must share one degree")
        self.segments = segments
        self.continuity = continuity
        if validate and len(segments) > 1:
            defects = joint_defects(segments, continuity)
            if defects:
                detail = ", ".join(f"joint {i}: {what} off by {err:.3e}" for i, what, err in defects)
                raise ConfigurationError(f"{continuity.name} continuity violated ({detail})")

    @property
    def num_segments(self) -> int:
        return len(self.segments)

    @property
    def degree(self) -> int:
        return self.segments[0].degree

    def _locate(self, w):
        n = len(self.segments)
        if not 0.0 <= w <= n:
            raise DomainError(f"spline parameter {w!r} outside [0, {n}]")
        i = int(w)
        if i >= n:
            i = n - 1
        return i, w - i

    def _point_xy(self, w):
        i, u = self._locate(w)
        return self.segments[i]._point_xy(u)

    def _derivative_xy(self, w, order):
        i, u = self._locate(w)
        return self.segments[i]._derivative_xy(u, order)

    def point(self, w: float) -> np.ndarray:
        """Path position f(w)."""
        return np.array(self._point_xy(w))

    def derivative(self, w: float, order: int = 1) -> np.ndarray:
        """df/dw or d2f/dw2 at ``w``, taken inside the segment containing it."""
        if order not in (1, 2):
            raise ValueError("order must be 1 or 2")
        i, u = self._locate(w)
        return np.array(self.segments[i]._derivative_xy(u, order))

    def curvature(self, w: float) -> float:
        """Signed curvature (1/m); positive where the path bends left."""
        i, u = self._locate(w)
        seg = self.segments[i]
        d1x, d1y = seg._derivative_xy(u, 1)
        d2x, d2y = seg._derivative_xy(u, 2)
        return signed_curvature(d1x, d1y, d2x, d2y)

    def __eq__(self, other):
        return (isinstance(other, BezierSpline) and self.continuity is other.continuity
                and self.segments == other.segments)

    def __repr__(self):
        return (f"BezierSpline(segments={self.num_segments}, degree={self.degree}, "
                f"continuity={self.continuity.name})")


def enforce_continuity(segments, continuity: Continuity = Continuity.C2) -> BezierSpline:
    """Complete a draft into a spline whose locked points satisfy the joints.

    ``segments`` is a list of point lists.  The first must carry all
    ``degree + 1`` points.  Each later entry is either full (its leading
    shared/locked points are overwritten) or free-form, carrying only the
    trailing ``degree - order`` points ``[beta_(order+1), ..., beta_n]``.
    """
    if not segments:
        raise ConfigurationError("a spline needs at least one segment")
    first = np.array(segments[0], dtype=float)
    if first.ndim != 2 or first.shape[1] != 2:
        raise ConfigurationError("segment 0 must be a list of (x, y) points")
    degree = first.shape[0] - 1
    order = continuity.order
    if degree < 2 * order + 1:
        raise ConfigurationError(
            f"{continuity.name} continuity needs degree >= {2 * order + 1}, got {degree}"
        )
    out = [first]
    for si, raw in enumerate(segments[1:], start=1):
        raw = np.array(raw, dtype=float)
        if raw.ndim != 2 or raw.shape[1] != 2:
            raise ConfigurationError(f"segment {si} must be a list of (x, y) points")
        prev = out[-1]
        locked = [prev[degree]]
        if order >= 1:
            locked.append(2.0 * prev[degree] - prev[degree - 1])
        if order >= 2:
            locked.append(4.0 * prev[degree] - 4.0 * prev[degree - 1] + prev[degree - 2])
        n_locked = len(locked)
        if raw.shape[0] == degree + 1:
            tail = raw[n_locked:]
        elif raw.shape[0] == degree + 1 - n_locked:
            tail = raw
        else:
            raise ConfigurationError(
                f"segment {si} must carry {degree + 1} (full) or "
                f"{degree + 1 - n_locked} (free-form) points, got {raw.shape[0]}"
            )
        out.append(np.vstack([np.array(locked), tail]))
    return BezierSpline([BezierSegment(p) for p in out], continuity, validate=False)


def point_roles(spline: BezierSpline) -> list[FreePointIndex]:
    """Role of every control point of every segment."""
    order = spline.continuity.order
    n = spline.degree
    roles = []
    for i, _seg in enumerate(spline.segments):
        for k in range(n + 1):
            if k == 0 or k == n:
                role = PointRole.ENDPOINT
            elif i > 0 and k <= order:
                role = PointRole.CONTINUITY_LOCKED
            else:
                role = PointRole.FREE_CONTROL
            roles.append(FreePointIndex(i, k, role))
    return roles


def configurable_points(spline: BezierSpline) -> list[FreePointIndex]:
    """User-placeable points, with each shared joint listed once.

    For a degree-5 C2 spline of N segments this enumerates 3(N + 1)
    entries: the N + 1 endpoints plus the free control points.
    """
    out = []
    for fp in point_roles(spline):
        if fp.role is PointRole.CONTINUITY_LOCKED:
            continue
        if fp.index == 0 and fp.segment > 0:
            continue  # same physical point as the previous segment's end
        out.append(fp)
    return out


def convex_hull(segment: BezierSegment) -> np.ndarray:
    """Convex hull of the control points, counter-clockwise.

    Degenerate inputs collapse: collinear points give the spanning
    segment, coincident points a single vertex.
    """
    pts = sorted({(float(x), float(y)) for x, y in segment.points})
    if len(pts) == 1:
        return np.array(pts)
    if len(pts) == 2:
        return np.array(pts)

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0.0:
            lower.pop()
        lower.append(p)
    upper = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0.0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        return np.array([pts[0], pts[-1]])
    return np.array(hull)


def spline_to_dict(spline: BezierSpline, name: str | None = None) -> dict:
    d = {
        "degree": spline.degree,
        "continuity": spline.continuity.name,
        "segments": [{"points": [[float(x), float(y)] for x, y in s.points]}
                     for s in spline.segments],
    }
    if name:
        d["name"] = name
    return d


def spline_from_dict(spec: dict) -> tuple[BezierSpline, list[str]]:
    """Build a spline from its JSON form; free-form segments are completed.

    Returns the spline plus warnings for any full-form joints that had to
    be recomputed because they missed the continuity identities.
    """
    if not isinstance(spec, dict):
        raise ConfigurationError("spline spec must be a JSON object")
    try:
        degree = int(spec["degree"])
        cont = Continuity[str(spec["continuity"]).upper()]
        raw_segments = spec["segments"]
    except KeyError as exc:
        raise ConfigurationError(f"spline spec missing field {exc}") from None
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"bad spline spec: {exc}") from None
    if not isinstance(raw_segments, list) or not raw_segments:
        raise ConfigurationError("spline spec needs a non-empty segments list")
    points = []
    for si, entry in enumerate(raw_segments):
        try:
            pts = entry["points"]
        except (TypeError, KeyError):
            raise ConfigurationError(f"segment {si} needs a points list") from None
        points.append(pts)
    if len(points[0]) != degree + 1:
        raise ConfigurationError(f"segment 0 must carry {degree + 1} points")

    warnings = []
    full = all(len(p) == degree + 1 for p in points)
    if full and len(points) > 1:
        segs = [BezierSegment(p) for p in points]
        defects = joint_defects(segs, cont)
        if not defects:
            return BezierSpline(segs, cont, validate=False), warnings
        for i, what, err in defects:
            warnings.append(f"joint {i}: {what} off by {err:.3e}; locked points recomputed")
    spline = enforce_continuity(points, cont)
    if spline.degree != degree:
        raise ConfigurationError("segment point counts disagree with the declared degree")
    return spline, warnings


def load_spline(path) -> tuple[BezierSpline, list[str]]:
    with open(path, "r", encoding="utf-8") as fh:
        return spline_from_dict(json.load(fh))


def save_spline(spline: BezierSpline, path, name: str | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(spline_to_dict(spline, name=name), fh, indent=2)
        fh.write("\n")
