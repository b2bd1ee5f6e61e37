"""Singularity-free guiding vector field on the position-plus-parameter space.

The planar path error is measured through two surfaces phi_i = p_i - f_i(w).
The field combines a propagation term tangent to their zero set with a
converging term pointing back onto it; its planar projection steers the
vehicle while the third component drives the path parameter.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np

from .bezier import BezierSpline
from .errors import FieldDegenerateError

# 90-degree counter-clockwise rotation.
E = np.array([[0.0, -1.0], [1.0, 0.0]])
E.setflags(write=False)

# |chi_p| at or below this triggers an explicit degeneracy error instead of
# letting infinities leak into the parameter dynamics.
EPS_FIELD = 1e-9


@dataclass(frozen=True)
class GuidanceGains:
    """Converging-term gains, heading gain, and travel direction (+1/-1)."""

    k1: float
    k2: float
    k_theta: float
    direction: int = 1

    def __post_init__(self):
        if not (self.k1 > 0.0 and self.k2 > 0.0 and self.k_theta > 0.0):
            raise ValueError("gains k1, k2, k_theta must be strictly positive")
        if self.direction not in (1, -1):
            raise ValueError("direction must be +1 or -1")

    @property
    def equal(self) -> bool:
        return self.k1 == self.k2


@dataclass(frozen=True)
class FieldEval:
    """One field evaluation: full vector, planar projection, and its direction."""

    chi: np.ndarray
    chi_p: np.ndarray
    chi_p_hat: np.ndarray
    chi_p_norm: float

    @property
    def chi3(self) -> float:
        return float(self.chi[2])


def _components(px, py, w, spline, gains):
    """Scalar core shared by every field operation.

    Returns (phi1, phi2, f1p, f2p, chi1, chi2, chi3, norm_p) with
    norm_p = sqrt(chi1^2 + chi2^2).
    """
    fx, fy = spline._point_xy(w)
    f1p, f2p = spline._derivative_xy(w, 1)
    phi1 = px - fx
    phi2 = py - fy
    s = float(gains.direction)
    chi1 = s * f1p - gains.k1 * phi1
    chi2 = s * f2p - gains.k2 * phi2
    chi3 = s + gains.k1 * phi1 * f1p + gains.k2 * phi2 * f2p
    norm_p = math.hypot(chi1, chi2)
    return phi1, phi2, f1p, f2p, chi1, chi2, chi3, norm_p


def surfaces(xi, spline: BezierSpline) -> np.ndarray:
    """Error vector (phi1, phi2) of the augmented state ``xi = (px, py, w)``."""
    px, py, w = float(xi[0]), float(xi[1]), float(xi[2])
    fx, fy = spline._point_xy(w)
    return np.array([px - fx, py - fy])


def augmented_field(xi, spline: BezierSpline, gains: GuidanceGains) -> FieldEval:
    """Evaluate the guiding field at ``xi = (px, py, w)``.

    Raises FieldDegenerateError when the planar projection collapses below
    EPS_FIELD; the full field itself is provably never zero.
    """
    px, py, w = float(xi[0]), float(xi[1]), float(xi[2])
    *_, chi1, chi2, chi3, norm_p = _components(px, py, w, spline, gains)
    if norm_p <= EPS_FIELD:
        raise FieldDegenerateError(
            f"projected field norm {norm_p:.3e} at w={w:.6f}", xi=(px, py, w)
        )
    chi = np.array([chi1, chi2, chi3])
    chi_p = np.array([chi1, chi2])
    return FieldEval(chi=chi, chi_p=chi_p, chi_p_hat=chi_p / norm_p, chi_p_norm=norm_p)


def w_dot(v: float, field: FieldEval) -> float:
    """Path-parameter rate for a vehicle at speed ``v`` (unit-w per second)."""
    if field.chi_p_norm <= EPS_FIELD:
        raise FieldDegenerateError("projected field is degenerate")
    return v * field.chi3 / field.chi_p_norm


def field_jacobian(xi, spline: BezierSpline, gains: GuidanceGains) -> np.ndarray:
    """2x3 Jacobian of the planar field components over (px, py, w).

    The parameter column matters: w is itself a moving state, so the
    rotation rate of the projected field must include it.
    """
    _, _, w = xi
    w = float(w)
    f1p, f2p = spline._derivative_xy(w, 1)
    f1pp, f2pp = spline._derivative_xy(w, 2)
    s = float(gains.direction)
    return np.array([
        [-gains.k1, 0.0, s * f1pp + gains.k1 * f1p],
        [0.0, -gains.k2, s * f2pp + gains.k2 * f2p],
    ])


def theta_d_dot(xi, spline: BezierSpline, gains: GuidanceGains, xi_dot) -> float:
    """Rotation rate of the projected field direction along the motion ``xi_dot``."""
    px, py, w = float(xi[0]), float(xi[1]), float(xi[2])
    *_, chi1, chi2, _chi3, norm_p = _components(px, py, w, spline, gains)
    if norm_p <= EPS_FIELD:
        raise FieldDegenerateError("projected field is degenerate", xi=(px, py, w))
    f1p, f2p = spline._derivative_xy(w, 1)
    f1pp, f2pp = spline._derivative_xy(w, 2)
    s = float(gains.direction)
    dx, dy, dw = float(xi_dot[0]), float(xi_dot[1]), float(xi_dot[2])
    jv1 = -gains.k1 * dx + (s * f1pp + gains.k1 * f1p) * dw
    jv2 = -gains.k2 * dy + (s * f2pp + gains.k2 * f2p) * dw
    # (E chi_hat) . (J xi_dot) / |chi_p|
    return (chi1 * jv2 - chi2 * jv1) / (norm_p * norm_p)


def heading_control(heading_hat, field: FieldEval, theta_d_dot: float,
                    gains: GuidanceGains) -> float:
    """Heading-rate command aligning the unit heading with the projected field."""
    h1, h2 = float(heading_hat[0]), float(heading_hat[1])
    norm = math.hypot(h1, h2)
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"heading must be a unit vector, |h| = {norm!r}")
    c1, c2 = field.chi_p_hat
    cross = h2 * c1 - h1 * c2  # h . E chi_hat
    return theta_d_dot - gains.k_theta * cross


def lyapunov_value(e, gains: GuidanceGains) -> float:
    """Quadratic alignment-error energy 0.5 (k1 phi1^2 + k2 phi2^2)."""
    phi1, phi2 = float(e[0]), float(e[1])
    return 0.5 * (gains.k1 * phi1 * phi1 + gains.k2 * phi2 * phi2)


def q_matrix(tangent, gains: GuidanceGains) -> np.ndarray:
    """Error-decay matrix K N^T N K for path tangent f'(w)."""
    f1p, f2p = float(tangent[0]), float(tangent[1])
    k1, k2 = gains.k1, gains.k2
    return np.array([
        [(f1p * f1p + 1.0) * k1 * k1, f1p * f2p * k1 * k2],
        [f1p * f2p * k1 * k2, (f2p * f2p + 1.0) * k2 * k2],
    ])


def q_eigenvalues(spline: BezierSpline, w: float, gains: GuidanceGains) -> tuple[float, float]:
    """(lambda_min, lambda_max) of the decay matrix at ``w``.

    With equal gains the closed form applies: lambda_min = k1^2 and
    lambda_max = k1^2 (|f'|^2 + 1).  Unequal gains fall back to a direct
    symmetric eigensolve.
    """
    f1p, f2p = spline._derivative_xy(float(w), 1)
    if gains.equal:
        k_sq = gains.k1 * gains.k1
        return k_sq, k_sq * (f1p * f1p + f2p * f2p + 1.0)
    vals = np.linalg.eigvalsh(q_matrix((f1p, f2p), gains))
    return float(vals[0]), float(vals[1])


def disturbance_error_bound(sup_d: float, gains: GuidanceGains) -> float:
    """Steady error bound sup|d| / sqrt(lambda_min) under a bounded disturbance."""
    if sup_d < 0.0:
        raise ValueError("sup_d must be nonnegative")
    if not gains.equal:
        raise ValueError("the closed-form bound assumes k1 == k2")
    return sup_d / gains.k1


def field_grid(spline: BezierSpline, gains: GuidanceGains, w: float, bbox,
               resolution: int) -> np.ndarray:
    """Rows (x, y, chi_hat_x, chi_hat_y) over a bbox grid at fixed ``w``.

    Degenerate grid points emit a zero direction (rendered as no arrow).
    """
    x0, y0, x1, y1 = (float(v) for v in bbox)
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    xs = np.linspace(x0, x1, resolution)
    ys = np.linspace(y0, y1, resolution)
    rows = np.empty((resolution * resolution, 4))
    i = 0
    for y in ys:
        for x in xs:
            *_, chi1, chi2, _chi3, norm_p = _components(x, y, float(w), spline, gains)
            if norm_p <= EPS_FIELD:
                rows[i] = (x, y, 0.0, 0.0)
            else:
                rows[i] = (x, y, chi1 / norm_p, chi2 / norm_p)
            i += 1
    return rows


def field_grid_csv(spline: BezierSpline, gains: GuidanceGains, w: float, bbox,
                   resolution: int) -> str:
    """CSV form of :func:`field_grid`; the data behind the arrow overlay."""
    rows = field_grid(spline, gains, w, bbox, resolution)
    buf = io.StringIO()
    buf.write("x,y,chi_hat_x,chi_hat_y\n")
    for x, y, u, v in rows:
        buf.write(f"{float(x)!r},{float(y)!r},{float(u)!r},{float(v)!r}\n")
    return buf.getvalue()
