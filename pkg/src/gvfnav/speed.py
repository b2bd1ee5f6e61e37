"""Curvature-scheduled speed setpoint and feedforward + PID throttle control."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

# Throttle command range in controller counts.
THROTTLE_LIMIT = 9600.0


@dataclass(frozen=True)
class SpeedSetpointParams:
    v_min: float
    v_max: float
    c_kappa: float

    def __post_init__(self):
        if self.v_min < 0.0:
            raise ValueError("v_min must be nonnegative")
        if self.v_max < self.v_min:
            raise ValueError("v_max must be at least v_min")
        if self.c_kappa < 0.0:
            raise ValueError("c_kappa must be nonnegative")


def speed_setpoint(kappa: float, params: SpeedSetpointParams) -> float:
    """Speed reference (v_max - v_min) exp(-c kappa^2) + v_min.

    Even and smooth in kappa, so the reference stays differentiable through
    straight stretches; bounded inside [v_min, v_max] by construction.
    """
    kappa = float(kappa)
    if not math.isfinite(kappa):
        raise ValueError("kappa must be finite")
    return (params.v_max - params.v_min) * math.exp(-params.c_kappa * kappa * kappa) + params.v_min


@dataclass(frozen=True)
class SpeedGains:
    k_f: float
    k_p: float
    k_i: float
    k_d: float

    def __post_init__(self):
        if min(self.k_f, self.k_p, self.k_i, self.k_d) < 0.0:
            raise ValueError("speed gains must be nonnegative")


@dataclass
class ThrottleOutput:
    u: float
    p: float
    i: float
    d: float
    ff: float
    saturated: bool


class SpeedController:
    """Discrete feedforward + PID with clamped output and conditional integration.

    Backward-Euler integral; the derivative acts on the measured speed
    rather than the error, which avoids kicks on setpoint jumps.  While the
    output is clamped and the error would push it deeper into saturation,
    the integrator is frozen.
    """

    def __init__(self, gains: SpeedGains, limit: float = THROTTLE_LIMIT):
        self.gains = gains
        self.limit = float(limit)
        self.reset()

    def reset(self) -> None:
        self._integral = 0.0
        self._prev_meas = None

    @property
    def integral(self) -> float:
        return self._integral

    def step(self, v_ref: float, v_meas: float, dt: float) -> ThrottleOutput:
        if dt <= 0.0:
            raise ValueError("dt must be positive")
        g = self.gains
        e = v_ref - v_meas
        if self._prev_meas is None:
            deriv = 0.0
        else:
            deriv = -(v_meas - self._prev_meas) / dt
        self._prev_meas = v_meas

        ff = g.k_f * v_ref
        p = g.k_p * e
        d = g.k_d * deriv
        integral = self._integral + e * dt
        raw = ff + p + d + g.k_i * integral
        if (raw > self.limit and e > 0.0) or (raw < -self.limit and e < 0.0):
            integral = self._integral
            raw = ff + p + d + g.k_i * integral
        self._integral = integral

        u = min(max(raw, -self.limit), self.limit)
        return ThrottleOutput(u=u, p=p, i=g.k_i * integral, d=d, ff=ff, saturated=u != raw)


class MovingAverageFilter:
    """Arithmetic mean of the last ``window`` samples (fewer while filling)."""

    def __init__(self, window: int = 200):
        if window < 1:
            raise ValueError("window must be at least 1")
        self.window = int(window)
        self._buf = deque(maxlen=self.window)

    def push(self, sample: float) -> float:
        sample = float(sample)
        if not math.isfinite(sample):
            raise ValueError("sample must be finite")
        self._buf.append(sample)
        return math.fsum(self._buf) / len(self._buf)

    @property
    def value(self) -> float:
        if not self._buf:
            return 0.0
        return math.fsum(self._buf) / len(self._buf)

    def reset(self) -> None:
        self._buf.clear()
