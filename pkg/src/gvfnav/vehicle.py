"""Kinematic rover models and the heading-rate to steering-angle mapping."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple


def wrap_angle(a: float) -> float:
    """Wrap to (-pi, pi]."""
    if -math.pi < a <= math.pi:
        return a
    a = math.remainder(a, math.tau)
    if a <= -math.pi:
        a += math.tau
    return a


@dataclass(frozen=True)
class VehicleParams:
    """Geometry and steering limits; defaults follow a 25 cm-wheelbase rover.

    ``eps_speed`` guards the steering-angle arctangent near standstill.
    With ``actuated_steering`` the simulator passes commanded heading rates
    through the saturated virtual front wheel instead of applying them
    directly.
    """

    wheelbase: float = 0.25
    phi_max: float = math.pi / 6
    eps_speed: float = 0.05
    actuated_steering: bool = False

    def __post_init__(self):
        if self.wheelbase <= 0.0:
            raise ValueError("wheelbase must be positive")
        if not 0.0 < self.phi_max < math.pi / 2:
            raise ValueError("phi_max must lie in (0, pi/2)")
        if self.eps_speed < 0.0:
            raise ValueError("eps_speed must be nonnegative")


# Measured steering stops of the reference rover (inner/outer wheel).
MSA_INNER = math.radians(10.0)
MSA_OUTER = math.radians(15.0)


@dataclass(frozen=True)
class VehicleState:
    x: float
    y: float
    theta: float
    v: float


class SteeringAngle(NamedTuple):
    phi: float
    saturated: bool
    below_min_speed: bool


def steering_angle(u_theta: float, v: float, params: VehicleParams) -> SteeringAngle:
    """Virtual front-wheel angle realizing heading rate ``u_theta`` at speed ``v``.

    phi = arctan(l * u_theta / v), clamped to +-phi_max.  Below
    ``eps_speed`` the quotient blows up, so the angle reports zero with the
    low-speed flag set instead.
    """
    if v <= params.eps_speed:
        return SteeringAngle(0.0, False, True)
    phi = math.atan(params.wheelbase * u_theta / v)
    if phi > params.phi_max:
        return SteeringAngle(params.phi_max, True, False)
    if phi < -params.phi_max:
        return SteeringAngle(-params.phi_max, True, False)
    return SteeringAngle(phi, False, False)


def step_unicycle(state: VehicleState, u_theta: float, v_cmd: float, dt: float) -> VehicleState:
    """One RK4 step of the unicycle with speed and heading rate held constant."""
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    th = state.theta
    h = 0.5 * dt
    c1, s1 = math.cos(th), math.sin(th)
    t2 = th + h * u_theta
    c2, s2 = math.cos(t2), math.sin(t2)
    # stages 2 and 3 share the same heading for a constant turn rate
    t4 = th + dt * u_theta
    c4, s4 = math.cos(t4), math.sin(t4)
    x = state.x + v_cmd * dt / 6.0 * (c1 + 4.0 * c2 + c4)
    y = state.y + v_cmd * dt / 6.0 * (s1 + 4.0 * s2 + s4)
    return VehicleState(x, y, wrap_angle(t4), v_cmd)


@dataclass(frozen=True)
class CarState:
    x: float
    y: float
    theta: float
    phi: float


def step_car(state: CarState, u_phi: float, v: float, dt: float,
             params: VehicleParams) -> CarState:
    """One RK4 step of the front-steered model with steering rate ``u_phi``.

    The steering angle saturates at +-phi_max inside every stage, so the
    turn rate honors the mechanical stop even mid-step.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    l = params.wheelbase
    lim = params.phi_max

    def rates(th, phi):
        phi_c = min(max(phi, -lim), lim)
        return (v * math.cos(th), v * math.sin(th), v * math.tan(phi_c) / l, u_phi)

    x0, y0, th0, ph0 = state.x, state.y, state.theta, min(max(state.phi, -lim), lim)
    k1 = rates(th0, ph0)
    k2 = rates(th0 + 0.5 * dt * k1[2], ph0 + 0.5 * dt * k1[3])
    k3 = rates(th0 + 0.5 * dt * k2[2], ph0 + 0.5 * dt * k2[3])
    k4 = rates(th0 + dt * k3[2], ph0 + dt * k3[3])
    x = x0 + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
    y = y0 + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
    th = th0 + dt / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
    phi = ph0 + dt * u_phi
    return CarState(x, y, wrap_angle(th), min(max(phi, -lim), lim))
