import math

import numpy as np
import pytest

from gvfnav.vehicle import (CarState, VehicleParams, VehicleState,
                            steering_angle, step_car, step_unicycle, wrap_angle)


def test_straight_motion_exact():
    s = VehicleState(0.0, 0.0, 0.0, 1.0)
    s = step_unicycle(s, u_theta=0.0, v_cmd=1.0, dt=1.0)
    assert (s.x, s.y) == (1.0, 0.0)
    assert s.theta == 0.0


def test_constant_turn_traces_circle():
    # closed-form orbit: radius v/omega; period chosen as an exact step multiple
    omega, v, dt = math.pi / 4, 1.3, 1e-3
    steps = 8000  # 2*pi/omega = 8 s
    s = VehicleState(0.0, 0.0, 0.0, v)
    radius = v / omega
    for _ in range(steps):
        s = step_unicycle(s, omega, v, dt)
        # stay on the circle centred at (0, radius) the whole way round
        assert math.hypot(s.x, s.y - radius) == pytest.approx(radius, abs=1e-6)
    assert math.hypot(s.x, s.y) < 1e-6


def test_zero_speed_only_heading_changes():
    s = VehicleState(2.0, 3.0, 0.5, 0.0)
    s2 = step_unicycle(s, u_theta=0.25, v_cmd=0.0, dt=2.0)
    assert (s2.x, s2.y) == (2.0, 3.0)
    assert s2.theta == pytest.approx(1.0, abs=1e-15)


def test_heading_wraps():
    s = VehicleState(0.0, 0.0, 3.0, 0.0)
    s = step_unicycle(s, u_theta=1.0, v_cmd=0.0, dt=1.0)
    assert -math.pi < s.theta <= math.pi
    assert s.theta == pytest.approx(4.0 - 2 * math.pi, abs=1e-12)
    for a in (-7.0, 7.0, 3.141592, -3.2, 12.56637):
        assert -math.pi < wrap_angle(a) <= math.pi + 1e-15


def test_lateral_slip_is_second_order():
    # displacement orthogonal to the initial heading shrinks like dt^2
    v, omega = 1.0, 2.0
    laterals = []
    for dt in (1e-2, 5e-3, 2.5e-3):
        s = step_unicycle(VehicleState(0, 0, 0, v), omega, v, dt)
        laterals.append(abs(s.y))
    r1 = laterals[0] / laterals[1]
    r2 = laterals[1] / laterals[2]
    assert r1 == pytest.approx(4.0, rel=0.05)
    assert r2 == pytest.approx(4.0, rel=0.05)


def test_rk4_local_order():
    # one step versus the closed-form circle: local error ~ dt^5
    omega, v = 1.0, 1.0
    def exact(dt):
        return np.array([math.sin(omega * dt) * v / omega,
                         (1 - math.cos(omega * dt)) * v / omega])
    dts = np.array([0.4, 0.2, 0.1, 0.05])
    errs = []
    for dt in dts:
        s = step_unicycle(VehicleState(0, 0, 0, v), omega, v, float(dt))
        errs.append(np.linalg.norm(np.array([s.x, s.y]) - exact(float(dt))))
    slope = np.polyfit(np.log(dts), np.log(errs), 1)[0]
    assert 4.5 <= slope <= 5.5


def test_half_step_richardson():
    omega, v, dt = 1.5, 1.0, 0.05
    one = step_unicycle(VehicleState(0, 0, 0, v), omega, v, dt)
    half = step_unicycle(step_unicycle(VehicleState(0, 0, 0, v), omega, v, dt / 2),
                         omega, v, dt / 2)
    gap = math.hypot(one.x - half.x, one.y - half.y)
    assert gap < 1e-7  # fifth-order local difference at dt = 0.05
    assert gap > 0.0


# -- steering ------------------------------------------------------------------------

def test_steering_zero_command():
    p = VehicleParams()
    sa = steering_angle(0.0, 1.0, p)
    assert sa.phi == 0.0 and not sa.saturated and not sa.below_min_speed


def test_steering_frozen_arctangent():
    # atan(0.25 * 1 / 1) evaluated with mpmath to 30 digits
    sa = steering_angle(1.0, 1.0, VehicleParams())
    assert sa.phi == pytest.approx(0.24497866312686414, abs=1e-15)


def test_steering_saturates():
    p = VehicleParams()
    sa = steering_angle(20.0, 1.0, p)
    assert sa.phi == pytest.approx(math.pi / 6, abs=1e-15)
    assert sa.saturated
    sa = steering_angle(-20.0, 1.0, p)
    assert sa.phi == pytest.approx(-math.pi / 6, abs=1e-15)


def test_steering_below_min_speed():
    sa = steering_angle(3.0, 0.01, VehicleParams())
    assert sa.phi == 0.0
    assert sa.below_min_speed


def test_vehicle_params_validation():
    with pytest.raises(ValueError):
        VehicleParams(wheelbase=0.0)
    with pytest.raises(ValueError):
        VehicleParams(phi_max=2.0)


# -- front-steered model ----------------------------------------------------------------

def test_car_with_zero_steer_matches_unicycle():
    p = VehicleParams()
    car = CarState(0.0, 0.0, 0.3, 0.0)
    uni = VehicleState(0.0, 0.0, 0.3, 1.2)
    for _ in range(100):
        car = step_car(car, u_phi=0.0, v=1.2, dt=0.01, params=p)
        uni = step_unicycle(uni, u_theta=0.0, v_cmd=1.2, dt=0.01)
    assert car.x == pytest.approx(uni.x, abs=1e-12)
    assert car.y == pytest.approx(uni.y, abs=1e-12)
    assert car.theta == pytest.approx(uni.theta, abs=1e-12)


def test_car_constant_steer_turning_radius():
    p = VehicleParams(phi_max=math.pi / 4)
    phi0 = 0.3
    v, dt = 1.0, 1e-3
    radius = p.wheelbase / math.tan(phi0)
    car = CarState(0.0, 0.0, 0.0, phi0)
    centre = (0.0, radius)
    for _ in range(2000):
        car = step_car(car, u_phi=0.0, v=v, dt=dt, params=p)
        assert math.hypot(car.x - centre[0], car.y - centre[1]) == pytest.approx(
            radius, abs=1e-6)


def test_car_steer_clamped_to_stop():
    p = VehicleParams()
    car = CarState(0.0, 0.0, 0.0, 0.0)
    for _ in range(200):
        car = step_car(car, u_phi=5.0, v=1.0, dt=0.01, params=p)
        assert abs(car.phi) <= p.phi_max + 1e-15
    assert car.phi == pytest.approx(p.phi_max, abs=1e-12)
    # at the stop, the achieved turn rate gives the minimum radius l/tan(phi_max)
    before = car
    after = step_car(before, u_phi=5.0, v=1.0, dt=0.001, params=p)
    rate = (after.theta - before.theta) / 0.001
    assert rate == pytest.approx(math.tan(p.phi_max) / p.wheelbase, rel=1e-6)
