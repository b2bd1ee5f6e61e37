import math

import numpy as np
import pytest

from _oracles import circle_spline, limacon_spline
from gvfnav import gvf
from gvfnav.bezier import BezierSegment, BezierSpline, Continuity
from gvfnav.errors import FieldDegenerateError
from gvfnav.gvf import (FieldEval, GuidanceGains, augmented_field,
                        disturbance_error_bound, field_grid, field_grid_csv,
                        field_jacobian, heading_control, lyapunov_value,
                        q_eigenvalues, q_matrix, surfaces, theta_d_dot, w_dot)
from gvfnav.sim import Scenario, SimSession
from gvfnav.bezier import spline_to_dict

RNG = np.random.default_rng(77)

GAINS = GuidanceGains(0.5, 0.5, 1.0)


def straight_spline():
    # collinear equally spaced points give f(w) = (w, 0) exactly
    return BezierSpline([BezierSegment([(k / 5.0, 0.0) for k in range(6)])])


def make_field(chi1, chi2, chi3):
    chi_p = np.array([chi1, chi2])
    n = float(np.hypot(chi1, chi2))
    return FieldEval(chi=np.array([chi1, chi2, chi3]), chi_p=chi_p,
                     chi_p_hat=chi_p / n, chi_p_norm=n)


# -- surfaces -----------------------------------------------------------------

def test_surfaces_on_path(looped_spline):
    for w in RNG.uniform(0, 3, 10):
        p = looped_spline.point(w)
        assert np.allclose(surfaces((p[0], p[1], w), looped_spline), (0.0, 0.0), atol=1e-12)


def test_surfaces_translation(looped_spline):
    q = looped_spline.point(0.3)
    e = surfaces((q[0] + 1.0, q[1] - 2.0, 0.3), looped_spline)
    assert np.allclose(e, (1.0, -2.0), atol=1e-12)


def test_surfaces_first_experiment_origin(first_experiment_spline):
    e = surfaces((0.0, 0.0, 0.0), first_experiment_spline)
    assert np.allclose(e, (11.62, -36.58), atol=1e-12)


# -- augmented field ------------------------------------------------------------

def test_field_on_path_is_propagation(looped_spline):
    for w in RNG.uniform(0, 3, 10):
        p = looped_spline.point(w)
        fe = augmented_field((p[0], p[1], w), looped_spline, GAINS)
        d = looped_spline.derivative(w, 1)
        assert np.allclose(fe.chi, (d[0], d[1], 1.0), atol=1e-9)


def test_field_straight_path_hand_value():
    fe = augmented_field((0.0, 2.0, 0.0), straight_spline(), GAINS)
    assert np.allclose(fe.chi, (1.0, -1.0, 1.0), atol=1e-12)
    assert np.allclose(fe.chi_p_hat, (1 / math.sqrt(2), -1 / math.sqrt(2)), atol=1e-12)
    assert fe.chi_p_norm == pytest.approx(math.sqrt(2), abs=1e-12)


def test_field_converging_orthogonal_to_propagation(looped_spline):
    for _ in range(50):
        w = float(RNG.uniform(0, 3))
        p = RNG.uniform(-20, 20, 2)
        k1, k2 = RNG.uniform(0.05, 4.0, 2)
        g = GuidanceGains(k1, k2, 1.0)
        fe = augmented_field((p[0], p[1], w), looped_spline, g)
        d = looped_spline.derivative(w, 1)
        prop = np.array([d[0], d[1], 1.0])
        conv = fe.chi - prop
        scale = max(1.0, np.linalg.norm(conv) * np.linalg.norm(prop))
        assert abs(conv @ prop) <= 1e-9 * scale


def test_field_never_zero_bulk(looped_spline, first_experiment_spline):
    # dense randomized sweep over states and gains on both test paths
    splines = (looped_spline, first_experiment_spline)
    total = 1_000_000
    per_w = 100
    count = 0
    min_norm_sq = math.inf
    while count < total:
        sp = splines[(count // per_w) % 2]
        w = float(RNG.uniform(0, sp.num_segments))
        ps = RNG.uniform(-80, 80, (per_w, 2))
        ks = np.exp(RNG.uniform(math.log(0.01), math.log(10.0), (per_w, 2)))
        for i in range(per_w):
            g = GuidanceGains(float(ks[i, 0]), float(ks[i, 1]), 1.0)
            *_, chi1, chi2, chi3, _np_ = gvf._components(ps[i, 0], ps[i, 1], w, sp, g)
            norm_sq = chi1 * chi1 + chi2 * chi2 + chi3 * chi3
            if norm_sq < min_norm_sq:
                min_norm_sq = norm_sq
        count += per_w
    assert min_norm_sq > 0.0


def test_field_nonzero_where_planar_part_cancels(looped_spline):
    # choose phi = f'/k so the planar projection vanishes exactly
    w = 1.37
    d = looped_spline.derivative(w, 1)
    f = looped_spline.point(w)
    k = 0.5
    p = (f[0] + d[0] / k, f[1] + d[1] / k)
    g = GuidanceGains(k, k, 1.0)
    *_, chi1, chi2, chi3, norm_p = gvf._components(p[0], p[1], w, looped_spline, g)
    assert norm_p <= 1e-9
    assert chi3 == pytest.approx(1.0 + d[0] ** 2 + d[1] ** 2, rel=1e-12)
    with pytest.raises(FieldDegenerateError):
        augmented_field((p[0], p[1], w), looped_spline, g)


# -- parameter dynamics ----------------------------------------------------------

def test_w_dot_examples():
    assert w_dot(2.0, make_field(3.0, 4.0, 1.0)) == pytest.approx(0.4, abs=1e-12)
    assert w_dot(0.0, make_field(3.0, 4.0, 1.0)) == 0.0
    fe = augmented_field((0.0, 2.0, 0.0), straight_spline(), GAINS)
    assert w_dot(1.0, fe) == pytest.approx(1 / math.sqrt(2), abs=1e-12)


def test_w_dot_sign_follows_chi3():
    assert w_dot(1.0, make_field(1.0, 0.0, -2.5)) == pytest.approx(-2.5, abs=1e-12)


# -- jacobian --------------------------------------------------------------------

def test_jacobian_straight_path():
    J = field_jacobian((0.0, 2.0, 0.0), straight_spline(), GAINS)
    assert np.allclose(J, [[-0.5, 0.0, 0.5], [0.0, -0.5, 0.0]], atol=1e-12)


def test_jacobian_matches_finite_differences(looped_spline):
    h = 1e-6
    for _ in range(25):
        w = float(RNG.uniform(0.1, 2.9))
        p = RNG.uniform(-15, 15, 2)
        k1, k2 = RNG.uniform(0.1, 3.0, 2)
        g = GuidanceGains(k1, k2, 1.0)
        xi = np.array([p[0], p[1], w])
        J = field_jacobian(xi, looped_spline, g)
        J_fd = np.empty((2, 3))
        for c in range(3):
            dxi = np.zeros(3)
            dxi[c] = h
            hi = augmented_field(xi + dxi, looped_spline, g).chi_p
            lo = augmented_field(xi - dxi, looped_spline, g).chi_p
            J_fd[:, c] = (hi - lo) / (2 * h)
        assert np.linalg.norm(J - J_fd) <= 1e-5 * max(1.0, np.linalg.norm(J))


def test_jacobian_position_columns_scale_with_gains(looped_spline):
    xi = (3.0, -2.0, 1.2)
    J1 = field_jacobian(xi, looped_spline, GuidanceGains(0.5, 0.5, 1.0))
    J3 = field_jacobian(xi, looped_spline, GuidanceGains(1.5, 1.5, 1.0))
    assert np.allclose(J3[:, :2], 3.0 * J1[:, :2], atol=1e-12)


# -- rotation rate ----------------------------------------------------------------

def test_theta_d_dot_straight_path_aligned_motion():
    sp = straight_spline()
    v = 1.7
    td = theta_d_dot((0.5, 0.0, 0.5), sp, GAINS, (v, 0.0, v))
    assert td == pytest.approx(0.0, abs=1e-12)


def test_theta_d_dot_equals_v_kappa_on_path(looped_spline):
    # for on-path field-aligned motion the rotation rate is exactly v * kappa
    for w in (0.2, 0.8, 1.5, 2.4):
        v = 1.3
        fe = augmented_field((*looped_spline.point(w), w), looped_spline, GAINS)
        xi_dot = (v * fe.chi_p_hat[0], v * fe.chi_p_hat[1], w_dot(v, fe))
        td = theta_d_dot((*looped_spline.point(w), w), looped_spline, GAINS, xi_dot)
        assert td == pytest.approx(v * looped_spline.curvature(w), rel=1e-9)


def test_theta_d_dot_circle_rate():
    R = 2.0
    sp = circle_spline(radius=R, n_segments=4)
    v = 0.9
    w = 1.3
    p = sp.point(w)
    fe = augmented_field((p[0], p[1], w), sp, GAINS)
    xi_dot = (v * fe.chi_p_hat[0], v * fe.chi_p_hat[1], w_dot(v, fe))
    td = theta_d_dot((p[0], p[1], w), sp, GAINS, xi_dot)
    assert abs(td) == pytest.approx(v / R, rel=1e-2)


def test_theta_d_dot_matches_fd_rotation(looped_spline):
    # integrate the raw field flow and difference the projected direction
    spec = spline_to_dict(looped_spline)
    sc = Scenario(spline=spec, dt=1e-4, duration=1.5, mode="pure_field",
                  guidance=GuidanceGains(0.5, 0.5, 1.0))
    sc.start.x, sc.start.y, sc.start.w = 9.0, 6.0, 0.2
    log = SimSession(sc).run()
    xs, ys, ws = log.array("x"), log.array("y"), log.array("w")
    fes = [augmented_field((xs[i], ys[i], ws[i]), looped_spline, sc.guidance)
           for i in range(len(xs))]
    angles = np.unwrap([math.atan2(fe.chi_p[1], fe.chi_p[0]) for fe in fes])
    checked = 0
    for i in range(50, len(xs) - 50, 97):
        if abs(ws[i] - round(ws[i])) < 0.02:
            continue  # away from joints, where the second derivative jumps
        fd = (angles[i - 2] - 8 * angles[i - 1] + 8 * angles[i + 1]
              - angles[i + 2]) / (12 * sc.dt)
        fe = fes[i]
        xi_dot = (fe.chi[0], fe.chi[1], fe.chi[2])
        td = theta_d_dot((xs[i], ys[i], ws[i]), looped_spline, sc.guidance, xi_dot)
        assert td == pytest.approx(fd, abs=1e-4 * max(1.0, abs(fd)))
        checked += 1
    assert checked > 30


# -- heading control ---------------------------------------------------------------

def test_heading_control_aligned_gives_feedforward():
    fe = make_field(3.0, 4.0, 1.0)
    u = heading_control(fe.chi_p_hat, fe, 0.7, GuidanceGains(1, 1, 5.0))
    assert u == pytest.approx(0.7, abs=1e-12)


def test_heading_control_hand_value():
    fe = make_field(1.0, 0.0, 1.0)
    u = heading_control((0.0, 1.0), fe, 0.0, GuidanceGains(1, 1, 1.0))
    assert u == pytest.approx(-1.0, abs=1e-12)


def test_heading_control_antialigned_correction_vanishes():
    fe = make_field(1.0, 0.0, 1.0)
    u = heading_control((-1.0, 0.0), fe, 0.3, GuidanceGains(1, 1, 2.0))
    assert u == pytest.approx(0.3, abs=1e-12)


def test_heading_control_requires_unit_vector():
    fe = make_field(1.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        heading_control((1.1, 0.0), fe, 0.0, GAINS)


# -- energy and eigenvalues -----------------------------------------------------------

def test_lyapunov_value_examples():
    assert lyapunov_value((0.0, 0.0), GAINS) == 0.0
    assert lyapunov_value((2.0, -1.0), GAINS) == pytest.approx(1.25, abs=1e-15)


def test_lyapunov_bounds_random():
    g = GuidanceGains(0.3, 1.7, 1.0)
    km, kM = 0.3, 1.7
    for _ in range(100):
        e = RNG.uniform(-10, 10, 2)
        V = lyapunov_value(e, g)
        n2 = float(e @ e)
        assert km * n2 / 2 - 1e-12 <= V <= kM * n2 / 2 + 1e-12


def test_q_eigenvalues_closed_form(first_experiment_spline):
    lmin, lmax = q_eigenvalues(first_experiment_spline, 0.7, GAINS)
    assert lmin == pytest.approx(0.25, abs=1e-15)
    d = first_experiment_spline.derivative(0.7, 1)
    assert lmax == pytest.approx(0.25 * (d @ d + 1.0), rel=1e-12)


def test_q_eigenvalues_zero_tangent_hypothetical():
    vals = np.linalg.eigvalsh(q_matrix((0.0, 0.0), GAINS))
    assert np.allclose(vals, [0.25, 0.25], atol=1e-15)


def test_q_eigenvalues_match_numeric_solver(first_experiment_spline):
    for w in RNG.uniform(0, 3, 20):
        lmin, lmax = q_eigenvalues(first_experiment_spline, w, GAINS)
        d = first_experiment_spline.derivative(w, 1)
        ref = np.linalg.eigvalsh(q_matrix(d, GAINS))
        assert lmin == pytest.approx(ref[0], abs=1e-10 * max(1.0, ref[1]))
        assert lmax == pytest.approx(ref[1], rel=1e-10)


def test_q_eigenvalues_unequal_gains(first_experiment_spline):
    g = GuidanceGains(0.4, 0.9, 1.0)
    lmin, lmax = q_eigenvalues(first_experiment_spline, 1.3, g)
    d = first_experiment_spline.derivative(1.3, 1)
    ref = np.linalg.eigvalsh(q_matrix(d, g))
    assert lmin == pytest.approx(ref[0], rel=1e-10)
    assert lmax == pytest.approx(ref[1], rel=1e-10)


def test_disturbance_error_bound_values():
    assert disturbance_error_bound(7.6, GAINS) == pytest.approx(15.2, abs=1e-12)
    assert disturbance_error_bound(5.3, GAINS) == pytest.approx(10.6, abs=1e-12)
    assert disturbance_error_bound(0.0, GAINS) == 0.0
    with pytest.raises(ValueError):
        disturbance_error_bound(1.0, GuidanceGains(0.4, 0.6, 1.0))
    with pytest.raises(ValueError):
        disturbance_error_bound(-1.0, GAINS)


# -- flow properties ---------------------------------------------------------------

def _pure_field_log(spline, gains, start, w0, dt=1e-3, duration=12.0, noise=None):
    sc = Scenario(spline=spline_to_dict(spline), dt=dt, duration=duration,
                  mode="pure_field", guidance=gains, seed=3)
    sc.start.x, sc.start.y, sc.start.w = start[0], start[1], w0
    if noise is not None:
        sc.noise = noise
    return SimSession(sc).run()


def test_exponential_convergence_envelope(looped_spline):
    g = GuidanceGains(0.5, 0.5, 1.0)
    for _ in range(8):
        w0 = float(RNG.uniform(0, 3))
        p0 = looped_spline.point(w0) + RNG.uniform(-20, 20, 2)
        log = _pure_field_log(looped_spline, g, p0, w0)
        e = log.array("e_norm")
        t = log.array("t")
        env = e[0] * np.exp(-0.5 * t)  # sqrt(kM/km) = 1, lambda_min/kM = k1
        assert np.all(e <= 1.05 * env + 1e-9)


def test_exponential_convergence_envelope_unequal_gains(looped_spline):
    g = GuidanceGains(0.4, 0.8, 1.0)
    km, kM = 0.4, 0.8
    for _ in range(4):
        w0 = float(RNG.uniform(0, 3))
        p0 = looped_spline.point(w0) + RNG.uniform(-15, 15, 2)
        log = _pure_field_log(looped_spline, g, p0, w0, duration=8.0)
        e = log.array("e_norm")
        t = log.array("t")
        lam_min = min(q_eigenvalues(looped_spline, w % 3.0, g)[0]
                      for w in log.array("w"))
        env = math.sqrt(kM / km) * e[0] * np.exp(-lam_min * t / kM)
        assert np.all(e <= 1.05 * env + 1e-9)


def test_lyapunov_nonincreasing_along_flow(looped_spline):
    g = GuidanceGains(0.5, 0.5, 1.0)
    log = _pure_field_log(looped_spline, g, (20.0, -10.0), 0.5, duration=15.0)
    V = log.array("lyapunov")
    assert np.all(np.diff(V) <= 1e-9)


def test_perturbed_flow_error_bound(looped_spline):
    from gvfnav.sim import NoiseModel
    g = GuidanceGains(0.5, 0.5, 1.0)
    D = 2.0
    log = _pure_field_log(looped_spline, g, (15.0, 9.0), 0.0, duration=25.0,
                          noise=NoiseModel(kind="uniform_disk", bound=D))
    e = log.array("e_norm")
    t = log.array("t")
    bound = D / 0.5
    post = e[t > 12.0]
    assert np.all(post <= bound * (1.0 + 1e-6))


def test_heading_error_decreases_along_controlled_vehicle(looped_spline):
    sc = Scenario(spline=spline_to_dict(looped_spline), dt=1e-3, duration=20.0,
                  guidance=GuidanceGains(0.5, 0.5, 3.0), seed=5)
    sc.start.x, sc.start.y, sc.start.theta = -10.0, -8.0, 2.0
    log = SimSession(sc).run()
    xs, ys, ws, ths = (log.array(c) for c in ("x", "y", "w", "theta"))
    vh = []
    for i in range(0, len(xs), 5):
        fe = augmented_field((xs[i], ys[i], ws[i]), looped_spline, sc.guidance)
        h = np.array([math.cos(ths[i]), math.sin(ths[i])])
        vh.append(0.5 * float((h - fe.chi_p_hat) @ (h - fe.chi_p_hat)))
    vh = np.array(vh)
    assert np.all(np.diff(vh) <= 1e-6)


# -- grid export --------------------------------------------------------------------

def test_field_grid_matches_pointwise(looped_spline):
    rows = field_grid(looped_spline, GAINS, 0.5, (-5.0, -5.0, 5.0, 5.0), 5)
    assert rows.shape == (25, 4)
    for x, y, u, v in rows[::7]:
        fe = augmented_field((x, y, 0.5), looped_spline, GAINS)
        assert np.allclose((u, v), fe.chi_p_hat, atol=1e-12)


def test_field_grid_csv_header(looped_spline):
    text = field_grid_csv(looped_spline, GAINS, 0.0, (-1, -1, 1, 1), 3)
    lines = text.strip().split("\n")
    assert lines[0] == "x,y,chi_hat_x,chi_hat_y"
    assert len(lines) == 10
