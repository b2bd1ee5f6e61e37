"""Deterministic closed-loop rover simulation over a guided spline path.

One session couples the guiding field, the curvature-scheduled speed loop,
and the kinematic vehicle on a fixed time grid.  Runs are reproducible to
the byte given the same scenario and seed, whether stepped one tick at a
time or in a single batch.
"""

from __future__ import annotations

import dataclasses
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import analysis
from .bezier import (BezierSpline, Continuity, PointRole, enforce_continuity,
                     point_roles, spline_from_dict, spline_to_dict)
from .errors import FieldDegenerateError, LockedPointError, ScenarioError, SessionStateError
from .gvf import EPS_FIELD, GuidanceGains
from .speed import (MovingAverageFilter, SpeedController, SpeedGains,
                    SpeedSetpointParams, speed_setpoint)
from .vehicle import VehicleParams, steering_angle, wrap_angle

NOISE_KINDS = ("none", "uniform_disk", "clipped_gaussian")
MODES = ("closed_loop", "pure_field")
END_BEHAVIORS = ("reset", "finish")


@dataclass
class NoiseModel:
    """Bounded planar disturbance; the bound is hard (enforced by clipping)."""

    kind: str = "none"
    bound: float = 0.0
    sigma: float | None = None

    def sample(self, rng) -> tuple[float, float]:
        if self.kind == "none" or self.bound == 0.0:
            if self.kind != "none":
                rng.random(2)  # keep the stream aligned across bound changes
            return 0.0, 0.0
        if self.kind == "uniform_disk":
            u, a = rng.random(2)
            r = self.bound * math.sqrt(u)
            ang = math.tau * a
            return r * math.cos(ang), r * math.sin(ang)
        if self.kind == "clipped_gaussian":
            sigma = self.sigma if self.sigma is not None else 0.5 * self.bound
            dx, dy = rng.normal(0.0, sigma, 2)
            n = math.hypot(dx, dy)
            if n > self.bound:
                scale = self.bound / n
                dx *= scale
                dy *= scale
            return dx, dy
        raise ValueError(f"unknown noise kind {self.kind!r}")


@dataclass
class SpeedPlant:
    """First-order throttle-to-speed response: v settles to u / counts_per_mps."""

    counts_per_mps: float = 1000.0
    tau: float = 1.0


@dataclass
class Start:
    x: float = 0.0
    y: float = 0.0
    theta: float = 0.0
    v: float = 0.0
    w: float = 0.0


@dataclass
class Scenario:
    spline: dict
    guidance: GuidanceGains = field(default_factory=lambda: GuidanceGains(0.5, 0.5, 3.0))
    setpoint: SpeedSetpointParams = field(default_factory=lambda: SpeedSetpointParams(1.7, 2.7, 10.0))
    speed_gains: SpeedGains = field(default_factory=lambda: SpeedGains(1000.0, 3000.0, 300.0, 2000.0))
    filter_window: int = 200
    vehicle: VehicleParams = field(default_factory=VehicleParams)
    plant: SpeedPlant = field(default_factory=SpeedPlant)
    start: Start = field(default_factory=Start)
    dt: float = 0.01
    duration: float = 120.0
    noise: NoiseModel = field(default_factory=NoiseModel)
    seed: int = 0
    mode: str = "closed_loop"
    end_behavior: str = "reset"
    epath_per_segment: int = 1024
    name: str = ""

    def validate(self) -> list[tuple[str, str]]:
        errors = []
        if self.dt <= 0.0:
            errors.append(("dt", "must be positive"))
        if self.duration <= 0.0:
            errors.append(("duration", "must be positive"))
        if self.mode not in MODES:
            errors.append(("mode", f"must be one of {MODES}"))
        if self.end_behavior not in END_BEHAVIORS:
            errors.append(("end_behavior", f"must be one of {END_BEHAVIORS}"))
        if self.noise.kind not in NOISE_KINDS:
            errors.append(("noise.kind", f"must be one of {NOISE_KINDS}"))
        if self.noise.bound < 0.0:
            errors.append(("noise.bound", "must be nonnegative"))
        if self.filter_window < 1:
            errors.append(("filter_window", "must be at least 1"))
        if self.epath_per_segment < 8:
            errors.append(("epath_per_segment", "must be at least 8"))
        if self.plant.counts_per_mps <= 0.0:
            errors.append(("plant.counts_per_mps", "must be positive"))
        if self.plant.tau <= 0.0:
            errors.append(("plant.tau", "must be positive"))
        try:
            spline, _ = spline_from_dict(self.spline)
        except Exception as exc:
            errors.append(("spline", str(exc)))
        else:
            if not 0.0 <= self.start.w <= spline.num_segments:
                errors.append(("start.w", f"outside [0, {spline.num_segments}]"))
        return errors

    def to_dict(self) -> dict:
        d = {
            "name": self.name,
            "spline": self.spline,
            "guidance": dataclasses.asdict(self.guidance),
            "setpoint": dataclasses.asdict(self.setpoint),
            "speed_gains": dataclasses.asdict(self.speed_gains),
            "filter_window": self.filter_window,
            "vehicle": dataclasses.asdict(self.vehicle),
            "plant": dataclasses.asdict(self.plant),
            "start": dataclasses.asdict(self.start),
            "dt": self.dt,
            "duration": self.duration,
            "noise": dataclasses.asdict(self.noise),
            "seed": self.seed,
            "mode": self.mode,
            "end_behavior": self.end_behavior,
            "epath_per_segment": self.epath_per_segment,
        }
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Scenario":
        if not isinstance(d, dict):
            raise ScenarioError([("", "scenario must be a JSON object")])
        if "spline" not in d:
            raise ScenarioError([("spline", "required")])
        known = {f.name for f in dataclasses.fields(cls)} | {"notes"}
        unknown = set(d) - known
        if unknown:
            raise ScenarioError([(k, "unknown field") for k in sorted(unknown)])

        def sub(key, klass, **extra):
            raw = dict(d.get(key) or {})
            raw.update(extra)
            try:
                return klass(**raw)
            except (TypeError, ValueError) as exc:
                raise ScenarioError([(key, str(exc))]) from None

        sc = cls(
            spline=d["spline"],
            guidance=sub("guidance", GuidanceGains) if d.get("guidance") else cls.__dataclass_fields__["guidance"].default_factory(),
            setpoint=sub("setpoint", SpeedSetpointParams) if d.get("setpoint") else cls.__dataclass_fields__["setpoint"].default_factory(),
            speed_gains=sub("speed_gains", SpeedGains) if d.get("speed_gains") else cls.__dataclass_fields__["speed_gains"].default_factory(),
            filter_window=int(d.get("filter_window", 200)),
            vehicle=sub("vehicle", VehicleParams) if d.get("vehicle") else VehicleParams(),
            plant=sub("plant", SpeedPlant) if d.get("plant") else SpeedPlant(),
            start=sub("start", Start) if d.get("start") else Start(),
            dt=float(d.get("dt", 0.01)),
            duration=float(d.get("duration", 120.0)),
            noise=sub("noise", NoiseModel) if d.get("noise") else NoiseModel(),
            seed=int(d.get("seed", 0)),
            mode=str(d.get("mode", "closed_loop")),
            end_behavior=str(d.get("end_behavior", "reset")),
            epath_per_segment=int(d.get("epath_per_segment", 1024)),
            name=str(d.get("name", "")),
        )
        return sc


def load_scenario(path) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        return Scenario.from_dict(json.load(fh))


COLUMNS = [
    "t", "x", "y", "theta", "v", "w",
    "phi1", "phi2", "e_norm", "e_path", "lyapunov",
    "chi_p_norm", "chi3", "kappa", "theta_d_dot",
    "u_theta", "phi_steer", "steer_saturated",
    "v_ref", "v_raw", "v_filtered",
    "u_v", "u_v_p", "u_v_i", "u_v_d", "u_v_ff", "throttle_saturated",
    "d_x", "d_y", "d_norm", "w_reset",
]

_FLAG_COLUMNS = {"steer_saturated", "throttle_saturated", "w_reset"}


@dataclass
class Record:
    t: float = 0.0
    x: float = 0.0
    y: float = 0.0
    theta: float = 0.0
    v: float = 0.0
    w: float = 0.0
    phi1: float = 0.0
    phi2: float = 0.0
    e_norm: float = 0.0
    e_path: float = 0.0
    lyapunov: float = 0.0
    chi_p_norm: float = 0.0
    chi3: float = 0.0
    kappa: float = 0.0
    theta_d_dot: float = 0.0
    u_theta: float = 0.0
    phi_steer: float = 0.0
    steer_saturated: int = 0
    v_ref: float = 0.0
    v_raw: float = 0.0
    v_filtered: float = 0.0
    u_v: float = 0.0
    u_v_p: float = 0.0
    u_v_i: float = 0.0
    u_v_d: float = 0.0
    u_v_ff: float = 0.0
    throttle_saturated: int = 0
    d_x: float = 0.0
    d_y: float = 0.0
    d_norm: float = 0.0
    w_reset: int = 0

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


class SimLog:
    """Per-step records on a uniform time grid, plus the scenario and edit events."""

    columns = COLUMNS

    def __init__(self, scenario_dict: dict, records=None, events=None):
        self.scenario = scenario_dict
        self.records: list[Record] = list(records or [])
        self.events: list[dict] = list(events or [])
        self._cache: dict[str, np.ndarray] = {}

    def append(self, record: Record) -> None:
        self.records.append(record)
        self._cache.clear()

    def __len__(self):
        return len(self.records)

    def array(self, column: str) -> np.ndarray:
        if column not in COLUMNS:
            raise KeyError(column)
        if column not in self._cache:
            self._cache[column] = np.array([getattr(r, column) for r in self.records], dtype=float)
        return self._cache[column]

    def to_csv_text(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(COLUMNS))
        buf.write("\n")
        for r in self.records:
            vals = []
            for c in COLUMNS:
                v = getattr(r, c)
                vals.append(str(int(v)) if c in _FLAG_COLUMNS else repr(float(v)))
            buf.write(",".join(vals))
            buf.write("\n")
        return buf.getvalue()

    def write(self, csv_path, sidecar_path=None) -> None:
        with open(csv_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(self.to_csv_text())
        if sidecar_path is not None:
            sidecar = {"scenario": self.scenario, "events": self.events}
            with open(sidecar_path, "w", encoding="utf-8") as fh:
                json.dump(sidecar, fh, indent=2, sort_keys=True)
                fh.write("\n")

    @classmethod
    def read(cls, csv_path, sidecar_path=None) -> "SimLog":
        scenario = {}
        events = []
        if sidecar_path is not None:
            with open(sidecar_path, "r", encoding="utf-8") as fh:
                sidecar = json.load(fh)
            scenario = sidecar.get("scenario", {})
            events = sidecar.get("events", [])
        records = []
        with open(csv_path, "r", encoding="utf-8") as fh:
            header = fh.readline().strip().split(",")
            if header != COLUMNS:
                raise ValueError(f"unexpected log columns {header!r}")
            for line in fh:
                parts = line.strip().split(",")
                kwargs = {}
                for c, raw in zip(COLUMNS, parts):
                    kwargs[c] = int(raw) if c in _FLAG_COLUMNS else float(raw)
                records.append(Record(**kwargs))
        return cls(scenario, records, events)


def _draft_from_spline(spline: BezierSpline) -> list[np.ndarray]:
    """Editable representation: full first segment, free tails afterwards."""
    order = spline.continuity.order
    draft = [np.array(spline.segments[0].points)]
    for seg in spline.segments[1:]:
        draft.append(np.array(seg.points[order + 1:]))
    return draft


class SimSession:
    """Stateful stepper for one scenario; also the unit the service drives."""

    def __init__(self, scenario: Scenario):
        errors = scenario.validate()
        if errors:
            raise ScenarioError(errors)
        self.scenario = scenario
        spline, warnings = spline_from_dict(scenario.spline)
        self.spline_warnings = warnings
        self._install_spline(spline, bump=False)
        self.spline_version = 0
        self.total_steps = max(1, round(scenario.duration / scenario.dt))
        self.log = SimLog(scenario.to_dict())
        self.events = self.log.events
        self._reset_state()

    # -- lifecycle ---------------------------------------------------------

    def _reset_state(self):
        sc = self.scenario
        self.t = 0.0
        self.steps = 0
        self.finished = False
        st = sc.start
        self.state = (float(st.x), float(st.y), wrap_angle(float(st.theta)), float(st.v))
        self.w = float(st.w)
        self.rng = np.random.default_rng(sc.seed)
        self.filter = MovingAverageFilter(sc.filter_window)
        self.controller = SpeedController(sc.speed_gains)

    def reset(self) -> None:
        """Return to t = 0 with fresh controller, filter, and noise stream."""
        self._reset_state()
        self.log = SimLog(self.scenario.to_dict())
        self.events = self.log.events

    def _install_spline(self, spline: BezierSpline, bump=True):
        self.spline = spline
        self._draft = _draft_from_spline(spline)
        self._index = analysis.PathDistanceIndex(
            spline, per_segment=self.scenario.epath_per_segment)
        self._roles = {(fp.segment, fp.index): fp.role for fp in point_roles(spline)}
        first = spline.segments[0].points[0]
        last = spline.segments[-1].points[-1]
        self._closed = bool(np.hypot(*(first - last)) <= 1e-9)
        if bump:
            self.spline_version += 1

    # -- edits -------------------------------------------------------------

    def _record_event(self, kind: str, payload: dict) -> dict:
        event = {"step": self.steps, "kind": kind, "payload": payload}
        self.events.append(event)
        return event

    def move_points(self, moves) -> None:
        """Move free points/endpoints; one joint-recomputation per batch.

        ``moves`` is a list of (segment, index, x, y).  A non-initial
        segment's start point aliases the previous segment's end.
        """
        order = self.spline.continuity.order
        n = self.spline.degree
        draft = [np.array(p) for p in self._draft]
        for segment, index, x, y in moves:
            segment, index = int(segment), int(index)
            role = self._roles.get((segment, index))
            if role is None:
                raise LockedPointError(f"no control point ({segment}, {index})")
            if role is PointRole.CONTINUITY_LOCKED:
                raise LockedPointError(
                    f"point ({segment}, {index}) is fixed by {self.spline.continuity.name} "
                    f"joint continuity; move the previous segment's last points instead")
            if not (math.isfinite(float(x)) and math.isfinite(float(y))):
                raise ValueError("target coordinates must be finite")
            if segment > 0 and index == 0:
                segment, index = segment - 1, n  # shared joint, stored on the left segment
            if segment == 0:
                draft[0][index] = (x, y)
            else:
                draft[segment][index - (order + 1)] = (x, y)
        new_spline = enforce_continuity([p.tolist() for p in draft], self.spline.continuity)
        self._draft = draft
        self._install_spline(new_spline)
        for segment, index, x, y in moves:
            self._record_event("move_point", {
                "segment": int(segment), "index": int(index), "x": float(x), "y": float(y)})

    def set_guidance_gains(self, gains: GuidanceGains) -> None:
        self.scenario.guidance = gains
        self._record_event("set_guidance_gains", dataclasses.asdict(gains))

    def set_setpoint_params(self, params: SpeedSetpointParams) -> None:
        self.scenario.setpoint = params
        self._record_event("set_speed_params", dataclasses.asdict(params))

    def set_noise(self, noise: NoiseModel) -> None:
        if noise.kind not in NOISE_KINDS or noise.bound < 0.0:
            raise ValueError("invalid noise model")
        self.scenario.noise = noise
        self._record_event("set_noise", dataclasses.asdict(noise))

    def apply_event(self, event: dict) -> None:
        """Apply one recorded edit event (used when replaying a session)."""
        kind = event["kind"]
        payload = event.get("payload", {})
        if kind == "move_point":
            self.move_points([(payload["segment"], payload["index"],
                               payload["x"], payload["y"])])
        elif kind == "set_guidance_gains":
            self.set_guidance_gains(GuidanceGains(**payload))
        elif kind == "set_speed_params":
            self.set_setpoint_params(SpeedSetpointParams(**payload))
        elif kind == "set_noise":
            self.set_noise(NoiseModel(**payload))
        elif kind in ("w_reset", "aborted"):
            pass  # informational, re-derived by stepping
        else:
            raise ValueError(f"unknown event kind {kind!r}")

    # -- stepping ----------------------------------------------------------

    def _field_at(self, px, py, w):
        """Scalar field components; w wraps on closed paths, clamps otherwise."""
        spline = self.spline
        g = self.scenario.guidance
        n = float(spline.num_segments)
        if w < 0.0 or w > n:
            if self._closed:
                w = w % n  # periodic extension; the path is C2 across the seam
            else:
                w = 0.0 if w < 0.0 else n
        fx, fy = spline._point_xy(w)
        f1p, f2p = spline._derivative_xy(w, 1)
        phi1 = px - fx
        phi2 = py - fy
        s = float(g.direction)
        chi1 = s * f1p - g.k1 * phi1
        chi2 = s * f2p - g.k2 * phi2
        chi3 = s + g.k1 * phi1 * f1p + g.k2 * phi2 * f2p
        norm_p = math.hypot(chi1, chi2)
        if norm_p <= EPS_FIELD:
            self._record_event("aborted", {
                "reason": "projected field degenerate",
                "x": px, "y": py, "w": w, "chi3": chi3})
            self.finished = True
            raise FieldDegenerateError(
                f"projected field norm {norm_p:.3e} at w={w:.6f}", xi=(px, py, w))
        return fx, fy, f1p, f2p, phi1, phi2, chi1, chi2, chi3, norm_p

    def step(self) -> Record:
        if self.finished:
            raise SessionStateError("session already finished")
        if self.scenario.mode == "pure_field":
            rec = self._step_pure_field()
        else:
            rec = self._step_closed_loop()
        self.steps += 1
        self.t = self.steps * self.scenario.dt
        if self.steps >= self.total_steps:
            self.finished = True
        self.log.append(rec)
        return rec

    def run(self) -> SimLog:
        while not self.finished:
            self.step()
        return self.log

    def _step_closed_loop(self) -> Record:
        sc = self.scenario
        g = sc.guidance
        dt = sc.dt
        x, y, th, v = self.state
        w = self.w
        n_seg = float(self.spline.num_segments)

        dx_n, dy_n = sc.noise.sample(self.rng)
        mx, my = x + dx_n, y + dy_n

        fx, fy, f1p, f2p, _mphi1, _mphi2, chi1, chi2, chi3, norm_p = \
            self._field_at(mx, my, w)

        kappa = self.spline.curvature(w)
        v_ref = speed_setpoint(kappa, sc.setpoint)
        v_f = self.filter.push(v)
        out = self.controller.step(v_ref, v_f, dt)

        h1, h2 = math.cos(th), math.sin(th)
        wd = v * chi3 / norm_p
        f1pp, f2pp = self.spline._derivative_xy(w, 2)
        s = float(g.direction)
        jv1 = -g.k1 * (v * h1) + (s * f1pp + g.k1 * f1p) * wd
        jv2 = -g.k2 * (v * h2) + (s * f2pp + g.k2 * f2p) * wd
        td = (chi1 * jv2 - chi2 * jv1) / (norm_p * norm_p)
        u_theta = td - g.k_theta * (h2 * chi1 - h1 * chi2) / norm_p

        steer = steering_angle(u_theta, v, sc.vehicle)
        if sc.vehicle.actuated_steering:
            if steer.below_min_speed:
                u_eff = 0.0
            else:
                u_eff = v * math.tan(steer.phi) / sc.vehicle.wheelbase
        else:
            u_eff = u_theta

        phi1 = x - fx
        phi2 = y - fy
        e_norm = math.hypot(phi1, phi2)
        rec = Record(
            t=self.t, x=x, y=y, theta=th, v=v, w=w,
            phi1=phi1, phi2=phi2, e_norm=e_norm,
            e_path=self._index.query(x, y),
            lyapunov=0.5 * (g.k1 * phi1 * phi1 + g.k2 * phi2 * phi2),
            chi_p_norm=norm_p, chi3=chi3, kappa=kappa, theta_d_dot=td,
            u_theta=u_theta, phi_steer=steer.phi, steer_saturated=int(steer.saturated),
            v_ref=v_ref, v_raw=v, v_filtered=v_f,
            u_v=out.u, u_v_p=out.p, u_v_i=out.i, u_v_d=out.d, u_v_ff=out.ff,
            throttle_saturated=int(out.saturated),
            d_x=dx_n, d_y=dy_n, d_norm=math.hypot(dx_n, dy_n),
        )

        u_cmd = out.u
        inv_cpm = 1.0 / sc.plant.counts_per_mps
        inv_tau = 1.0 / sc.plant.tau

        def rates(x_, y_, th_, v_, w_):
            *_, c1, c2, c3, np_ = self._field_at(x_ + dx_n, y_ + dy_n, w_)
            return (v_ * math.cos(th_), v_ * math.sin(th_), u_eff,
                    (u_cmd * inv_cpm - v_) * inv_tau, v_ * c3 / np_)

        k1 = rates(x, y, th, v, w)
        h = 0.5 * dt
        k2 = rates(x + h * k1[0], y + h * k1[1], th + h * k1[2], v + h * k1[3], w + h * k1[4])
        k3 = rates(x + h * k2[0], y + h * k2[1], th + h * k2[2], v + h * k2[3], w + h * k2[4])
        k4 = rates(x + dt * k3[0], y + dt * k3[1], th + dt * k3[2], v + dt * k3[3], w + dt * k3[4])
        sixth = dt / 6.0
        x += sixth * (k1[0] + 2.0 * (k2[0] + k3[0]) + k4[0])
        y += sixth * (k1[1] + 2.0 * (k2[1] + k3[1]) + k4[1])
        th = wrap_angle(th + dt * u_eff)
        v += sixth * (k1[3] + 2.0 * (k2[3] + k3[3]) + k4[3])
        w += sixth * (k1[4] + 2.0 * (k2[4] + k3[4]) + k4[4])

        w = self._apply_end_behavior(w, n_seg, rec)
        self.state = (x, y, th, v)
        self.w = w
        return rec

    def _step_pure_field(self) -> Record:
        sc = self.scenario
        g = sc.guidance
        dt = sc.dt
        x, y = self.state[0], self.state[1]
        w = self.w
        n_seg = float(self.spline.num_segments)

        dx_n, dy_n = sc.noise.sample(self.rng)

        fx, fy, _f1p, _f2p, phi1, phi2, chi1, chi2, chi3, norm_p = self._field_at(x, y, w)
        kappa = self.spline.curvature(w)
        rec = Record(
            t=self.t, x=x, y=y, theta=math.atan2(chi2, chi1), v=norm_p, w=w,
            phi1=phi1, phi2=phi2, e_norm=math.hypot(phi1, phi2),
            e_path=self._index.query(x, y),
            lyapunov=0.5 * (g.k1 * phi1 * phi1 + g.k2 * phi2 * phi2),
            chi_p_norm=norm_p, chi3=chi3, kappa=kappa,
            d_x=dx_n, d_y=dy_n, d_norm=math.hypot(dx_n, dy_n),
        )

        def rates(x_, y_, w_):
            *_, c1, c2, c3, _np = self._field_at(x_, y_, w_)
            return (c1 + dx_n, c2 + dy_n, c3)

        k1 = rates(x, y, w)
        h = 0.5 * dt
        k2 = rates(x + h * k1[0], y + h * k1[1], w + h * k1[2])
        k3 = rates(x + h * k2[0], y + h * k2[1], w + h * k2[2])
        k4 = rates(x + dt * k3[0], y + dt * k3[1], w + dt * k3[2])
        sixth = dt / 6.0
        x += sixth * (k1[0] + 2.0 * (k2[0] + k3[0]) + k4[0])
        y += sixth * (k1[1] + 2.0 * (k2[1] + k3[1]) + k4[1])
        w += sixth * (k1[2] + 2.0 * (k2[2] + k3[2]) + k4[2])

        w = self._apply_end_behavior(w, n_seg, rec)
        self.state = (x, y, self.state[2], self.state[3])
        self.w = w
        return rec

    def _apply_end_behavior(self, w, n_seg, rec: Record):
        if w < 0.0:
            if self._closed and self.scenario.end_behavior == "reset":
                rec.w_reset = 1
                self._record_event("w_reset", {"from": float(w), "to": float(w + n_seg)})
                return w + n_seg
            return 0.0
        if w < n_seg:
            return w
        if self.scenario.end_behavior == "reset":
            # restart the lap, keeping the fraction already travelled past the end
            rec.w_reset = 1
            self._record_event("w_reset", {"from": float(w), "to": float(w - n_seg)})
            return w - n_seg
        self.finished = True
        return n_seg


def run(scenario: Scenario) -> SimLog:
    """Run a scenario start to finish; deterministic for a given seed."""
    return SimSession(scenario).run()


def replay_session(scenario: Scenario, events) -> SimLog:
    """Re-run a session, re-applying its recorded edits at the same steps."""
    session = SimSession(scenario)
    pending = sorted((e for e in events if e["kind"] not in ("w_reset", "aborted")),
                     key=lambda e: e["step"])
    i = 0
    while not session.finished:
        while i < len(pending) and pending[i]["step"] <= session.steps:
            session.apply_event(pending[i])
            i += 1
        session.step()
    return session.log
