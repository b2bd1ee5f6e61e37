"""Guiding-vector-field navigation over C2 Bezier splines."""

from .bezier import (BezierSegment, BezierSpline, Continuity, FreePointIndex,
                     PointRole, configurable_points, convex_hull,
                     enforce_continuity, load_spline, point_roles, save_spline,
                     spline_from_dict, spline_to_dict)
from .gvf import (FieldEval, GuidanceGains, augmented_field,
                  disturbance_error_bound, field_grid, field_grid_csv,
                  field_jacobian, heading_control, lyapunov_value,
                  q_eigenvalues, surfaces, theta_d_dot, w_dot)
from .sim import (NoiseModel, Record, Scenario, SimLog, SimSession, SpeedPlant,
                  Start, load_scenario, replay_session, run)
from .speed import (MovingAverageFilter, SpeedController, SpeedGains,
                    SpeedSetpointParams, speed_setpoint)
from .vehicle import (CarState, VehicleParams, VehicleState, steering_angle,
                      step_car, step_unicycle, wrap_angle)

__version__ = "0.1.0"


def bundled_config(name: str):
    """Load one of the packaged example configs by stem name."""
    import json
    from importlib import resources

    path = resources.files(__name__).joinpath(f"data/{name}.json")
    with path.open("r", encoding="utf-8") as fh:
        return json.load(fh)
