import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gvfnav.bezier import BezierSpline, Continuity, enforce_continuity


# Control points of the football-field loop; segment 0 in full, the rest as
# free tails [beta_3, beta_4, beta_5].
FIRST_EXPERIMENT_SEG0 = [(-11.62, 36.58), (14.93, 64.67), (16.02, -8.84),
                         (59.72, 1.15), (78.63, 33.59), (59.54, 49.69)]
FIRST_EXPERIMENT_SEG1_FREE = [(47.74, 40.36), (39.26, 49.47), (30.02, 40.59)]
FIRST_EXPERIMENT_SEG2_FREE = [(20.00, 26.13), (0.07, 14.38), (-11.63, 34.13)]


@pytest.fixture(scope="session")
def first_experiment_spline() -> BezierSpline:
    return enforce_continuity(
        [FIRST_EXPERIMENT_SEG0, FIRST_EXPERIMENT_SEG1_FREE, FIRST_EXPERIMENT_SEG2_FREE],
        Continuity.C2)


@pytest.fixture(scope="session")
def looped_spline() -> BezierSpline:
    from _oracles import limacon_spline
    return limacon_spline()
