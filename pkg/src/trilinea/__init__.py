"""Rigid triangles with vertices sliding on three straight lines.

Decides when continuous motion is possible, generates it (the hypocycloid
straight-line drawer and its lifts to higher dimensions), and enumerates
static placements of a triangle on three arbitrary lines.
"""

from .errors import *  # noqa: F401,F403
from .geometry import (
    Line,
    PairGeometry,
    SceneClass,
    SceneTag,
    classify_scene,
    common_perpendicular,
    foot_offset,
    project_out,
)
from .mechanism import (
    CircleCheck,
    FeasibilityReport,
    Mechanism,
    MotionState,
    RollingCircleModel,
    Trace,
    TriangleSpec,
    Verdict,
    carry_third_vertex,
    circumcircle_check,
    feasibility,
    motion_state,
    observed_range,
    rolling_circle_point,
    rolling_equivalence,
    rolling_model,
    trace,
)
from .pairwise import (
    EllipseParams,
    RangeInterval,
    ellipse_params,
    range_interval,
    segment_position,
)
from .solver import (
    BEZOUT_BOUND,
    Configuration,
    ConfigurationSet,
    Elimination,
    eliminate_t3,
    match_configurations,
    oracle_sweep,
    solve_configurations,
)

__version__ = "0.1.0"
