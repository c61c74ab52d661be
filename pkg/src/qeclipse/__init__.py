"""Separability of two Euclidean balls under dithered quantised Gaussian embeddings."""

from qeclipse.geometry import (
    Ball,
    CapAngle,
    DifferenceBall,
    cap_half_angle,
    difference_set,
    mean_width_estimate,
    separation,
    width_sample,
)
from qeclipse.embedding import (
    KAPPA0,
    QuantisedMap,
    SensingMatrix,
    SoftDistanceParams,
    apply,
    draw_dither,
    draw_sensing,
    hard_distance,
    l1_distance,
    quantise,
    soft_distance,
    soft_l1_distance,
)
from qeclipse.solvers import (
    ConeMargins,
    MarginResult,
    SolverConfig,
    cone_margins,
    infinity_margin,
    linear_eclipse_holds,
)
from qeclipse.certificates import (
    ProbabilityEstimates,
    TrialOutcome,
    collision_search,
    estimate,
    pbar_indicator,
    pbarbar_factor,
)
from qeclipse.bounds import BoundConfig, ball_width_bound, prop1_m, prop2_m

__version__ = "0.1.0"
