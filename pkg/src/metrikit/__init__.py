"""Computational metric geometry on finite spaces and grid sets."""

__version__ = "0.1.0"

from .chains import (
    ChainQuery,
    ChainResult,
    cantor_space,
    chain_exists,
    is_chain,
    min_lambda,
    oscillation_bound,
    verify_chain_bound,
)
from .errors import MetrikitError
from .lipschitz import (
    LipschitzFit,
    ScalarField,
    distance_field,
    fit_constant,
    refinement_probe,
    verify_lipschitz,
)
from .metric import (
    REL_TOL,
    Correspondence,
    FiniteMetricSpace,
    MetricReport,
    distortion,
    qsum,
    snowflake,
    verify_metric,
    verify_ultrametric,
)
from .porosity import (
    CoverRecord,
    Cube,
    GridSet,
    PorosityReport,
    box_dimension_estimate,
    covering_count,
    dimension_upper_bound,
    porosity_probe,
    porous_by_subdivision,
    subcube_witness,
)
from .rug import RugPoint, ball_measure, dilate, rug_distance, rug_norm, vertical_field
