"""Finite-scale complexity estimators for metric dynamical systems.

Three classical complexity counts (cover refinement, spanning, separation)
over orbit-refinement metrics, an order-theory kernel for the structural
checks that tie them together, built-in test systems, and a CLI for sweeps
and verification suites.
"""

from .complexity import (
    EntropyEstimate,
    Extrapolation,
    FiniteSubset,
    RateSequence,
    cover_complexity,
    entropy_extrapolate,
    log_lim,
    log_rate,
    max_separated_count,
    metric_sep,
    metric_span,
    min_spanning_count,
    pressure_sweep,
)
from .covers import (
    CountResult,
    Cover,
    UniformDiskCover,
    coarser_than,
    diameter,
    dyn_refine,
    expand,
    free_udc,
    join,
    lebesgue_number,
    min_subcover_size,
    pullback,
)
from .kernels import BACKEND
from .metric import (
    BowenMetric,
    EndoMap,
    FiniteMetricSpace,
    bowen_ladder,
    bowen_metric,
    is_isometry,
    orbit,
    validate_map,
    validate_space,
)
from .order import (
    ChainFunctor,
    EntangleEdge,
    EntangleReport,
    FinitePreorder,
    MonotoneMap,
    check_colim_preservation,
    colim_chain,
    comma_objects,
    compose_post_rae,
    entangle_check,
    is_qualifying_pair,
    left_kan,
    nat_trans_exists,
    post_right_adjoint,
    right_kan,
    scale_eps,
)
from .systems import SystemSpec, build_system, ingest_trajectory

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BowenMetric",
    "ChainFunctor",
    "CountResult",
    "Cover",
    "EndoMap",
    "EntangleEdge",
    "EntangleReport",
    "EntropyEstimate",
    "Extrapolation",
    "FiniteMetricSpace",
    "FinitePreorder",
    "FiniteSubset",
    "MonotoneMap",
    "RateSequence",
    "SystemSpec",
    "UniformDiskCover",
    "bowen_ladder",
    "bowen_metric",
    "build_system",
    "check_colim_preservation",
    "coarser_than",
    "colim_chain",
    "comma_objects",
    "compose_post_rae",
    "cover_complexity",
    "diameter",
    "dyn_refine",
    "entangle_check",
    "entropy_extrapolate",
    "expand",
    "free_udc",
    "ingest_trajectory",
    "is_isometry",
    "is_qualifying_pair",
    "join",
    "lebesgue_number",
    "left_kan",
    "log_lim",
    "log_rate",
    "max_separated_count",
    "metric_sep",
    "metric_span",
    "min_spanning_count",
    "min_subcover_size",
    "nat_trans_exists",
    "orbit",
    "post_right_adjoint",
    "pressure_sweep",
    "pullback",
    "right_kan",
    "scale_eps",
    "validate_map",
    "validate_space",
]
