"""Numeric cross-validation wing: KdV solver, soliton fields, sampled-metric
curvature residuals."""

from .curvature import (
    CurvatureSample,
    IllConditionedMetric,
    ResidualReport,
    SampledMetric,
    convergence_order,
    fd_curvature,
    residual_ladder,
)
from .fields import (
    AnalyticField,
    Grid1D,
    GridSliceField,
    ScalarField2,
    constant_field,
    soliton,
    zero_field,
)
from .kernels import BACKEND
from .solver import CFLViolationError, InstabilityError, SolveResult, cfl_limit, solve_kdv

__all__ = [
    "AnalyticField",
    "BACKEND",
    "CFLViolationError",
    "CurvatureSample",
    "Grid1D",
    "GridSliceField",
    "IllConditionedMetric",
    "InstabilityError",
    "ResidualReport",
    "SampledMetric",
    "ScalarField2",
    "SolveResult",
    "cfl_limit",
    "constant_field",
    "convergence_order",
    "fd_curvature",
    "residual_ladder",
    "soliton",
    "solve_kdv",
    "zero_field",
]
