"""flatlab: exact symbolic flatness proofs for metrics built from KdV and
Krichever-Novikov solutions, with a numeric finite-difference cross-check."""

from .expr import (
    DivisionByZeroExpr,
    EvalDomainError,
    ExprError,
    GcdCapExceeded,
    Polynomial,
    RationalExpr,
    SubstitutionDomainError,
    UnknownVariableError,
    VarSet,
)
from .integrate import NonRationalAntiderivative, integrate_rational
from .knkdv import (
    KNSolution,
    b_from_f2,
    f1_from_f2,
    kdv_residual,
    kn_iterate,
    kn_residual,
    l_from_f2,
    m_constraint_residual,
)
from .metrics import (
    REGISTRY,
    extension_of_metric3d,
    metric3d,
    metric6d_kn,
    metric6d_product,
    ricci_flat_deformation,
    riemann_extension,
)
from .parser import ParseError, format_expr, parse
from .tensor import (
    Chart,
    Connection,
    CurvatureReport,
    Metric,
    Ricci,
    Riemann,
    SingularMetricError,
    analyze_curvature,
    christoffel,
    inverse_metric,
    is_flat,
    is_ricci_flat,
    ricci,
    riemann_from_connection,
)

__version__ = "0.1.0"

__all__ = [
    "Chart",
    "Connection",
    "CurvatureReport",
    "DivisionByZeroExpr",
    "EvalDomainError",
    "ExprError",
    "GcdCapExceeded",
    "KNSolution",
    "Metric",
    "NonRationalAntiderivative",
    "ParseError",
    "Polynomial",
    "REGISTRY",
    "RationalExpr",
    "Ricci",
    "Riemann",
    "SingularMetricError",
    "SubstitutionDomainError",
    "UnknownVariableError",
    "VarSet",
    "analyze_curvature",
    "b_from_f2",
    "christoffel",
    "extension_of_metric3d",
    "f1_from_f2",
    "format_expr",
    "integrate_rational",
    "inverse_metric",
    "is_flat",
    "is_ricci_flat",
    "kdv_residual",
    "kn_iterate",
    "kn_residual",
    "l_from_f2",
    "m_constraint_residual",
    "metric3d",
    "metric6d_kn",
    "metric6d_product",
    "parse",
    "ricci",
    "ricci_flat_deformation",
    "riemann_extension",
    "riemann_from_connection",
]
