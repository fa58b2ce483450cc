"""Constructors for the built-in metric families, plus the doubled-chart
extension of an affine connection and the dy^2 deformation.

Registry names (used by the CLI): ``eq4`` (3D from a KdV coefficient l),
``eq1`` (6D from a KN solution F2), ``eq6`` (6D product from F2, L, M),
``eq8`` (6D extension of the 3D connection), ``thm4`` (eq8 plus eps*dy^2).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .expr import ExprError, RationalExpr, VarSet
from .knkdv import (
    DegenerateInput,
    b_from_f2,
    kn_residual,
    l_from_f2,
    m_constraint_residual,
)
from .tensor import Chart, Connection, Metric, christoffel


class VariableScopeError(ExprError):
    """An input function depends on a forbidden chart coordinate."""


class ConstraintError(ExprError):
    """A constructor-side compatibility condition fails."""


CHART_3D = ("x", "y", "z")
CHART_6D = ("x", "y", "z", "u", "v", "w")


def _check_scope(e: RationalExpr, forbidden: Sequence[str], what: str) -> None:
    vs = e.vars
    present = e.vars_present()
    for name in forbidden:
        if name in vs and vs.index(name) in present:
            raise VariableScopeError(f"{what} must not depend on chart coordinate {name!r}")


def _zero(vs: VarSet) -> RationalExpr:
    return RationalExpr.zero(vs)


def _c(vs: VarSet, q) -> RationalExpr:
    return RationalExpr.const(vs, q)


def _block3(vs: VarSet, l: RationalExpr, m: RationalExpr, axis: tuple[str, str, str]):
    """Shared shape of the 3D family in coordinates (a, b, c) ~ (x, y, z):
    g_aa = b^2, g_ac = b^2*l + m, g_bc = 1,
    g_cc = b^2*l^2 - 2*b*l_a + 2*l + 2*l*m."""
    a, b, c = axis
    yv = RationalExpr.var(vs, b)
    la = l.diff(a)
    one = RationalExpr.one(vs)
    z = _zero(vs)
    g_ac = yv * yv * l + m
    g_cc = yv * yv * l * l - 2 * yv * la + 2 * l + 2 * l * m
    return [
        [yv * yv, z, g_ac],
        [z, z, one],
        [g_ac, one, g_cc],
    ]


def metric3d(l: RationalExpr) -> Metric:
    """3D metric driven by a coefficient l(x, z):
    ds^2 = y^2 dx^2 + 2(y^2 l - 1/2) dx dz + 2 dy dz
           + (y^2 l^2 - 2 y l_x + l) dz^2.
    Flat exactly when l solves the KdV form."""
    vs = l.vars
    for c in CHART_3D:
        vs.add(c)
    _check_scope(l, ("y",), "l")
    chart = Chart(vs, CHART_3D)
    return Metric(chart, _block3(vs, l, _c(vs, Fraction(-1, 2)), CHART_3D))


def metric6d_kn(F2: RationalExpr) -> Metric:
    """6D metric driven by a KN solution F2(x, z): the (x,y,z) block is
    metric3d of the induced l, the (u,v,w) block couples through
    B(x,y,z)/(w*u + v*w + u*v)^2 on the off-diagonal slots."""
    vs = F2.vars
    for c in CHART_6D:
        vs.add(c)
    _check_scope(F2, ("y", "u", "v", "w"), "F2")
    if F2.diff("x").is_zero():
        raise DegenerateInput("F2 is constant in x")
    l = l_from_f2(F2, "thm3")
    if kn_residual(F2).is_zero():
        alt = l_from_f2(F2, "thm1")
        if l != alt:
            raise ConstraintError("internal: l closed forms disagree on a KN solution")
    B = b_from_f2(F2)
    u = RationalExpr.var(vs, "u")
    v = RationalExpr.var(vs, "v")
    w = RationalExpr.var(vs, "w")
    sigma = w * u + v * w + u * v
    s = B / (sigma * sigma)
    z = _zero(vs)
    top = _block3(vs, l, _c(vs, Fraction(-1, 2)), CHART_3D)
    rows = [[z] * 6 for _ in range(6)]
    for i in range(3):
        for j in range(3):
            rows[i][j] = top[i][j]
    for i, j in ((3, 4), (3, 5), (4, 5)):
        rows[i][j] = s
        rows[j][i] = s
    chart = Chart(vs, CHART_6D)
    return Metric(chart, rows)


def metric6d_product(F2: RationalExpr, L: RationalExpr, M: RationalExpr) -> Metric:
    """Block-diagonal 6D metric: (x,y,z) block from F2 with m = -1/2 fixed,
    (u,v,w) block from (L, M). The compatibility condition tying M to L is
    checked at construction (not assumed)."""
    vs = F2.vars
    if L.vars is not vs or M.vars is not vs:
        raise ExprError("F2, L, M must share one variable registry")
    for c in CHART_6D:
        vs.add(c)
    _check_scope(F2, ("y", "u", "v", "w"), "F2")
    _check_scope(L, ("x", "y", "z", "v"), "L")
    _check_scope(M, ("x", "y", "z", "v"), "M")
    if F2.diff("x").is_zero():
        raise DegenerateInput("F2 is constant in x")
    r = m_constraint_residual(L, M)
    if not r.is_zero():
        raise ConstraintError(f"M does not satisfy the compatibility condition; residual {r}")
    l = l_from_f2(F2, "thm3")
    if kn_residual(F2).is_zero():
        alt = l_from_f2(F2, "thm1")
        if l != alt:
            raise ConstraintError("internal: l closed forms disagree on a KN solution")
    z = _zero(vs)
    top = _block3(vs, l, _c(vs, Fraction(-1, 2)), CHART_3D)
    bottom = _block3(vs, L, M, ("u", "v", "w"))
    rows = [[z] * 6 for _ in range(6)]
    for i in range(3):
        for j in range(3):
            rows[i][j] = top[i][j]
            rows[3 + i][3 + j] = bottom[i][j]
    chart = Chart(vs, CHART_6D)
    return Metric(chart, rows)


def riemann_extension(conn: Connection, fiber: Sequence[str]) -> Metric:
    """Double the chart of a symmetric connection: with fiber coordinates
    xi_k, the metric is g_ij = -2 * sum_k Gamma^k_ij * xi_k on base pairs,
    the identity pairing between base and fiber, and zero on fiber pairs."""
    base = conn.chart.coords
    n = len(base)
    fiber = tuple(fiber)
    if len(fiber) != n:
        raise ExprError(f"fiber must have {n} coordinates, got {len(fiber)}")
    if set(fiber) & set(base):
        raise ExprError("fiber coordinates must be disjoint from base coordinates")
    vs = conn.chart.vars
    xi = [RationalExpr.var(vs, vs.name(vs.add(f))) for f in fiber]
    zero = RationalExpr.zero(vs)
    one = RationalExpr.one(vs)
    rows = [[zero] * (2 * n) for _ in range(2 * n)]
    for i in range(n):
        for j in range(i, n):
            terms = []
            for k in range(n):
                gam = conn.gamma[k][i][j]
                if not gam.is_zero():
                    terms.append(gam * xi[k])
            acc = zero
            for t in terms:
                acc = acc + t
            val = -2 * acc if terms else zero
            rows[i][j] = val
            rows[j][i] = val
        rows[i][n + i] = one
        rows[n + i][i] = one
    chart = Chart(vs, tuple(base) + fiber)
    return Metric(chart, rows)


def ricci_flat_deformation(m: Metric, eps) -> Metric:
    """Add eps to g_yy; eps may be any expression free of chart coordinates
    (exact rational constants and a symbolic deformation parameter alike)."""
    vs = m.chart.vars
    if isinstance(eps, (int, Fraction)):
        eps = RationalExpr.const(vs, eps)
    if eps.vars is not vs:
        raise ExprError("eps must live in the metric's variable registry")
    _check_scope(eps, m.chart.coords, "eps")
    try:
        yi = m.chart.coords.index("y")
    except ValueError:
        raise ExprError("metric has no coordinate named 'y'") from None
    rows = [list(r) for r in m.g]
    rows[yi][yi] = rows[yi][yi] + eps
    return Metric(m.chart, rows)


def extension_of_metric3d(l: RationalExpr) -> Metric:
    """Extension of the 3D family's connection with fiber (u, v, w)."""
    return riemann_extension(christoffel(metric3d(l)), ("u", "v", "w"))


# ---------------------------------------------------------------------------
# named-metric registry for the CLI


@dataclass(frozen=True)
class MetricFamily:
    name: str
    params: tuple[str, ...]
    build: Callable[..., Metric]
    expect_flat: bool
    expect_ricci_flat: bool
    expect_curved: bool  # nonzero Riemann expected alongside ricci-flatness


def _build_eq4(params: Mapping[str, RationalExpr]) -> Metric:
    return metric3d(params["l"])


def _build_eq1(params: Mapping[str, RationalExpr]) -> Metric:
    return metric6d_kn(params["F2"])


def _build_eq6(params: Mapping[str, RationalExpr]) -> Metric:
    return metric6d_product(params["F2"], params["L"], params["M"])


def _build_eq8(params: Mapping[str, RationalExpr]) -> Metric:
    return extension_of_metric3d(params["l"])


def _build_thm4(params: Mapping[str, RationalExpr]) -> Metric:
    eps = params.get("eps")
    if eps is None:
        eps = RationalExpr.const(params["l"].vars, 1)
    return ricci_flat_deformation(extension_of_metric3d(params["l"]), eps)


REGISTRY: dict[str, MetricFamily] = {
    "eq4": MetricFamily("eq4", ("l",), _build_eq4, True, True, False),
    "eq1": MetricFamily("eq1", ("F2",), _build_eq1, True, True, False),
    "eq6": MetricFamily("eq6", ("F2", "L", "M"), _build_eq6, True, True, False),
    "eq8": MetricFamily("eq8", ("l",), _build_eq8, True, True, False),
    "thm4": MetricFamily("thm4", ("l",), _build_thm4, False, True, True),
}
