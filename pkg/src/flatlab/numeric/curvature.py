"""Finite-difference curvature residuals for metrics sampled at points.

Nested second-order central stencils: metric gradients build the connection
at offset points, a second differencing builds the curvature, giving O(h^2)
estimates overall. Index conventions match the symbolic module."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ..tensor import Metric
from .fields import ScalarField2


class IllConditionedMetric(RuntimeError):
    """Metric matrix is numerically singular at a stencil point."""


class SampledMetric:
    """dim x dim symmetric float matrix as a function of a point."""

    def __init__(self, dim: int, fn: Callable[[Sequence[float]], np.ndarray],
                 cond_limit: float = 1e12):
        self.dim = dim
        self._fn = fn
        self.cond_limit = cond_limit

    def __call__(self, point: Sequence[float]) -> np.ndarray:
        g = np.asarray(self._fn(point), dtype=float)
        if g.shape != (self.dim, self.dim):
            raise ValueError(f"metric callable returned shape {g.shape}")
        if not np.allclose(g, g.T, rtol=0.0, atol=1e-12 * (1.0 + np.max(np.abs(g)))):
            raise ValueError("sampled metric is not symmetric")
        g = 0.5 * (g + g.T)
        if np.linalg.cond(g) > self.cond_limit:
            raise IllConditionedMetric("condition number beyond the guard")
        return g

    @classmethod
    def from_symbolic(cls, m: Metric) -> "SampledMetric":
        """Sample an exact metric through numeric evaluation of its entries."""
        coords = m.chart.coords
        entries = m.g

        def fn(point):
            env = dict(zip(coords, map(float, point)))
            out = np.empty((len(coords), len(coords)))
            for i in range(len(coords)):
                for j in range(len(coords)):
                    out[i, j] = entries[i][j].eval_numeric(env)
            return out

        return cls(len(coords), fn)

    @classmethod
    def from_kdv_field(cls, l: ScalarField2) -> "SampledMetric":
        """The 3D family with a numeric coefficient field (chart x, y, z):
        the l_x entry uses the field's derivative hook."""

        def fn(point):
            x, y, z = map(float, point)
            lv = float(l(x, z))
            lx = float(l.dx(x, z))
            g_xz = y * y * lv - 0.5
            g_zz = y * y * lv * lv - 2.0 * y * lx + lv
            return np.array([
                [y * y, 0.0, g_xz],
                [0.0, 0.0, 1.0],
                [g_xz, 1.0, g_zz],
            ])

        return cls(3, fn)


def _christoffel_at(m: SampledMetric, q: np.ndarray, h: float) -> np.ndarray:
    n = m.dim
    g0 = m(q)
    ginv = np.linalg.inv(g0)
    dg = np.empty((n, n, n))
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        dg[i] = (m(q + e) - m(q - e)) / (2.0 * h)
    gamma = np.empty((n, n, n))
    for k in range(n):
        for i in range(n):
            for j in range(n):
                acc = 0.0
                for mm in range(n):
                    acc += ginv[k, mm] * (dg[i][j, mm] + dg[j][i, mm] - dg[mm][i, j])
                gamma[k, i, j] = 0.5 * acc
    return gamma


@dataclass(frozen=True)
class CurvatureSample:
    h: float
    max_abs_riemann: float
    max_abs_ricci: float


def fd_curvature(m: SampledMetric, point: Sequence[float], h: float) -> CurvatureSample:
    """Max-abs Riemann and Ricci estimates at a point for one step size."""
    q = np.asarray(point, dtype=float)
    n = m.dim
    gamma0 = _christoffel_at(m, q, h)
    dgamma = np.empty((n, n, n, n))
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        dgamma[i] = (_christoffel_at(m, q + e, h) - _christoffel_at(m, q - e, h)) / (2.0 * h)
    riem = np.zeros((n, n, n, n))
    for l in range(n):
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    acc = dgamma[i][l, j, k] - dgamma[j][l, i, k]
                    for mm in range(n):
                        acc += gamma0[l, i, mm] * gamma0[mm, j, k] \
                            - gamma0[l, j, mm] * gamma0[mm, i, k]
                    riem[l, i, j, k] = acc
    ric = np.einsum("lljk->jk", riem)
    return CurvatureSample(h, float(np.max(np.abs(riem))), float(np.max(np.abs(ric))))


def convergence_order(samples: Sequence[tuple[float, float]]) -> float:
    """Least-squares slope of log(value) against log(h).

    Requires >= 3 samples with strictly decreasing h and positive values
    (non-positive values mean the estimates sit at the rounding floor)."""
    if len(samples) < 3:
        raise ValueError("need at least 3 (h, value) samples")
    hs = [h for h, _ in samples]
    vals = [v for _, v in samples]
    if any(h2 >= h1 for h1, h2 in zip(hs, hs[1:])):
        raise ValueError("step sizes must be strictly decreasing")
    if any(v <= 0.0 for v in vals):
        raise ValueError("non-positive residual: already at the rounding floor")
    slope = np.polyfit(np.log(hs), np.log(vals), 1)[0]
    return float(slope)


@dataclass(frozen=True)
class ResidualReport:
    """Curvature residual ladder at one probe point."""

    point: tuple[float, ...]
    entries: tuple[CurvatureSample, ...]
    riemann_order: float | None
    ricci_order: float | None
    saturated: bool

    def to_dict(self) -> dict:
        return {
            "point": list(self.point),
            "entries": [
                {"h": e.h, "max_abs_riemann": e.max_abs_riemann,
                 "max_abs_ricci": e.max_abs_ricci}
                for e in self.entries
            ],
            "riemann_order": self.riemann_order,
            "ricci_order": self.ricci_order,
            "saturated": self.saturated,
        }


_FLOOR = 1e-13


def residual_ladder(m: SampledMetric, point: Sequence[float],
                    hs: Sequence[float]) -> ResidualReport:
    """Run fd_curvature over a decreasing h-ladder and fit convergence orders;
    residuals at the rounding floor are reported as saturated instead of
    being fitted."""
    entries = tuple(fd_curvature(m, point, h) for h in hs)
    saturated = any(e.max_abs_riemann < _FLOOR for e in entries)
    riemann_order = ricci_order = None
    if not saturated and len(entries) >= 3:
        riemann_order = convergence_order([(e.h, e.max_abs_riemann) for e in entries])
        if all(e.max_abs_ricci > _FLOOR for e in entries):
            ricci_order = convergence_order([(e.h, e.max_abs_ricci) for e in entries])
    return ResidualReport(
        point=tuple(float(p) for p in point),
        entries=entries,
        riemann_order=riemann_order,
        ricci_order=ricci_order,
        saturated=saturated,
    )
