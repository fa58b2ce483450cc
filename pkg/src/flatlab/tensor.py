"""Exact tensor calculus over rational expressions: metric inverse,
Levi-Civita connection, Riemann and Ricci tensors, flatness predicates.

Index conventions (fixed here once; verdicts are convention-independent):

    R^l_ijk = d_i Gamma^l_jk - d_j Gamma^l_ik
              + Gamma^l_im Gamma^m_jk - Gamma^l_jm Gamma^m_ik
    Ric_jk  = R^l_ljk   (contraction on the first upper / first lower slot)

All values are immutable; independent components may be computed
concurrently since they share only immutable inputs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .expr import ExprError, RationalExpr, VarSet, sum_exprs


class SingularMetricError(ExprError):
    """det(g) is identically zero."""


class DimensionError(ExprError):
    pass


@dataclass(frozen=True)
class Chart:
    """Ordered coordinate chart over a shared variable registry."""

    vars: VarSet
    coords: tuple[str, ...]

    def __post_init__(self):
        if not (1 <= len(self.coords) <= 8):
            raise DimensionError("chart dimension must be between 1 and 8")
        if len(set(self.coords)) != len(self.coords):
            raise DimensionError("chart coordinates must be distinct")
        for c in self.coords:
            self.vars.add(c)

    @property
    def dim(self) -> int:
        return len(self.coords)

    def indices(self) -> tuple[int, ...]:
        return tuple(self.vars.index(c) for c in self.coords)


def _as_matrix(rows) -> tuple[tuple[RationalExpr, ...], ...]:
    return tuple(tuple(r) for r in rows)


class Metric:
    """Symmetric matrix of expressions over a chart, det(g) not identically 0
    (checked when the inverse is first needed)."""

    __slots__ = ("chart", "g")

    def __init__(self, chart: Chart, g):
        g = _as_matrix(g)
        n = chart.dim
        if len(g) != n or any(len(row) != n for row in g):
            raise DimensionError("metric matrix shape does not match the chart")
        for i in range(n):
            for j in range(i + 1, n):
                if g[i][j] is not g[j][i] and g[i][j] != g[j][i]:
                    raise ExprError(f"metric is not symmetric at ({i},{j})")
        self.chart = chart
        self.g = g

    @property
    def dim(self) -> int:
        return self.chart.dim


class Connection:
    """Christoffel symbols gamma[k][i][j] (upper index first), symmetric in
    the lower pair."""

    __slots__ = ("chart", "gamma")

    def __init__(self, chart: Chart, gamma):
        self.chart = chart
        self.gamma = tuple(_as_matrix(plane) for plane in gamma)

    @property
    def dim(self) -> int:
        return self.chart.dim


class Riemann:
    __slots__ = ("chart", "r")

    def __init__(self, chart: Chart, r):
        self.chart = chart
        self.r = r

    @property
    def dim(self) -> int:
        return self.chart.dim


class Ricci:
    __slots__ = ("chart", "ric")

    def __init__(self, chart: Chart, ric):
        self.chart = chart
        self.ric = _as_matrix(ric)

    @property
    def dim(self) -> int:
        return self.chart.dim


@dataclass(frozen=True)
class CurvatureReport:
    """Verdicts plus witnesses of a full curvature computation.

    ``nonzero_riemann_indices`` lists representatives with i < j (the i > j
    mirrors are implied by antisymmetry); ``witness`` is one nonzero Riemann
    component as an expression string, or None when the metric is flat.
    """

    dim: int
    flat: bool
    ricci_flat: bool
    nonzero_riemann_indices: tuple[tuple[int, int, int, int], ...]
    witness: str | None

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "flat": self.flat,
            "ricci_flat": self.ricci_flat,
            "nonzero_riemann_indices": [list(ix) for ix in self.nonzero_riemann_indices],
            "witness": self.witness,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


# ---------------------------------------------------------------------------
# metric inverse


def inverse_metric(m: Metric):
    """Exact inverse as a dim x dim matrix of expressions.

    Structural fast paths: connected-component block splitting, blocks whose
    nonzero entries all equal one expression, and the doubled-chart pattern
    [[C, I], [I, 0]] produced by the extension construction; the fallback is
    the adjugate.
    """
    n = m.dim
    vs = m.chart.vars
    comps = _components(m.g, n)
    inv = [[RationalExpr.zero(vs) for _ in range(n)] for _ in range(n)]
    for comp in comps:
        block = [[m.g[i][j] for j in comp] for i in comp]
        binv = _invert_block(block, vs)
        for a, i in enumerate(comp):
            for b, j in enumerate(comp):
                inv[i][j] = binv[a][b]
    return _as_matrix(inv)


def _components(g, n: int) -> list[list[int]]:
    seen = [False] * n
    comps = []
    for s in range(n):
        if seen[s]:
            continue
        stack, comp = [s], []
        seen[s] = True
        while stack:
            i = stack.pop()
            comp.append(i)
            for j in range(n):
                if not seen[j] and (not g[i][j].is_zero() or not g[j][i].is_zero()):
                    seen[j] = True
                    stack.append(j)
        comps.append(sorted(comp))
    return comps


def _invert_block(g, vs: VarSet):
    n = len(g)
    if n == 1:
        if g[0][0].is_zero():
            raise SingularMetricError("1x1 block is zero")
        return [[RationalExpr.one(vs) / g[0][0]]]
    uniform = _uniform_inverse(g, vs)
    if uniform is not None:
        return uniform
    ext = _extension_inverse(g, vs)
    if ext is not None:
        return ext
    return _adjugate_inverse(g, vs)


def _uniform_inverse(g, vs: VarSet):
    """Inverse of a block whose nonzero entries are all the same expression s:
    invert the 0/1 pattern over exact rationals and divide by s."""
    n = len(g)
    s = None
    pattern = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            e = g[i][j]
            if e.is_zero():
                continue
            if s is None:
                s = e
            elif e is not s and e.num.terms != s.num.terms:
                return None
            elif e is not s and e.den.terms != s.den.terms:
                return None
            pattern[i][j] = 1
    if s is None:
        raise SingularMetricError("zero block")
    pat_inv = _fraction_inverse(pattern)
    if pat_inv is None:
        raise SingularMetricError("structurally singular block")
    return [[RationalExpr.const(vs, q) / s if q else RationalExpr.zero(vs)
             for q in row] for row in pat_inv]


def _fraction_inverse(rows):
    n = len(rows)
    M = [[Fraction(rows[i][j]) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)]
         for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col]), None)
        if piv is None:
            return None
        M[col], M[piv] = M[piv], M[col]
        f = M[col][col]
        M[col] = [x / f for x in M[col]]
        for r in range(n):
            if r != col and M[r][col]:
                fr = M[r][col]
                M[r] = [a - fr * b for a, b in zip(M[r], M[col])]
    return [row[n:] for row in M]


def _extension_inverse(g, vs: VarSet):
    """[[C, I], [I, 0]]  ->  [[0, I], [I, -C]] (det = +-1, always regular)."""
    n = len(g)
    if n % 2:
        return None
    k = n // 2
    one = RationalExpr.one(vs)
    for i in range(k):
        for j in range(k):
            cross = g[i][k + j]
            expected_cross = one if i == j else None
            if expected_cross is None:
                if not cross.is_zero():
                    return None
            elif not (cross.is_const() and not cross.is_zero()
                      and cross.as_fraction() == 1):
                return None
            if not g[k + i][k + j].is_zero():
                return None
    zero = RationalExpr.zero(vs)
    inv = [[zero for _ in range(n)] for _ in range(n)]
    for i in range(k):
        inv[i][k + i] = one
        inv[k + i][i] = one
        for j in range(k):
            inv[k + i][k + j] = -g[i][j]
    return inv


def _adjugate_inverse(g, vs: VarSet):
    n = len(g)
    memo: dict = {}

    def det(rows: tuple[int, ...], cols: tuple[int, ...]) -> RationalExpr:
        if len(rows) == 1:
            return g[rows[0]][cols[0]]
        key = (rows, cols)
        cached = memo.get(key)
        if cached is not None:
            return cached
        # expand along the sparsest row
        best_r, best_nz = 0, len(cols) + 1
        for ridx, r in enumerate(rows):
            nz = sum(1 for c in cols if not g[r][c].is_zero())
            if nz < best_nz:
                best_r, best_nz = ridx, nz
        r = rows[best_r]
        sub_rows = rows[:best_r] + rows[best_r + 1 :]
        terms = []
        for cidx, c in enumerate(cols):
            e = g[r][c]
            if e.is_zero():
                continue
            sub_cols = cols[:cidx] + cols[cidx + 1 :]
            minor = det(sub_rows, sub_cols)
            if minor.is_zero():
                continue
            term = e * minor
            if (best_r + cidx) % 2:
                term = -term
            terms.append(term)
        val = sum_exprs(terms, vs)
        memo[key] = val
        return val

    all_idx = tuple(range(n))
    d = det(all_idx, all_idx)
    if d.is_zero():
        raise SingularMetricError("metric determinant is identically zero")
    inv = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            rows = all_idx[:j] + all_idx[j + 1 :]
            cols = all_idx[:i] + all_idx[i + 1 :]
            cof = det(rows, cols) if n > 1 else RationalExpr.one(vs)
            if (i + j) % 2:
                cof = -cof
            entry = cof / d
            inv[i][j] = entry
            inv[j][i] = entry
    return inv


# ---------------------------------------------------------------------------
# connection and curvature


def christoffel(m: Metric) -> Connection:
    """Levi-Civita connection: Gamma^k_ij = 1/2 g^{km} (d_i g_jm + d_j g_im - d_m g_ij)."""
    n = m.dim
    vs = m.chart.vars
    coords = m.chart.coords
    inv = inverse_metric(m)
    dg = [[[m.g[j][k].diff(coords[i]) for k in range(n)] for j in range(n)]
          for i in range(n)]
    half = RationalExpr.const(vs, Fraction(1, 2))
    # T[i][j][mm] = d_i g_jm + d_j g_im - d_m g_ij, shared across upper index
    T = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            T[i][j] = [dg[i][j][mm] + dg[j][i][mm] - dg[mm][i][j] for mm in range(n)]
    gamma = [[[None] * n for _ in range(n)] for _ in range(n)]
    for k in range(n):
        for i in range(n):
            for j in range(i, n):
                terms = []
                for mm in range(n):
                    gkm = inv[k][mm]
                    if gkm.is_zero():
                        continue
                    t = T[i][j][mm]
                    if t.is_zero():
                        continue
                    terms.append(gkm * t)
                val = half * sum_exprs(terms, vs)
                gamma[k][i][j] = val
                gamma[k][j][i] = val
    return Connection(m.chart, gamma)


def riemann_from_connection(c: Connection) -> Riemann:
    """Curvature of a symmetric connection under the convention above;
    components with i > j filled by antisymmetry, i == j are zero."""
    n = c.dim
    vs = c.chart.vars
    coords = c.chart.coords
    G = c.gamma
    dG: dict[tuple[int, int, int, int], RationalExpr] = {}

    def dgamma(i: int, l: int, j: int, k: int) -> RationalExpr:
        key = (i, l, j, k) if j <= k else (i, l, k, j)
        val = dG.get(key)
        if val is None:
            val = G[l][key[2]][key[3]].diff(coords[i])
            dG[key] = val
        return val

    zero = RationalExpr.zero(vs)
    r = [[[[zero] * n for _ in range(n)] for _ in range(n)] for _ in range(n)]
    for l in range(n):
        for i in range(n):
            for j in range(i + 1, n):
                for k in range(n):
                    terms = [dgamma(i, l, j, k), -dgamma(j, l, i, k)]
                    for mm in range(n):
                        a, b = G[l][i][mm], G[mm][j][k]
                        if not a.is_zero() and not b.is_zero():
                            terms.append(a * b)
                        a, b = G[l][j][mm], G[mm][i][k]
                        if not a.is_zero() and not b.is_zero():
                            terms.append(-(a * b))
                    val = sum_exprs(terms, vs)
                    r[l][i][j][k] = val
                    r[l][j][i][k] = -val
    return Riemann(c.chart, tuple(tuple(tuple(tuple(p) for p in q) for q in s) for s in r))


def ricci(riem: Riemann) -> Ricci:
    n = riem.dim
    vs = riem.chart.vars
    ric = [[sum_exprs((riem.r[l][l][j][k] for l in range(n)), vs) for k in range(n)]
           for j in range(n)]
    return Ricci(riem.chart, ric)


def analyze_curvature(m: Metric) -> CurvatureReport:
    """Full pipeline: connection, Riemann, Ricci, exact verdicts."""
    riem = riemann_from_connection(christoffel(m))
    ric = ricci(riem)
    n = m.dim
    nonzero = []
    witness = None
    for l in range(n):
        for i in range(n):
            for j in range(i + 1, n):
                for k in range(n):
                    if not riem.r[l][i][j][k].is_zero():
                        nonzero.append((l, i, j, k))
                        if witness is None:
                            witness = str(riem.r[l][i][j][k])
    ricci_flat = all(
        ric.ric[j][k].is_zero() for j in range(n) for k in range(j, n))
    return CurvatureReport(
        dim=n,
        flat=not nonzero,
        ricci_flat=ricci_flat,
        nonzero_riemann_indices=tuple(nonzero),
        witness=witness,
    )


def is_flat(m: Metric) -> CurvatureReport:
    """Report whose ``flat`` field answers the question exactly."""
    return analyze_curvature(m)


def is_ricci_flat(m: Metric) -> CurvatureReport:
    """Report whose ``ricci_flat`` field answers the question exactly."""
    return analyze_curvature(m)
