"""Residuals, coefficient formulas and the solution-chain iteration for the
two integrable equations driving the metric constructions.

Conventions (all exact):
  * KdV form:  l_z - 3*l*l_x + l_xxx = 0   for l(x, z);
  * KN form:   F_z + F_xxx - (3/2)*F_xx^2/F_x = 0   for F(x, z);
  * the chain rule of the iteration: the next solution G satisfies
    G_x = F^2 / F_x, with the additive function of z fixed so the KN
    residual of G vanishes (pure integration constant pinned to 0).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .expr import ExprError, RationalExpr, VarSet
from .integrate import NonRationalAntiderivative, integrate_rational


class DegenerateInput(ExprError):
    """An input violates a precondition (e.g. constant in x)."""


class NotASolution(ExprError):
    """The iteration was started from a non-solution."""


class IterationLeftRationalClass(ExprError):
    """The z-fixing residual depends on x; the iteration left the class."""


def _half(vs: VarSet) -> RationalExpr:
    return RationalExpr.const(vs, Fraction(1, 2))


def kn_residual(F: RationalExpr) -> RationalExpr:
    """F_z + F_xxx - (3/2)*F_xx^2/F_x; zero iff F solves the KN form."""
    vs = F.vars
    Fx = F.diff("x")
    if Fx.is_zero():
        raise DegenerateInput("F is constant in x")
    Fxx = Fx.diff("x")
    Fxxx = Fxx.diff("x")
    return F.diff("z") + Fxxx - RationalExpr.const(vs, Fraction(3, 2)) * Fxx * Fxx / Fx


def kdv_residual(l: RationalExpr, xname: str = "x", zname: str = "z") -> RationalExpr:
    """l_z - 3*l*l_x + l_xxx (coordinate names overridable, e.g. (u, w))."""
    lx = l.diff(xname)
    return l.diff(zname) - 3 * l * lx + lx.diff(xname).diff(xname)


def m_constraint_residual(L: RationalExpr, M: RationalExpr) -> RationalExpr:
    """M_w - L*M_u - L_u - 2*L_u*M (the compatibility condition tying the
    second block's M to its L)."""
    Lu = L.diff("u")
    return M.diff("w") - L * M.diff("u") - Lu - 2 * Lu * M


def f1_from_f2(F: RationalExpr) -> RationalExpr:
    """The companion coefficient -2*F_x (exposed but unused by the product
    metric; kept because the coefficient set defines it)."""
    return -2 * F.diff("x")


def b_from_f2(F: RationalExpr) -> RationalExpr:
    """B(x,y,z) = 1/4*F1^2*y^2 + 1/2*F1*y*F2 + 1/4*F2^2 with F1 = -2*F_x.

    Algebraically a perfect square: B = 1/4*(F - 2*y*F_x)^2.
    """
    vs = F.vars
    vs.add("y")
    y = RationalExpr.var(vs, "y")
    F1 = f1_from_f2(F)
    quarter = RationalExpr.const(vs, Fraction(1, 4))
    return quarter * F1 * F1 * y * y + _half(vs) * F1 * y * F + quarter * F * F


def l_from_f2(F: RationalExpr, form: str = "thm3") -> RationalExpr:
    """The induced KdV coefficient, in either closed form.

    ``thm1``: -1/3*(F_z - 2*F_xxx)/F_x.
    ``thm3``: (F_xxx - 1/2*F_xx^2/F_x)/F_x.
    The two coincide exactly when the KN residual of F vanishes.
    """
    vs = F.vars
    Fx = F.diff("x")
    if Fx.is_zero():
        raise DegenerateInput("F is constant in x")
    Fxx = Fx.diff("x")
    Fxxx = Fxx.diff("x")
    if form == "thm1":
        return RationalExpr.const(vs, Fraction(-1, 3)) * (F.diff("z") - 2 * Fxxx) / Fx
    if form == "thm3":
        return (Fxxx - _half(vs) * Fxx * Fxx / Fx) / Fx
    raise ValueError(f"unknown form {form!r} (expected 'thm1' or 'thm3')")


@dataclass(frozen=True)
class KNSolution:
    """A verified solution of the KN form, tagged with its chain generation."""

    expr: RationalExpr
    generation: int = 0

    @classmethod
    def create(cls, expr: RationalExpr, generation: int = 0) -> "KNSolution":
        r = kn_residual(expr)  # also enforces F_x != 0
        if not r.is_zero():
            raise NotASolution(f"residual is nonzero: {r}")
        return cls(expr, generation)


def kn_iterate(sol: KNSolution) -> KNSolution:
    """Produce the next chain member G with G_x = F^2/F_x and zero residual.

    Raises NonRationalAntiderivative if the x-integral leaves the rational
    class, IterationLeftRationalClass if the residual to be absorbed by the
    additive function of z is not x-free.
    """
    F = sol.expr
    r = kn_residual(F)
    if not r.is_zero():
        raise NotASolution(f"residual is nonzero: {r}")
    vs = F.vars
    integrand = F * F / F.diff("x")
    G = integrate_rational(integrand, "x")
    r0 = kn_residual(G)
    if not r0.is_zero():
        xi = vs.index("x")
        if xi in r0.vars_present():
            raise IterationLeftRationalClass(
                f"residual after x-integration depends on x: {r0}")
        G = G - integrate_rational(r0, "z")
    check = kn_residual(G)
    if not check.is_zero():
        raise IterationLeftRationalClass(
            f"z-fixing failed to produce a solution; residual {check}")
    return KNSolution(G, sol.generation + 1)


# ---------------------------------------------------------------------------
# solution-pool file format


@dataclass(frozen=True)
class PoolEntry:
    name: str
    expr: str
    equation: str  # "kn" | "kdv"
    residual_verified: bool

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "expr": self.expr,
            "equation": self.equation,
            "residual_verified": self.residual_verified,
        }


def save_pool(path: str | Path, entries: list[PoolEntry]) -> None:
    doc = [e.to_dict() for e in entries]
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def load_pool(path: str | Path) -> list[PoolEntry]:
    doc = json.loads(Path(path).read_text())
    out = []
    for item in doc:
        out.append(
            PoolEntry(
                name=item["name"],
                expr=item["expr"],
                equation=item["equation"],
                residual_verified=bool(item["residual_verified"]),
            )
        )
    return out
