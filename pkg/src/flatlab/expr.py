"""Exact multivariate rational-function arithmetic.

The scalar type of the whole symbolic engine: a rational function is a pair of
expanded integer-coefficient polynomials in canonical form, so zero-testing is
a dictionary lookup and every flatness verdict downstream is a theorem, not an
approximation.

Representation notes:
  * a monomial is a dense tuple of non-negative exponents with trailing zeros
    stripped, indexed by variable position in a :class:`VarSet`;
  * polynomial coefficients are arbitrary-precision Python ints; rational
    scaling lives at the RationalExpr level (num/den share no content, the
    denominator's leading coefficient is positive);
  * values are immutable after construction and safe to share across threads;
    the variable registry is append-only.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union


class ExprError(Exception):
    """Base class for symbolic-kernel errors."""


class DivisionByZeroExpr(ExprError):
    """Division by an expression that is identically zero."""


class UnknownVariableError(ExprError):
    """A variable name was used without being declared."""


class SubstitutionDomainError(ExprError):
    """A substitution produced an identically-zero denominator."""


class EvalDomainError(ExprError):
    """Numeric evaluation hit a (near-)zero denominator."""


class GcdCapExceeded(ExprError):
    """Polynomial GCD skipped because the degree cap was exceeded."""


# ---------------------------------------------------------------------------
# monomials: dense exponent tuples, trailing zeros stripped

Mono = tuple  # tuple[int, ...]

MONO_ONE: Mono = ()


def mono_strip(t: Sequence[int]) -> Mono:
    n = len(t)
    while n and t[n - 1] == 0:
        n -= 1
    return tuple(t[:n])


def mono_var(index: int) -> Mono:
    return (0,) * index + (1,)


def mono_mul(a: Mono, b: Mono) -> Mono:
    if not a:
        return b
    if not b:
        return a
    if len(a) < len(b):
        a, b = b, a
    nb = len(b)
    return tuple(x + y for x, y in zip(a, b)) + a[nb:]


def mono_div(a: Mono, b: Mono) -> Mono | None:
    """a / b, or None when b does not divide a."""
    if len(b) > len(a):
        return None
    out = list(a)
    for i, e in enumerate(b):
        if e:
            if a[i] < e:
                return None
            out[i] = a[i] - e
    return mono_strip(out)


def mono_gcd(a: Mono, b: Mono) -> Mono:
    n = min(len(a), len(b))
    return mono_strip(tuple(min(a[i], b[i]) for i in range(n)))


def mono_degree(m: Mono) -> int:
    return sum(m)


def grlex_key(m: Mono):
    # graded lexicographic; earlier VarSet index = higher precedence
    return (sum(m), m)


_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class VarSet:
    """Append-only ordered registry of variable identifiers.

    Besides plain symbols it can declare *function* symbols with a dependency
    list (e.g. ``l`` as a function of ``(x, z)``); differentiating such a
    symbol produces jet variables ``l_x``, ``l_z``, ``l_xx``, ... on demand.
    Mixed partials commute by construction because jets are keyed by
    derivative multi-index.
    """

    def __init__(self, names: Iterable[str] = ()):
        self._names: list[str] = []
        self._index: dict[str, int] = {}
        self._fn_bases: dict[int, tuple[int, ...]] = {}
        self._jet_of: dict[int, tuple[int, tuple[int, ...]]] = {}
        self._jets: dict[tuple[int, tuple[int, ...]], int] = {}
        for n in names:
            self.add(n)

    def add(self, name: str) -> int:
        idx = self._index.get(name)
        if idx is not None:
            return idx
        if not _IDENT_RE.match(name):
            raise ExprError(f"invalid variable identifier: {name!r}")
        idx = len(self._names)
        self._names.append(name)
        self._index[name] = idx
        return idx

    def function(self, name: str, bases: Iterable[str]) -> int:
        base_idx = tuple(self.add(b) for b in bases)
        idx = self.add(name)
        prev = self._fn_bases.get(idx)
        if prev is not None:
            if prev != base_idx:
                raise ExprError(f"{name!r} already declared with other bases")
            return idx
        if idx in self._jet_of:
            raise ExprError(f"{name!r} is already a derivative symbol")
        self._fn_bases[idx] = base_idx
        zero = (0,) * len(base_idx)
        self._jet_of[idx] = (idx, zero)
        self._jets[(idx, zero)] = idx
        return idx

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownVariableError(f"unknown variable {name!r}") from None

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def name(self, index: int) -> str:
        return self._names[index]

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self._names)

    def __len__(self) -> int:
        return len(self._names)

    def is_function(self, index: int) -> bool:
        return index in self._fn_bases

    def jet_info(self, index: int) -> tuple[int, tuple[int, ...]] | None:
        """(base function index, derivative multi-index) for jet symbols."""
        return self._jet_of.get(index)

    def function_bases(self, index: int) -> tuple[int, ...]:
        return self._fn_bases[index]

    def derivative_of(self, index: int, wrt: int) -> int | None:
        """Index of d(var)/d(wrt): None for 0, -1 for 1, else a jet index."""
        if index == wrt:
            return -1
        info = self._jet_of.get(index)
        if info is None:
            return None
        fn, mi = info
        bases = self._fn_bases[fn]
        try:
            pos = bases.index(wrt)
        except ValueError:
            return None
        nmi = mi[:pos] + (mi[pos] + 1,) + mi[pos + 1 :]
        idx = self._jets.get((fn, nmi))
        if idx is None:
            idx = self._new_jet(fn, nmi)
        return idx

    def _new_jet(self, fn: int, mi: tuple[int, ...]) -> int:
        bases = self._fn_bases[fn]
        suffix = "".join(self._names[b] * k for b, k in zip(bases, mi))
        name = f"{self._names[fn]}_{suffix}"
        if name in self._index:
            idx = self._index[name]
            if self._jet_of.get(idx) != (fn, mi):
                raise ExprError(
                    f"name {name!r} clashes with the derivative of {self._names[fn]!r}"
                )
            return idx
        idx = self.add(name)
        self._jet_of[idx] = (fn, mi)
        self._jets[(fn, mi)] = idx
        return idx


# ---------------------------------------------------------------------------
# polynomials over the integers


class Polynomial:
    """Expanded multivariate polynomial with int coefficients.

    ``terms`` maps monomials to nonzero coefficients; equality of the maps is
    equality of polynomials (canonical form). The constructor trusts its
    argument; use :meth:`from_items` for unclean input.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: dict):
        self.terms = terms

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls) -> "Polynomial":
        return cls({})

    @classmethod
    def const(cls, c: int) -> "Polynomial":
        return cls({MONO_ONE: c}) if c else cls({})

    @classmethod
    def variable(cls, index: int) -> "Polynomial":
        return cls({mono_var(index): 1})

    @classmethod
    def from_items(cls, items) -> "Polynomial":
        out: dict = {}
        for m, c in items:
            if not c:
                continue
            prev = out.get(m)
            s = c if prev is None else prev + c
            if s:
                out[m] = s
            elif prev is not None:
                del out[m]
        return cls(out)

    # -- predicates ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_const(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and MONO_ONE in self.terms)

    def const_value(self) -> int:
        if not self.terms:
            return 0
        return self.terms[MONO_ONE]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.terms == other.terms

    __hash__ = None  # mutable dict inside; never used as a key

    # -- ring operations ----------------------------------------------------

    def __add__(self, other: "Polynomial") -> "Polynomial":
        out = dict(self.terms)
        for m, c in other.terms.items():
            prev = out.get(m)
            s = c if prev is None else prev + c
            if s:
                out[m] = s
            elif prev is not None:
                del out[m]
        return Polynomial(out)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        out = dict(self.terms)
        for m, c in other.terms.items():
            prev = out.get(m)
            s = -c if prev is None else prev - c
            if s:
                out[m] = s
            elif prev is not None:
                del out[m]
        return Polynomial(out)

    def __neg__(self) -> "Polynomial":
        return Polynomial({m: -c for m, c in self.terms.items()})

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        ta, tb = self.terms, other.terms
        if not ta or not tb:
            return Polynomial({})
        if len(ta) > len(tb):
            ta, tb = tb, ta
        out: dict = {}
        get = out.get
        for ma, ca in ta.items():
            for mb, cb in tb.items():
                m = mono_mul(ma, mb)
                prev = get(m)
                s = ca * cb if prev is None else prev + ca * cb
                if s:
                    out[m] = s
                elif prev is not None:
                    del out[m]
        return Polynomial(out)

    def mul_int(self, k: int) -> "Polynomial":
        if k == 0:
            return Polynomial({})
        if k == 1:
            return self
        return Polynomial({m: c * k for m, c in self.terms.items()})

    def divexact_int(self, k: int) -> "Polynomial":
        if k == 1:
            return self
        out = {}
        for m, c in self.terms.items():
            q, r = divmod(c, k)
            if r:
                raise ExprError("inexact integer division of a polynomial")
            out[m] = q
        return Polynomial(out)

    def pow_int(self, e: int) -> "Polynomial":
        if e < 0:
            raise ExprError("negative polynomial power")
        result = Polynomial({MONO_ONE: 1})
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    # -- structure ----------------------------------------------------------

    def content(self) -> int:
        """gcd of all coefficients (0 for the zero polynomial)."""
        g = 0
        for c in self.terms.values():
            g = math.gcd(g, c)
            if g == 1:
                return 1
        return g

    def mono_content(self) -> Mono:
        it = iter(self.terms)
        try:
            g = next(it)
        except StopIteration:
            return MONO_ONE
        for m in it:
            if not g:
                return MONO_ONE
            g = mono_gcd(g, m)
        return g

    def divexact_mono(self, m: Mono) -> "Polynomial":
        if not m:
            return self
        out = {}
        for mm, c in self.terms.items():
            q = mono_div(mm, m)
            if q is None:
                raise ExprError("inexact monomial division")
            out[q] = c
        return Polynomial(out)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(m) for m in self.terms)

    def degree_in(self, v: int) -> int:
        d = 0
        for m in self.terms:
            if len(m) > v and m[v] > d:
                d = m[v]
        return d

    def vars_present(self) -> set:
        out: set = set()
        for m in self.terms:
            for i, e in enumerate(m):
                if e:
                    out.add(i)
        return out

    def leading(self) -> tuple[Mono, int]:
        """(monomial, coefficient) of the graded-lex leading term."""
        if not self.terms:
            raise ExprError("zero polynomial has no leading term")
        m = max(self.terms, key=grlex_key)
        return m, self.terms[m]

    def sorted_terms(self) -> list[tuple[Mono, int]]:
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)

    # -- calculus -----------------------------------------------------------

    def diff(self, v: int, vs: VarSet) -> "Polynomial":
        out: dict = {}
        for m, c in self.terms.items():
            for i, e in enumerate(m):
                if not e:
                    continue
                d = vs.derivative_of(i, v)
                if d is None:
                    continue
                lowered = list(m)
                lowered[i] = e - 1
                base = mono_strip(lowered)
                key = base if d == -1 else mono_mul(base, mono_var(d))
                prev = out.get(key)
                s = c * e if prev is None else prev + c * e
                if s:
                    out[key] = s
                elif prev is not None:
                    del out[key]
        return Polynomial(out)

    def eval_float(self, values: Sequence[float]) -> float:
        total = 0.0
        for m, c in self.terms.items():
            acc = float(c)
            for i, e in enumerate(m):
                if e:
                    acc *= values[i] ** e
            total += acc
        return total

    # -- univariate views (used by gcd and integration) ---------------------

    def as_univariate(self, v: int) -> list["Polynomial"]:
        """Coefficient list in powers of variable v (index = exponent)."""
        coeffs: list[dict] = [dict() for _ in range(self.degree_in(v) + 1)]
        for m, c in self.terms.items():
            e = m[v] if len(m) > v else 0
            rest = list(m)
            if len(rest) > v:
                rest[v] = 0
            coeffs[e][mono_strip(rest)] = c
        return [Polynomial(d) for d in coeffs]

    @staticmethod
    def from_univariate(coeffs: Sequence["Polynomial"], v: int) -> "Polynomial":
        out: dict = {}
        for e, p in enumerate(coeffs):
            if p is None or p.is_zero():
                continue
            vm = MONO_ONE if e == 0 else (0,) * v + (e,)
            for m, c in p.terms.items():
                key = mono_mul(m, vm)
                prev = out.get(key)
                s = c if prev is None else prev + c
                if s:
                    out[key] = s
                elif prev is not None:
                    del out[key]
        return Polynomial(out)

    def __repr__(self) -> str:  # debug only; canonical printing needs a VarSet
        return f"Polynomial({self.terms!r})"


_P_ZERO = Polynomial({})
_P_ONE = Polynomial({MONO_ONE: 1})


# ---------------------------------------------------------------------------
# rational expressions

Scalar = Union[int, Fraction]


class RationalExpr:
    """Canonical quotient of integer polynomials over a shared VarSet.

    Invariants: den != 0, den's graded-lex leading coefficient is positive,
    num and den share no integer content, and no common polynomial factor
    found by the GCD strategy remains (``reduced`` records whether the GCD
    pass completed or was skipped at the degree cap; equality always uses
    cross-multiplication, so verdicts never depend on the flag).
    """

    __slots__ = ("vars", "num", "den", "reduced")

    def __init__(self, vars: VarSet, num: Polynomial, den: Polynomial, reduced: bool):
        self.vars = vars
        self.num = num
        self.den = den
        self.reduced = reduced

    # -- construction -------------------------------------------------------

    @classmethod
    def make(cls, vars: VarSet, num: Polynomial, den: Polynomial) -> "RationalExpr":
        return _normalize(vars, num, den)

    @classmethod
    def zero(cls, vars: VarSet) -> "RationalExpr":
        return cls(vars, _P_ZERO, _P_ONE, True)

    @classmethod
    def one(cls, vars: VarSet) -> "RationalExpr":
        return cls(vars, _P_ONE, _P_ONE, True)

    @classmethod
    def const(cls, vars: VarSet, value: Scalar) -> "RationalExpr":
        if isinstance(value, Fraction):
            return cls.make(vars, Polynomial.const(value.numerator),
                            Polynomial.const(value.denominator))
        return cls(vars, Polynomial.const(value), _P_ONE, True)

    @classmethod
    def var(cls, vars: VarSet, name: str) -> "RationalExpr":
        return cls(vars, Polynomial.variable(vars.index(name)), _P_ONE, True)

    # -- predicates ---------------------------------------------------------

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_const(self) -> bool:
        return self.num.is_const() and self.den.is_const()

    def as_fraction(self) -> Fraction:
        if not self.is_const():
            raise ExprError("expression is not constant")
        return Fraction(self.num.const_value(), self.den.const_value())

    def vars_present(self) -> set:
        return self.num.vars_present() | self.den.vars_present()

    def depends_on(self, name: str) -> bool:
        if name not in self.vars:
            return False
        return self.vars.index(name) in self.vars_present()

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.num.terms == other.num.terms and self.den.terms == other.den.terms:
            return True
        return (self.num * other.den - other.num * self.den).is_zero()

    __hash__ = None

    # -- arithmetic ----------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, RationalExpr):
            if other.vars is not self.vars:
                raise ExprError("operands belong to different variable registries")
            return other
        if isinstance(other, (int, Fraction)):
            return RationalExpr.const(self.vars, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.den.terms == other.den.terms:
            return _normalize(self.vars, self.num + other.num, self.den)
        num = self.num * other.den + other.num * self.den
        return _normalize(self.vars, num, self.den * other.den)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.den.terms == other.den.terms:
            return _normalize(self.vars, self.num - other.num, self.den)
        num = self.num * other.den - other.num * self.den
        return _normalize(self.vars, num, self.den * other.den)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __neg__(self):
        return RationalExpr(self.vars, -self.num, self.den, self.reduced)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return RationalExpr.zero(self.vars)
        n1, d2 = _cross_cancel(self.num, other.den)
        n2, d1 = _cross_cancel(other.num, self.den)
        return _normalize(self.vars, n1 * n2, d1 * d2)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero():
            raise DivisionByZeroExpr("division by the zero expression")
        return self * RationalExpr(other.vars, other.den, other.num, other.reduced)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            if self.is_zero():
                raise DivisionByZeroExpr("zero to a negative power")
            return RationalExpr.make(self.vars, self.den.pow_int(-e), self.num.pow_int(-e))
        return _normalize(self.vars, self.num.pow_int(e), self.den.pow_int(e))

    # -- calculus ------------------------------------------------------------

    def diff(self, name: str) -> "RationalExpr":
        """Exact partial derivative (quotient rule), canonical result."""
        v = self.vars.index(name)
        dn = self.num.diff(v, self.vars)
        dd = self.den.diff(v, self.vars)
        if dd.is_zero():
            return _normalize(self.vars, dn, self.den)
        num = dn * self.den - self.num * dd
        return _normalize(self.vars, num, self.den * self.den)

    def substitute(self, bindings: Mapping[str, "RationalExpr | Scalar"]) -> "RationalExpr":
        """Simultaneous substitution; derivative symbols of a bound function
        symbol are bound to the corresponding derivatives automatically."""
        vs = self.vars
        resolved: dict[int, RationalExpr] = {}
        for name, value in bindings.items():
            idx = vs.index(name)
            val = self._coerce(value)
            if val is NotImplemented:
                raise ExprError(f"cannot bind {name!r} to {value!r}")
            resolved[idx] = val
        present = self.vars_present()
        for idx, val in list(resolved.items()):
            if not vs.is_function(idx):
                continue
            for var in present:
                info = vs.jet_info(var)
                if info is None or var in resolved:
                    continue
                fn, mi = info
                if fn != idx or var == idx:
                    continue
                dv = val
                for b, k in zip(vs.function_bases(fn), mi):
                    for _ in range(k):
                        dv = dv.diff(vs.name(b))
                resolved[var] = dv
        try:
            num_v = _poly_substitute(self.num, resolved, vs)
            den_v = _poly_substitute(self.den, resolved, vs)
            if den_v.is_zero():
                raise SubstitutionDomainError(
                    "substitution produced an identically-zero denominator")
            return num_v / den_v
        except DivisionByZeroExpr as exc:
            raise SubstitutionDomainError(str(exc)) from exc

    def eval_numeric(self, point: Mapping[str, float], den_eps: float = 1e-12) -> float:
        """Floating evaluation; raises EvalDomainError near denominator zeros."""
        vs = self.vars
        values = [0.0] * len(vs)
        bound = set()
        for name, val in point.items():
            if name in vs:
                values[vs.index(name)] = float(val)
                bound.add(vs.index(name))
        missing = self.vars_present() - bound
        if missing:
            names = ", ".join(sorted(vs.name(i) for i in missing))
            raise ExprError(f"unbound variable(s) in numeric evaluation: {names}")
        dv = self.den.eval_float(values)
        if abs(dv) <= den_eps:
            raise EvalDomainError(f"denominator magnitude {abs(dv):.3e} at evaluation point")
        return self.num.eval_float(values) / dv

    def __str__(self) -> str:
        from .parser import format_expr

        return format_expr(self)

    def __repr__(self) -> str:
        return f"<RationalExpr {self}>"


def _poly_substitute(p: Polynomial, sub: dict[int, RationalExpr], vs: VarSet) -> RationalExpr:
    if not sub:
        return RationalExpr(vs, p, _P_ONE, True)
    pow_cache: dict[tuple[int, int], RationalExpr] = {}

    def power(i: int, e: int) -> RationalExpr:
        key = (i, e)
        r = pow_cache.get(key)
        if r is None:
            r = sub[i] ** e
            pow_cache[key] = r
        return r

    acc = RationalExpr.zero(vs)
    for m, c in p.terms.items():
        rest = list(m)
        factors = []
        for i, e in enumerate(m):
            if e and i in sub:
                rest[i] = 0
                factors.append(power(i, e))
        term = RationalExpr(vs, Polynomial({mono_strip(rest): c}), _P_ONE, True)
        for f in factors:
            term = term * f
        acc = acc + term
    return acc


def sum_exprs(terms: Iterable[RationalExpr], vars: VarSet) -> RationalExpr:
    """Sum of expressions; zeros skipped."""
    acc = None
    for t in terms:
        if t.is_zero():
            continue
        acc = t if acc is None else acc + t
    return acc if acc is not None else RationalExpr.zero(vars)


# ---------------------------------------------------------------------------
# normalization (the canonical-form pass)


def _normalize(vs: VarSet, num: Polynomial, den: Polynomial) -> RationalExpr:
    from . import gcd as _gcd

    if den.is_zero():
        raise DivisionByZeroExpr("denominator is identically zero")
    if num.is_zero():
        return RationalExpr.zero(vs)
    cn = num.content()
    cd = den.content()
    g = math.gcd(cn, cd)
    if g > 1:
        num = num.divexact_int(g)
        den = den.divexact_int(g)
    mg = mono_gcd(num.mono_content(), den.mono_content())
    if mg:
        num = num.divexact_mono(mg)
        den = den.divexact_mono(mg)
    reduced = True
    if not den.is_const() and not num.is_const():
        try:
            if not _gcd.probably_coprime(num, den):
                common = _gcd.poly_gcd(num, den)
                if common.degree() > 0:
                    num = _gcd.divexact(num, common)
                    den = _gcd.divexact(den, common)
        except GcdCapExceeded:
            reduced = False
    if den.leading()[1] < 0:
        num = -num
        den = -den
    return RationalExpr(vs, num, den, reduced)


def _cross_cancel(a: Polynomial, b: Polynomial) -> tuple[Polynomial, Polynomial]:
    """Remove cheap common factors of a numerator/denominator pair before a
    product, keeping intermediate swell down."""
    from . import gcd as _gcd

    if a.is_zero():
        return a, _P_ONE if b.is_const() else b
    g = math.gcd(a.content(), b.content())
    if g > 1:
        a = a.divexact_int(g)
        b = b.divexact_int(g)
    mg = mono_gcd(a.mono_content(), b.mono_content())
    if mg:
        a = a.divexact_mono(mg)
        b = b.divexact_mono(mg)
    if not a.is_const() and not b.is_const():
        try:
            if not _gcd.probably_coprime(a, b):
                common = _gcd.poly_gcd(a, b)
                if common.degree() > 0:
                    a = _gcd.divexact(a, common)
                    b = _gcd.divexact(b, common)
        except GcdCapExceeded:
            pass
    return a, b
