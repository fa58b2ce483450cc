"""Rational-function antiderivatives in one variable.

Horowitz–Ostrogradsky reduction over the field of rational expressions in the
remaining variables: split off the polynomial part, then decompose the proper
part as d/dv(R1/Q1) + R2/Q2 with Q1 = gcd(Q, Q'), Q2 = Q/Q1 squarefree. The
antiderivative is rational iff the logarithmic residue R2 vanishes; otherwise
:class:`NonRationalAntiderivative` is raised. This covers polynomial-plus-
negative-power integrands as a special case and arbitrary squared factors in
the denominator.
"""

from __future__ import annotations

from fractions import Fraction

from .expr import ExprError, Polynomial, RationalExpr, VarSet


class NonRationalAntiderivative(ExprError):
    """The integrand has no rational antiderivative in the given variable."""


# -- dense univariate polynomials over the RationalExpr field ---------------


def _deg(A: list[RationalExpr]) -> int:
    d = len(A) - 1
    while d >= 0 and A[d].is_zero():
        d -= 1
    return d


def _trim(A: list[RationalExpr]) -> list[RationalExpr]:
    return A[: _deg(A) + 1]


def _zero(vs: VarSet) -> list[RationalExpr]:
    return []


def _add(A, B):
    if len(A) < len(B):
        A, B = B, A
    out = list(A)
    for i, c in enumerate(B):
        out[i] = out[i] + c
    return _trim(out)


def _sub(A, B, vs):
    out = list(A) + [RationalExpr.zero(vs)] * max(0, len(B) - len(A))
    for i, c in enumerate(B):
        out[i] = out[i] - c
    return _trim(out)


def _mul(A, B, vs):
    if not A or not B:
        return []
    out = [RationalExpr.zero(vs)] * (len(A) + len(B) - 1)
    for i, a in enumerate(A):
        if a.is_zero():
            continue
        for j, b in enumerate(B):
            if b.is_zero():
                continue
            out[i + j] = out[i + j] + a * b
    return _trim(out)


def _scale(A, s):
    return _trim([c * s for c in A])


def _divmod(A, B, vs):
    dB = _deg(B)
    if dB < 0:
        raise ExprError("univariate division by zero")
    R = list(A)
    dR = _deg(R)
    if dR < dB:
        return [], _trim(R)
    Q = [RationalExpr.zero(vs)] * (dR - dB + 1)
    lead = B[dB]
    while dR >= dB:
        q = R[dR] / lead
        Q[dR - dB] = q
        for i in range(dB + 1):
            if not B[i].is_zero():
                R[i + dR - dB] = R[i + dR - dB] - q * B[i]
        R = R[:dR]
        dR = _deg(R)
    return _trim(Q), _trim(R)


def _monic(A, vs):
    d = _deg(A)
    lead = A[d]
    if lead == RationalExpr.one(vs):
        return _trim(A)
    return [c / lead for c in A[: d + 1]]


def _gcd(A, B, vs):
    A, B = _trim(A), _trim(B)
    while B:
        _, R = _divmod(A, B, vs)
        A, B = B, R
    return _monic(A, vs) if A else A


def _deriv(A):
    return _trim([A[i] * i for i in range(1, len(A))])


def _to_expr(A, vname: str, vs: VarSet) -> RationalExpr:
    v = RationalExpr.var(vs, vname)
    acc = RationalExpr.zero(vs)
    power = RationalExpr.one(vs)
    for i, c in enumerate(A):
        if not c.is_zero():
            acc = acc + c * power
        if i + 1 < len(A):
            power = power * v
    return acc


def _split(f: RationalExpr, vi: int, vs: VarSet) -> tuple[list[RationalExpr], list[RationalExpr]]:
    num = [RationalExpr(vs, p, Polynomial.const(1), True) for p in f.num.as_univariate(vi)]
    den = [RationalExpr(vs, p, Polynomial.const(1), True) for p in f.den.as_univariate(vi)]
    return _trim(num), _trim(den)


def integrate_rational(f: RationalExpr, vname: str) -> RationalExpr:
    """Antiderivative g with diff(g, vname) == f, integration constant 0.

    Raises NonRationalAntiderivative when none exists in the rational class.
    """
    vs = f.vars
    vi = vs.index(vname)
    for idx in f.vars_present():
        info = vs.jet_info(idx)
        if info is not None and vi in vs.function_bases(info[0]):
            raise ExprError(
                f"cannot integrate through function symbol {vs.name(idx)!r}")
    N, D = _split(f, vi, vs)
    if not N:
        return RationalExpr.zero(vs)
    # strip any v-free common factor and make the denominator monic in v
    G = _gcd(N, D, vs)
    if _deg(G) > 0:
        N, _ = _divmod(N, G, vs)
        D, _ = _divmod(D, G, vs)
    lead = D[_deg(D)]
    N = _scale(N, RationalExpr.one(vs) / lead)
    D = _monic(D, vs)
    Q, R = _divmod(N, D, vs)
    parts = []
    for k, c in enumerate(Q):
        if not c.is_zero():
            parts.append((k + 1, c))
    result = RationalExpr.zero(vs)
    v = RationalExpr.var(vs, vname)
    for k, c in parts:
        result = result + c * v ** k / k
    if not R:
        return result
    if _deg(D) == 0:
        raise ExprError("internal: proper remainder against constant denominator")
    Dp = _deriv(D)
    Q1 = _gcd(D, Dp, vs)
    if _deg(Q1) == 0:
        raise NonRationalAntiderivative(
            f"integrand has a nonzero logarithmic part in {vname!r} "
            "(squarefree denominator with nonzero remainder)")
    Q2, rem = _divmod(D, Q1, vs)
    assert not rem
    S, rem = _divmod(_mul(_deriv(Q1), Q2, vs), Q1, vs)
    assert not rem
    n1, n2 = _deg(Q1), _deg(Q2)
    # solve R = R1'*Q2 - R1*S + R2*Q1 with deg R1 < n1, deg R2 < n2
    ncols = n1 + n2
    nrows = n1 + n2
    zero = RationalExpr.zero(vs)
    cols: list[list[RationalExpr]] = []
    for i in range(n1):  # coefficient a_i of v^i in R1
        contrib = [zero] * nrows
        if i >= 1:
            for j, c in enumerate(Q2):
                if i - 1 + j < nrows:
                    contrib[i - 1 + j] = contrib[i - 1 + j] + c * i
        for j, c in enumerate(S):
            if i + j < nrows:
                contrib[i + j] = contrib[i + j] - c
        cols.append(contrib)
    for i in range(n2):  # coefficient b_i of v^i in R2
        contrib = [zero] * nrows
        for j, c in enumerate(Q1):
            if i + j < nrows:
                contrib[i + j] = contrib[i + j] + c
        cols.append(contrib)
    rhs = [R[k] if k < len(R) else zero for k in range(nrows)]
    sol = _solve_linear(cols, rhs, ncols, nrows, vs)
    for i in range(n2):
        if not sol[n1 + i].is_zero():
            raise NonRationalAntiderivative(
                f"integrand has a nonzero logarithmic part in {vname!r}")
    R1 = _trim(sol[:n1])
    if R1:
        result = result + _to_expr(R1, vname, vs) / _to_expr(Q1, vname, vs)
    return result


def _solve_linear(cols, rhs, ncols, nrows, vs):
    """Exact Gaussian elimination on a column-major system."""
    M = [[cols[c][r] for c in range(ncols)] + [rhs[r]] for r in range(nrows)]
    piv_of_col = [-1] * ncols
    row = 0
    for col in range(ncols):
        sel = None
        for r in range(row, nrows):
            if not M[r][col].is_zero():
                sel = r
                break
        if sel is None:
            continue
        M[row], M[sel] = M[sel], M[row]
        inv = RationalExpr.one(vs) / M[row][col]
        M[row] = [e * inv for e in M[row]]
        for r in range(nrows):
            if r != row and not M[r][col].is_zero():
                f = M[r][col]
                M[r] = [a - f * b for a, b in zip(M[r], M[row])]
        piv_of_col[col] = row
        row += 1
    for r in range(row, nrows):
        if not M[r][ncols].is_zero():
            raise ExprError("internal: inconsistent Hermite reduction system")
    sol = []
    for col in range(ncols):
        p = piv_of_col[col]
        sol.append(M[p][ncols] if p >= 0 else RationalExpr.zero(vs))
    return sol
