"""Multivariate polynomial GCD over the integers.

Strategy: rational/monomial content is always removed by the caller; the
polynomial part runs a recursive subresultant pseudo-remainder sequence in a
chosen main variable, with contents handled recursively. A configurable total
degree cap (env ``FLATLAB_GCD_DEGREE_CAP``) guards against blow-up: exceeding
it raises :class:`GcdCapExceeded` and the caller skips reduction, which only
weakens canonicality, never soundness.

A modular probe (`probably_coprime`) certifies trivial GCDs cheaply: if a
univariate image modulo a large prime has gcd of degree 0 in some variable
while both leading coefficients survived the evaluation, the true gcd has
degree 0 in that variable. Proving that for every shared variable proves the
gcd constant, so the expensive PRS runs only when a common factor is likely.
"""

from __future__ import annotations

import math
import os
import random

from .expr import (
    GcdCapExceeded,
    ExprError,
    Mono,
    Polynomial,
    mono_strip,
)

DEFAULT_DEGREE_CAP = 80

_PROBE_PRIME = (1 << 31) - 1
_PROBE_ATTEMPTS = 4
_rng = random.Random(0x5EED)


def degree_cap() -> int:
    raw = os.environ.get("FLATLAB_GCD_DEGREE_CAP", "")
    if raw:
        try:
            return max(0, int(raw))
        except ValueError:
            pass
    return DEFAULT_DEGREE_CAP


# ---------------------------------------------------------------------------
# exact division (also the divisibility check used by the PRS)


def divexact(a: Polynomial, b: Polynomial) -> Polynomial:
    """a / b when b divides a exactly; raises ExprError otherwise."""
    if b.is_zero():
        raise ExprError("division by the zero polynomial")
    if a.is_zero():
        return Polynomial.zero()
    if b.is_const():
        return a.divexact_int(b.const_value())
    bvars = b.vars_present()
    v = max(bvars, key=lambda i: b.degree_in(i))
    A = a.as_univariate(v)
    B = b.as_univariate(v)
    db = len(B) - 1
    da = len(A) - 1
    if da < db:
        raise ExprError("inexact polynomial division")
    lead_b = B[db]
    quot: list[Polynomial | None] = [None] * (da - db + 1)
    while True:
        while da >= 0 and A[da].is_zero():
            da -= 1
        if da < 0:
            break
        if da < db:
            raise ExprError("inexact polynomial division")
        q = divexact(A[da], lead_b)
        quot[da - db] = q
        shift = da - db
        for i in range(db + 1):
            if not B[i].is_zero():
                A[i + shift] = A[i + shift] - q * B[i]
        if not A[da].is_zero():
            raise ExprError("inexact polynomial division")
        da -= 1
    return Polynomial.from_univariate([q if q is not None else Polynomial.zero() for q in quot], v)


# ---------------------------------------------------------------------------
# subresultant pseudo-remainder sequence


def _uni_degree(A: list[Polynomial]) -> int:
    d = len(A) - 1
    while d >= 0 and A[d].is_zero():
        d -= 1
    return d


def _uni_prem(A: list[Polynomial], B: list[Polynomial]) -> list[Polynomial]:
    """Pseudo-remainder: lc(B)^(deg A - deg B + 1) * A mod B."""
    da = _uni_degree(A)
    db = _uni_degree(B)
    lb = B[db]
    R = list(A[: da + 1])
    n = da - db + 1
    while True:
        dr = _uni_degree(R)
        if dr < db:
            break
        lr = R[dr]
        R = [c * lb for c in R]
        shift = dr - db
        for i in range(db + 1):
            if not B[i].is_zero():
                R[i + shift] = R[i + shift] - lr * B[i]
        R = R[:dr]  # leading slot cancelled exactly
        n -= 1
    if n > 0:
        f = lb.pow_int(n)
        R = [c * f for c in R]
    return R


def _content_of_coeffs(coeffs: list[Polynomial]) -> Polynomial:
    g = Polynomial.zero()
    for c in coeffs:
        if c.is_zero():
            continue
        g = _gcd_inner(g, c)
        if g.is_const() and g.const_value() == 1:
            break
    return g


def _positive(p: Polynomial) -> Polynomial:
    if p.is_zero():
        return p
    if p.leading()[1] < 0:
        return -p
    return p


def _gcd_inner(a: Polynomial, b: Polynomial) -> Polynomial:
    if a.is_zero():
        return _positive(b)
    if b.is_zero():
        return _positive(a)
    ca, cb = a.content(), b.content()
    c = math.gcd(ca, cb)
    a = a.divexact_int(ca)
    b = b.divexact_int(cb)
    ma, mb = a.mono_content(), b.mono_content()
    if ma or mb:
        a = a.divexact_mono(ma)
        b = b.divexact_mono(mb)
        n = min(len(ma), len(mb))
        mg = mono_strip(tuple(min(ma[i], mb[i]) for i in range(n)))
    else:
        mg = ()
    if a.is_const() or b.is_const():
        g = Polynomial.const(c)
    else:
        shared = a.vars_present() & b.vars_present()
        if not shared:
            g = Polynomial.const(c)
        else:
            v = min(shared, key=lambda i: min(a.degree_in(i), b.degree_in(i)))
            g = _gcd_in_var(a, b, v).mul_int(c)
    if mg:
        g = _shift_mono(g, mg)
    return _positive(g)


def _shift_mono(p: Polynomial, m: Mono) -> Polynomial:
    from .expr import mono_mul

    return Polynomial({mono_mul(mm, m): c for mm, c in p.terms.items()})


def _gcd_in_var(a: Polynomial, b: Polynomial, v: int) -> Polynomial:
    A = a.as_univariate(v)
    B = b.as_univariate(v)
    cont_a = _content_of_coeffs(A)
    cont_b = _content_of_coeffs(B)
    cont = _gcd_inner(cont_a, cont_b)
    A = [divexact(c, cont_a) for c in A]
    B = [divexact(c, cont_b) for c in B]
    if _uni_degree(A) < _uni_degree(B):
        A, B = B, A
    g = Polynomial.const(1)
    h = Polynomial.const(1)
    while True:
        da, db = _uni_degree(A), _uni_degree(B)
        delta = da - db
        R = _uni_prem(A, B)
        if _uni_degree(R) < 0:
            break
        if _uni_degree(R) == 0:
            return cont  # primitive parts are coprime in v
        divisor = g * h.pow_int(delta)
        A = B
        B = [divexact(c, divisor) for c in R]
        g = A[_uni_degree(A)]
        if delta == 1:
            h = g
        elif delta > 1:
            h = divexact(g.pow_int(delta), h.pow_int(delta - 1))
    pc = _content_of_coeffs(B)
    pp = [divexact(c, pc) for c in B]
    return cont * Polynomial.from_univariate(pp, v)


def poly_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """GCD with positive leading coefficient; raises GcdCapExceeded when the
    inputs are beyond the configured degree cap."""
    cap = degree_cap()
    if a.degree() > cap or b.degree() > cap:
        raise GcdCapExceeded(
            f"polynomial degree exceeds GCD cap {cap}; set FLATLAB_GCD_DEGREE_CAP to raise it")
    return _gcd_inner(a, b)


# ---------------------------------------------------------------------------
# modular coprimality probe


def _uni_image_mod(p: Polynomial, v: int, point: dict[int, int], prime: int) -> list[int]:
    out = [0] * (p.degree_in(v) + 1)
    for m, c in p.terms.items():
        val = c % prime
        ev = 0
        for i, e in enumerate(m):
            if not e:
                continue
            if i == v:
                ev = e
            else:
                val = val * pow(point[i], e, prime) % prime
        out[ev] = (out[ev] + val) % prime
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def _uni_gcd_degree_mod(A: list[int], B: list[int], prime: int) -> int:
    def deg(L):
        d = len(L) - 1
        while d >= 0 and L[d] == 0:
            d -= 1
        return d

    da, db = deg(A), deg(B)
    if da < db:
        A, B, da, db = B, A, db, da
    A = A[: da + 1]
    B = B[: db + 1]
    while db >= 0:
        inv = pow(B[db], prime - 2, prime)
        while da >= db:
            f = A[da] * inv % prime
            for i in range(db + 1):
                A[da - db + i] = (A[da - db + i] - f * B[i]) % prime
            while da >= 0 and A[da] == 0:
                da -= 1
        A, B, da, db = B, A, db, da
    return da


def probably_coprime(a: Polynomial, b: Polynomial) -> bool:
    """True only when gcd(a, b) is *proven* constant via modular images."""
    shared = a.vars_present() & b.vars_present()
    if not shared:
        return True
    allvars = a.vars_present() | b.vars_present()
    prime = _PROBE_PRIME
    for v in shared:
        proven = False
        for _ in range(_PROBE_ATTEMPTS):
            point = {u: _rng.randrange(1, prime) for u in allvars if u != v}
            ia = _uni_image_mod(a, v, point, prime)
            ib = _uni_image_mod(b, v, point, prime)
            if len(ia) - 1 != a.degree_in(v) or len(ib) - 1 != b.degree_in(v):
                continue  # a leading coefficient vanished; retry
            if _uni_gcd_degree_mod(ia, ib, prime) == 0:
                proven = True
                break
        if not proven:
            return False
    return True
