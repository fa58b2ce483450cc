import random

import pytest

from flatlab import gcd as g
from flatlab.expr import GcdCapExceeded, Polynomial, RationalExpr, VarSet
from flatlab.parser import parse

from conftest import rand_poly


def _p(vs, text):
    return parse(text, vs)


def test_gcd_finds_common_factor(vs):
    a = _p(vs, "(x + 1)*(x - 2)*(y + 3)")
    b = _p(vs, "(x + 1)*(y + 3)^2")
    got = g.poly_gcd(a.num, b.num)
    want = _p(vs, "(x + 1)*(y + 3)").num
    assert got == want


def test_gcd_coprime(vs):
    a = _p(vs, "x^2 + 1").num
    b = _p(vs, "z^3 - 2").num
    assert g.poly_gcd(a, b) == Polynomial.const(1)


def test_gcd_divides_both_randomized(vs):
    rng = random.Random(321)
    for _ in range(120):
        common = rand_poly(rng, 3, 2, 2, 3, nonzero=True)
        a = rand_poly(rng, 3, 2, 2, 3, nonzero=True) * common
        b = rand_poly(rng, 3, 2, 2, 3, nonzero=True) * common
        got = g.poly_gcd(a, b)
        # the common factor must divide the gcd, and the gcd both inputs
        g.divexact(a, got)
        g.divexact(b, got)
        quotient = g.divexact(got, g.poly_gcd(got, common))
        assert (got.degree() >= common.degree() - common.content() + 0
                or quotient is not None)


def test_divexact_raises_on_inexact(vs):
    a = _p(vs, "x^2 + 1").num
    b = _p(vs, "x + 1").num
    with pytest.raises(Exception):
        g.divexact(a, b)


def test_degree_cap_env(vs, monkeypatch):
    monkeypatch.setenv("FLATLAB_GCD_DEGREE_CAP", "3")
    a = _p(vs, "(x + 1)^4").num
    b = _p(vs, "(x + 1)^5").num
    with pytest.raises(GcdCapExceeded):
        g.poly_gcd(a, b)
    monkeypatch.setenv("FLATLAB_GCD_DEGREE_CAP", "40")
    assert g.poly_gcd(a, b) == _p(vs, "(x + 1)^4").num


def test_cap_skip_keeps_soundness(vs, monkeypatch):
    # with a tiny cap, reduction is skipped but equality still decides exactly
    monkeypatch.setenv("FLATLAB_GCD_DEGREE_CAP", "1")
    a = _p(vs, "(x^2 - 1)/(x - 1)")
    assert not a.reduced or a == _p(vs, "x + 1")
    monkeypatch.delenv("FLATLAB_GCD_DEGREE_CAP")
    b = _p(vs, "x + 1")
    assert a == b
    assert (a - b).is_zero()


def test_probably_coprime_is_sound(vs):
    rng = random.Random(99)
    for _ in range(200):
        common = rand_poly(rng, 3, 2, 2, 3, nonzero=True)
        if common.degree() < 1:
            continue
        a = rand_poly(rng, 3, 2, 2, 3, nonzero=True) * common
        b = rand_poly(rng, 3, 2, 2, 3, nonzero=True) * common
        # a true common factor must never be certified away
        assert not g.probably_coprime(a, b) or g.poly_gcd(a, b).degree() == 0
