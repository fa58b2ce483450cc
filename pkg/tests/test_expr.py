import math
import random
from fractions import Fraction

import pytest

from flatlab.expr import (
    DivisionByZeroExpr,
    EvalDomainError,
    ExprError,
    RationalExpr,
    SubstitutionDomainError,
    UnknownVariableError,
    VarSet,
)
from flatlab.parser import parse

from conftest import rand_expr


class TestBasics:
    def test_parse_examples(self, vs):
        e = parse("y^2*l - 1/2", vs)
        assert str(e) == "(2*y^2*l - 1)/2"
        assert str(parse("x^3/3 + 4*z", vs)) == "(x^3 + 12*z)/3"
        assert parse("(x - x)", vs).is_zero()

    def test_field_ops(self, vs):
        x = RationalExpr.var(vs, "x")
        assert (x + (-x)).is_zero()
        assert (1 / x) * x == 1
        assert parse("x^2 - 1", vs) / parse("x - 1", vs) == parse("x + 1", vs)

    def test_div_by_zero(self, vs):
        with pytest.raises(DivisionByZeroExpr):
            parse("x", vs) / parse("x - x", vs)

    def test_diff(self, vs):
        assert parse("x^3/3 + 4*z", vs).diff("x") == parse("x^2", vs)
        assert RationalExpr.const(vs, 7).diff("x").is_zero()
        assert parse("1/x", vs).diff("x") == parse("-1/x^2", vs)

    def test_diff_unknown_variable(self, vs):
        with pytest.raises(UnknownVariableError):
            parse("x", vs).diff("nope")

    def test_substitute(self, vs):
        vs.add("l")
        e = parse("y^2*l", vs)
        assert e.substitute({"l": RationalExpr.zero(vs)}).is_zero()
        binding = parse("-x/(3*z)", vs)
        assert parse("l", vs).substitute({"l": binding}) == binding

    def test_substitute_function_symbol_derivative(self):
        vs = VarSet(["x", "z"])
        vs.function("F", ("x", "z"))
        F = RationalExpr.var(vs, "F")
        Fz = F.diff("z")
        assert Fz.substitute({"F": parse("x^3/3 + 4*z", vs)}) == 4

    def test_substitute_zero_denominator(self, vs):
        e = parse("1/x", vs)
        with pytest.raises(SubstitutionDomainError):
            e.substitute({"x": RationalExpr.zero(vs)})

    def test_eval(self, vs):
        assert parse("x^2", vs).eval_numeric({"x": 2.0}) == pytest.approx(4.0)
        assert parse("-x/(3*z)", vs).eval_numeric({"x": 1.0, "z": 1.0}) == pytest.approx(-1 / 3)
        f22 = parse("1/45*x^5 + 4/3*x^2*z - 16*z^2/x", vs)
        assert f22.eval_numeric({"x": 1.0, "z": 1.0}) == pytest.approx(-659 / 45)

    def test_eval_near_zero_denominator(self, vs):
        with pytest.raises(EvalDomainError):
            parse("1/x", vs).eval_numeric({"x": 1e-15})

    def test_eval_unbound(self, vs):
        with pytest.raises(ExprError):
            parse("x + z", vs).eval_numeric({"x": 1.0})

    def test_pow(self, vs):
        x = RationalExpr.var(vs, "x")
        assert x ** 0 == 1
        assert x ** 3 == parse("x^3", vs)
        assert x ** -2 == parse("1/x^2", vs)

    def test_const_fraction(self, vs):
        c = RationalExpr.const(vs, Fraction(-3, 6))
        assert str(c) == "-1/2"
        assert c.as_fraction() == Fraction(-1, 2)

    def test_canonical_sign_and_content(self, vs):
        e = parse("(2*x + 2)/(-4*z)", vs)
        # denominator leading coefficient positive, shared content removed
        assert e.den.leading()[1] > 0
        assert math.gcd(e.num.content(), e.den.content()) == 1

    def test_cross_registry_mixing_rejected(self, vs):
        other = VarSet(["x"])
        with pytest.raises(ExprError):
            parse("x", vs) + parse("x", other)


SEED = 0xD1FF
CASES = 1000


class TestRandomizedProperties:
    """Kernel property suite: 1000 randomized cases per law."""

    def test_ring_axioms(self, vs):
        rng = random.Random(SEED)
        for _ in range(CASES):
            a = rand_expr(rng, vs)
            b = rand_expr(rng, vs)
            c = rand_expr(rng, vs)
            assert ((a + b) + c - (a + (b + c))).is_zero()
            assert (a + b - (b + a)).is_zero()
            assert (a * b - b * a).is_zero()
            assert ((a * b) * c - a * (b * c)).is_zero()
            assert (a * (b + c) - (a * b + a * c)).is_zero()

    def test_derivative_rules(self, vs):
        rng = random.Random(SEED + 1)
        for _ in range(CASES):
            a = rand_expr(rng, vs)
            b = rand_expr(rng, vs)
            assert ((a * b).diff("x") - (a.diff("x") * b + a * b.diff("x"))).is_zero()
            assert ((a + b).diff("x") - a.diff("x") - b.diff("x")).is_zero()
            if not b.is_zero():
                q = a / b
                assert (q.diff("x") - (a.diff("x") * b - a * b.diff("x")) / (b * b)).is_zero()

    def test_mixed_partials_commute(self, vs):
        rng = random.Random(SEED + 2)
        for _ in range(CASES):
            a = rand_expr(rng, vs)
            assert (a.diff("x").diff("z") - a.diff("z").diff("x")).is_zero()

    def test_parse_print_roundtrip(self, vs):
        rng = random.Random(SEED + 3)
        for _ in range(CASES):
            a = rand_expr(rng, vs)
            s = str(a)
            back = parse(s, vs)
            assert back == a
            assert str(back) == s

    def test_eval_multiplicative(self, vs):
        rng = random.Random(SEED + 4)
        done = 0
        while done < CASES:
            a = rand_expr(rng, vs)
            b = rand_expr(rng, vs)
            point = {n: rng.uniform(0.5, 2.0) * rng.choice((-1, 1))
                     for n in ("x", "y", "z")}
            try:
                va, vb = a.eval_numeric(point, 1e-3), b.eval_numeric(point, 1e-3)
                vab = (a * b).eval_numeric(point, 1e-3)
            except EvalDomainError:
                continue
            scale = max(abs(vab), abs(va * vb), 1e-30)
            assert abs(vab - va * vb) / scale < 1e-12
            done += 1
