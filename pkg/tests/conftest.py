import random

import pytest

from flatlab.expr import Polynomial, RationalExpr, VarSet


@pytest.fixture
def vs():
    return VarSet(["x", "y", "z"])


def rand_poly(rng: random.Random, nvars: int = 3, max_terms: int = 4,
              max_deg: int = 3, coeff: int = 9, nonzero: bool = False) -> Polynomial:
    while True:
        items = []
        for _ in range(rng.randint(1, max_terms)):
            mono = tuple(rng.randint(0, max_deg) if rng.random() < 0.6 else 0
                         for _ in range(nvars))
            c = rng.randint(-coeff, coeff)
            items.append((tuple(mono), c))
        p = Polynomial.from_items(
            (tuple(m[: _last_nonzero(m)]), c) for m, c in items)
        if not nonzero or not p.is_zero():
            return p


def _last_nonzero(m):
    n = len(m)
    while n and m[n - 1] == 0:
        n -= 1
    return n


def rand_expr(rng: random.Random, vs: VarSet, max_terms: int = 3,
              max_deg: int = 2) -> RationalExpr:
    num = rand_poly(rng, len(vs), max_terms, max_deg)
    den = rand_poly(rng, len(vs), 2, 1, 4, nonzero=True)
    return RationalExpr.make(vs, num, den)
