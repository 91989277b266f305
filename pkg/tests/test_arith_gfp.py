import random
import warnings

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from thuehasse import arith, gfp

SMALL_PRIMES = [2, 3, 5, 7, 11, 13, 101]


def test_primes_and_mobius():
    assert arith.primes_up_to(30) == (2, 3, 5, 7, 11, 13, 17, 19, 23, 29)
    assert [arith.mobius(r) for r in (1, 2, 4, 6, 30)] == [1, -1, 0, 1, -1]
    assert arith.next_prime(13) == 17
    assert arith.valuation(5005 * 25, 5) == 3


def test_crt():
    x, m = arith.crt([1, 2, 3], [5, 7, 11])
    assert m == 385 and (x % 5, x % 7, x % 11) == (1, 2, 3)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 10**15))
def test_factor_matches_sympy(n):
    assert arith.factor(n) == sympy.factorint(n)


def test_factor_budget():
    p, q = sympy.nextprime(10**30), sympy.nextprime(10**31)
    with pytest.raises(arith.FactorizationBudgetExceeded):
        arith.factor(p * q, rho_steps=100)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.lists(st.integers(-9, 9), min_size=4, max_size=4), min_size=4, max_size=4))
def test_bareiss_matches_sympy(rows):
    assert arith.bareiss_det(rows) == sympy.Matrix(rows).det()


def _sympy_factor(f_low, p):
    t = sympy.Symbol("t")
    f = sum(c * t**i for i, c in enumerate(f_low))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        lc, facs = sympy.Poly(f, t, modulus=p).factor_list()
    out = []
    for g, e in facs:
        coeffs = [int(c) % p for c in reversed(g.all_coeffs())]
        inv = pow(coeffs[-1], -1, p)
        out.append(([c * inv % p for c in coeffs], e))
    return sorted(out, key=lambda fe: (len(fe[0]), fe[0][::-1], fe[1]))


@pytest.mark.parametrize("p", SMALL_PRIMES)
def test_gfp_factor_matches_sympy(p):
    rng = random.Random(p)
    for _ in range(60):
        d = rng.randint(1, 7)
        f = [rng.randrange(p) for _ in range(d)] + [rng.randrange(1, p)]
        unit, fac = gfp.factor(f, p)
        assert unit == f[-1]
        assert fac == _sympy_factor(f, p)


@pytest.mark.parametrize("p", [2, 7, 1009, 10**9 + 7, 2**61 - 1])
def test_gfp_roots(p):
    rng = random.Random(p)
    for _ in range(30):
        rs = sorted({rng.randrange(p) for _ in range(rng.randint(1, 4))})
        f = [1]
        for r in rs:
            f = gfp.mul(f, [(-r) % p, 1], p)
        f = gfp.mul(f, [1, 0, 1] if p % 4 == 3 else [1], p)  # x^2 + 1 has no roots when p = 3 mod 4
        assert gfp.roots(f, p) == rs
