import math
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from blrefine.algebra import (
    ALL_REALS,
    PUNCTURED,
    Polynomial,
    PoleError,
    RationalFunction,
    as_fraction,
    normalize,
    poly_gcd,
    poly_positive_on,
    rf_arith,
    rf_derivative,
    rf_eval,
    rf_positive_on,
    squarefree_part,
    sturm_real_roots,
)

X = sp.Symbol("x")

small = st.fractions(min_value=-5, max_value=5, max_denominator=6)
polys = st.lists(small, min_size=0, max_size=6).map(Polynomial)
nonzero_polys = polys.filter(lambda p: not p.is_zero())


def to_sympy(p: Polynomial):
    return sum(sp.Rational(c.numerator, c.denominator) * X**k for k, c in enumerate(p.coeffs))


def from_sympy(expr) -> Polynomial:
    cs = sp.Poly(sp.expand(expr), X).all_coeffs()[::-1]
    return Polynomial(Fraction(int(c.p), int(c.q)) for c in cs)


def rf_sympy(r: RationalFunction):
    return to_sympy(r.num) / to_sympy(r.den)


# -- parsing ------------------------------------------------------------------

def test_as_fraction_accepts_exact_forms():
    assert as_fraction("1/3") == Fraction(1, 3)
    assert as_fraction(7) == 7
    assert as_fraction(" -2/4 ") == Fraction(-1, 2)


@pytest.mark.parametrize("bad", [0.5, True, None, "abc", "1/0"])
def test_as_fraction_rejects(bad):
    with pytest.raises((TypeError, ValueError)):
        as_fraction(bad)


def test_polynomial_trims_and_degree():
    assert Polynomial([1, 2, 0, 0]).degree == 1
    assert Polynomial().degree == -1
    assert Polynomial([0, 0]).is_zero()


def test_json_roundtrip():
    p = Polynomial(["1/2", 0, "-3"])
    assert Polynomial.from_json(p.to_json()) == p
    r = RationalFunction(p, Polynomial([1, 1]))
    assert RationalFunction.from_json(r.to_json()) == r


# -- arithmetic against sympy --------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(polys, polys)
def test_ring_ops_match_sympy(p, q):
    assert p + q == from_sympy(to_sympy(p) + to_sympy(q))
    assert p - q == from_sympy(to_sympy(p) - to_sympy(q))
    assert p * q == from_sympy(to_sympy(p) * to_sympy(q))


@settings(max_examples=60, deadline=None)
@given(polys, nonzero_polys)
def test_divmod_identity(p, q):
    quo, rem = p.divmod(q)
    assert quo * q + rem == p
    assert rem.degree < q.degree


@settings(max_examples=60, deadline=None)
@given(nonzero_polys, nonzero_polys)
def test_gcd_matches_sympy(p, q):
    g = poly_gcd(p, q)
    ref = from_sympy(sp.gcd(to_sympy(p), to_sympy(q)))
    assert g == ref.monic()
    assert (p % g).is_zero() and (q % g).is_zero()


def test_gcd_of_large_common_factor():
    # exercises the multi-modular path
    base = Polynomial([3, -1, "7/2", 0, 5]) ** 3
    p = base * Polynomial([1, 2, 3, 4, 5, 6, 7])
    q = base * Polynomial([-9, 0, 0, 1, "1/7"])
    assert poly_gcd(p, q) == base.monic()


@settings(max_examples=40, deadline=None)
@given(nonzero_polys, nonzero_polys, nonzero_polys)
def test_canonical_form_is_unique(p, q, s):
    r1 = RationalFunction(p, q)
    r2 = RationalFunction(p * s, q * s)
    assert r1 == r2
    assert r1.den.lc == 1
    assert poly_gcd(r1.num, r1.den).degree <= 0
    assert normalize(r1.num, r1.den) == r1


@settings(max_examples=40, deadline=None)
@given(nonzero_polys, nonzero_polys, nonzero_polys, nonzero_polys)
def test_field_ops_match_sympy(a, b, c, d):
    r, s = RationalFunction(a, b), RationalFunction(c, d)
    for op, ref in (("add", lambda u, v: u + v), ("sub", lambda u, v: u - v),
                    ("mul", lambda u, v: u * v), ("div", lambda u, v: u / v)):
        got = rf_arith(op, r, s)
        assert sp.cancel(rf_sympy(got) - ref(rf_sympy(r), rf_sympy(s))) == 0


def test_rf_arith_rejects_unknown_op_and_division_by_zero():
    with pytest.raises(ValueError):
        rf_arith("pow", RationalFunction(1), RationalFunction(2))
    with pytest.raises(ZeroDivisionError):
        rf_arith("div", RationalFunction(1), RationalFunction(0))


def test_zero_denominator_rejected():
    with pytest.raises(ZeroDivisionError):
        RationalFunction(Polynomial([1]), Polynomial())


@settings(max_examples=40, deadline=None)
@given(polys, nonzero_polys)
def test_derivative_matches_sympy(p, q):
    r = RationalFunction(p, q)
    got = rf_derivative(r)
    assert sp.cancel(rf_sympy(got) - sp.diff(rf_sympy(r), X)) == 0


def test_derivative_finite_difference():
    r = RationalFunction(Polynomial([1, -2, 0, 3]), Polynomial([2, 0, 1]))
    d = r.derivative()
    for x in (-1.7, 0.3, 2.2):
        h = 1e-5
        fd = (r.eval_float(x + h) - r.eval_float(x - h)) / (2 * h)
        assert d.eval_float(x) == pytest.approx(fd, rel=1e-8)


def test_quotient_rule_example():
    # d/dx [1/(1+x^2)] = -2x/(1+x^2)^2
    r = RationalFunction(Polynomial([1]), Polynomial([1, 0, 1]))
    assert r.derivative() == RationalFunction(Polynomial([0, -2]), Polynomial([1, 0, 1]) ** 2)


# -- evaluation ---------------------------------------------------------------

def test_eval_exact_and_pole():
    r = RationalFunction(Polynomial([1, 1]), Polynomial([-1, 1]))
    assert rf_eval(r, Fraction(3)) == 2
    with pytest.raises(PoleError):
        rf_eval(r, 1)
    with pytest.raises(ZeroDivisionError):
        rf_eval(r, 1.0)


def test_float_eval_is_correctly_rounded():
    r = RationalFunction(Polynomial([1, 0, -1]), Polynomial([3]))
    x = 0.1
    assert rf_eval(r, x) == float((1 - Fraction(x) ** 2) / 3)


# -- Sturm counts -------------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-6, 6), min_size=1, max_size=5, unique=True), st.integers(1, 3))
def test_sturm_counts_known_roots(roots, mult):
    p = Polynomial([1])
    for r0 in roots:
        p = p * Polynomial([-r0, 1]) ** mult
    p = p * Polynomial([1, 0, 1])  # a complex pair contributes nothing
    assert sturm_real_roots(p) == len(roots)
    assert sturm_real_roots(p, (0, math.inf)) == sum(r0 > 0 for r0 in roots)
    assert sturm_real_roots(p, (Fraction(-1, 2), Fraction(1, 2))) == (0 in roots)


def test_sturm_matches_numpy_on_random_polys():
    rng = np.random.default_rng(7)
    for _ in range(40):
        cs = [int(c) for c in rng.integers(-9, 10, size=rng.integers(2, 8))]
        if cs[-1] == 0:
            cs[-1] = 1
        p = Polynomial(cs)
        roots = np.roots(cs[::-1])
        real = roots[np.abs(roots.imag) < 1e-9].real
        distinct = len(np.unique(np.round(real, 6)))
        assert sturm_real_roots(p) == distinct


def test_squarefree_part():
    p = Polynomial([-1, 1]) ** 3 * Polynomial([2, 1]) ** 2
    assert squarefree_part(p) == (Polynomial([-1, 1]) * Polynomial([2, 1])).monic()


# -- positivity certificates ----------------------------------------------------

def test_positive_polynomial_certified():
    cert = poly_positive_on(Polynomial([1, 0, 1]))
    assert cert.positive and cert.real_root_count == 0 and cert.domain == ALL_REALS


def test_nonpositive_polynomial_has_witness():
    p = Polynomial([Fraction(-1, 100), 0, 1])
    cert = poly_positive_on(p)
    assert not cert.positive and cert.witness is not None
    assert p(Fraction(cert.witness)) <= 0


def test_double_root_is_not_positive():
    cert = poly_positive_on(Polynomial([-1, 1]) ** 2)
    assert not cert.positive


def test_punctured_domain():
    # x^2 + x^4 vanishes only at 0
    p = Polynomial([0, 0, 1, 0, 1])
    assert not poly_positive_on(p, ALL_REALS).positive
    assert poly_positive_on(p, PUNCTURED).positive
    # odd power of x changes sign at 0
    assert not poly_positive_on(Polynomial([0, 1, 0, 1]), PUNCTURED).positive


def test_rational_positivity():
    r = RationalFunction(Polynomial([1, 0, 1]), Polynomial([2, 0, 3]))
    assert rf_positive_on(r).positive
    r2 = RationalFunction(Polynomial([1, 0, 1]), Polynomial([-2, 0, 3]))
    assert not rf_positive_on(r2).positive


def test_tiny_negative_dip_is_found():
    # min value -1e-12 near x = 1/3
    p = (Polynomial([Fraction(-1, 3), 1]) ** 2) - Fraction(1, 10**12)
    assert not poly_positive_on(p).positive
