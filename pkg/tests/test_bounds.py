import json
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blrefine.algebra import Polynomial
from blrefine.bounds import (
    compute_terms,
    equality_case_check,
    gaussian_identity_check,
    gaussian_remainder_identity,
    partial_sums,
    sandwich_check,
)
from blrefine.potential import gaussian
from blrefine.quadrature import gaussian_norm_sq, variance_estimate
from blrefine.refinement import SequenceExhausted
from blrefine.thresholds import quartic_potential, xlog_potential

coeffs = st.lists(st.integers(-3, 3), min_size=2, max_size=6).filter(lambda c: any(c[1:]))


def test_partial_sums_alternate():
    assert partial_sums([27, 18, 6]) == [27, 9, 15]
    assert partial_sums([]) == []


def test_gaussian_cubic_report():
    rep = sandwich_check(Polynomial.monomial(3), gaussian(), 3, 1e-12)
    assert rep.passed
    assert [t.value for t in rep.terms] == pytest.approx([27, 18, 6], abs=1e-8)
    assert rep.partial_sums == pytest.approx([27, 9, 15], abs=1e-8)
    assert rep.variance.value == pytest.approx(15, abs=1e-8)
    assert rep.verdicts == ["upper-ok", "lower-ok", "upper-ok"]
    data = json.loads(json.dumps(rep.to_json()))
    assert set(data) >= {"potential", "f", "depth", "terms", "partial_sums", "variance", "tol", "verdicts", "pass"}
    assert set(data["terms"][0]) == {"value", "err"}


def test_quartic_strict_sandwich():
    rep = sandwich_check(Polynomial.monomial(2), quartic_potential(1, Fraction(1, 10)), 2)
    assert rep.passed
    s1, s2 = rep.partial_sums
    var = rep.variance.value
    assert s2 < var < s1
    assert var - s2 > 1e-4 and s1 - var > 1e-4


@pytest.mark.parametrize("cs", [[0, 0, 1], [0, 0, 1, 0, 1], [1, 0, 3, 0, -1]])
def test_log_potential_sandwich_even_f(cs):
    rep = sandwich_check(Polynomial(cs), xlog_potential(Fraction(1, 2)), 3, 1e-10)
    assert rep.passed, rep.verdicts
    assert "not log-concave" not in rep.note


def test_log_potential_odd_f_breaks_first_bound():
    # the measure is bimodal; Var(x) = 1 + 2a exceeds E[x^2 / (x^2 + 2a)] < 1
    rep = sandwich_check(Polynomial.monomial(1), xlog_potential(Fraction(1, 2)), 1, 1e-10)
    assert rep.variance.value == pytest.approx(2.0, abs=1e-8)
    assert not rep.passed and rep.verdicts[0].startswith("violated")
    assert "not log-concave" in rep.note


def test_exhausted_depth():
    with pytest.raises(SequenceExhausted):
        compute_terms(Polynomial.monomial(2), quartic_potential(1, 1), 3)


def test_gaussian_terms_equal_derivative_norms():
    f = Polynomial([1, -2, 0, 1, Fraction(1, 2)])
    terms = compute_terms(f, gaussian(), 5, 1e-12)
    for k, t in enumerate(terms, 1):
        ref = float(gaussian_norm_sq(f.derivative(k)) / math.factorial(k))
        assert t.value == pytest.approx(ref, rel=1e-9, abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(coeffs)
def test_gaussian_sandwich_property(cs):
    f = Polynomial(cs)
    depth = f.degree + 1
    rep = sandwich_check(f, gaussian(), depth, 1e-10)
    assert rep.passed, rep.verdicts
    # the expansion terminates: the last partial sum is the variance
    assert rep.partial_sums[-1] == pytest.approx(rep.variance.value, rel=1e-8, abs=1e-8)


@settings(max_examples=10, deadline=None)
@given(coeffs)
def test_quartic_sandwich_property(cs):
    rep = sandwich_check(Polynomial(cs), quartic_potential(1, Fraction(1, 20)), 3, 1e-10)
    assert rep.passed, rep.verdicts


@pytest.mark.parametrize("f", [Polynomial.monomial(2), Polynomial.monomial(3), Polynomial([0, 1, 0, 0, 1])])
def test_gaussian_identity_every_n(f):
    for n in range(1, f.degree + 2):
        rep = gaussian_identity_check(f, n, 1e-8)
        assert rep.passed, rep.values


def test_remainder_sign_convention():
    # x^3, n = 2: 27 - <(2+L)^{-1} 6x, 6x> = 27 - 12 = 15
    rhs, explicit, rem = gaussian_remainder_identity(Polynomial.monomial(3), 2)
    assert explicit == [27.0] and rem == pytest.approx(12.0)
    assert rhs == pytest.approx(15.0)
    # with the opposite sign on the remainder the identity is off by 2 * rem
    var = variance_estimate(Polynomial.monomial(3), gaussian(), 1e-12, 1e-14).value
    assert abs((27 + rem) - var) > 20
    # x^2, n = 1: <(1+L)^{-1} 2x, 2x> = 4/2 = 2 = Var
    rhs, _, rem = gaussian_remainder_identity(Polynomial.monomial(2), 1)
    assert rem == pytest.approx(2.0) and rhs == pytest.approx(2.0)


def test_identity_check_range():
    with pytest.raises(ValueError):
        gaussian_identity_check(Polynomial.monomial(2), 4)


@pytest.mark.parametrize("a, b", [(1, 1), (2, Fraction(1, 2)), (1, Fraction(1, 10))])
def test_equality_case(a, b):
    rep = equality_case_check(quartic_potential(a, b), 1e-7)
    assert rep.passed, rep.values
    assert rep.values["rho2_zero"] is True


def test_equality_case_rejects_log():
    with pytest.raises(ValueError):
        equality_case_check(xlog_potential(1))


def test_brascamp_lieb_is_strict_off_the_equality_case():
    pot = quartic_potential(1, 1)
    f = Polynomial([0, 1, 1])
    t1 = compute_terms(f, pot, 1, 1e-12)[0].value
    var = variance_estimate(f, pot, 1e-12, 1e-14).value
    assert var < t1 - 1e-3
