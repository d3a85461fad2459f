import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from inverse_moments.charlier_expansion import (CumulantSequence, Flavor, barbour_error_bound, barbour_polynomial,
                                                binomial_barbour_polynomial, binomial_factorial_cumulant,
                                                binomial_inverse_moment, charlier_estimates, expand_pdf,
                                                first_inverse_moment_binomial, inverse_moment,
                                                inverse_moment_estimate, taylor_polynomial)
from inverse_moments.errors import DomainError, PreconditionError, RangeError
from inverse_moments.exact_oracle import (DistributionSpec, binomial_pdf, exact_inverse_moment,
                                          poisson_inverse_moment_direct)
from inverse_moments.poisson_moments import build_q_table, er_function

fractions = st.fractions(min_value=-20, max_value=20, max_denominator=50)


def test_binomial_factorial_cumulants():
    assert binomial_factorial_cumulant(10, 0.3, 1) == pytest.approx(3.0)
    assert binomial_factorial_cumulant(10, 0.3, 2) == pytest.approx(-0.9)
    assert binomial_factorial_cumulant(10, 0.3, 3) == pytest.approx(0.54)
    assert binomial_factorial_cumulant(10, Fraction(1, 2), 4) == Fraction(-60, 16)


def test_first_order_is_the_poisson_pdf(generic_cumulants):
    mu, higher = generic_cumulants
    assert barbour_polynomial(CumulantSequence(mu, higher), 1).coefficients == {0: 1}


def test_third_order_barbour_polynomial(generic_cumulants):
    mu, higher = generic_cumulants
    k2, k3 = higher[0], higher[1]
    poly = barbour_polynomial(CumulantSequence(mu, higher), 3)
    assert poly.coefficients == {0: 1, 2: k2 / 2, 3: -k3 / 6, 4: k2 ** 2 / 8}
    assert poly.flavor is Flavor.BARBOUR


def test_taylor_adds_the_fourth_cumulant(generic_cumulants):
    mu, higher = generic_cumulants
    cumulants = CumulantSequence(mu, higher)
    taylor = taylor_polynomial(cumulants, 5).coefficients
    barbour = barbour_polynomial(cumulants, 3).coefficients
    difference = {d: taylor.get(d, 0) - barbour.get(d, 0) for d in set(taylor) | set(barbour)}
    assert {d: c for d, c in difference.items() if c != 0} == {4: higher[2] / 24}


@pytest.mark.parametrize('m', [1, 2])
def test_low_order_taylor_is_trivial(m, generic_cumulants):
    mu, higher = generic_cumulants
    assert taylor_polynomial(CumulantSequence(mu, higher), m).coefficients == {0: 1}


@pytest.mark.parametrize('m', range(1, 9))
@pytest.mark.parametrize('flavor', [Flavor.BARBOUR, Flavor.TAYLOR])
def test_poisson_cumulants_give_identity(m, flavor):
    cumulants = CumulantSequence.poisson(4.0, 2 * m - 2)
    poly = barbour_polynomial(cumulants, m) if flavor is Flavor.BARBOUR else taylor_polynomial(cumulants, m)
    assert poly.coefficients == {0: 1}


@given(higher=st.lists(fractions, min_size=14, max_size=14), m=st.integers(1, 8))
def test_barbour_degree_bound(higher, m):
    poly = barbour_polynomial(CumulantSequence(Fraction(3), tuple(higher)), m)
    assert poly.max_degree <= 2 * (m - 1)
    assert poly.coefficient(0) == 1
    assert poly.coefficient(1) == 0


def test_expansion_preconditions():
    with pytest.raises(PreconditionError):
        barbour_polynomial(CumulantSequence(2.0, (0.1, 0.2)), 3)
    with pytest.raises(PreconditionError):
        barbour_polynomial(CumulantSequence.poisson(2.0, 20), 9)
    with pytest.raises(DomainError):
        barbour_polynomial(CumulantSequence.poisson(2.0, 2), 0)
    with pytest.raises(PreconditionError):
        CumulantSequence(1.0, (0.5,)).kappa(3)


def test_binomial_polynomial_third_order():
    N, mu = 10, Fraction(5)
    poly = binomial_barbour_polynomial(N, mu, 3)
    assert poly.coefficients == {0: 1, 2: -mu ** 2 / (2 * N), 3: -mu ** 3 / (3 * N ** 2), 4: mu ** 4 / (8 * N ** 2)}
    assert binomial_barbour_polynomial(N, mu, 1).coefficients == {0: 1}
    assert binomial_barbour_polynomial(N, mu, 2).coefficient(2) == -mu ** 2 / (2 * N)


@pytest.mark.parametrize('N', [10, 100])
@pytest.mark.parametrize('p', [Fraction(1, 10), Fraction(1, 2), Fraction(9, 10)])
@pytest.mark.parametrize('m', range(1, 7))
def test_binomial_polynomial_matches_cumulant_expansion(N, p, m):
    exact = barbour_polynomial(CumulantSequence.binomial(N, p, 2 * m - 2), m)
    assert binomial_barbour_polynomial(N, N * p, m).coefficients == exact.coefficients

    floats = binomial_barbour_polynomial(N, N * float(p), m).as_floats()
    generic = barbour_polynomial(CumulantSequence.binomial(N, float(p), 2 * m - 2), m).as_floats()
    assert floats.keys() == generic.keys()
    for d in floats:
        assert floats[d] == pytest.approx(generic[d], rel=1e-11)


def test_identity_polynomial_expands_to_poisson():
    mu = 3.5
    g = expand_pdf(barbour_polynomial(CumulantSequence.poisson(mu, 0), 1), mu)
    k = np.arange(len(g))
    expected = np.exp(k * math.log(mu) - np.array([math.lgamma(i + 1) for i in k]) - mu)
    np.testing.assert_allclose(g, expected, rtol=1e-12)


@pytest.mark.parametrize('N', [10, 100])
@pytest.mark.parametrize('m', range(1, 7))
def test_expanded_pdf_conserves_mass(N, m):
    for p in np.linspace(0.1, 0.9, 9):
        mu = N * p
        g = expand_pdf(binomial_barbour_polynomial(N, mu, m), mu)
        assert math.fsum(g) == pytest.approx(1.0, abs=1e-10)


def test_higher_order_pdf_is_closer_to_binomial():
    N, p = 10, 0.5
    mu = N * p

    def distance(m):
        g = expand_pdf(binomial_barbour_polynomial(N, mu, m), mu)
        return max(abs(g[k] - binomial_pdf(N, p, k)) for k in range(len(g)))

    assert distance(3) < distance(1)


def test_expand_pdf_rejects_short_support():
    with pytest.raises(PreconditionError):
        expand_pdf(binomial_barbour_polynomial(10, 5.0, 2), 5.0, k_max=10)
    assert len(expand_pdf(binomial_barbour_polynomial(10, 5.0, 2), 5.0, k_max=40)) == 41


def test_estimate_with_identity_is_the_poisson_moment():
    table = build_q_table(2.5, 2, 4)
    identity = barbour_polynomial(CumulantSequence.poisson(2.5, 0), 1)
    assert inverse_moment_estimate(identity, table) == table.floats()[0]
    with pytest.raises(RangeError):
        inverse_moment_estimate(binomial_barbour_polynomial(10, 2.5, 4), table)


@pytest.mark.parametrize('m', range(1, 7))
@pytest.mark.parametrize('mu', [0.5, 5.0, 20.0])
@pytest.mark.parametrize('r', [1, 2, 3])
def test_poisson_fixed_point(m, mu, r):
    poly = barbour_polynomial(CumulantSequence.poisson(mu, 2 * m - 2), m)
    estimate = inverse_moment_estimate(poly, build_q_table(mu, r, 2 * (m - 1)))
    assert estimate == pytest.approx(poisson_inverse_moment_direct(mu, r).value, rel=1e-12)


def test_first_inverse_moment_examples():
    N, p = 10, 0.5
    mu = N * p
    assert first_inverse_moment_binomial(N, p, 1) == pytest.approx(math.exp(-mu) * er_function(mu), rel=1e-12)
    assert first_inverse_moment_binomial(N, 0.0, 3) == 0.0
    exact = exact_inverse_moment(DistributionSpec.binomial(N, p), 1)
    assert abs(first_inverse_moment_binomial(N, p, 6) - exact) < abs(first_inverse_moment_binomial(N, p, 1) - exact)


@pytest.mark.parametrize('N', [10, 100])
@pytest.mark.parametrize('m', range(1, 7))
@pytest.mark.parametrize('p', [0.1, 0.3, 0.5, 0.7, 0.9, 1.0])
def test_closed_form_and_polynomial_paths_agree(N, m, p):
    mu = N * p
    polynomial_path = inverse_moment_estimate(binomial_barbour_polynomial(N, mu, m), build_q_table(mu, 1, 2 * (m - 1)))
    assert first_inverse_moment_binomial(N, p, m) == pytest.approx(polynomial_path, rel=1e-9)


def test_barbour_error_bound_values():
    assert barbour_error_bound(10, 0.0, 3) == 0.0
    assert barbour_error_bound(10, 0.1, 2) == pytest.approx(8 * (1 - math.exp(-1)) * 0.01, rel=1e-12)


@pytest.mark.parametrize('N', [10, 100])
@pytest.mark.parametrize('m', [1, 2, 3, 4])
@pytest.mark.parametrize('p', [0.01, 0.05, 0.1, 0.2, 0.25])
def test_barbour_error_bound_holds(N, m, p):
    exact = exact_inverse_moment(DistributionSpec.binomial(N, p), 1)
    assert abs(binomial_inverse_moment(N, p, 1, m) - exact) <= barbour_error_bound(N, p, m)


def test_general_spec_matches_binomial_path(binomial_fraction_weights):
    N, p = 12, Fraction(3, 10)
    spec = DistributionSpec.explicit(binomial_fraction_weights(N, p))
    for m in (1, 3, 5):
        for r in (1, 2):
            assert inverse_moment(spec, r, m) == pytest.approx(binomial_inverse_moment(N, float(p), r, m), rel=1e-12)
            assert inverse_moment(DistributionSpec.binomial(N, p), r, m) == pytest.approx(
                binomial_inverse_moment(N, float(p), r, m), rel=1e-12)


def test_taylor_flavor_estimates():
    estimates = charlier_estimates(10, 0.3, 1, [1, 2, 3, 4], Flavor.TAYLOR)
    barbour = charlier_estimates(10, 0.3, 1, [1], Flavor.BARBOUR)
    assert estimates[1] == estimates[2] == barbour[1]
    assert inverse_moment(DistributionSpec.binomial(10, 0.3), 1, 4, Flavor.TAYLOR) == pytest.approx(estimates[4], rel=1e-12)


def test_estimates_at_zero_and_one():
    assert charlier_estimates(10, 0.0, 2, [1, 6]) == {1: 0.0, 6: 0.0}
    assert all(math.isfinite(v) for v in charlier_estimates(10, 1.0, 1, range(1, 7)).values())
