from fractions import Fraction
from math import comb

import pytest
from hypothesis import settings

# Extended precision sums are slow enough to trip the default deadline
settings.register_profile('inverse_moments', deadline=None, max_examples=40)
settings.load_profile('inverse_moments')


def exact_binomial_weights(N, p):
    q = 1 - p
    return [comb(N, k) * p ** k * q ** (N - k) for k in range(N + 1)]


@pytest.fixture
def binomial_fraction_weights():
    return exact_binomial_weights


@pytest.fixture
def generic_cumulants():
    return (Fraction(5), (Fraction(-2), Fraction(3), Fraction(7), Fraction(-11, 2), Fraction(13), Fraction(1, 3),
                          Fraction(-4)))
