"""
Poisson-Charlier expansion of a discrete distribution and of its inverse moments.

The order-m expansion writes the PDF as P_m(nabla) pi_mu, a polynomial in the backward difference
operator applied to the Poisson PDF with the same mean. Inverse moments follow by letting the
polynomial act, as P_m(-Delta), on the shifted Poisson moments q_{-r}(a).
"""
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger

from .config import Oracle, Tables
from .errors import DomainError, PreconditionError, RangeError
from .exact_oracle import DistributionSpec, factorial_cumulants_from_pdf, poisson_tail_index
from .poisson_moments import ShiftedMomentTable, _forward_difference_mp, _y_values_mp, build_q_table
from .precision import context, difference_dps, to_mpf
from .special_numbers import alpha

Number = Union[int, float, Fraction]
# (power of t, power of nabla) -> coefficient
Bivariate = Dict[Tuple[int, int], Number]


class Flavor(Enum):
    BARBOUR = 1
    TAYLOR = 2


@dataclass(frozen=True)
class ExpansionPolynomial:
    """P_m as {degree of nabla: coefficient}; coefficients are exact when the cumulants are."""
    coefficients: Dict[int, Number]
    order: int
    flavor: Flavor

    @property
    def max_degree(self) -> int:
        return max(self.coefficients)

    def coefficient(self, degree: int) -> Number:
        return self.coefficients.get(degree, 0)

    def as_floats(self) -> Dict[int, float]:
        return {d: float(c) for d, c in sorted(self.coefficients.items())}


def binomial_factorial_cumulant(N: int, p: Number, j: int) -> Number:
    """kappa^(j) = -N (j-1)! (-p)^j of Bin(N, p)."""
    if j < 1:
        raise DomainError('cumulant order must be >= 1, got {}'.format(j))
    return -N * math.factorial(j - 1) * (-p) ** j


@dataclass(frozen=True)
class CumulantSequence:
    """Factorial cumulants kappa^(1) = mu and kappa^(2)..kappa^(J)."""
    mu: Number
    higher: Tuple[Number, ...] = ()

    @property
    def J(self) -> int:
        return len(self.higher) + 1

    def kappa(self, j: int) -> Number:
        if j == 1:
            return self.mu
        if not 2 <= j <= self.J:
            raise PreconditionError('cumulant of order {} not supplied (have up to {})'.format(j, self.J))
        return self.higher[j - 2]

    @classmethod
    def binomial(cls, N: int, p: Number, J: int) -> 'CumulantSequence':
        return cls(N * p, tuple(binomial_factorial_cumulant(N, p, j) for j in range(2, J + 1)))

    @classmethod
    def poisson(cls, mu: Number, J: int) -> 'CumulantSequence':
        return cls(mu, (0,) * max(J - 1, 0))

    @classmethod
    def from_pdf(cls, weights: Sequence[Number], J: int) -> 'CumulantSequence':
        kappas = factorial_cumulants_from_pdf(weights, max(J, 1))
        return cls(kappas[0], tuple(kappas[1:]))


def _check_expansion_order(m: int) -> None:
    if m < 1:
        raise DomainError('expansion order must be >= 1, got {}'.format(m))
    if m > Tables.max_expansion_order:
        raise PreconditionError('expansion order {} above the supported maximum {}'.format(
            m, Tables.max_expansion_order))


def _multiply(left: Bivariate, right: Bivariate, max_t: int) -> Bivariate:
    product: Bivariate = {}
    for (t1, d1), c1 in left.items():
        for (t2, d2), c2 in right.items():
            t = t1 + t2
            if t > max_t:
                continue
            product[(t, d1 + d2)] = product.get((t, d1 + d2), 0) + c1 * c2
    return product


def _truncated_exp(argument: Bivariate, max_t: int) -> Bivariate:
    """exp(argument) up to t^max_t; argument has no t^0 part."""
    result: Bivariate = {(0, 0): 1}
    power: Bivariate = {(0, 0): 1}
    for n in range(1, max_t + 1):
        power = _multiply(power, argument, max_t)
        if not power:
            break
        for key, c in power.items():
            result[key] = result.get(key, 0) + Fraction(1, math.factorial(n)) * c
    return result


def _collapse(series: Bivariate, m: int, flavor: Flavor) -> ExpansionPolynomial:
    coefficients: Dict[int, Number] = {}
    for (_, d), c in series.items():
        coefficients[d] = coefficients.get(d, 0) + c
    coefficients = {d: c for d, c in sorted(coefficients.items()) if d == 0 or c != 0}
    return ExpansionPolynomial(coefficients, m, flavor)


def _expansion(cumulants: CumulantSequence, m: int, flavor: Flavor) -> ExpansionPolynomial:
    _check_expansion_order(m)
    if cumulants.J < 2 * m - 2:
        raise PreconditionError('an order-{} expansion needs cumulants up to {}, got {}'.format(
            m, 2 * m - 2, cumulants.J))
    max_t = m - 1
    offset = 1 if flavor is Flavor.BARBOUR else 0
    argument: Bivariate = {}
    for k in range(2, cumulants.J + 1):
        t = k - offset
        if t > max_t:
            break
        kappa = cumulants.kappa(k)
        if kappa != 0:
            argument[(t, k)] = Fraction((-1) ** k, math.factorial(k)) * kappa
    return _collapse(_truncated_exp(argument, max_t), m, flavor)


def barbour_polynomial(cumulants: CumulantSequence, m: int) -> ExpansionPolynomial:
    """Order-m Taylor coefficients in t of exp((1/t) sum_{k>=2} kappa^(k) (-t nabla)^k / k!), at t = 1.
    @param cumulants: factorial cumulants through order 2m-2.
    @param m: expansion order.
    @return: P_m, of degree at most 2(m-1).
    """
    return _expansion(cumulants, m, Flavor.BARBOUR)


def taylor_polynomial(cumulants: CumulantSequence, m: int) -> ExpansionPolynomial:
    """Order-m expansion of exp(sum_{k>=2} kappa^(k) (-t nabla)^k / k!) in t, at t = 1."""
    return _expansion(cumulants, m, Flavor.TAYLOR)


def expansion_polynomial(cumulants: CumulantSequence, m: int, flavor: Flavor = Flavor.BARBOUR) -> ExpansionPolynomial:
    return _expansion(cumulants, m, flavor)


def binomial_barbour_polynomial(N: int, mu: Number, m: int) -> ExpansionPolynomial:
    """P_m of Bin(N, mu/N) from the alpha coefficients:
    1 + sum_{k=1}^{m-1} N^-k sum_{j=1}^{k} (-1)^j / j! alpha_{k-j,j} (mu x)^(j+k).
    """
    _check_expansion_order(m)
    if N < 1:
        raise DomainError('binomial N must be >= 1, got {}'.format(N))
    coefficients: Dict[int, Number] = {0: 1}
    for k in range(1, m):
        for j in range(1, k + 1):
            degree = j + k
            term = Fraction((-1) ** j, math.factorial(j)) * alpha(k - j, j) * mu ** degree / N ** k
            coefficients[degree] = coefficients.get(degree, 0) + term
    coefficients = {d: c for d, c in sorted(coefficients.items()) if d == 0 or c != 0}
    return ExpansionPolynomial(coefficients, m, Flavor.BARBOUR)


def _log_poisson(mu: float, k: int) -> float:
    return k * math.log(mu) - math.lgamma(k + 1) - mu


def expand_pdf(poly: ExpansionPolynomial, mu: float, k_max: Optional[int] = None) -> np.ndarray:
    """g(k) = sum_d c_d nabla^d pi_mu(k) for k = 0..k_max, with pi_mu(k < 0) = 0.
    @param poly: expansion polynomial.
    @param mu: mean of the base Poisson PDF.
    @param k_max: last k; by default far enough out that the neglected mass is below 1e-40. A value
        given here must leave pi_mu(k_max) < 1e-16.
    @return: g as a float array.
    """
    if not mu > 0:
        raise DomainError('Poisson mean must be positive, got {!r}'.format(mu))
    if k_max is None:
        k_max = poisson_tail_index(mu, Oracle.pdf_tail_eps) + poly.max_degree
    elif k_max < 0 or _log_poisson(mu, k_max) >= math.log(Oracle.display_tail_eps):
        raise PreconditionError('k_max={} leaves pi_mu(k_max) >= {:g} for mu={}'.format(
            k_max, Oracle.display_tail_eps, mu))

    ctx = context(difference_dps(mu, poly.max_degree))
    mu_mp = to_mpf(ctx, mu)
    pmf = [ctx.exp(-mu_mp)]
    for k in range(1, k_max + 1):
        pmf.append(pmf[-1] * mu_mp / k)

    g = [ctx.zero] * (k_max + 1)
    column = pmf
    for d in range(poly.max_degree + 1):
        if d > 0:
            column = [column[0]] + [column[k] - column[k - 1] for k in range(1, k_max + 1)]
        c = poly.coefficient(d)
        if c != 0:
            c = to_mpf(ctx, c)
            g = [g[k] + c * column[k] for k in range(k_max + 1)]
    return np.array([float(v) for v in g])


def inverse_moment_estimate(poly: ExpansionPolynomial, q_table: ShiftedMomentTable) -> float:
    """(P_m(-Delta) q_{-r})(0) = sum_d c_d nu_{-r,d}.
    @param poly: expansion polynomial for a variate with the table's mean.
    @param q_table: q_{-r} with A >= poly.max_degree.
    @return: the order-m estimate of E+[1/K^r].
    """
    if poly.max_degree > q_table.A:
        raise RangeError('polynomial of degree {} needs a table with A >= {}, got A={}'.format(
            poly.max_degree, poly.max_degree, q_table.A))
    ctx = context(q_table.dps)
    total = ctx.zero
    for d, c in poly.coefficients.items():
        total += to_mpf(ctx, c) * _forward_difference_mp(q_table, d)
    return float(total)


def _check_binomial_args(N: int, p: Number) -> None:
    if N < 1:
        raise DomainError('binomial N must be >= 1, got {}'.format(N))
    if not 0 <= p <= 1:
        raise DomainError('binomial p must lie in [0, 1], got {!r}'.format(p))


def _first_moment_partial_sums(N: int, p: float, m_max: int) -> List[float]:
    """Closed-form first inverse moment for every order 1..m_max, from one y sequence."""
    mu = N * float(p)
    degree = 2 * (m_max - 1)
    ctx = context(difference_dps(mu, degree))
    y = _y_values_mp(ctx, mu, degree)
    total = y[0]
    sums = [float(total)]
    for k in range(1, m_max):
        inner = ctx.zero
        for j in range(1, k + 1):
            inner += to_mpf(ctx, Fraction((-1) ** j, math.factorial(j)) * alpha(k - j, j)) * y[j + k]
        total += inner / ctx.mpf(N) ** k
        sums.append(float(total))
    return sums


def first_inverse_moment_binomial(N: int, p: Number, m: int) -> float:
    """E+[1/K] for K ~ Bin(N, p) at order m:
    y_0 + sum_{k=1}^{m-1} N^-k sum_{j=1}^{k} ((-1)^j / j!) alpha_{k-j,j} y_{j+k}.
    """
    _check_binomial_args(N, p)
    _check_expansion_order(m)
    if p == 0:
        return 0.0
    return _first_moment_partial_sums(N, p, m)[m - 1]


def barbour_error_bound(N: int, p: float, m: int) -> float:
    """2^(2m-1) (1 - e^-Np) p^m; informative only for p < 1/4."""
    _check_binomial_args(N, p)
    if m < 1:
        raise DomainError('expansion order must be >= 1, got {}'.format(m))
    return 2.0 ** (2 * m - 1) * -math.expm1(-N * float(p)) * float(p) ** m


def _cumulants_for(spec: DistributionSpec, m: int) -> CumulantSequence:
    J = max(2 * m - 2, 1)
    if spec.is_binomial:
        return CumulantSequence.binomial(spec.N, spec.p, J)
    return CumulantSequence.from_pdf(spec.weights, J)


def inverse_moment(spec: DistributionSpec, r: int, m: int, flavor: Flavor = Flavor.BARBOUR) -> float:
    """Order-m Poisson-Charlier estimate of E+[1/K^r] for any distribution spec.
    @param spec: the variate.
    @param r: order of the inverse moment.
    @param m: expansion order.
    @param flavor: Barbour or Taylor expansion.
    @return: the estimate.
    """
    _check_expansion_order(m)
    cumulants = _cumulants_for(spec, m)
    mu = float(cumulants.mu)
    if mu == 0:
        return 0.0
    poly = expansion_polynomial(cumulants, m, flavor)
    return inverse_moment_estimate(poly, build_q_table(mu, r, 2 * (m - 1)))


def charlier_estimates(N: int, p: Number, r: int, orders: Iterable[int],
                       flavor: Flavor = Flavor.BARBOUR) -> Dict[int, float]:
    """Estimates of E+[1/K^r], K ~ Bin(N, p), for several orders sharing one q table."""
    _check_binomial_args(N, p)
    orders = sorted(set(orders))
    for m in orders:
        _check_expansion_order(m)
    if p == 0:
        return {m: 0.0 for m in orders}
    mu = N * float(p)
    table = build_q_table(mu, r, 2 * (orders[-1] - 1))
    estimates = {}
    for m in orders:
        if flavor is Flavor.BARBOUR:
            poly = binomial_barbour_polynomial(N, mu, m)
        else:
            poly = taylor_polynomial(CumulantSequence.binomial(N, float(p), max(2 * m - 2, 1)), m)
        estimates[m] = inverse_moment_estimate(poly, table)
    logger.debug('charlier estimates N={} p={} r={}: {}', N, p, r, estimates)
    return estimates


def binomial_inverse_moment(N: int, p: Number, r: int, m: int, flavor: Flavor = Flavor.BARBOUR) -> float:
    return charlier_estimates(N, p, r, [m], flavor)[m]
