"""
Ground-truth values by direct summation of positive terms.

Every approximation in the package is checked against the functions here. Finite sums run over the
whole support; infinite Poisson sums stop at an index K* where a geometric majorant of the tail drops
below the requested tolerance.
"""
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import List, Sequence, Tuple, Union

import numpy as np
from loguru import logger
from scipy.special import gammaln, xlog1py, xlogy

from .config import Oracle
from .errors import DomainError

Number = Union[int, float, Fraction]


class DistributionKind(Enum):
    BINOMIAL = 1
    EXPLICIT_PDF = 2


@dataclass(frozen=True)
class DistributionSpec:
    """A non-negative integer variate: Binomial(N, p) or a finite table of probabilities f(0), f(1), ...
    Weights past the end of an explicit table are zero.
    """
    kind: DistributionKind
    N: int = 0
    p: Number = 0.0
    weights: Tuple[Number, ...] = ()

    def __post_init__(self) -> None:
        if self.kind is DistributionKind.BINOMIAL:
            _check_binomial(self.N, self.p)
        else:
            _check_weights(self.weights)

    @classmethod
    def binomial(cls, N: int, p: Number) -> 'DistributionSpec':
        return cls(DistributionKind.BINOMIAL, N=N, p=p)

    @classmethod
    def explicit(cls, weights: Sequence[Number]) -> 'DistributionSpec':
        return cls(DistributionKind.EXPLICIT_PDF, weights=tuple(weights))

    @property
    def is_binomial(self) -> bool:
        return self.kind is DistributionKind.BINOMIAL

    @property
    def mean(self) -> float:
        if self.is_binomial:
            return self.N * float(self.p)
        return math.fsum(k * float(w) for k, w in enumerate(self.weights))

    def pdf(self) -> np.ndarray:
        """f(k) for k = 0 .. end of support."""
        if self.is_binomial:
            return binomial_weights(self.N, float(self.p))
        return np.asarray([float(w) for w in self.weights], dtype=float)


@dataclass(frozen=True)
class OracleValue:
    value: float
    tail_bound: float


def _check_binomial(N: int, p: Number) -> None:
    if int(N) != N or N <= 0:
        raise DomainError('binomial N must be a positive integer, got {!r}'.format(N))
    if not 0 <= p <= 1:
        raise DomainError('binomial p must lie in [0, 1], got {!r}'.format(p))


def _check_weights(weights: Sequence[Number]) -> None:
    if len(weights) == 0:
        raise DomainError('an explicit PDF needs at least one weight')
    if any(w < 0 for w in weights):
        raise DomainError('PDF weights must be non-negative')
    if all(isinstance(w, (int, Fraction)) for w in weights):
        total = float(sum(weights) - 1)
    else:
        total = math.fsum(float(w) for w in weights) - 1.0
    if abs(total) > Oracle.pdf_sum_tolerance:
        raise DomainError('PDF weights sum to 1{:+.3g}, outside tolerance {:g}'.format(
            total, Oracle.pdf_sum_tolerance))


def binomial_log_weights(N: int, p: float) -> np.ndarray:
    """log Bin(N, p) probabilities for k = 0..N; -inf where a probability is exactly zero."""
    k = np.arange(N + 1, dtype=float)
    return gammaln(N + 1) - gammaln(k + 1) - gammaln(N - k + 1) + xlogy(k, p) + xlog1py(N - k, -p)


def binomial_weights(N: int, p: float) -> np.ndarray:
    """Bin(N, p) probabilities for k = 0..N. N = 0 is allowed and gives the point mass at zero."""
    return np.exp(binomial_log_weights(N, p))


def binomial_pdf(N: int, p: float, k: int) -> float:
    """C(N, k) p^k (1 - p)^(N - k), evaluated in log space so that N up to 10^4 neither overflows nor
    underflows prematurely.
    @param N: number of trials, N >= 1.
    @param p: success probability in [0, 1].
    @param k: number of successes; outside 0..N the probability is 0.
    @return: the probability.
    """
    _check_binomial(N, p)
    if k < 0 or k > N:
        return 0.0
    log_pmf = gammaln(N + 1) - gammaln(k + 1) - gammaln(N - k + 1) + xlogy(k, p) + xlog1py(N - k, -p)
    return float(np.exp(log_pmf))


def exact_inverse_moment(spec: DistributionSpec, r: int) -> float:
    """E+[1/K^r] = sum_{k>=1} f(k) / k^r over the finite support."""
    if r < 1:
        raise DomainError('inverse moment order must be >= 1, got {}'.format(r))
    f = spec.pdf()
    if len(f) < 2:
        return 0.0
    k = np.arange(1, len(f), dtype=float)
    return math.fsum(f[1:] / k ** r)


def _log_poisson(mu: float, k: np.ndarray) -> np.ndarray:
    return xlogy(k, mu) - gammaln(k + 1) - mu


def poisson_tail_index(mu: float, eps: float, k_min: int = 1) -> int:
    """Smallest K >= max(mu, k_min) with pi_mu(K) (K+1) / (K+1-mu) < eps.
    For k >= mu successive Poisson probabilities shrink at least by mu/(K+1), so the left-hand side
    bounds sum_{k>=K} pi_mu(k).
    """
    if mu <= 0:
        raise DomainError('Poisson mean must be positive, got {!r}'.format(mu))
    if eps <= 0:
        raise DomainError('tail tolerance must be positive, got {!r}'.format(eps))
    K = max(int(math.ceil(mu)), k_min, 1)
    log_eps = math.log(eps)
    while True:
        log_bound = float(_log_poisson(mu, np.float64(K))) + math.log((K + 1) / (K + 1 - mu))
        if log_bound < log_eps:
            return K
        K += 1


def _check_shift(mu: float, a: int, r: int, tol: float) -> None:
    if mu <= 0:
        raise DomainError('Poisson mean must be positive, got {!r}'.format(mu))
    if a < 0 or r < 0:
        raise DomainError('shift and order must be non-negative, got a={}, r={}'.format(a, r))
    if a == 0 and r == 0:
        raise DomainError('a = 0 together with r = 0 has no inverse moment')
    if tol <= 0:
        raise DomainError('tolerance must be positive, got {!r}'.format(tol))


def poisson_series_terms(mu: float, a: int, r: int, tol: float = Oracle.default_tol) -> Tuple[np.ndarray, float]:
    """The positive terms pi_mu(k) / (k+a)^r summed by the direct oracles, and the bound on what is left.
    Summation starts at k = 0 for a >= 1 and at k = 1 for a = 0.
    @return: (terms for k = first..K*-1, tail bound at K*).
    """
    _check_shift(mu, a, r, tol)
    first = 1 if a == 0 else 0
    K = poisson_tail_index(mu, tol, k_min=first + 1)
    k = np.arange(first, K, dtype=float)
    terms = np.exp(_log_poisson(mu, k) - r * np.log(k + a))
    tail = float(np.exp(_log_poisson(mu, np.float64(K)))) * (K + 1) / (K + 1 - mu) / float(K + a) ** r
    logger.debug('direct Poisson sum mu={} a={} r={}: K*={} tail<={:.3g}', mu, a, r, K, tail)
    return terms, tail


def shifted_poisson_moment_direct(mu: float, a: int, r: int, tol: float = Oracle.default_tol) -> OracleValue:
    """E[1/(Q+a)^r] for Q ~ Poisson(mu); with a = 0 the k = 0 term is left out, giving E+[1/Q^r]."""
    terms, tail = poisson_series_terms(mu, a, r, tol)
    return OracleValue(math.fsum(terms), tail)


def poisson_inverse_moment_direct(mu: float, r: int, tol: float = Oracle.default_tol) -> OracleValue:
    """f_r(mu) = e^-mu sum_{k>=1} mu^k / (k! k^r)."""
    if r < 1:
        raise DomainError('inverse moment order must be >= 1, got {}'.format(r))
    return shifted_poisson_moment_direct(mu, 0, r, tol)


def central_moment_binomial(N: int, p: float, i: int) -> float:
    """i-th central moment sum_k f(k) (k - Np)^i of Bin(N, p); N = 0 gives the point mass at 0."""
    if int(N) != N or N < 0:
        raise DomainError('binomial N must be a non-negative integer, got {!r}'.format(N))
    if not 0 <= p <= 1:
        raise DomainError('binomial p must lie in [0, 1], got {!r}'.format(p))
    if i < 0:
        raise DomainError('moment index must be non-negative, got {}'.format(i))
    if i == 0:
        return 1.0
    f = binomial_weights(N, p)
    k = np.arange(N + 1, dtype=float)
    return math.fsum(f * (k - N * p) ** i)


def factorial_cumulants_from_pdf(weights: Sequence[Number], max_j: int) -> List[Number]:
    """Factorial cumulants kappa^(1)..kappa^(max_j) of a finite PDF.
    Forms G(x) = sum_k f(k) (1+x)^k = sum_n g_n x^n with g_n = sum_k f(k) C(k, n), takes the formal
    logarithm l(x) to order max_j and returns n! l_n.
    The arithmetic is exact: rational weights give Fractions back, floats are converted exactly and the
    results rounded once at the end.
    @param weights: f(0), f(1), ... summing to 1.
    @param max_j: highest cumulant order, >= 1.
    @return: [kappa^(1), ..., kappa^(max_j)].
    """
    if max_j < 1:
        raise DomainError('max_j must be >= 1, got {}'.format(max_j))
    _check_weights(weights)
    exact = all(isinstance(w, (int, Fraction)) for w in weights)
    f = [Fraction(w) for w in weights]

    g = [sum(w * math.comb(k, n) for k, w in enumerate(f) if k >= n) for n in range(max_j + 1)]
    log_coeffs = [Fraction(0)] * (max_j + 1)
    for n in range(1, max_j + 1):
        acc = g[n] - sum(Fraction(k, n) * log_coeffs[k] * g[n - k] for k in range(1, n))
        log_coeffs[n] = acc / g[0]

    cumulants = [math.factorial(n) * log_coeffs[n] for n in range(1, max_j + 1)]
    if exact:
        return cumulants
    return [float(c) for c in cumulants]
