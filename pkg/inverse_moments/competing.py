"""
Earlier expansions of the first inverse moment E+[1/K] of K ~ Bin(N, p), kept as baselines for the
Poisson-Charlier expansion. Rempala's and Znidaric's series are asymptotic: adding terms eventually
makes them worse.
"""
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from loguru import logger
from scipy.special import gammaln, logsumexp, xlogy

from .errors import DomainError, RangeError
from .exact_oracle import binomial_log_weights, central_moment_binomial


class Method(Enum):
    STEPHAN = 1
    REMPALA = 2
    ZNIDARIC = 3


@dataclass(frozen=True)
class CompetitorResult:
    value: float
    method: Method
    terms: int


def _check(N: int, p: float, M: int) -> None:
    if int(N) != N or N < 1:
        raise DomainError('binomial N must be a positive integer, got {!r}'.format(N))
    if not 0 < p <= 1:
        raise DomainError('these expansions need 0 < p <= 1, got {!r}'.format(p))
    if M < 1:
        raise DomainError('number of terms must be >= 1, got {}'.format(M))


def stephan(N: int, p: float, M: int) -> CompetitorResult:
    """sum_{i=1}^{M} (i-1)! N! s_i / ((N+i)! p^i) with s_i = P(Bin(N+i, p) > i).
    The factorial ratio is accumulated as (1/i) prod_{j<=i} j/(N+j) and s_i is summed in log space over
    the upper tail, so large i neither overflows the factorials nor underflows s_i. Convergence
    is slow for small p.
    @param N: number of trials.
    @param p: success probability in (0, 1].
    @param M: number of terms.
    @return: the M-term partial sum.
    """
    _check(N, p, M)
    log_p = math.log(p)
    log_product = 0.0
    terms = []
    for i in range(1, M + 1):
        log_product += math.log(i / (N + i))
        log_s = logsumexp(binomial_log_weights(N + i, p)[i + 1:])
        terms.append(math.exp(log_product - math.log(i) + log_s - i * log_p))
    logger.debug('stephan N={} p={} M={}: last term {:.3e}', N, p, M, terms[-1])
    return CompetitorResult(math.fsum(terms), Method.STEPHAN, M)


def stephan_exact(N: int, p: float) -> float:
    """E+[1/K] = sum_{k=1}^{N} (q^(N-k) - q^N) / k, the N-term finite form; every term is non-negative."""
    if int(N) != N or N < 1:
        raise DomainError('binomial N must be a positive integer, got {!r}'.format(N))
    if not 0 <= p <= 1:
        raise DomainError('binomial p must lie in [0, 1], got {!r}'.format(p))
    q = 1.0 - p
    q_N = q ** N
    return math.fsum((q ** (N - k) - q_N) / k for k in range(1, N + 1))


def rempala(N: int, p: float, M: int) -> CompetitorResult:
    """(Np)^-1 sum_{i=0}^{M-1} (q/p)^i / C(N-1, i).
    Divergent in general: good for p well above 1/2, useless below it.
    """
    _check(N, p, M)
    if M > N:
        raise RangeError('rempala needs M <= N={}: C(N-1, i) vanishes for i >= N, got M={}'.format(N, M))
    q = 1.0 - p
    i = np.arange(M, dtype=float)
    log_binomial = gammaln(N) - gammaln(i + 1) - gammaln(N - i)
    with np.errstate(over='ignore'):
        terms = np.exp(xlogy(i, q / p) - log_binomial)
    return CompetitorResult(math.fsum(terms) / (N * p), Method.REMPALA, M)


def znidaric(N: int, p: float, M: int) -> CompetitorResult:
    """(Np / (Np+q)^2) sum_{i=0}^{M-1} (-1)^i (i+1) mu_i(N-1) / (Np+q)^i, mu_i(N-1) the central moments
    of Bin(N-1, p).
    """
    _check(N, p, M)
    q = 1.0 - p
    scale = N * p + q
    terms = [(-1) ** i * (i + 1) * central_moment_binomial(N - 1, p, i) / scale ** i for i in range(M)]
    return CompetitorResult(N * p / scale ** 2 * math.fsum(terms), Method.ZNIDARIC, M)
