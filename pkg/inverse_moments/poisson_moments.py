"""
Inverse moments of the positive and shifted Poisson distributions.

For Q ~ Poisson(mu):
    f_r(mu)     = E+[1/Q^r]       = e^-mu sum_{k>=1} mu^k / (k! k^r)
    q_{-r}(a)   = E[1/(Q+a)^r]    for a >= 1, with q_{-r}(0) = f_r(mu)
f_r is evaluated in two regimes: a truncated ascending series up to a cross-over point mu* and the
asymptotic series sum_i |s_{r+i}^(r)| / mu^(r+i) beyond it. Shifted moments come from Stirling-number
closed forms where those are numerically sound and from direct summation elsewhere.
"""
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np
from loguru import logger
from mpmath import MPContext
from scipy.special import gammaln, xlogy

from .config import Crossover, Oracle, Precision, Tables
from .errors import CalibrationError, DomainError, PreconditionError, RangeError
from .exact_oracle import poisson_inverse_moment_direct, shifted_poisson_moment_direct
from .precision import alternating_binomial_sum, closed_form_dps, context, difference_dps, to_mpf
from .special_numbers import StirlingTable, stirling_first, stirling_noncentral, stirling_table


@dataclass(frozen=True)
class CrossoverProfile:
    """Where to switch from the ascending to the asymptotic series, and how many terms each needs."""
    r: int
    target_rel_error: float
    mu_star: float
    M1: int
    M2: int
    max_validated_error: Optional[float] = None

    @classmethod
    def from_table(cls, r: int, target_rel_error: float) -> 'CrossoverProfile':
        """Tabulated profile for relative error 1e-5 or 1e-10 and r = 1..6."""
        table = Crossover.tables.get(target_rel_error)
        if table is None or r not in table:
            raise PreconditionError('no tabulated cross-over profile for r={} at target {:g}'.format(
                r, target_rel_error))
        mu_star, M1, M2 = table[r]
        return cls(r, target_rel_error, mu_star, M1, M2)


@lru_cache(maxsize=None)
def default_profile(r: int) -> CrossoverProfile:
    """The 1e-10 profile: tabulated for r <= 6, calibrated (once) otherwise."""
    if r in Crossover.table_1e10:
        return CrossoverProfile.from_table(r, 1e-10)
    return calibrate_crossover(r, 1e-10)


@dataclass(frozen=True)
class MuGrid:
    """Calibration grid step, 2 step, ..., upper."""
    step: float = Crossover.grid_step
    upper: float = Crossover.search_upper

    def points(self) -> np.ndarray:
        if self.step <= 0 or self.upper < self.step:
            raise DomainError('grid needs 0 < step <= upper, got step={}, upper={}'.format(self.step, self.upper))
        return self.step * np.arange(1, int(round(self.upper / self.step)) + 1)


@dataclass(frozen=True)
class ShiftedMomentTable:
    """q_{-r}(a) for a = 0..A, held at dps decimal digits so that differences up to order A keep full
    double precision. Values decrease from a = 1 on; q_{-r}(0) = E+[1/Q^r] drops the mass at zero and can sit
    below q_{-r}(1) for small mu.
    """
    mu: float
    r: int
    A: int
    values: Tuple
    dps: int

    def floats(self) -> List[float]:
        return [float(v) for v in self.values]


def _check_mu(mu: float) -> None:
    if not mu > 0:
        raise DomainError('Poisson mean must be positive, got {!r}'.format(mu))


def _check_order(r: int) -> None:
    if r < 1:
        raise DomainError('inverse moment order must be >= 1, got {}'.format(r))


# Double precision series

def er_function(mu: float) -> float:
    """Er(mu) = sum_{i>=1} mu^i / (i i!), summed until a term drops below 1e-17 of the partial sum."""
    if mu < 0:
        raise DomainError('Er is evaluated for mu >= 0, got {!r}'.format(mu))
    if mu == 0:
        return 0.0
    terms = []
    power = 1.0
    running = 0.0
    i = 0
    while True:
        i += 1
        power *= mu / i
        term = power / i
        terms.append(term)
        running += term
        if i > mu and term < 1e-17 * running:
            return math.fsum(terms)


def _ascending_terms(mu, r: int, count: int) -> np.ndarray:
    k = np.arange(1, count + 1, dtype=float)
    if np.ndim(mu) == 0:
        return np.exp(xlogy(k, mu) - gammaln(k + 1) - mu - r * np.log(k))
    mu = np.asarray(mu, dtype=float)[None, :]
    k = k[:, None]
    return np.exp(xlogy(k, mu) - gammaln(k + 1) - mu - r * np.log(k))


@lru_cache(maxsize=None)
def _asymptotic_log_coefficients(r: int, count: int) -> np.ndarray:
    """log |s_{r+i}^(r)| for i = 0..count-1."""
    top = r + count - 1
    table = stirling_table(0) if top <= Tables.stirling_max_order else StirlingTable(0, j_max=top)
    coeffs = np.array([math.log(abs(table.row(r + i)[r])) for i in range(count)])
    coeffs.flags.writeable = False
    return coeffs


def _asymptotic_sum(mu: float, r: int, count: int) -> float:
    powers = r + np.arange(count)
    return math.fsum(np.exp(_asymptotic_log_coefficients(r, count) - powers * math.log(mu)))


def positive_poisson_inverse_moment(mu: float, r: int, profile: Optional[CrossoverProfile] = None) -> float:
    """f_r(mu) in double precision.
    @param mu: Poisson mean, > 0.
    @param r: order, >= 1.
    @param profile: cross-over profile for this r; the 1e-10 profile when omitted.
    @return: f_r(mu) to within the profile's relative error.
    """
    _check_mu(mu)
    _check_order(r)
    if profile is None:
        profile = default_profile(r)
    elif profile.r != r:
        raise PreconditionError('cross-over profile is for r={}, asked for r={}'.format(profile.r, r))
    if mu <= profile.mu_star:
        return math.fsum(_ascending_terms(mu, r, profile.M1))
    return _asymptotic_sum(mu, r, profile.M2)


# Extended precision

def _poisson_sum_mp(ctx: MPContext, mu: float, a: int, r: int):
    """sum_k pi_mu(k) / (k+a)^r in ctx, from k = 1 when a = 0 and from k = 0 otherwise."""
    mu_mp = to_mpf(ctx, mu)
    eps = ctx.mpf(10) ** (-ctx.dps - 5)
    weight = ctx.exp(-mu_mp)
    k = 0
    if a == 0:
        k = 1
        weight *= mu_mp
    total = ctx.zero
    while True:
        term = weight / ctx.mpf(k + a) ** r
        total += term
        if k > mu and term < eps * total:
            return total
        k += 1
        weight = weight * mu_mp / k


def positive_poisson_inverse_moment_mp(mu: float, r: int, dps: int):
    """f_r(mu) as an mpf with dps digits, by the ascending series."""
    _check_mu(mu)
    _check_order(r)
    return _poisson_sum_mp(context(dps), mu, 0, r)


def _bracket_tail_mp(ctx: MPContext, mu_mp, a: int):
    """1 - e^-mu + sum_{j=1}^{a-1} (-mu)^j / j!, summed as -sum_{k>=a} (-mu)^k / k!."""
    eps = ctx.mpf(10) ** (-ctx.dps - 5)
    term = mu_mp ** a / ctx.factorial(a)
    sign = -1 if a % 2 else 1
    tail = ctx.zero
    k = a
    while True:
        tail += sign * term
        k += 1
        term = term * mu_mp / k
        sign = -sign
        if k > mu_mp and term < eps * abs(tail):
            return -tail


def _closed_form_mp(ctx: MPContext, mu: float, a: int, r: int):
    mu_mp = to_mpf(ctx, mu)
    if r == 1:
        sign = 1 if a % 2 else -1
        return sign * math.factorial(a - 1) * _bracket_tail_mp(ctx, mu_mp, a) / mu_mp ** a
    total = to_mpf(ctx, stirling_first(a, r)) * (1 - ctx.exp(-mu_mp))
    for k in range(1, r):
        coefficient = stirling_first(a, r - k)
        if coefficient:
            total += to_mpf(ctx, coefficient) * _poisson_sum_mp(ctx, mu, 0, k)
    for k in range(1, a):
        coefficient = stirling_noncentral(a - k, k, r)
        if coefficient:
            total += to_mpf(ctx, coefficient) * mu_mp ** k
    return total / mu_mp ** a


def _recurrence_mp(ctx: MPContext, mu: float, a: int, r: int):
    mu_mp = to_mpf(ctx, mu)
    # column[s] = E[1/(Q+shift)^s] for s = 0..r, starting at shift 1; the s = 0 entry is 1
    column = [ctx.one, (1 - ctx.exp(-mu_mp)) / mu_mp]
    column += [_poisson_sum_mp(ctx, mu, 0, s - 1) / mu_mp for s in range(2, r + 1)]
    for shift in range(2, a + 1):
        column = [ctx.one] + [(column[s - 1] - (shift - 1) * column[s]) / mu_mp for s in range(1, r + 1)]
    return column[r]


def _check_shifted(mu: float, a: int, r: int) -> None:
    _check_mu(mu)
    _check_order(r)
    if a < 1:
        raise DomainError('shift must be >= 1, got {}'.format(a))


def _closed_form_digits(mu: float, a: int, r: int) -> int:
    dps = closed_form_dps(mu, a, r)
    if dps > Precision.max_dps:
        raise RangeError('closed form for mu={!r} a={} r={} needs {} digits, more than {}'.format(
            mu, a, r, dps, Precision.max_dps))
    return dps


def shifted_inverse_moment_closed_form(mu: float, a: int, r: int) -> float:
    """E[1/(Q+a)^r] from the central and non-central Stirling number expression.
    Stable in double precision only for mu up to about a; evaluated at the precision closed_form_dps asks for.
    @raise RangeError: a beyond the Stirling tables, or mu so small that the cancellation outruns max_dps.
    """
    _check_shifted(mu, a, r)
    if a > Tables.stirling_max_order:
        raise RangeError('shift {} exceeds the Stirling table limit {}'.format(a, Tables.stirling_max_order))
    return float(_closed_form_mp(context(_closed_form_digits(mu, a, r)), mu, a, r))


def shifted_inverse_moment_recurrence(mu: float, a: int, r: int) -> float:
    """E[1/(Q+a)^r] by iterating the shift recurrences up from a = 1."""
    _check_shifted(mu, a, r)
    return float(_recurrence_mp(context(_closed_form_digits(mu, a, r)), mu, a, r))


def _uses_closed_form(mu: float, a: int, r: int) -> bool:
    if mu > a + Crossover.closed_form_margin or a > Tables.stirling_max_order:
        return False
    # tiny mu cancels beyond any affordable precision; direct summation is exact there
    return closed_form_dps(mu, a, r) <= Precision.max_dps


def shifted_inverse_moment(mu: float, a: int, r: int, profile: Optional[CrossoverProfile] = None) -> float:
    """E[1/(Q+a)^r]; a = 0 gives f_r(mu).
    Closed forms serve mu <= a + 5 unless mu is small enough to need more than max_dps digits; direct
    positive-term summation covers everything else.
    """
    if a < 0:
        raise DomainError('shift must be non-negative, got {}'.format(a))
    if a == 0:
        return positive_poisson_inverse_moment(mu, r, profile)
    _check_shifted(mu, a, r)
    if _uses_closed_form(mu, a, r):
        return shifted_inverse_moment_closed_form(mu, a, r)
    tol = Oracle.default_tol / (mu + a) ** r
    return shifted_poisson_moment_direct(mu, a, r, tol).value


def build_q_table(mu: float, r: int, A: int, dps: Optional[int] = None) -> ShiftedMomentTable:
    """q_{-r}(a) for a = 0..A in extended precision.
    @param mu: Poisson mean.
    @param r: order of the inverse moment.
    @param A: largest shift; an order-m expansion needs A >= 2(m-1).
    @param dps: working digits; by default enough for every difference up to order A.
    @return: the table.
    """
    _check_mu(mu)
    _check_order(r)
    if A < 0:
        raise DomainError('table length must be non-negative, got {}'.format(A))
    if dps is None:
        dps = difference_dps(mu, A)
        closed = [a for a in range(1, A + 1) if _uses_closed_form(mu, a, r)]
        if closed:
            dps = max(dps, max(closed_form_dps(mu, a, r) for a in closed))
    ctx = context(dps)
    values = [positive_poisson_inverse_moment_mp(mu, r, ctx.dps)]
    for a in range(1, A + 1):
        if _uses_closed_form(mu, a, r):
            values.append(_closed_form_mp(ctx, mu, a, r))
        else:
            values.append(_poisson_sum_mp(ctx, mu, a, r))
    logger.debug('q table mu={} r={} A={} at {} digits', mu, r, A, ctx.dps)
    return ShiftedMomentTable(mu, r, A, tuple(values), ctx.dps)


def _forward_difference_mp(table: ShiftedMomentTable, n: int):
    if n < 0:
        raise DomainError('difference order must be non-negative, got {}'.format(n))
    if n > table.A:
        raise RangeError('difference of order {} needs a table with A >= {}, got A={}'.format(n, n, table.A))
    return alternating_binomial_sum(context(table.dps), table.values, n)


def forward_difference_at_zero(table: ShiftedMomentTable, n: int) -> float:
    """nu_{-r,n} = ((-Delta)^n q_{-r})(0) = sum_{a=0}^{n} C(n, a) (-1)^a q_{-r}(a)."""
    return float(_forward_difference_mp(table, n))


def _y_values_mp(ctx: MPContext, mu: float, n_max: int) -> list:
    mu_mp = to_mpf(ctx, mu)
    base = _poisson_sum_mp(ctx, mu, 0, 1)
    damping = ctx.exp(-mu_mp)
    values = []
    for n in range(n_max + 1):
        y = mu_mp ** n * base
        for l in range(1, n + 1):
            y += math.factorial(l - 1) * (damping * math.comb(n, l) - 1) * mu_mp ** (n - l)
        values.append(y)
    return values


def y_sequence(mu: float, n: int) -> float:
    """y_n = mu^n e^-mu Er(mu) + sum_{l=1}^{n} (l-1)! (e^-mu C(n, l) - 1) mu^(n-l), which equals
    mu^n ((-Delta)^n q_{-1})(0).
    """
    _check_mu(mu)
    if n < 0:
        raise DomainError('y index must be non-negative, got {}'.format(n))
    return float(_y_values_mp(context(difference_dps(mu, n)), mu, n)[n])


# Cross-over calibration

@lru_cache(maxsize=8192)
def _oracle_value(mu: float, r: int) -> float:
    return poisson_inverse_moment_direct(mu, r, Oracle.calibration_tol).value


def _asymptotic_error(mu: float, r: int, count: int) -> float:
    return abs(1.0 - _asymptotic_sum(mu, r, count) / _oracle_value(mu, r))


def _refine_boundary(r: int, count: int, target: float, lo: float, hi: float) -> float:
    """Bisect between a failing lo and a passing hi; returns the passing end."""
    for _ in range(Crossover.bisection_steps):
        mid = 0.5 * (lo + hi)
        if _asymptotic_error(mid, r, count) < target:
            hi = mid
        else:
            lo = mid
    return hi


def _choose_asymptotic_terms(r: int, target: float, grid: np.ndarray, exact: np.ndarray,
                             max_terms: int) -> Tuple[int, float]:
    log_coeffs = _asymptotic_log_coefficients(r, max_terms)
    powers = r + np.arange(max_terms)
    with np.errstate(over='ignore', invalid='ignore', divide='ignore'):
        terms = np.exp(log_coeffs[:, None] - np.outer(powers, np.log(grid)))
        errors = np.abs(1.0 - np.cumsum(terms, axis=0) / exact[None, :])
    failing = ~(errors < target)
    n_grid = len(grid)
    last_fail = np.where(failing.any(axis=1), n_grid - 1 - np.argmax(failing[:, ::-1], axis=1), -1)
    usable = last_fail < n_grid - 1
    if not usable.any():
        raise CalibrationError(r, target, float(np.nanmin(errors[:, -1])),
                               'asymptotic series misses the target up to mu={:g}'.format(grid[-1]))
    best_index = int(last_fail[usable].min())

    best: Optional[Tuple[int, float]] = None
    for i in np.flatnonzero(usable & (last_fail <= best_index + 1)):
        count = int(i) + 1
        j = int(last_fail[i])
        boundary = float(grid[0]) if j < 0 else _refine_boundary(r, count, target, float(grid[j]), float(grid[j + 1]))
        logger.debug('r={} M2={}: asymptotic series meets target above mu={:.4f}', r, count, boundary)
        if best is None or boundary < best[1]:
            best = (count, boundary)
    if best_index == n_grid - 2:
        logger.warning('cross-over for r={} sits at the edge of the grid (mu <= {:g})', r, grid[-1])
    return best


def _choose_ascending_terms(r: int, target: float, grid: np.ndarray, exact: np.ndarray, mu_star: float) -> int:
    inside = grid <= mu_star
    partial = np.cumsum(_ascending_terms(grid[inside], r, Crossover.max_ascending_terms), axis=0)
    worst = np.max(np.abs(1.0 - partial / exact[inside][None, :]), axis=1)
    passing = np.flatnonzero(worst < target)
    if len(passing) == 0:
        raise CalibrationError(r, target, float(worst.min()),
                               'ascending series needs more than {} terms'.format(Crossover.max_ascending_terms))
    return int(passing[0]) + 1


def calibrate_crossover(r: int, target_rel_error: float, mu_grid: Optional[MuGrid] = None,
                        max_terms: int = Crossover.max_asymptotic_terms) -> CrossoverProfile:
    """Find mu*, M1 and M2 for f_r at the given relative error.
    M2 is the asymptotic term count that pushes the failure region of the asymptotic series lowest; mu* is
    that boundary; M1 is the smallest ascending term count meeting the target at the grid points in (0, mu*].
    The profile is checked against the direct oracle on the grid up to 2 mu*; points between the last grid
    point and mu* are not checked.
    @param r: order of the inverse moment.
    @param target_rel_error: in (1e-14, 1e-2].
    @param mu_grid: search grid; defaults to step 0.05 up to twice the tabulated mu*, or up to 150.
    @param max_terms: largest M2 tried.
    @return: the validated profile.
    """
    _check_order(r)
    if not 1e-14 < target_rel_error <= 1e-2:
        raise DomainError('target relative error must lie in (1e-14, 1e-2], got {!r}'.format(target_rel_error))
    if mu_grid is None:
        tabulated = Crossover.tables.get(target_rel_error, {}).get(r)
        upper = 2 * tabulated[0] if tabulated else Crossover.search_upper
        mu_grid = MuGrid(Crossover.grid_step, upper)
    grid = mu_grid.points()
    logger.info('calibrating r={} at {:g} on {} grid points up to mu={:g}', r, target_rel_error, len(grid), grid[-1])
    exact = np.array([_oracle_value(float(mu), r) for mu in grid])

    M2, mu_star = _choose_asymptotic_terms(r, target_rel_error, grid, exact, max_terms)
    M1 = _choose_ascending_terms(r, target_rel_error, grid, exact, mu_star)
    profile = CrossoverProfile(r, target_rel_error, mu_star, M1, M2)

    step = mu_grid.step
    check = step * np.arange(1, int(math.ceil(2 * mu_star / step)) + 1)
    worst = max(abs(1.0 - positive_poisson_inverse_moment(float(mu), r, profile) / _oracle_value(float(mu), r))
                for mu in check)
    if not worst < target_rel_error:
        raise CalibrationError(r, target_rel_error, worst, 'profile mu*={:.4f} M1={} M2={} fails validation'.format(
            mu_star, M1, M2))
    logger.success('r={} target {:g}: mu*={:.3f} M1={} M2={} (max error {:.3g})',
                   r, target_rel_error, mu_star, M1, M2, worst)
    return CrossoverProfile(r, target_rel_error, mu_star, M1, M2, worst)
