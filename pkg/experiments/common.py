"""
Error sweeps over a grid of p for K ~ Bin(N, p): exact E+[1/K^r] next to Poisson-Charlier and
competing approximations, with absolute and relative errors, written as CSV for external plotting.
"""
import csv
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Dict, Iterable, List, Optional, TextIO, Tuple

import numpy as np
from loguru import logger

from inverse_moments.charlier_expansion import Flavor, charlier_estimates
from inverse_moments.competing import rempala, stephan, znidaric
from inverse_moments.config import SweepDefaults
from inverse_moments.errors import DomainError, PreconditionError
from inverse_moments.exact_oracle import DistributionSpec, exact_inverse_moment

EXPANSIONS = ('charlier', 'taylor')
COMPETITORS = ('stephan', 'rempala', 'znidaric')
METHODS = COMPETITORS + EXPANSIONS
# 'all' compares the expansion against every earlier method
ALL_METHODS = COMPETITORS + ('charlier',)
ERROR_KINDS = ('abs', 'rel', 'both')

_competitor_functions = {'stephan': stephan, 'rempala': rempala, 'znidaric': znidaric}


@dataclass(frozen=True)
class SweepConfig:
    N: int
    r: int = 1
    orders: Tuple[int, ...] = SweepDefaults.orders
    methods: Tuple[str, ...] = ('charlier',)
    terms: Tuple[int, ...] = SweepDefaults.terms
    grid_count: int = SweepDefaults.grid_count
    grid_lo: float = SweepDefaults.grid_lo
    grid_hi: float = SweepDefaults.grid_hi
    error_kind: str = 'both'
    jobs: int = 1

    def __post_init__(self) -> None:
        if self.N < 1:
            raise DomainError('N must be >= 1, got {}'.format(self.N))
        if self.r < 1:
            raise DomainError('r must be >= 1, got {}'.format(self.r))
        if not 0 < self.grid_lo < self.grid_hi <= 1:
            raise DomainError('grid needs 0 < lo < hi <= 1, got lo={}, hi={}'.format(self.grid_lo, self.grid_hi))
        if self.grid_count < 2:
            raise DomainError('grid needs at least 2 points, got {}'.format(self.grid_count))
        unknown = set(self.methods) - set(METHODS)
        if not self.methods or unknown:
            raise DomainError('methods must be drawn from {}, got {}'.format(METHODS, self.methods))
        if self.error_kind not in ERROR_KINDS:
            raise DomainError('error kind must be one of {}, got {!r}'.format(ERROR_KINDS, self.error_kind))
        if self.jobs < 1:
            raise DomainError('jobs must be >= 1, got {}'.format(self.jobs))
        if set(self.methods) & set(EXPANSIONS) and not self.orders:
            raise PreconditionError('expansion methods need at least one order')
        if set(self.methods) & set(COMPETITORS):
            if not self.terms or min(self.terms) < 1:
                raise PreconditionError('competing methods need term counts >= 1')
            if self.r != 1:
                raise PreconditionError('competing expansions exist for the first inverse moment only')
            if 'rempala' in self.methods and max(self.terms) > self.N:
                raise PreconditionError('rempala takes at most N={} terms, asked for {}'.format(
                    self.N, max(self.terms)))

    def p_grid(self) -> np.ndarray:
        return np.linspace(self.grid_lo, self.grid_hi, self.grid_count)

    def value_columns(self) -> List[str]:
        columns = []
        for method in self.methods:
            if method in EXPANSIONS:
                columns += ['{}_m{}'.format(method, m) for m in sorted(set(self.orders))]
            else:
                columns += ['{}_M{}'.format(method, M) for M in sorted(set(self.terms))]
        return columns


@dataclass
class SweepRow:
    p: float
    exact: float
    values: Dict[str, float]


def abs_error(approx: float, exact: float) -> float:
    return abs(approx - exact)


def rel_error(approx: float, exact: float) -> float:
    """|1 - approximation / exact|."""
    return abs(1.0 - approx / exact)


@dataclass
class ErrorSweepReport:
    config: SweepConfig
    rows: List[SweepRow] = field(default_factory=list)

    @property
    def columns(self) -> List[str]:
        return self.config.value_columns()

    def error_suffixes(self) -> List[str]:
        kind = self.config.error_kind
        return {'abs': ['abs_err'], 'rel': ['rel_err'], 'both': ['abs_err', 'rel_err']}[kind]

    def header(self) -> List[str]:
        header = ['p', 'exact'] + self.columns
        for column in self.columns:
            header += ['{}_{}'.format(column, suffix) for suffix in self.error_suffixes()]
        return header

    def records(self) -> Iterable[List[float]]:
        suffixes = self.error_suffixes()
        for row in self.rows:
            record = [row.p, row.exact] + [row.values[c] for c in self.columns]
            for column in self.columns:
                approx = row.values[column]
                for suffix in suffixes:
                    error = abs_error if suffix == 'abs_err' else rel_error
                    record.append(error(approx, row.exact))
            yield record

    def errors(self, column: str, kind: str = 'abs') -> np.ndarray:
        error = abs_error if kind == 'abs' else rel_error
        return np.array([error(row.values[column], row.exact) for row in self.rows])

    def max_error(self, column: str, kind: str = 'abs') -> float:
        return float(np.max(self.errors(column, kind)))


def compute_row(config: SweepConfig, p: float) -> SweepRow:
    """Exact value and every configured approximation at one grid point."""
    p = float(p)
    exact = exact_inverse_moment(DistributionSpec.binomial(config.N, p), config.r)
    values: Dict[str, float] = {}
    for method in config.methods:
        if method in EXPANSIONS:
            flavor = Flavor.BARBOUR if method == 'charlier' else Flavor.TAYLOR
            estimates = charlier_estimates(config.N, p, config.r, config.orders, flavor)
            for m, value in estimates.items():
                values['{}_m{}'.format(method, m)] = value
        else:
            function = _competitor_functions[method]
            for M in sorted(set(config.terms)):
                values['{}_M{}'.format(method, M)] = function(config.N, p, M).value
    return SweepRow(p, exact, values)


def run_sweep(config: SweepConfig) -> ErrorSweepReport:
    """Evaluate the sweep over config.p_grid(); rows come back in grid order for any number of jobs."""
    grid = [float(p) for p in config.p_grid()]
    logger.info('sweep N={} r={} methods={} over {} points with {} job(s)',
                config.N, config.r, ','.join(config.methods), len(grid), config.jobs)
    task = partial(compute_row, config)
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as executor:
            rows = list(executor.map(task, grid, chunksize=max(1, len(grid) // (4 * config.jobs))))
    else:
        rows = [task(p) for p in grid]
    return ErrorSweepReport(config, rows)


def format_number(x: float, digits: int = SweepDefaults.significant_digits) -> str:
    return format(x, '.{}g'.format(digits))


def write_sweep_csv(report: ErrorSweepReport, out: Optional[TextIO] = None) -> None:
    out = sys.stdout if out is None else out
    writer = csv.writer(out, lineterminator='\n')
    writer.writerow(report.header())
    for record in report.records():
        writer.writerow([format_number(x) for x in record])


def save_sweep_csv(report: ErrorSweepReport, path: str) -> None:
    with open(path, 'w', newline='') as out:
        write_sweep_csv(report, out)
    logger.info('wrote {} rows to {}', len(report.rows), path)


def read_sweep_csv(source: TextIO) -> Tuple[List[str], List[Dict[str, float]]]:
    reader = csv.reader(source)
    header = next(reader)
    rows = [dict(zip(header, (float(x) for x in record))) for record in reader if record]
    return header, rows


def optimal_terms(report: ErrorSweepReport, method: str) -> List[Tuple[float, int, float]]:
    """Per p, the term count (or order) with the smallest absolute error: (p, count, error)."""
    prefix = method + ('_m' if method in EXPANSIONS else '_M')
    columns = [c for c in report.columns if c.startswith(prefix)]
    if not columns:
        raise PreconditionError('method {!r} is not part of this sweep'.format(method))
    counts = [int(c[len(prefix):]) for c in columns]
    best = []
    for row in report.rows:
        errors = [abs_error(row.values[c], row.exact) for c in columns]
        # NaN or inf columns never win
        finite = [(e, n) for e, n in zip(errors, counts) if math.isfinite(e)]
        error, count = min(finite) if finite else (math.inf, counts[0])
        best.append((row.p, count, error))
    return best
