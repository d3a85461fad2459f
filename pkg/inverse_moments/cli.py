"""
inverse-moments command line.

    inverse-moments compute --N 10 --p 0.5 --r 1 --order 6
    inverse-moments sweep --N 100 --method all --terms 1-10 --grid 0.002:1:500 --out sweep.csv
    inverse-moments calibrate --r 1 --target 1e-5
    inverse-moments alpha-table --max 7
    inverse-moments poisson-table --r 2 --mu 0.5,1,5,20
    inverse-moments poisson-inverse --mu 1 --a 1 --r 1

Exit codes: 0 success, 1 usage, 2 invalid input (domain, precondition, range or I/O), 3 calibration failure.
"""
import argparse
import csv
import math
import sys
from typing import List, Optional, Sequence, Tuple

from loguru import logger

from .charlier_expansion import Flavor, barbour_error_bound, binomial_inverse_moment
from .config import SweepDefaults
from .errors import CalibrationError, InverseMomentsError
from .exact_oracle import DistributionSpec, exact_inverse_moment
from .poisson_moments import calibrate_crossover, positive_poisson_inverse_moment, shifted_inverse_moment
from .special_numbers import alpha_table

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_CALIBRATION = 3


class _Parser(argparse.ArgumentParser):

    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, '{}: error: {}\n'.format(self.prog, message))


def _int_list(text: str) -> Tuple[int, ...]:
    """'1,2,5' or '1-10' or a mix: '1-3,8'."""
    values = []
    try:
        for part in text.split(','):
            if '-' in part:
                lo, hi = part.split('-')
                values += range(int(lo), int(hi) + 1)
            else:
                values.append(int(part))
    except ValueError:
        raise argparse.ArgumentTypeError('expected integers like 1,2,5 or 1-10, got {!r}'.format(text))
    if not values:
        raise argparse.ArgumentTypeError('empty list')
    return tuple(values)


def _float_list(text: str) -> Tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(','))
    except ValueError:
        raise argparse.ArgumentTypeError('expected numbers like 0.5,1,5, got {!r}'.format(text))


def _grid(text: str) -> Tuple[float, float, int]:
    try:
        lo, hi, count = text.split(':')
        return float(lo), float(hi), int(count)
    except ValueError:
        raise argparse.ArgumentTypeError('expected lo:hi:count, got {!r}'.format(text))


def _flavor(text: str) -> Flavor:
    try:
        return Flavor[text.upper()]
    except KeyError:
        raise argparse.ArgumentTypeError('flavor must be barbour or taylor, got {!r}'.format(text))


def _number(x) -> str:
    return format(x, '.{}g'.format(SweepDefaults.significant_digits))


def _emit(rows: Sequence[Sequence], fmt: str, header: Sequence[str]) -> None:
    if fmt == 'csv':
        writer = csv.writer(sys.stdout, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([_number(x) if isinstance(x, float) else x for x in row])
        return
    cells = [list(header)] + [[_number(x) if isinstance(x, float) else str(x) for x in row] for row in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(header))]
    for row in cells:
        print('  '.join(cell.rjust(width) for cell, width in zip(row, widths)).rstrip())


def cmd_compute(args: argparse.Namespace) -> int:
    spec = DistributionSpec.binomial(args.N, args.p)
    exact = exact_inverse_moment(spec, args.r)
    approx = binomial_inverse_moment(args.N, args.p, args.r, args.order, args.flavor)
    rows: List[Tuple[str, float]] = [
        ('exact', exact),
        ('approximation', approx),
        ('abs_err', abs(approx - exact)),
        ('rel_err', abs(1.0 - approx / exact) if exact else math.nan),
    ]
    if args.r == 1 and args.p < 0.25 and args.flavor is Flavor.BARBOUR:
        rows.append(('barbour_bound', barbour_error_bound(args.N, args.p, args.order)))
    if args.format == 'csv':
        _emit([[value for _, value in rows]], 'csv', [name for name, _ in rows])
    else:
        print('N={} p={} r={} order={} flavor={}'.format(
            args.N, args.p, args.r, args.order, args.flavor.name.lower()))
        _emit(rows, 'text', ['quantity', 'value'])
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    # imported here: the experiments package depends on the library, not the other way round
    from experiments.common import ALL_METHODS, SweepConfig, run_sweep, save_sweep_csv, write_sweep_csv

    methods = ALL_METHODS if args.method == 'all' else (args.method,)
    lo, hi, count = args.grid
    config = SweepConfig(N=args.N, r=args.r, orders=args.orders, methods=methods, terms=args.terms,
                         grid_count=count, grid_lo=lo, grid_hi=hi, error_kind=args.error_kind, jobs=args.jobs)
    report = run_sweep(config)
    if args.out:
        save_sweep_csv(report, args.out)
    else:
        write_sweep_csv(report, sys.stdout)
    return EXIT_OK


def cmd_calibrate(args: argparse.Namespace) -> int:
    profile = calibrate_crossover(args.r, args.target)
    header = ['r', 'target', 'mu_star', 'M1', 'M2', 'max_validated_error']
    row = [profile.r, '{:g}'.format(profile.target_rel_error), '{:.3f}'.format(profile.mu_star),
           profile.M1, profile.M2, '{:.3g}'.format(profile.max_validated_error)]
    _emit([row], args.format, header)
    return EXIT_OK


def cmd_alpha_table(args: argparse.Namespace) -> int:
    table = alpha_table(args.max)
    header = ['l'] + ['j={}'.format(j) for j in range(args.max + 1)]
    rows = [[l] + [str(value) for value in row] + [''] * (args.max + 1 - len(row)) for l, row in enumerate(table)]
    _emit(rows, args.format, header)
    return EXIT_OK


def cmd_poisson_table(args: argparse.Namespace) -> int:
    rows = []
    for mu in args.mu:
        f = positive_poisson_inverse_moment(mu, args.r)
        rows.append([mu, f, f / mu, math.exp(-mu), f * mu ** args.r])
    _emit(rows, args.format, ['mu', 'f_r', 'f_r_over_mu', 'exp_minus_mu', 'f_r_times_mu_r'])
    return EXIT_OK


def cmd_poisson_inverse(args: argparse.Namespace) -> int:
    rows = [[mu, args.a, args.r, shifted_inverse_moment(mu, args.a, args.r)] for mu in args.mu]
    _emit(rows, args.format, ['mu', 'a', 'r', 'value'])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog='inverse-moments', description='Inverse moments by the Poisson-Charlier expansion.')
    parser.add_argument('--verbose', action='store_true', help='log debug details to stderr')
    commands = parser.add_subparsers(dest='command', parser_class=_Parser)
    commands.required = True

    def add(name: str, handler, help_text: str, formats: bool = True) -> argparse.ArgumentParser:
        sub = commands.add_parser(name, help=help_text)
        sub.set_defaults(handler=handler)
        sub.add_argument('--verbose', action='store_true', default=argparse.SUPPRESS)
        if formats:
            sub.add_argument('--format', choices=('text', 'csv'), default='text')
        return sub

    compute = add('compute', cmd_compute, 'one exact value next to its Charlier approximation')
    compute.add_argument('--N', type=int, required=True)
    compute.add_argument('--p', type=float, required=True)
    compute.add_argument('--r', type=int, default=1)
    compute.add_argument('--order', type=int, default=6)
    compute.add_argument('--flavor', type=_flavor, default=Flavor.BARBOUR)

    sweep = add('sweep', cmd_sweep, 'error sweep over p, written as CSV', formats=False)
    sweep.add_argument('--format', choices=('csv',), default='csv')
    sweep.add_argument('--N', type=int, required=True)
    sweep.add_argument('--r', type=int, default=1)
    sweep.add_argument('--orders', '--order', type=_int_list, default=SweepDefaults.orders)
    sweep.add_argument('--method', choices=('stephan', 'rempala', 'znidaric', 'charlier', 'taylor', 'all'),
                       default='charlier')
    sweep.add_argument('--terms', type=_int_list, default=SweepDefaults.terms)
    sweep.add_argument('--grid', type=_grid,
                       default=(SweepDefaults.grid_lo, SweepDefaults.grid_hi, SweepDefaults.grid_count))
    sweep.add_argument('--error-kind', choices=('abs', 'rel', 'both'), default='both')
    sweep.add_argument('--jobs', type=int, default=1)
    sweep.add_argument('--out')

    calibrate = add('calibrate', cmd_calibrate, 'locate the cross-over point of the two series for f_r')
    calibrate.add_argument('--r', type=int, required=True)
    calibrate.add_argument('--target', type=float, default=1e-10)

    alpha = add('alpha-table', cmd_alpha_table, 'alpha_{l,j} for j + l <= max as exact fractions')
    alpha.add_argument('--max', type=int, default=7)

    poisson = add('poisson-table', cmd_poisson_table, 'f_r(mu), f_r(mu)/mu and exp(-mu) for a list of mu')
    poisson.add_argument('--r', type=int, default=1)
    poisson.add_argument('--mu', type=_float_list, required=True)

    shifted = add('poisson-inverse', cmd_poisson_inverse, 'E[1/(Q+a)^r] for Q ~ Poisson(mu)')
    shifted.add_argument('--r', type=int, default=1)
    shifted.add_argument('--a', type=int, default=0)
    shifted.add_argument('--mu', type=_float_list, required=True)
    return parser


def _configure_logging(verbose: bool) -> None:
    logger.remove()
    logger.add(sys.stderr, level='DEBUG' if verbose else 'WARNING')


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)
    try:
        return args.handler(args)
    except CalibrationError as e:
        logger.error('{}', e)
        print('calibration failed: best achieved error {:.3g}'.format(e.best_error), file=sys.stderr)
        return EXIT_CALIBRATION
    except (InverseMomentsError, OSError) as e:
        logger.error('{}', e)
        print('error: {}'.format(e), file=sys.stderr)
        return EXIT_INPUT


if __name__ == '__main__':
    sys.exit(main())
