"""
Exact combinatorial coefficients: Stirling numbers of the first kind (central and non-central), the
alpha coefficients of the binomial expansion, harmonic numbers and binomial coefficients.

All values are exact; conversion to floating point is left to the caller.
"""
import math
import threading
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List

from .config import Tables
from .errors import DomainError, RangeError


class StirlingTable:

    def __init__(self, shift: int = 0, j_max: int = Tables.stirling_max_order) -> None:
        """Triangular table of non-central Stirling numbers S_{j,l}^(k) of the first kind, grown on demand.
        Rows follow S_{j+1,l}^(k) = S_{j,l}^(k-1) - (j+l) S_{j,l}^(k) from S_{1,l}^(1) = 1; shift 0 gives the
        ordinary (central) numbers.
        @param shift: the shift l >= 0.
        @param j_max: largest row the table may grow to.
        """
        if shift < 0:
            raise DomainError('Stirling shift must be non-negative, got {}'.format(shift))
        self.shift = shift
        self.j_max = j_max
        # rows[j][k] for k = 0..j, row 0 unused
        self.rows: List[List[int]] = [[1], [0, 1]]
        self._lock = threading.Lock()

    def _grow(self, j: int) -> None:
        with self._lock:
            while len(self.rows) <= j:
                n = len(self.rows) - 1
                prev = self.rows[n]
                factor = n + self.shift
                row = [0] * (n + 2)
                for k in range(1, n + 2):
                    left = prev[k - 1] if k - 1 <= n else 0
                    right = prev[k] if k <= n else 0
                    row[k] = left - factor * right
                self.rows.append(row)

    def row(self, j: int) -> List[int]:
        """S_{j,l}^(k) for k = 0..j as Python integers."""
        if j < 1:
            raise DomainError('Stirling row index must be >= 1, got {}'.format(j))
        if j > self.j_max:
            raise RangeError('Stirling row {} exceeds the table limit {}'.format(j, self.j_max))
        if j >= len(self.rows):
            self._grow(j)
        return self.rows[j]

    def get(self, j: int, k: int) -> Fraction:
        if j < 1 or k < 1 or k > j:
            return Fraction(0)
        return Fraction(self.row(j)[k])


_tables: Dict[int, StirlingTable] = {}
_tables_lock = threading.Lock()


def stirling_table(shift: int = 0) -> StirlingTable:
    """Shared table for the given shift."""
    with _tables_lock:
        table = _tables.get(shift)
        if table is None:
            table = _tables[shift] = StirlingTable(shift)
        return table


def stirling_first(j: int, k: int) -> Fraction:
    """Signed Stirling number S_j^(k) of the first kind; 0 outside 1 <= k <= j."""
    return stirling_table(0).get(j, k)


def stirling_noncentral(j: int, l: int, k: int) -> Fraction:
    """Non-central Stirling number S_{j,l}^(k); 0 outside 1 <= k <= j."""
    return stirling_table(l).get(j, k)


@lru_cache(maxsize=None)
def alpha(l: int, j: int) -> Fraction:
    """alpha_{l,j} from alpha_{l,j+1} = sum_{k=0}^{l} alpha_{k,j} / (l-k+2), alpha_{0,0} = 1, alpha_{l,0} = 0."""
    if l < 0 or j < 0:
        raise DomainError('alpha indices must be non-negative, got l={}, j={}'.format(l, j))
    if j == 0:
        return Fraction(1) if l == 0 else Fraction(0)
    return sum((alpha(k, j - 1) / (l - k + 2) for k in range(l + 1)), Fraction(0))


def alpha_table(max_sum: int) -> List[List[Fraction]]:
    """Rows l = 0..max_sum of alpha_{l,j} for j = 0..max_sum-l."""
    if max_sum < 0:
        raise DomainError('table size must be non-negative, got {}'.format(max_sum))
    return [[alpha(l, j) for j in range(max_sum - l + 1)] for l in range(max_sum + 1)]


@lru_cache(maxsize=None)
def harmonic(n: int) -> Fraction:
    if n < 1:
        raise DomainError('harmonic number index must be >= 1, got {}'.format(n))
    return sum((Fraction(1, i) for i in range(1, n + 1)), Fraction(0))


def binomial_coefficient(n: int, k: int) -> int:
    if n < 0:
        raise DomainError('binomial coefficient needs n >= 0, got {}'.format(n))
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)
