"""
Extended precision helpers on top of mpmath.

Every caller gets a private MPContext per (thread, precision), so no code path ever touches the
global mpmath.mp precision.
"""
import math
import threading
from fractions import Fraction
from typing import Dict, Iterable, Union

from mpmath import MPContext

from .config import Precision

_local = threading.local()

Number = Union[int, float, Fraction]


def context(dps: int) -> MPContext:
    """Return the calling thread's mpmath context working at dps decimal digits."""
    dps = min(int(dps), Precision.max_dps)
    contexts: Dict[int, MPContext] = getattr(_local, 'contexts', None)
    if contexts is None:
        contexts = _local.contexts = {}
    ctx = contexts.get(dps)
    if ctx is None:
        ctx = MPContext()
        ctx.dps = dps
        contexts[dps] = ctx
    return ctx


def difference_dps(mu: float, degree: int, base_dps: int = Precision.base_dps) -> int:
    """Digits needed to keep a degree-th finite difference of moments around mu accurate.
    The alternating binomial sum loses about degree * log10(2 * max(mu, 1)) digits.
    """
    loss = degree * math.log10(2.0 * max(float(mu), 1.0))
    return base_dps + int(math.ceil(loss))


def closed_form_dps(mu: float, a: int, r: int = 0, base_dps: int = Precision.base_dps) -> int:
    """Digits needed by the Stirling-number closed forms for a shift a.
    The bracket is of size mu^a / (mu+a)^r while its terms are of size a! max(mu, 1)^a, so small mu
    costs a * log10(1/mu).
    """
    loss = a * max(0.0, -math.log10(float(mu))) + 2.0 * math.log10(math.factorial(max(a, 1)))
    loss += r * math.log10(float(mu) + a + 1.0)
    return base_dps + int(math.ceil(loss))


def to_mpf(ctx: MPContext, value: Number):
    """Convert an int, float, Fraction or mpf into ctx without going through a rounded float."""
    if isinstance(value, Fraction):
        return ctx.mpf(value.numerator) / value.denominator
    return ctx.mpf(value)


def alternating_binomial_sum(ctx: MPContext, values: Iterable, n: int):
    """Sum_{a=0}^{n} C(n, a) (-1)^a values[a] evaluated in ctx."""
    values = list(values)
    total = ctx.zero
    for a in range(n + 1):
        term = math.comb(n, a) * values[a]
        total = total - term if a % 2 else total + term
    return total
