"""Bessel functions of the first kind and their positive zeros.

Values come from :func:`scipy.special.jv`; zeros are located here by a
sign-change sweep followed by a bracketed polish.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq
from scipy.special import jv

__all__ = [
    "BesselRangeError",
    "BesselBracketError",
    "P_MAX",
    "X_MAX",
    "bessel_j",
    "bessel_zero",
    "bessel_zeros",
    "bessel_zeros_below",
    "mcmahon_estimate",
]

# Region in which the absolute-error contract (1e-12) is tested.
P_MAX = 200.0
X_MAX = 1000.0

# Consecutive zeros of J_p are more than 3 apart for every p >= 0,
# so a unit step never straddles two sign changes.
_SCAN_STEP = 1.0
# Below this the second series term is under 1e-17 relative.
_SERIES_X = 1e-8
_ZERO_SEARCH_LIMIT = 20000.0


class BesselRangeError(ValueError):
    """Requested (order, argument) lies outside the supported region."""


class BesselBracketError(RuntimeError):
    """A zero could not be bracketed within the search budget."""


def _check_order(p: float) -> float:
    p = float(p)
    if not math.isfinite(p) or p < 0:
        raise ValueError(f"Bessel order must be finite and >= 0, got {p!r}")
    return p


def bessel_j(p: float, x: float) -> float:
    """Evaluate J_p(x) for real order p >= 0 and x >= 0.

    Raises BesselRangeError outside ``p <= P_MAX, x <= X_MAX``.
    """
    p = _check_order(p)
    x = float(x)
    if not math.isfinite(x) or x < 0:
        raise ValueError(f"argument must be finite and >= 0, got {x!r}")
    if p > P_MAX or x > X_MAX:
        raise BesselRangeError(
            f"J_p(x) accuracy is only guaranteed for p <= {P_MAX:g}, x <= {X_MAX:g}; "
            f"got p={p:g}, x={x:g}"
        )
    if x == 0.0:
        return 1.0 if p == 0.0 else 0.0
    if x < _SERIES_X:
        # Leading series term; jv flushes subnormal arguments to zero.
        return math.exp(p * math.log(x / 2) - math.lgamma(p + 1))
    return float(jv(p, x))


def mcmahon_estimate(p: float, k: int) -> float:
    """Large-k asymptotic estimate of the k-th positive zero of J_p."""
    beta = (k + 0.5 * p - 0.25) * math.pi
    mu = 4.0 * p * p
    return beta - (mu - 1.0) / (8.0 * beta) - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (
        3.0 * (8.0 * beta) ** 3
    )


def _polish(p: float, a: float, b: float) -> float:
    fa = jv(p, a)
    # A few bisection halvings before handing the bracket to brentq.
    for _ in range(4):
        mid = 0.5 * (a + b)
        fm = jv(p, mid)
        if fm == 0.0:
            return mid
        if (fa < 0) == (fm < 0):
            a, fa = mid, fm
        else:
            b = mid
    return brentq(lambda x: jv(p, x), a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)


def _scan(p: float, lo: float, hi: float) -> list[float]:
    """All zeros of J_p in (lo, hi], assuming J_p(lo) != 0.

    Grid points sit at lo + i * step, so a zero is always polished from
    the same bracket however far the scan extends.
    """
    n = max(1, int(math.ceil((hi - lo) / _SCAN_STEP)))
    xs = lo + _SCAN_STEP * np.arange(n + 1)
    vals = jv(p, xs)
    zeros = []
    for i in range(1, n + 1):
        a, b = xs[i - 1], xs[i]
        fa, fb = vals[i - 1], vals[i]
        if fb == 0.0:
            zeros.append(float(b))
        elif fa != 0.0 and (fa < 0) != (fb < 0):
            zeros.append(float(_polish(p, a, b)))
    return zeros


def _scan_start(p: float) -> float:
    # j_{p,1} > p, and J_p is positive on (0, p].
    return p if p > 0 else 1e-3


@lru_cache(maxsize=512)
def _zeros_cached(p: float, k: int) -> tuple[float, ...]:
    lo = _scan_start(p)
    hi = max(mcmahon_estimate(p, k), p + 2.0) + 2.0 * math.pi
    while True:
        zeros = _scan(p, lo, hi)
        if len(zeros) >= k:
            return tuple(zeros[:k])
        if hi > _ZERO_SEARCH_LIMIT:
            raise BesselBracketError(
                f"could not bracket zero {k} of J_{p:g} below x={_ZERO_SEARCH_LIMIT:g}"
            )
        hi += max(4.0 * math.pi, 0.5 * hi)


def bessel_zeros(p: float, k: int) -> np.ndarray:
    """First ``k`` positive zeros of J_p, increasing."""
    p = _check_order(p)
    if int(k) != k or k < 1:
        raise ValueError(f"zero index must be a positive integer, got {k!r}")
    return np.array(_zeros_cached(p, int(k)))


def bessel_zero(p: float, k: int) -> float:
    """The k-th positive zero j_{p,k} of J_p."""
    return float(bessel_zeros(p, k)[-1])


def bessel_zeros_below(p: float, xmax: float) -> np.ndarray:
    """Every positive zero of J_p that is <= xmax."""
    p = _check_order(p)
    lo = _scan_start(p)
    if xmax <= lo:
        return np.empty(0)
    return np.array(_scan(p, lo, float(xmax)))
