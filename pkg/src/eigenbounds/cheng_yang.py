"""Cheng-Yang recursion quantities and universal upper bounds for lambda_{k+1}."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import bessel
from .reports import REL_TOL, THEOREM, BoundReport, compare
from .spectra import Spectrum
from .universal_bounds import BoundsError, ShiftContext, _fsum, _index, _need

__all__ = [
    "A_LOG_BASE",
    "CYState",
    "HypothesisError",
    "cy_state",
    "yang_hypothesis_holds",
    "cy_recursion_check",
    "a_constant",
    "C0",
    "cy_upper_bound",
    "cy_upper_check",
    "QuadraticBounds",
    "yang_quadratic_upper",
    "quadratic_upper_check",
]

# The a(m) formula is read with the natural logarithm.
A_LOG_BASE = "e"


class HypothesisError(BoundsError):
    """The Yang-type hypothesis of the recursion fails; ``index`` is the first failing k."""

    def __init__(self, message: str, index: int):
        super().__init__(message)
        self.index = index


@dataclass(frozen=True)
class CYState:
    t: float
    k: int
    G: float
    T: float
    F: float


def _as_mus(mus: Sequence[float]) -> np.ndarray:
    arr = np.asarray(mus, dtype=float).reshape(-1)
    if arr.size == 0:
        raise BoundsError("empty sequence")
    if np.any(arr <= 0):
        raise BoundsError("recursion needs positive mu_i")
    if np.any(np.diff(arr) < 0):
        raise BoundsError("mu_i must be nondecreasing")
    return arr


def _state(arr: np.ndarray, t: float, k: int) -> CYState:
    head = arr[:k]
    G = _fsum(head) / k
    T = _fsum(head**2) / k
    return CYState(t, k, G, T, (1 + 2 / t) * G * G - T)


def cy_state(mus: Sequence[float], t: float, k: int) -> CYState:
    """G_k (mean), T_k (mean square) and F_k = (1 + 2/t) G_k^2 - T_k."""
    arr = _as_mus(mus)
    k = _index(k)
    if k > arr.size:
        raise BoundsError(f"k={k} exceeds sequence length {arr.size}")
    if not t > 0:
        raise BoundsError(f"t must be positive, got {t!r}")
    return _state(arr, t, k)


def _hypothesis_margin(arr: np.ndarray, t: float, j: int) -> tuple[float, float]:
    gaps = arr[j] - arr[:j]
    return _fsum(gaps**2), 4 / t * _fsum(arr[:j] * gaps)


def _first_failure(arr: np.ndarray, t: float, upto: int) -> int:
    """Smallest j < upto where the hypothesis fails, or 0 when it holds throughout."""
    if upto <= 1:
        return 0
    x = arr[1:upto]
    head = arr[: upto - 1]
    j = np.arange(1, upto, dtype=float)
    s1 = np.cumsum(head)
    s2 = np.cumsum(head**2)
    lhs = j * x * x - 2 * x * s1 + s2
    rhs = 4 / t * (x * s1 - s2)
    # Cumulative sums cancel; the slack covers their rounding.
    slack = REL_TOL * np.maximum(1.0, np.abs(rhs)) + 1e-12 * (j * x * x)
    bad = np.flatnonzero(lhs > rhs + slack)
    if bad.size == 0:
        return 0
    # Re-check candidates with compensated sums before reporting.
    for idx in bad:
        jj = int(idx) + 1
        if not yang_hypothesis_holds(arr, t, jj):
            return jj
    return 0


def yang_hypothesis_holds(mus: Sequence[float], t: float, j: int) -> bool:
    """sum_{i<=j} (mu_{j+1} - mu_i)^2 <= (4/t) sum_{i<=j} mu_i (mu_{j+1} - mu_i)."""
    arr = _as_mus(mus)
    lhs, rhs = _hypothesis_margin(arr, t, j)
    return lhs <= rhs + REL_TOL * max(1.0, abs(rhs))


def cy_recursion_check(mus: Sequence[float], t: float, k: int, l: int = 1) -> BoundReport:
    """F_{k+l} / (k+l)^(4/t) <= F_k / k^(4/t).

    The hypothesis is checked at every prefix index below k+l first; a
    failure raises HypothesisError, since the recursion then says nothing.
    """
    arr = _as_mus(mus)
    k = _index(k)
    l = _index(l)
    if k + l > arr.size:
        raise BoundsError(f"k+l={k + l} exceeds sequence length {arr.size}")
    j = _first_failure(arr, t, k + l)
    if j:
        raise HypothesisError(f"Yang-type hypothesis fails at k={j}; recursion inapplicable", j)
    lhs = _state(arr, t, k + l).F / (k + l) ** (4 / t)
    rhs = _state(arr, t, k).F / k ** (4 / t)
    return compare("cy_recursion", k, lhs, rhs, "<=", context=f"t={t:.15g}; l={l}")


def a_constant(m: int) -> float:
    """a(1) = 2.64, a(m) = 2.2 - 4 ln(1 + (m-3)/50) for m >= 2."""
    if int(m) != m or m < 1:
        raise BoundsError(f"m must be a positive integer, got {m!r}")
    if m == 1:
        return 2.64
    return 2.2 - 4 * math.log(1 + (m - 3) / 50)


def C0(n: int, k: int) -> float:
    """Constant of the universal bound lambda_{k+1} <= C0(n,k) k^(2/n) lambda_1."""
    n = _index(n)
    k = _index(k)
    if k >= 2:
        return 1 + a_constant(min(n, k - 1)) / n
    top = bessel.bessel_zero(n / 2, 1)
    # For n = 1 the lower order is -1/2, where J_{-1/2} ~ cos x vanishes first at pi/2.
    bottom = math.pi / 2 if n == 1 else bessel.bessel_zero(n / 2 - 1, 1)
    return (top / bottom) ** 2


def cy_upper_bound(lambda1: float, n: int, k: int) -> float:
    if not lambda1 > 0:
        raise BoundsError(f"lambda_1 must be positive, got {lambda1!r}")
    return C0(n, k) * _index(k) ** (2 / n) * lambda1


def cy_upper_check(spectrum: Spectrum, k: int) -> BoundReport:
    k = _index(k)
    _need(spectrum, k + 1)
    n = spectrum.n
    bound = cy_upper_bound(spectrum.eigenvalue(1), n, k)
    return compare("cy_upper", k, spectrum.eigenvalue(k + 1), bound, "<=",
                   context=f"{spectrum.domain.label}; C0={C0(n, k):.15g}; log base {A_LOG_BASE}")


class QuadraticBounds(NamedTuple):
    root: float
    crude: float


def yang_quadratic_upper(lambdas: Sequence[float], n: int, k: int,
                         shift: ShiftContext = ShiftContext()) -> QuadraticBounds:
    """Upper bounds for lambda_{k+1} from the first k eigenvalues.

    ``root`` is the larger root of the quadratic that Yang's first
    inequality imposes on mu_{k+1}; ``crude`` is sqrt(n/2)(1+4/n)sqrt(F_k).
    Both are returned on the lambda scale (shift removed).
    """
    k = _index(k)
    arr = np.asarray(lambdas, dtype=float).reshape(-1)
    if arr.size < k:
        raise BoundsError(f"need {k} eigenvalues, got {arr.size}")
    if shift.ambient == "hyperbolic":
        raise BoundsError("the quadratic bound uses the 4/n coefficient; hyperbolic ambient unsupported")
    sigma = shift.sigma(n)
    mu = arr[:k] + sigma
    j = _first_failure(mu, n, k) if np.all(mu > 0) else 0
    if j:
        raise HypothesisError(f"Yang's inequality fails on the prefix at k={j}", j)
    G = _fsum(mu) / k
    T = _fsum(mu**2) / k
    b = 1 + 2 / n
    disc = (b * G) ** 2 - (1 + 4 / n) * T
    if disc < -REL_TOL * (b * G) ** 2:
        raise HypothesisError(f"negative discriminant {disc:.6g} at k={k}", k)
    F = b * G * G - T
    if F < 0:
        raise HypothesisError(f"F_k = {F:.6g} < 0 at k={k}", k)
    root = b * G + math.sqrt(max(disc, 0.0))
    crude = math.sqrt(n / 2) * (1 + 4 / n) * math.sqrt(F)
    return QuadraticBounds(root - sigma, crude - sigma)


def quadratic_upper_check(spectrum: Spectrum, k: int, shift: ShiftContext = ShiftContext()) -> list[BoundReport]:
    k = _index(k)
    _need(spectrum, k + 1)
    bounds = yang_quadratic_upper(spectrum.prefix(k), spectrum.n, k, shift)
    actual = spectrum.eigenvalue(k + 1)
    ctx = f"{spectrum.domain.label}; {shift.describe()}"
    return [
        compare("quadratic_upper", k, actual, bounds.root, "<=", status=THEOREM, context=ctx),
        compare("quadratic_upper_crude", k, actual, bounds.crude, "<=", status=THEOREM, context=ctx),
    ]
