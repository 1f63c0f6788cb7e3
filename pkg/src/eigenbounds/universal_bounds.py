"""Universal eigenvalue inequalities and explicit lower bounds.

All checks take a :class:`~eigenbounds.spectra.Spectrum` and a 1-based
index ``k`` and return :class:`~eigenbounds.reports.BoundReport` objects.
Inequalities of Yang type accept a :class:`ShiftContext`; the shifted
forms are obtained by replacing lambda_i with mu_i = lambda_i + sigma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .reports import (
    CONJECTURE,
    NOT_APPLICABLE,
    THEOREM,
    BoundReport,
    compare,
)
from .spectra import CLOSED, CLOSED_MANIFOLD, DomainSpec, Spectrum

__all__ = [
    "AMBIENTS",
    "ShiftContext",
    "BoundsError",
    "DegenerateGapError",
    "ImplicationError",
    "ppw_check",
    "hile_protter_check",
    "yang1_check",
    "yang2_bound",
    "implication_chain_check",
    "li_yau_sum_lower",
    "li_yau_check",
    "polya_reference",
    "polya_check",
    "cheng_yang_lower_rhs",
    "cheng_yang_sum_lower",
    "projective_sum_lower",
    "projective_remark_constant",
    "conjecture_evaluator",
    "yang_boundary_sequence",
]

AMBIENTS = ("euclidean", "sphere", "hyperbolic", "projective", "abstract")


class BoundsError(ValueError):
    """Inputs do not meet the preconditions of a check."""


class DegenerateGapError(BoundsError):
    """lambda_{k+1} equals some lambda_i with i <= k."""


class ImplicationError(AssertionError):
    """Yang's first inequality held but a weaker consequence failed."""


@dataclass(frozen=True)
class ShiftContext:
    """Curvature data entering the shifted inequalities.

    ``H0_sq`` is always user supplied (sup of |H|^2 for an isometric
    immersion); it is echoed in reports, never estimated.
    """

    H0_sq: float = 0.0
    ambient: str = "euclidean"
    field_dim: Optional[int] = None

    def __post_init__(self):
        if self.ambient not in AMBIENTS:
            raise BoundsError(f"unknown ambient {self.ambient!r}; expected one of {AMBIENTS}")
        if not (self.H0_sq >= 0 and math.isfinite(self.H0_sq)):
            raise BoundsError(f"H0_sq must be finite and >= 0, got {self.H0_sq!r}")
        if (self.field_dim is not None) != (self.ambient == "projective"):
            raise BoundsError("field_dim is required for, and only for, the projective ambient")
        if self.field_dim is not None and self.field_dim not in (1, 2, 4):
            raise BoundsError(f"field_dim must be 1, 2 or 4, got {self.field_dim!r}")

    def sigma(self, n: int) -> float:
        """Additive shift applied to every eigenvalue."""
        if self.ambient in ("euclidean", "abstract"):
            return n * n * self.H0_sq / 4
        if self.ambient == "sphere":
            return n * n / 4
        if self.ambient == "projective":
            return n * n / 4 * (self.H0_sq + 2 * (n + self.field_dim) / n)
        return -((n - 1) ** 2) / 4

    def coefficient(self, n: int) -> float:
        """Leading coefficient of Yang's first inequality (4/n, or 4 in hyperbolic space)."""
        if self.ambient == "hyperbolic":
            if n == 1:
                raise BoundsError("hyperbolic inequality needs n >= 2")
            return 4.0
        return 4.0 / n

    def closed_minimal_constant(self, n: int) -> float:
        """c(n) for closed minimal submanifolds of a sphere or projective space."""
        if self.ambient == "sphere":
            return float(n * n)
        if self.ambient == "projective":
            return float(2 * n * (n + self.field_dim))
        raise BoundsError(f"c(n) is defined only for sphere or projective ambients, not {self.ambient!r}")

    def describe(self) -> str:
        text = f"ambient={self.ambient}; H0_sq={self.H0_sq:.15g}"
        if self.field_dim is not None:
            text += f"; d(F)={self.field_dim}"
        return text


_NO_SHIFT = ShiftContext()


def _fsum(a) -> float:
    return math.fsum(np.asarray(a, dtype=float).tolist())


def _need(spectrum: Spectrum, count: int):
    if count > spectrum.complete_count:
        raise BoundsError(
            f"check needs {count} certified eigenvalues, spectrum certifies {spectrum.complete_count}"
        )


def _index(k) -> int:
    if int(k) != k or k < 1:
        raise BoundsError(f"k must be a positive integer, got {k!r}")
    return int(k)


def _euclidean_status(spectrum: Spectrum) -> str:
    return NOT_APPLICABLE if spectrum.problem == CLOSED else THEOREM


def _mu(spectrum: Spectrum, k: int, shift: ShiftContext) -> np.ndarray:
    _need(spectrum, k + 1)
    return spectrum.prefix(k + 1) + shift.sigma(spectrum.n)


# ----------------------------------------------------------------------------- Yang family


def _ppw(mu, k, c):
    return mu[k] - mu[k - 1], c / k * _fsum(mu[:k])


def _hile_protter(mu, k, c, allow_degenerate):
    gaps = mu[k] - mu[:k]
    if np.any(gaps == 0):
        if not allow_degenerate:
            i = int(np.flatnonzero(gaps == 0)[0]) + 1
            raise DegenerateGapError(
                f"lambda_{k + 1} equals lambda_{i}; the Hile-Protter sum is infinite "
                "(pass allow_degenerate=True to report it as +inf)"
            )
        return k / c, math.inf
    return k / c, _fsum(mu[:k] / gaps)


def _yang1(mu, k, c):
    gaps = mu[k] - mu[:k]
    return _fsum(gaps**2), c * _fsum(gaps * mu[:k])


def _yang2(mu, k, c):
    return mu[k], (1 + c) * _fsum(mu[:k]) / k


def _context(spectrum: Spectrum, shift: ShiftContext, extra: str = "") -> str:
    text = f"{spectrum.domain.label}; {shift.describe()}; sigma={shift.sigma(spectrum.n):.15g}"
    return text + ("; " + extra if extra else "")


def ppw_check(spectrum: Spectrum, k: int, shift: ShiftContext = _NO_SHIFT) -> BoundReport:
    """lambda_{k+1} - lambda_k <= (4/(nk)) sum_{i<=k} lambda_i."""
    k = _index(k)
    mu = _mu(spectrum, k, shift)
    lhs, rhs = _ppw(mu, k, shift.coefficient(spectrum.n))
    return compare("ppw", k, lhs, rhs, "<=", status=_shifted_status(spectrum, shift),
                   context=_context(spectrum, shift))


def hile_protter_check(spectrum: Spectrum, k: int, shift: ShiftContext = _NO_SHIFT,
                       allow_degenerate: bool = False) -> BoundReport:
    """sum_{i<=k} lambda_i / (lambda_{k+1} - lambda_i) >= nk/4."""
    k = _index(k)
    mu = _mu(spectrum, k, shift)
    lhs, rhs = _hile_protter(mu, k, shift.coefficient(spectrum.n), allow_degenerate)
    # Orientation: the sum (rhs) must dominate nk/4 (lhs).
    return compare("hile_protter", k, lhs, rhs, "<=", status=_shifted_status(spectrum, shift),
                   context=_context(spectrum, shift))


def _shifted_status(spectrum: Spectrum, shift: ShiftContext) -> str:
    # On a closed spectrum (lambda_1 = 0) the unshifted Euclidean forms do not apply.
    if spectrum.problem == CLOSED and shift.sigma(spectrum.n) <= 0:
        return NOT_APPLICABLE
    return THEOREM


def yang1_check(spectrum: Spectrum, k: int, shift: ShiftContext = _NO_SHIFT) -> BoundReport:
    """Yang's first inequality with the shift and coefficient from ``shift``."""
    k = _index(k)
    mu = _mu(spectrum, k, shift)
    lhs, rhs = _yang1(mu, k, shift.coefficient(spectrum.n))
    return compare("yang1", k, lhs, rhs, "<=", status=_shifted_status(spectrum, shift),
                   context=_context(spectrum, shift))


def yang2_bound(spectrum: Spectrum, k: int, shift: ShiftContext = _NO_SHIFT) -> BoundReport:
    """lambda_{k+1} <= (1 + 4/n) mean(mu_1..mu_k) - sigma."""
    k = _index(k)
    mu = _mu(spectrum, k, shift)
    sigma = shift.sigma(spectrum.n)
    lhs, rhs = _yang2(mu, k, shift.coefficient(spectrum.n))
    return compare("yang2", k, lhs - sigma, rhs - sigma, "<=", status=_shifted_status(spectrum, shift),
                   context=_context(spectrum, shift))


def implication_chain_check(spectrum: Spectrum, k: int, shift: ShiftContext = _NO_SHIFT) -> list[BoundReport]:
    """Evaluate yang1, yang2, Hile-Protter and PPW at ``k``.

    Raises ImplicationError when yang1 holds but one of the weaker
    inequalities does not.
    """
    reports = [
        yang1_check(spectrum, k, shift),
        yang2_bound(spectrum, k, shift),
        hile_protter_check(spectrum, k, shift, allow_degenerate=True),
        ppw_check(spectrum, k, shift),
    ]
    if reports[0].satisfied:
        broken = [r.bound_id for r in reports[1:] if not r.satisfied]
        if broken:
            raise ImplicationError(f"yang1 holds at k={k} but {', '.join(broken)} fail")
    return reports


def yang_boundary_sequence(first: float, n: int, length: int, c: Optional[float] = None) -> np.ndarray:
    """Sequence attaining equality in Yang's first inequality at every k.

    Each new term is the larger root of the quadratic obtained from
    Yang's first inequality on the preceding terms.
    """
    c = 4.0 / n if c is None else c
    mu = [float(first)]
    for k in range(1, length):
        arr = np.asarray(mu)
        g = _fsum(arr) / k
        t = _fsum(arr**2) / k
        b = 1 + c / 2
        disc = (b * g) ** 2 - (1 + c) * t
        mu.append(b * g + math.sqrt(max(disc, 0.0)))
    return np.asarray(mu)


# ----------------------------------------------------------------------------- lower bounds


def _require_euclidean(domain: DomainSpec, what: str):
    if domain.kind == CLOSED_MANIFOLD:
        raise BoundsError(f"{what} applies to Euclidean domains, got a {domain.kind} ({domain.label})")


def li_yau_sum_lower(domain: DomainSpec, k: int) -> float:
    """(n/(n+2)) * 4 pi^2 / (omega_n |Omega|)^(2/n) * k^(2/n)."""
    _require_euclidean(domain, "Li-Yau bound")
    k = _index(k)
    n = domain.dimension
    return n / (n + 2) * domain.weyl_scale * k ** (2 / n)


def li_yau_check(spectrum: Spectrum, k: int, form: str = "sum") -> BoundReport:
    """Compare the Li-Yau bound to the mean of the first k eigenvalues or to lambda_k."""
    k = _index(k)
    _need(spectrum, k)
    bound = li_yau_sum_lower(spectrum.domain, k)
    if form == "sum":
        lhs = _fsum(spectrum.prefix(k)) / k
    elif form == "individual":
        lhs = spectrum.eigenvalue(k)
    else:
        raise BoundsError(f"form must be 'sum' or 'individual', got {form!r}")
    return compare(f"li_yau_{form}", k, lhs, bound, ">=", context=spectrum.domain.label)


def polya_reference(domain: DomainSpec, k: int) -> float:
    """4 pi^2 / (omega_n |Omega|)^(2/n) * k^(2/n)."""
    _require_euclidean(domain, "Polya reference")
    return domain.weyl_scale * _index(k) ** (2 / domain.dimension)


def _polya_proved(domain: DomainSpec) -> bool:
    # Proved for tiling domains (boxes) and for balls.
    return domain.label.startswith(("box(", "ball("))


def polya_check(spectrum: Spectrum, k: int) -> BoundReport:
    k = _index(k)
    _need(spectrum, k)
    status = THEOREM if _polya_proved(spectrum.domain) else CONJECTURE
    return compare("polya", k, spectrum.eigenvalue(k), polya_reference(spectrum.domain, k), ">=",
                   status=status, context=spectrum.domain.label)


def cheng_yang_lower_rhs(domain: DomainSpec, k: int) -> float:
    """(n / sqrt((n+2)(n+4))) * C_n * k^(2/n) / |Omega|^(2/n)."""
    n = domain.dimension
    return n / math.sqrt((n + 2) * (n + 4)) * domain.C_n * _index(k) ** (2 / n) / domain.volume ** (2 / n)


def cheng_yang_sum_lower(spectrum: Spectrum, k: int, shift: ShiftContext = _NO_SHIFT) -> BoundReport:
    """mean(lambda_1..lambda_k) + sigma >= (n/sqrt((n+2)(n+4))) C_n k^(2/n) / |Omega|^(2/n)."""
    k = _index(k)
    _need(spectrum, k)
    lhs = _fsum(spectrum.prefix(k)) / k + shift.sigma(spectrum.n)
    rhs = cheng_yang_lower_rhs(spectrum.domain, k)
    return compare("cheng_yang_lower", k, lhs, rhs, ">=", context=_context(spectrum, shift))


def projective_remark_constant(field_dim: int, m: int) -> float:
    """m(m+1) d(F)^2 / 2, the additive constant for the closed spectrum of FP^m."""
    return m * (m + 1) * field_dim**2 / 2


def projective_sum_lower(spectrum: Spectrum, k: int, shift: ShiftContext) -> BoundReport:
    """Lower bound for submanifolds of FP^m; H0_sq = 0 is the minimal case n(n+d)/2."""
    if shift.ambient != "projective" or shift.field_dim is None:
        raise BoundsError("projective_sum_lower needs a projective ShiftContext with field_dim set")
    k = _index(k)
    _need(spectrum, k)
    sigma = shift.sigma(spectrum.n)
    lhs = _fsum(spectrum.prefix(k)) / k + sigma
    rhs = cheng_yang_lower_rhs(spectrum.domain, k)
    return compare("projective_lower", k, lhs, rhs, ">=", context=_context(spectrum, shift))


def conjecture_evaluator(spectrum: Spectrum, k: int, c: float) -> tuple[BoundReport, BoundReport]:
    """Both conjectured inequalities with a user-chosen constant c; never a theorem."""
    k = _index(k)
    _need(spectrum, k)
    d = spectrum.domain
    n = d.dimension
    scale = d.C_n * k ** (2 / n) / d.volume ** (2 / n)
    ctx = f"CONJECTURE; {d.label}; c={c:.15g}"
    mean = _fsum(spectrum.prefix(k)) / k + c
    sum_form = compare("conjecture_sum", k, mean, n / (n + 2) * scale, ">=", status=CONJECTURE, context=ctx)
    single = compare("conjecture_individual", k, spectrum.eigenvalue(k) + c, scale, ">=",
                     status=CONJECTURE, context=ctx)
    return sum_form, single
