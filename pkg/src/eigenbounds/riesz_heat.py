"""Riesz means, counting functions and heat traces with certified tails.

Sums run over the certified prefix of a spectrum in ascending order
with compensated summation, so results are reproducible bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.special import gammaincc

from .reports import (
    NOT_APPLICABLE,
    OUTSIDE_REGIME,
    THEOREM,
    BoundReport,
    compare,
)
from .spectra import CLOSED, DomainSpec, Spectrum, unit_ball_volume
from .universal_bounds import BoundsError, ShiftContext

__all__ = [
    "RieszQuery",
    "HeatQuery",
    "HeatTrace",
    "RangeError",
    "TailCertificationError",
    "IterationMismatchError",
    "CLOSED_TAIL_SAFETY",
    "MONOTONE_TOL",
    "classical_constant",
    "weyl_classical_constant",
    "riesz_mean",
    "counting_function",
    "berezin_bound",
    "berezin_check",
    "counting_bound",
    "counting_check",
    "partition_function",
    "kac_check",
    "hs_monotonicity_check",
    "riesz_iteration",
    "legendre_transform",
    "power_law_conjugate",
    "li_yau_from_berezin",
    "harrell_stubbe_checks",
    "KaramataDiagnostics",
    "karamata_limit_check",
]

# Closed manifolds have no Berezin-type theorem; the tail uses twice the Weyl constant.
CLOSED_TAIL_SAFETY = 2.0
MONOTONE_TOL = 1e-12
ITERATION_RTOL = 1e-8
# Two routes to the Weyl constant differ only by rounding.
CONSISTENCY_RTOL = 1e-14


class RangeError(BoundsError):
    """The requested argument lies beyond the certified part of the spectrum."""


class TailCertificationError(BoundsError):
    """The heat-trace tail cannot be bounded by truncation_eps at this t."""

    def __init__(self, message: str, min_t: float):
        super().__init__(message)
        self.min_t = min_t


class IterationMismatchError(ArithmeticError):
    """Direct and iterated Riesz means disagree beyond tolerance."""


@dataclass(frozen=True)
class RieszQuery:
    rho: float
    z: float

    def __post_init__(self):
        if not self.rho >= 0:
            raise BoundsError(f"rho must be >= 0, got {self.rho!r}")
        if not self.z >= 0:
            raise BoundsError(f"z must be >= 0, got {self.z!r}")


@dataclass(frozen=True)
class HeatQuery:
    t: float
    truncation_eps: float = 1e-12
    shift: Optional[ShiftContext] = None

    def __post_init__(self):
        if not self.t > 0:
            raise BoundsError(f"t must be positive, got {self.t!r}")
        if not 0 < self.truncation_eps < 1:
            raise BoundsError(f"truncation_eps must lie in (0, 1), got {self.truncation_eps!r}")


@dataclass(frozen=True)
class HeatTrace:
    """Partial heat trace over the certified entries plus a proven tail bound."""

    t: float
    value: float
    tail_bound: float
    sigma: float = 0.0

    @property
    def upper(self) -> float:
        return self.value + self.tail_bound


def classical_constant(rho: float, n: int) -> float:
    """Gamma(1+rho) / ((4 pi)^(n/2) Gamma(1+rho+n/2))."""
    return math.exp(math.lgamma(1 + rho) - math.lgamma(1 + rho + n / 2)) / (4 * math.pi) ** (n / 2)


def weyl_classical_constant(n: int) -> float:
    """omega_n / (2 pi)^n; equals classical_constant(0, n)."""
    return unit_ball_volume(n) / (2 * math.pi) ** n


def _fsum(a) -> float:
    return math.fsum(np.asarray(a, dtype=float).tolist())


def _certified_entries(spectrum: Spectrum):
    """(values, multiplicities) of the fully certified eigenvalue groups."""
    if spectrum.exhaustive:
        return spectrum.values, spectrum.multiplicities
    cum = np.cumsum(spectrum.multiplicities)
    full = int(np.searchsorted(cum, spectrum.complete_count, side="right"))
    return spectrum.values[:full], spectrum.multiplicities[:full]


def _check_range(spectrum: Spectrum, z: float, sigma: float = 0.0):
    limit = spectrum.certified_upto + sigma
    if z > limit:
        raise RangeError(f"z={z:.15g} exceeds certified range {limit:.15g} of {spectrum.domain.label}")


def _riesz(values: np.ndarray, mults: np.ndarray, rho: float, z: float) -> float:
    if rho == 0:
        return float(mults[values <= z].sum())
    mask = values < z
    return _fsum(mults[mask] * (z - values[mask]) ** rho)


def riesz_mean(spectrum: Spectrum, q: RieszQuery, sigma: float = 0.0) -> float:
    """R_rho(z) = sum (z - mu)_+^rho over mu = lambda + sigma; rho = 0 gives N(z)."""
    _check_range(spectrum, q.z, sigma)
    values, mults = _certified_entries(spectrum)
    return _riesz(values + sigma, mults, q.rho, q.z)


def counting_function(spectrum: Spectrum, z: float) -> int:
    return int(riesz_mean(spectrum, RieszQuery(0.0, z)))


def berezin_bound(domain: DomainSpec, q: RieszQuery) -> float:
    n = domain.dimension
    return classical_constant(q.rho, n) * domain.volume * q.z ** (q.rho + n / 2)


def berezin_check(spectrum: Spectrum, q: RieszQuery) -> BoundReport:
    """R_rho(z) <= L_{rho,n} |Omega| z^(rho+n/2); a theorem for rho >= 1."""
    if spectrum.problem == CLOSED:
        status = NOT_APPLICABLE
    elif q.rho < 1:
        status = OUTSIDE_REGIME
    else:
        status = THEOREM
    return compare(f"berezin_rho{q.rho:g}", q.z, riesz_mean(spectrum, q), berezin_bound(spectrum.domain, q),
                   "<=", status=status, argument_name="z", context=spectrum.domain.label)


def _counting_coefficient(domain: DomainSpec, problem: str) -> float:
    n = domain.dimension
    if problem == CLOSED:
        return CLOSED_TAIL_SAFETY * weyl_classical_constant(n) * domain.volume
    return ((n + 2) / n) ** (n / 2) * classical_constant(0, n) * domain.volume


def counting_bound(domain: DomainSpec, z: float) -> float:
    """((n+2)/n)^(n/2) L_{0,n} |Omega| z^(n/2)."""
    return _counting_coefficient(domain, "dirichlet") * z ** (domain.dimension / 2)


def counting_check(spectrum: Spectrum, z: float) -> BoundReport:
    status = NOT_APPLICABLE if spectrum.problem == CLOSED else THEOREM
    return compare("counting", z, counting_function(spectrum, z), counting_bound(spectrum.domain, z), "<=",
                   status=status, argument_name="z", context=spectrum.domain.label)


# ----------------------------------------------------------------------------- heat trace


def _sigma_of(spectrum: Spectrum, shift: Optional[ShiftContext]) -> float:
    if shift is None:
        return 0.0
    if shift.ambient == "hyperbolic":
        raise BoundsError("heat-trace shift is undefined for the hyperbolic ambient")
    return shift.sigma(spectrum.n)


def _tail(spectrum: Spectrum, t: float) -> float:
    """Upper bound on sum over eigenvalues beyond the certified range of exp(-lambda t).

    With N(z) <= B(z) = C z^(n/2) above the cutoff L holding K eigenvalues,
    integration by parts gives tail <= (B(L) - K) e^(-L t) + int_L^inf B'(z) e^(-z t) dz.
    """
    if spectrum.exhaustive:
        return 0.0
    n = spectrum.n
    values, mults = _certified_entries(spectrum)
    cutoff = float(values[-1])
    K = int(mults.sum())
    C = _counting_coefficient(spectrum.domain, spectrum.problem)
    B = C * cutoff ** (n / 2)
    if B < K:
        if spectrum.problem == CLOSED:
            raise TailCertificationError(
                f"counting bound {B:.6g} below the observed count {K} at the cutoff; tail not certifiable",
                math.inf,
            )
        B = K
    boundary = (B - K) * math.exp(-cutoff * t)
    integral = C * math.gamma(n / 2 + 1) * gammaincc(n / 2, cutoff * t) / t ** (n / 2)
    return boundary + integral


def _partial_trace(spectrum: Spectrum, t: float) -> float:
    values, mults = _certified_entries(spectrum)
    return _fsum(mults * np.exp(-values * t))


def _min_certified_t(spectrum: Spectrum, eps: float, t: float) -> float:
    def ok(s):
        return _tail(spectrum, s) <= eps * _partial_trace(spectrum, s)

    hi = t
    while not ok(hi):
        hi *= 2
        if hi > 1e12:
            return math.inf
    lo = t
    for _ in range(100):
        mid = math.sqrt(lo * hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
        if hi / lo < 1 + 1e-6:
            break
    return hi


def partition_function(spectrum: Spectrum, q: HeatQuery) -> HeatTrace:
    """Partial heat trace Z(t) (or Z_H with the shift) with a certified tail.

    Raises TailCertificationError, naming the smallest usable t, when the
    tail bound exceeds ``truncation_eps`` times the partial sum.
    """
    sigma = _sigma_of(spectrum, q.shift)
    partial = _partial_trace(spectrum, q.t)
    tail = _tail(spectrum, q.t)
    if tail > q.truncation_eps * partial:
        min_t = _min_certified_t(spectrum, q.truncation_eps, q.t)
        raise TailCertificationError(
            f"tail bound {tail:.3g} exceeds {q.truncation_eps:g} x partial sum at t={q.t:g}; "
            f"smallest usable t for this prefix is {min_t:.6g}",
            min_t,
        )
    factor = math.exp(-sigma * q.t)
    return HeatTrace(q.t, partial * factor, tail * factor, sigma)


def kac_check(spectrum: Spectrum, q: HeatQuery) -> BoundReport:
    """Z(t) (or Z_H(t)) <= |Omega| / (4 pi t)^(n/2); lhs includes the tail bound."""
    trace = partition_function(spectrum, q)
    n = spectrum.n
    rhs = spectrum.domain.volume / (4 * math.pi * q.t) ** (n / 2)
    ctx = spectrum.domain.label + (f"; {q.shift.describe()}" if q.shift else "")
    bound_id = "kac_shifted" if q.shift else "kac"
    return compare(bound_id, q.t, trace.upper, rhs, "<=", argument_name="t", context=ctx)


def hs_monotonicity_check(spectrum: Spectrum, t_grid: Sequence[float], truncation_eps: float = 1e-12,
                          shift: Optional[ShiftContext] = None) -> list[BoundReport]:
    """t^(n/2) Z(t) nonincreasing along an ascending grid; one report per step."""
    ts = [float(t) for t in t_grid]
    if any(b <= a for a, b in zip(ts, ts[1:])):
        raise BoundsError("t_grid must be strictly ascending")
    n = spectrum.n
    scaled = [t ** (n / 2) * partition_function(spectrum, HeatQuery(t, truncation_eps, shift)).value for t in ts]
    reports = []
    for i in range(1, len(ts)):
        reports.append(compare("hs_monotone", ts[i], scaled[i], scaled[i - 1], "<=", argument_name="t",
                               tol=MONOTONE_TOL, context=f"previous t={ts[i - 1]:.15g}"))
    return reports


# ----------------------------------------------------------------------------- transforms


def _iterated_integer_rho(values, mults, rho: int, delta: float, z: float) -> float:
    """int_0^z (z-t)^(delta-1) R_rho(t) dt, exactly, for integer rho.

    Between consecutive eigenvalues R_rho is a polynomial; in u = z - t it is
    sum_j C(rho,j) (-u)^j S_{rho-j} with S_p = sum m_i (z - lambda_i)^p over
    the active eigenvalues, so each piece integrates in closed form.
    """
    mask = values < z if rho > 0 else values <= z
    lam = values[mask]
    m = mults[mask].astype(float)
    if lam.size == 0:
        return 0.0
    w = z - lam
    # S_p over active eigenvalues after each breakpoint.
    S = [np.cumsum(m * w**p) for p in range(rho + 1)]
    u_hi = w
    u_lo = np.r_[w[1:], 0.0]
    pieces = []
    for j in range(rho + 1):
        e = delta + j
        seg = (u_hi**e - u_lo**e) / e
        pieces.append(math.comb(rho, j) * (-1) ** j * S[rho - j] * seg)
    return _fsum(np.concatenate(pieces))


def _iterated_quadrature(values, mults, rho: float, delta: float, z: float) -> float:
    lam = values[values < z]
    m = mults[values < z].astype(float)
    if lam.size == 0:
        return 0.0
    edges = np.r_[lam, z]

    def R(t):
        active = lam <= t
        return float(np.sum(m[active] * (t - lam[active]) ** rho))

    total = []
    for a, b in zip(edges[:-1], edges[1:]):
        if b <= a:
            continue
        if b == z:
            val, _ = quad(R, a, b, weight="alg", wvar=(0.0, delta - 1.0), epsabs=0, epsrel=1e-13, limit=200)
        else:
            val, _ = quad(lambda t: (z - t) ** (delta - 1) * R(t), a, b, epsabs=0, epsrel=1e-13, limit=200)
        total.append(val)
    return _fsum(total)


def riesz_iteration(spectrum: Spectrum, rho: float, delta: float, z: float) -> tuple[float, float]:
    """(R_{rho+delta}(z) by direct summation, the same value by Riesz iteration).

    Raises IterationMismatchError when the two disagree by more than 1e-8
    relative.
    """
    if not rho >= 0 or not delta > 0:
        raise BoundsError(f"need rho >= 0 and delta > 0, got rho={rho!r}, delta={delta!r}")
    _check_range(spectrum, z)
    values, mults = _certified_entries(spectrum)
    direct = _riesz(values, mults, rho + delta, z)
    if float(rho).is_integer():
        integral = _iterated_integer_rho(values, mults, int(rho), delta, z)
    else:
        integral = _iterated_quadrature(values, mults, rho, delta, z)
    coef = math.exp(math.lgamma(rho + delta + 1) - math.lgamma(rho + 1) - math.lgamma(delta))
    iterated = coef * integral
    if abs(direct - iterated) > ITERATION_RTOL * max(abs(direct), 1e-300) and direct != iterated:
        raise IterationMismatchError(
            f"Riesz iteration mismatch at rho={rho:g}, delta={delta:g}, z={z:g}: {direct!r} vs {iterated!r}"
        )
    return direct, iterated


def legendre_transform(spectrum: Spectrum, p: float) -> float:
    """sup_z (p z - R_1(z)), attained at z = lambda_ceil(p).

    R_1 is convex and piecewise linear with slope N(z), which gives
    sum_{i<=floor(p)} lambda_i + (p - floor(p)) lambda_{floor(p)+1}.
    """
    if not 0 < p <= spectrum.complete_count:
        raise RangeError(f"p={p!r} outside (0, {spectrum.complete_count}]")
    lam = spectrum.certified()
    whole = int(math.floor(p))
    frac = p - whole
    total = _fsum(lam[:whole])
    if frac > 0:
        total += frac * float(lam[whole])
    return total


def power_law_conjugate(coef: float, exponent: float, p: float) -> float:
    """sup_z (p z - coef z^exponent) for coef > 0, exponent > 1, p >= 0."""
    if not (coef > 0 and exponent > 1 and p >= 0):
        raise BoundsError("power-law conjugate needs coef > 0, exponent > 1, p >= 0")
    z_star = (p / (coef * exponent)) ** (1 / (exponent - 1))
    return p * z_star * (1 - 1 / exponent)


def li_yau_from_berezin(domain: DomainSpec, p: float) -> float:
    """Legendre transform of the rho = 1 Berezin bound, evaluated at p."""
    n = domain.dimension
    return power_law_conjugate(classical_constant(1, n) * domain.volume, 1 + n / 2, p)


def harrell_stubbe_checks(spectrum: Spectrum, shift: Optional[ShiftContext], rho: float,
                          z_grid: Sequence[float]) -> list[BoundReport]:
    """Per z: R_2 against (4/n) sum (z-mu)_+ mu, and R_rho <= rho/(rho+n/2) z R_{rho-1};
    per grid step: R_rho(z)/z^(rho+n/2) nondecreasing. mu = lambda + sigma."""
    if rho < 1:
        raise BoundsError(f"Harrell-Stubbe checks need rho >= 1, got {rho!r}")
    shift = shift or ShiftContext()
    sigma = _sigma_of(spectrum, shift)
    n = spectrum.n
    zs = [float(z) for z in z_grid]
    if any(b <= a for a, b in zip(zs, zs[1:])):
        raise BoundsError("z_grid must be strictly ascending")
    status = THEOREM if rho >= 2 else OUTSIDE_REGIME
    base = THEOREM
    if spectrum.problem == CLOSED and sigma <= 0:
        status = base = NOT_APPLICABLE
    values, mults = _certified_entries(spectrum)
    mu = values + sigma
    ctx = f"{spectrum.domain.label}; {shift.describe()}; sigma={sigma:.15g}"
    reports = []
    ratios = []
    for z in zs:
        _check_range(spectrum, z, sigma)
        active = mu < z
        r2 = _riesz(mu, mults, 2.0, z)
        hs = 4 / n * _fsum(mults[active] * (z - mu[active]) * mu[active])
        reports.append(compare("harrell_stubbe_R2", z, r2, hs, "<=", status=base, argument_name="z", context=ctx))
        r_rho = _riesz(mu, mults, rho, z)
        r_prev = _riesz(mu, mults, rho - 1, z)
        reports.append(compare(f"harrell_stubbe_rho{rho:g}", z, r_rho, rho / (rho + n / 2) * z * r_prev, "<=",
                               status=status, argument_name="z", context=ctx))
        ratios.append(r_rho / z ** (rho + n / 2) if z > 0 else 0.0)
    for i in range(1, len(zs)):
        reports.append(compare("harrell_stubbe_ratio", zs[i], ratios[i - 1], ratios[i], "<=", status=status,
                               argument_name="z", context=ctx + f"; previous z={zs[i - 1]:.15g}"))
    return reports


# ----------------------------------------------------------------------------- asymptotics


@dataclass
class KaramataDiagnostics:
    """Convergence series (argument, value, limit, relative deviation) keyed by name."""

    series: dict = field(default_factory=dict)
    consistency: Optional[BoundReport] = None

    def last_deviation(self, name: str) -> float:
        return self.series[name][-1][3]


def karamata_limit_check(spectrum: Spectrum, t_grid: Iterable[float] = (), z_grid: Iterable[float] = (),
                         rhos: Sequence[float] = (1.0, 2.0), truncation_eps: float = 1e-12) -> KaramataDiagnostics:
    """Small-t heat-trace and large-z Riesz-mean limits against their Weyl constants."""
    d = spectrum.domain
    n = d.dimension
    r = n / 2
    a = d.volume / (4 * math.pi) ** r
    out = KaramataDiagnostics()

    # a / Gamma(r+1) must equal L_{0,n}|Omega| with L_{0,n} = omega_n / (2 pi)^n.
    lhs = a / math.gamma(r + 1)
    rhs = weyl_classical_constant(n) * d.volume
    gap = abs(lhs - rhs)
    out.consistency = BoundReport("karamata_consistency", r, lhs, rhs, "==", -gap,
                                  gap <= CONSISTENCY_RTOL * abs(rhs), status=THEOREM, argument_name="r",
                                  context=f"a={a:.15g}")

    def dev(value, limit):
        return (value - limit) / limit

    heat = []
    for t in t_grid:
        trace = partition_function(spectrum, HeatQuery(float(t), truncation_eps))
        value = t**r * trace.value
        heat.append((float(t), value, a, dev(value, a)))
    if heat:
        out.series["heat"] = heat
    zs = [float(z) for z in z_grid]
    if zs:
        limit0 = classical_constant(0, n) * d.volume
        out.series["counting"] = [
            (z, counting_function(spectrum, z) / z**r, limit0, dev(counting_function(spectrum, z) / z**r, limit0))
            for z in zs
        ]
        for rho in rhos:
            lim = classical_constant(rho, n) * d.volume
            rows = []
            for z in zs:
                v = riesz_mean(spectrum, RieszQuery(rho, z)) / z ** (rho + r)
                rows.append((z, v, lim, dev(v, lim)))
            out.series[f"riesz_rho{rho:g}"] = rows
    return out
