"""Exact Laplacian spectra of model domains and closed manifolds.

Every generator returns a :class:`Spectrum` whose stored entries are a
certified prefix: all eigenvalues up to the largest stored value are
present with their full multiplicities.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import bessel

__all__ = [
    "DomainKind",
    "DomainSpec",
    "Spectrum",
    "SpectrumError",
    "SpectrumFormatError",
    "EnumerationBudgetError",
    "unit_ball_volume",
    "weyl_constant",
    "sphere_volume",
    "box_spectrum",
    "ball_spectrum",
    "sphere_spectrum",
    "sphere_multiplicity",
    "projective_spectrum",
    "projective_dimension",
    "FIELD_DIM",
    "PROJECTIVE_NORMALIZATION",
    "from_values",
    "load_spectrum",
    "save_spectrum",
]

EUCLIDEAN = "euclidean-domain"
CLOSED_MANIFOLD = "closed-manifold"
USER_SUPPLIED = "user-supplied"
DomainKind = str
_KINDS = (EUCLIDEAN, CLOSED_MANIFOLD, USER_SUPPLIED)

DIRICHLET = "dirichlet"
CLOSED = "closed"
_PROBLEMS = (DIRICHLET, CLOSED)

MERGE_RTOL = 1e-9
CUTOFF_SAFETY = 1.1
DEFAULT_LATTICE_BUDGET = 20_000_000

FIELD_DIM = {"R": 1, "C": 2, "Q": 4}
PROJECTIVE_NORMALIZATION = (
    "FP^m metric: RP^m has sectional curvature 1; CP^m and QP^m are pinched in [1, 4] "
    "(CP^1 = S^2(1/2), QP^1 = S^4(1/2))"
)


class SpectrumError(ValueError):
    """A spectrum violates one of its invariants."""


class SpectrumFormatError(SpectrumError):
    """A spectrum file could not be parsed."""


class EnumerationBudgetError(RuntimeError):
    """Lattice or zero enumeration would exceed the configured budget."""


def unit_ball_volume(n: int) -> float:
    """Volume of the unit ball in R^n."""
    return math.pi ** (n / 2) / math.gamma(1 + n / 2)


def weyl_constant(n: int) -> float:
    """4 pi^2 / omega_n^(2/n)."""
    return 4 * math.pi**2 / unit_ball_volume(n) ** (2 / n)


def sphere_volume(n: int, radius: float = 1.0) -> float:
    """Riemannian volume of the round sphere S^n(radius)."""
    return 2 * math.pi ** ((n + 1) / 2) / math.gamma((n + 1) / 2) * radius**n


@dataclass(frozen=True)
class DomainSpec:
    dimension: int
    volume: float
    label: str = ""
    kind: DomainKind = USER_SUPPLIED

    def __post_init__(self):
        if int(self.dimension) != self.dimension or self.dimension < 1:
            raise SpectrumError(f"dimension must be a positive integer, got {self.dimension!r}")
        if not (self.volume > 0 and math.isfinite(self.volume)):
            raise SpectrumError(f"volume must be positive and finite, got {self.volume!r}")
        if self.kind not in _KINDS:
            raise SpectrumError(f"unknown domain kind {self.kind!r}")
        object.__setattr__(self, "dimension", int(self.dimension))
        object.__setattr__(self, "volume", float(self.volume))

    @property
    def omega(self) -> float:
        return unit_ball_volume(self.dimension)

    @property
    def C_n(self) -> float:
        return weyl_constant(self.dimension)

    @property
    def weyl_scale(self) -> float:
        """4 pi^2 / (omega_n |Omega|)^(2/n), the Weyl coefficient of k^(2/n)."""
        n = self.dimension
        return 4 * math.pi**2 / (self.omega * self.volume) ** (2 / n)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Run-length encoded eigenvalue prefix.

    ``values`` are strictly increasing distinct eigenvalues, ``multiplicities``
    the matching positive integers. ``complete_count`` certifies that the
    first that many flattened values are exactly the smallest eigenvalues.
    ``exhaustive`` marks a synthetic spectrum with nothing beyond the stored
    entries (no tail).
    """

    domain: DomainSpec
    values: np.ndarray
    multiplicities: np.ndarray
    problem: str = DIRICHLET
    complete_count: int | None = None
    exhaustive: bool = False
    _flat: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).reshape(-1)
        mults = np.asarray(self.multiplicities).reshape(-1)
        if values.size == 0:
            raise SpectrumError("spectrum has no entries")
        if values.shape != mults.shape:
            raise SpectrumError("values and multiplicities differ in length")
        if not np.all(np.isfinite(values)):
            raise SpectrumError("non-finite eigenvalue")
        if np.any(mults != np.round(mults)) or np.any(mults < 1):
            raise SpectrumError("multiplicities must be positive integers")
        mults = mults.astype(np.int64)
        if np.any(np.diff(values) <= 0):
            raise SpectrumError("eigenvalues are unsorted or repeated across entries")
        if self.problem not in _PROBLEMS:
            raise SpectrumError(f"unknown problem {self.problem!r}")
        if self.problem == DIRICHLET and values[0] <= 0:
            raise SpectrumError("Dirichlet eigenvalues must be positive")
        if self.problem == CLOSED and values[0] != 0:
            raise SpectrumError("closed spectrum must start at eigenvalue 0")
        total = int(mults.sum())
        count = total if self.complete_count is None else int(self.complete_count)
        if not 1 <= count <= total:
            raise SpectrumError(f"complete_count {count} outside [1, {total}]")
        values.setflags(write=False)
        mults.setflags(write=False)
        flat = np.repeat(values, mults)
        flat.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "multiplicities", mults)
        object.__setattr__(self, "complete_count", count)
        object.__setattr__(self, "_flat", flat)

    @property
    def n(self) -> int:
        return self.domain.dimension

    @property
    def entries(self) -> list[tuple[float, int]]:
        return [(float(v), int(m)) for v, m in zip(self.values, self.multiplicities)]

    @property
    def total(self) -> int:
        return int(self.multiplicities.sum())

    def flat(self) -> np.ndarray:
        """Flattened eigenvalues (repeated by multiplicity), read-only."""
        return self._flat

    def certified(self) -> np.ndarray:
        """The certified prefix lambda_1 .. lambda_K."""
        return self._flat[: self.complete_count]

    @property
    def certified_upto(self) -> float:
        """Largest z for which every eigenvalue <= z is known."""
        if self.exhaustive:
            return math.inf
        # A group split by complete_count is not certified.
        cum = np.cumsum(self.multiplicities)
        full = int(np.searchsorted(cum, self.complete_count, side="right"))
        return float(self.values[full - 1]) if full else -math.inf

    def eigenvalue(self, k: int) -> float:
        """lambda_k with 1-based index, certified."""
        if not 1 <= k <= self.complete_count:
            raise SpectrumError(f"index {k} outside certified prefix of {self.complete_count}")
        return float(self._flat[k - 1])

    def prefix(self, k: int) -> np.ndarray:
        if not 1 <= k <= self.complete_count:
            raise SpectrumError(f"prefix of length {k} exceeds certified count {self.complete_count}")
        return self._flat[:k]

    def shifted(self, sigma: float) -> np.ndarray:
        """Certified eigenvalues shifted by sigma."""
        return self.certified() + sigma

    def __eq__(self, other):
        if not isinstance(other, Spectrum):
            return NotImplemented
        return (
            self.domain == other.domain
            and self.problem == other.problem
            and self.complete_count == other.complete_count
            and self.exhaustive == other.exhaustive
            and np.array_equal(self.values, other.values)
            and np.array_equal(self.multiplicities, other.multiplicities)
        )

    def __len__(self):
        return self.total


def _group(values: np.ndarray, keys: np.ndarray | None = None, rtol: float = MERGE_RTOL):
    """Run-length encode sorted values; exact keys when available, else rtol merge."""
    order = np.argsort(keys if keys is not None else values, kind="stable")
    values = values[order]
    if keys is not None:
        keys = keys[order]
        starts = np.flatnonzero(np.r_[True, keys[1:] != keys[:-1]])
    else:
        close = np.abs(np.diff(values)) <= rtol * np.maximum(np.abs(values[1:]), 1.0)
        starts = np.flatnonzero(np.r_[True, ~close])
    counts = np.diff(np.r_[starts, values.size])
    return values[starts], counts


def _trim(values: np.ndarray, mults: np.ndarray, count: int):
    cum = np.cumsum(mults)
    last = int(np.searchsorted(cum, count)) + 1
    return values[:last], mults[:last]


def from_values(eigenvalues: Iterable[float], domain: DomainSpec, problem: str = DIRICHLET,
                exhaustive: bool = False, rtol: float = MERGE_RTOL) -> Spectrum:
    """Build a Spectrum from a flat list of eigenvalues (any order)."""
    arr = np.sort(np.asarray(list(eigenvalues), dtype=float))
    vals, mults = _group(arr, rtol=rtol)
    return Spectrum(domain, vals, mults, problem=problem, exhaustive=exhaustive)


def _rational_weights(lengths: Sequence[float]):
    """Integer weights w_i with (1/L_i)^2 = scale * w_i, when the ratios are rational."""
    ref = lengths[0]
    ratios = []
    for L in lengths:
        r = (ref / L) ** 2
        q = Fraction(r).limit_denominator(1000)
        if abs(float(q) - r) > 1e-14 * r:
            return None
        ratios.append(q)
    denom = reduce(math.lcm, (q.denominator for q in ratios))
    weights = [int(q * denom) for q in ratios]
    return weights, math.pi**2 / (ref**2 * denom)


def _lattice(inv_sq: Sequence[float], cutoff: float, budget: int):
    """All (m_1..m_n), m_i >= 1, with sum inv_sq[i] m_i^2 <= cutoff, as an index array."""
    pts = np.zeros((1, 0), dtype=np.int64)
    partial = np.zeros(1)
    for i, w in enumerate(inv_sq):
        rest = sum(inv_sq[i + 1:])
        mmax = int(math.floor(math.sqrt(max(cutoff - rest, 0.0) / w))) + 1
        ms = np.arange(1, mmax + 1, dtype=np.int64)
        cand = partial[:, None] + w * ms[None, :] ** 2
        keep = cand + rest <= cutoff * (1 + 1e-12)
        if int(keep.sum()) > budget:
            raise EnumerationBudgetError(
                f"lattice enumeration needs more than {budget} points at cutoff {cutoff:g}"
            )
        rows, cols = np.nonzero(keep)
        pts = np.hstack([pts[rows], ms[cols][:, None]])
        partial = cand[rows, cols]
    return pts


def box_spectrum(lengths: Sequence[float], count: int, budget: int = DEFAULT_LATTICE_BUDGET) -> Spectrum:
    """Dirichlet spectrum of the box prod [0, L_i], smallest ``count`` eigenvalues.

    Eigenvalues are pi^2 sum (m_i/L_i)^2 over m_i >= 1. The lattice is
    enumerated up to a cutoff that holds at least ``count`` points, so
    the returned prefix is complete.
    """
    lengths = [float(L) for L in lengths]
    if not lengths:
        raise SpectrumError("box needs at least one length")
    if any(not (L > 0 and math.isfinite(L)) for L in lengths):
        raise SpectrumError(f"box lengths must be positive, got {lengths}")
    if int(count) != count or count < 1:
        raise SpectrumError(f"count must be a positive integer, got {count!r}")
    n = len(lengths)
    domain = DomainSpec(n, math.prod(lengths), label="box(" + ",".join(f"{L:.15g}" for L in lengths) + ")",
                        kind=EUCLIDEAN)
    inv_sq = [math.pi**2 / L**2 for L in lengths]
    rational = _rational_weights(lengths)

    floor = sum(inv_sq)
    cutoff = max(domain.weyl_scale * count ** (2 / n), floor) * CUTOFF_SAFETY
    while True:
        pts = _lattice(inv_sq, cutoff, budget)
        if len(pts) >= count:
            break
        cutoff *= CUTOFF_SAFETY**2
    sq = pts**2
    if rational is not None:
        weights, scale = rational
        keys = sq @ np.asarray(weights, dtype=np.int64)
        vals, mults = _group(keys * scale, keys=keys)
    else:
        vals, mults = _group(sq @ np.asarray(inv_sq))
    vals, mults = _trim(vals, mults, count)
    return Spectrum(domain, vals, mults, problem=DIRICHLET)


def ball_multiplicity(n: int, l: int) -> int:
    """Dimension of degree-l spherical harmonics on S^(n-1)."""
    return sphere_multiplicity(n - 1, l)


def ball_spectrum(n: int, radius: float, count: int) -> Spectrum:
    """Dirichlet spectrum of the ball of given radius in R^n.

    Eigenvalues are (j_{l+n/2-1,k}/R)^2 with the multiplicity of degree-l
    spherical harmonics on S^(n-1).
    """
    if int(n) != n or n < 2:
        raise SpectrumError(f"ball dimension must be >= 2, got {n!r}")
    if not (radius > 0 and math.isfinite(radius)):
        raise SpectrumError(f"radius must be positive, got {radius!r}")
    if int(count) != count or count < 1:
        raise SpectrumError(f"count must be a positive integer, got {count!r}")
    n = int(n)
    domain = DomainSpec(n, unit_ball_volume(n) * radius**n, label=f"ball(n={n},R={radius:.15g})", kind=EUCLIDEAN)
    # Work on the unit ball (cutoff in x = j) and rescale at the end.
    unit = DomainSpec(n, unit_ball_volume(n))
    cutoff = unit.weyl_scale * count ** (2 / n) * CUTOFF_SAFETY
    while True:
        xmax = math.sqrt(cutoff)
        vals, mults, orders = [], [], []
        l = 0
        while l + n / 2 - 1 < xmax:
            p = l + n / 2 - 1
            try:
                zs = bessel.bessel_zeros_below(p, xmax)
            except bessel.BesselRangeError as exc:
                raise bessel.BesselRangeError(f"order {p:g}: {exc}") from exc
            m = ball_multiplicity(n, l)
            vals.extend(zs**2)
            mults.extend([m] * len(zs))
            orders.extend([l] * len(zs))
            l += 1
        if sum(mults) >= count:
            break
        cutoff *= CUTOFF_SAFETY**2
    vals = np.asarray(vals)
    mults = np.asarray(mults, dtype=np.int64)
    order = np.lexsort((np.asarray(orders), vals))
    vals, mults = vals[order], mults[order]
    # Distinct (l, k) pairs never share a zero, but guard against float collisions.
    keep = np.r_[True, np.diff(vals) > MERGE_RTOL * vals[1:]]
    if not keep.all():
        idx = np.cumsum(keep) - 1
        mults = np.bincount(idx, weights=mults).astype(np.int64)
        vals = vals[keep]
    vals, mults = _trim(vals, mults, count)
    return Spectrum(domain, vals / radius**2, mults, problem=DIRICHLET)


def sphere_multiplicity(n: int, l: int) -> int:
    """Multiplicity of l(l+n-1) on S^n."""
    if l == 0:
        return 1
    if n == 1:
        return 2
    return (2 * l + n - 1) * math.comb(l + n - 2, n - 1) // l


def sphere_spectrum(n: int, count: int) -> Spectrum:
    """Closed spectrum of the unit sphere S^n: l(l+n-1), l >= 0.

    ``count`` is the number of distinct eigenvalues (levels l = 0..count-1).
    """
    if int(n) != n or n < 1:
        raise SpectrumError(f"sphere dimension must be >= 1, got {n!r}")
    if int(count) != count or count < 1:
        raise SpectrumError(f"count must be a positive integer, got {count!r}")
    n = int(n)
    vals = [float(l * (l + n - 1)) for l in range(count)]
    mults = [sphere_multiplicity(n, l) for l in range(count)]
    domain = DomainSpec(n, sphere_volume(n), label=f"sphere(n={n})", kind=CLOSED_MANIFOLD)
    return Spectrum(domain, vals, mults, problem=CLOSED)


def _projective_level(field: str, m: int, l: int) -> tuple[int, int]:
    if field == "R":
        return 2 * l * (2 * l + m - 1), sphere_multiplicity(m, 2 * l)
    if field == "C":
        return 4 * l * (l + m), (2 * l + m) * math.comb(l + m - 1, l) ** 2 // m
    # Quaternionic case.
    num = (2 * l + 2 * m + 1) * math.comb(l + 2 * m, 2 * m) * math.comb(l + 2 * m - 1, 2 * m - 1)
    return 4 * l * (l + 2 * m + 1), num // ((2 * m + 1) * (l + 1))


def projective_dimension(field: str, m: int) -> int:
    return FIELD_DIM[field] * m


def projective_volume(field: str, m: int) -> float:
    if field == "R":
        return sphere_volume(m) / 2
    if field == "C":
        return math.pi**m / math.factorial(m)
    return math.pi ** (2 * m) / math.factorial(2 * m + 1)


def projective_spectrum(field: str, m: int, count: int) -> Spectrum:
    """Closed spectrum of FP^m, F in {R, C, Q}, under PROJECTIVE_NORMALIZATION.

    ``count`` is the number of distinct eigenvalues, as for the sphere.
    """
    field = str(field).upper()
    if field == "H":
        field = "Q"
    if field not in FIELD_DIM:
        raise SpectrumError(f"unsupported field {field!r}; expected R, C or Q")
    if int(m) != m or m < 1:
        raise SpectrumError(f"m must be a positive integer, got {m!r}")
    if field == "R" and m < 2:
        raise SpectrumError("RP^m requires m >= 2")
    if int(count) != count or count < 1:
        raise SpectrumError(f"count must be a positive integer, got {count!r}")
    m = int(m)
    levels = [_projective_level(field, m, l) for l in range(count)]
    vals = [float(v) for v, _ in levels]
    mults = [mult for _, mult in levels]
    domain = DomainSpec(projective_dimension(field, m), projective_volume(field, m),
                        label=f"{field}P^{m}", kind=CLOSED_MANIFOLD)
    return Spectrum(domain, vals, mults, problem=CLOSED)


# ----------------------------------------------------------------------------- file format

_HEADER_RE = re.compile(r"^#\s*spectrum\s+v1\s*;(.*)$")


def save_spectrum(spectrum: Spectrum, path) -> None:
    d = spectrum.domain
    header = (
        f"# spectrum v1; n={d.dimension}; volume={d.volume!r}; problem={spectrum.problem}; "
        f"kind={d.kind}; complete={spectrum.complete_count}; "
    )
    if spectrum.exhaustive:
        header += "exhaustive=true; "
    header += f"label={d.label}"
    lines = [header]
    lines.extend(f"{v!r} {m}" for v, m in spectrum.entries)
    Path(path).write_text("\n".join(lines) + "\n")


def _parse_header(line: str, path) -> dict[str, str]:
    match = _HEADER_RE.match(line.strip())
    if not match:
        raise SpectrumFormatError(f"{path}: missing domain header '# spectrum v1; ...'")
    fields = {}
    body = match.group(1)
    # label is free text and comes last; everything after 'label=' belongs to it.
    head, sep, label = body.partition("label=")
    for part in head.split(";"):
        part = part.strip()
        if not part:
            continue
        key, eq, value = part.partition("=")
        if not eq:
            raise SpectrumFormatError(f"{path}: malformed header field {part!r}")
        fields[key.strip()] = value.strip()
    if sep:
        fields["label"] = label.strip()
    for key in ("n", "volume", "problem"):
        if key not in fields:
            raise SpectrumFormatError(f"{path}: domain header lacks '{key}='")
    return fields


def load_spectrum(path) -> Spectrum:
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise SpectrumFormatError(f"{path}: empty file, missing domain header")
    fields = _parse_header(lines[0], path)
    try:
        n = int(fields["n"])
        volume = float(fields["volume"])
    except ValueError as exc:
        raise SpectrumFormatError(f"{path}: bad header value: {exc}") from None
    problem = fields["problem"]
    kind = fields.get("kind", EUCLIDEAN if problem == DIRICHLET else CLOSED_MANIFOLD)
    domain = DomainSpec(n, volume, label=fields.get("label", ""), kind=kind)

    values, mults = [], []
    for lineno, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p for p in re.split(r"[,\s]+", line) if p]
        if len(parts) != 2:
            raise SpectrumFormatError(f"{path}:{lineno}: malformed record {raw!r}")
        try:
            value = float(parts[0])
            mult = int(parts[1])
        except ValueError:
            raise SpectrumFormatError(f"{path}:{lineno}: malformed record {raw!r}") from None
        if mult < 1:
            raise SpectrumFormatError(f"{path}:{lineno}: nonpositive multiplicity {mult}")
        if values and value <= values[-1]:
            raise SpectrumFormatError(f"{path}:{lineno}: unsorted eigenvalue {value!r} after {values[-1]!r}")
        values.append(value)
        mults.append(mult)
    if not values:
        raise SpectrumFormatError(f"{path}: no eigenvalue records")
    complete = int(fields["complete"]) if "complete" in fields else None
    exhaustive = fields.get("exhaustive", "false").lower() == "true"
    return Spectrum(domain, values, mults, problem=problem, complete_count=complete, exhaustive=exhaustive)
