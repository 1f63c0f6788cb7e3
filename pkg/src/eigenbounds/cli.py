"""Command line front end: generate spectra, run check suites, write reports."""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from . import cheng_yang as cy
from . import riesz_heat as rh
from . import universal_bounds as ub
from .reports import BoundReport, reports_to_csv, reports_to_json, series_to_csv
from .spectra import (
    CLOSED,
    FIELD_DIM,
    PROJECTIVE_NORMALIZATION,
    Spectrum,
    ball_spectrum,
    box_spectrum,
    load_spectrum,
    projective_spectrum,
    save_spectrum,
    sphere_spectrum,
)

COMMANDS = ("gen", "bounds", "riesz", "heat", "verify-all")
BOUND_SUITES = (
    "ppw", "hp", "yang", "yang2", "chain", "li-yau", "polya", "cheng-yang",
    "cy-upper", "cy-recursion", "quadratic", "projective", "conjecture", "all",
)


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    spectrum: Spectrum
    source: str
    k_range: Optional[tuple[int, int]] = None
    z_grid: Optional[list[float]] = None
    t_grid: Optional[list[float]] = None
    shift: ub.ShiftContext = field(default_factory=ub.ShiftContext)
    output: Optional[str] = None
    fmt: str = "csv"
    suite: str = "all"
    rhos: tuple[float, ...] = (1.0, 2.0, 3.0)
    conjecture_c: Optional[float] = None
    diagnostics: bool = False
    hp_degenerate_inf: bool = False


# ----------------------------------------------------------------------------- parsing


def _floats(text: str, what: str) -> list[float]:
    try:
        return [float(eval_number(p)) for p in text.split(",") if p.strip()]
    except ValueError:
        raise ConfigError(f"{what}: expected comma separated numbers, got {text!r}") from None


def eval_number(text: str) -> float:
    """Parse a number, accepting 'pi', 'k*pi' and 'pi/k'."""
    t = text.strip().lower()
    if "pi" in t:
        coef, _, rest = t.partition("pi")
        num = float(coef.rstrip("*")) if coef.rstrip("*") else 1.0
        den = float(rest.lstrip("/")) if rest.lstrip("/") else 1.0
        if rest and not rest.startswith("/"):
            raise ValueError(text)
        return num * math.pi / den
    return float(t)


def parse_k_range(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition("..")
    try:
        a, b = (int(lo), int(hi)) if sep else (int(lo), int(lo))
    except ValueError:
        raise ConfigError(f"--k expects 'a..b', got {text!r}") from None
    if a < 1 or b < a:
        raise ConfigError(f"--k range must satisfy 1 <= a <= b, got {text!r}")
    return a, b


def parse_grid(text: str, flag: str) -> list[float]:
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return [eval_number(parts[0])]
        if len(parts) != 3:
            raise ValueError
        a, b, step = (eval_number(p) for p in parts)
    except ValueError:
        raise ConfigError(f"{flag} expects 'start:stop:step', got {text!r}") from None
    if step <= 0 or b < a:
        raise ConfigError(f"{flag} needs step > 0 and stop >= start, got {text!r}")
    count = int(math.floor((b - a) / step + 1e-9)) + 1
    grid = [a + i * step for i in range(count)]
    if not grid:
        raise ConfigError(f"{flag} is empty")
    return grid


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eigenbounds", description=__doc__)
    parser.add_argument("command", choices=COMMANDS)
    src = parser.add_argument_group("spectrum source (exactly one)")
    src.add_argument("--box", metavar="L1,...", help="Dirichlet box with the given side lengths ('pi' allowed)")
    src.add_argument("--ball", metavar="n,R", help="Dirichlet ball of dimension n and radius R")
    src.add_argument("--sphere", metavar="n", type=int, help="closed unit sphere S^n")
    src.add_argument("--projective", metavar="F,m", help="closed projective space FP^m, F in R, C, Q")
    src.add_argument("--in", dest="input", metavar="PATH", help="spectrum file")
    parser.add_argument("--count", type=int, default=1000,
                        help="eigenvalues to generate (distinct levels for sphere/projective)")
    parser.add_argument("--k", dest="k_range", help="index range a..b")
    parser.add_argument("--z-grid", help="start:stop:step")
    parser.add_argument("--t-grid", help="start:stop:step")
    parser.add_argument("--h0sq", type=float, default=None, help="H0^2, squared sup of mean curvature")
    parser.add_argument("--ambient", choices=ub.AMBIENTS)
    parser.add_argument("--dfield", type=int, choices=(1, 2, 4))
    parser.add_argument("--suite", default="all", help=f"bounds suite: {', '.join(BOUND_SUITES)}")
    parser.add_argument("--rho", default="1,2,3", help="Riesz orders for the riesz command")
    parser.add_argument("--conjecture-c", type=float, help="constant for the conjecture evaluator")
    parser.add_argument("--diagnostics", action="store_true", help="emit Karamata convergence series instead")
    parser.add_argument("--hp-degenerate-inf", action="store_true",
                        help="report degenerate Hile-Protter gaps as +inf instead of an error")
    parser.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")
    parser.add_argument("-o", "--output", metavar="PATH")
    return parser


def _spectrum_from_args(args) -> tuple[Spectrum, str, Optional[ub.ShiftContext]]:
    sources = [name for name in ("box", "ball", "sphere", "projective", "input") if getattr(args, name) is not None]
    if len(sources) != 1:
        raise ConfigError(f"give exactly one spectrum source (--box/--ball/--sphere/--projective/--in), got {len(sources)}")
    if args.count < 1:
        raise ConfigError("--count must be >= 1")
    name = sources[0]
    if name == "box":
        lengths = _floats(args.box, "--box")
        return box_spectrum(lengths, args.count), "box", None
    if name == "ball":
        vals = _floats(args.ball, "--ball")
        if len(vals) != 2 or not float(vals[0]).is_integer():
            raise ConfigError(f"--ball expects 'n,R', got {args.ball!r}")
        return ball_spectrum(int(vals[0]), vals[1], args.count), "ball", None
    if name == "sphere":
        return sphere_spectrum(args.sphere, args.count), "sphere", ub.ShiftContext(ambient="sphere")
    if name == "projective":
        fld, _, m = args.projective.partition(",")
        fld = fld.strip().upper()
        if fld not in FIELD_DIM or not m.strip().isdigit():
            raise ConfigError(f"--projective expects 'F,m' with F in R, C, Q, got {args.projective!r}")
        spec = projective_spectrum(fld, int(m), args.count)
        return spec, "projective", ub.ShiftContext(ambient="projective", field_dim=FIELD_DIM[fld])
    return load_spectrum(args.input), "file", None


def config_from_args(argv=None) -> RunConfig:
    args = build_parser().parse_args(argv)
    spectrum, source, default_shift = _spectrum_from_args(args)
    if args.ambient is not None or args.h0sq is not None or args.dfield is not None:
        ambient = args.ambient or (default_shift.ambient if default_shift else "euclidean")
        dfield = args.dfield
        if ambient == "projective" and dfield is None and default_shift is not None:
            dfield = default_shift.field_dim
        if ambient != "projective" and dfield is not None:
            raise ConfigError("--dfield only applies with --ambient projective")
        shift = ub.ShiftContext(H0_sq=args.h0sq or 0.0, ambient=ambient, field_dim=dfield)
    else:
        shift = default_shift or ub.ShiftContext()
    if args.suite not in BOUND_SUITES:
        raise ConfigError(f"unknown suite {args.suite!r}; choose from {', '.join(BOUND_SUITES)}")
    cfg = RunConfig(
        command=args.command,
        spectrum=spectrum,
        source=source,
        k_range=parse_k_range(args.k_range) if args.k_range else None,
        z_grid=parse_grid(args.z_grid, "--z-grid") if args.z_grid else None,
        t_grid=parse_grid(args.t_grid, "--t-grid") if args.t_grid else None,
        shift=shift,
        output=args.output,
        fmt=args.fmt,
        suite=args.suite,
        rhos=tuple(_floats(args.rho, "--rho")),
        conjecture_c=args.conjecture_c,
        diagnostics=args.diagnostics,
        hp_degenerate_inf=args.hp_degenerate_inf,
    )
    return cfg


# ----------------------------------------------------------------------------- suites


@dataclass
class Outcome:
    reports: list[BoundReport] = field(default_factory=list)
    errors: list[str] = field(default_factory=list)
    series: list[tuple[str, list]] = field(default_factory=list)

    def run(self, label: str, fn: Callable, *args, **kwargs):
        try:
            result = fn(*args, **kwargs)
        except (ub.BoundsError, ArithmeticError, AssertionError) as exc:
            self.errors.append(f"{label}: {exc}")
            return
        if isinstance(result, BoundReport):
            self.reports.append(result)
        else:
            self.reports.extend(result)

    @property
    def violations(self) -> list[BoundReport]:
        return [r for r in self.reports if r.violated]


# Default k range cap; the per-k checks cost O(k) each.
DEFAULT_K_MAX = 1000


def _k_values(cfg: RunConfig, need_next: bool = True) -> range:
    K = cfg.spectrum.complete_count - (1 if need_next else 0)
    if cfg.k_range is None:
        return range(1, min(K, DEFAULT_K_MAX) + 1)
    a, b = cfg.k_range
    if b > K:
        raise ConfigError(f"--k upper end {b} exceeds the {K} indices this spectrum supports")
    return range(a, b + 1)


def _default_z_grid(spectrum: Spectrum, sigma: float = 0.0, points: int = 200) -> list[float]:
    lo = float(spectrum.values[0]) + sigma
    hi = spectrum.certified_upto + sigma
    return [float(z) for z in np.linspace(lo, hi, points)] if hi > lo else [hi]


def _default_t_grid(spectrum: Spectrum) -> list[float]:
    """0.05, 0.10, ..., 2.0, dropping points where the truncated tail is not certified."""
    grid = [round(0.05 * i, 10) for i in range(1, 41)]
    eps = rh.HeatQuery(1.0).truncation_eps
    try:
        t_min = 0.0 if spectrum.exhaustive else rh._min_certified_t(spectrum, eps, grid[0])
    except rh.TailCertificationError:
        return []
    return [t for t in grid if t >= t_min]


def bounds_suite(cfg: RunConfig, out: Outcome):
    s, shift, suite = cfg.spectrum, cfg.shift, cfg.suite
    closed = s.problem == CLOSED
    ks = _k_values(cfg)
    every = suite == "all"
    want = (lambda name: every or suite == name)
    sigma = shift.sigma(s.n)
    mu = s.certified() + sigma
    recursion_ok = bool(np.all(mu > 0)) and shift.ambient != "hyperbolic"
    for k in ks:
        if every or suite == "chain":
            out.run(f"chain k={k}", ub.implication_chain_check, s, k, shift)
        else:
            if want("ppw"):
                out.run(f"ppw k={k}", ub.ppw_check, s, k, shift)
            if want("hp"):
                out.run(f"hile_protter k={k}", ub.hile_protter_check, s, k, shift,
                        allow_degenerate=cfg.hp_degenerate_inf)
            if want("yang"):
                out.run(f"yang1 k={k}", ub.yang1_check, s, k, shift)
            if want("yang2"):
                out.run(f"yang2 k={k}", ub.yang2_bound, s, k, shift)
        if want("cy-recursion") and recursion_ok:
            out.run(f"cy_recursion k={k}", cy.cy_recursion_check, mu, s.n, k, 1)
        if want("quadratic") and recursion_ok:
            out.run(f"quadratic k={k}", cy.quadratic_upper_check, s, k, shift)
        if want("cy-upper") and not closed:
            out.run(f"cy_upper k={k}", cy.cy_upper_check, s, k)
        if not closed:
            if want("li-yau"):
                out.run(f"li_yau k={k}", ub.li_yau_check, s, k, "sum")
                out.run(f"li_yau k={k}", ub.li_yau_check, s, k, "individual")
            if want("polya"):
                out.run(f"polya k={k}", ub.polya_check, s, k)
        if want("cheng-yang") and (not closed or sigma > 0):
            out.run(f"cheng_yang_lower k={k}", ub.cheng_yang_sum_lower, s, k, shift)
        if want("projective") and shift.ambient == "projective":
            out.run(f"projective_lower k={k}", ub.projective_sum_lower, s, k, shift)
        if want("conjecture") and cfg.conjecture_c is not None:
            out.run(f"conjecture k={k}", ub.conjecture_evaluator, s, k, cfg.conjecture_c)
    if suite == "conjecture" and cfg.conjecture_c is None:
        raise ConfigError("--suite conjecture needs --conjecture-c")


def riesz_suite(cfg: RunConfig, out: Outcome):
    s = cfg.spectrum
    sigma = rh._sigma_of(s, cfg.shift)
    zs = cfg.z_grid or _default_z_grid(s)
    if cfg.diagnostics:
        diag = rh.karamata_limit_check(s, z_grid=zs, rhos=cfg.rhos)
        out.reports.append(diag.consistency)
        out.series.extend(("z", rows) for rows in diag.series.values())
        return
    for z in zs:
        out.run(f"counting z={z:g}", rh.counting_check, s, z)
        for rho in cfg.rhos:
            out.run(f"berezin rho={rho:g} z={z:g}", rh.berezin_check, s, rh.RieszQuery(rho, z))
    hs_grid = cfg.z_grid or _default_z_grid(s, sigma)
    for rho in cfg.rhos:
        if rho >= 2 or cfg.z_grid is not None and rho >= 1:
            out.run(f"harrell_stubbe rho={rho:g}", rh.harrell_stubbe_checks, s, cfg.shift, rho, hs_grid)


def heat_suite(cfg: RunConfig, out: Outcome):
    s = cfg.spectrum
    ts = cfg.t_grid or _default_t_grid(s)
    shift = cfg.shift if cfg.shift.sigma(s.n) != 0 else None
    if cfg.diagnostics:
        diag = rh.karamata_limit_check(s, t_grid=ts)
        out.reports.append(diag.consistency)
        out.series.extend(("t", rows) for rows in diag.series.values())
        return
    for t in ts:
        out.run(f"kac t={t:g}", rh.kac_check, s, rh.HeatQuery(t, shift=shift))
    if s.problem != CLOSED and shift is None:
        out.run("hs_monotone", rh.hs_monotonicity_check, s, ts)


def verify_all(cfg: RunConfig, out: Outcome):
    cfg.suite = "all"
    bounds_suite(cfg, out)
    s = cfg.spectrum
    sigma = cfg.shift.sigma(s.n) if cfg.shift.ambient != "hyperbolic" else 0.0
    closed = s.problem == CLOSED
    if not closed:
        zs = cfg.z_grid or _default_z_grid(s)
        for z in zs:
            out.run(f"counting z={z:g}", rh.counting_check, s, z)
            for rho in (1.0, 2.0, 3.0):
                out.run(f"berezin z={z:g}", rh.berezin_check, s, rh.RieszQuery(rho, z))
    if not closed or sigma > 0:
        hs_grid = cfg.z_grid or _default_z_grid(s, sigma)
        for rho in (2.0, 3.0):
            out.run(f"harrell_stubbe rho={rho:g}", rh.harrell_stubbe_checks, s, cfg.shift, rho, hs_grid)
    ts = cfg.t_grid or _default_t_grid(s)
    shift = cfg.shift if sigma != 0 else None
    if not closed or shift is not None:
        for t in ts:
            out.run(f"kac t={t:g}", rh.kac_check, s, rh.HeatQuery(t, shift=shift))
    if not closed and len(ts) > 1:
        out.run("hs_monotone", rh.hs_monotonicity_check, s, ts)
    k_top = min(s.complete_count, 50)
    for k in range(1, k_top + 1):
        out.run(f"legendre p={k}", _legendre_report, s, k)


def _legendre_report(spectrum: Spectrum, k: int) -> BoundReport:
    from .reports import compare
    value = rh.legendre_transform(spectrum, k)
    prefix = rh._fsum(spectrum.prefix(k))
    return compare("legendre_prefix", k, value, prefix, "<=", context="sup_z(kz - R_1(z)) vs prefix sum")


# ----------------------------------------------------------------------------- output


def _render(cfg: RunConfig, out: Outcome) -> str:
    if out.series:
        return "".join(series_to_csv(rows, argument=arg) for arg, rows in out.series)
    if cfg.fmt == "json":
        return reports_to_json(out.reports)
    return reports_to_csv(out.reports)


def _summary(cfg: RunConfig, out: Outcome) -> str:
    s = cfg.spectrum
    lines = [
        f"# spectrum: {s.domain.label} (n={s.n}, problem={s.problem}, certified={s.complete_count})",
        f"# shift: {cfg.shift.describe()}; sigma={cfg.shift.sigma(s.n):.15g}",
        f"# a(m) log base: {cy.A_LOG_BASE}",
    ]
    if cfg.k_range is None and s.complete_count - 1 > DEFAULT_K_MAX:
        lines.append(f"# k range: 1..{DEFAULT_K_MAX} (default cap; pass --k to widen)")
    if cfg.source == "projective" or cfg.shift.ambient == "projective":
        lines.append(f"# {PROJECTIVE_NORMALIZATION}")
    by_status: dict[str, list[int]] = {}
    for r in out.reports:
        tally = by_status.setdefault(r.status, [0, 0])
        tally[0 if r.satisfied else 1] += 1
    for status, (ok, bad) in sorted(by_status.items()):
        lines.append(f"# {status}: {ok} satisfied, {bad} not satisfied")
    for r in out.violations:
        lines.append(f"# VIOLATION {r.bound_id} {r.argument_name}={r.argument:g}: lhs={r.lhs:.15g} rhs={r.rhs:.15g}")
    for err in out.errors:
        lines.append(f"# ERROR {err}")
    lines.append(f"# result: {'FAIL' if out.violations or out.errors else 'PASS'}")
    return "\n".join(lines) + "\n"


def run(cfg: RunConfig, stdout=None, stderr=None) -> int:
    """Execute a configuration; returns the process exit status."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    if cfg.command == "gen":
        if cfg.output:
            save_spectrum(cfg.spectrum, cfg.output)
        else:
            import tempfile
            with tempfile.TemporaryDirectory() as tmp:
                path = Path(tmp) / "spec.txt"
                save_spectrum(cfg.spectrum, path)
                stdout.write(path.read_text())
        return 0
    out = Outcome()
    handler = {"bounds": bounds_suite, "riesz": riesz_suite, "heat": heat_suite, "verify-all": verify_all}[cfg.command]
    handler(cfg, out)
    text = _render(cfg, out)
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        stdout.write(text)
    stderr.write(_summary(cfg, out))
    return 1 if out.violations or out.errors else 0


def main(argv=None) -> int:
    try:
        cfg = config_from_args(argv)
        return run(cfg)
    except (ConfigError, ub.BoundsError, ValueError) as exc:
        sys.stderr.write(f"eigenbounds: error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
