"""Acceptance criteria, one test each; every test records a PASS/FAIL line for the summary."""

import math
import time

import numpy as np

from conftest import ACCEPTANCE_LINES
from oracles import bisection_zero, square_count, square_theta
from eigenbounds import cheng_yang as cy
from eigenbounds import riesz_heat as rh
from eigenbounds import universal_bounds as ub
from eigenbounds.bessel import bessel_zero, bessel_zeros
from eigenbounds.riesz_heat import HeatQuery, RieszQuery
from eigenbounds.spectra import (
    DomainSpec,
    ball_spectrum,
    box_spectrum,
    from_values,
    projective_spectrum,
    sphere_spectrum,
)
from eigenbounds.universal_bounds import ShiftContext


class Criterion:
    """Collects named sub-checks and records a single summary line."""

    def __init__(self, number, title):
        self.number, self.title = number, title
        self.failures, self.notes = [], []

    def check(self, ok, what):
        if not ok:
            self.failures.append(what)

    def note(self, text):
        self.notes.append(text)

    def finish(self):
        status = "PASS" if not self.failures else "FAIL"
        detail = "; ".join(self.failures or self.notes)
        ACCEPTANCE_LINES.append(f"criterion {self.number} [{status}] {self.title}: {detail}")
        print(ACCEPTANCE_LINES[-1])
        assert not self.failures, detail


def inequality_suite(s, polya):
    reports = []
    K = min(s.complete_count - 1, 1000)
    for k in range(1, K + 1):
        reports += ub.implication_chain_check(s, k)
        reports.append(ub.li_yau_check(s, k, "sum"))
        reports.append(ub.li_yau_check(s, k, "individual"))
        if polya:
            reports.append(ub.polya_check(s, k))
        reports.append(cy.cy_recursion_check(s.certified(), s.n, k))
        reports.append(cy.cy_upper_check(s, k))
        reports += cy.quadratic_upper_check(s, k)
    lam1, top = s.eigenvalue(1), s.certified_upto
    zs = [float(z) for z in np.linspace(lam1, top, 300)]
    for z in zs:
        reports.append(rh.counting_check(s, z))
        for rho in (1, 2, 3):
            reports.append(rh.berezin_check(s, RieszQuery(rho, z)))
    for rho in (2.0, 3.0):
        reports += rh.harrell_stubbe_checks(s, None, rho, zs)
    t_min = rh._min_certified_t(s, 1e-12, 0.01)
    ts = [t for t in np.round(np.arange(0.01, 3.0, 0.01), 10) if t >= t_min]
    for t in ts:
        reports.append(rh.kac_check(s, HeatQuery(float(t))))
    return reports


def test_criterion_1_inequality_suite(square, disk):
    c = Criterion(1, "inequality suite on the square (1000) and the disk (200)")
    start = time.perf_counter()
    for name, s, polya in (("square", square, True), ("disk", disk, False)):
        reports = inequality_suite(s, polya)
        bad = [r for r in reports if not r.satisfied]
        worst = min(r.margin / max(1.0, abs(r.rhs)) for r in reports if math.isfinite(r.rhs))
        c.check(not bad, f"{name}: {len(bad)} unsatisfied, first {bad[:1]}")
        ids = sorted({r.bound_id.split("_rho")[0] for r in reports})
        c.note(f"{name}: {len(reports)} reports over {len(ids)} bound families, min relative margin {worst:.3g}")
    elapsed = time.perf_counter() - start
    c.check(elapsed < 60, f"runtime {elapsed:.1f}s exceeds 60s")
    c.note(f"{elapsed:.1f}s")
    c.finish()


def test_criterion_2_sharpness(disk):
    c = Criterion(2, "sharpness certificates")
    ratio = disk.eigenvalue(2) / disk.eigenvalue(1)
    target = (bessel_zero(1, 1) / bessel_zero(0, 1)) ** 2
    c.check(abs(ratio / target - 1) <= 1e-9, f"disk lambda2/lambda1={ratio!r} vs {target!r}")
    c.check(abs(cy.C0(2, 1) / target - 1) <= 1e-9, "C0(2,1) differs from j11^2/j01^2")
    c.note(f"disk ratio {ratio:.12f}")
    for n in (2, 3):
        r = ub.yang1_check(sphere_spectrum(n, 5), 1, ShiftContext(ambient="sphere"))
        c.check(abs(r.margin) <= 1e-9 * abs(r.rhs), f"S^{n}: shifted yang1 margin {r.margin!r}")
        c.note(f"S^{n} margin {r.margin:.3g}")
    c.finish()


def test_criterion_3_bessel_kernel():
    c = Criterion(3, "Bessel zeros and interlacing")
    pairs = [(0, 1), (1, 1)] + [(0.5, k) for k in range(1, 21)]
    worst = 0.0
    for p, k in pairs:
        ref = bisection_zero(p, k)
        rel = abs(bessel_zero(p, k) / ref - 1)
        worst = max(worst, rel)
        c.check(rel <= 1e-9, f"j_{p},{k} off by {rel:.3g}")
    c.note(f"{len(pairs)} zeros, worst relative error {worst:.2g}")
    violations = 0
    orders = np.arange(0, 30.01, 0.25)
    for p in orders:
        a, b = bessel_zeros(p, 51), bessel_zeros(p + 1, 50)
        violations += int(np.sum(~((a[:50] < b) & (b < a[1:51]))))
    c.check(violations == 0, f"{violations} interlacing violations")
    c.note(f"interlacing on {len(orders)} orders x 50 zeros")
    c.finish()


def test_criterion_4_asymptotics():
    c = Criterion(4, "Weyl asymptotics on the square")
    s = box_spectrum([math.pi, math.pi], 40000)
    limit = math.pi / 4
    z = 1e4
    n_ratio = rh.counting_function(s, z) / z
    c.check(rh.counting_function(s, z) == square_count(z), "N(z) disagrees with lattice count")
    c.check(abs(n_ratio / limit - 1) <= 0.03, f"N/z deviation {n_ratio / limit - 1:+.2%}")
    c.note(f"N/z {n_ratio / limit - 1:+.2%}")
    for rho in (1, 2):
        lim = rh.classical_constant(rho, 2) * s.domain.volume
        v = rh.riesz_mean(s, RieszQuery(rho, z)) / z ** (rho + 1)
        c.check(abs(v / lim - 1) <= 0.03, f"R_{rho} deviation {v / lim - 1:+.2%}")
        c.note(f"R_{rho} {v / lim - 1:+.2%}")
    diag = rh.karamata_limit_check(s)
    c.check(diag.consistency.satisfied, "a/Gamma(r+1) != L_0 |Omega|")
    t = 1e-3
    trace = rh.partition_function(s, HeatQuery(t))
    exact = square_theta(t)
    c.check(trace.value <= exact <= trace.upper, "certified tail does not bracket the theta value")
    dev = t * trace.value / limit - 1
    exact_dev = t * exact / limit - 1
    c.check(abs(dev) <= 0.01, f"t Z(t) at t=1e-3 deviates {dev:+.2%} from pi/4 (tail {trace.tail_bound:.2g}; "
                              f"exact theta value deviates {exact_dev:+.2%})")
    c.note(f"t Z(t) {dev:+.2%}")
    c.finish()


def test_criterion_5_transform_identities(square):
    c = Criterion(5, "Riesz iteration, Legendre transform, shift factorization")
    rng = np.random.default_rng(20240517)
    worst = 0.0
    for _ in range(50):
        rho = float(rng.choice([0, 1, 2, 3])) if rng.random() < 0.5 else float(rng.uniform(0, 3))
        delta = float(rng.uniform(0.2, 2.5))
        z = float(rng.uniform(3, 150))
        direct, iterated = rh.riesz_iteration(square, rho, delta, z)
        rel = abs(iterated - direct) / abs(direct)
        worst = max(worst, rel)
        c.check(rel <= 1e-8, f"iteration rho={rho:g} delta={delta:g} z={z:g} rel {rel:.2g}")
    c.note(f"50 samples, worst {worst:.2g}")
    lam = square.certified()
    mism = [p for p in range(1, square.complete_count + 1) if rh.legendre_transform(square, p) != math.fsum(lam[:p])]
    c.check(not mism, f"Legendre mismatch at p={mism[:3]}")
    shift = ShiftContext(H0_sq=1.3)
    sigma = shift.sigma(2)
    worst_shift = 0.0
    for t in (0.05, 0.3, 1.0, 2.5):
        zh = rh.partition_function(square, HeatQuery(t, shift=shift)).value
        z0 = rh.partition_function(square, HeatQuery(t)).value
        direct = math.fsum(np.exp(-(lam + sigma) * t))
        rel = max(abs(zh / (math.exp(-sigma * t) * z0) - 1), abs(zh / direct - 1))
        worst_shift = max(worst_shift, rel)
        c.check(rel <= 1e-12, f"Z_H vs e^(-sigma t) Z at t={t}: {rel:.2g}")
    c.note(f"shift factorization worst {worst_shift:.2g}")
    c.finish()


def test_criterion_6_shifted_suite():
    c = Criterion(6, "projective spaces and the Cheng-Yang lower bound")
    cases = [("R", 2), ("C", 1), ("C", 2), ("C", 3), ("Q", 1)]
    for field, m in cases:
        s = projective_spectrum(field, m, 14)
        d = {"R": 1, "C": 2, "Q": 4}[field]
        shift = ShiftContext(ambient="projective", field_dim=d)
        c.check(shift.sigma(s.n) == ub.projective_remark_constant(d, m), f"{field}P^{m} shift constant")
        K = min(s.complete_count, 2000)
        bad = [k for k in range(1, K + 1) if not ub.projective_sum_lower(s, k, shift).satisfied]
        c.check(not bad, f"{field}P^{m}: projective_sum_lower fails at k={bad[:3]}")
    c.note(f"{len(cases)} projective spaces")
    cp1, s2 = projective_spectrum("C", 1, 20), sphere_spectrum(2, 20)
    c.check(np.array_equal(cp1.values, 4 * s2.values) and np.array_equal(cp1.multiplicities, s2.multiplicities),
            "CP^1 != S^2(1/2)")
    qp1, s4 = projective_spectrum("Q", 1, 20), sphere_spectrum(4, 20)
    c.check(np.array_equal(qp1.values, 4 * s4.values) and np.array_equal(qp1.multiplicities, s4.multiplicities),
            "QP^1 != S^4(1/2)")
    dirichlet = [
        box_spectrum([math.pi, math.pi], 1000),
        box_spectrum([1.0, 2.0], 500),
        box_spectrum([1.0, 1.5, 2.0], 500),
        ball_spectrum(2, 1.0, 200),
        ball_spectrum(3, 1.0, 200),
        ball_spectrum(4, 2.0, 200),
    ]
    for s in dirichlet:
        bad = [k for k in range(1, s.complete_count + 1) if not ub.cheng_yang_sum_lower(s, k).satisfied]
        c.check(not bad, f"{s.domain.label}: Cheng-Yang lower fails at k={bad[:3]}")
    c.note(f"Cheng-Yang lower on {len(dirichlet)} Dirichlet spectra")
    c.finish()


def test_criterion_7_negative_control():
    c = Criterion(7, "negative control")
    s = from_values([1.0], DomainSpec(2, 1.0, "single"), exhaustive=True)
    grid = [round(0.5 + 0.1 * i, 10) for i in range(11)]
    reports = rh.hs_monotonicity_check(s, grid)
    failing = [r.argument for r in reports if r.violated]
    passing = [r.argument for r in reports if r.satisfied]
    c.check(bool(failing), "no violation detected")
    c.check(bool(failing) and math.isclose(max(failing), 1.0), f"last violating step ends at {failing[-1:]}")
    c.check(bool(passing) and math.isclose(min(passing), 1.1), "monotonicity not restored past t = 1")
    c.note(f"violations on steps ending at t={failing[0]:g}..{failing[-1]:g}")
    c.finish()
