import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eigenbounds import cheng_yang as cy
from eigenbounds import universal_bounds as ub
from eigenbounds.bessel import bessel_zero
from eigenbounds.spectra import ball_spectrum, box_spectrum


def test_a_constant():
    assert cy.a_constant(1) == 2.64
    assert cy.a_constant(3) == pytest.approx(2.2)
    assert cy.a_constant(2) == pytest.approx(2.2 - 4 * math.log(49 / 50))
    with pytest.raises(ub.BoundsError):
        cy.a_constant(0)


def test_c0_values():
    assert cy.C0(2, 1) == pytest.approx((bessel_zero(1, 1) / bessel_zero(0, 1)) ** 2, rel=1e-14)
    assert cy.C0(2, 1) == pytest.approx(2.538734, abs=1e-6)
    assert cy.C0(2, 4) == pytest.approx(1 + cy.a_constant(2) / 2)
    assert cy.C0(5, 2) == pytest.approx(1 + cy.a_constant(1) / 5)
    # n = 1: an interval, lambda_2 / lambda_1 = 4.
    assert cy.C0(1, 1) == pytest.approx(4.0, rel=1e-12)


def test_disk_upper_bound_is_equality(disk):
    r = cy.cy_upper_check(disk, 1)
    assert abs(r.margin) <= 1e-9 * r.rhs


def test_state_definitions():
    st_ = cy.cy_state([1.0, 2.0, 4.0], 2.0, 3)
    assert st_.G == pytest.approx(7 / 3)
    assert st_.T == pytest.approx(7.0)
    assert st_.F == pytest.approx(2 * (7 / 3) ** 2 - 7)


def test_hypothesis_failure_reports_index():
    with pytest.raises(cy.HypothesisError) as err:
        cy.cy_recursion_check([1.0, 1.1, 50.0, 51.0], 2.0, 2)
    assert err.value.index == 2


def test_recursion_rejects_bad_input():
    with pytest.raises(ub.BoundsError):
        cy.cy_recursion_check([1.0, -1.0], 2.0, 1)
    with pytest.raises(ub.BoundsError):
        cy.cy_recursion_check([2.0, 1.0], 2.0, 1)


@given(st.lists(st.floats(0.3, 4.0), min_size=1, max_size=3), st.integers(1, 100), st.integers(1, 20))
@settings(max_examples=40, deadline=None)
def test_recursion_on_boxes(lengths, k, l):
    s = box_spectrum(lengths, 130)
    r = cy.cy_recursion_check(s.certified(), s.n, k, l)
    assert r.satisfied, r


@given(st.integers(2, 4), st.integers(1, 120))
@settings(max_examples=25, deadline=None)
def test_upper_and_quadratic_on_balls(n, k):
    s = ball_spectrum(n, 1.0, 130)
    assert cy.cy_upper_check(s, k).satisfied
    for r in cy.quadratic_upper_check(s, k):
        assert r.satisfied, r


@given(st.lists(st.floats(0.3, 4.0), min_size=1, max_size=3), st.integers(1, 120))
@settings(max_examples=30, deadline=None)
def test_quadratic_root_below_crude(lengths, k):
    s = box_spectrum(lengths, 130)
    q = cy.yang_quadratic_upper(s.prefix(k), s.n, k)
    assert q.root <= q.crude + 1e-9 * abs(q.crude)
    assert s.eigenvalue(k + 1) <= q.root * (1 + 1e-9)


def test_quadratic_square_example():
    s = box_spectrum([math.pi, math.pi], 20)
    q = cy.yang_quadratic_upper(s.prefix(1), 2, 1)
    assert q.root == pytest.approx(6.0)


def test_quadratic_is_attained_by_boundary_sequence():
    mu = ub.yang_boundary_sequence(1.0, 3, 12)
    for k in range(1, 11):
        q = cy.yang_quadratic_upper(mu[:k], 3, k)
        assert q.root == pytest.approx(mu[k], rel=1e-10)


def test_quadratic_rejects_hyperbolic():
    with pytest.raises(ub.BoundsError):
        cy.yang_quadratic_upper([1.0, 2.0], 2, 2, ub.ShiftContext(ambient="hyperbolic"))


def test_recursion_holds_on_boundary_sequence():
    mu = ub.yang_boundary_sequence(2.0, 2, 60)
    for k in range(1, 59):
        assert cy.cy_recursion_check(mu, 2, k).satisfied
