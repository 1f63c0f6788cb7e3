import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import jn_zeros

from eigenbounds import bessel
from oracles import bisection_zero
from eigenbounds.bessel import BesselRangeError, bessel_j, bessel_zero, bessel_zeros, bessel_zeros_below


@pytest.mark.parametrize("p,k", [(0, 1), (1, 1), (0, 5), (2.5, 3), (7, 2)])
def test_zero_matches_bisection(p, k):
    assert bessel_zero(p, k) == pytest.approx(bisection_zero(p, k), rel=1e-12)


def test_half_order_zeros_are_multiples_of_pi():
    z = bessel_zeros(0.5, 20)
    assert np.allclose(z, math.pi * np.arange(1, 21), rtol=1e-13, atol=0)


def test_integer_orders_match_scipy():
    for p in (0, 1, 4, 15):
        assert np.allclose(bessel_zeros(p, 30), jn_zeros(p, 30), rtol=1e-13, atol=0)


@given(st.floats(0, 200), st.floats(0, 1000))
@settings(max_examples=60, deadline=None)
def test_values_match_mpmath(p, x):
    mpmath.mp.dps = 30
    assert abs(bessel_j(p, x) - float(mpmath.besselj(p, x))) <= 1e-12


@given(st.floats(0, 30), st.integers(1, 49))
@settings(max_examples=40, deadline=None)
def test_interlacing(p, k):
    # j_{p,k} < j_{p+1,k} < j_{p,k+1}
    assert bessel_zero(p, k) < bessel_zero(p + 1, k) < bessel_zero(p, k + 1)


def test_zeros_strictly_increasing_and_cached():
    z = bessel_zeros(3.5, 50)
    assert np.all(np.diff(z) > 0)
    assert bessel_zeros(3.5, 50) is not None
    assert np.array_equal(bessel_zeros(3.5, 10), z[:10])


def test_zeros_below():
    z = bessel_zeros_below(1, 20.0)
    assert np.all(z < 20.0)
    assert bessel_zero(1, len(z) + 1) >= 20.0


def test_mcmahon_is_close_for_large_k():
    assert bessel.mcmahon_estimate(2, 40) == pytest.approx(bessel_zero(2, 40), rel=1e-6)


@pytest.mark.parametrize("p,x", [(201, 1.0), (1.0, 1001.0)])
def test_range_errors(p, x):
    with pytest.raises(BesselRangeError):
        bessel_j(p, x)


def test_zero_index_validation():
    with pytest.raises(ValueError):
        bessel_zero(1, 0)


def test_negative_order_rejected():
    with pytest.raises(ValueError):
        bessel_j(-0.5, 1.0)
