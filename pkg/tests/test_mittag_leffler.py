import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from levydiv.mittag_leffler import MAX_TERMS, ml2, ml_asymptotic, ml_derivative, mittag_leffler


def mp_ml(alpha, beta, z, terms=4000):
    """Reference series in 60-digit arithmetic."""
    with mpmath.workdps(60):
        return float(mpmath.nsum(lambda k: mpmath.mpf(z) ** k * mpmath.rgamma(alpha * k + beta),
                                 [0, mpmath.inf]))


def test_exponential_case():
    for z in (0.0, 0.5, 3.0, 40.0, -2.0):
        assert ml2(1.0, 1.0, z) == pytest.approx(math.exp(z), rel=1e-13)


def test_cosh_case():
    for t in (0.1, 1.0, 5.0):
        assert ml2(2.0, 1.0, t * t) == pytest.approx(math.cosh(t), rel=1e-13)
        assert ml2(2.0, 2.0, t * t) == pytest.approx(math.sinh(t) / t, rel=1e-13)


@given(alpha=st.floats(1.05, 2.0), beta=st.floats(0.2, 3.0), z=st.floats(0.0, 30.0))
def test_series_against_mpmath(alpha, beta, z):
    assert ml2(alpha, beta, z) == pytest.approx(mp_ml(alpha, beta, z), rel=1e-11)


@given(alpha=st.floats(1.1, 1.9), z=st.floats(0.1, 20.0))
def test_derivative_by_differences(alpha, z):
    h = 1e-5 * max(1.0, z)
    fd = (ml2(alpha, alpha, z + h) - ml2(alpha, alpha, z - h)) / (2 * h)
    assert ml_derivative(alpha, alpha, z, 1) == pytest.approx(fd, rel=1e-7)


def test_negative_argument_uses_extended_precision():
    # alternating series with terms up to e^50 in size
    assert ml2(1.0, 1.0, -50.0) == pytest.approx(math.exp(-50.0), rel=1e-10)
    assert ml2(2.0, 1.0, -25.0) == pytest.approx(math.cos(5.0), rel=1e-10)


def test_asymptotic_matches_series_where_both_apply():
    alpha, beta, z = 1.5, 1.5, 60.0
    assert ml_asymptotic(alpha, beta, z) == pytest.approx(mp_ml(alpha, beta, z), rel=1e-12)


def test_very_large_argument_is_finite():
    val = ml2(1.5, 1.5, 4000.0)
    assert np.isfinite(val) or val == math.inf
    assert MAX_TERMS >= 100


def test_vectorized_entry_point():
    y = np.array([0.0, 0.5, 2.0])
    out = mittag_leffler(1.5, y)
    assert out.shape == y.shape
    assert out[0] == pytest.approx(1.0)
