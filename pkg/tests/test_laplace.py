import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from levydiv.laplace import contour_nodes, invert


@given(a=st.floats(0.1, 3.0), t=st.floats(0.1, 10.0))
def test_exponential(a, t):
    # the error is absolute (relative to O(1) values), hence the tilt used for W
    assert invert(lambda s: 1.0 / (s + a), t) == pytest.approx(math.exp(-a * t), abs=1e-10)


def test_sine_and_power():
    t = 2.0
    assert invert(lambda s: 1.0 / (s * s + 1.0), t) == pytest.approx(math.sin(t), abs=1e-10)
    assert invert(lambda s: 1.0 / s**2, t) == pytest.approx(t, rel=1e-10)
    # fractional power: 1/sqrt(s) <-> 1/sqrt(pi t)
    assert invert(lambda s: s**-0.5, t) == pytest.approx(1 / math.sqrt(math.pi * t), rel=1e-10)


def test_nodes_symmetric():
    s, w = contour_nodes(1.0, 32)
    assert np.allclose(s, np.conj(s[::-1]))
    assert np.all(np.isfinite(w))
