import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from levydiv import (
    BrownianDrift,
    CramerLundbergExp,
    DomainError,
    StableSpectralNeg,
    doubly_reflected_potential,
    dividends_doubly,
    exit_up_transform,
    overshoot_reflected,
    overshoot_ruin,
    phi,
    reflected_at_infimum_entrance,
    reflected_at_supremum_entrance,
    scale_functions,
)
from levydiv.policies import ClassicalBarrierValue

CL = CramerLundbergExp(2.0, 1.0, 1.0)


def test_exit_up_boundary_values(desk_model):
    q, a = 0.3, 2.0
    assert exit_up_transform(desk_model, q, a, a) == pytest.approx(1.0)
    sf = scale_functions(desk_model, q)
    assert exit_up_transform(desk_model, q, 0.0, a) == pytest.approx(sf.w(0.0) / sf.w(a))


def test_brownian_two_sided_exit():
    # E[exp(-q tau)] for hitting a before 0, standard Brownian motion without drift:
    # sinh(sqrt(2q) y) / sinh(sqrt(2q) a)
    m, q, a, y = BrownianDrift(0.0, 1.0), 0.4, 2.0, 0.7
    k = math.sqrt(2 * q)
    assert exit_up_transform(m, q, y, a) == pytest.approx(math.sinh(k * y) / math.sinh(k * a), rel=1e-12)
    # X - I entering [a, inf): cosh(k y) / cosh(k a)
    assert reflected_at_infimum_entrance(m, q, y, a) == pytest.approx(math.cosh(k * y) / math.cosh(k * a),
                                                                      rel=1e-12)


@given(q=st.floats(0.05, 2.0), y=st.floats(0.0, 1.0), a=st.floats(0.1, 5.0))
def test_transforms_in_unit_interval_and_monotone(desk_model, q, y, a):
    y = y * a
    vals = [
        f(desk_model, q, yy, a)
        for f in (exit_up_transform, reflected_at_infimum_entrance, reflected_at_supremum_entrance)
        for yy in (y, min(a, y + 0.05 * a))
    ]
    assert all(-1e-14 <= v <= 1 + 1e-14 for v in vals)
    assert vals[1] >= vals[0] - 1e-14 and vals[3] >= vals[2] - 1e-14 and vals[5] >= vals[4] - 1e-14


@given(x=st.floats(0.0, 5.0), q=st.floats(0.05, 2.0))
def test_overshoot_ruin_memoryless(x, q):
    # exponential claims: undershoot independent of the ruin time, mean 1/mu_rate
    sf = scale_functions(CL, q)
    ruin = sf.z(x) - q / phi(CL, q) * sf.w(x)
    assert overshoot_ruin(CL, q, x) == pytest.approx(-ruin / CL.mu_rate, rel=1e-10)


@given(frac=st.floats(0.0, 1.0), a=st.floats(0.2, 5.0), q=st.floats(0.05, 2.0))
def test_overshoot_reflected_memoryless(frac, a, q):
    sf = scale_functions(CL, q)
    y = frac * a
    ruin = sf.z(y) - q * sf.w(y) * sf.w(a) / sf.w_prime(a)
    assert overshoot_reflected(CL, q, y, a) == pytest.approx(-ruin / CL.mu_rate, rel=1e-9)


def test_no_overshoot_without_jumps():
    m = BrownianDrift(1.0, 1.0)
    assert overshoot_ruin(m, 0.1, 1.0) == pytest.approx(0.0, abs=1e-14)
    assert overshoot_reflected(m, 0.1, 1.0, 2.0) == pytest.approx(0.0, abs=1e-14)


@given(q=st.floats(0.05, 2.0), a=st.floats(0.3, 4.0), frac=st.floats(0.0, 1.0))
def test_potential_total_mass(desk_model, q, a, frac):
    pd = doubly_reflected_potential(desk_model, q, a, frac * a)
    assert pd.total_mass(tol=1e-11) == pytest.approx(1.0 / q, rel=1e-6)
    assert pd.atom >= 0.0 and pd.atom_level == a


@pytest.mark.parametrize("gap", [1e-5, 1e-12, 0.0])
def test_potential_mass_start_near_barrier(gap):
    # W' is singular at the barrier for the stable model
    pd = doubly_reflected_potential(StableSpectralNeg(1.5, 1.0), 1.0, 1.0, 1.0 - gap)
    assert pd.total_mass(tol=1e-11) == pytest.approx(1.0, rel=1e-8)


def test_potential_density_coordinates():
    pd = doubly_reflected_potential(CL, 0.1, 2.0, 1.0)
    ys = np.linspace(0.01, 1.99, 7)
    assert np.allclose(pd.density(ys), pd.density_dual(2.0 - ys))
    assert np.all(pd.density(ys) > 0)
    # unbounded variation has no atom at the barrier
    assert doubly_reflected_potential(BrownianDrift(1.0, 1.0), 0.1, 2.0, 1.0).atom == 0.0


def test_corner_recursion(desk_model):
    q, a = 0.2, 1.5
    sf = scale_functions(desk_model, q)
    v = ClassicalBarrierValue(desk_model, q, a)
    fa = v(a) / (1.0 - reflected_at_supremum_entrance(desk_model, q, 0.0, a) / sf.z(a))
    for x in np.linspace(0.0, a, 6):
        f = v(x) + reflected_at_supremum_entrance(desk_model, q, a - x, a) * fa / sf.z(a)
        assert f == pytest.approx(dividends_doubly(desk_model, q, a, x), rel=1e-10)


def test_domain_errors():
    with pytest.raises(DomainError):
        exit_up_transform(CL, 0.1, 3.0, 2.0)
    with pytest.raises(DomainError):
        doubly_reflected_potential(CL, 0.1, 0.0, 0.0)
    with pytest.raises(DomainError):
        overshoot_ruin(CL, 0.1, -1.0)
