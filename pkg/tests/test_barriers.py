import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from levydiv import (
    BrownianDrift,
    ConsistencyError,
    CramerLundbergExp,
    DomainError,
    HyperExpJumpDiffusion,
    Method,
    StableSpectralNeg,
    UnsupportedOperation,
    bailout_criterion,
    bailout_ratio,
    generator_apply,
    optimal_bailout_barrier,
    optimal_classical_barrier,
    scale_functions,
    verify_hjb_bailout,
    verify_hjb_classical,
)
from levydiv import barriers
from levydiv.policies import ClassicalBarrierValue

CL = CramerLundbergExp(2.0, 1.0, 1.0)


def brownian_c(mu, sigma, q):
    # W'' = 0 for W proportional to exp((delta - omega) x) - exp(-(delta + omega) x)
    delta = math.sqrt(mu * mu + 2 * q * sigma**2) / sigma**2
    omega = mu / sigma**2
    return math.log((delta + omega) / (delta - omega)) / delta if mu > 0 else 0.0


def cl_c(p, lam, mu, q):
    if p * lam * mu <= (q + lam) ** 2:
        return 0.0
    disc = math.sqrt((q + lam - p * mu) ** 2 + 4 * p * q * mu)
    r_plus = (q + lam - p * mu + disc) / (2 * p)
    r_minus = (q + lam - p * mu - disc) / (2 * p)
    return math.log(r_minus**2 * (mu + r_minus) / (r_plus**2 * (mu + r_plus))) / (r_plus - r_minus)


def test_brownian_desk_value():
    sol = optimal_classical_barrier(BrownianDrift(1.0, 1.0), 0.1)
    assert sol.method is Method.CLOSED_FORM
    assert sol.level == pytest.approx(brownian_c(1.0, 1.0, 0.1), rel=1e-12)
    assert sol.level == pytest.approx(2.8198308272, abs=1e-9)
    sf = scale_functions(BrownianDrift(1.0, 1.0), 0.1)
    assert sf.w(sol.level) / sf.w_prime(sol.level) == pytest.approx(10.0, rel=1e-10)


def test_cl_desk_value():
    sol = optimal_classical_barrier(CL, 0.1)
    assert sol.level == pytest.approx(cl_c(2.0, 1.0, 1.0, 0.1), rel=1e-12)
    assert sol.level == pytest.approx(4.2140705627, abs=1e-9)
    assert sol.cross_check == pytest.approx(sol.level, rel=1e-8)


@given(p=st.floats(0.5, 6.0), lam=st.floats(0.2, 3.0), mu=st.floats(0.3, 3.0), q=st.floats(0.02, 1.0))
def test_cl_dichotomy(p, lam, mu, q):
    m = CramerLundbergExp(p, lam, mu)
    sol = optimal_classical_barrier(m, q)
    assert sol.level == pytest.approx(cl_c(p, lam, mu, q), rel=1e-8, abs=1e-12)
    if p * lam * mu <= (q + lam) ** 2:
        assert sol.level == 0.0


def test_cl_zero_barrier_case():
    assert optimal_classical_barrier(CramerLundbergExp(10.0, 1.0, 1.0), 3.0).level == 0.0


@given(mu=st.floats(0.1, 3.0), sigma=st.floats(0.3, 2.0), q=st.floats(0.02, 1.0), a=st.floats(0.0, 20.0))
def test_brownian_minimiser(mu, sigma, q, a):
    m = BrownianDrift(mu, sigma)
    c = optimal_classical_barrier(m, q).level
    sf = scale_functions(m, q)
    assert sf.w_prime(c) <= sf.w_prime(a) * (1 + 1e-12)


def test_stable_closed_form():
    m = StableSpectralNeg(1.5, 1.0)
    sol = optimal_classical_barrier(m, 0.1)
    assert sol.level == pytest.approx(1.0 * 0.1 ** (-1 / 1.5) * barriers.stable_u(1.5) ** (1 / 1.5), rel=1e-12)
    sf = scale_functions(m, 0.1)
    h = 1e-5
    assert (sf.w_prime(sol.level + h) - sf.w_prime(sol.level - h)) / (2 * h) == pytest.approx(0.0, abs=1e-8)


def test_hyperexp_generic_agrees():
    m = HyperExpJumpDiffusion(1.0, 0.5, 1.0, (0.4, 0.6), (1.0, 3.0))
    sol = optimal_classical_barrier(m, 0.1)
    assert sol.cross_check == pytest.approx(sol.level, rel=1e-8)
    assert abs(sol.criterion_residual) < 1e-10


def test_consistency_error(monkeypatch):
    monkeypatch.setattr(barriers, "classical_barrier_generic", lambda model, q, method="closed": 1.0)
    with pytest.raises(ConsistencyError) as info:
        optimal_classical_barrier(CL, 0.1)
    assert info.value.values[1] == 1.0


def test_bailout_desk_values():
    sol = optimal_bailout_barrier(CL, 0.1, 1.5)
    assert sol.level == pytest.approx(1.78626, abs=1e-5)
    assert abs(sol.criterion_residual) <= 1e-9 * abs(sol.reference)
    assert optimal_bailout_barrier(CL, 0.1, 3.0).level == pytest.approx(3.76633, abs=1e-5)


def test_bailout_zero_condition():
    # no Gaussian part and lambda <= q / (phi - 1)
    sol = optimal_bailout_barrier(CramerLundbergExp(2.0, 0.1, 1.0), 0.1, 1.5)
    assert sol.level == 0.0 and sol.method is Method.ZERO_BY_CONDITION
    assert optimal_bailout_barrier(CramerLundbergExp(2.0, 0.3, 1.0), 0.1, 1.5).level > 0
    assert optimal_bailout_barrier(BrownianDrift(1.0, 1.0), 0.1, 1.01).level > 0


@given(phi=st.floats(1.1, 4.0), q=st.floats(0.05, 1.0))
def test_ratio_sign_pattern(desk_model, phi, q):
    d = optimal_bailout_barrier(desk_model, q, phi).level
    xs = np.linspace(0.02, 3.0, 60) * max(d, 1.0)
    f = bailout_ratio(desk_model, q, phi, xs)
    below, above = xs < d * (1 - 1e-9), xs > d * (1 + 1e-9)
    assert np.all(f[below] > 0) and np.all(f[above] <= 0)
    assert np.all(np.sign(bailout_criterion(desk_model, q, phi, xs)) == np.sign(f))


def test_stable_bailout_cross_check():
    sol = optimal_bailout_barrier(StableSpectralNeg(1.5, 1.0), 0.1, 1.5)
    assert sol.cross_check == pytest.approx(sol.level, rel=1e-6)


@pytest.mark.parametrize("model", [BrownianDrift(1.0, 1.0), CL,
                                   HyperExpJumpDiffusion(1.0, 0.5, 1.0, (0.4, 0.6), (1.0, 3.0))])
def test_hjb(model):
    rep = verify_hjb_classical(model, 0.1)
    assert rep.condition_holds and rep.interior_ok and rep.slope_ok
    rep = verify_hjb_bailout(model, 0.1, 1.5)
    assert rep.condition_holds and rep.interior_ok and rep.slope_ok
    rows = list(rep.csv_rows())
    assert rows[0] == ("x", "residual") and len(rows) == len(rep.grid) + 1


def test_generator_vanishes_below_barrier():
    v = ClassicalBarrierValue(CL, 0.1, 3.0)
    for x in (0.5, 1.5, 2.9):
        assert abs(generator_apply(CL, 0.1, v, x)) < 1e-9


def test_generator_unsupported_for_stable():
    with pytest.raises(UnsupportedOperation):
        verify_hjb_classical(StableSpectralNeg(1.5, 1.0), 0.1)


def test_errors_and_serialisation():
    with pytest.raises(DomainError):
        optimal_classical_barrier(CL, 0.0)
    with pytest.raises(DomainError):
        optimal_bailout_barrier(CL, 0.1, 0.9)
    d = optimal_classical_barrier(CL, 0.1).to_dict()
    assert d["method"] == "ClosedForm" and set(d) >= {"level", "criterion_residual", "cross_check"}
