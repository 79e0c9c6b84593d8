import io
import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from levydiv import (
    BrownianDrift,
    ConfigError,
    CramerLundbergExp,
    DomainError,
    Estimand,
    MCEstimate,
    Scheme,
    SimConfig,
    StableSpectralNeg,
    classical_barrier_value,
    dividends_doubly,
    doubly_reflected_potential,
    exit_up_transform,
    injections_doubly,
)
from levydiv.simulate import (
    MAX_DUMP,
    dump_paths,
    sample_paths,
    sample_stable_increment,
    simulate_doubly_reflected,
    simulate_exit_functionals,
    simulate_occupation,
    simulate_reflected_barrier,
)

CL = CramerLundbergExp(2.0, 1.0, 1.0)
FAST = SimConfig(n_paths=20_000, horizon=150.0, seed=11)


def test_config_validation():
    for bad in ({"n_paths": 0}, {"dt": 0.0}, {"horizon": -1.0}, {"seed": -1}, {"workers": 0}):
        with pytest.raises(ConfigError):
            SimConfig(**bad)
    assert SimConfig(scheme="euler").scheme is Scheme.EULER
    with pytest.raises(ValueError):
        SimConfig(scheme="milstein")


def test_event_scheme_needs_bounded_variation():
    with pytest.raises(ConfigError):
        simulate_reflected_barrier(BrownianDrift(1.0, 1.0), 2.0, 1.0, 0.1, FAST)


def test_barrier_dividends_event():
    est = simulate_reflected_barrier(CL, 2.0, 1.0, 0.1, FAST).dividends
    assert est.within(classical_barrier_value(CL, 0.1, 2.0, 1.0), k=4)
    assert est.n == FAST.n_paths and est.truncation_bound < 1e-4


def test_doubly_reflected_event():
    est = simulate_doubly_reflected(CL, 2.0, 1.0, 0.1, FAST.replace(n_paths=8000))
    assert est.dividends.within(dividends_doubly(CL, 0.1, 2.0, 1.0), k=4)
    assert est.injections.within(injections_doubly(CL, 0.1, 2.0, 1.0), k=4)


def test_euler_brownian_doubly_reflected():
    m = BrownianDrift(1.0, 1.0)
    cfg = SimConfig(n_paths=4096, dt=2e-2, horizon=100.0, seed=3, scheme="euler")
    est = simulate_doubly_reflected(m, 2.0, 1.0, 0.1, cfg)
    assert est.dividends.within(dividends_doubly(m, 0.1, 2.0, 1.0), k=4)
    assert est.injections.within(injections_doubly(m, 0.1, 2.0, 1.0), k=4)


def test_exit_functional_up_cross():
    est = simulate_exit_functionals(CL, 1.0, 2.0, 0.1, FAST, Estimand.UP_CROSS_FIRST)
    assert est.within(exit_up_transform(CL, 0.1, 1.0, 2.0), k=4)
    with pytest.raises(DomainError):
        simulate_exit_functionals(CL, 3.0, 2.0, 0.1, FAST, "UpCrossFirst")


def test_determinism_and_worker_independence():
    cfg = FAST.replace(n_paths=9000, horizon=100.0)
    one = simulate_reflected_barrier(CL, 2.0, 1.0, 0.1, cfg)
    two = simulate_reflected_barrier(CL, 2.0, 1.0, 0.1, cfg.replace(workers=3))
    assert one == two
    other = simulate_reflected_barrier(CL, 2.0, 1.0, 0.1, cfg.replace(seed=12))
    assert other.dividends.mean != one.dividends.mean


def test_occupation_histogram():
    occ = simulate_occupation(CL, 2.0, 1.0, 0.1, FAST.replace(n_paths=5000), n_bins=10)
    pd = doubly_reflected_potential(CL, 0.1, 2.0, 1.0)
    total = occ.atom.mean + float(np.sum(occ.density * np.diff(occ.edges)))
    # discounted time over [0, horizon] is (1 - e^{-qT}) / q
    assert total == pytest.approx((1 - math.exp(-15.0)) / 0.1, rel=1e-9)
    assert occ.atom.within(pd.atom, k=4)
    assert occ.centers.shape == (10,)


def test_horizon_warning():
    with pytest.warns(RuntimeWarning):
        simulate_reflected_barrier(CL, 2.0, 1.0, 0.1, FAST.replace(n_paths=100, horizon=20.0))


def test_path_logs():
    cfg = FAST.replace(horizon=30.0)
    paths = sample_paths(CL, 2.0, 1.0, 0.1, cfg, n=50)
    for p in paths:
        for e in p.events:
            assert 0.0 <= e.post_level <= 2.0
            if e.dL > 0:
                assert e.pre_level >= 2.0
            if e.dR > 0:
                assert e.pre_level <= 0.0
    buf = io.StringIO()
    dump_paths(paths, buf)
    lines = buf.getvalue().splitlines()
    assert len(lines) == 50
    assert set(json.loads(lines[0])) == {"events", "ruin_time", "disc_L", "disc_R"}
    assert len(sample_paths(CL, 2.0, 1.0, 0.1, cfg.replace(horizon=1.0), n=5000)) == MAX_DUMP


def test_stable_increments():
    rng = np.random.default_rng(5)
    x = sample_stable_increment(2.0, 1.0, 0.04, rng, 200_000)
    assert x.var() == pytest.approx(2 * 0.04, rel=0.02)
    y = sample_stable_increment(1.5, 1.0, 0.01, rng, 400_000)
    e = np.exp(0.5 * y)
    assert abs(e.mean() - math.exp(0.01 * 0.5**1.5)) < 4 * e.std() / math.sqrt(e.size)
    assert np.mean((y - y.mean()) ** 3) < 0


def test_euler_stable_runs():
    cfg = SimConfig(n_paths=500, dt=5e-2, horizon=100.0, seed=1, scheme="euler")
    est = simulate_doubly_reflected(StableSpectralNeg(1.5, 1.0), 2.0, 1.0, 0.1, cfg)
    assert est.dividends.mean > 0 and est.injections.mean > 0


@given(mean=st.floats(-10, 10), se=st.floats(0.0, 1.0), trunc=st.floats(0.0, 0.1))
def test_estimate_band(mean, se, trunc):
    est = MCEstimate(mean, se, 100, trunc)
    assert est.within(mean + trunc)
    assert est.within(mean + trunc + 3 * se)
    if se > 0:
        assert est.zscore(mean + trunc + 5 * se + 1e-6) > 3
