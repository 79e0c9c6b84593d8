"""Acceptance criteria 1-11, each at its stated tolerance and runtime budget.

Every test records a one-line PASS/FAIL summary that is printed at the end
of the pytest session (see conftest.py). Run on its own with

    python tests/test_acceptance.py
"""

import filecmp
import json
import subprocess
import sys
import time

import pytest

from conftest import ACCEPTANCE_LINES, DESK
from levydiv import (
    BrownianDrift,
    CramerLundbergExp,
    Estimand,
    SimConfig,
    classical_barrier_value,
    dividends_doubly,
    exit_up_transform,
    injections_doubly,
    optimal_classical_barrier,
    overshoot_reflected,
    overshoot_ruin,
    reflected_at_infimum_entrance,
    reflected_at_supremum_entrance,
    run_suite,
    scale_functions,
    verify_hjb_bailout,
    verify_hjb_classical,
)
from levydiv.barriers import classical_barrier_generic
from levydiv.simulate import simulate_doubly_reflected, simulate_exit_functionals, simulate_reflected_barrier
from levydiv import verification as V

MODELS = [DESK[k] for k in ("brownian", "cl", "stable", "hyperexp")]
Q_LIST = (0.1, 1.0)
CL = CramerLundbergExp(2.0, 1.0, 1.0)
MC_SEED = 20240611
MC = SimConfig(n_paths=200_000, horizon=150.0, seed=MC_SEED)


class Clock:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0


def record(n, title, ok, elapsed, budget, detail):
    in_time = elapsed < budget
    status = "PASS" if ok and in_time else "FAIL"
    line = f"[criterion {n:2d}] {status}  {title}: {detail} ({elapsed:.1f}s, budget {budget:g}s)"
    ACCEPTANCE_LINES[n] = line
    print(line)
    assert ok, line
    assert in_time, line


def test_c01_laplace_identity():
    with Clock() as clk:
        res = [V.check_laplace(None, m, q) for m in MODELS for q in Q_LIST]
    worst = max(abs(r.estimate - r.target) / abs(r.target) for r in res)
    record(1, "scale-function Laplace identity", all(r.passed for r in res), clk.elapsed, 5,
           f"{len(res)} cases, max rel err {worst:.1e} <= 1e-6")


def test_c02_closed_vs_numeric():
    with Clock() as clk:
        res = [V.check_closed_vs_numeric(None, m, q) for m in MODELS for q in Q_LIST]
    worst = {r.check_id.split("[")[1].split("(")[0]: r.estimate for r in res}
    record(2, "closed form vs contour inversion", all(r.passed for r in res), clk.elapsed, 30,
           ", ".join(f"{k} {v:.1e}" for k, v in sorted(worst.items())))


def test_c03_brownian_c():
    m, q = BrownianDrift(1.0, 1.0), 0.1
    with Clock() as clk:
        sol = optimal_classical_barrier(m, q)
        generic = classical_barrier_generic(m, q)
        sf = scale_functions(m, q)
        ratio = sf.w(sol.level) / sf.w_prime(sol.level)
    ok = abs(generic - sol.level) <= 1e-8 * sol.level and abs(ratio - 10.0) <= 1e-10 * 10.0
    record(3, "Brownian c*", ok, clk.elapsed, 1,
           f"closed {sol.level:.10f}, generic {generic:.10f}, W/W'(c*) = {ratio!r}")


def test_c04_cl_dichotomy():
    with Clock() as clk:
        res = [V.check_cl_dichotomy(None, CL, q) for q in Q_LIST]
    record(4, "CL c* dichotomy", all(r.passed for r in res), clk.elapsed, 2,
           f"{2 * 20} cases over q in {Q_LIST}, max generic-vs-closed rel err "
           f"{max(r.estimate for r in res):.1e}")


def test_c05_d_contract():
    q = 0.1
    with Clock() as clk:
        res = [V.check_zero_condition_grid(None, CL, q)]
        for m in MODELS:
            res += [V.check_d_residual(None, m, q), V.check_f_sign(None, m, q)]
    bad = [r.check_id for r in res if not r.passed]
    record(5, "d* contract", not bad, clk.elapsed, 5,
           f"20-case zero-condition grid, |G(d*)| and F sign pattern on 4 families; failures {bad or 'none'}")


def test_c06_prop1_mc():
    target = classical_barrier_value(CL, 0.1, 2.0, 1.0)
    with Clock() as clk:
        est = simulate_reflected_barrier(CL, 2.0, 1.0, 0.1, MC).dividends
    half = 1.96 * est.stderr / est.mean
    ok = est.within(target, 3) and half <= 0.015
    record(6, "barrier dividends MC", ok, clk.elapsed, 60,
           f"MC {est.mean:.5f} +- {est.stderr:.5f} vs {target:.5f}, z={est.zscore(target):.2f}, "
           f"rel half-width {half:.2%}")


def test_c07_doubly_mc():
    assert 0.1 * MC.horizon >= 15
    t_div, t_inj = dividends_doubly(CL, 0.1, 2.0, 1.0), injections_doubly(CL, 0.1, 2.0, 1.0)
    with Clock() as clk:
        est = simulate_doubly_reflected(CL, 2.0, 1.0, 0.1, MC)
    ok = est.dividends.within(t_div, 3) and est.injections.within(t_inj, 3)
    record(7, "doubly reflected MC", ok, clk.elapsed, 120,
           f"L: {est.dividends.mean:.5f} vs {t_div:.5f} (z={est.dividends.zscore(t_div):.2f}); "
           f"R: {est.injections.mean:.5f} vs {t_inj:.5f} (z={est.injections.zscore(t_inj):.2f})")


def test_c08_exit_identities_mc():
    q, a = 0.1, 2.0
    cases = [
        (Estimand.UP_CROSS_FIRST, 1.0, exit_up_transform(CL, q, 1.0, a)),
        (Estimand.REFLECTED_INF_ENTRANCE, 0.5, reflected_at_infimum_entrance(CL, q, 0.5, a)),
        (Estimand.REFLECTED_SUP_ENTRANCE, 1.0, reflected_at_supremum_entrance(CL, q, 1.0, a)),
        (Estimand.OVERSHOOT_REFLECTED, 1.0, overshoot_reflected(CL, q, 1.0, a)),
        (Estimand.OVERSHOOT_RUIN, 1.0, overshoot_ruin(CL, q, 1.0)),
    ]
    zs, ok = [], True
    with Clock() as clk:
        for est_kind, y, target in cases:
            est = simulate_exit_functionals(CL, y, a, q, MC, est_kind)
            zs.append(f"{est_kind.value} z={est.zscore(target):.2f}")
            ok &= est.within(target, 3)
    record(8, "exit identities MC", ok, clk.elapsed, 180, "; ".join(zs))


def test_c09_hjb():
    with Clock() as clk:
        reps = [verify_hjb_classical(BrownianDrift(1.0, 1.0), 0.1), verify_hjb_classical(CL, 0.1)]
        bail = verify_hjb_bailout(BrownianDrift(1.0, 1.0), 0.1, 1.5)
    ok = all(r.condition_holds and r.interior_ok for r in reps) and bail.interior_ok
    record(9, "HJB verification", ok, clk.elapsed, 10,
           "interior |res| " + ", ".join(f"{r.interior_max_abs:.1e}/{r.tolerance:.1e}" for r in reps + [bail]))


def test_c10_dominance():
    with Clock() as clk:
        res = run_suite("policy", monte_carlo=False)
    bad = [r.check_id for r in res if not r.passed]
    record(10, "dominance and slope properties", not bad, clk.elapsed, 10,
           f"{len(res)} checks over 4 families x q in {Q_LIST}; failures {bad or 'none'}")


@pytest.mark.slow
def test_c11_determinism(tmp_path):
    outs = [tmp_path / "one.json", tmp_path / "two.json"]
    codes = []
    with Clock() as clk:
        for out in outs:
            proc = subprocess.run(
                [sys.executable, "-m", "levydiv", "verify", "--suite", "all", "--seed", "7", "--out", str(out)],
                capture_output=True, text=True, timeout=1800,
            )
            codes.append(proc.returncode)
    same = filecmp.cmp(outs[0], outs[1], shallow=False)
    data = json.loads(outs[0].read_text())
    failed = [d["check_id"] for d in data if not d["passed"]]
    record(11, "verify determinism", same and codes == [0, 0], clk.elapsed, 600,
           f"byte-identical={same}, exit codes {codes}, {len(data)} checks, failures {failed or 'none'}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
