"""Verification suites: every analytic identity paired with an independent
route (quadrature, contour inversion, finite differences, Monte Carlo).

Each check yields one :class:`CheckResult`. Monte Carlo comparisons use a
3-standard-error band plus the analytic truncation bound; a failing Monte
Carlo check is rerun once with a derived seed and twice the paths before it
is reported as failed.
"""

from __future__ import annotations

import json
import math
import warnings
import zlib
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from . import exits, policies
from .barriers import (
    bailout_ratio,
    classical_barrier_generic,
    optimal_bailout_barrier,
    optimal_classical_barrier,
    verify_hjb_bailout,
    verify_hjb_classical,
)
from .exceptions import ConsistencyError, NumericalFailure, UnsupportedOperation
from .models import (
    BrownianDrift,
    CramerLundbergExp,
    HyperExpJumpDiffusion,
    StableSpectralNeg,
    phi as big_phi,
)
from .scale import scale_functions, w_derivatives
from .simulate import (
    Estimand,
    Scheme,
    SimConfig,
    sample_paths,
    sample_stable_increment,
    simulate_doubly_reflected,
    simulate_exit_functionals,
    simulate_occupation,
    simulate_reflected_barrier,
)

__all__ = ["CheckResult", "SUITES", "run_suite", "default_models", "report_json"]

SUITES = ("scale", "exit", "policy", "barrier", "simulator", "all")
DESK_Q = 0.1
DESK_A = 2.0
DESK_PHI = 1.5


def StdErr(k):
    return f"StdErr({k:g})"


def Relative(eps):
    return f"Relative({eps:g})"


def Absolute(eps):
    return f"Absolute({eps:g})"


@dataclass(frozen=True)
class CheckResult:
    check_id: str
    target: float
    estimate: float
    tolerance_kind: str
    passed: bool
    detail: str

    def to_dict(self):
        def num(v):
            v = float(v)
            return v if math.isfinite(v) else repr(v)

        return {
            "check_id": self.check_id,
            "target": num(self.target),
            "estimate": num(self.estimate),
            "tolerance_kind": self.tolerance_kind,
            "passed": bool(self.passed),
            "detail": self.detail,
        }


def default_models():
    """The four desk models used throughout the documentation."""
    return [
        BrownianDrift(1.0, 1.0),
        CramerLundbergExp(2.0, 1.0, 1.0),
        StableSpectralNeg(1.5, 1.0),
        HyperExpJumpDiffusion(1.0, 0.5, 1.0, (0.4, 0.6), (1.0, 3.0)),
    ]


@dataclass
class _Ctx:
    models: list
    q_list: list
    cfg: SimConfig
    euler_paths: int
    euler_dt: float
    monte_carlo: bool = True
    cache: dict = field(default_factory=dict)

    def rng(self, key):
        return np.random.default_rng(np.random.SeedSequence([int(self.cfg.seed), zlib.crc32(key.encode())]))

    def seed_for(self, key, attempt=0):
        ss = np.random.SeedSequence([int(self.cfg.seed), zlib.crc32(key.encode()), attempt])
        return int(ss.generate_state(1, dtype=np.uint64)[0])


def _rel_err(est, target):
    return abs(est - target) / max(abs(target), 1e-300)


def _tag(model, q=None):
    return f"[{model.label()}]" if q is None else f"[{model.label()},q={q:g}]"


def _desk_q(ctx):
    return DESK_Q if DESK_Q in ctx.q_list else ctx.q_list[0]


def _supports_generator(model):
    return not (isinstance(model, StableSpectralNeg) and model.alpha < 2.0)


# ------------------------------------------------------------------- scale


def check_laplace(ctx, model, q):
    sf = scale_functions(model, q)
    phi_q = big_phi(model, q)
    theta = phi_q + 1.0
    # tail after M is below exp((Phi - theta) M) times the growth constant
    m_top = 30.0
    edges = np.linspace(0.0, m_top, 31)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, _ = quad(lambda x: math.exp(-theta * x) * sf.w(x), lo, hi, epsabs=0.0, epsrel=1e-12, limit=100)
        total += val
    target = 1.0 / (model.psi(theta) - q)
    err = _rel_err(total, target)
    return CheckResult(f"scale.laplace_identity{_tag(model, q)}", target, total, Relative(1e-6), err <= 1e-6,
                       f"anchor: Laplace transform of W; quadrature on [0, {m_top:g}] at theta = Phi(q)+1, rel err {err:.2e}")


def check_closed_vs_numeric(ctx, model, q):
    tol = 1e-6 if isinstance(model, (BrownianDrift, CramerLundbergExp)) else 1e-5
    sf = scale_functions(model, q)
    xs = np.linspace(0.2, 10.0, 50)
    try:
        num = scale_functions(model, q, method="numeric")
        approx = np.array([num.w(x) for x in xs])
    except NumericalFailure as exc:
        return CheckResult(f"scale.closed_vs_numeric{_tag(model, q)}", math.nan, math.nan, Relative(tol), False,
                           f"anchor: contour inversion of 1/(psi - q); inversion failed: {exc}")
    exact = np.asarray(sf.w(xs))
    err = float(np.max(np.abs(approx - exact) / np.abs(exact)))
    return CheckResult(f"scale.closed_vs_numeric{_tag(model, q)}", 0.0, err, Relative(tol), err <= tol,
                       f"anchor: contour inversion of 1/(psi - q); sup rel err over 50 points in (0, 10] = {err:.2e}")


def check_ratio_order(ctx, model, q):
    key = f"scale.ratio_order{_tag(model, q)}"
    sf = scale_functions(model, q)
    rng = ctx.rng(key)
    a = rng.uniform(0.05, 8.0, 200)
    y = a * rng.uniform(0.0, 1.0, 200)
    gap = np.asarray(sf.wbar(y)) / np.asarray(sf.wbar(a)) - np.asarray(sf.w(y)) / np.asarray(sf.w(a))
    worst = float(np.max(gap))
    return CheckResult(key, 0.0, worst, Absolute(1e-12), worst <= 1e-12,
                       "anchor: Wbar(y)/Wbar(a) <= W(y)/W(a) for 0 <= y <= a; 200 random pairs")


def check_ratio_limit(ctx, model, q):
    sf = scale_functions(model, q)
    phi_q = big_phi(model, q)
    a_top = 50.0 / phi_q
    grid = np.linspace(a_top / 400, a_top, 400)
    ratio = np.asarray(sf.w(grid)) / np.asarray(sf.w_prime(grid))
    mono = bool(np.all(np.diff(ratio) >= -1e-12 * np.abs(ratio[1:])))
    end = float(sf.w(a_top) / sf.w_prime(a_top))
    err = _rel_err(end, 1.0 / phi_q)
    return CheckResult(f"scale.ratio_limit{_tag(model, q)}", 1.0 / phi_q, end, Relative(1e-4), mono and err <= 1e-4,
                       f"anchor: W/W' increasing with limit 1/Phi(q); monotone={mono}, rel err at 50/Phi = {err:.2e}")


def check_derivative_fd(ctx, model, q):
    key = f"scale.derivative_fd{_tag(model, q)}"
    sf = scale_functions(model, q)
    xs = ctx.rng(key).uniform(0.05, 8.0, 100)
    h = 1e-5 * np.maximum(1.0, xs)
    fd = (np.asarray(sf.w(xs + h)) - np.asarray(sf.w(xs - h))) / (2 * h)
    exact = np.array([w_derivatives(model, q, x, 1) for x in xs])
    err = float(np.max(np.abs(fd - exact) / np.abs(exact)))
    return CheckResult(key, 0.0, err, Relative(1e-6), err <= 1e-6,
                       f"anchor: W' against central differences at 100 random points; max rel err {err:.2e}")


def check_z_identity(ctx, model, q):
    sf = scale_functions(model, q)
    xs = np.linspace(0.25, 6.0, 24)
    exact_z = bool(np.all(np.asarray(sf.z(xs)) == 1.0 + q * np.asarray(sf.wbar(xs))))
    worst = 0.0
    for x in xs[::4]:
        val, _ = quad(sf.w, 0.0, x, epsabs=1e-13, epsrel=1e-12, limit=200)
        worst = max(worst, abs(val - sf.wbar(x)) / max(1.0, abs(val)))
    return CheckResult(f"scale.z_identity{_tag(model, q)}", 0.0, worst, Absolute(1e-8), exact_z and worst <= 1e-8,
                       f"anchor: Z = 1 + q Wbar; exact={exact_z}, Wbar vs quadrature of W max err {worst:.2e}")


# -------------------------------------------------------------------- exit


def check_exit_range(ctx, model, q):
    a = DESK_A
    ys = np.linspace(0.0, a, 41)
    up = np.array([exits.exit_up_transform(model, q, y, a) for y in ys])
    inf_ = np.array([exits.reflected_at_infimum_entrance(model, q, y, a) for y in ys])
    sup = np.array([exits.reflected_at_supremum_entrance(model, q, y, a) for y in ys])
    vals = np.concatenate([up, inf_, sup])
    in_range = bool(np.all((vals >= -1e-14) & (vals <= 1 + 1e-14)))
    # all three increase in y: the start moves towards the exit
    mono = bool(np.all(np.diff(np.stack([up, inf_, sup]), axis=1) >= -1e-14))
    return CheckResult(f"exit.range_monotone{_tag(model, q)}", 1.0, float(vals.max()), Absolute(1e-14),
                       in_range and mono,
                       f"anchor: two-sided exit and reflected entrance transforms; in [0,1]={in_range}, monotone={mono}")


def check_corner_recursion(ctx, model, q):
    a = DESK_A
    sf = scale_functions(model, q)
    v = policies.ClassicalBarrierValue(model, q, a)
    h0 = exits.reflected_at_supremum_entrance(model, q, 0.0, a)
    fa = v(a) / (1.0 - h0 / sf.z(a))
    worst = 0.0
    for x in np.linspace(0.0, a, 11):
        f = v(x) + exits.reflected_at_supremum_entrance(model, q, a - x, a) * fa / sf.z(a)
        worst = max(worst, _rel_err(f, policies.dividends_doubly(model, q, a, x)))
    return CheckResult(f"exit.corner_recursion{_tag(model, q)}", 0.0, worst, Relative(1e-10), worst <= 1e-10,
                       "anchor: strong-Markov recursion through the reflected entrance transforms "
                       f"reproduces the doubly reflected dividends; max rel err {worst:.2e}")


def check_potential_mass(ctx, model):
    key = f"exit.potential_mass{_tag(model)}"
    rng = ctx.rng(key)
    worst = 0.0
    for _ in range(20):
        q = float(rng.uniform(0.05, 2.0))
        a = float(rng.uniform(0.5, 4.0))
        x = float(rng.uniform(0.0, a))
        pd = exits.doubly_reflected_potential(model, q, a, x)
        mass = pd.total_mass(tol=1e-11)
        worst = max(worst, abs(mass - 1.0 / q) * q)
    return CheckResult(key, 0.0, worst, Relative(1e-6), worst <= 1e-6,
                       "anchor: q-potential measure of the doubly reflected process has mass 1/q; "
                       f"20 random (x, a, q), max rel err {worst:.2e}")


def _mc_check(ctx, key, target, run, k=3.0, anchor=""):
    """Run ``run(cfg) -> MCEstimate``; retry once with a derived seed and
    twice the paths when the first attempt misses."""
    cfg = ctx.cfg.replace(seed=ctx.seed_for(key))
    est = run(cfg)
    note = ""
    if not est.within(target, k):
        first = est
        cfg = cfg.replace(seed=ctx.seed_for(key, 1), n_paths=2 * cfg.n_paths)
        est = run(cfg)
        note = f"; retried after z={first.zscore(target):.2f} with {cfg.n_paths} paths"
    return CheckResult(
        key, target, est.mean, StdErr(k), est.within(target, k),
        f"{anchor}; mean={est.mean!r} se={est.stderr:.3e} trunc={est.truncation_bound:.2e} "
        f"n={est.n} z={est.zscore(target):.2f}{note}",
    )


def _mc_cfg(ctx, model, cfg):
    if model.variation.bounded:
        return cfg.replace(scheme=Scheme.EVENT)
    # keep the retry doubling when the Euler path count is capped
    boost = max(1, cfg.n_paths // ctx.cfg.n_paths)
    return cfg.replace(scheme=Scheme.EULER, n_paths=min(cfg.n_paths, boost * ctx.euler_paths), dt=ctx.euler_dt)


def _mc_models(ctx):
    """Models with a Monte Carlo oracle: bounded variation (exact) and the
    Brownian family (bridge-corrected Euler)."""
    if not ctx.monte_carlo:
        return []
    return [m for m in ctx.models if m.variation.bounded or isinstance(m, BrownianDrift)]


_EXIT_CASES = [
    ("up_cross_first", Estimand.UP_CROSS_FIRST, 1.0,
     lambda m, q, y: exits.exit_up_transform(m, q, y, DESK_A), "two-sided exit upward first"),
    ("reflected_inf_entrance", Estimand.REFLECTED_INF_ENTRANCE, 0.5,
     lambda m, q, y: exits.reflected_at_infimum_entrance(m, q, y, DESK_A), "entrance time of X - I"),
    ("reflected_sup_entrance", Estimand.REFLECTED_SUP_ENTRANCE, 1.0,
     lambda m, q, y: exits.reflected_at_supremum_entrance(m, q, y, DESK_A), "entrance time of S - X"),
    ("overshoot_reflected", Estimand.OVERSHOOT_REFLECTED, 1.0,
     lambda m, q, y: exits.overshoot_reflected(m, q, y, DESK_A), "discounted position at ruin under a barrier"),
    ("overshoot_ruin", Estimand.OVERSHOOT_RUIN, 1.0,
     lambda m, q, y: exits.overshoot_ruin(m, q, y), "discounted position at first passage below zero"),
]


def check_exit_mc(ctx, model, name):
    q = _desk_q(ctx)
    _, est, y, fn, anchor = next(c for c in _EXIT_CASES if c[0] == name)
    key = f"exit.mc.{name}{_tag(model, q)}"
    horizon = ctx.cfg.horizon if model.variation.bounded else min(ctx.cfg.horizon, 100.0)
    return _mc_check(
        ctx, key, fn(model, q, y),
        lambda cfg: simulate_exit_functionals(model, y, DESK_A, q,
                                              _mc_cfg(ctx, model, cfg).replace(horizon=horizon), est),
        anchor=f"anchor: {anchor}, start {y:g}, a={DESK_A:g}",
    )


# ------------------------------------------------------------------ policy


def _grid(lo, hi, n):
    return np.linspace(lo, hi, n)


def check_bailout_consistency(ctx, model, q):
    a = DESK_A
    worst = 0.0
    for x in _grid(0.0, a + 1.0, 16):
        rep = policies.bailout_barrier_value(model, q, DESK_PHI, a, x)
        comb = rep.dividends - DESK_PHI * rep.injections_cost
        worst = max(worst, abs(rep.value - comb) / max(1.0, abs(rep.value)))
    return CheckResult(f"policy.bailout_consistency{_tag(model, q)}", 0.0, worst, Relative(1e-12), worst <= 1e-12,
                       f"anchor: bail-out value = dividends - phi * injections; max err {worst:.2e}")


def check_slope_below_c(ctx, model, q):
    c = optimal_classical_barrier(model, q).level
    key = f"policy.slope_below_c{_tag(model, q)}"
    if c == 0:
        return CheckResult(key, 1.0, 1.0, Absolute(1e-6), True, "anchor: v' >= 1 below c*; c* = 0, vacuous")
    v = policies.ClassicalBarrierValue(model, q, c)
    xs = _grid(c / 200, c * (1 - 1 / 200), 100)
    h = 1e-6 * max(1.0, c)
    slope = (np.asarray(v(xs + h)) - np.asarray(v(xs - h))) / (2 * h)
    low = float(slope.min())
    return CheckResult(key, 1.0, low, Absolute(1e-6), low >= 1.0 - 1e-6,
                       f"anchor: v_c*' >= 1 on (0, c*); min finite-difference slope {low!r}")


def check_slope_band(ctx, model, q):
    key = f"policy.slope_band{_tag(model, q)}"
    phi = DESK_PHI
    d = optimal_bailout_barrier(model, q, phi).level
    try:
        v = policies.BailoutBarrierValue(model, q, phi, d)
    except UnsupportedOperation as exc:
        return CheckResult(key, 1.0, math.nan, Absolute(1e-6), False, str(exc))
    xs = _grid(1e-4, d + 5.0, 300)
    xs = xs[np.abs(xs - d) > 1e-9]
    slope = np.asarray(v.derivative(xs, 1))
    band = bool(np.all((slope >= 1 - 1e-9) & (slope <= phi + 1e-9)))
    top_ok = True
    if d > 0:
        top_ok = abs(v.derivative(d, 1) - 1.0) <= 1e-6
    s0 = float(v.derivative(0.0, 1))
    if model.variation.bounded:
        bottom_ok = s0 < phi
    else:
        bottom_ok = abs(s0 - phi) <= 1e-6
    ok = band and top_ok and bottom_ok
    return CheckResult(key, 1.0, float(slope.min()), Absolute(1e-6), ok,
                       f"anchor: 1 <= vbar' <= phi; band={band}, vbar'(d*-)=1: {top_ok}, vbar'(0+) = {s0!r} ({bottom_ok})")


def check_monotone_in_a(ctx, model, q):
    phi = DESK_PHI
    d = optimal_bailout_barrier(model, q, phi).level
    worst = -math.inf
    for x in (0.0, 0.5, 1.0, 3.0):
        vals = [policies.BailoutBarrierValue(model, q, phi, a)(x) for a in _grid(d + 0.05, d + 4.0, 40)]
        worst = max(worst, float(np.max(np.diff(vals))))
    return CheckResult(f"policy.monotone_in_a{_tag(model, q)}", 0.0, worst, Absolute(1e-12), worst <= 1e-12,
                       f"anchor: a -> vbar_a(x) nonincreasing for a > d*; max increment {worst:.2e}")


def check_concavity(ctx, model, q):
    phi = DESK_PHI
    d = optimal_bailout_barrier(model, q, phi).level
    v = policies.BailoutBarrierValue(model, q, phi, d)
    xs = _grid(0.0, d + 4.0, 401)
    second = np.diff(np.asarray(v(xs)), 2)
    worst = float(second.max())
    return CheckResult(f"policy.concavity{_tag(model, q)}", 0.0, worst, Absolute(1e-10), worst <= 1e-10,
                       f"anchor: vbar_d* is concave; max second difference {worst:.2e}")


def check_dominance_classical(ctx, model, q):
    key = f"policy.dominance_classical{_tag(model, q)}"
    c = optimal_classical_barrier(model, q).level
    best = policies.ClassicalBarrierValue(model, q, c)
    rng = ctx.rng(key)
    xs = _grid(0.0, c, 21) if c > 0 else np.array([0.0])
    worst = -math.inf
    for a in rng.uniform(0.0, 3.0 * max(c, 1.0), 50):
        gap = np.asarray(policies.ClassicalBarrierValue(model, q, a)(xs)) - np.asarray(best(xs))
        worst = max(worst, float(np.max(gap)))
    return CheckResult(key, 0.0, worst, Absolute(1e-10), worst <= 1e-10,
                       f"anchor: barrier c* dominates every barrier on [0, c*]; max excess {worst:.2e}")


def check_dominance_bailout(ctx, model, q):
    key = f"policy.dominance_bailout{_tag(model, q)}"
    phi = DESK_PHI
    d = optimal_bailout_barrier(model, q, phi).level
    best = policies.BailoutBarrierValue(model, q, phi, d)
    rng = ctx.rng(key)
    worst = -math.inf
    for x, a in zip(rng.uniform(0.0, 6.0, 50), rng.uniform(0.0, 3.0 * max(d, 1.0), 50)):
        worst = max(worst, policies.BailoutBarrierValue(model, q, phi, a)(x) - best(x))
    return CheckResult(key, 0.0, worst, Absolute(1e-10), worst <= 1e-10,
                       f"anchor: barrier d* dominates every double barrier; max excess {worst:.2e}")


def _doubly_run(ctx, model, q, cfg):
    key = ("doubly", model, q, cfg)
    if key not in ctx.cache:
        ctx.cache[key] = simulate_doubly_reflected(model, DESK_A, 1.0, q, _mc_cfg(ctx, model, cfg))
    return ctx.cache[key]


def _horizon_cfg(ctx, model, cfg):
    return cfg if model.variation.bounded else cfg.replace(horizon=min(cfg.horizon, 100.0))


def check_prop1_mc(ctx, model):
    q = _desk_q(ctx)
    target = policies.classical_barrier_value(model, q, DESK_A, 1.0)
    return _mc_check(
        ctx, f"policy.mc.barrier_dividends{_tag(model, q)}", target,
        lambda cfg: simulate_reflected_barrier(model, DESK_A, 1.0, q,
                                               _mc_cfg(ctx, model, _horizon_cfg(ctx, model, cfg))).dividends,
        anchor="anchor: dividends until ruin under a barrier = W(x)/W'(a)",
    )


def check_doubly_mc(ctx, model, part):
    q = _desk_q(ctx)
    if part == "dividends":
        target = policies.dividends_doubly(model, q, DESK_A, 1.0)
        anchor = "anchor: doubly reflected dividends Z(x)/(q W(a))"
    else:
        target = policies.injections_doubly(model, q, DESK_A, 1.0)
        anchor = "anchor: doubly reflected injections"
    return _mc_check(
        ctx, f"policy.mc.doubly_{part}{_tag(model, q)}", target,
        lambda cfg: getattr(_doubly_run(ctx, model, q, _horizon_cfg(ctx, model, cfg)), part),
        anchor=anchor,
    )


def check_zero_barrier_mc(ctx, model):
    q = _desk_q(ctx)
    d = model.variation.drift
    target = d / (q + model.jump_mass)
    return _mc_check(
        ctx, f"policy.mc.zero_barrier{_tag(model, q)}", target,
        lambda cfg: simulate_reflected_barrier(model, 0.0, 0.0, q, cfg.replace(scheme=Scheme.EVENT)).dividends,
        anchor="anchor: a = 0 barrier from x = 0 pays d/(q + nu(-inf,0))",
    )


def check_zero_doubly_mc(ctx, model, part):
    q = _desk_q(ctx)
    d = model.variation.drift
    target = d / q if part == "dividends" else (d - model.psi_prime_zero) / q
    return _mc_check(
        ctx, f"policy.mc.zero_doubly_{part}{_tag(model, q)}", target,
        lambda cfg: getattr(simulate_doubly_reflected(model, 0.0, 0.0, q,
                                                      cfg.replace(scheme=Scheme.EVENT, n_paths=max(cfg.n_paths // 4, 1000))),
                            part),
        anchor="anchor: a = 0 double barrier pays d/q and injects (d - psi'(0+))/q",
    )


# ----------------------------------------------------------------- barrier


def check_c_closed_vs_generic(ctx, model, q):
    key = f"barrier.c_closed_vs_generic{_tag(model, q)}"
    try:
        sol = optimal_classical_barrier(model, q)
    except ConsistencyError as exc:
        a, b = exc.values
        return CheckResult(key, a, b, Relative(1e-8), False, f"closed form and generic disagree: {exc}")
    generic = sol.cross_check if sol.cross_check is not None else classical_barrier_generic(model, q)
    err = abs(generic - sol.level) / max(1.0, sol.level)
    return CheckResult(key, sol.level, generic, Relative(1e-8), err <= 1e-8,
                       f"anchor: c* closed form vs golden-section minimiser of W'; method={sol.method.value}, "
                       f"closed={sol.level!r}, generic={generic!r}")


def check_minimizer(ctx, model, q):
    key = f"barrier.minimizer{_tag(model, q)}"
    sf = scale_functions(model, q)
    c = optimal_classical_barrier(model, q).level
    base = sf.w_prime(c)
    pts = ctx.rng(key).uniform(0.0, 3.0 * max(c, 1.0), 200)
    worst = float(np.max(base - np.asarray(sf.w_prime(pts))))
    tol = 1e-10 * max(1.0, base)
    return CheckResult(key, base, base - worst, Absolute(tol), worst <= tol,
                       f"anchor: c* is a global minimiser of W'; W'(c*) = {base!r}")


def check_w2_at_c(ctx, model, q):
    key = f"barrier.w2_at_c{_tag(model, q)}"
    sf = scale_functions(model, q)
    c = optimal_classical_barrier(model, q).level
    if c == 0:
        return CheckResult(key, 0.0, 0.0, Relative(1e-8), True, "anchor: W''(c*) = 0; c* = 0, not applicable")
    scale = float(np.max(np.abs(np.asarray(sf.derivative(_grid(c / 4, 2 * c, 50), 2)))))
    val = float(sf.derivative(c, 2))
    return CheckResult(key, 0.0, val, Relative(1e-8), abs(val) <= 1e-8 * scale,
                       f"anchor: W''(c*) = 0 for C2 scale functions; |W''| scale {scale:.3e}")


def check_brownian_ratio(ctx, model, q):
    sf = scale_functions(model, q)
    c = optimal_classical_barrier(model, q).level
    ratio = sf.w(c) / sf.w_prime(c)
    target = model.mu / q
    err = _rel_err(ratio, target)
    return CheckResult(f"barrier.brownian_ratio{_tag(model, q)}", target, ratio, Relative(1e-10), err <= 1e-10,
                       f"anchor: W(c*)/W'(c*) = mu/q for Brownian motion with drift; rel err {err:.2e}")


def check_cl_dichotomy(ctx, model, q):
    """20 premium rates straddling the boundary p lambda mu = (q + lambda)^2."""
    lam, mu = model.lam, model.mu_rate
    p_crit = (q + lam) ** 2 / (lam * mu)
    ok = True
    worst = 0.0
    n_pos = 0
    for f in np.concatenate([np.linspace(0.6, 1.0, 10), np.linspace(1.05, 3.0, 10)]):
        m = CramerLundbergExp(max(p_crit * f, lam / mu * 1.0001), lam, mu)
        sol = optimal_classical_barrier(m, q)
        zero_expected = m.p * lam * mu <= (q + lam) ** 2
        if zero_expected:
            ok &= sol.level == 0.0
        else:
            n_pos += 1
            generic = classical_barrier_generic(m, q)
            err = abs(generic - sol.level) / max(1.0, sol.level)
            worst = max(worst, err)
            ok &= sol.level > 0 and err <= 1e-8
    return CheckResult(f"barrier.cl_dichotomy{_tag(model, q)}", 0.0, worst, Relative(1e-8), bool(ok),
                       f"anchor: c* = 0 iff p lambda mu <= (q+lambda)^2; 20 cases, {n_pos} positive, "
                       f"max generic-vs-closed rel err {worst:.2e}")


def check_zero_condition_grid(ctx, model, q):
    """Zero condition of d* on a 20-case grid of (lambda, phi)."""
    ok = True
    n_zero = 0
    for lam in (0.05, 0.15, 0.3, 0.6, 1.2):
        for phi in (1.25, 1.5, 2.5, 4.0):
            m = CramerLundbergExp(model.p, lam, model.mu_rate) if isinstance(model, CramerLundbergExp) else \
                HyperExpJumpDiffusion(model.mu, 0.0, lam, model.weights, model.rates)
            sol = optimal_bailout_barrier(m, q, phi)
            zero = lam <= q / (phi - 1)
            n_zero += zero
            ok &= (sol.level == 0.0) == zero
            if not zero:
                ok &= abs(sol.criterion_residual) <= 1e-9 * abs(sol.reference)
    return CheckResult(f"barrier.zero_condition_grid{_tag(model, q)}", float(n_zero), float(n_zero), Absolute(0), bool(ok),
                       f"anchor: d* = 0 iff sigma = 0 and nu(-inf,0) <= q/(phi-1); 20 cases, {n_zero} zero")


def check_d_residual(ctx, model, q):
    key = f"barrier.d_residual{_tag(model, q)}"
    sol = optimal_bailout_barrier(model, q, DESK_PHI)
    if sol.level == 0:
        return CheckResult(key, 0.0, 0.0, Relative(1e-9), True, f"anchor: G(d*) = 0; d* = 0 ({sol.reason})")
    ref = abs(sol.reference)
    return CheckResult(key, 0.0, sol.criterion_residual, Relative(1e-9), abs(sol.criterion_residual) <= 1e-9 * ref,
                       f"anchor: G(d*) = 0 relative to G(0+) = {sol.reference!r}; d* = {sol.level!r}")


def check_f_sign(ctx, model, q):
    key = f"barrier.f_sign{_tag(model, q)}"
    d = optimal_bailout_barrier(model, q, DESK_PHI).level
    if d == 0:
        xs = _grid(0.01, 5.0, 100)
        f = np.asarray(bailout_ratio(model, q, DESK_PHI, xs))
        ok = bool(np.all(f <= 1e-12))
        return CheckResult(key, 0.0, float(f.max()), Absolute(1e-12), ok, "anchor: F <= 0 everywhere when d* = 0")
    xs = _grid(d / 50, 3.0 * d, 100)
    xs = xs[np.abs(xs - d) > 1e-9 * d]
    f = np.asarray(bailout_ratio(model, q, DESK_PHI, xs))
    below, above = f[xs < d], f[xs > d]
    ok = bool(np.all(below > 0) and np.all(above <= 0))
    return CheckResult(key, 0.0, float(bailout_ratio(model, q, DESK_PHI, d)), Absolute(1e-12), ok,
                       f"anchor: F > 0 below d* and F <= 0 above; {below.size} + {above.size} grid points")


def check_argmax(ctx, model, q):
    d = optimal_bailout_barrier(model, q, DESK_PHI).level
    a_grid = _grid(0.0, 3.0 * max(d, 1.0), 301)
    step = a_grid[1] - a_grid[0]
    ok = True
    worst = 0.0
    for x in (0.0, 0.5 * max(d, 1.0), 2.0 * max(d, 1.0)):
        vals = np.array([policies.BailoutBarrierValue(model, q, DESK_PHI, a)(x) if a > 0 or model.variation.bounded
                         else -math.inf for a in a_grid])
        top = vals.max()
        arg = a_grid[int(np.argmax(vals >= top - 1e-12 * abs(top)))]
        worst = max(worst, abs(arg - d))
        ok &= abs(arg - d) <= step and top <= policies.BailoutBarrierValue(model, q, DESK_PHI, d)(x) + 1e-10
    return CheckResult(f"barrier.argmax{_tag(model, q)}", d, d + worst, Absolute(step), bool(ok),
                       f"anchor: d* maximises a -> vbar_a(x); grid step {step:.3g}")


def check_hjb_classical(ctx, model, q):
    key = f"barrier.hjb_classical{_tag(model, q)}"
    rep = verify_hjb_classical(model, q, x_max=20.0, n_grid=200)
    ok = rep.condition_holds and rep.interior_ok and rep.slope_ok
    return CheckResult(key, 0.0, rep.max_violation, Absolute(rep.tolerance), ok,
                       f"anchor: (Gamma - q) v_c* = 0 below c* and <= 0 above; interior max |res| "
                       f"{rep.interior_max_abs:.2e}, c* = {rep.barrier!r}")


def check_hjb_bailout(ctx, model, q):
    key = f"barrier.hjb_bailout{_tag(model, q)}"
    rep = verify_hjb_bailout(model, q, DESK_PHI, x_max=20.0, n_grid=200)
    ok = rep.condition_holds and rep.interior_ok and rep.slope_ok
    return CheckResult(key, 0.0, rep.max_violation, Absolute(rep.tolerance), ok,
                       f"anchor: (Gamma - q) vbar_d* = 0 below d* and <= 0 above; interior max |res| "
                       f"{rep.interior_max_abs:.2e}, d* = {rep.barrier!r}")


# --------------------------------------------------------------- simulator


def _path_cfg(ctx, model, key):
    cfg = ctx.cfg.replace(seed=ctx.seed_for(key), horizon=20.0)
    return _mc_cfg(ctx, model, cfg)


def check_path_box(ctx, model):
    key = f"simulator.path_box{_tag(model)}"
    q = _desk_q(ctx)
    cfg = _path_cfg(ctx, model, key)
    paths = sample_paths(model, DESK_A, 1.0, q, cfg, n=200 if cfg.scheme is Scheme.EVENT else 20)
    levels = np.array([v for p in paths for e in p.events for v in (e.post_level,)] or [1.0])
    lo, hi = float(levels.min()), float(levels.max())
    ok = lo >= 0.0 and hi <= DESK_A
    return CheckResult(key, DESK_A, hi, Absolute(0), ok,
                       f"anchor: doubly reflected paths stay in [0, a]; post-regulation range [{lo!r}, {hi!r}]")


def check_slackness(ctx, model):
    key = f"simulator.slackness{_tag(model)}"
    q = _desk_q(ctx)
    cfg = _path_cfg(ctx, model, key)
    paths = sample_paths(model, DESK_A, 1.0, q, cfg, n=200 if cfg.scheme is Scheme.EVENT else 20)
    bad = 0
    count = 0
    for p in paths:
        for e in p.events:
            if e.dL > 0:
                count += 1
                bad += e.pre_level < DESK_A - 1e-12
            if e.dR > 0:
                count += 1
                bad += e.pre_level > 1e-12
    return CheckResult(key, 0.0, float(bad), Absolute(0), bad == 0,
                       f"anchor: dL acts only at a, dR only at 0; {count} regulation events checked")


def check_reproducibility(ctx, model):
    key = f"simulator.reproducibility{_tag(model)}"
    q = _desk_q(ctx)
    cfg = _mc_cfg(ctx, model, ctx.cfg.replace(seed=ctx.seed_for(key), n_paths=3000, horizon=20.0))
    with warnings.catch_warnings():
        # a short horizon is enough to compare two runs bit for bit
        warnings.simplefilter("ignore", RuntimeWarning)
        one = simulate_doubly_reflected(model, DESK_A, 1.0, q, cfg)
        two = simulate_doubly_reflected(model, DESK_A, 1.0, q, cfg.replace(workers=3))
    ok = one == two
    return CheckResult(key, one.dividends.mean, two.dividends.mean, Absolute(0), ok,
                       "anchor: identical seeds give identical estimates for any worker count")


def check_euler_vs_event(ctx, model):
    key = f"simulator.euler_vs_event{_tag(model)}"
    q = _desk_q(ctx)
    base = ctx.cfg.replace(seed=ctx.seed_for(key), n_paths=min(ctx.cfg.n_paths, ctx.euler_paths))
    ev = simulate_reflected_barrier(model, DESK_A, 1.0, q, base.replace(scheme=Scheme.EVENT)).dividends
    eu = simulate_reflected_barrier(model, DESK_A, 1.0, q,
                                    base.replace(scheme=Scheme.EULER, dt=ctx.euler_dt)).dividends
    se = math.hypot(ev.stderr, eu.stderr)
    gap = abs(ev.mean - eu.mean)
    return CheckResult(key, ev.mean, eu.mean, StdErr(3), gap <= 3 * se + ev.truncation_bound,
                       f"anchor: Euler and exact simulation agree on barrier dividends; dt={ctx.euler_dt:g}, "
                       f"combined se {se:.3e}, gap {gap:.3e}")


def check_occupation(ctx, model):
    key = f"simulator.occupation_shape{_tag(model)}"
    q = _desk_q(ctx)
    cfg = ctx.cfg.replace(seed=ctx.seed_for(key), n_paths=max(ctx.cfg.n_paths // 4, 2000), scheme=Scheme.EVENT)
    occ = simulate_occupation(model, DESK_A, 1.0, q, cfg, n_bins=20)
    pd = exits.doubly_reflected_potential(model, q, DESK_A, 1.0)
    exact = np.array([quad(pd.density, lo, hi, epsabs=1e-12)[0] / (hi - lo)
                      for lo, hi in zip(occ.edges[:-1], occ.edges[1:])])
    mass_mc = occ.atom.mean + float(np.sum(occ.density * np.diff(occ.edges)))
    mass_ex = pd.atom + float(np.sum(exact * np.diff(occ.edges)))
    err = float(np.max(np.abs(occ.density / mass_mc - exact / mass_ex) / (exact / mass_ex)))
    atom_z = occ.atom.zscore(pd.atom)
    ok = err <= 0.05 and atom_z <= 3
    return CheckResult(key, 0.0, err, Relative(0.05), ok,
                       f"anchor: occupation histogram vs q-potential density; 20 bins, sup rel err {err:.3e}, "
                       f"atom at a: MC {occ.atom.mean!r} vs {pd.atom!r} (z={atom_z:.2f})")


def check_stable_sampler(ctx, part):
    key = f"simulator.stable_increment.{part}"
    rng = ctx.rng(key)
    n = 1_000_000
    if part == "alpha2_mean":
        x = sample_stable_increment(2.0, 1.0, 0.01, rng, n)
        se = x.std(ddof=1) / math.sqrt(n)
        var_ok = abs(x.var() - 0.02) <= 0.02 * 0.01
        return CheckResult(key, 0.0, float(x.mean()), StdErr(4), abs(x.mean()) <= 4 * se and var_ok,
                           f"anchor: alpha = 2 gives N(0, 2 s^2 dt); variance {float(x.var())!r} vs 0.02")
    if part == "skewness":
        x = sample_stable_increment(1.5, 1.0, 0.01, rng, n)
        c = x - x.mean()
        skew = float(np.mean(c**3) / np.mean(c**2) ** 1.5)
        return CheckResult(key, 0.0, skew, Absolute(0), skew < 0, "anchor: no positive jumps, heavy left tail")
    theta, dt = 0.5, 0.01
    x = sample_stable_increment(1.5, 1.0, dt, rng, n)
    e = np.exp(theta * x)
    target = math.exp(dt * theta**1.5)
    se = e.std(ddof=1) / math.sqrt(n)
    return CheckResult(key, target, float(e.mean()), StdErr(4), abs(e.mean() - target) <= 4 * se,
                       f"anchor: E exp(theta X_dt) = exp(dt psi(theta)); se {se:.3e}")


# ----------------------------------------------------------------- driver


def _plan(suite, ctx):
    """Zero-argument callables, one per check, for the requested suite."""
    out = []
    models, qs = ctx.models, ctx.q_list
    if suite in ("scale", "all"):
        for m in models:
            for q in qs:
                for fn in (check_laplace, check_closed_vs_numeric, check_ratio_order, check_ratio_limit,
                           check_derivative_fd, check_z_identity):
                    out.append(lambda fn=fn, m=m, q=q: fn(ctx, m, q))
    if suite in ("exit", "all"):
        for m in models:
            for q in qs:
                out.append(lambda m=m, q=q: check_exit_range(ctx, m, q))
                out.append(lambda m=m, q=q: check_corner_recursion(ctx, m, q))
            out.append(lambda m=m: check_potential_mass(ctx, m))
        for m in _mc_models(ctx):
            for name, *_ in _EXIT_CASES:
                out.append(lambda m=m, name=name: check_exit_mc(ctx, m, name))
    if suite in ("policy", "all"):
        for m in models:
            for q in qs:
                for fn in (check_bailout_consistency, check_slope_below_c, check_slope_band, check_monotone_in_a,
                           check_concavity, check_dominance_classical, check_dominance_bailout):
                    out.append(lambda fn=fn, m=m, q=q: fn(ctx, m, q))
        for m in _mc_models(ctx):
            out.append(lambda m=m: check_prop1_mc(ctx, m))
            out.append(lambda m=m: check_doubly_mc(ctx, m, "dividends"))
            out.append(lambda m=m: check_doubly_mc(ctx, m, "injections"))
            if m.variation.bounded:
                out.append(lambda m=m: check_zero_barrier_mc(ctx, m))
                out.append(lambda m=m: check_zero_doubly_mc(ctx, m, "dividends"))
                out.append(lambda m=m: check_zero_doubly_mc(ctx, m, "injections"))
    if suite in ("barrier", "all"):
        for m in models:
            for q in qs:
                for fn in (check_c_closed_vs_generic, check_minimizer, check_w2_at_c, check_d_residual,
                           check_f_sign, check_argmax):
                    out.append(lambda fn=fn, m=m, q=q: fn(ctx, m, q))
                if isinstance(m, BrownianDrift) and m.mu > 0:
                    out.append(lambda m=m, q=q: check_brownian_ratio(ctx, m, q))
                if isinstance(m, CramerLundbergExp):
                    out.append(lambda m=m, q=q: check_cl_dichotomy(ctx, m, q))
                if m.variation.bounded:
                    out.append(lambda m=m, q=q: check_zero_condition_grid(ctx, m, q))
                if _supports_generator(m):
                    out.append(lambda m=m, q=q: check_hjb_classical(ctx, m, q))
                    out.append(lambda m=m, q=q: check_hjb_bailout(ctx, m, q))
    if suite in ("simulator", "all"):
        for m in _mc_models(ctx):
            out.append(lambda m=m: check_path_box(ctx, m))
            out.append(lambda m=m: check_reproducibility(ctx, m))
            if m.variation.bounded:
                # the Euler log cannot show the within-step running extremes
                out.append(lambda m=m: check_slackness(ctx, m))
                out.append(lambda m=m: check_euler_vs_event(ctx, m))
                out.append(lambda m=m: check_occupation(ctx, m))
        for part in ("alpha2_mean", "skewness", "mgf") if ctx.monte_carlo else ():
            out.append(lambda part=part: check_stable_sampler(ctx, part))
    return out


def run_suite(suite_id: str = "all", models: list | None = None, q_list=None,
              cfg: SimConfig | None = None, euler_paths: int = 10_000,
              euler_dt: float = 1e-2, monte_carlo: bool = True) -> list:
    """Run a verification suite and return its results sorted by check_id.

    ``monte_carlo=False`` keeps only the deterministic checks.
    Infrastructure failures inside a check (for instance a nonconvergent
    inversion) are reported as failed results rather than raised.
    """
    if suite_id not in SUITES:
        raise ValueError(f"unknown suite {suite_id!r}; choose from {', '.join(SUITES)}")
    ctx = _Ctx(
        models=list(models) if models else default_models(),
        q_list=[float(q) for q in (q_list or (0.1, 1.0))],
        cfg=cfg or SimConfig(),
        euler_paths=int(euler_paths),
        euler_dt=float(euler_dt),
        monte_carlo=bool(monte_carlo),
    )
    results = []
    for i, thunk in enumerate(_plan(suite_id, ctx)):
        try:
            results.append(thunk())
        except (NumericalFailure, ConsistencyError, UnsupportedOperation, ValueError) as exc:
            results.append(CheckResult(f"error.{suite_id}.{i:03d}", math.nan, math.nan, "n/a", False,
                                       f"{type(exc).__name__}: {exc}"))
    return sorted(results, key=lambda r: r.check_id)


def report_json(results) -> str:
    return json.dumps([r.to_dict() for r in results], indent=2, sort_keys=True)
