"""Optimal barrier levels and numerical verification of the HJB conditions.

``c*`` (classical problem) is the smallest global minimiser of ``W'``;
``d*`` (bail-out problem) is the first zero of

    G(a) = [phi Z(a) - 1] W'(a) - phi q W(a)^2.

Closed forms are used where the family admits them, and a generic solver is
always run alongside as a cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .exceptions import ConsistencyError, DomainError, NumericalFailure, UnsupportedOperation
from .mittag_leffler import mittag_leffler
from .models import (
    BrownianDrift,
    CramerLundbergExp,
    HyperExpJumpDiffusion,
    LevyModel,
    StableSpectralNeg,
    phi as big_phi,
)
from .policies import BailoutBarrierValue, ClassicalBarrierValue
from .scale import cl_exp_roots, scale_functions

__all__ = [
    "Method",
    "BarrierSolution",
    "HjbReport",
    "optimal_classical_barrier",
    "optimal_bailout_barrier",
    "classical_barrier_generic",
    "bailout_criterion",
    "bailout_ratio",
    "stable_u",
    "stable_v",
    "generator_apply",
    "verify_hjb_classical",
    "verify_hjb_bailout",
]

CROSS_CHECK_RTOL = 1e-6
GRID_POINTS = 2001


class Method(str, Enum):
    CLOSED_FORM = "ClosedForm"
    GENERIC_MINIMIZE = "GenericMinimize"
    GENERIC_ROOT_FIND = "GenericRootFind"
    ZERO_BY_CONDITION = "ZeroByCondition"


@dataclass(frozen=True)
class BarrierSolution:
    """Optimal level with the value of its defining criterion.

    For ``c*`` the residual is ``W''(c*)`` (``W''(0+)`` when ``c* = 0``) where
    the second derivative exists; for ``d*`` it is ``G(d*)``.
    ``cross_check`` holds the level found by the independent generic solver.
    """

    level: float
    criterion_residual: float
    method: Method
    reason: str | None = None
    cross_check: float | None = None
    tolerance: float = 1e-12
    reference: float | None = None

    def to_dict(self):
        return {
            "level": self.level,
            "criterion_residual": self.criterion_residual,
            "method": self.method.value,
            "reason": self.reason,
            "cross_check": self.cross_check,
            "tolerance": self.tolerance,
        }


@dataclass(frozen=True)
class HjbReport:
    """Residuals ``(Gamma v - q v)(x)`` of a barrier value function.

    ``condition_holds`` is the verdict on the region above the barrier
    (residual must be nonpositive up to ``tolerance``); ``interior_ok``
    states that the residual vanishes below the barrier.
    """

    grid: np.ndarray
    residuals: np.ndarray
    barrier: float
    max_violation: float
    interior_max_abs: float
    tolerance: float
    condition_holds: bool
    interior_ok: bool
    slope_ok: bool = True

    def to_dict(self):
        return {
            "grid": [float(v) for v in self.grid],
            "residuals": [float(v) for v in self.residuals],
            "barrier": self.barrier,
            "max_violation": self.max_violation,
            "interior_max_abs": self.interior_max_abs,
            "tolerance": self.tolerance,
            "condition_holds": self.condition_holds,
            "interior_ok": self.interior_ok,
            "slope_ok": self.slope_ok,
        }

    def csv_rows(self):
        yield ("x", "residual")
        for x, r in zip(self.grid, self.residuals):
            yield (repr(float(x)), repr(float(r)))


def _check_q(q):
    if not q > 0:
        raise DomainError(f"q must be positive, got {q!r}")


# ----------------------------------------------------------- classical c*


def _brownian_c(model: BrownianDrift, q):
    if model.mu <= 0:
        return 0.0, "mu <= 0"
    s2 = model.sigma**2
    delta = math.sqrt(model.mu**2 + 2.0 * q * s2) / s2
    omega = model.mu / s2
    return math.log(abs((delta + omega) / (delta - omega))) / delta, None


def _cl_c(model: CramerLundbergExp, q):
    p, lam, mu = model.p, model.lam, model.mu_rate
    if p * lam * mu <= (q + lam) ** 2:
        return 0.0, "p*lambda*mu <= (q+lambda)^2"
    qp, qm = cl_exp_roots(model, q)
    ratio = qm**2 * (mu + qm) / (qp**2 * (mu + qp))
    return math.log(ratio) / (qp - qm), None


@lru_cache(maxsize=64)
def stable_u(alpha: float) -> float:
    """Positive root ``u(alpha)`` of
    ``(a-1)(a-2) E' + 3a(a-1) u E'' + a^2 u^2 E''' = 0`` (``E = E_alpha``)."""
    if alpha == 2.0:
        return 0.0

    def f(u):
        e1, e2, e3 = (mittag_leffler(alpha, u, k) for k in (1, 2, 3))
        return (alpha - 1) * (alpha - 2) * e1 + 3 * alpha * (alpha - 1) * u * e2 + alpha**2 * u * u * e3

    lo, hi = 1e-8, 1e-3
    while f(hi) < 0:
        lo, hi = hi, hi * 2.0
        if hi > 1e4:
            raise NumericalFailure("no sign change for u(alpha)", estimates=(lo, hi))
    return brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)


@lru_cache(maxsize=256)
def stable_v(alpha: float, phi: float) -> float:
    """Positive root ``v`` of
    ``phi a v E'^2 + [(a-1) E' + a v E''][1 - phi E] = 0``."""

    def f(v):
        e0, e1, e2 = (mittag_leffler(alpha, v, k) for k in (0, 1, 2))
        return phi * alpha * v * e1 * e1 + ((alpha - 1) * e1 + alpha * v * e2) * (1 - phi * e0)

    lo, hi = 0.0, 1e-3
    while f(hi) < 0:
        lo, hi = hi, hi * 2.0
        if hi > 1e4:
            raise NumericalFailure("no sign change for v(alpha)", estimates=(lo, hi))
    return brentq(f, max(lo, 1e-300), hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)


def _stable_c(model: StableSpectralNeg, q):
    if model.alpha == 2.0:
        return 0.0, "alpha = 2 (driftless Brownian motion)"
    u = stable_u(model.alpha)
    return model.sigma * q ** (-1.0 / model.alpha) * u ** (1.0 / model.alpha), None


def _hyperexp_c(model: HyperExpJumpDiffusion, q):
    sf = scale_functions(model, q)
    th, co = sf.roots, sf.coefs

    def w2(x):
        return float(np.sum(co * th**2 * np.exp(th * x)))

    # W'' is a finite exponential sum: scan for sign changes, then solve
    hi = 1.0
    while w2(hi) <= 0 or hi < 4.0 / big_phi(model, q):
        hi *= 2.0
    xs = np.linspace(0.0, hi, 4001)
    vals = np.array([w2(v) for v in xs])
    cands = [0.0]
    for i in range(len(xs) - 1):
        if vals[i] < 0 <= vals[i + 1]:
            cands.append(brentq(w2, xs[i], xs[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps))
    wp = [sf.w_prime(c) for c in cands]
    best = cands[int(np.argmin(wp))]
    return best, None if best > 0 else "W'(0+) is the infimum of W'"


def _closed_c(model, q):
    if isinstance(model, BrownianDrift):
        return _brownian_c(model, q)
    if isinstance(model, CramerLundbergExp):
        return _cl_c(model, q)
    if isinstance(model, StableSpectralNeg):
        return _stable_c(model, q)
    if isinstance(model, HyperExpJumpDiffusion):
        return _hyperexp_c(model, q)
    return None


def classical_barrier_generic(model: LevyModel, q: float, method: str = "closed") -> float:
    """Global minimiser of ``W'`` by grid scan and golden-section search,
    polished by bisection on ``W''`` when it is available."""
    sf = scale_functions(model, q, method=method)
    smooth = method == "closed"
    phi_q = big_phi(model, q)
    hi = max(4.0 / phi_q, 1.0)

    def wp(x):
        return np.asarray(sf.derivative(np.asarray(x, dtype=float), 1), dtype=float)

    while True:
        xs = np.linspace(0.0, hi, GRID_POINTS)
        xs[0] = 0.0
        vals = wp(xs)
        vals[0] = sf.w_prime(0.0)
        i = int(np.argmin(vals))
        if i < GRID_POINTS - 1 and vals[-1] > 2.0 * vals[i]:
            break
        hi *= 2.0
        if hi > 1e6:
            raise NumericalFailure("W' does not grow: no finite minimiser found", estimates=(hi,))
    if i == 0:
        # the infimum sits at 0+ unless W' dips below W'(0+) inside the first cell
        if not smooth or sf.derivative(xs[1] * 1e-3, 2) >= 0:
            return 0.0
    lo_x, hi_x = xs[max(i - 1, 0)], xs[min(i + 1, GRID_POINTS - 1)]
    res = minimize_scalar(lambda v: float(wp(v)), bounds=(lo_x, hi_x), method="bounded",
                          options={"xatol": 1e-12})
    x0 = float(res.x)
    if not smooth:
        return x0
    # W'' changes sign from - to + at the minimiser
    step = max(1e-6, 1e-6 * x0)
    a, b = max(x0 - step, 0.0), x0 + step
    while sf.derivative(a, 2) > 0 and a > 0:
        a = max(a - 2 * step, 0.0)
        step *= 2
    while sf.derivative(b, 2) < 0:
        b += 2 * step
        step *= 2
    if sf.derivative(a, 2) > 0:
        return 0.0
    return brentq(lambda v: float(sf.derivative(v, 2)), a, b, xtol=1e-14, rtol=4 * np.finfo(float).eps)


def _agree(u, v, rtol=CROSS_CHECK_RTOL):
    return abs(u - v) <= rtol * max(1.0, abs(u), abs(v))


def optimal_classical_barrier(model: LevyModel, q: float, cross_check: bool = True,
                              method: str = "closed") -> BarrierSolution:
    """``c* = inf{a > 0 : W'(a) <= W'(x) for all x}``.

    Raises ConsistencyError when the closed form and the generic search
    disagree by more than 1e-6 relative.
    """
    _check_q(q)
    closed = _closed_c(model, q) if method == "closed" else None
    generic = classical_barrier_generic(model, q, method) if (cross_check or closed is None) else None
    sf = scale_functions(model, q, method=method)
    if closed is not None:
        level, reason = closed
        if generic is not None and not _agree(level, generic):
            raise ConsistencyError(
                f"closed-form c* = {level!r} disagrees with generic minimiser {generic!r}",
                values=(level, generic),
            )
        kind = Method.CLOSED_FORM
    else:
        level, reason, kind = generic, None, Method.GENERIC_MINIMIZE
    residual = float(sf.derivative(level, 2)) if method == "closed" else 0.0
    if level == 0.0 and math.isinf(sf.w_prime(0.0)):
        residual = math.inf
    return BarrierSolution(level=float(level), criterion_residual=residual, method=kind,
                           reason=reason, cross_check=generic)


# ------------------------------------------------------------ bail-out d*


def bailout_criterion(model: LevyModel, q: float, phi: float, a):
    """``G(a) = [phi Z(a) - 1] W'(a) - phi q W(a)^2`` (right limit at 0)."""
    sf = scale_functions(model, q)
    a = np.asarray(a, dtype=float)
    out = (phi * sf.z(a) - 1.0) * sf.w_prime(a) - phi * q * np.asarray(sf.w(a)) ** 2
    out = np.asarray(out, dtype=float)
    return float(out) if out.ndim == 0 else out


def bailout_ratio(model: LevyModel, q: float, phi: float, a):
    """``F(a) = G(a) / (q W(a)^2) = [phi H(a) - 1] W'(a) / (q W(a)^2)``; same
    sign as ``G`` and free of exponential growth."""
    sf = scale_functions(model, q)
    a = np.asarray(a, dtype=float)
    w = np.asarray(sf.w(a))
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (phi * sf.z(a) - 1.0) * sf.w_prime(a) / (q * w * w) - phi
    out = np.asarray(out, dtype=float)
    return float(out) if out.ndim == 0 else out


def optimal_bailout_barrier(model: LevyModel, q: float, phi: float) -> BarrierSolution:
    """First ``a > 0`` with ``G(a) <= 0``.

    Zero when the Gaussian part vanishes and the jump mass is at most
    ``q / (phi - 1)``.
    """
    _check_q(q)
    if not phi > 1:
        raise DomainError(f"phi must exceed 1, got {phi!r}")
    if not math.isfinite(model.psi_prime_zero):
        raise DomainError("bail-out problem needs a finite psi'(0+)")
    g0 = bailout_criterion(model, q, phi, 0.0)
    if model.gaussian_sigma == 0 and model.jump_mass <= q / (phi - 1.0):
        return BarrierSolution(level=0.0, criterion_residual=g0, method=Method.ZERO_BY_CONDITION,
                               reason="no Gaussian part and nu(-inf,0) <= q/(phi-1)",
                               reference=g0)
    scale = 1.0 / big_phi(model, q)
    limit = 100.0 * scale
    hi = scale
    while bailout_ratio(model, q, phi, hi) > 0:
        hi *= 2.0
        if hi > limit:
            raise NumericalFailure(
                f"G keeps its sign up to a = {limit:g}", estimates=(g0, bailout_criterion(model, q, phi, limit))
            )
    xs = np.linspace(0.0, hi, 401)[1:]
    fs = bailout_ratio(model, q, phi, xs)
    first = int(np.argmax(fs <= 0))
    lo = xs[first - 1] if first > 0 else 0.0
    if lo == 0.0 and not bailout_ratio(model, q, phi, xs[0] * 1e-6) > 0:
        if model.gaussian_sigma == 0:
            # the zero condition failed only by rounding at its boundary
            return BarrierSolution(level=0.0, criterion_residual=g0, method=Method.ZERO_BY_CONDITION,
                                   reason="G(0+) <= 0 at the boundary of the zero condition",
                                   reference=g0)
        raise NumericalFailure("G(0+) is not positive although the zero condition fails",
                               estimates=(g0,))
    if lo == 0.0:
        lo = xs[0] * 1e-6
    level = brentq(lambda a: bailout_ratio(model, q, phi, a), lo, xs[first],
                   xtol=1e-14, rtol=4 * np.finfo(float).eps)
    ref = g0 if math.isfinite(g0) else bailout_criterion(model, q, phi, xs[0] * 1e-6)
    cross = None
    if isinstance(model, StableSpectralNeg):
        v = stable_v(model.alpha, phi)
        cross = model.sigma * (v / q) ** (1.0 / model.alpha)
        if not _agree(level, cross):
            raise ConsistencyError(f"d* = {level!r} disagrees with the Mittag-Leffler root {cross!r}",
                                   values=(level, cross))
    return BarrierSolution(level=float(level), criterion_residual=bailout_criterion(model, q, phi, level),
                           method=Method.GENERIC_ROOT_FIND, cross_check=cross, reference=ref)


# -------------------------------------------------------------- generator


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(128)


def _gl(fun, lo, hi):
    if hi <= lo:
        return 0.0
    half = 0.5 * (hi - lo)
    z = lo + half * (_GL_NODES + 1.0)
    return half * float(np.dot(_GL_WEIGHTS, fun(z)))


def _jump_part(model, f, x):
    """``lam * sum_i A_i int_0^inf (f(x - z) - f(x)) r_i e^{-r_i z} dz``."""
    lam = model.jump_mass
    fx = f(x)
    kink = x - f.a
    total = 0.0
    for weight, rate in zip(model.weights, model.rates):

        def integrand(z, rate=rate):
            return f(x - z) * rate * np.exp(-rate * z)

        inner = 0.0
        for lo, hi in ((0.0, max(kink, 0.0)), (max(kink, 0.0), x)):
            # subdivide long pieces so the exponential weight stays resolved
            n_sub = max(1, int(math.ceil((hi - lo) * rate / 8.0)))
            cuts = np.linspace(lo, hi, n_sub + 1)
            inner += sum(_gl(integrand, c0, c1) for c0, c1 in zip(cuts[:-1], cuts[1:]))
        if isinstance(f, BailoutBarrierValue):
            # below zero f(y) = f(0) + phi y
            inner += math.exp(-rate * x) * (f.value_at_zero() - f.phi / rate)
        total += weight * (inner - fx)
    return lam * total


def generator_apply(model: LevyModel, q: float, f, x: float) -> float:
    """``(Gamma f - q f)(x)`` for a barrier value function ``f``.

    ``f`` is a :class:`ClassicalBarrierValue` (zero below 0) or a
    :class:`BailoutBarrierValue` (slope ``phi`` below 0). Jump integrals use
    the uncompensated form with the model's linear drift coefficient.
    """
    if not x > 0:
        raise DomainError(f"x must be positive, got {x!r}")
    if not isinstance(f, (ClassicalBarrierValue, BailoutBarrierValue)):
        raise DomainError("f must be a barrier value function")
    if isinstance(model, StableSpectralNeg) and model.alpha < 2.0:
        raise UnsupportedOperation("generator of the stable family (infinite-activity jumps) is not supported")
    sig = model.gaussian_sigma
    if isinstance(model, CramerLundbergExp):
        drift = model.p
    elif isinstance(model, StableSpectralNeg):
        drift = 0.0
    else:
        drift = model.mu
    out = drift * f.derivative(x, 1) - q * f(x)
    if sig > 0:
        out += 0.5 * sig * sig * f.derivative(x, 2)
    if model.jump_mass > 0:
        out += _jump_part(model, f, x)
    return float(out)


def _kink_free_grid(lo, hi, n, kink):
    xs = np.linspace(lo, hi, n + 2)[1:-1] if n > 0 else np.array([])
    return xs[np.abs(xs - kink) > 1e-9]


def _verdict_scale(f, q, xs):
    return max(1.0, float(np.max(np.abs(q * np.asarray(f(xs)))))) if len(xs) else 1.0


def verify_hjb_classical(model: LevyModel, q: float, x_max: float = 20.0, n_grid: int = 200,
                         tol: float = 1e-7) -> HjbReport:
    """Residual of the classical HJB inequality for ``v_{c*}`` on a grid.

    Below ``c*`` the residual must vanish; above it, it must be nonpositive.
    """
    sol = optimal_classical_barrier(model, q)
    c = sol.level
    f = ClassicalBarrierValue(model, q, c)
    if not x_max > c:
        raise DomainError(f"x_max must exceed c* = {c:g}")
    inner = _kink_free_grid(0.0, c, n_grid // 2, c) if c > 0 else np.array([])
    outer = _kink_free_grid(c, x_max, n_grid, c)
    outer = np.append(outer, x_max)
    grid = np.concatenate([inner, outer])
    res = np.array([generator_apply(model, q, f, v) for v in grid])
    scale = _verdict_scale(f, q, grid)
    r_in = res[: len(inner)]
    r_out = res[len(inner):]
    max_violation = float(np.max(r_out)) if len(r_out) else -math.inf
    interior = float(np.max(np.abs(r_in))) if len(r_in) else 0.0
    slope = np.asarray(f.derivative(grid, 1))
    return HjbReport(
        grid=grid,
        residuals=res,
        barrier=c,
        max_violation=max_violation,
        interior_max_abs=interior,
        tolerance=tol * scale,
        condition_holds=bool(max_violation <= tol * scale),
        interior_ok=bool(interior <= tol * scale),
        slope_ok=bool(np.all(slope >= 1.0 - 1e-9)),
    )


def verify_hjb_bailout(model: LevyModel, q: float, phi: float, x_max: float = 20.0,
                       n_grid: int = 200, tol: float = 1e-7) -> HjbReport:
    """Residual of the bail-out HJB system for ``vbar_{d*}``: zero on
    ``(0, d*)``, nonpositive above, and ``1 <= vbar' <= phi``."""
    sol = optimal_bailout_barrier(model, q, phi)
    d = sol.level
    f = BailoutBarrierValue(model, q, phi, d)
    if not x_max > d:
        raise DomainError(f"x_max must exceed d* = {d:g}")
    inner = _kink_free_grid(0.0, d, n_grid // 2, d) if d > 0 else np.array([])
    outer = np.append(_kink_free_grid(d, x_max, n_grid, d), x_max)
    grid = np.concatenate([inner, outer])
    res = np.array([generator_apply(model, q, f, v) for v in grid])
    scale = _verdict_scale(f, q, grid)
    r_in, r_out = res[: len(inner)], res[len(inner):]
    max_violation = float(np.max(r_out))
    interior = float(np.max(np.abs(r_in))) if len(r_in) else 0.0
    slope = np.asarray(f.derivative(grid, 1))
    return HjbReport(
        grid=grid,
        residuals=res,
        barrier=d,
        max_violation=max_violation,
        interior_max_abs=interior,
        tolerance=tol * scale,
        condition_holds=bool(max_violation <= tol * scale),
        interior_ok=bool(interior <= tol * scale),
        slope_ok=bool(np.all((slope >= 1.0 - 1e-7) & (slope <= phi + 1e-7))),
    )
