"""q-scale functions W, Z and their antiderivatives.

``W^(q)`` is the function on ``[0, inf)`` with Laplace transform
``1 / (psi(theta) - q)`` for ``theta > Phi(q)``, extended by zero to the
negative half-line. From it::

    Wbar(x) = int_0^x W,   Z(x) = 1 + q Wbar(x),   Zbar(x) = int_0^x Z

with ``Z = 1`` and ``Zbar(x) = x`` for ``x < 0``.

Closed forms exist for every supported family. Brownian motion, the
exponential Cramér-Lundberg model and the hyperexponential jump diffusion
have rational Laplace exponents, so ``W`` is a finite exponential sum
``sum_i c_i exp(theta_i x)`` over the roots of ``psi(theta) = q``. The stable
family is expressed through two-parameter Mittag-Leffler functions. A
contour-integral inversion of the transform is available as an independent
route (:func:`w_numeric`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq
from scipy.special import rgamma

from . import laplace
from .exceptions import DomainError, NumericalFailure, UnsupportedOperation
from .mittag_leffler import ml2
from .models import (
    BrownianDrift,
    CramerLundbergExp,
    HyperExpJumpDiffusion,
    LevyModel,
    StableSpectralNeg,
    phi,
)

__all__ = [
    "Source",
    "ScaleEval",
    "InversionConfig",
    "ExpSumScale",
    "StableScale",
    "NumericScale",
    "scale_functions",
    "scale_eval",
    "w_zero_values",
    "w_derivatives",
    "w_numeric",
    "hyperexp_roots",
    "hyperexp_d_coefficients",
    "cl_exp_roots",
]


class Source(str, Enum):
    CLOSED_FORM = "ClosedForm"
    NUMERIC_INVERSION = "NumericInversion"


@dataclass(frozen=True)
class ScaleEval:
    x: float
    q: float
    w: float
    w_prime: float
    z: float
    wbar: float
    zbar: float
    source: Source

    def to_dict(self):
        d = dict(self.__dict__)
        d["source"] = self.source.value
        return d


@dataclass(frozen=True)
class InversionConfig:
    """Settings of the numerical Laplace inversion.

    ``tilt`` defaults to ``Phi(q)``; ``work_precision_target`` is the
    relative agreement between half and full node counts below which the
    result is considered fully converged (larger discrepancies up to
    ``failure_threshold`` are accepted, beyond that inversion fails).
    """

    node_count: int = 64
    tilt: float | None = None
    work_precision_target: float = 1e-9
    failure_threshold: float = 1e-6

    def __post_init__(self):
        if self.node_count < 16:
            raise DomainError("node_count must be at least 16")


def _check_q(q):
    if not q > 0:
        raise DomainError(f"scale functions are evaluated for q > 0, got {q!r}")


class _Scale:
    """Shared extension-below-zero logic; subclasses fill in x > 0."""

    source = Source.CLOSED_FORM

    def __init__(self, model: LevyModel, q: float):
        self.model = model
        self.q = q
        var = model.variation
        self.w0 = 1.0 / var.drift if var.bounded else 0.0

    # subclasses implement these for x > 0 (arrays)
    def _w(self, x, order):
        raise NotImplementedError

    def _wbar(self, x):
        raise NotImplementedError

    def _zbar(self, x):
        raise NotImplementedError

    def _w_prime_zero(self):
        raise NotImplementedError

    def derivative(self, x, order=0):
        """``order``-th derivative of W (right derivative at 0, 0 below 0)."""
        x = np.asarray(x, dtype=float)
        pos = x > 0
        out = np.zeros_like(x)
        if np.any(pos):
            out[pos] = self._w(x[pos], order)
        at0 = x == 0
        if np.any(at0):
            if order == 0:
                out[at0] = self.w0
            elif order == 1:
                out[at0] = self._w_prime_zero()
            else:
                out[at0] = self._w(np.array([0.0]), order)[0]
        return float(out) if out.ndim == 0 else out

    def w(self, x):
        return self.derivative(x, 0)

    def w_prime(self, x):
        return self.derivative(x, 1)

    def wbar(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        pos = x > 0
        if np.any(pos):
            out[pos] = self._wbar(x[pos])
        return float(out) if out.ndim == 0 else out

    def z(self, x):
        return 1.0 + self.q * self.wbar(x)

    def zbar(self, x):
        x = np.asarray(x, dtype=float)
        out = x.copy()
        pos = x > 0
        if np.any(pos):
            out[pos] = self._zbar(x[pos])
        return float(out) if out.ndim == 0 else out

    def evaluate(self, x) -> ScaleEval:
        x = float(x)
        wbar = self.wbar(x)
        return ScaleEval(
            x=x,
            q=self.q,
            w=self.w(x),
            w_prime=self.w_prime(x),
            z=1.0 + self.q * wbar,
            wbar=wbar,
            zbar=self.zbar(x),
            source=self.source,
        )


class ExpSumScale(_Scale):
    """``W(x) = sum_i coefs[i] * exp(roots[i] * x)`` for ``x >= 0``."""

    def __init__(self, model, q, roots, coefs):
        super().__init__(model, q)
        order = np.argsort(roots)
        self.roots = np.asarray(roots, dtype=float)[order]
        self.coefs = np.asarray(coefs, dtype=float)[order]

    def _w(self, x, order):
        if order == 0:
            # W(0) + sum c_i expm1(theta_i x): no cancellation for small x
            return self.w0 + np.expm1(np.outer(x, self.roots)) @ self.coefs
        e = np.exp(np.outer(x, self.roots))
        return e @ (self.coefs * self.roots**order)

    def _w_prime_zero(self):
        return float(np.sum(self.coefs * self.roots))

    def _wbar(self, x):
        e = np.expm1(np.outer(x, self.roots))
        return e @ (self.coefs / self.roots)

    def _zbar(self, x):
        tx = np.outer(x, self.roots)
        inner = (np.expm1(tx) - tx) @ (self.coefs / self.roots**2)
        return x + self.q * inner


class StableScale(_Scale):
    """Mittag-Leffler representation for ``psi(theta) = (sigma theta)**alpha``.

    With ``u = q (y / sigma)**alpha``::

        W^(m)(y) = y**(alpha-1-m) sigma**-alpha E_{alpha, alpha-m}(u)
        Wbar(y)  = y**alpha sigma**-alpha E_{alpha, alpha+1}(u)
        Zbar(y)  = y E_{alpha, 2}(u)
    """

    def __init__(self, model: StableSpectralNeg, q):
        super().__init__(model, q)
        self.alpha = model.alpha
        self.sigma = model.sigma

    def _u(self, y):
        return self.q * (y / self.sigma) ** self.alpha

    def _w_series(self, y, order):
        a = self.alpha
        with np.errstate(divide="ignore", invalid="ignore"):
            pre = y ** (a - 1.0 - order) / self.sigma**a
            return pre * ml2(a, a - order, self._u(y))

    def _w_prime_zero(self):
        return 1.0 / self.sigma**2 if self.alpha == 2.0 else math.inf

    def _zero_limit(self, order):
        # right limit at 0 of the series sum_n c_n y**(alpha (n+1) - 1 - order)
        a = self.alpha
        for n in range(order + 2):
            g = a * (n + 1) - order
            if g <= 0 and g == int(g):
                continue  # 1/Gamma vanishes at nonpositive integers
            expo = g - 1.0
            coef = self.q**n / self.sigma ** (a * (n + 1)) * float(rgamma(g))
            if expo < 0:
                return math.copysign(math.inf, coef)
            return coef if expo == 0 else 0.0
        return 0.0

    def _w(self, y, order):
        out = self._w_series(y, order)
        if np.any(y == 0):
            out = np.where(y == 0, self._zero_limit(order), out)
        return out

    def _wbar(self, y):
        a = self.alpha
        return (y / self.sigma) ** a * ml2(a, a + 1.0, self._u(y))

    def _zbar(self, y):
        return y * ml2(self.alpha, 2.0, self._u(y))


class NumericScale(_Scale):
    """Scale functions by contour inversion of exponentially tilted transforms.

    With ``t = Phi(q)`` and ``s`` the transform variable::

        exp(-t x) W(x)     <->  1 / (psi(s + t) - q)
        exp(-t x) W'(x)    <->  (s + t) / (psi(s + t) - q) - W(0)
        exp(-t x) Wbar(x)  <->  1 / ((s + t) (psi(s + t) - q))
        exp(-t x) Zbar(x)  <->  psi(s + t) / ((s + t)**2 (psi(s + t) - q))
    """

    source = Source.NUMERIC_INVERSION

    def __init__(self, model, q, cfg: InversionConfig | None = None):
        super().__init__(model, q)
        self.cfg = cfg or InversionConfig()
        self.tilt = self.cfg.tilt if self.cfg.tilt is not None else phi(model, q)

    def _invert(self, make, x):
        n = self.cfg.node_count
        t = self.tilt
        full = laplace.invert(make, x, n)
        half = laplace.invert(make, x, n // 2)
        scale = max(abs(full), abs(half), 1e-300)
        if abs(full - half) > self.cfg.failure_threshold * scale:
            raise NumericalFailure(
                f"Laplace inversion at x={x:g} did not converge "
                f"({n // 2} nodes: {half!r}, {n} nodes: {full!r})",
                estimates=(half * math.exp(t * x), full * math.exp(t * x)),
            )
        return full * math.exp(t * x)

    def _transform(self, kind):
        m, q, t, w0 = self.model, self.q, self.tilt, self.w0
        if kind == 0:
            return lambda s: 1.0 / (m.psi(s + t) - q)
        if kind == 1:
            return lambda s: (s + t) / (m.psi(s + t) - q) - w0
        if kind == "wbar":
            return lambda s: 1.0 / ((s + t) * (m.psi(s + t) - q))
        if kind == "zbar":
            return lambda s: m.psi(s + t) / ((s + t) ** 2 * (m.psi(s + t) - q))
        raise ValueError(kind)

    def _w(self, x, order):
        if order >= 2:
            raise UnsupportedOperation(
                "derivatives of order >= 2 are not available from numeric inversion"
            )
        f = self._transform(order)
        return np.array([self._invert(f, v) for v in x])

    def _w_prime_zero(self):
        return w_zero_values(self.model, self.q)[1]

    def _wbar(self, x):
        f = self._transform("wbar")
        return np.array([self._invert(f, v) for v in x])

    def _zbar(self, x):
        f = self._transform("zbar")
        return np.array([self._invert(f, v) for v in x])


# -- closed-form constructions ------------------------------------------------


def cl_exp_roots(model: CramerLundbergExp, q):
    """Explicit roots ``(q_plus, q_minus)`` of ``p t - lam t / (mu + t) = q``."""
    p, lam, mu = model.p, model.lam, model.mu_rate
    b = q + lam - mu * p
    disc = math.sqrt(b * b + 4.0 * p * q * mu)
    q_minus = (b - disc) / (2.0 * p)
    # q_plus via Vieta (product of roots = -q mu / p) avoids cancellation
    q_plus = (-q * mu / p) / q_minus
    return q_plus, q_minus


def _brownian(model: BrownianDrift, q):
    s2 = model.sigma**2
    delta = math.sqrt(model.mu**2 + 2.0 * q * s2) / s2
    omega = model.mu / s2
    c = 1.0 / (s2 * delta)
    return ExpSumScale(model, q, [-omega + delta, -omega - delta], [c, -c])


def _cl_exp(model: CramerLundbergExp, q):
    qp, qm = cl_exp_roots(model, q)
    a_plus = (model.mu_rate + qp) / (qp - qm)
    a_minus = (model.mu_rate + qm) / (qp - qm)
    return ExpSumScale(model, q, [qp, qm], [a_plus / model.p, -a_minus / model.p])


def hyperexp_roots(model: HyperExpJumpDiffusion, q):
    """All real roots of ``psi(theta) = q``, ascending.

    The poles ``-alpha_k`` of ``psi`` interlace the negative roots: one root
    in each ``(-alpha_{k+1}, -alpha_k)``, one in ``(-alpha_1, 0)``, one
    positive root ``Phi(q)``, and (when ``sigma > 0``) one more below
    ``-alpha_n``.
    """
    _check_q(q)
    f = lambda t: float(model.psi(t)) - q
    rates = model.rates
    roots = []
    if model.sigma > 0:
        hi = -rates[-1] * (1.0 + 1e-13)
        width = 1.0
        while f(-rates[-1] - width) <= 0:
            width *= 2.0
        lo = -rates[-1] - width
        roots.append(brentq(f, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=500))
    for k in range(len(rates) - 1, 0, -1):
        lo = -rates[k] * (1.0 - 1e-13)
        hi = -rates[k - 1] * (1.0 + 1e-13)
        roots.append(brentq(f, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=500))
    roots.append(brentq(f, -rates[0] * (1.0 - 1e-13), 0.0, xtol=1e-15, rtol=1e-15, maxiter=500))
    roots.append(phi(model, q))
    return np.array(roots)


def hyperexp_d_coefficients(model: HyperExpJumpDiffusion, q, roots=None):
    """Coefficients ``D_i`` of ``Z(x) = sum_i D_i exp(theta_i x)``.

    ``D_i = prod_k (theta_i / alpha_k + 1) / prod_{j != i} (1 - theta_i / theta_j)``,
    the residue of ``psi(theta) / (theta (psi(theta) - q))`` at ``theta_i``.
    """
    th = hyperexp_roots(model, q) if roots is None else np.asarray(roots)
    rates = np.asarray(model.rates)
    d = np.empty_like(th)
    for i, t in enumerate(th):
        num = np.prod(t / rates + 1.0)
        others = np.delete(th, i)
        d[i] = num / np.prod(1.0 - t / others)
    return d


def _hyperexp(model: HyperExpJumpDiffusion, q):
    th = hyperexp_roots(model, q)
    d = hyperexp_d_coefficients(model, q, th)
    # W = Z' / q
    return ExpSumScale(model, q, th, d * th / q)


@lru_cache(maxsize=1024)
def _cached(model, q):
    if isinstance(model, BrownianDrift):
        return _brownian(model, q)
    if isinstance(model, CramerLundbergExp):
        return _cl_exp(model, q)
    if isinstance(model, StableSpectralNeg):
        return StableScale(model, q)
    if isinstance(model, HyperExpJumpDiffusion):
        return _hyperexp(model, q)
    raise UnsupportedOperation(f"no closed-form scale function for {type(model).__name__}")


def scale_functions(model: LevyModel, q: float, method: str = "closed"):
    """Vectorized scale-function object for ``(model, q)``.

    ``method`` is ``"closed"`` (family closed form, cached) or ``"numeric"``
    (contour inversion).
    """
    _check_q(q)
    if method == "closed":
        return _cached(model, float(q))
    if method == "numeric":
        return NumericScale(model, float(q))
    raise ValueError(f"unknown method {method!r}")


def scale_eval(model: LevyModel, q: float, x: float, method: str = "closed") -> ScaleEval:
    """All five scale quantities at ``x``."""
    return scale_functions(model, q, method).evaluate(x)


def w_zero_values(model: LevyModel, q: float):
    """``(W(0), W'(0+))``."""
    _check_q(q)
    var = model.variation
    if var.bounded:
        d = var.drift
        return 1.0 / d, (q + model.jump_mass) / d**2
    sig = model.gaussian_sigma
    if sig > 0:
        return 0.0, 2.0 / sig**2
    return 0.0, math.inf


def w_derivatives(model: LevyModel, q: float, x: float, order: int, method: str = "closed"):
    """Exact ``order``-th derivative (1, 2 or 3) of W at ``x > 0``."""
    if order not in (1, 2, 3):
        raise DomainError(f"order must be 1, 2 or 3, got {order!r}")
    if x <= 0:
        raise DomainError(f"x must be positive, got {x!r}")
    return scale_functions(model, q, method).derivative(float(x), order)


def w_numeric(model: LevyModel, q: float, x: float, cfg: InversionConfig | None = None) -> float:
    """W(x) by contour inversion of the tilted transform ``1/(psi(s + Phi(q)) - q)``."""
    _check_q(q)
    if x <= 0:
        raise DomainError(f"x must be positive, got {x!r}")
    num = NumericScale(model, float(q), cfg)
    return float(num._w(np.array([float(x)]), 0)[0])
