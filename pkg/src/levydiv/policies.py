"""Value functions of barrier dividend strategies.

Classical problem: dividends are paid so that the surplus never exceeds
``a``; the company is ruined at the first passage below zero. Bail-out
problem: additionally capital is injected at unit cost ``phi > 1`` to keep
the surplus nonnegative forever.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, UnsupportedOperation
from .models import LevyModel
from .scale import scale_functions

__all__ = [
    "PolicyValueReport",
    "ClassicalBarrierValue",
    "BailoutBarrierValue",
    "classical_barrier_value",
    "classical_barrier_report",
    "dividends_doubly",
    "injections_doubly",
    "bailout_barrier_value",
]


@dataclass(frozen=True)
class PolicyValueReport:
    x: float
    a: float
    value: float
    dividends: float | None = None
    injections_cost: float | None = None
    note: str | None = None

    @property
    def components(self):
        if self.dividends is None:
            return None
        return {"dividends": self.dividends, "injections_cost": self.injections_cost}

    def to_dict(self):
        return {"x": self.x, "a": self.a, "value": self.value,
                "components": self.components, "note": self.note}


def _out(v):
    v = np.asarray(v, dtype=float)
    return float(v) if v.ndim == 0 else v


class ClassicalBarrierValue:
    """``x -> v_a(x)`` for the barrier strategy at level ``a``, set to zero
    below zero.

    For ``a > 0``: ``W(x)/W'(a)`` on ``[0, a]`` and ``x - a + W(a)/W'(a)``
    above. For ``a = 0``: ``x + W(0)/W'(0+)``, which is just ``x`` when
    ``W'(0+)`` is infinite.
    """

    def __init__(self, model: LevyModel, q: float, a: float):
        if a < 0:
            raise DomainError(f"barrier must be nonnegative, got {a!r}")
        self.model, self.q, self.a = model, float(q), float(a)
        self.sf = scale_functions(model, q)
        self.note = None
        if a == 0:
            w0, w0p = self.sf.w(0.0), self.sf.w_prime(0.0)
            if math.isinf(w0p):
                self.note = "W'(0+) is infinite: a = 0 means immediate payout, value x"
                self.level = 0.0
            else:
                self.level = w0 / w0p
            self.scale = None
        else:
            self.scale = 1.0 / self.sf.w_prime(self.a)
            self.level = self.sf.w(self.a) * self.scale

    def derivative(self, x, order=0):
        x = np.asarray(x, dtype=float)
        a = self.a
        if a == 0:
            lin = {0: x + self.level, 1: np.ones_like(x)}.get(order, np.zeros_like(x))
            return _out(np.where(x < 0, 0.0, lin))
        inside = self.sf.derivative(np.clip(x, 0.0, a), order) * self.scale
        if order == 0:
            above = x - a + self.level
        elif order == 1:
            above = np.ones_like(x)
        else:
            above = np.zeros_like(x)
        return _out(np.where(x < 0, 0.0, np.where(x <= a, inside, above)))

    def __call__(self, x):
        return self.derivative(x, 0)


class BailoutBarrierValue:
    """``x -> vbar_a(x)`` for the double-barrier (bail-out) strategy.

    On ``[0, a]``: ``phi (Zbar(x) + psi'(0+)/q) + Z(x) (1 - phi Z(a)) / (q W(a))``;
    ``x - a + vbar_a(a)`` above ``a`` and ``vbar_a(0) + phi x`` below zero.
    """

    def __init__(self, model: LevyModel, q: float, phi: float, a: float):
        if not phi > 1:
            raise DomainError(f"phi must exceed 1, got {phi!r}")
        if a < 0:
            raise DomainError(f"barrier must be nonnegative, got {a!r}")
        mean = model.psi_prime_zero
        if not math.isfinite(mean):
            raise DomainError("bail-out values need a finite psi'(0+)")
        self.model, self.q, self.phi, self.a = model, float(q), float(phi), float(a)
        self.sf = scale_functions(model, q)
        self.mean = mean
        if a == 0:
            var = model.variation
            if not var.bounded:
                raise UnsupportedOperation(
                    "the a = 0 bail-out strategy is only defined for bounded variation"
                )
            self.d = var.drift
            self.k = None
        else:
            wa = self.sf.w(self.a)
            self.k = (1.0 - phi * self.sf.z(self.a)) / (q * wa)
            self.div_coef = 1.0 / (q * wa)
            self.inj_coef = self.sf.z(self.a) / (q * wa)

    def _inside(self, x, order):
        sf, phi, q, k = self.sf, self.phi, self.q, self.k
        if order == 0:
            return phi * (sf.zbar(x) + self.mean / q) + sf.z(x) * k
        if order == 1:
            return phi * sf.z(x) + q * sf.w(x) * k
        return phi * q * sf.derivative(x, order - 2) + q * sf.derivative(x, order - 1) * k

    def value_at_zero(self):
        if self.a == 0:
            return (self.phi * self.mean + (1.0 - self.phi) * self.d) / self.q
        return float(self._inside(np.array(0.0), 0))

    def derivative(self, x, order=0):
        x = np.asarray(x, dtype=float)
        a, v0 = self.a, self.value_at_zero()
        below = {0: v0 + self.phi * x, 1: np.full_like(x, self.phi)}.get(order, np.zeros_like(x))
        if a == 0:
            above = {0: x + v0, 1: np.ones_like(x)}.get(order, np.zeros_like(x))
            return _out(np.where(x < 0, below, above))
        inside = self._inside(np.clip(x, 0.0, a), order)
        if order == 0:
            above = x - a + float(self._inside(np.array(a), 0))
        elif order == 1:
            above = np.ones_like(x)
        else:
            above = np.zeros_like(x)
        return _out(np.where(x < 0, below, np.where(x <= a, inside, above)))

    def __call__(self, x):
        return self.derivative(x, 0)

    def components(self, x):
        """``(dividends, injections)`` expected discounted totals from ``x >= 0``."""
        x = float(x)
        if self.a == 0:
            return x + self.d / self.q, (self.d - self.mean) / self.q
        xc = min(x, self.a)
        div = self.div_coef * self.sf.z(xc) + max(x - self.a, 0.0)
        inj = -self.sf.zbar(xc) - self.mean / self.q + self.inj_coef * self.sf.z(xc)
        return div, inj


def classical_barrier_value(model: LevyModel, q: float, a: float, x: float) -> float:
    """Expected discounted dividends until ruin under the barrier at ``a``."""
    if x < 0:
        raise DomainError(f"x must be nonnegative, got {x!r}")
    v = ClassicalBarrierValue(model, q, a)
    if v.note:
        warnings.warn(v.note, RuntimeWarning, stacklevel=2)
    return float(v(x))


def classical_barrier_report(model: LevyModel, q: float, a: float, x: float) -> PolicyValueReport:
    if x < 0:
        raise DomainError(f"x must be nonnegative, got {x!r}")
    v = ClassicalBarrierValue(model, q, a)
    return PolicyValueReport(x=float(x), a=float(a), value=float(v(x)), note=v.note)


def _check_doubly(q, a, x):
    if not q > 0:
        raise DomainError(f"q must be positive, got {q!r}")
    if not a > 0:
        raise DomainError(f"a must be positive, got {a!r}")
    if not 0 <= x <= a:
        raise DomainError(f"x must lie in [0, a], got {x!r}")


def dividends_doubly(model: LevyModel, q: float, a: float, x: float) -> float:
    """``E_x[int_0^inf e^{-qt} dL_t]`` for the process reflected at 0 and ``a``:
    ``Z(x) / (q W(a))``."""
    _check_doubly(q, a, x)
    sf = scale_functions(model, q)
    return sf.z(x) / (q * sf.w(a))


def injections_doubly(model: LevyModel, q: float, a: float, x: float) -> float:
    """``E_x[int_0^inf e^{-qt} dR_t]``:
    ``-Zbar(x) - psi'(0+)/q + Z(a) Z(x) / (q W(a))``."""
    _check_doubly(q, a, x)
    mean = model.psi_prime_zero
    if mean == -math.inf:
        return math.inf
    sf = scale_functions(model, q)
    return -sf.zbar(x) - mean / q + sf.z(a) * sf.z(x) / (q * sf.w(a))


def bailout_barrier_value(model: LevyModel, q: float, phi: float, a: float, x: float) -> PolicyValueReport:
    """Value of the double-barrier strategy with upper level ``a`` and
    injection cost ``phi``, with its dividend/injection breakdown."""
    if not q > 0:
        raise DomainError(f"q must be positive, got {q!r}")
    if x < 0:
        raise DomainError(f"x must be nonnegative, got {x!r}")
    v = BailoutBarrierValue(model, q, phi, a)
    div, inj = v.components(x)
    return PolicyValueReport(x=float(x), a=float(a), value=float(v(x)), dividends=float(div),
                             injections_cost=float(inj))
