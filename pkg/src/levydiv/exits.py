"""Fluctuation identities expressed through the scale functions.

Conventions for the reflected-at-supremum quantities: ``Yhat = S - X`` is
the distance below the running supremum and ``tau_hat_a`` its first
passage above ``a``. Equivalently, with ``U = a - Yhat`` (the surplus under
a dividend barrier at ``a``), ``tau_hat_a`` is the ruin time of ``U``.

* :func:`reflected_at_supremum_entrance` takes ``y = Yhat_0`` (distance
  below the barrier).
* :func:`overshoot_reflected` takes ``y = U_0 = a - Yhat_0`` (the surplus).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .exceptions import DomainError
from .models import LevyModel, phi
from .scale import scale_functions

__all__ = [
    "exit_up_transform",
    "reflected_at_infimum_entrance",
    "reflected_at_supremum_entrance",
    "overshoot_reflected",
    "overshoot_ruin",
    "overshoot_constants",
    "PotentialDensity",
    "doubly_reflected_potential",
]


def _check_interval(y, a):
    if not a > 0:
        raise DomainError(f"upper level a must be positive, got {a!r}")
    if not 0 <= y <= a:
        raise DomainError(f"y must lie in [0, a] = [0, {a:g}], got {y!r}")


def exit_up_transform(model: LevyModel, q: float, y: float, a: float) -> float:
    """``E_y[exp(-q T); X leaves [0, a] upward first] = W(y) / W(a)``."""
    _check_interval(y, a)
    sf = scale_functions(model, q)
    return sf.w(y) / sf.w(a)


def reflected_at_infimum_entrance(model: LevyModel, q: float, y: float, a: float) -> float:
    """Laplace transform of the first passage above ``a`` of ``X - I``
    started at ``y``: ``Z(y) / Z(a)``."""
    _check_interval(y, a)
    sf = scale_functions(model, q)
    return sf.z(y) / sf.z(a)


def reflected_at_supremum_entrance(model: LevyModel, q: float, y: float, a: float) -> float:
    """Laplace transform of the first passage above ``a`` of ``S - X``
    started at ``y``: ``Z(a-y) - q W(a-y) W(a) / W'(a)``.

    At ``y = 0`` this is the ``H(a)`` entering the bail-out criterion.
    """
    _check_interval(y, a)
    sf = scale_functions(model, q)
    return sf.z(a - y) - q * sf.w(a - y) * sf.w(a) / sf.w_prime(a)


def overshoot_constants(model: LevyModel, q: float, a: float | None = None):
    """``(C, D)`` of the overshoot identities (``C`` is None without ``a``)."""
    sf = scale_functions(model, q)
    mean = model.psi_prime_zero
    big_phi = phi(model, q)
    d = (q - mean * big_phi) / big_phi**2
    c = None
    if a is not None:
        c = (sf.z(a) - mean * sf.w(a)) / sf.w_prime(a)
    return c, d


def overshoot_reflected(model: LevyModel, q: float, y: float, a: float) -> float:
    """``E[exp(-q sigma_a) U_{sigma_a}]`` for the surplus ``U`` under a
    dividend barrier at ``a`` started at ``U_0 = y``, ``sigma_a`` its ruin
    time. Equals ``Zbar(y) - psi'(0+) Wbar(y) - C W(y)`` (nonpositive)."""
    _check_interval(y, a)
    sf = scale_functions(model, q)
    c, _ = overshoot_constants(model, q, a)
    return sf.zbar(y) - model.psi_prime_zero * sf.wbar(y) - c * sf.w(y)


def overshoot_ruin(model: LevyModel, q: float, x: float) -> float:
    """``E_x[exp(-q T_0^-) X_{T_0^-}]`` with ``T_0^-`` the first passage
    below zero: ``Zbar(x) - psi'(0+) Wbar(x) - D W(x)``."""
    if x < 0:
        raise DomainError(f"x must be nonnegative, got {x!r}")
    sf = scale_functions(model, q)
    _, d = overshoot_constants(model, q)
    return sf.zbar(x) - model.psi_prime_zero * sf.wbar(x) - d * sf.w(x)


@dataclass(frozen=True)
class PotentialDensity:
    """Discounted occupation measure ``int_0^inf e^{-qt} P_x(V_t in dy) dt``
    of the process doubly reflected at 0 and ``a``, started at ``x``.

    The measure is ``atom * delta_a(dy) + density(y) dy`` on ``[0, a]``: for
    bounded variation the controlled process sits at the upper barrier
    while dividends are paid, which carries the atom. ``density_dual`` and
    ``atom_at_zero`` describe the same measure in the reflected coordinate
    ``a - V`` (distance below the barrier), where the atom sits at zero.
    """

    a: float
    x: float
    q: float
    atom_at_zero: float
    density: Callable
    density_dual: Callable

    @property
    def atom(self):
        return self.atom_at_zero

    @property
    def atom_level(self):
        return self.a

    def total_mass(self, tol=1e-10):
        from scipy.integrate import quad

        # integrate in the reflected coordinate: W' may blow up at the barrier,
        # and nodes there must not round onto it. Geometric breakpoints above
        # the kink at xd keep quad from mistaking the nearby singularity for
        # an endpoint one.
        xd = self.a - self.x
        edges = [0.0, self.a]
        if 0 < xd < self.a:
            edges = [0.0] + list(xd * 4.0 ** np.arange(int(np.log(self.a / xd) / np.log(4.0)) + 1)) + [self.a]
        mass = sum(quad(self.density_dual, lo, hi, epsabs=tol, epsrel=tol, limit=200)[0]
                   for lo, hi in zip(edges[:-1], edges[1:]) if hi > lo)
        return self.atom_at_zero + mass


def doubly_reflected_potential(model: LevyModel, q: float, a: float, x: float) -> PotentialDensity:
    """q-potential measure of the doubly reflected process.

    In the reflected coordinate ``y' = a - y`` with start ``x' = a - x``::

        u(x', y') = Z(a - x') W'(y') / (q W(a)) - W(y' - x'),
        atom at y' = 0:  Z(a - x') W(0) / (q W(a)).
    """
    if not a > 0:
        raise DomainError(f"a must be positive, got {a!r}")
    if not 0 <= x <= a:
        raise DomainError(f"x must lie in [0, a], got {x!r}")
    sf = scale_functions(model, q)
    xd = a - x
    lead = sf.z(a - xd) / (q * sf.w(a))
    atom = lead * sf.w(0.0)

    def density_dual(yd):
        yd = np.asarray(yd, dtype=float)
        out = np.asarray(lead * sf.w_prime(yd) - sf.w(yd - xd))
        return float(out) if out.ndim == 0 else out

    def density(y):
        return density_dual(a - np.asarray(y, dtype=float))

    return PotentialDensity(a=float(a), x=float(x), q=float(q), atom_at_zero=float(atom),
                            density=density, density_dual=density_dual)
