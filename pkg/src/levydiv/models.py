"""Spectrally negative Lévy models and their Laplace exponents.

Four families are supported:

* :class:`BrownianDrift` -- ``X_t = mu t + sigma B_t``
* :class:`CramerLundbergExp` -- premium rate ``p`` minus compound Poisson
  claims with exponential sizes
* :class:`StableSpectralNeg` -- ``X_t = sigma Z_t`` with ``Z`` a standard
  spectrally negative stable process, ``psi(theta) = (sigma theta)**alpha``
* :class:`HyperExpJumpDiffusion` -- Brownian motion with drift minus
  compound Poisson claims with a hyperexponential size distribution

All models are immutable and hashable, so they can be used as cache keys.
The Laplace exponent ``psi`` accepts complex arguments (used by the
numerical Laplace inversion); the public :func:`psi` wrapper restricts to
real ``theta >= 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .exceptions import DomainError

__all__ = [
    "LevyModel",
    "BrownianDrift",
    "CramerLundbergExp",
    "StableSpectralNeg",
    "HyperExpJumpDiffusion",
    "VariationClass",
    "psi",
    "psi_prime_zero",
    "phi",
    "variation_class",
    "jump_mass",
    "model_from_dict",
]


@dataclass(frozen=True)
class VariationClass:
    """Path-variation classification.

    ``bounded`` is True when the paths have bounded variation, in which case
    ``drift`` is the infinitesimal drift ``d`` in ``X_t = d t - S_t``.
    """

    bounded: bool
    drift: float | None = None

    def __str__(self):
        if self.bounded:
            return f"BoundedVariation({self.drift:g})"
        return "UnboundedVariation"


class LevyModel:
    """Common interface of the concrete model families."""

    family: str = ""

    def psi(self, theta):
        raise NotImplementedError

    def psi_prime(self, theta):
        raise NotImplementedError

    @property
    def gaussian_sigma(self) -> float:
        """Gaussian coefficient in the Lévy-Khintchine triple."""
        raise NotImplementedError

    @property
    def jump_mass(self) -> float:
        raise NotImplementedError

    @property
    def psi_prime_zero(self) -> float:
        raise NotImplementedError

    @property
    def variation(self) -> VariationClass:
        raise NotImplementedError

    @property
    def drift(self) -> float | None:
        return self.variation.drift

    @property
    def mean_claim(self) -> float:
        """Mean jump size (0 when there are no compound Poisson jumps)."""
        return 0.0

    def params(self) -> dict:
        raise NotImplementedError

    def to_dict(self) -> dict:
        return {"family": self.family, **self.params()}

    def label(self) -> str:
        body = ",".join(f"{k}={_fmt(v)}" for k, v in self.params().items())
        return f"{self.family}({body})"


def _fmt(v):
    if isinstance(v, (list, tuple)):
        return "/".join(f"{x:g}" for x in v)
    return f"{v:g}"


def _check_positive(name, value):
    if not (value > 0 and math.isfinite(value)):
        raise DomainError(f"{name} must be positive and finite, got {value!r}")


@dataclass(frozen=True)
class BrownianDrift(LevyModel):
    mu: float
    sigma: float
    family: str = field(default="brownian", init=False, repr=False)

    def __post_init__(self):
        _check_positive("sigma", self.sigma)

    def psi(self, theta):
        return self.mu * theta + 0.5 * self.sigma**2 * theta * theta

    def psi_prime(self, theta):
        return self.mu + self.sigma**2 * theta

    @property
    def gaussian_sigma(self):
        return self.sigma

    @property
    def jump_mass(self):
        return 0.0

    @property
    def psi_prime_zero(self):
        return float(self.mu)

    @property
    def variation(self):
        return VariationClass(False)

    def params(self):
        return {"mu": self.mu, "sigma": self.sigma}


@dataclass(frozen=True)
class CramerLundbergExp(LevyModel):
    """Premium rate ``p``, Poisson claim intensity ``lam``, claim sizes
    exponential with rate ``mu_rate`` (mean ``1 / mu_rate``)."""

    p: float
    lam: float
    mu_rate: float
    family: str = field(default="cl-exp", init=False, repr=False)

    def __post_init__(self):
        _check_positive("p", self.p)
        _check_positive("lambda", self.lam)
        _check_positive("mu_rate", self.mu_rate)

    def psi(self, theta):
        return self.p * theta - self.lam * theta / (self.mu_rate + theta)

    def psi_prime(self, theta):
        return self.p - self.lam * self.mu_rate / (self.mu_rate + theta) ** 2

    @property
    def gaussian_sigma(self):
        return 0.0

    @property
    def jump_mass(self):
        return float(self.lam)

    @property
    def psi_prime_zero(self):
        return self.p - self.lam / self.mu_rate

    @property
    def variation(self):
        return VariationClass(True, float(self.p))

    @property
    def mean_claim(self):
        return 1.0 / self.mu_rate

    @property
    def weights(self):
        return (1.0,)

    @property
    def rates(self):
        return (float(self.mu_rate),)

    def params(self):
        return {"p": self.p, "lambda": self.lam, "mu_rate": self.mu_rate}


@dataclass(frozen=True)
class StableSpectralNeg(LevyModel):
    """``psi(theta) = (sigma * theta) ** alpha`` with ``alpha`` in (1, 2]."""

    alpha: float
    sigma: float
    family: str = field(default="stable", init=False, repr=False)

    def __post_init__(self):
        if not 1.0 < self.alpha <= 2.0:
            raise DomainError(f"alpha must lie in (1, 2], got {self.alpha!r}")
        _check_positive("sigma", self.sigma)

    def psi(self, theta):
        # principal branch for complex theta: analytic continuation off Re > 0
        return (self.sigma * theta) ** self.alpha

    def psi_prime(self, theta):
        return self.alpha * self.sigma**self.alpha * theta ** (self.alpha - 1.0)

    @property
    def gaussian_sigma(self):
        # alpha = 2 is Brownian motion with psi = sigma^2 theta^2
        return math.sqrt(2.0) * self.sigma if self.alpha == 2.0 else 0.0

    @property
    def jump_mass(self):
        return 0.0 if self.alpha == 2.0 else math.inf

    @property
    def psi_prime_zero(self):
        return 0.0

    @property
    def variation(self):
        return VariationClass(False)

    def params(self):
        return {"alpha": self.alpha, "sigma": self.sigma}


@dataclass(frozen=True)
class HyperExpJumpDiffusion(LevyModel):
    """``X_t = mu t + sigma W_t - sum_{i <= N_t} Y_i`` with
    ``P(Y > y) = sum_i A_i exp(-alpha_i y)``.

    ``weights`` are the ``A_i`` (positive, summing to one) and ``rates`` the
    strictly increasing ``alpha_i``. ``sigma = 0`` gives a bounded-variation
    model, which then needs ``mu > 0``.
    """

    mu: float
    sigma: float
    lam: float
    weights: tuple
    rates: tuple
    family: str = field(default="hyperexp", init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        object.__setattr__(self, "rates", tuple(float(r) for r in self.rates))
        if len(self.weights) != len(self.rates) or not self.weights:
            raise DomainError("weights and rates must be non-empty and of equal length")
        if self.sigma < 0:
            raise DomainError(f"sigma must be nonnegative, got {self.sigma!r}")
        _check_positive("lambda", self.lam)
        if any(w <= 0 for w in self.weights) or abs(sum(self.weights) - 1.0) > 1e-12:
            raise DomainError("weights must be positive and sum to 1")
        if self.rates[0] <= 0 or any(b <= a for a, b in zip(self.rates, self.rates[1:])):
            raise DomainError("rates must be positive and strictly increasing")
        if self.sigma == 0 and self.mu <= 0:
            raise DomainError("sigma = 0 requires mu > 0 (otherwise paths are monotone)")

    def psi(self, theta):
        jumps = sum(w * theta / (r + theta) for w, r in zip(self.weights, self.rates))
        return self.mu * theta + 0.5 * self.sigma**2 * theta * theta - self.lam * jumps

    def psi_prime(self, theta):
        jumps = sum(w * r / (r + theta) ** 2 for w, r in zip(self.weights, self.rates))
        return self.mu + self.sigma**2 * theta - self.lam * jumps

    @property
    def gaussian_sigma(self):
        return float(self.sigma)

    @property
    def jump_mass(self):
        return float(self.lam)

    @property
    def psi_prime_zero(self):
        return self.mu - self.lam * self.mean_claim

    @property
    def mean_claim(self):
        return sum(w / r for w, r in zip(self.weights, self.rates))

    @property
    def variation(self):
        if self.sigma > 0:
            return VariationClass(False)
        return VariationClass(True, float(self.mu))

    def params(self):
        return {
            "mu": self.mu,
            "sigma": self.sigma,
            "lambda": self.lam,
            "weights": list(self.weights),
            "rates": list(self.rates),
        }


_FAMILIES = {
    "brownian": lambda d: BrownianDrift(float(d["mu"]), float(d["sigma"])),
    "cl-exp": lambda d: CramerLundbergExp(float(d["p"]), float(d["lambda"]), float(d["mu_rate"])),
    "stable": lambda d: StableSpectralNeg(float(d["alpha"]), float(d["sigma"])),
    "hyperexp": lambda d: HyperExpJumpDiffusion(
        float(d["mu"]), float(d["sigma"]), float(d["lambda"]),
        tuple(d["weights"]), tuple(d["rates"]),
    ),
}


def model_from_dict(d: dict) -> LevyModel:
    """Inverse of :meth:`LevyModel.to_dict`."""
    try:
        build = _FAMILIES[d["family"]]
    except KeyError:
        raise DomainError(f"unknown model family {d.get('family')!r}") from None
    try:
        return build(d)
    except KeyError as exc:
        raise DomainError(f"missing parameter {exc.args[0]!r} for family {d['family']}") from None


# -- module-level API --------------------------------------------------------


def psi(model: LevyModel, theta: float) -> float:
    """Laplace exponent ``log E[exp(theta X_1)]`` for ``theta >= 0``."""
    if theta < 0:
        raise DomainError(f"psi is evaluated on theta >= 0, got {theta!r}")
    return float(model.psi(theta))


def psi_prime_zero(model: LevyModel) -> float:
    """Right derivative of ``psi`` at zero, i.e. ``E[X_1]``."""
    return model.psi_prime_zero


def variation_class(model: LevyModel) -> VariationClass:
    return model.variation


def jump_mass(model: LevyModel) -> float:
    """Total mass of the Lévy measure on ``(-inf, 0)``."""
    return model.jump_mass


def _bracket_above(f, lo, target):
    hi = max(2.0 * lo, 1.0)
    while f(hi) <= target:
        hi *= 2.0
        if hi > 1e300:
            raise DomainError("psi does not exceed the target; model is degenerate")
    return hi


def _solve_increasing(model, q, lo):
    """Root of psi(theta) = q on [lo, inf) where psi is increasing."""
    f = lambda t: float(model.psi(t)) - q
    hi = _bracket_above(lambda t: float(model.psi(t)), lo, q)
    if f(lo) >= 0:
        return lo
    root = brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    # one Newton polish; keep it only if it improves the residual
    d = float(model.psi_prime(root))
    if d > 0:
        cand = root - f(root) / d
        if lo <= cand and abs(f(cand)) < abs(f(root)):
            root = cand
    return root


@lru_cache(maxsize=4096)
def _phi_zero(model):
    if model.psi_prime_zero >= 0:
        return 0.0
    # psi is negative just right of 0; shrink until we land in that region
    lo = 1e-8
    while float(model.psi(lo)) >= 0:
        lo *= 0.5
        if lo < 1e-300:
            return 0.0  # the positive root is below resolution
    return _solve_increasing(model, 0.0, lo)


@lru_cache(maxsize=4096)
def _phi(model, q):
    base = _phi_zero(model)
    if q == 0:
        return base
    return _solve_increasing(model, q, base)


def phi(model: LevyModel, q: float) -> float:
    """Right inverse of ``psi``: the largest root of ``psi(theta) = q``."""
    if q < 0:
        raise DomainError(f"q must be nonnegative, got {q!r}")
    return _phi(model, float(q))
