"""Monte Carlo simulation of reflected and doubly reflected risk processes.

Two schemes are available.

``event``
    Exact simulation for bounded-variation models (drift ``d > 0`` minus a
    compound Poisson process). Between claims the path is ``x + d t``, so
    barrier hitting times, regulation amounts and discounted integrals are
    all closed-form per interclaim interval.

``euler``
    Time stepping for any family. Over each step the Gaussian part is
    sampled together with its running maximum and minimum (Brownian-bridge
    extremes), the one-sided Skorokhod map is applied using those extremes,
    and the compound Poisson jumps of the step are added at its end.
    Discounted regulation uses the midpoint factor ``exp(-q (t + dt/2))``.

Paths are generated in fixed-size blocks, each with its own child of a
``numpy.random.SeedSequence``; results therefore depend only on the seed and
not on the number of worker threads.
"""

from __future__ import annotations

import json
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from enum import Enum

import numpy as np

from .exceptions import ConfigError, DomainError
from .models import (
    CramerLundbergExp,
    HyperExpJumpDiffusion,
    LevyModel,
    StableSpectralNeg,
    phi,
)

__all__ = [
    "Scheme",
    "Estimand",
    "SimConfig",
    "SimPath",
    "PathEvent",
    "MCEstimate",
    "BarrierEstimates",
    "DoublyEstimates",
    "OccupationEstimate",
    "simulate_reflected_barrier",
    "simulate_doubly_reflected",
    "simulate_exit_functionals",
    "simulate_occupation",
    "sample_stable_increment",
    "sample_paths",
    "dump_paths",
]

BLOCK_SIZE = 4096
MAX_DUMP = 1000


class Scheme(str, Enum):
    EVENT = "event"
    EULER = "euler"


class Estimand(str, Enum):
    UP_CROSS_FIRST = "UpCrossFirst"
    REFLECTED_INF_ENTRANCE = "ReflectedInfEntrance"
    REFLECTED_SUP_ENTRANCE = "ReflectedSupEntrance"
    OVERSHOOT_REFLECTED = "OvershootReflected"
    OVERSHOOT_RUIN = "OvershootRuin"


@dataclass(frozen=True)
class SimConfig:
    n_paths: int = 200_000
    dt: float = 1e-3
    horizon: float = 150.0
    seed: int = 0
    scheme: Scheme = Scheme.EVENT
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        if int(self.n_paths) < 1:
            raise ConfigError(f"n_paths must be at least 1, got {self.n_paths!r}")
        if not self.dt > 0:
            raise ConfigError(f"dt must be positive, got {self.dt!r}")
        if not self.horizon > 0:
            raise ConfigError(f"horizon must be positive, got {self.horizon!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if int(self.workers) < 1:
            raise ConfigError("workers must be at least 1")

    def replace(self, **kw):
        d = asdict(self)
        d.update(kw)
        return SimConfig(**d)


@dataclass(frozen=True)
class MCEstimate:
    """Sample mean with its standard error.

    ``truncation_bound`` bounds the contribution discarded by stopping the
    simulation at the horizon.
    """

    mean: float
    stderr: float
    n: int
    truncation_bound: float = 0.0
    seed: int | None = None
    dt: float | None = None
    label: str = ""

    def _gap(self, target):
        # rounding slack so that exact-zero functionals compare equal
        slack = 1e-12 * max(1.0, abs(target))
        return max(abs(self.mean - target) - self.truncation_bound - slack, 0.0)

    def within(self, target, k=3.0):
        return self._gap(target) <= k * self.stderr

    def zscore(self, target):
        gap = self._gap(target)
        if self.stderr == 0:
            return 0.0 if gap == 0 else math.inf
        return gap / self.stderr

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class BarrierEstimates:
    dividends: MCEstimate
    ruin_transform: MCEstimate


@dataclass(frozen=True)
class DoublyEstimates:
    dividends: MCEstimate
    injections: MCEstimate


@dataclass(frozen=True)
class OccupationEstimate:
    """Discounted occupation of ``[0, a]`` by the doubly reflected process.

    ``density`` is the mean discounted time per unit length in each bin and
    ``atom`` the mean discounted time spent exactly at the upper barrier.
    """

    edges: np.ndarray
    density: np.ndarray
    density_stderr: np.ndarray
    atom: MCEstimate

    @property
    def centers(self):
        return 0.5 * (self.edges[1:] + self.edges[:-1])


@dataclass(frozen=True)
class PathEvent:
    time: float
    pre_level: float
    post_level: float
    dL: float
    dR: float


@dataclass
class SimPath:
    events: list = field(default_factory=list)
    ruin_time: float | None = None
    disc_L: float = 0.0
    disc_R: float = 0.0

    def to_dict(self):
        return {
            "events": [asdict(e) for e in self.events],
            "ruin_time": self.ruin_time,
            "disc_L": self.disc_L,
            "disc_R": self.disc_R,
        }


# ---------------------------------------------------------------- sampling


def sample_stable_increment(alpha, scale, dt, rng, size=None):
    """Increment over ``dt`` of the spectrally negative stable process with
    ``E exp(theta X_t) = exp(t (scale theta)^alpha)``.

    Chambers-Mallows-Stuck with skewness -1. The standard variate has
    Laplace exponent ``theta^alpha / |cos(pi alpha / 2)|``, hence the
    ``|cos|^(1/alpha)`` rescaling.
    """
    if not 1.0 < alpha <= 2.0:
        raise DomainError(f"alpha must lie in (1, 2], got {alpha!r}")
    v = rng.uniform(-0.5 * np.pi, 0.5 * np.pi, size)
    w = rng.standard_exponential(size)
    if alpha == 2.0:
        std = 2.0 * np.sin(v) * np.sqrt(w)
    else:
        t = -math.tan(0.5 * np.pi * alpha)
        b = math.atan(t) / alpha
        s = (1.0 + t * t) ** (0.5 / alpha)
        std = (s * np.sin(alpha * (v + b)) / np.cos(v) ** (1.0 / alpha)
               * (np.cos(v - alpha * (v + b)) / w) ** ((1.0 - alpha) / alpha))
    c = scale * dt ** (1.0 / alpha) * abs(math.cos(0.5 * np.pi * alpha)) ** (1.0 / alpha)
    return c * std


def _claims(model):
    """(intensity, sampler) of the compound Poisson part, or (0, None)."""
    if isinstance(model, (CramerLundbergExp, HyperExpJumpDiffusion)):
        weights = np.asarray(model.weights)
        means = 1.0 / np.asarray(model.rates)

        def sample(rng, n):
            e = rng.standard_exponential(n)
            if len(weights) == 1:
                return e * means[0]
            k = np.searchsorted(np.cumsum(weights), rng.uniform(size=n), side="right")
            return e * means[np.minimum(k, len(weights) - 1)]

        return float(model.lam), sample
    return 0.0, None


# ------------------------------------------------------- event-driven engine


def _event_block(model, rng, n, x, a, q, horizon, upper, lower, bins=None):
    """Simulate ``n`` paths exactly; returns a dict of per-path arrays.

    ``upper`` is "reflect", "absorb" or None; ``lower`` is "ruin" or
    "reflect". ``bins`` (edges) turns on occupation accounting.
    """
    d = model.variation.drift
    lam, claim = _claims(model)
    t = np.zeros(n)
    lev = np.full(n, float(x))
    disc_l = np.zeros(n)
    disc_r = np.zeros(n)
    hit = np.full(n, np.inf)
    ruin = np.full(n, np.inf)
    ruin_lev = np.zeros(n)
    active = np.ones(n, dtype=bool)
    occ = atom = None
    if bins is not None:
        occ = np.zeros((n, len(bins) - 1))
        atom = np.zeros(n)
    if upper == "reflect" and x > a:
        disc_l += x - a
        lev[:] = a
    if upper == "absorb" and x >= a:
        hit[:] = 0.0
        active[:] = False

    while True:
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        tt, ll = t[idx], lev[idx]
        tc = tt + rng.exponential(1.0 / lam, idx.size)
        tend = np.minimum(tc, horizon)
        if upper is None:
            th = np.full(idx.size, np.inf)
        else:
            th = tt + (a - ll) / d
        climb_end = np.minimum(th, tend)
        if occ is not None:
            # the level climbs linearly from ll at rate d on [tt, climb_end]
            s0 = np.clip(tt[:, None] + (bins[None, :-1] - ll[:, None]) / d, tt[:, None], climb_end[:, None])
            s1 = np.clip(tt[:, None] + (bins[None, 1:] - ll[:, None]) / d, tt[:, None], climb_end[:, None])
            occ[idx] += (np.exp(-q * s0) - np.exp(-q * s1)) / q
        newl = ll + d * (tend - tt)
        if upper == "reflect":
            at_top = th < tend
            sel = idx[at_top]
            gain = (np.exp(-q * th[at_top]) - np.exp(-q * tend[at_top])) / q
            disc_l[sel] += d * gain
            if atom is not None:
                atom[sel] += gain
            newl = np.where(at_top, a, newl)
        elif upper == "absorb":
            up = th <= tend
            hit[idx[up]] = th[up]
            active[idx[up]] = False
        done = tc >= horizon
        active[idx[done]] = False
        t[idx] = tend
        lev[idx] = newl
        # claims for the paths still alive
        live = active[idx] & ~done
        j = idx[live]
        if j.size == 0:
            continue
        post = lev[j] - claim(rng, j.size)
        neg = post < 0
        if lower == "ruin":
            ruin[j[neg]] = t[j[neg]]
            ruin_lev[j[neg]] = post[neg]
            active[j[neg]] = False
        else:
            disc_r[j[neg]] += np.exp(-q * t[j[neg]]) * -post[neg]
            post = np.where(neg, 0.0, post)
        lev[j] = post
    out = {"disc_L": disc_l, "disc_R": disc_r, "hit": hit, "ruin": ruin, "ruin_level": ruin_lev}
    if occ is not None:
        out["occ"] = occ
        out["atom"] = atom
    return out


# -------------------------------------------------------------- Euler engine


def _increments(model, rng, n, dt):
    """Continuous-part increment with its running max/min over one step,
    plus the total jump size of the step."""
    if isinstance(model, StableSpectralNeg) and model.alpha < 2.0:
        inc = sample_stable_increment(model.alpha, model.sigma, dt, rng, n)
        return inc, np.maximum(inc, 0.0), np.minimum(inc, 0.0), None
    sig = model.gaussian_sigma
    if isinstance(model, StableSpectralNeg):
        drift = 0.0
    elif isinstance(model, CramerLundbergExp):
        drift = model.p
    else:
        drift = model.mu
    if sig > 0:
        inc = drift * dt + sig * math.sqrt(dt) * rng.standard_normal(n)
        # extremes of the Brownian bridge with these endpoints
        spread = -2.0 * sig * sig * dt
        top = 0.5 * (inc + np.sqrt(inc * inc + spread * np.log(rng.uniform(size=n))))
        bot = 0.5 * (inc - np.sqrt(inc * inc + spread * np.log(rng.uniform(size=n))))
    else:
        inc = np.full(n, drift * dt)
        top, bot = np.maximum(inc, 0.0), np.minimum(inc, 0.0)
    lam, claim = _claims(model)
    jumps = None
    if lam > 0:
        k = rng.poisson(lam * dt, n)
        jumps = np.zeros(n)
        hot = np.flatnonzero(k)
        if hot.size:
            sizes = claim(rng, int(k[hot].sum()))
            jumps[hot] = np.add.reduceat(sizes, np.concatenate(([0], np.cumsum(k[hot])[:-1])))
    return inc, top, bot, jumps


def _euler_block(model, rng, n, x, a, q, horizon, dt, upper, lower):
    t = 0.0
    lev = np.full(n, float(x))
    disc_l = np.zeros(n)
    disc_r = np.zeros(n)
    hit = np.full(n, np.inf)
    ruin = np.full(n, np.inf)
    ruin_lev = np.zeros(n)
    active = np.ones(n, dtype=bool)
    if upper == "reflect" and x > a:
        disc_l += x - a
        lev[:] = a
    if upper == "absorb" and x >= a:
        hit[:] = 0.0
        active[:] = False
    n_steps = int(math.ceil(horizon / dt - 1e-9))
    idx = np.flatnonzero(active)
    for k in range(n_steps):
        if idx.size == 0:
            break
        h = min(dt, horizon - k * dt)
        mid = math.exp(-q * (t + 0.5 * h))
        inc, top, bot, jumps = _increments(model, rng, idx.size, h)
        ll = lev[idx]
        if lower == "ruin":
            crossed = ll + bot < 0
            if np.any(crossed):
                c = idx[crossed]
                ruin[c] = t + 0.5 * h
                ruin_lev[c] = 0.0
                active[c] = False
        dl = np.zeros(idx.size)
        dr = np.zeros(idx.size)
        if upper == "reflect":
            dl = np.maximum(ll + top - a, 0.0)
        elif upper == "absorb":
            up = (ll + top >= a) & active[idx]
            hit[idx[up]] = t + 0.5 * h
            active[idx[up]] = False
        if lower == "reflect":
            dr = np.maximum(-(ll + bot), 0.0)
        new = ll + inc - dl + dr
        if upper == "reflect":
            over = np.maximum(new - a, 0.0)
            dl += over
            new -= over
        if lower == "reflect":
            under = np.maximum(-new, 0.0)
            dr += under
            new += under
        disc_l[idx] += mid * dl
        t_end = t + h
        if jumps is not None:
            new -= jumps
            neg = new < 0
            if lower == "ruin":
                c = neg & active[idx]
                ruin[idx[c]] = t_end
                ruin_lev[idx[c]] = new[c]
                active[idx[c]] = False
            else:
                dr = dr * mid
                dr[neg] += math.exp(-q * t_end) * -new[neg]
                new[neg] = 0.0
                disc_r[idx] += dr
                dr = None
        if dr is not None:
            disc_r[idx] += mid * dr
        live = active[idx]
        lev[idx[live]] = new[live]
        t = t_end
        idx = idx[live]
    return {"disc_L": disc_l, "disc_R": disc_r, "hit": hit, "ruin": ruin, "ruin_level": ruin_lev}


# ------------------------------------------------------------------ driver


def _check_scheme(model, cfg):
    if cfg.scheme is Scheme.EVENT:
        var = model.variation
        if not var.bounded:
            raise ConfigError(
                f"event-driven simulation needs bounded variation; {model.label()} has "
                "unbounded variation (use the euler scheme)"
            )
        if not var.drift > 0:
            raise ConfigError("event-driven simulation needs a positive drift")


def _warn_horizon(q, cfg):
    if q * cfg.horizon < 10:
        warnings.warn(
            f"q * horizon = {q * cfg.horizon:.3g} < 10: truncation error may be material",
            RuntimeWarning,
            stacklevel=3,
        )


def _run(model, cfg, x, a, q, upper, lower, bins=None):
    """Run all blocks and concatenate per-path outputs in block order."""
    _check_scheme(model, cfg)
    n = int(cfg.n_paths)
    sizes = [BLOCK_SIZE] * (n // BLOCK_SIZE)
    if n % BLOCK_SIZE:
        sizes.append(n % BLOCK_SIZE)
    seeds = np.random.SeedSequence(int(cfg.seed)).spawn(len(sizes))

    def block(i):
        rng = np.random.default_rng(seeds[i])
        if cfg.scheme is Scheme.EVENT:
            return _event_block(model, rng, sizes[i], x, a, q, cfg.horizon, upper, lower, bins)
        if bins is not None:
            raise ConfigError("occupation accounting is only available for the event scheme")
        return _euler_block(model, rng, sizes[i], x, a, q, cfg.horizon, cfg.dt, upper, lower)

    if cfg.workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=int(cfg.workers)) as pool:
            parts = list(pool.map(block, range(len(sizes))))
    else:
        parts = [block(i) for i in range(len(sizes))]
    return {key: np.concatenate([p[key] for p in parts]) for key in parts[0]}


def _estimate(values, cfg, truncation=0.0, label=""):
    values = np.asarray(values, dtype=float)
    n = values.size
    std = float(np.std(values, ddof=1)) if n > 1 else 0.0
    return MCEstimate(
        mean=float(np.mean(values)),
        stderr=std / math.sqrt(n),
        n=n,
        truncation_bound=float(truncation),
        seed=int(cfg.seed),
        dt=None if cfg.scheme is Scheme.EVENT else float(cfg.dt),
        label=label,
    )


def _level_bound(model, q):
    """Upper bound on expected discounted dividends from any state (per unit
    of tail discount), used for truncation bounds."""
    var = model.variation
    if var.bounded:
        return var.drift / q
    # v_a(a) <= W(a)/W'(a) <= 1/Phi(q) plus the drift contribution bound
    return 1.0 / phi(model, q) + max(model.psi_prime_zero, 0.0) / q


def simulate_reflected_barrier(model: LevyModel, a: float, x: float, q: float,
                               cfg: SimConfig) -> BarrierEstimates:
    """Discounted dividends until ruin and ``E[exp(-q sigma_a)]`` under the
    barrier strategy at ``a``."""
    if x < 0 or a < 0:
        raise DomainError("x and a must be nonnegative")
    _warn_horizon(q, cfg)
    out = _run(model, cfg, x, a, q, "reflect", "ruin")
    tail = math.exp(-q * cfg.horizon)
    div = _estimate(out["disc_L"], cfg, tail * _level_bound(model, q), "dividends")
    rt = _estimate(np.exp(-q * out["ruin"]), cfg, tail, "ruin_transform")
    return BarrierEstimates(div, rt)


def simulate_doubly_reflected(model: LevyModel, a: float, x: float, q: float,
                              cfg: SimConfig) -> DoublyEstimates:
    """Discounted dividends and capital injections under the strategy that
    reflects at 0 and at ``a``."""
    if x < 0 or a < 0:
        raise DomainError("x and a must be nonnegative")
    _warn_horizon(q, cfg)
    out = _run(model, cfg, x, a, q, "reflect", "reflect")
    tail = math.exp(-q * cfg.horizon)
    var = model.variation
    if var.bounded:
        lb = var.drift / q
        rb = (var.drift - model.psi_prime_zero) / q + var.drift / q
    else:
        lb = _level_bound(model, q) + model.gaussian_sigma**2 / q
        rb = lb + abs(model.psi_prime_zero) / q
    div = _estimate(out["disc_L"], cfg, tail * lb, "dividends")
    inj = _estimate(out["disc_R"], cfg, tail * rb, "injections")
    return DoublyEstimates(div, inj)


def simulate_exit_functionals(model: LevyModel, x: float, a: float, q: float, cfg: SimConfig,
                              estimand) -> MCEstimate:
    """Monte Carlo counterpart of the fluctuation identities.

    ``x`` is the starting value of the process each identity refers to:
    ``X_0`` for ``UpCrossFirst``, ``ReflectedInfEntrance`` and
    ``OvershootRuin``; the distance below the supremum for
    ``ReflectedSupEntrance``; the surplus under the barrier for
    ``OvershootReflected``.
    """
    est = Estimand(estimand)
    _warn_horizon(q, cfg)
    tail = math.exp(-q * cfg.horizon)
    if est is not Estimand.OVERSHOOT_RUIN and not 0 <= x <= a:
        raise DomainError(f"start must lie in [0, a], got {x!r}")
    if est is Estimand.UP_CROSS_FIRST:
        out = _run(model, cfg, x, a, q, "absorb", "ruin")
        vals = np.where(out["hit"] < out["ruin"], np.exp(-q * out["hit"]), 0.0)
        bound = tail
    elif est is Estimand.REFLECTED_INF_ENTRANCE:
        out = _run(model, cfg, x, a, q, "absorb", "reflect")
        vals = np.exp(-q * out["hit"])
        bound = tail
    elif est is Estimand.REFLECTED_SUP_ENTRANCE:
        out = _run(model, cfg, a - x, a, q, "reflect", "ruin")
        vals = np.exp(-q * out["ruin"])
        bound = tail
    elif est is Estimand.OVERSHOOT_REFLECTED:
        out = _run(model, cfg, x, a, q, "reflect", "ruin")
        vals = np.where(np.isfinite(out["ruin"]), np.exp(-q * out["ruin"]) * out["ruin_level"], 0.0)
        bound = tail * model.mean_claim
    else:
        if x < 0:
            raise DomainError(f"x must be nonnegative, got {x!r}")
        out = _run(model, cfg, x, math.inf, q, None, "ruin")
        vals = np.where(np.isfinite(out["ruin"]), np.exp(-q * out["ruin"]) * out["ruin_level"], 0.0)
        bound = tail * model.mean_claim
    return _estimate(vals, cfg, bound, est.value)


def simulate_occupation(model: LevyModel, a: float, x: float, q: float, cfg: SimConfig,
                        n_bins: int = 20) -> OccupationEstimate:
    """Discounted occupation histogram of the doubly reflected process
    (event scheme only)."""
    if not 0 <= x <= a or not a > 0:
        raise DomainError("need 0 <= x <= a with a > 0")
    edges = np.linspace(0.0, a, n_bins + 1)
    out = _run(model, cfg, x, a, q, "reflect", "reflect", bins=edges)
    width = np.diff(edges)
    occ = out["occ"]
    n = occ.shape[0]
    dens = occ.mean(axis=0) / width
    err = occ.std(axis=0, ddof=1) / math.sqrt(n) / width
    return OccupationEstimate(edges, dens, err, _estimate(out["atom"], cfg, 0.0, "atom"))


# ----------------------------------------------------------- path recorder


def _record_event_path(model, rng, x, a, q, horizon, lower):
    d = model.variation.drift
    lam, claim = _claims(model)
    path = SimPath()
    t, lev = 0.0, float(x)
    if x > a:
        path.events.append(PathEvent(0.0, lev, a, lev - a, 0.0))
        path.disc_L += lev - a
        lev = a
    while True:
        tc = t + rng.exponential(1.0 / lam)
        tend = min(tc, horizon)
        th = t + (a - lev) / d
        if th < tend:
            paid = d * (tend - th)
            path.disc_L += d * (math.exp(-q * th) - math.exp(-q * tend)) / q
            path.events.append(PathEvent(tend, a + paid, a, paid, 0.0))
            lev = a
        else:
            lev = lev + d * (tend - t)
        t = tend
        if tc >= horizon:
            return path
        post = lev - float(claim(rng, 1)[0])
        if post >= 0:
            path.events.append(PathEvent(t, lev, post, 0.0, 0.0))
            lev = post
        elif lower == "ruin":
            path.events.append(PathEvent(t, lev, post, 0.0, 0.0))
            path.ruin_time = t
            return path
        else:
            path.events.append(PathEvent(t, post, 0.0, 0.0, -post))
            path.disc_R += math.exp(-q * t) * -post
            lev = 0.0


def _record_euler_path(model, rng, x, a, q, horizon, dt, lower):
    path = SimPath()
    lev, t = float(x), 0.0
    if x > a:
        path.events.append(PathEvent(0.0, lev, a, lev - a, 0.0))
        path.disc_L += lev - a
        lev = a
    for k in range(int(math.ceil(horizon / dt - 1e-9))):
        h = min(dt, horizon - k * dt)
        mid = math.exp(-q * (t + 0.5 * h))
        inc, top, bot, jumps = (float(v[0]) if v is not None else None
                                for v in _increments(model, rng, 1, h))
        if lower == "ruin" and lev + bot < 0:
            path.ruin_time = t + 0.5 * h
            path.events.append(PathEvent(path.ruin_time, lev, 0.0, 0.0, 0.0))
            return path
        dl = max(lev + top - a, 0.0)
        dr = max(-(lev + bot), 0.0) if lower == "reflect" else 0.0
        pre = lev + inc
        new = pre - dl + dr
        over, under = max(new - a, 0.0), max(-new, 0.0) if lower == "reflect" else 0.0
        dl, dr = dl + over, dr + under
        new = new - over + under
        t += h
        if jumps:
            pre = new
            new -= jumps
            if new < 0:
                if lower == "ruin":
                    path.ruin_time = t
                    path.events.append(PathEvent(t, pre, new, dl, 0.0))
                    path.disc_L += mid * dl
                    return path
                dr_j = -new
                path.disc_R += math.exp(-q * t) * dr_j
                path.events.append(PathEvent(t, new, 0.0, 0.0, dr_j))
                new = 0.0
        if dl > 0 or dr > 0:
            path.events.append(PathEvent(t, pre, new, dl, dr))
        path.disc_L += mid * dl
        path.disc_R += mid * dr
        lev = new
    return path


def sample_paths(model: LevyModel, a: float, x: float, q: float, cfg: SimConfig,
                 n: int | None = None, doubly: bool = True) -> list:
    """Event logs of individual controlled paths (at most ``MAX_DUMP``).

    Uses the first child stream of ``cfg.seed``; the logs are for inspection
    and invariant checks, not for estimation.
    """
    _check_scheme(model, cfg)
    n = min(int(n if n is not None else cfg.n_paths), MAX_DUMP)
    rng = np.random.default_rng(np.random.SeedSequence(int(cfg.seed)).spawn(1)[0])
    lower = "reflect" if doubly else "ruin"
    if cfg.scheme is Scheme.EVENT:
        return [_record_event_path(model, rng, x, a, q, cfg.horizon, lower) for _ in range(n)]
    return [_record_euler_path(model, rng, x, a, q, cfg.horizon, cfg.dt, lower) for _ in range(n)]


def dump_paths(paths, fh):
    """Write paths as newline-delimited JSON."""
    for p in paths[:MAX_DUMP]:
        fh.write(json.dumps(p.to_dict()) + "\n")
