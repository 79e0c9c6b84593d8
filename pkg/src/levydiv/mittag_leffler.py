"""Mittag-Leffler functions ``E_{alpha,beta}`` and their derivatives.

For nonnegative arguments every series term is nonnegative once
``alpha * n + beta > 0``, so the power series is summed in log space with no
cancellation and stays accurate up to the overflow threshold of ``exp``.
The exponential asymptotic form is only used when the series would need
more than :data:`MAX_TERMS` terms. Large negative arguments (alternating
series) are summed in extended precision with mpmath.
"""

from __future__ import annotations

import math

import mpmath
import numpy as np
from scipy.special import gammaln, rgamma

__all__ = ["mittag_leffler", "ml2", "ml_derivative", "ml_asymptotic", "MAX_TERMS"]

MAX_TERMS = 500
SERIES_RTOL = 1e-17
_ASYMPTOTIC_TERMS = 8


def _series_log_terms(alpha, beta, order, m, logz):
    """log|term_m| for the order-th derivative series at |z| = exp(logz)."""
    arg = alpha * (m + order) + beta
    with np.errstate(invalid="ignore", divide="ignore"):
        out = gammaln(m + order + 1.0) - gammaln(m + 1.0) + m * logz
        pos = arg > 0
        out = np.where(pos, out - gammaln(np.where(pos, arg, 1.0)), -np.inf)
    return out


def _series(alpha, beta, order, z):
    """Series value for a scalar z, or None when MAX_TERMS is not enough."""
    if z == 0.0:
        return math.factorial(order) * float(rgamma(alpha * order + beta))
    sign = -1.0 if z < 0 else 1.0
    logz = math.log(abs(z))
    n_terms = 64
    while True:
        m = np.arange(n_terms, dtype=float)
        logt = _series_log_terms(alpha, beta, order, m, logz)
        arg = alpha * (m + order) + beta
        # nonpositive Gamma arguments: small m only, evaluate directly
        small = arg <= 0
        peak = np.max(logt[~small]) if np.any(~small) else -np.inf
        tail_ok = logt[-1] < peak + math.log(SERIES_RTOL) and logt[-1] < logt[-2]
        if tail_ok or n_terms >= MAX_TERMS:
            break
        n_terms = min(2 * n_terms, MAX_TERMS)
    if not tail_ok:
        return None
    signs = sign ** m
    with np.errstate(over="ignore"):
        vals = signs * np.exp(logt - peak)
        total = math.fsum(vals[~small]) * math.exp(peak) if math.isfinite(peak) else 0.0
    if np.any(small):
        ms = m[small]
        coef = np.exp(gammaln(ms + order + 1.0) - gammaln(ms + 1.0))
        total += math.fsum(coef * z**ms * rgamma(arg[small]))
    return total


def _mp_series(alpha, beta, order, z):
    """Alternating series in extended precision (large negative z)."""
    s = abs(z) ** (1.0 / alpha)
    dps = 20 + int(s / 2.0) + order * 2
    with mpmath.workdps(dps):
        a, b, zz = mpmath.mpf(alpha), mpmath.mpf(beta), mpmath.mpf(z)
        total = mpmath.mpf(0)
        m = 0
        tiny = mpmath.mpf(10) ** (-dps)
        big = mpmath.mpf(0)
        while True:
            coef = mpmath.factorial(m + order) / mpmath.factorial(m)
            term = coef * zz**m * mpmath.rgamma(a * (m + order) + b)
            total += term
            big = max(big, abs(term))
            if m > 5 and abs(term) < tiny * max(big, 1) and m > s:
                break
            m += 1
            if m > 100000:
                break
        return float(total)


def ml_asymptotic(alpha, beta, z, order=0):
    """Asymptotic form of ``d^order/dz^order E_{alpha,beta}(z)`` for large z > 0.

    ``E ~ z**((1-beta)/alpha) exp(z**(1/alpha)) / alpha
    - sum_k z**(-k) / Gamma(beta - alpha k)``, differentiated term by term.
    """
    expo = {(1.0 - beta) / alpha: 1.0 / alpha}
    alg = {-float(k): -float(rgamma(beta - alpha * k)) for k in range(1, _ASYMPTOTIC_TERMS + 1)}
    for _ in range(order):
        nxt = {}
        for p, a in expo.items():
            nxt[p - 1.0] = nxt.get(p - 1.0, 0.0) + p * a
            q = p + 1.0 / alpha - 1.0
            nxt[q] = nxt.get(q, 0.0) + a / alpha
        expo = {p: a for p, a in nxt.items() if a != 0.0}
        alg = {p - 1.0: p * a for p, a in alg.items() if p != 0.0}
    logz = math.log(z)
    s = z ** (1.0 / alpha)
    ex = math.fsum(a * math.exp(s + p * logz) for p, a in expo.items())
    return ex + math.fsum(a * math.exp(p * logz) for p, a in alg.items())


def _scalar(alpha, beta, order, z):
    z = float(z)
    if z < 0 and abs(z) ** (1.0 / alpha) > 8.0:
        return _mp_series(alpha, beta, order, z)
    val = _series(alpha, beta, order, z)
    if val is None:
        if z < 0:
            return _mp_series(alpha, beta, order, z)
        return ml_asymptotic(alpha, beta, z, order)
    return val


def ml_derivative(alpha, beta, z, order=0):
    """``d^order/dz^order E_{alpha,beta}(z)``; scalar or array ``z``."""
    z_arr = np.asarray(z, dtype=float)
    out = np.array([_scalar(alpha, beta, order, v) for v in z_arr.ravel()])
    out = out.reshape(z_arr.shape)
    return float(out) if out.ndim == 0 else out


def ml2(alpha, beta, z):
    """Two-parameter Mittag-Leffler function ``sum z**n / Gamma(alpha n + beta)``."""
    return ml_derivative(alpha, beta, z, 0)


def mittag_leffler(alpha, y, order=0):
    """``E_alpha(y) = sum y**n / Gamma(1 + alpha n)`` or its ``order``-th derivative."""
    if order < 0 or int(order) != order:
        raise ValueError(f"order must be a nonnegative integer, got {order!r}")
    return ml_derivative(alpha, 1.0, y, int(order))
