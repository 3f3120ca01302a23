"""Harnack bounds u(x1, t1) <= C u(x2, t2) on the unit hyperbolic space.

Two routes: the closed form obtained from the certified multiplier bounds
with the optimal constant beta, and the general bound obtained by
integrating any multiplier curve (t, beta(t), gamma(t)):

    C = exp( r^2 / (4 (t2-t1)^2) int 1/beta dt + int gamma dt ).

All constants are formed in log space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .kernel import eval_kernel


@dataclass(frozen=True)
class HarnackQuery:
    n: int
    t1: float
    t2: float
    r: float

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"dimension must be >= 1, got {self.n}")
        if not 0 < self.t1 < self.t2:
            raise DomainError(f"need 0 < t1 < t2, got t1={self.t1}, t2={self.t2}")
        if not self.r >= 0:
            raise DomainError(f"r must be >= 0, got {self.r}")


@dataclass(frozen=True)
class MultiplierCurve:
    t: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        beta = np.asarray(self.beta, dtype=float)
        gamma = np.asarray(self.gamma, dtype=float)
        if not (t.shape == beta.shape == gamma.shape) or t.ndim != 1 or t.size < 2:
            raise DomainError("curve samples must be 1-d arrays of equal length >= 2")
        if np.any(np.diff(t) <= 0):
            raise DomainError("curve sample times must be strictly increasing")
        if np.any((beta <= 0) | (beta >= 1)):
            raise DomainError("curve beta samples must lie in (0, 1)")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "gamma", gamma)

    @classmethod
    def sample(cls, beta_fn, gamma_fn, t1, t2, panels=512):
        t = np.linspace(t1, t2, panels + 1)
        beta = np.broadcast_to(np.asarray(beta_fn(t), dtype=float), t.shape)
        gamma = np.broadcast_to(np.asarray(gamma_fn(t), dtype=float), t.shape)
        return cls(t, beta.copy(), gamma.copy())


def log_harnack_constant(q):
    dt = q.t2 - q.t1
    power = q.n / 2.0 if q.n % 2 else (q.n + 1) / 2.0
    return (power * math.log(q.t2 / q.t1) + q.r ** 2 / (4.0 * dt)
            + (q.n - 1) ** 2 * dt / 4.0 + (q.n - 1) * q.r / 2.0)


def harnack_constant(q):
    """Sharp constant: (t2/t1)^p exp(r^2/(4 dt) + (n-1)^2 dt/4 + (n-1) r/2),
    p = n/2 for odd n and (n+1)/2 for even n."""
    return math.exp(log_harnack_constant(q))


def optimal_beta(n, t1, t2, r):
    """Constant beta minimising r^2/(4 beta dt) + (n-1)^2 dt / (4 (1-beta))."""
    if r <= 0:
        raise DomainError("the optimal beta degenerates to 0 at r = 0")
    return 1.0 / (1.0 + (n - 1) * (t2 - t1) / r)


def _restrict(curve, t1, t2):
    t = curve.t
    if t1 < t[0] - 1e-12 * abs(t[0]) or t2 > t[-1] + 1e-12 * abs(t[-1]):
        raise DomainError(f"curve covers [{t[0]}, {t[-1]}], not [{t1}, {t2}]")
    inner = (t > t1) & (t < t2)
    ts = np.concatenate([[t1], t[inner], [t2]])
    inv_beta = np.interp(ts, t, 1.0 / curve.beta)
    gamma = np.interp(ts, t, curve.gamma)
    return ts, inv_beta, gamma


def log_harnack_along_curve(curve, t1, t2, r):
    if not t1 < t2:
        raise DomainError(f"need t1 < t2, got {t1}, {t2}")
    ts, inv_beta, gamma = _restrict(curve, t1, t2)
    dt = t2 - t1
    return r * r / (4.0 * dt * dt) * np.trapezoid(inv_beta, ts) + np.trapezoid(gamma, ts)


def harnack_along_curve(curve, t1, t2, r):
    return math.exp(log_harnack_along_curve(curve, t1, t2, r))


def verify_harnack_on_kernel(n, q, center_offset, quad=None):
    """Check the closed-form constant on u(x, t) = K_n(t, d(x, y)).

    x1, x2 and y lie on one geodesic: x2 at 0, x1 at r and y at the signed
    position ``center_offset`` (positive towards x1). Returns
    (margin, scale) with margin = C u(x2, t2) - u(x1, t1) and
    scale = max(C u(x2, t2), u(x1, t1)).
    """
    if n != q.n:
        raise DomainError("dimension mismatch between n and the query")
    d1 = abs(q.r - center_offset)
    d2 = abs(center_offset)
    log_u1 = eval_kernel(n, q.t1, d1, quad).log_value
    log_u2 = eval_kernel(n, q.t2, d2, quad).log_value
    lhs = log_harnack_constant(q) + log_u2
    scale = math.exp(max(lhs, log_u1))
    margin = math.exp(lhs) - math.exp(log_u1)
    return margin, scale
