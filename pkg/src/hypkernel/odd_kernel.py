"""Heat kernel of the unit hyperbolic space H^n for odd n = 2m + 1.

    K_n(t, r) = (4 pi t)^(-n/2) exp(-(n-1)^2 t / 4 - r^2 / (4t)) alpha_n(t, r)

with alpha_{2m+1} a polynomial in t whose coefficients are P_{m,i}(f_1..f_m).
Each monomial of P_{m,i} has weighted degree m, so with g_j = f_j e^{j r}

    alpha_{2m+1} = e^{-m r} sum_i t^i P_{m,i}(g_1..g_m)

and everything is evaluated in log space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError
from .poly_engine import compiled_table
from .special_functions import scaled_ladder

MAX_ODD_DIMENSION = 31


@dataclass(frozen=True)
class RadialPoint:
    t: float
    r: float

    def __post_init__(self):
        if not np.all(np.asarray(self.t) > 0):
            raise DomainError("time t must be > 0")
        if not np.all(np.asarray(self.r) >= 0):
            raise DomainError("distance r must be >= 0")


def _unwrap(x):
    x = np.asarray(x)
    return float(x) if x.ndim == 0 else x


@dataclass(frozen=True)
class KernelEval:
    """Kernel value with analytic radial and time log-derivatives."""

    log_value: object
    dlog_dr: object
    dlog_dt: object

    @property
    def value(self):
        return _unwrap(np.exp(self.log_value))

    def as_dict(self):
        def conv(x):
            x = np.asarray(x)
            return x.tolist() if x.ndim else float(x)
        return {
            "value": conv(self.value),
            "log_value": conv(self.log_value),
            "dlog_dr": conv(self.dlog_dr),
            "dlog_dt": conv(self.dlog_dt),
        }


class AlphaEval(NamedTuple):
    alpha: object
    dlog_dr: object
    dlog_dt: object
    log_alpha: object


def _alpha_parts(m, t, r):
    """log alpha_{2m+1}, (log alpha)_r, (log alpha)_t, broadcasting t against r."""
    t = np.asarray(t, dtype=float)
    r = np.asarray(r, dtype=float)
    if m == 0:
        shape = np.broadcast(t, r).shape
        z = np.zeros(shape)
        return z, z.copy(), z.copy()
    polys, dpolys = compiled_table(m)
    g = scaled_ladder(m + 1, r)
    A = np.zeros(np.broadcast(t, r).shape)
    At = np.zeros_like(A)
    D = np.zeros_like(A)
    # Horner in t for the value, its t-derivative, and the r-derivative numerator
    for i in range(m - 1, -1, -1):
        At = At * t + A
        A = A * t + polys[i](g[:m])
        D = D * t + dpolys[i](g)
    half_sinh_scaled = 0.5 * (1.0 - np.exp(-2.0 * r))   # sinh(r) e^{-r}
    log_alpha = np.log(A) - m * r
    dlog_dr = -half_sinh_scaled * D / A
    dlog_dt = At / A
    return log_alpha, dlog_dr, dlog_dt


def eval_alpha_odd(m, t, r):
    """alpha_{2m+1}(t, r) with its analytic log-derivatives.

    ``m = 0`` gives alpha_1 = 1. ``t`` and ``r`` broadcast against each other.
    """
    if m < 0:
        raise DomainError(f"ladder index must be >= 0, got {m}")
    RadialPoint(t, r)
    la, dr, dt = _alpha_parts(m, t, r)
    return AlphaEval(_unwrap(np.exp(la)), _unwrap(dr), _unwrap(dt), _unwrap(la))


def eval_kernel_odd(n, t, r):
    """K_n(t, r) for odd n >= 1, as a KernelEval."""
    if n < 1 or n % 2 == 0:
        raise DomainError(f"odd kernel needs odd n >= 1, got {n}; use even_kernel for even n")
    if n > MAX_ODD_DIMENSION:
        raise DomainError(f"dimension {n} exceeds the supported maximum {MAX_ODD_DIMENSION}")
    RadialPoint(t, r)
    t = np.asarray(t, dtype=float)
    r = np.asarray(r, dtype=float)
    la, a_r, a_t = _alpha_parts((n - 1) // 2, t, r)
    log_value = -0.5 * n * np.log(4 * math.pi * t) - (n - 1) ** 2 * t / 4 - r * r / (4 * t) + la
    dlog_dr = -r / (2 * t) + a_r
    dlog_dt = -n / (2 * t) - (n - 1) ** 2 / 4 + r * r / (4 * t * t) + a_t
    return KernelEval(_unwrap(log_value), _unwrap(dlog_dr), _unwrap(dlog_dt))
