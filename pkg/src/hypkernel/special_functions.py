"""The ladder f_1, f_2, ... of radial functions on the unit hyperbolic space.

With sigma = cosh r the ladder is

    f_1 = r / sinh r,        f_{m+1} = -d f_m / d sigma,

and it satisfies the three-term relation

    m^2 f_m - (2m+1) sigma f_{m+1} + (sigma^2 - 1) f_{m+2} = 0.

Evaluation uses three regimes:

* ``r < SERIES_THRESHOLD``: the exact even power series about r = 0.
* ``SERIES_THRESHOLD <= r < UPWARD_THRESHOLD``: backward (Miller) recurrence
  normalised by f_1. The upward recurrence is unstable here: the companion
  solution built from 1/sinh r outgrows f by a factor coth(r/2)^2 per step.
* ``r >= UPWARD_THRESHOLD``: forward recurrence on scaled values
  g_m = f_m e^{m r}, which stay O(r) for large r and never underflow.

All evaluators return scaled values so that callers working in log space
(the kernels) can go to arbitrarily large r.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import AccuracyError, DomainError

SERIES_THRESHOLD = 0.25
UPWARD_THRESHOLD = 3.0
SERIES_ORDER = 32          # highest power of r kept, i.e. 16 powers of r^2
SERIES_TOL = 1e-12
MAX_LADDER_INDEX = 15      # documented accuracy range (dimension 31)


@dataclass(frozen=True)
class EvenSeries:
    """Truncated series sum_k coeffs[k] r^(2k) of the ladder function f_m."""

    m: int
    coeffs: tuple
    order: int

    def __call__(self, r):
        r2 = np.asarray(r, dtype=float) ** 2
        acc = np.zeros_like(r2)
        for c in reversed(self.coeffs):
            acc = acc * r2 + float(c)
        return acc if acc.ndim else float(acc)


def _sinhc_series(nterms):
    # sinh r / r = sum r^(2k) / (2k+1)!
    return [Fraction(1, math.factorial(2 * k + 1)) for k in range(nterms)]


def _series_inverse(a, nterms):
    inv = [Fraction(0)] * nterms
    inv[0] = 1 / a[0]
    for k in range(1, nterms):
        acc = sum((a[j] * inv[k - j] for j in range(1, k + 1)), Fraction(0))
        inv[k] = -acc / a[0]
    return inv


def _series_mul(a, b, nterms):
    out = [Fraction(0)] * nterms
    for i, ai in enumerate(a[:nterms]):
        if ai:
            for j in range(min(len(b), nterms - i)):
                out[i + j] += ai * b[j]
    return out


@lru_cache(maxsize=None)
def _series_table(M, nterms):
    """Coefficient lists (in r^2) of f_1..f_M, each with ``nterms`` entries."""
    total = nterms + M - 1
    f1 = _series_inverse(_sinhc_series(total), total)
    table = [f1]
    cur = f1
    for _ in range(1, M):
        # f_{m+1} = -(1/sinh r) df_m/dr = -f_1 * sum_k 2(k+1) a_{k+1} r^(2k);
        # every step consumes one coefficient.
        deriv = [-2 * (k + 1) * cur[k + 1] for k in range(len(cur) - 1)]
        cur = _series_mul(deriv, f1, len(deriv))
        table.append(cur)
    return tuple(tuple(c[:nterms]) for c in table)


def f_series_at_zero(m, order=SERIES_ORDER):
    """Exact rational series of f_m about r = 0, truncated after r**order."""
    if m < 1:
        raise DomainError(f"ladder index must be >= 1, got {m}")
    if order < 0:
        raise DomainError(f"series order must be >= 0, got {order}")
    nterms = order // 2 + 1
    coeffs = _series_table(m, nterms)[m - 1]
    return EvenSeries(m=m, coeffs=coeffs, order=2 * (nterms - 1))


def q_at_zero(m):
    """Exact q_m(0) = f_{m+1}(0) / f_m(0) from the series constant terms."""
    if m < 1:
        raise DomainError(f"ladder index must be >= 1, got {m}")
    return f_series_at_zero(m + 1, 0).coeffs[0] / f_series_at_zero(m, 0).coeffs[0]


def _check(M, r):
    if M < 1:
        raise DomainError(f"ladder index must be >= 1, got {M}")
    r = np.asarray(r, dtype=float)
    if np.any(~(r >= 0)):
        raise DomainError("distance r must be >= 0")
    return r


def _ladder_series(M, r, order):
    nterms = order // 2 + 1
    table = _series_table(M, nterms + 1)
    r2 = r * r
    out = np.empty((M,) + r.shape)
    for m in range(M):
        coeffs = [float(c) for c in table[m]]
        acc = np.zeros_like(r)
        for c in reversed(coeffs[:-1]):
            acc = acc * r2 + c
        tail = abs(coeffs[-1]) * r2 ** nterms
        worst = float(np.max(tail / acc)) if acc.size else 0.0
        if worst > SERIES_TOL:
            raise AccuracyError(
                f"series of order {order} for f_{m + 1} has truncation estimate "
                f"{worst:.2e} at r = {float(np.max(r)):.4g}; raise the order",
                residual=worst,
            )
        out[m] = acc * np.exp((m + 1) * r)
    return out


def _ladder_miller(M, r):
    sigma = np.cosh(r)
    sh2 = np.sinh(r) ** 2
    ratio = float(np.max(np.tanh(r / 2.0) ** 2))
    extra = 8 + int(math.ceil(math.log(1e-18) / math.log(ratio))) if ratio > 0 else 8
    N = M + extra
    # start with f_{N+1} = 0, f_N = 1 and run the relation downward
    vals = [None] * (N + 2)
    vals[N + 1] = np.zeros_like(r)
    vals[N] = np.ones_like(r)
    for m in range(N - 1, 0, -1):
        vals[m] = ((2 * m + 1) * sigma * vals[m + 1] - sh2 * vals[m + 2]) / (m * m)
        if m % 32 == 0:
            # keep the unnormalised solution inside the double range
            s = 1.0 / vals[m]
            for k in range(m, min(m + 34, N + 2)):
                vals[k] = vals[k] * s
    scale = (r / np.sinh(r)) / vals[1]
    out = np.empty((M,) + r.shape)
    for m in range(M):
        out[m] = vals[m + 1] * scale * np.exp((m + 1) * r)
    return out


def _ladder_upward(M, r):
    E = np.exp(-2.0 * r)
    a = 0.5 * (1.0 + E)              # cosh(r) e^{-r}
    b = (0.5 * (1.0 - E)) ** 2        # sinh(r)^2 e^{-2r}
    out = np.empty((M,) + r.shape)
    out[0] = 2.0 * r / (1.0 - E)
    if M > 1:
        out[1] = (a * out[0] - 1.0) / b
    for m in range(1, M - 1):
        out[m + 1] = ((2 * m + 1) * a * out[m] - m * m * out[m - 1]) / b
    return out


def scaled_ladder(M, r, series_order=SERIES_ORDER):
    """Return g with g[m-1] = f_m(r) e^{m r} for m = 1..M.

    ``r`` may be a scalar or an array; the result has shape ``(M,) + r.shape``.
    """
    r = _check(M, r)
    out = np.empty((M,) + r.shape)
    lo = r < SERIES_THRESHOLD
    hi = r >= UPWARD_THRESHOLD
    mid = ~(lo | hi)
    if np.any(lo):
        out[:, lo] = _ladder_series(M, r[lo], series_order)
    if np.any(mid):
        out[:, mid] = _ladder_miller(M, r[mid])
    if np.any(hi):
        out[:, hi] = _ladder_upward(M, r[hi])
    return out


def eval_f(m, r):
    """f_m(r). Underflows to 0 only once f_m itself is below the double range."""
    g = scaled_ladder(m, r)[m - 1]
    val = g * np.exp(-m * np.asarray(r, dtype=float))
    return val if val.ndim else float(val)


def log_f(m, r):
    r = np.asarray(r, dtype=float)
    val = np.log(scaled_ladder(m, r)[m - 1]) - m * r
    return val if val.ndim else float(val)


def eval_q(m, r):
    """q_m(r) = f_{m+1}(r) / f_m(r); exactly m^2/(2m+1) at r = 0."""
    r = _check(m, r)
    g = scaled_ladder(m + 1, r)
    val = g[m] / g[m - 1] * np.exp(-r)
    val = np.where(r == 0, m * m / (2 * m + 1), val)
    return val if val.ndim else float(val)


def _bernoulli(n):
    # exact B_0..B_n from sum_{j<=m} C(m+1, j) B_j = 0
    B = [Fraction(1)]
    for m in range(1, n + 1):
        B.append(-sum(math.comb(m + 1, j) * B[j] for j in range(m)) / (m + 1))
    return B


def _coth_tail_coeffs(nterms=14):
    # coth x - 1/x = sum_k 2^(2k) B_2k x^(2k-1) / (2k)!, radius of convergence pi
    B = _bernoulli(2 * nterms)
    return np.array([float(2 ** (2 * k) * B[2 * k] / math.factorial(2 * k)) for k in range(1, nterms + 1)])


_COTH_TAIL = _coth_tail_coeffs()


def dlog_f1_dr(r):
    """(log f_1)_r = 1/r - coth r, cancellation-free near 0."""
    r = np.asarray(r, dtype=float)
    small = r < 0.5
    rs = np.where(small, r, 0.5)
    r2 = rs * rs
    acc = np.zeros_like(rs)
    for c in _COTH_TAIL[::-1]:
        acc = acc * r2 + c
    series = -rs * acc
    rl = np.where(small, 1.0, r)
    direct = 1.0 / rl - 1.0 / np.tanh(rl)
    out = np.where(small, series, direct)
    return out if out.ndim else float(out)
