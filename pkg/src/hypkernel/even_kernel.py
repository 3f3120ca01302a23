"""Heat kernel of H^n for even n = 2m, by descent from dimension 2m + 1.

    alpha_{2m}(t, r) = (8 pi t)^(-1/2) int_0^inf
        alpha_{2m+1}(t, s) / f_1(s) * exp(-x / 4t) * (cosh s - cosh r)^(-1/2) dx,

with s = sqrt(x + r^2). After x = u^2 the integrand

    2u / sqrt(cosh s - cosh r) * alpha_{2m+1}(t, s) / f_1(s) * exp(-u^2 / 4t)

is analytic in u: cosh s - cosh r = u^2 (1/2 + (u^2 + 2 r^2)/24 + ...).
Both log-derivatives are integrated under the same substitution. In
particular d/dr log(cosh s - cosh r) at fixed u is exactly ``check_lemma_Z(u, r)``,
which is bounded in [0, 1], so no singular kernel appears.

Quadrature is composite Gauss-Legendre on uniform panels over [0, u_max],
doubled until successive estimates agree; every radius for a given t shares
one node set, so radial grids are evaluated in a single vectorised pass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AccuracyError, DomainError
from .odd_kernel import AlphaEval, KernelEval, RadialPoint, _alpha_parts, _unwrap
from .special_functions import dlog_f1_dr

MAX_EVEN_DIMENSION = 30
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-14
    tail_cut: float = 1.5
    max_subdivisions: int = 2000
    initial_panels: int = 8

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise DomainError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1 or self.initial_panels < 1:
            raise DomainError("panel counts must be >= 1")
        if not self.tail_cut > 0:
            raise DomainError("tail_cut must be positive")

    def u_max(self, t):
        return self.tail_cut * math.sqrt(4.0 * t * math.log(1.0 / self.abs_tol))


DEFAULT_QUADRATURE = QuadratureSpec()


def _logsinh(x):
    # log sinh x for x > 0 without overflow
    x = np.asarray(x, dtype=float)
    return x + np.log(-np.expm1(-2.0 * x)) - math.log(2.0)


def _sinh_minus_id(d):
    small = d < 0.1
    ds = np.where(small, d, 0.0)
    d2 = ds * ds
    series = ds * d2 * (1 / 6 + d2 * (1 / 120 + d2 * (1 / 5040 + d2 / 362880)))
    return np.where(small, series, np.sinh(d) - d)


def _rcosh_minus_sinh_scaled(r):
    # (r cosh r - sinh r) e^{-r}
    small = r < 0.1
    rs = np.where(small, r, 0.0)
    r2 = rs * rs
    series = rs * r2 * (1 / 3 + r2 * (1 / 30 + r2 * (1 / 840 + r2 / 45360)))
    direct = 0.5 * (r * (1 + np.exp(-2 * r)) - (1 - np.exp(-2 * r)))
    return np.where(small, series * np.exp(-r), direct)


def check_lemma_Z(a, r):
    """d/dr log(cosh sqrt(a^2 + r^2) - cosh r), evaluated without cancellation.

    Mathematically this lies in [0, 1] for every a > 0 and r >= 0.
    """
    a = np.asarray(a, dtype=float)
    r = np.asarray(r, dtype=float)
    if np.any(~(a > 0)):
        raise DomainError("a must be > 0")
    if np.any(~(r >= 0)):
        raise DomainError("r must be >= 0")
    rho = np.sqrt(a * a + r * r)
    delta = a * a / (rho + r)
    E = np.exp(-2.0 * r)
    sh = 0.5 * (1.0 - E)          # sinh(r) e^{-r}
    ch = 0.5 * (1.0 + E)          # cosh(r) e^{-r}
    num = (r * sh * 2.0 * np.sinh(0.5 * delta) ** 2
           + delta * _rcosh_minus_sinh_scaled(r)
           + r * ch * _sinh_minus_id(delta)) / rho
    den = (np.exp(0.5 * delta) - np.exp(-0.5 * (rho + 3.0 * r))) * np.sinh(0.5 * delta)
    return _unwrap(num / den)


def _log_f1(s):
    # log(s / sinh s)
    safe = np.where(s > 0, s, 1.0)
    return np.where(s > 0, np.log(safe) - _logsinh(safe), 0.0)


def _integrand(m, t, r, u):
    """log integrand L and its t- and r-derivatives at nodes u (shape (R, Q))."""
    r = r[:, None]
    s = np.sqrt(u * u + r * r)
    la, la_s, la_t = _alpha_parts(m, t, s)
    delta = u * u / (s + r)
    log_gap = math.log(2.0) + _logsinh(0.5 * (s + r)) + _logsinh(0.5 * delta)
    L = np.log(2.0 * u) + la - _log_f1(s) - 0.5 * log_gap - u * u / (4.0 * t)
    L_t = la_t + u * u / (4.0 * t * t)
    ratio = np.where(s > 0, r / np.where(s > 0, s, 1.0), 0.0)
    L_r = ratio * (la_s - dlog_f1_dr(s)) - 0.5 * check_lemma_Z(u, np.broadcast_to(r, u.shape))
    return L, L_t, L_r


def _panel_estimate(m, t, r, panels, u_max):
    edges = np.linspace(0.0, u_max, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    u = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    w = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    uu = np.broadcast_to(u, (r.size, u.size))
    L, L_t, L_r = _integrand(m, t, r, uu)
    Lref = L.max(axis=1, keepdims=True)
    e = w * np.exp(L - Lref)
    S = e.sum(axis=1)
    log_I = np.log(S) + Lref[:, 0]
    mean_t = (e * L_t).sum(axis=1) / S
    mean_r = (e * L_r).sum(axis=1) / S
    scale_t = (e * np.abs(L_t)).sum(axis=1) / S
    scale_r = (e * np.abs(L_r)).sum(axis=1) / S
    return log_I, mean_t, mean_r, scale_t, scale_r


def _integrate(m, t, r, quad):
    """log of the integral plus weighted means of L_t, L_r for a radius batch."""
    u_max = quad.u_max(t)
    n = r.size
    log_I = np.empty(n)
    mean_t = np.empty(n)
    mean_r = np.empty(n)
    todo = np.arange(n)
    panels = quad.initial_panels
    prev = _panel_estimate(m, t, r, panels, u_max)
    while todo.size:
        panels *= 2
        if panels > quad.max_subdivisions:
            resid = float(np.max(np.abs(prev[0])))
            raise AccuracyError(
                f"even-dimension quadrature did not converge within "
                f"{quad.max_subdivisions} panels (t={t:g}, m={m})",
                residual=resid,
            )
        cur = _panel_estimate(m, t, r[todo], panels, u_max)
        err = np.maximum.reduce([
            np.abs(cur[0] - prev[0]),
            np.abs(cur[1] - prev[1]) / np.maximum(cur[3], 1e-300),
            np.abs(cur[2] - prev[2]) / np.maximum(cur[4], 1e-300),
        ])
        ok = err <= quad.rel_tol
        idx = todo[ok]
        log_I[idx], mean_t[idx], mean_r[idx] = cur[0][ok], cur[1][ok], cur[2][ok]
        todo = todo[~ok]
        prev = tuple(c[~ok] for c in cur)
    return log_I, mean_t, mean_r


def _alpha_even_parts(m, t, r, quad):
    t = np.asarray(t, dtype=float)
    r = np.asarray(r, dtype=float)
    tb, rb = np.broadcast_arrays(t, r)
    shape = tb.shape
    tb, rb = tb.ravel(), rb.ravel()
    la = np.empty(tb.size)
    dr = np.empty(tb.size)
    dt = np.empty(tb.size)
    for tv in np.unique(tb):
        sel = tb == tv
        log_I, mt, mr = _integrate(m, float(tv), rb[sel], quad)
        la[sel] = log_I - 0.5 * math.log(8.0 * math.pi * tv)
        dt[sel] = mt - 0.5 / tv
        dr[sel] = mr
    return la.reshape(shape), dr.reshape(shape), dt.reshape(shape)


def eval_alpha_even(m, t, r, quad=DEFAULT_QUADRATURE):
    """alpha_{2m}(t, r) with analytic log-derivatives, m >= 1."""
    if m < 1:
        raise DomainError(f"even correction factor needs m >= 1, got {m}")
    if 2 * m > MAX_EVEN_DIMENSION:
        raise DomainError(f"dimension {2 * m} exceeds the supported maximum {MAX_EVEN_DIMENSION}")
    RadialPoint(t, r)
    la, dr, dt = _alpha_even_parts(m, t, r, quad)
    return AlphaEval(_unwrap(np.exp(la)), _unwrap(dr), _unwrap(dt), _unwrap(la))


def eval_kernel_even(n, t, r, quad=DEFAULT_QUADRATURE):
    """K_n(t, r) for even n >= 2, as a KernelEval."""
    if n < 2 or n % 2:
        raise DomainError(f"even kernel needs even n >= 2, got {n}; use odd_kernel for odd n")
    if n > MAX_EVEN_DIMENSION:
        raise DomainError(f"dimension {n} exceeds the supported maximum {MAX_EVEN_DIMENSION}")
    RadialPoint(t, r)
    t = np.asarray(t, dtype=float)
    r = np.asarray(r, dtype=float)
    la, a_r, a_t = _alpha_even_parts(n // 2, t, r, quad)
    log_value = -0.5 * n * np.log(4 * math.pi * t) - (n - 1) ** 2 * t / 4 - r * r / (4 * t) + la
    dlog_dr = -r / (2 * t) + a_r
    dlog_dt = -n / (2 * t) - (n - 1) ** 2 / 4 + r * r / (4 * t * t) + a_t
    return KernelEval(_unwrap(log_value), _unwrap(dlog_dr), _unwrap(dlog_dt))
