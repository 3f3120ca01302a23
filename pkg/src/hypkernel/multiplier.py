"""Li-Yau multiplier set membership on hyperbolic space.

A triple (t, beta, gamma) belongs to the multiplier set when

    beta |grad log u|^2 - (log u)_t <= gamma

at time t for every positive solution u. On H^n it suffices to test the heat
kernel, so every check here reduces to a sup over the radial variable of

    G(beta; t, r) = beta (d_r log K_n)^2 - d_t log K_n.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import AccuracyError, DomainError
from .kernel import eval_kernel

ODD_TOL = 1e-9
EVEN_TOL = 1e-6


@dataclass(frozen=True)
class MultiplierTriple:
    t: float
    beta: float
    gamma: float

    def __post_init__(self):
        if not self.t > 0:
            raise DomainError(f"t must be > 0, got {self.t}")
        if not 0 <= self.beta < 1:
            raise DomainError(
                f"beta must lie in [0, 1), got {self.beta}; the hyperbolic bounds "
                "diverge as beta -> 1 and no finite gamma is certified for beta >= 1"
            )


@dataclass(frozen=True)
class MembershipReport:
    verdict: str            # "accepted", "rejected" or "inconclusive"
    max_expression: float
    argmax_r: float
    margin: float
    tolerance: float

    def as_dict(self):
        return asdict(self)


def ly_expression(n, beta, t, r, kappa=1.0, quad=None):
    """G = beta (d_r log K)^2 - d_t log K on the space form of curvature -kappa^2.

    Uses K^kappa(t, r) = kappa^n K(kappa^2 t, kappa r), hence
    G^kappa(t, r) = kappa^2 G(kappa^2 t, kappa r).
    """
    if n < 1:
        raise DomainError(f"dimension must be >= 1, got {n}")
    if beta < 0:
        raise DomainError(f"beta must be >= 0, got {beta}")
    if not kappa > 0:
        raise DomainError(f"kappa must be > 0, got {kappa}")
    k2 = kappa * kappa
    ev = eval_kernel(n, k2 * np.asarray(t, dtype=float), kappa * np.asarray(r, dtype=float), quad)
    G = k2 * (beta * np.asarray(ev.dlog_dr) ** 2 - np.asarray(ev.dlog_dt))
    return float(G) if G.ndim == 0 else G


def ly_bound(n, beta, t, kappa=1.0):
    """Certified gamma: n/(2t) (odd n) or (n+1)/(2t) (even n) plus
    kappa^2 (n-1)^2 / (4 (1 - beta))."""
    if not 0 <= beta < 1:
        raise DomainError(f"beta must lie in [0, 1), got {beta}")
    if n < 1:
        raise DomainError(f"dimension must be >= 1, got {n}")
    lead = n if n % 2 else n + 1
    return lead / (2.0 * t) + kappa * kappa * (n - 1) ** 2 / (4.0 * (1.0 - beta))


def default_r_max(t, beta):
    return 50.0 + 4.0 * t * max(1.0, beta / (1.0 - beta))


def scan_grid(n, beta, t, r_max, r_samples=64):
    """64 linear points on [0, 2], log-spaced points beyond, plus the
    completed-square stationarity guess r ~ t (n-1) beta / (1 - beta)."""
    lin = np.linspace(0.0, min(2.0, r_max), r_samples)
    pts = [lin]
    if r_max > 2.0:
        pts.append(np.geomspace(2.0, r_max, r_samples))
    guess = t * (n - 1) * beta / (1.0 - beta) if beta < 1 else 0.0
    if 0 < guess < r_max:
        pts.append(np.array([guess]))
    return np.unique(np.concatenate(pts))


def sup_scan(n, beta, t, r_max=None, r_samples=64, kappa=1.0, quad=None, xtol=1e-6):
    """Locate sup_r G(beta; t, r); returns (argmax_r, sup_G)."""
    if not t > 0:
        raise DomainError(f"t must be > 0, got {t}")
    if not 0 <= beta < 1:
        raise DomainError(f"beta must lie in [0, 1), got {beta}")
    if r_max is None:
        r_max = default_r_max(kappa * kappa * t, beta) / kappa
    if not r_max > 0 or r_samples < 2:
        raise DomainError("need r_max > 0 and r_samples >= 2")
    grid = scan_grid(n, beta, kappa * kappa * t, kappa * r_max, r_samples) / kappa
    G = np.asarray(ly_expression(n, beta, t, grid, kappa, quad))
    i = int(np.argmax(G))
    best_r, best_G = float(grid[i]), float(G[i])
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, grid.size - 1)]
    if hi > lo:
        res = minimize_scalar(
            lambda x: -float(ly_expression(n, beta, t, x, kappa, quad)),
            bounds=(lo, hi), method="bounded", options={"xatol": xtol},
        )
        if -res.fun > best_G:
            best_r, best_G = float(res.x), float(-res.fun)
    return best_r, best_G


def check_triple(n, triple, r_max=None, r_samples=64, kappa=1.0, quad=None):
    """Test ``triple`` against the kernel over r in [0, r_max]."""
    tol = (ODD_TOL if n % 2 else EVEN_TOL) * max(1.0, abs(triple.gamma))
    try:
        r_star, g_star = sup_scan(n, triple.beta, triple.t, r_max, r_samples, kappa, quad)
    except AccuracyError:
        return MembershipReport("inconclusive", math.nan, math.nan, math.nan, tol)
    margin = triple.gamma - g_star
    verdict = "accepted" if margin >= -tol else "rejected"
    return MembershipReport(verdict, g_star, r_star, margin, tol)


def rescale_triple(lam, triple):
    """Map a triple for the metric lam^2 g to the corresponding triple for g."""
    if not lam > 0:
        raise DomainError(f"lambda must be > 0, got {lam}")
    return MultiplierTriple(triple.t / lam ** 2, triple.beta, triple.gamma * lam ** 2)
