"""The classical Li-Yau type estimates written as (beta(t), gamma(t)) curves.

For Ricci curvature bounded below by -k every estimate reads

    beta |grad log u|^2 - (log u)_t <= gamma,

and all curves depend on t only through x = k t, with gamma carrying the
prefactor n / (2t). Estimate 1 is better than estimate 2 at time t when
beta_1 >= beta_2 and gamma_1 <= gamma_2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .errors import DomainError
from .special_functions import _COTH_TAIL

KINDS = ("LYD", "Hamilton", "BakryQian", "LiXu")
LX_SERIES_CUTOFF = 0.5
_LX_COEFFS = 2 * np.arange(1, len(_COTH_TAIL) + 1) * _COTH_TAIL
X_LX_BRACKET = (8.0, 6.0 + 4.0 * math.sqrt(2.0))


@dataclass(frozen=True)
class EstimateFamily:
    kind: str
    n: int
    k: float = 1.0
    beta: float | None = None      # only for LYD

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown estimate family {self.kind!r}; choose from {KINDS}")
        if not self.k > 0:
            raise DomainError(f"k must be > 0, got {self.k}")
        if self.kind == "LYD" and not (self.beta is not None and 0 < self.beta < 1):
            raise DomainError("LYD needs beta in (0, 1)")


def _check_t(t):
    if np.any(~(np.asarray(t) > 0)):
        raise DomainError("t must be > 0")


def lx_excess(x):
    """(sinh x cosh x - x) / sinh^2 x = coth x - x / sinh^2 x.

    With coth x = 1/x + sum c_k x^(2k-1), the 1/x parts cancel and the
    ratio is sum 2k c_k x^(2k-1); that series is used below LX_SERIES_CUTOFF.
    """
    x = np.asarray(x, dtype=float)
    small = x < LX_SERIES_CUTOFF
    xs = np.where(small, x, LX_SERIES_CUTOFF)
    xl = np.where(small, 1.0, x)
    x2 = xs * xs
    acc = np.zeros_like(xs)
    for k in range(len(_LX_COEFFS), 0, -1):
        acc = acc * x2 + _LX_COEFFS[k - 1]
    series = xs * acc
    # x / sinh^2 x = 4x e^{-2x} / (1 - e^{-2x})^2
    direct = 1.0 / np.tanh(xl) - 4.0 * xl * np.exp(-2.0 * xl) / np.expm1(-2.0 * xl) ** 2
    out = np.where(small, series, direct)
    return float(out) if out.ndim == 0 else out


def beta_lx_x(x):
    out = 1.0 / (1.0 + np.asarray(lx_excess(x)))
    return float(out) if np.ndim(out) == 0 else out


def lx_scaled_gamma(x):
    """x (coth x + 1) beta_LX(x), i.e. gamma_LX * 2t / n; tends to 1 as x -> 0."""
    x = np.asarray(x, dtype=float)
    tiny = x < 1e-8
    xl = np.where(tiny, 1.0, x)
    # x coth x = 1 + x^2/3 + ..., exact in double below 1e-8
    x_coth = np.where(tiny, 1.0, xl / np.tanh(xl))
    out = (x_coth + x) * beta_lx_x(x)
    return float(out) if out.ndim == 0 else out


def gamma_lyd(n, k, beta, t):
    return n / (2.0 * t) * (1.0 / beta + k * t / (2.0 * (1.0 - beta)))


def curves(fam, t):
    """(beta(t), gamma(t)) for an estimate family."""
    _check_t(t)
    n, k = fam.n, fam.k
    t = np.asarray(t, dtype=float)
    x = k * t
    pref = n / (2.0 * t)
    if fam.kind == "LYD":
        beta = np.full_like(t, fam.beta)
        gamma = gamma_lyd(n, k, fam.beta, t)
    elif fam.kind == "Hamilton":
        beta = np.exp(-2.0 * x)
        gamma = pref * np.exp(2.0 * x)
    elif fam.kind == "BakryQian":
        beta = 1.0 / (1.0 + 2.0 * x / 3.0)
        gamma = pref * (1.0 + x + x * x / 3.0) / (1.0 + 2.0 * x / 3.0)
    else:
        beta = np.asarray(beta_lx_x(x))
        gamma = pref * np.asarray(lx_scaled_gamma(x))
    if beta.ndim == 0:
        return float(beta), float(gamma)
    return beta, gamma


def davies_min(n, k, t):
    """Minimiser of gamma_LYD(., t): (1/(1+sqrt(kt/2)), n/(2t) (1+sqrt(kt/2))^2)."""
    _check_t(t)
    s = np.sqrt(k * np.asarray(t, dtype=float) / 2.0)
    beta = 1.0 / (1.0 + s)
    gamma = n / (2.0 * np.asarray(t, dtype=float)) * (1.0 + s) ** 2
    if beta.ndim == 0:
        return float(beta), float(gamma)
    return beta, gamma


def _bisect(f, a, b, xtol=1e-12):
    """Bisection to xtol followed by one Newton polish (kept only if it stays inside)."""
    fa, fb = f(a), f(b)
    if fa == 0:
        return a
    if fb == 0:
        return b
    if (fa > 0) == (fb > 0):
        raise RuntimeError(f"root not bracketed on [{a}, {b}]")
    while b - a > xtol:
        c = 0.5 * (a + b)
        fc = f(c)
        if fc == 0:
            return c
        if (fc > 0) == (fa > 0):
            a, fa = c, fc
        else:
            b, fb = c, fc
    x = 0.5 * (a + b)
    h = max(1e-7 * x, 1e-10)
    slope = (f(x + h) - f(x - h)) / (2 * h)
    if slope != 0:
        xn = x - f(x) / slope
        if a <= xn <= b and abs(f(xn)) <= abs(f(x)):
            x = xn
    return x


def _th_residual(x):
    # log form of (1 + sqrt(x/2))^2 = e^{2x}
    return 2.0 * math.log1p(math.sqrt(x / 2.0)) - 2.0 * x


def intersect_tH(n, k):
    """t_H where gamma_m meets gamma_H; independent of n."""
    if not k > 0:
        raise DomainError(f"k must be > 0, got {k}")
    # residual > 0 near 0 and < 0 at x = 1
    return _bisect(_th_residual, 1e-8, 1.0) / k


def _tlx_residual(x):
    return (1.0 + math.sqrt(x / 2.0)) ** 2 - lx_scaled_gamma(x)


def x_lx():
    """Dimensionless crossing x_LX of (1 + sqrt(x/2))^2 and x (coth x + 1) beta_LX."""
    return _bisect(_tlx_residual, *X_LX_BRACKET)


def intersect_tLX(n, k):
    if not k > 0:
        raise DomainError(f"k must be > 0, got {k}")
    return x_lx() / k


def beta_pm(n, k, t):
    """The two solutions beta_- < beta_m < beta_+ of gamma_LYD(beta, t) = gamma_LX(t).

    Clearing denominators in 1/beta + x/(2(1-beta)) = c gives
    c beta^2 + (x/2 - 1 - c) beta + 1 = 0.
    """
    _check_t(t)
    x = k * t
    c = lx_scaled_gamma(x)
    _, gm = davies_min(n, k, t)
    if c <= gm * 2.0 * t / n:
        raise DomainError(
            f"gamma_LX(t) <= gamma_m(t) at t = {t}; beta_+- exist only for t > t_LX"
        )
    b = x / 2.0 - 1.0 - c
    disc = b * b - 4.0 * c
    sq = math.sqrt(max(disc, 0.0))
    # product of roots is 1/c; use it for the small root to avoid cancellation
    big = (-b + sq) / (2.0 * c)
    small = 1.0 / (c * big)
    return small, big


@dataclass(frozen=True)
class DominanceEntry:
    better: str
    worse: str
    dominates: bool


def _hyperbolic_reference(n, k, beta, t):
    # space form whose Ricci lower bound is -k: sectional curvature -k/(n-1)
    if n < 2 or not 0 <= beta < 1:
        return None
    kappa2 = k / (n - 1)
    lead = n if n % 2 else n + 1
    return lead / (2.0 * t) + kappa2 * (n - 1) ** 2 / (4.0 * (1.0 - beta))


def dominance_report(n, k, t):
    """Pairwise 'estimate A is at least as good as estimate B' at time t.

    Families: Hamilton, BakryQian, LiXu, the minimised Davies estimate (LYD_min)
    and the Davies estimate at the Li-Xu multiplier (LYD@beta_LX).
    """
    _check_t(t)
    bm, gm = davies_min(n, k, t)
    fams = {
        "Hamilton": curves(EstimateFamily("Hamilton", n, k), t),
        "BakryQian": curves(EstimateFamily("BakryQian", n, k), t),
        "LiXu": curves(EstimateFamily("LiXu", n, k), t),
        "LYD_min": (bm, gm),
    }
    blx = fams["LiXu"][0]
    fams["LYD@beta_LX"] = (blx, gamma_lyd(n, k, blx, t))
    entries = [
        DominanceEntry(a, b, fams[a][0] >= fams[b][0] and fams[a][1] <= fams[b][1])
        for a, b in permutations(fams, 2)
    ]
    reference = {name: _hyperbolic_reference(n, k, bg[0], t) for name, bg in fams.items()}
    return {
        "t": t,
        "x": k * t,
        "curves": {name: {"beta": bg[0], "gamma": bg[1]} for name, bg in fams.items()},
        "dominance": [e.__dict__ for e in entries],
        "hyperbolic_gamma_at_beta": reference,
    }


def dominates(report, better, worse):
    for e in report["dominance"]:
        if e["better"] == better and e["worse"] == worse:
            return e["dominates"]
    raise KeyError((better, worse))


ATLAS_HEADER = "t,x,beta_H,gamma_H,beta_BQ,gamma_BQ,beta_LX,gamma_LX,beta_m,gamma_m"


def atlas_row(n, k, t):
    bh, gh = curves(EstimateFamily("Hamilton", n, k), t)
    bb, gb = curves(EstimateFamily("BakryQian", n, k), t)
    bl, gl = curves(EstimateFamily("LiXu", n, k), t)
    bm, gm = davies_min(n, k, t)
    return (t, k * t, bh, gh, bb, gb, bl, gl, bm, gm)
