"""Self-verification suites, one per published property that the package certifies.

Each suite returns a SuiteResult; ``run_suites`` is what ``hypkernel verify``
calls. The suites use only frozen reference values and scipy root finders
as outside oracles; the extended-precision oracles live in the test suite.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import brentq

from . import comparator as cmp
from .errors import DomainError
from .even_kernel import check_lemma_Z, eval_alpha_even
from .geometry import (Mixture, fd_oracle, mixture_ly_expression, mixture_parts,
                       random_boost, random_mixture, random_point_in_ball, reproject)
from .harnack import (HarnackQuery, MultiplierCurve, harnack_along_curve, harnack_constant,
                      optimal_beta, verify_harnack_on_kernel)
from .kernel import eval_kernel
from .multiplier import MultiplierTriple, ly_bound, ly_expression, sup_scan
from .odd_kernel import eval_alpha_odd
from .poly_engine import build_P
from .special_functions import f_series_at_zero, q_at_zero, scaled_ladder

BETAS = (0.0, 0.25, 0.5, 0.9, 0.99)
# alpha_2(0.1, 0) from a 40-digit quadrature of the closed r = 0 integrand
ALPHA2_REF = 0.991808787586837


@dataclass
class Check:
    label: str
    ok: bool
    detail: str = ""


@dataclass
class SuiteResult:
    key: str
    title: str
    checks: list = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def passed(self):
        return all(c.ok for c in self.checks)

    def add(self, label, ok, detail=""):
        self.checks.append(Check(label, bool(ok), detail))

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        failed = [c.label for c in self.checks if not c.ok]
        extra = f" (failed: {', '.join(failed)})" if failed else ""
        return f"[{status}] {self.key} {self.title}: {len(self.checks)} checks, {self.elapsed:.2f}s{extra}"

    def as_dict(self):
        return {
            "key": self.key,
            "title": self.title,
            "passed": self.passed,
            "elapsed": self.elapsed,
            "checks": [c.__dict__ for c in self.checks],
        }


def _worst_excess(n, betas, ts, rs, quad=None):
    worst = -math.inf
    where = None
    for b in betas:
        for t in ts:
            bound = ly_bound(n, b, t)
            G = np.asarray(ly_expression(n, b, t, rs, quad=quad))
            ex = float(np.max((G - bound) / abs(bound)))
            if ex > worst:
                worst, where = ex, (b, float(t), float(rs[int(np.argmax(G))]))
    return worst, where


def certify_odd(res, dims=(3, 5, 7, 9)):
    ts = np.geomspace(0.01, 100.0, 50)
    rs = np.linspace(0.0, 50.0, 200)
    for n in dims:
        worst, where = _worst_excess(n, BETAS, ts, rs)
        res.add(f"n={n} G <= n/(2t) + (n-1)^2/(4(1-beta))", worst <= 1e-9,
                f"worst relative excess {worst:.3e} at (beta, t, r) = {where}")


def sharpness(res):
    bound = ly_bound(3, 0.5, 50.0)
    r_star, g_star = sup_scan(3, 0.5, 50.0)
    res.add("sup within 2% of 2.03", abs(g_star - bound) <= 0.02 * bound,
            f"sup G = {g_star:.6f}, bound = {bound:.6f}")
    res.add("maximiser within 20% of r = 100", abs(r_star - 100.0) <= 20.0, f"r* = {r_star:.4f}")


def certify_even(res, dims=(2, 4, 6)):
    ts = np.geomspace(0.05, 20.0, 20)
    rs = np.linspace(0.0, 20.0, 60)
    for n in dims:
        worst, where = _worst_excess(n, BETAS, ts, rs)
        res.add(f"n={n} G <= (n+1)/(2t) + (n-1)^2/(4(1-beta))", worst <= 1e-6,
                f"worst relative excess {worst:.3e} at (beta, t, r) = {where}")


def hyperbolic_plane(res):
    for t in (0.1, 0.5, 1.0, 5.0):
        d = eval_kernel(2, t, 0.0).dlog_dt
        res.add(f"-(log K2)_t(t={t}, 0) > 1/t + 1/4", -d > 1 / t + 0.25,
                f"-(log K2)_t = {-d:.10f}")
    ts = [0.05, 0.1, 0.5, 1.0, 5.0]
    vals = [eval_alpha_even(1, t, 0.0).alpha for t in ts]
    res.add("alpha_2(t, 0) strictly decreasing", all(a > b for a, b in zip(vals, vals[1:])),
            ", ".join(f"{v:.10f}" for v in vals))
    a = eval_alpha_even(1, 0.1, 0.0).alpha
    res.add("alpha_2(0.1, 0) = 0.9918 +- 1e-3", abs(a - 0.9918) <= 1e-3 and abs(a - ALPHA2_REF) <= 1e-9,
            f"alpha_2 = {a:.15f}, reference {ALPHA2_REF}")


def f_recurrence_residual(m_max=12, rs=None):
    """Worst relative residual of m^2 f_m - (2m+1) sigma f_{m+1} + (sigma^2-1) f_{m+2}.

    All three terms are multiplied by e^{mr} and evaluated from the scaled ladder.
    """
    rs = np.geomspace(1e-3, 30.0, 80) if rs is None else np.asarray(rs, dtype=float)
    g = scaled_ladder(m_max + 2, rs)
    E = np.exp(-2.0 * rs)
    c1 = 0.5 * (1.0 + E)              # sigma e^{-r}
    c2 = (0.5 * (1.0 - E)) ** 2       # (sigma^2 - 1) e^{-2r}
    worst = 0.0
    for m in range(1, m_max + 1):
        a = m * m * g[m - 1]
        b = (2 * m + 1) * c1 * g[m]
        c = c2 * g[m + 1]
        worst = max(worst, float(np.max(np.abs(a - b + c) / (a + b + c))))
    return worst


def descent_residual(samples=50, seed=0, dims=(1, 3, 5, 7, 2, 4)):
    """Worst relative residual of K_{n+2} = -e^{-nt} / (2 pi sinh r) d_r K_n."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for i in range(samples):
        n = dims[i % len(dims)]
        t = float(np.exp(rng.uniform(math.log(0.05), math.log(10.0))))
        r = float(rng.uniform(0.05, 10.0))
        lo = eval_kernel(n, t, r)
        hi = eval_kernel(n + 2, t, r)
        log_sinh = r + math.log1p(-math.exp(-2 * r)) - math.log(2)
        rhs = lo.log_value + math.log(-lo.dlog_dr) - n * t - math.log(2 * math.pi) - log_sinh
        worst = max(worst, abs(math.expm1(hi.log_value - rhs)))
    return worst


def recurrences(res):
    w = f_recurrence_residual()
    res.add("ladder three-term recurrence, m <= 12", w <= 1e-10, f"worst relative residual {w:.3e}")
    w = descent_residual()
    res.add("kernel descent identity at 50 points", w <= 1e-8, f"worst relative residual {w:.3e}")
    ok = all(q_at_zero(m) == Fraction(m * m, 2 * m + 1) for m in range(1, 15))
    prod = Fraction(1)
    for m in range(1, 15):
        ok = ok and f_series_at_zero(m, 0).coeffs[0] == prod
        prod *= Fraction(m * m, 2 * m + 1)
    res.add("q_m(0) = m^2/(2m+1) exactly", ok)


def ptable_structure(res, m_max=12):
    problems = []
    for m in range(1, m_max + 1):
        polys = build_P(m).polys
        if len(polys) != m:
            problems.append(f"m={m}: {len(polys)} polynomials")
            continue
        if polys[0].terms != {((1, m),): 1}:
            problems.append(f"m={m}: P_0 != T1^m")
        if polys[m - 1].terms != {((m, 1),): 2 ** (m - 1)}:
            problems.append(f"m={m}: P_(m-1) != 2^(m-1) T_m")
        for i, p in enumerate(polys):
            for key, c in p.terms.items():
                deg = sum(e for _, e in key)
                wdeg = sum(j * e for j, e in key)
                if deg != m - i or wdeg != m or not (isinstance(c, int) and c > 0):
                    problems.append(f"m={m}, i={i}: term {key} coef {c}")
    res.add("P-table structure for m <= 12", not problems, "; ".join(problems[:5]))


def alpha_bounds(res):
    ts = np.geomspace(0.01, 100.0, 30)
    rs = np.linspace(0.0, 50.0, 101)
    T, R = np.meshgrid(ts, rs, indexing="ij")
    bad_t = bad_r = 0
    far = []
    for m in range(1, 7):
        a = eval_alpha_odd(m, T, R)
        lt = np.asarray(a.dlog_dt)
        lr = -np.asarray(a.dlog_dr)
        bad_t += int(np.sum((lt < -1e-12) | (lt > (m - 1) / T * (1 + 1e-12) + 1e-14)))
        bad_r += int(np.sum((lr < -1e-12) | (lr > m * (1 + 1e-12))))
        at40 = -np.asarray(eval_alpha_odd(m, ts, 40.0).dlog_dr)
        far.append(float(np.max(np.abs(at40 - m))))
    res.add("0 <= (log alpha_{2m+1})_t <= (m-1)/t, m <= 6", bad_t == 0, f"{bad_t} violations")
    res.add("0 <= -(log alpha_{2m+1})_r <= m, m <= 6", bad_r == 0, f"{bad_r} violations")
    res.add("-(log alpha_{2m+1})_r within 1e-3 of m at r = 40", max(far) <= 1e-3,
            f"worst deviation {max(far):.3e}")
    ts_e = np.geomspace(0.05, 20.0, 10)
    rs_e = np.linspace(0.0, 20.0, 41)
    bad_e = 0
    for m in (1, 2, 3):
        for t in ts_e:
            lr = -np.asarray(eval_alpha_even(m, t, rs_e).dlog_dr)
            bad_e += int(np.sum((lr < -1e-7) | (lr > (m - 0.5) * (1 + 1e-7))))
    res.add("0 <= -(log alpha_{2m})_r <= m - 1/2, m <= 3", bad_e == 0, f"{bad_e} violations")


def comparisons(res):
    x = np.linspace(50.0 / 1e4, 50.0, 10_000)
    beta = np.asarray(cmp.beta_lx_x(x))
    scaled = np.asarray(cmp.lx_scaled_gamma(x))
    e2x = np.exp(2 * x)
    res.add("x (coth x + 1) beta_LX <= e^{2x} on (0, 50]", np.all(scaled <= e2x))
    res.add("1/beta_LX <= e^{2x} on (0, 50]", np.all(1.0 / beta <= e2x))
    res.add("1/2 <= beta_LX <= 1", np.all((beta >= 0.5) & (beta <= 1.0)))
    th = cmp.intersect_tH(3, 1.0)
    resid = abs(cmp._th_residual(th))
    res.add("t_H(k=1) = 0.3491 +- 1e-3", abs(th - 0.3491) <= 1e-3 and resid < 1e-10,
            f"t_H = {th:.15f}, residual {resid:.2e}")
    xl = cmp.x_lx()
    lo, hi = cmp.X_LX_BRACKET
    oracle = brentq(cmp._tlx_residual, lo, hi, xtol=1e-14)
    res.add("x_LX in [8, 6 + 4 sqrt 2]", lo <= xl <= hi, f"x_LX = {xl:.15f}")
    res.add("x_LX = 11.6568 +- 1e-3 against brentq", abs(xl - 11.6568) <= 1e-3 and abs(xl - oracle) <= 1e-9,
            f"brentq {oracle:.15f}")
    xs = np.geomspace(xl, 1e3, 2000)[1:]
    res.add("beta_LX(x) > 1/(1 + sqrt(x/2)) for x > x_LX",
            np.all(np.asarray(cmp.beta_lx_x(xs)) > 1.0 / (1.0 + np.sqrt(xs / 2.0))))
    ts = np.geomspace(1e-3, 1e3, 500)
    b, g = cmp.curves(cmp.EstimateFamily("LiXu", 3, 1.0), ts)
    res.add("gamma_LYD(beta_LX(t), t) > gamma_LX(t)", np.all(cmp.gamma_lyd(3, 1.0, b, ts) > g))


def lemma_z(res):
    a = np.linspace(0.1, 10.0, 100)
    r = np.linspace(0.0, 10.0, 100)
    A, R = np.meshgrid(a, r, indexing="ij")
    Z = np.asarray(check_lemma_Z(A, R))
    res.add("0 <= Z(a, r) <= 1 on a 100x100 grid", np.all((Z >= 0) & (Z <= 1)),
            f"range [{Z.min():.3e}, {Z.max():.15f}]")


def harnack(res, draws=100, seed=0):
    rng = np.random.default_rng(seed)
    for n in (2, 3, 5):
        worst = math.inf
        for _ in range(draws):
            t1, t2 = sorted(rng.uniform(0.05, 10.0, size=2))
            if t2 - t1 < 1e-3:
                t2 = t1 + 1e-3
            r, off = rng.uniform(0.0, 5.0, size=2)
            margin, scale = verify_harnack_on_kernel(n, HarnackQuery(n, t1, t2, r), off)
            worst = min(worst, margin / scale)
        res.add(f"n={n} Harnack margin >= -1e-12 scale", worst >= -1e-12, f"min margin/scale {worst:.3e}")
    worst = 0.0
    for n, t1, t2, r in ((3, 1.0, 2.0, 1.0), (5, 0.5, 3.0, 2.0), (7, 0.1, 0.4, 0.5)):
        b = optimal_beta(n, t1, t2, r)
        curve = MultiplierCurve.sample(lambda t: b, lambda t: ly_bound(n, b, t), t1, t2, panels=1 << 16)
        approx = harnack_along_curve(curve, t1, t2, r)
        exact = harnack_constant(HarnackQuery(n, t1, t2, r))
        worst = max(worst, abs(approx / exact - 1))
    res.add("optimal constant curve reproduces the closed form", worst <= 1e-8, f"worst relative error {worst:.3e}")
    examples = ((3, 0.0, 7.6885), (3, 1.0, 26.835), (2, 0.0, 3.6318))
    vals = [harnack_constant(HarnackQuery(n, 1.0, 2.0, r)) for n, r, _ in examples]
    ok = all(f"{v:.5g}" == f"{ref:.5g}" for v, (_, _, ref) in zip(vals, examples))
    res.add("closed-form examples to 5 digits", ok, ", ".join(f"{v:.6g}" for v in vals))


def superposition(res, count=200, seed=0):
    rng = np.random.default_rng(seed)
    worst_bound = -math.inf
    worst_fd = 0.0
    worst_boost = 0.0
    for i in range(count):
        n = (3, 5)[i % 2]
        mix = random_mixture(n, rng, max_centers=5, radius=3.0)
        x = random_point_in_ball(n, rng, 4.0)
        t = float(np.exp(rng.uniform(math.log(0.1), math.log(10.0))))
        for b in (0.0, 0.5, 0.9):
            bound = ly_bound(n, b, t)
            worst_bound = max(worst_bound, (mixture_ly_expression(mix, b, t, x) - bound) / bound)
        grad_sq, dt = mixture_parts(mix, t, x)
        fd_g, fd_t = fd_oracle(mix, t, x, 1e-4)
        worst_fd = max(worst_fd, abs(grad_sq - fd_g) / max(abs(grad_sq), 1e-6),
                       abs(dt - fd_t) / max(abs(dt), 1e-6))
        L = random_boost(n, rng)
        moved = Mixture(n, np.array([reproject(L @ c) for c in mix.centers]), mix.weights)
        g1 = mixture_ly_expression(mix, 0.5, t, x)
        g2 = mixture_ly_expression(moved, 0.5, t, reproject(L @ x))
        worst_boost = max(worst_boost, abs(g1 - g2) / max(1.0, abs(g1)))
    res.add(f"{count} mixtures within the certified bound", worst_bound <= 1e-8,
            f"worst relative excess {worst_bound:.3e}")
    res.add("analytic gradient vs finite differences", worst_fd <= 1e-5, f"worst relative error {worst_fd:.3e}")
    res.add("Lorentz boost invariance", worst_boost <= 1e-10, f"worst difference {worst_boost:.3e}")


def euclidean(res):
    rng = np.random.default_rng(0)
    pairs = [(float(np.exp(rng.uniform(math.log(0.01), math.log(100.0)))), float(b))
             for b in np.concatenate([rng.uniform(0, 0.9, 10), 1 - np.geomspace(1e-2, 1e-8, 10)])]
    worst = -math.inf
    at_zero = 0.0
    for t, b in pairs:
        rs = np.linspace(0.0, 20.0 * math.sqrt(t), 201)
        G = np.asarray(ly_expression(1, b, t, rs))
        bound = ly_bound(1, b, t)
        worst = max(worst, float(np.max(G - bound)) / bound)
        at_zero = max(at_zero, abs(G[0] - 1 / (2 * t)) * 2 * t)
    res.add("G <= 1/(2t) on 20 (t, beta) pairs", worst <= 1e-12, f"worst relative excess {worst:.3e}")
    res.add("equality at r = 0", at_zero <= 1e-12, f"worst relative deviation {at_zero:.3e}")
    gaps = [1 / 2 - float(ly_expression(1, 1 - e, 1.0, 1.0)) for e in (1e-1, 1e-3, 1e-5, 1e-7)]
    res.add("gap at fixed r closes as beta -> 1", all(g > 0 for g in gaps) and gaps[-1] < 1e-7
            and all(a > b for a, b in zip(gaps, gaps[1:])), ", ".join(f"{g:.1e}" for g in gaps))
    try:
        MultiplierTriple(1.0, 1.0, 0.5)
        excluded = False
    except DomainError:
        excluded = True
    res.add("beta = 1 excluded", excluded)


SUITES = {
    "1": ("odd-dimension certification", certify_odd),
    "2": ("large-time sharpness", sharpness),
    "3": ("even-dimension certification", certify_even),
    "4": ("hyperbolic plane", hyperbolic_plane),
    "5": ("recurrence identities", recurrences),
    "6": ("P-table structure", ptable_structure),
    "7": ("correction factor bounds", alpha_bounds),
    "8": ("classical estimate comparisons", comparisons),
    "9": ("lemma Z bounds", lemma_z),
    "10": ("Harnack inequality", harnack),
    "11": ("mixtures of kernels", superposition),
    "12": ("Euclidean reference", euclidean),
}


def run_suite(key):
    if key not in SUITES:
        raise DomainError(f"unknown suite {key!r}; choose from {', '.join(SUITES)} or 'all'")
    title, fn = SUITES[key]
    res = SuiteResult(key, title)
    start = time.perf_counter()
    fn(res)
    res.elapsed = time.perf_counter() - start
    return res


def run_suites(which="all"):
    keys = list(SUITES) if which == "all" else [k.strip() for k in which.split(",")]
    return [run_suite(k) for k in keys]
