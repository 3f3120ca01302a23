"""Hyperboloid model of H^n and finite positive mixtures of heat kernels.

Points are vectors x in R^{n+1} with <x, x> = -1 and x_0 >= 1 for the
Minkowski form <a, b> = -a_0 b_0 + sum_{i>=1} a_i b_i. Tangent vectors at x
are the v with <v, x> = 0; the form restricted to them is the Riemannian
metric, so gradients are compared with ``minkowski`` directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .errors import DomainError
from .kernel import eval_kernel

ON_SHELL_TOL = 1e-9


def minkowski(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return -a[..., 0] * b[..., 0] + np.sum(a[..., 1:] * b[..., 1:], axis=-1)


def check_point(x, tol=ON_SHELL_TOL):
    x = np.asarray(x, dtype=float)
    q = minkowski(x, x)
    if abs(q + 1.0) > tol * max(1.0, x[0] * x[0]) or x[0] < 1.0 - tol:
        raise DomainError(f"point is not on the upper hyperboloid (<x,x> = {q})")
    return x


def lift(v):
    """Point of H^n over spatial coordinates v (x_0 = sqrt(1 + |v|^2))."""
    v = np.asarray(v, dtype=float)
    return np.concatenate([[math.sqrt(1.0 + v @ v)], v])


def reproject(x):
    return lift(np.asarray(x, dtype=float)[1:])


def origin(n):
    o = np.zeros(n + 1)
    o[0] = 1.0
    return o


def _separation(a, b):
    """(<a-b, a-b>, d(a, b)) without cancellation at either end.

    Nearby points use d = 2 asinh(sqrt(q) / 2) with q = <a-b, a-b>; far apart
    q is a difference of huge squares, so d = arccosh(-<a, b>) and
    q = -2 - 2 <a, b> are used instead.
    """
    ip = float(minkowski(a, b))
    if -ip > 2.0:
        return -2.0 - 2.0 * ip, math.acosh(-ip)
    diff = a - b
    q = max(float(minkowski(diff, diff)), 0.0)
    return q, 2.0 * math.asinh(math.sqrt(q) / 2.0)


def distance(a, b):
    """Geodesic distance arccosh(-<a, b>)."""
    return _separation(check_point(a), check_point(b))[1]


def exp_map(x, v):
    """Follow the geodesic from x with initial tangent v for unit time."""
    norm = math.sqrt(max(minkowski(v, v), 0.0))
    if norm == 0:
        return np.array(x, dtype=float)
    return reproject(math.cosh(norm) * x + math.sinh(norm) * v / norm)


def point_at(center, direction, dist):
    """Point at distance ``dist`` from ``center`` along a unit tangent direction."""
    return exp_map(center, dist * np.asarray(direction, dtype=float))


def tangent_basis(x):
    """Orthonormal basis of T_x H^n (Gram-Schmidt in the Minkowski form)."""
    n = x.size - 1
    basis = []
    for i in range(1, n + 1):
        v = np.zeros(n + 1)
        v[i] = 1.0
        v = v + minkowski(v, x) * x          # project onto T_x
        for b in basis:
            v = v - minkowski(v, b) * b
        v = v / math.sqrt(minkowski(v, v))
        basis.append(v)
    return np.array(basis)


def grad_distance(x, c):
    """Gradient at x of d(., c), a unit tangent vector (zero when x == c).

    Projecting -c onto T_x gives -c - <c, x> x; writing it as
    (x - c) + (<x-c, x-c> / 2) x avoids cancellation for nearby points.
    """
    q, d = _separation(x, c)
    if d == 0.0:
        return np.zeros_like(x), 0.0
    v = (x - c) + 0.5 * q * x
    return v / math.sinh(d), d


@dataclass(frozen=True)
class Mixture:
    n: int
    centers: np.ndarray
    weights: np.ndarray
    quad: object = field(default=None, compare=False)

    def __post_init__(self):
        centers = np.atleast_2d(np.asarray(self.centers, dtype=float))
        weights = np.asarray(self.weights, dtype=float)
        if centers.shape[1] != self.n + 1:
            raise DomainError(f"centers must have n + 1 = {self.n + 1} coordinates")
        if weights.shape != (centers.shape[0],):
            raise DomainError("need one weight per center")
        if np.any(~(weights > 0)):
            raise DomainError("mixture weights must be > 0")
        for c in centers:
            check_point(c)
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def from_json(cls, data):
        return cls(int(data["n"]), data["centers"], data["weights"])

    def to_json(self):
        return {"n": self.n, "centers": self.centers.tolist(), "weights": self.weights.tolist()}

    def log_value(self, t, x):
        x = check_point(x)
        d = np.array([distance(x, c) for c in self.centers])
        lk = np.asarray(eval_kernel(self.n, t, d, self.quad).log_value)
        a = np.log(self.weights) + lk
        top = a.max()
        return top + math.log(np.exp(a - top).sum())


def mixture_parts(mix, t, x):
    """(|grad log u|^2, (log u)_t) at (t, x) for u = sum_i w_i K_n(t, d(x, c_i))."""
    x = check_point(x)
    grads, dists = zip(*(grad_distance(x, c) for c in mix.centers))
    ev = eval_kernel(mix.n, t, np.array(dists), mix.quad)
    a = np.log(mix.weights) + np.asarray(ev.log_value)
    p = np.exp(a - a.max())
    p = p / p.sum()                                   # w_i K_i / u
    grad = np.sum((p * np.asarray(ev.dlog_dr))[:, None] * np.array(grads), axis=0)
    # a squared tangent norm; clamp the rounding below zero
    return max(float(minkowski(grad, grad)), 0.0), float(np.sum(p * np.asarray(ev.dlog_dt)))


def mixture_ly_expression(mix, beta, t, x):
    """beta |grad log u|^2 - (log u)_t for the mixture u."""
    if not t > 0:
        raise DomainError(f"t must be > 0, got {t}")
    grad_sq, dt = mixture_parts(mix, t, x)
    return beta * grad_sq - dt


def fd_oracle(mix, t, x, h=1e-4):
    """Central-difference (|grad log u|^2, (log u)_t) along geodesics and in time."""
    if not 0 < h <= 0.1:
        raise DomainError(f"step must lie in (0, 0.1], got {h}")
    x = check_point(x)
    grad_sq = 0.0
    for e in tangent_basis(x):
        up = mix.log_value(t, exp_map(x, h * e))
        dn = mix.log_value(t, exp_map(x, -h * e))
        grad_sq += ((up - dn) / (2.0 * h)) ** 2
    ht = h * t
    dt = (mix.log_value(t + ht, x) - mix.log_value(t - ht, x)) / (2.0 * ht)
    return grad_sq, dt


def random_boost(n, rng, scale=1.0):
    """A Lorentz transformation exp(J B) with B antisymmetric, entries in [-scale, scale]."""
    B = rng.uniform(-scale, scale, size=(n + 1, n + 1))
    B = np.triu(B, 1)
    B = B - B.T
    J = np.diag([-1.0] + [1.0] * n)
    return expm(J @ B)


def random_point_in_ball(n, rng, radius, center=None):
    center = origin(n) if center is None else center
    direction = rng.normal(size=n)
    direction /= np.linalg.norm(direction)
    # uniform-in-radius draw; enough spread for testing
    rho = radius * rng.uniform()
    basis = tangent_basis(center)
    return point_at(center, direction @ basis, rho)


def random_mixture(n, rng, max_centers=5, radius=3.0, quad=None):
    k = int(rng.integers(1, max_centers + 1))
    centers = [random_point_in_ball(n, rng, radius) for _ in range(k)]
    weights = rng.uniform(0.1, 2.0, size=k)
    return Mixture(n, np.array(centers), weights, quad)
