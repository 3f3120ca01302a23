import json
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hypkernel.errors import DomainError
from hypkernel.geometry import (
    Mixture, check_point, distance, exp_map, fd_oracle, grad_distance, lift, minkowski,
    mixture_ly_expression, mixture_parts, origin, point_at, random_boost, random_mixture,
    random_point_in_ball, reproject, tangent_basis,
)
from hypkernel.multiplier import ly_bound, ly_expression
from hypkernel.odd_kernel import eval_kernel_odd


def _mp_distance(a, b):
    with mp.workdps(50):
        ip = -mp.mpf(a[0]) * mp.mpf(b[0]) + sum(mp.mpf(x) * mp.mpf(y) for x, y in zip(a[1:], b[1:]))
        return float(mp.acosh(-ip))


def _axis_point(n, d):
    x = np.zeros(n + 1)
    x[0], x[1] = math.cosh(d), math.sinh(d)
    return x


def test_distance_examples():
    o = origin(3)
    assert distance(o, o) == 0.0
    for d in (1e-9, 1e-3, 1.0, 7.5, 30.0):
        assert distance(o, _axis_point(3, d)) == pytest.approx(d, rel=1e-12)
    a, b = _axis_point(2, 2.0), _axis_point(2, -1.0)
    assert distance(a, b) == pytest.approx(3.0, rel=1e-13)


def test_distance_against_mpmath():
    rng = np.random.default_rng(3)
    for _ in range(50):
        a = random_point_in_ball(4, rng, 6.0)
        b = random_point_in_ball(4, rng, 6.0)
        want = _mp_distance(a, b)
        assert distance(a, b) == pytest.approx(want, rel=1e-9, abs=1e-12)


def test_triangle_inequality():
    rng = np.random.default_rng(11)
    for _ in range(1000):
        a, b, c = (random_point_in_ball(3, rng, 5.0) for _ in range(3))
        assert distance(a, c) <= distance(a, b) + distance(b, c) + 1e-12


def test_check_point_rejects():
    with pytest.raises(DomainError):
        check_point(np.array([1.0, 1.0, 0.0]))
    with pytest.raises(DomainError):
        check_point(np.array([-1.0, 0.0, 0.0]))
    p = check_point(lift([0.3, -2.0]))
    assert minkowski(p, p) == pytest.approx(-1.0)


def test_exp_map_and_basis():
    rng = np.random.default_rng(2)
    x = random_point_in_ball(3, rng, 2.0)
    B = tangent_basis(x)
    G = np.array([[minkowski(u, v) for v in B] for u in B])
    assert np.allclose(G, np.eye(3), atol=1e-12)
    assert np.allclose([minkowski(u, x) for u in B], 0.0, atol=1e-12)
    y = point_at(x, B[0], 1.7)
    assert distance(x, y) == pytest.approx(1.7, rel=1e-12)
    assert np.array_equal(exp_map(x, np.zeros(4)), x)


def test_grad_distance():
    rng = np.random.default_rng(4)
    for _ in range(20):
        x = random_point_in_ball(3, rng, 3.0)
        c = random_point_in_ball(3, rng, 3.0)
        g, d = grad_distance(x, c)
        assert minkowski(g, g) == pytest.approx(1.0, rel=1e-10)
        assert abs(minkowski(g, x)) < 1e-10
        # moving along the gradient increases the distance at unit rate
        h = 1e-5
        fd = (distance(exp_map(x, h * g), c) - distance(exp_map(x, -h * g), c)) / (2 * h)
        assert fd == pytest.approx(1.0, abs=1e-7)
        assert d == pytest.approx(distance(x, c), rel=1e-12)
    z, d0 = grad_distance(origin(2), origin(2))
    assert d0 == 0.0 and not np.any(z)


def test_single_center_matches_radial_expression():
    n = 3
    c = origin(n)
    mix = Mixture(n, c[None, :], np.array([2.5]))
    for d, t, b in ((1.0, 1.0, 0.5), (0.2, 0.3, 0.0), (4.0, 2.0, 0.9)):
        x = _axis_point(n, d)
        assert mixture_ly_expression(mix, b, t, x) == pytest.approx(ly_expression(n, b, t, d), rel=1e-10)
    grad_sq, dt = mixture_parts(mix, 1.0, _axis_point(n, 1.0))
    assert grad_sq == pytest.approx(eval_kernel_odd(3, 1.0, 1.0).dlog_dr ** 2, rel=1e-12)
    _, dt0 = mixture_parts(mix, 1.0, c)
    assert dt0 == pytest.approx(-2.5, rel=1e-14)


def test_symmetric_midpoint_has_zero_gradient():
    n = 3
    a, b = _axis_point(n, 1.5), _axis_point(n, -1.5)
    mix = Mixture(n, np.array([a, b]), np.array([1.0, 1.0]))
    grad_sq, _ = mixture_parts(mix, 0.7, origin(n))
    assert grad_sq <= 1e-20


def test_log_value_is_log_sum():
    n = 5
    rng = np.random.default_rng(8)
    mix = random_mixture(n, rng, max_centers=4)
    x = random_point_in_ball(n, rng, 2.0)
    direct = sum(w * eval_kernel_odd(n, 0.8, distance(x, c)).value for c, w in zip(mix.centers, mix.weights))
    assert mix.log_value(0.8, x) == pytest.approx(math.log(direct), rel=1e-12)


def test_analytic_derivatives_match_fd():
    rng = np.random.default_rng(21)
    for i in range(20):
        n = (3, 5, 2)[i % 3]
        mix = random_mixture(n, rng)
        x = random_point_in_ball(n, rng, 4.0)
        t = float(np.exp(rng.uniform(math.log(0.1), math.log(10.0))))
        g, dt = mixture_parts(mix, t, x)
        fg, fdt = fd_oracle(mix, t, x, 1e-4)
        assert g == pytest.approx(fg, rel=1e-5, abs=1e-6)
        assert dt == pytest.approx(fdt, rel=1e-5, abs=1e-6)


def test_fd_step_domain():
    mix = Mixture(3, origin(3)[None, :], np.array([1.0]))
    for h in (0.0, 0.2, -1e-3):
        with pytest.raises(DomainError):
            fd_oracle(mix, 1.0, origin(3), h)


def test_boost_is_an_isometry():
    rng = np.random.default_rng(5)
    J = np.diag([-1.0, 1.0, 1.0, 1.0])
    for _ in range(10):
        L = random_boost(3, rng)
        assert np.allclose(L.T @ J @ L, J, atol=1e-10)
        a, b = random_point_in_ball(3, rng, 3.0), random_point_in_ball(3, rng, 3.0)
        assert distance(reproject(L @ a), reproject(L @ b)) == pytest.approx(distance(a, b), rel=1e-9, abs=1e-12)


def test_boost_invariance_of_expression():
    rng = np.random.default_rng(9)
    for _ in range(20):
        mix = random_mixture(3, rng)
        x = random_point_in_ball(3, rng, 3.0)
        L = random_boost(3, rng)
        moved = Mixture(3, np.array([reproject(L @ c) for c in mix.centers]), mix.weights)
        g1 = mixture_ly_expression(mix, 0.5, 1.3, x)
        g2 = mixture_ly_expression(moved, 0.5, 1.3, reproject(L @ x))
        assert abs(g1 - g2) <= 1e-10 * max(1.0, abs(g1))


def test_mixtures_respect_the_bound():
    rng = np.random.default_rng(13)
    for i in range(60):
        n = (3, 5)[i % 2]
        mix = random_mixture(n, rng)
        x = random_point_in_ball(n, rng, 4.0)
        t = float(np.exp(rng.uniform(math.log(0.1), math.log(10.0))))
        for b in (0.0, 0.5, 0.9):
            assert mixture_ly_expression(mix, b, t, x) <= ly_bound(n, b, t) * (1 + 1e-8)


def test_json_round_trip():
    rng = np.random.default_rng(1)
    mix = random_mixture(3, rng)
    again = Mixture.from_json(json.loads(json.dumps(mix.to_json())))
    assert again.n == mix.n
    assert np.array_equal(again.centers, mix.centers) and np.array_equal(again.weights, mix.weights)


def test_mixture_validation():
    o = origin(3)
    with pytest.raises(DomainError):
        Mixture(3, o[None, :], np.array([0.0]))
    with pytest.raises(DomainError):
        Mixture(3, o[None, :], np.array([1.0, 1.0]))
    with pytest.raises(DomainError):
        Mixture(2, o[None, :], np.array([1.0]))
    with pytest.raises(DomainError):
        Mixture(3, np.array([[2.0, 0.0, 0.0, 0.0]]), np.array([1.0]))
    with pytest.raises(DomainError):
        mixture_ly_expression(Mixture(3, o[None, :], np.array([1.0])), 0.5, 0.0, o)


@settings(max_examples=50, deadline=None)
@given(v=st.lists(st.floats(-50, 50), min_size=3, max_size=3),
       w=st.lists(st.floats(-50, 50), min_size=3, max_size=3))
def test_distance_symmetric_and_nonnegative(v, w):
    a, b = lift(v), lift(w)
    d = distance(a, b)
    assert d >= 0 and d == distance(b, a)
