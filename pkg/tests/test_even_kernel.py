import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hypkernel.errors import AccuracyError, DomainError
from hypkernel.even_kernel import (
    DEFAULT_QUADRATURE, QuadratureSpec, check_lemma_Z, eval_alpha_even, eval_kernel_even,
)
from hypkernel.odd_kernel import eval_kernel_odd

from oracles import descend, k3_closed, k5_closed, mp_alpha2_at_zero, richardson_diff

# alpha_2(0.1, 0) to 17 digits from a 40-digit mpmath quadrature
ALPHA2_AT_01 = 0.99180878758683696


def test_alpha2_reference_value():
    assert float(mp_alpha2_at_zero(0.1)) == pytest.approx(ALPHA2_AT_01, rel=1e-16)
    a = eval_alpha_even(1, 0.1, 0.0).alpha
    assert a == pytest.approx(0.9918, abs=1e-3)
    assert a == pytest.approx(ALPHA2_AT_01, rel=1e-12)


@pytest.mark.parametrize("t", [0.02, 0.5, 3.0, 15.0])
def test_alpha2_at_zero_against_oracle(t):
    assert eval_alpha_even(1, t, 0.0).alpha == pytest.approx(float(mp_alpha2_at_zero(t)), rel=1e-11)


def test_alpha2_decreasing_in_t():
    vals = [eval_alpha_even(1, t, 0.0).alpha for t in (0.05, 0.1, 0.5, 1.0, 5.0)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert eval_alpha_even(1, 1.0, 0.0).alpha < eval_alpha_even(1, 0.1, 0.0).alpha


@pytest.mark.parametrize("m", [1, 2, 3])
def test_alpha_even_maximal_at_origin(m):
    rs = np.linspace(0.0, 15.0, 31)
    for t in (0.1, 1.0, 6.0):
        a = np.asarray(eval_alpha_even(m, t, rs).alpha)
        assert np.all(a[1:] <= a[0])


def test_plane_time_derivative_example():
    assert eval_kernel_even(2, 1.0, 0.0).dlog_dt < -1.25


@pytest.mark.parametrize("n,t,r,k_next", [
    (2, 1.0, 1.0, k3_closed), (2, 0.05, 0.0, k3_closed), (2, 3.0, 6.0, k3_closed),
    (4, 1.0, 1.0, k5_closed), (4, 0.3, 2.5, k5_closed), (4, 2.0, 0.0, k5_closed),
])
def test_descent_from_odd_closed_forms(n, t, r, k_next):
    assert eval_kernel_even(n, t, r).value == pytest.approx(descend(k_next, n, t, r), rel=1e-9)


def test_k6_descends_from_k7():
    k7 = lambda t, r: eval_kernel_odd(7, t, r).value  # noqa: E731
    for t, r in ((0.4, 0.7), (2.0, 3.0)):
        assert eval_kernel_even(6, t, r).value == pytest.approx(descend(k7, 6, t, r), rel=1e-8)


@pytest.mark.parametrize("t", [0.1, 1.0, 4.0])
def test_plane_mass_is_one(t):
    top = 2 * t + 12 * math.sqrt(t) + 10
    edges = np.linspace(0.0, top, 81)
    x, w = np.polynomial.legendre.leggauss(20)
    mid, half = 0.5 * (edges[1:] + edges[:-1]), 0.5 * np.diff(edges)
    r = (mid[:, None] + half[:, None] * x).ravel()
    wt = (half[:, None] * w).ravel()
    k = eval_kernel_even(2, t, r)
    # 2 pi sinh r K_2, with e^{r} folded into the log value
    dens = 2 * math.pi * np.exp(np.asarray(k.log_value) + r) * 0.5 * (1 - np.exp(-2 * r))
    assert float(np.sum(wt * dens)) == pytest.approx(1.0, abs=1e-5)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_radial_log_derivative_bounds(m):
    rs = np.linspace(0.0, 20.0, 41)
    for t in np.geomspace(0.05, 20.0, 8):
        a = eval_alpha_even(m, t, rs)
        lr = -np.asarray(a.dlog_dr)
        assert np.all(lr >= -1e-8) and np.all(lr <= (m - 0.5) * (1 + 1e-8))
        # the (4 pi t)^{1/2} alpha_{2m} factor is non-decreasing in t
        assert np.all(0.5 / t + np.asarray(a.dlog_dt) >= -1e-8)


def test_time_log_derivative_sign_is_measured():
    # only m = 1 has a proven sign; report the others as data
    for t in (0.1, 1.0, 5.0):
        assert eval_alpha_even(1, t, 0.0).dlog_dt < 0
    observed = [eval_alpha_even(m, 1.0, 0.0).dlog_dt for m in (2, 3)]
    assert all(math.isfinite(v) for v in observed)


@pytest.mark.parametrize("m", [1, 2, 4])
def test_derivatives_match_finite_differences(m):
    for t in (0.1, 1.0, 5.0):
        for r in (0.4, 2.0, 9.0):
            a = eval_alpha_even(m, t, r)
            hr = 1e-3 * max(1.0, r)
            ht = 1e-3 * t
            fd_r = richardson_diff(lambda x: eval_alpha_even(m, t, x).log_alpha, r, hr)
            fd_t = richardson_diff(lambda x: eval_alpha_even(m, x, r).log_alpha, t, ht)
            assert a.dlog_dr == pytest.approx(fd_r, rel=1e-5, abs=1e-8)
            assert a.dlog_dt == pytest.approx(fd_t, rel=1e-5, abs=1e-8)


def test_kernel_derivatives_match_finite_differences():
    for n, t, r in ((2, 0.3, 1.0), (4, 2.0, 5.0), (10, 1.0, 0.5)):
        k = eval_kernel_even(n, t, r)
        fd_r = richardson_diff(lambda x: eval_kernel_even(n, t, x).log_value, r, 1e-3 * max(1, r))
        fd_t = richardson_diff(lambda x: eval_kernel_even(n, x, r).log_value, t, 1e-3 * t)
        assert k.dlog_dr == pytest.approx(fd_r, rel=1e-6)
        assert k.dlog_dt == pytest.approx(fd_t, rel=1e-6)


def test_invariant_under_initial_mesh():
    fine = QuadratureSpec(initial_panels=8)
    coarse = QuadratureSpec(initial_panels=4)
    rs = np.array([0.0, 0.5, 3.0, 12.0])
    for m in (1, 3):
        for t in (0.05, 2.0):
            a = eval_alpha_even(m, t, rs, fine)
            b = eval_alpha_even(m, t, rs, coarse)
            assert np.allclose(a.alpha, b.alpha, rtol=1e-9, atol=0)
            assert np.allclose(a.dlog_dr, b.dlog_dr, rtol=1e-8, atol=1e-12)


def test_vectorised_matches_scalar():
    rs = np.array([0.0, 1.0, 4.0])
    vec = eval_kernel_even(4, 0.7, rs)
    for i, r in enumerate(rs):
        assert vec.log_value[i] == pytest.approx(eval_kernel_even(4, 0.7, r).log_value, rel=1e-12)


def test_non_convergence_raises_accuracy_error():
    q = QuadratureSpec(rel_tol=1e-16, max_subdivisions=16)
    with pytest.raises(AccuracyError) as info:
        eval_alpha_even(1, 1.0, 1.0, q)
    assert info.value.residual is not None


def test_domain_errors():
    with pytest.raises(DomainError):
        eval_kernel_even(3, 1.0, 1.0)
    with pytest.raises(DomainError):
        eval_kernel_even(32, 1.0, 1.0)
    with pytest.raises(DomainError):
        eval_alpha_even(0, 1.0, 1.0)
    with pytest.raises(DomainError):
        eval_kernel_even(2, -1.0, 1.0)
    with pytest.raises(DomainError):
        QuadratureSpec(rel_tol=0.0)
    with pytest.raises(DomainError):
        QuadratureSpec(max_subdivisions=0)


def test_quadrature_defaults():
    q = DEFAULT_QUADRATURE
    assert (q.rel_tol, q.abs_tol, q.tail_cut, q.max_subdivisions) == (1e-9, 1e-14, 1.5, 2000)
    assert q.u_max(1.0) == pytest.approx(1.5 * math.sqrt(4 * math.log(1e14)))


def _mp_lemma_z(a, r):
    with mp.workdps(60):
        a, r = mp.mpf(a), mp.mpf(r)
        return float(mp.diff(lambda x: mp.log(mp.cosh(mp.sqrt(a * a + x * x)) - mp.cosh(x)), r))


def test_lemma_z_examples():
    for a in (0.1, 1.0, 7.0):
        assert check_lemma_Z(a, 0.0) == 0.0
    z = check_lemma_Z(1.0, 1.0)
    assert 0 <= z <= 1
    z20 = check_lemma_Z(0.1, 20.0)
    assert 0 <= z20 <= 1
    tail = [check_lemma_Z(0.1, r) for r in (20.0, 200.0, 2000.0, 20000.0)]
    assert all(a < b for a, b in zip(tail, tail[1:]))
    assert 1 - tail[-1] < 1e-3


@pytest.mark.parametrize("a,r", [(1.0, 1.0), (0.1, 20.0), (1e-4, 0.3), (5.0, 1e-6), (0.5, 8.0), (9.0, 9.0)])
def test_lemma_z_against_mpmath(a, r):
    assert check_lemma_Z(a, r) == pytest.approx(_mp_lemma_z(a, r), rel=1e-12, abs=1e-15)


def test_lemma_z_grid_bounds():
    A, R = np.meshgrid(np.linspace(0.1, 10, 100), np.linspace(0, 10, 100), indexing="ij")
    Z = check_lemma_Z(A, R)
    assert np.all((Z >= 0) & (Z <= 1))


def test_lemma_z_domain():
    with pytest.raises(DomainError):
        check_lemma_Z(0.0, 1.0)
    with pytest.raises(DomainError):
        check_lemma_Z(1.0, -1.0)


@settings(max_examples=200, deadline=None)
@given(a=st.floats(1e-6, 50.0), r=st.floats(0.0, 300.0))
def test_lemma_z_in_unit_interval(a, r):
    z = check_lemma_Z(a, r)
    assert 0.0 <= z <= 1.0
