import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hypkernel.errors import DomainError
from hypkernel.poly_engine import (
    PTable, SparsePoly, build_P, compiled_table, eval_poly, partial_derivative,
)

T1, T2, T3, T4 = (SparsePoly.variable(j) for j in (1, 2, 3, 4))


def test_small_tables():
    assert build_P(1).polys == (T1,)
    assert build_P(2).polys == (T1 * T1, 2 * T2)
    assert build_P(3).polys == (T1 * T1 * T1, 6 * (T1 * T2), 4 * T3)
    assert build_P(4).polys == (T1 * T1 * T1 * T1, 12 * (T1 * T1 * T2), 16 * (T1 * T3) + 12 * (T2 * T2), 8 * T4)


def test_eval_examples():
    assert eval_poly(T1 * T1, [1.0]) == 1.0
    assert eval_poly(2 * T2, [0.0, 1 / 3]) == pytest.approx(2 / 3)
    assert eval_poly(6 * (T1 * T2), [0.850918, 0.22666]) == pytest.approx(1.15726, abs=5e-5)


def test_eval_length_mismatch():
    with pytest.raises(DomainError):
        eval_poly(2 * T2, [1.0])


def test_partial_derivative_examples():
    assert partial_derivative(T1 * T1, 1) == 2 * T1
    assert partial_derivative(2 * T2, 1) == SparsePoly()
    assert partial_derivative(6 * (T1 * T2), 2) == 6 * T1
    with pytest.raises(DomainError):
        partial_derivative(T1, 0)


def test_build_range():
    with pytest.raises(DomainError):
        build_P(0)
    with pytest.raises(DomainError):
        build_P(16)


@pytest.mark.parametrize("m", range(1, 13))
def test_table_structure(m):
    polys = build_P(m).polys
    assert len(polys) == m
    assert polys[0] == SparsePoly({((1, m),): 1})
    assert polys[-1] == SparsePoly({((m, 1),): 2 ** (m - 1)})
    for i, p in enumerate(polys):
        for key, c in p.terms.items():
            assert isinstance(c, int) and c > 0
            assert p.degree(key) == m - i
            assert p.weighted_degree(key) == m


def test_sum_rule_at_zero():
    # alpha_5(t, 0) = f1(0)^2 + 2 t f2(0) = 1 + 2t/3
    p0, p1 = build_P(2).polys
    vals = [1.0, 1 / 3]
    assert eval_poly(p0, vals) == 1.0
    assert eval_poly(p1, vals) == pytest.approx(2 / 3)


def test_coefficients_stay_exact_at_max_index():
    polys = build_P(15).polys
    assert polys[-1].terms == {((15, 1),): 2 ** 14}
    assert all(isinstance(c, int) for p in polys for c in p.terms.values())


def test_ptable_json_round_trip_and_format():
    table = build_P(3)
    data = json.loads(table.dumps())
    assert data["m"] == 3
    assert data["polys"][0] == [{"exps": {"1": 3}, "coef": "1"}]
    assert PTable.from_json(data) == table


def test_compiled_matches_exact():
    rng = np.random.default_rng(3)
    vals = rng.uniform(0.1, 1.0, size=(9, 7))
    polys, dpolys = compiled_table(8)
    for cp, p in zip(polys, build_P(8).polys):
        assert np.allclose(cp(vals[:8]), eval_poly(p, list(vals[:8])), rtol=1e-13)
    for cd, p in zip(dpolys, build_P(8).polys):
        chain = SparsePoly()
        for j in range(1, 9):
            chain = chain + partial_derivative(p, j) * SparsePoly.variable(j + 1)
        assert np.allclose(cd(vals), eval_poly(chain, list(vals)), rtol=1e-13)


monomials = st.dictionaries(st.integers(1, 4), st.integers(0, 3), max_size=3)
polys = st.dictionaries(monomials.map(lambda d: tuple(sorted((j, e) for j, e in d.items() if e))),
                        st.integers(-20, 20), max_size=5).map(SparsePoly)


@settings(max_examples=80, deadline=None)
@given(polys, polys, polys)
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@settings(max_examples=80, deadline=None)
@given(polys, polys, st.integers(1, 4))
def test_leibniz_rule(a, b, j):
    assert partial_derivative(a * b, j) == partial_derivative(a, j) * b + a * partial_derivative(b, j)


@settings(max_examples=80, deadline=None)
@given(polys, polys, st.lists(st.floats(-2, 2), min_size=4, max_size=4))
def test_evaluation_is_a_homomorphism(a, b, vals):
    lhs = eval_poly(a * b, vals)
    rhs = eval_poly(a, vals) * eval_poly(b, vals)
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9)


@settings(max_examples=50, deadline=None)
@given(polys)
def test_json_round_trip(a):
    assert SparsePoly.from_json(json.loads(json.dumps(a.to_json()))) == a
