"""Exact sparse polynomials in T_1, T_2, ... with integer coefficients.

The odd-dimensional kernel correction factor is

    alpha_{2m+1}(t, r) = sum_{i=0}^{m-1} t^i P_{m,i}(f_1, ..., f_m)

and the table P_{m,.} obeys

    P_{m+1,i} = T_1 P_{m,i} + 2 sum_j (dP_{m,i-1}/dT_j) T_{j+1},

with P_{1,0} = T_1 and P_{m,-1} = P_{m,m} = 0.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError

MAX_TABLE_INDEX = 15


def _key(exps):
    """Canonical exponent key: sorted (variable, exponent) pairs, zeros dropped."""
    return tuple(sorted((j, e) for j, e in exps.items() if e))


class SparsePoly:
    """Integer polynomial stored as {((j, e_j), ...): coefficient}.

    Variables are 1-based (T_1 is index 1). Zero coefficients are never stored.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {k: c for k, c in (terms or {}).items() if c}

    @classmethod
    def variable(cls, j, coef=1):
        if j < 1:
            raise DomainError(f"variable index must be >= 1, got {j}")
        return cls({((j, 1),): coef})

    def __add__(self, other):
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return SparsePoly(out)

    def __mul__(self, other):
        if isinstance(other, int):
            return SparsePoly({k: c * other for k, c in self.terms.items()})
        out = {}
        for ka, ca in self.terms.items():
            for kb, cb in other.terms.items():
                exps = dict(ka)
                for j, e in kb:
                    exps[j] = exps.get(j, 0) + e
                k = _key(exps)
                out[k] = out.get(k, 0) + ca * cb
        return SparsePoly(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, SparsePoly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for k, c in sorted(self.terms.items()):
            mono = "*".join(f"T{j}" + (f"^{e}" if e > 1 else "") for j, e in k)
            parts.append(f"{c}*{mono}" if mono else str(c))
        return " + ".join(parts)

    @property
    def nvars(self):
        """Largest variable index that occurs (0 for a constant)."""
        return max((j for k in self.terms for j, _ in k), default=0)

    def degree(self, exps):
        return sum(e for _, e in exps)

    def weighted_degree(self, exps):
        return sum(j * e for j, e in exps)

    def to_json(self):
        return [
            {"exps": {str(j): e for j, e in k}, "coef": str(c)}
            for k, c in sorted(self.terms.items())
        ]

    @classmethod
    def from_json(cls, data):
        return cls({_key({int(j): e for j, e in d["exps"].items()}): int(d["coef"]) for d in data})


def partial_derivative(p, j):
    """Formal derivative of ``p`` in T_j."""
    if j < 1:
        raise DomainError(f"variable index must be >= 1, got {j}")
    out = {}
    for k, c in p.terms.items():
        exps = dict(k)
        e = exps.get(j, 0)
        if e == 0:
            continue
        exps[j] = e - 1
        kk = _key(exps)
        out[kk] = out.get(kk, 0) + c * e
    return SparsePoly(out)


def eval_poly(p, values):
    """Substitute values[j-1] for T_j. ``values`` entries may be numpy arrays."""
    if len(values) < p.nvars:
        raise DomainError(f"polynomial uses T_{p.nvars} but only {len(values)} values given")
    total = 0
    for k, c in p.terms.items():
        term = float(c)
        for j, e in k:
            term = term * values[j - 1] ** e
        total = total + term
    return total


@dataclass(frozen=True)
class PTable:
    m: int
    polys: tuple

    def to_json(self):
        return {"m": self.m, "polys": [p.to_json() for p in self.polys]}

    def dumps(self):
        return json.dumps(self.to_json())

    @classmethod
    def from_json(cls, data):
        return cls(m=int(data["m"]), polys=tuple(SparsePoly.from_json(p) for p in data["polys"]))


@lru_cache(maxsize=None)
def _tables():
    return [PTable(1, (SparsePoly.variable(1),))]


def build_P(m, max_index=MAX_TABLE_INDEX):
    """Return the table P_{m,0}, ..., P_{m,m-1} (memoised, exact integers)."""
    if not 1 <= m <= max_index:
        raise DomainError(f"table index must lie in [1, {max_index}], got {m}")
    tables = _tables()
    while len(tables) < m:
        prev = tables[-1]
        k = prev.m
        t1 = SparsePoly.variable(1)
        new = []
        for i in range(k + 1):
            poly = t1 * prev.polys[i] if i < k else SparsePoly()
            if i >= 1:
                src = prev.polys[i - 1]
                for j in range(1, k + 1):
                    d = partial_derivative(src, j)
                    if d:
                        poly = poly + 2 * (d * SparsePoly.variable(j + 1))
            new.append(poly)
        tables.append(PTable(k + 1, tuple(new)))
    return tables[m - 1]


@dataclass(frozen=True)
class CompiledPoly:
    """Dense exponent matrix for fast vectorised evaluation of a SparsePoly."""

    coefs: np.ndarray      # (nterms,)
    exps: np.ndarray       # (nterms, nvars)

    @classmethod
    def from_poly(cls, p, nvars):
        keys = sorted(p.terms)
        exps = np.zeros((len(keys), nvars), dtype=int)
        for row, k in enumerate(keys):
            for j, e in k:
                exps[row, j - 1] = e
        return cls(np.array([float(p.terms[k]) for k in keys]), exps)

    def __call__(self, values):
        """``values`` has shape (nvars, ...); returns shape (...)."""
        values = np.asarray(values, dtype=float)
        out = np.zeros(values.shape[1:])
        for c, row in zip(self.coefs, self.exps):
            term = np.full(values.shape[1:], c)
            for j, e in enumerate(row):
                if e:
                    term = term * values[j] ** e
            out = out + term
        return out


@lru_cache(maxsize=None)
def compiled_table(m):
    """Compiled P_{m,i} and the radial-derivative companions used by the kernels.

    Returns (polys, dpolys) where dpolys[i] evaluates
    sum_j (dP_{m,i}/dT_j) T_{j+1}, a polynomial in T_1..T_{m+1}.
    """
    table = build_P(m)
    polys, dpolys = [], []
    for p in table.polys:
        polys.append(CompiledPoly.from_poly(p, m))
        dp = SparsePoly()
        for j in range(1, m + 1):
            d = partial_derivative(p, j)
            if d:
                dp = dp + d * SparsePoly.variable(j + 1)
        dpolys.append(CompiledPoly.from_poly(dp, m + 1))
    return tuple(polys), tuple(dpolys)
