"""Characteristic sequences of LIA guards under integer-spectrum dynamics.

For a guard G and a matrix A, ``chi_formula(G, A)`` returns formulas
H_0..H_{P-1} over the same state variables such that, for every integer
state x, G(A^k x) and H_{k mod P}(x) agree for all large enough k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Sequence

from .lia import (
    TRUE, And, Bool, Div, Formula, LinTerm, Leq, Not, Or, conj, disj, div, eq, ge,
    neg, qe_cooper, evaluate,
)
from .lia.simplify import simplify
from .qlinalg import ExpPoly, QMatrix, closed_form, dominance_key


def default_names(n: int) -> tuple[str, ...]:
    return tuple(f"w{i}" for i in range(n))


@dataclass(frozen=True)
class PeriodicFormulaSeq:
    """One period H_0..H_{P-1} of a characteristic sequence."""

    formulas: tuple[Formula, ...]

    def __post_init__(self) -> None:
        if not self.formulas:
            raise ValueError("a periodic sequence needs at least one formula")
        object.__setattr__(self, "formulas", tuple(self.formulas))

    @property
    def period(self) -> int:
        return len(self.formulas)

    def at(self, k: int) -> Formula:
        return self.formulas[k % self.period]

    def aligned(self, period: int) -> tuple[Formula, ...]:
        if period % self.period:
            raise ValueError("target period must be a multiple of the current one")
        return tuple(self.at(k) for k in range(period))

    def conjunction(self) -> Formula:
        return conj(*self.formulas)

    def collapsed(self) -> PeriodicFormulaSeq:
        """Shortest period p (dividing the current one) that repeats syntactically."""
        fs = self.formulas
        for p in range(1, len(fs) + 1):
            if len(fs) % p == 0 and all(fs[i] == fs[i % p] for i in range(len(fs))):
                return PeriodicFormulaSeq(fs[:p])
        return self

    def map(self, fn) -> PeriodicFormulaSeq:
        return PeriodicFormulaSeq(tuple(fn(f) for f in self.formulas)).collapsed()

    @staticmethod
    def pointwise(fn, seqs: Sequence[PeriodicFormulaSeq]) -> PeriodicFormulaSeq:
        period = reduce(math.lcm, (s.period for s in seqs), 1)
        cols = [s.aligned(period) for s in seqs]
        return PeriodicFormulaSeq(tuple(fn(*(c[k] for c in cols)) for k in range(period))).collapsed()


# ---------------------------------------------------------------------------
# dominant term analysis

# an exp-poly with affine coefficients: list of (lam, degree, LinTerm)
_Terms = list[tuple[int, int, LinTerm]]


def _dta_terms(terms: _Terms) -> Formula:
    out: Formula = TRUE
    for _, _, t in reversed(terms):
        zero = LinTerm.constant(0)
        out = disj(ge(t, LinTerm.constant(1)), conj(eq(t, zero), out))
    return out


def _exp_terms(p: ExpPoly, names: Sequence[str]) -> _Terms:
    return [(t.lam, t.degree, LinTerm.from_vector(t.coeffs, names)) for t in p.terms]


def dta(p: ExpPoly, names: Sequence[str] | None = None) -> Formula:
    """States at which p is eventually non-negative (all bases must be positive)."""
    names = default_names(p.dim) if names is None else tuple(names)
    if any(t.lam <= 0 for t in p.terms):
        raise ValueError("non-positive base; apply even/odd split first")
    return _dta_terms(_exp_terms(p, names))


def _merge(raw: dict[tuple[int, int], LinTerm]) -> _Terms:
    items = [(lam, d, t) for (lam, d), t in raw.items() if t.coeffs or t.const]
    items.sort(key=lambda x: dominance_key(x[0], x[1]))
    return items


def _add(raw: dict[tuple[int, int], LinTerm], key: tuple[int, int], t: LinTerm) -> None:
    raw[key] = raw.get(key, LinTerm.constant(0)) + t


def _split_terms(p: ExpPoly, names: Sequence[str], parity: int) -> dict[tuple[int, int], LinTerm]:
    """Terms of p(2k + parity) over the base lam^2 and powers of k."""
    raw: dict[tuple[int, int], LinTerm] = {}
    for lam, d, t in _exp_terms(p, names):
        base = lam * lam
        if parity == 0:
            _add(raw, (base, d), t * (2 ** d))
        else:
            for e in range(d + 1):
                _add(raw, (base, e), t * (lam * math.comb(d, e) * 2 ** e))
    return raw


def chi_ineq(cterm: Sequence[int], dconst: int, a: QMatrix,
             names: Sequence[str] | None = None) -> PeriodicFormulaSeq:
    """chi(c.x + d >= 0, a)"""
    names = default_names(a.rows) if names is None else tuple(names)
    p = closed_form(cterm, a)
    shift = LinTerm.constant(dconst * p.denom)
    if all(t.lam > 0 for t in p.terms):
        raw = {(t.lam, t.degree): LinTerm.from_vector(t.coeffs, names) for t in p.terms}
        _add(raw, (1, 0), shift)
        return PeriodicFormulaSeq((_dta_terms(_merge(raw)),))
    slots = []
    for parity in (0, 1):
        raw = _split_terms(p, names, parity)
        _add(raw, (1, 0), shift)
        slots.append(_dta_terms(_merge(raw)))
    return PeriodicFormulaSeq(tuple(slots)).collapsed()


# ---------------------------------------------------------------------------
# divisibility atoms


def _eventual_cycle(lam: int, modulus: int) -> tuple[int, int]:
    """(transient, period) of lam^k mod modulus."""
    seen: dict[int, int] = {}
    v, k = 1 % modulus, 0
    while v not in seen:
        seen[v] = k
        v = (v * lam) % modulus
        k += 1
    return seen[v], k - seen[v]


def chi_div(n: int, cterm: Sequence[int], dconst: int, a: QMatrix,
            names: Sequence[str] | None = None) -> PeriodicFormulaSeq:
    """chi(n | c.x + d, a)"""
    if n < 1:
        raise ValueError("modulus must be positive")
    names = default_names(a.rows) if names is None else tuple(names)
    p = closed_form(cterm, a)
    modulus = p.denom * n
    period, transient = 1, p.validity_threshold + 1
    for t in p.terms:
        tr, per = _eventual_cycle(t.lam, modulus)
        if t.degree:
            per = math.lcm(per, modulus)
        period = math.lcm(period, per)
        transient = max(transient, tr)
    start = -(-transient // period) * period
    const = LinTerm.constant(dconst * p.denom)
    slots = []
    for j in range(period):
        k = start + j
        acc = const
        for t in p.terms:
            z = pow(t.lam, k, modulus) * pow(k, t.degree, modulus) % modulus
            if z:
                acc = acc + LinTerm.from_vector(t.coeffs, names) * z
        slots.append(div(modulus, acc))
    return PeriodicFormulaSeq(tuple(slots)).collapsed()


# ---------------------------------------------------------------------------
# formulas


def _linear_parts(term: LinTerm, names: Sequence[str]) -> tuple[list[int], int]:
    """(c, d) with term = c.x + d."""
    extra = set(term.coeffs) - set(names)
    if extra:
        raise ValueError(f"guard mentions non-state variables {sorted(extra)}")
    return [term.coeff(v) for v in names], term.const


def chi_formula(g: Formula, a: QMatrix, names: Sequence[str] | None = None) -> PeriodicFormulaSeq:
    names = default_names(a.rows) if names is None else tuple(names)
    qf = qe_cooper(g)
    memo: dict[Formula, PeriodicFormulaSeq] = {}

    def go(f: Formula) -> PeriodicFormulaSeq:
        hit = memo.get(f)
        if hit is not None:
            return hit
        if isinstance(f, Bool):
            r = PeriodicFormulaSeq((f,))
        elif isinstance(f, Leq):
            c, d = _linear_parts(f.term, names)
            r = chi_ineq([-x for x in c], -d, a, names)
        elif isinstance(f, Div):
            c, d = _linear_parts(f.term, names)
            r = chi_div(f.modulus, c, d, a, names)
        elif isinstance(f, Not):
            r = go(f.arg).map(neg)
        elif isinstance(f, And):
            r = PeriodicFormulaSeq.pointwise(lambda *fs: conj(*fs), [go(x) for x in f.args])
        elif isinstance(f, Or):
            r = PeriodicFormulaSeq.pointwise(lambda *fs: disj(*fs), [go(x) for x in f.args])
        else:
            raise TypeError(f"unexpected formula {f!r}")
        memo[f] = r
        return r

    if a.rows == 0:
        # closed guard: its truth value is constant along the (trivial) orbit
        if qf.free_vars():
            raise ValueError("guard over a zero-dimensional space must be closed")
        return PeriodicFormulaSeq((qf,))
    return go(qf).map(simplify)


def eventual_invariance(g: Formula, a: QMatrix, names: Sequence[str] | None = None) -> Formula:
    """States x with G(a^k x) for all but finitely many k."""
    return chi_formula(g, a, names).conjunction()


def orbit_truth(g: Formula, a: QMatrix, x0: Sequence[int], ks: Sequence[int],
                names: Sequence[str] | None = None) -> list[bool]:
    """G(a^k x0) for each k in ks (quantifier-free G); a test oracle."""
    names = default_names(a.rows) if names is None else tuple(names)
    cur = tuple(Fraction(v) for v in x0)
    truth: dict[int, bool] = {}
    wanted = set(ks)
    for k in range(max(ks, default=-1) + 1):
        if k in wanted:
            if any(v.denominator != 1 for v in cur):
                raise ValueError("orbit left the integers")
            truth[k] = evaluate(g, {n: int(v) for n, v in zip(names, cur)})
        cur = a.apply(cur)
    return [truth[k] for k in ks]
