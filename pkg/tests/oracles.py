"""Random generators and brute-force oracles shared by the test modules."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from typing import Sequence

from termreflect.abstractions import TransitionFormula, primed
from termreflect.lia import (
    And, Exists, Forall, Formula, LinTerm, Not, Or, conj, disj, div, eq, evaluate, exists,
    forall, implies, le, leq, model, neg, substitute,
)
from termreflect.qlinalg import QMatrix


# ---------------------------------------------------------------------------
# formulas


def rand_term(rng: random.Random, names: Sequence[str], coef: int = 3, const: int = 4) -> LinTerm:
    chosen = rng.sample(list(names), rng.randint(1, min(3, len(names))))
    return LinTerm({v: rng.randint(-coef, coef) for v in chosen}, rng.randint(-const, const))


def rand_atom(rng: random.Random, names: Sequence[str], moduli=(2, 3, 4)) -> Formula:
    t = rand_term(rng, names)
    if rng.random() < 0.25:
        return div(rng.choice(moduli), t)
    return leq(t)


def rand_qf(rng: random.Random, names: Sequence[str], depth: int = 3) -> Formula:
    if depth == 0 or rng.random() < 0.3:
        a = rand_atom(rng, names)
        return neg(a) if rng.random() < 0.2 else a
    op = rng.choice([conj, disj])
    return op(rand_qf(rng, names, depth - 1), rand_qf(rng, names, depth - 1))


def bounded_quantified(rng: random.Random, free: Sequence[str], qvars: Sequence[str],
                       bound: int, depth: int = 3) -> Formula:
    """A formula whose quantifiers range over [-bound, bound] by construction."""
    f = rand_qf(rng, list(free) + list(qvars), depth)
    for q in reversed(qvars):
        box = conj(le(LinTerm.constant(-bound), LinTerm.var(q)), le(LinTerm.var(q), LinTerm.constant(bound)))
        if rng.random() < 0.6:
            f = exists(q, conj(box, f))
        else:
            f = forall(q, implies(box, f))
    return f


def brute(f: Formula, val: dict[str, int], bound: int) -> bool:
    """Truth of f at val, with quantifiers enumerated over [-bound, bound]."""
    if isinstance(f, (Exists, Forall)):
        rs = (brute(f.body, {**val, f.var: x}, bound) for x in range(-bound, bound + 1))
        return any(rs) if isinstance(f, Exists) else all(rs)
    if isinstance(f, And):
        return all(brute(a, val, bound) for a in f.args)
    if isinstance(f, Or):
        return any(brute(a, val, bound) for a in f.args)
    if isinstance(f, Not):
        return not brute(f.arg, val, bound)
    return evaluate(f, val)


def grid(names: Sequence[str], lo: int, hi: int):
    for vals in itertools.product(range(lo, hi + 1), repeat=len(names)):
        yield dict(zip(names, vals))


# ---------------------------------------------------------------------------
# matrices


def rand_upper_triangular(rng: random.Random, n: int, lo: int = -3, hi: int = 3) -> QMatrix:
    return QMatrix.from_rows([[rng.randint(lo, hi) if j >= i else 0 for j in range(n)]
                              for i in range(n)], n)


def rand_matrix(rng: random.Random, rows: int, cols: int, lo: int = -3, hi: int = 3) -> QMatrix:
    return QMatrix.from_rows([[rng.randint(lo, hi) for _ in range(cols)] for _ in range(rows)], cols)


def mat_power_apply(a: QMatrix, x: Sequence, k: int) -> tuple[Fraction, ...]:
    cur = tuple(Fraction(v) for v in x)
    for _ in range(k):
        cur = a.apply(cur)
    return cur


# ---------------------------------------------------------------------------
# transition formulas

STATE_NAMES = ("x", "y", "z")


def rand_update(rng: random.Random, names: Sequence[str]) -> Formula:
    """x' = affine(x) for most variables, occasionally a one-sided or havoc update."""
    parts = []
    for v in names:
        r = rng.random()
        rhs = LinTerm({u: rng.choice([-1, 0, 0, 1, 1, 2]) if u == v else rng.choice([-1, 0, 0, 0, 1])
                       for u in names}, rng.randint(-2, 2))
        if r < 0.8:
            parts.append(eq(LinTerm.var(primed(v)), rhs))
        elif r < 0.9:
            parts.append(le(LinTerm.var(primed(v)), rhs))
        # else: havoc
    return conj(*parts)


def rand_guard(rng: random.Random, names: Sequence[str]) -> Formula:
    atoms_ = []
    for _ in range(rng.randint(1, 2)):
        t = LinTerm({v: rng.randint(-2, 2) for v in names}, rng.randint(-3, 3))
        atoms_.append(div(rng.choice([2, 3]), t) if rng.random() < 0.2 else leq(t))
    return conj(*atoms_)


def rand_tf(rng: random.Random, n: int | None = None) -> TransitionFormula:
    n = rng.randint(1, 2) if n is None else n
    names = STATE_NAMES[:n]
    body = conj(rand_guard(rng, names), rand_update(rng, names))
    if rng.random() < 0.35:
        other = conj(rand_guard(rng, names), rand_update(rng, names))
        body = disj(body, other)
    return TransitionFormula(names, body)


def rand_tf_constraint(rng: random.Random, names: Sequence[str]) -> Formula:
    allv = list(names) + [primed(v) for v in names]
    t = LinTerm({v: rng.randint(-2, 2) for v in rng.sample(allv, rng.randint(1, len(allv)))},
                rng.randint(-3, 3))
    return div(2, t) if rng.random() < 0.15 else leq(t)


def successor(f: TransitionFormula, state: dict[str, int]) -> dict[str, int] | None:
    """Some successor of state under f, found by a model query (None if stuck)."""
    body = substitute(f.body, state)
    m = model(body)
    if m is None:
        return None
    return {v: m.get(primed(v), 0) for v in f.vars}


def survives(f: TransitionFormula, state: dict[str, int], steps: int) -> bool:
    cur = state
    for _ in range(steps):
        cur = successor(f, cur)
        if cur is None:
            return False
    return True
