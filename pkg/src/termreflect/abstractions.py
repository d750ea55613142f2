"""Transition formulas and their affine abstractions.

State vectors of a transition are stacked primed-first: ``(x', x)``.  An
:class:`AffineTS` keeps its constraints as the RREF of the block
``[a | -b | -c]`` over the columns ``(x', x, 1)``, so equal relations have
equal representations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .lia import (
    Formula, LinTerm, conj, entails, exists_many, fresh_var, ge, is_quantifier_free,
    le, model, qe_cooper, rename, TRUE,
)
from .qlinalg import (
    QMatrix, Subspace, dot, null_space, primitive, qvec, rank, rref, solve,
)

FunctionalSpace = Subspace


def primed(name: str) -> str:
    return name + "'"


@dataclass(frozen=True)
class TransitionFormula:
    """body is an LIA formula over vars and their primed copies."""

    vars: tuple[str, ...]
    body: Formula

    def __post_init__(self) -> None:
        object.__setattr__(self, "vars", tuple(self.vars))
        allowed = set(self.vars) | {primed(v) for v in self.vars}
        extra = self.body.free_vars() - allowed
        if extra:
            raise ValueError(f"transition formula mentions undeclared variables {sorted(extra)}")

    @property
    def dim(self) -> int:
        return len(self.vars)

    @property
    def primed_vars(self) -> tuple[str, ...]:
        return tuple(primed(v) for v in self.vars)

    @property
    def stacked_vars(self) -> tuple[str, ...]:
        """Variable order of the stacked (x', x) space."""
        return self.primed_vars + self.vars

    @classmethod
    def identity(cls, vars: Sequence[str]) -> TransitionFormula:
        return cls(tuple(vars), conj(*(
            c for v in vars for c in (le(LinTerm.var(primed(v)), LinTerm.var(v)),
                                      ge(LinTerm.var(primed(v)), LinTerm.var(v))))))

    def quantifier_free(self) -> TransitionFormula:
        if is_quantifier_free(self.body):
            return self
        return TransitionFormula(self.vars, qe_cooper(self.body))


@dataclass(frozen=True)
class AffineTS:
    """Transition relation {(x, x') : a x' = b x + c}, or the empty relation."""

    dim: int
    a: QMatrix
    b: QMatrix
    c: tuple[Fraction, ...]
    empty: bool = False
    # model transcript of the hull computation, if any (not part of the value)
    samples: tuple = field(default=(), compare=False, repr=False)

    # construction -------------------------------------------------------
    @classmethod
    def empty_relation(cls, n: int) -> AffineTS:
        return cls(n, QMatrix.zeros(0, n), QMatrix.zeros(0, n), (), True)

    @classmethod
    def from_block(cls, n: int, rows: Sequence[Sequence], samples: tuple = ()) -> AffineTS:
        """Constraints given as rows r over (x', x, 1) meaning r . (x', x, 1) = 0."""
        if not rows:
            return cls(n, QMatrix.zeros(0, n), QMatrix.zeros(0, n), (), False, samples)
        m, pivots = rref(QMatrix.from_rows(rows, 2 * n + 1))
        if 2 * n in pivots:
            return cls.empty_relation(n)
        k = len(pivots)
        rr = m.row_list()[:k]
        a = QMatrix.from_rows([r[:n] for r in rr], n)
        b = QMatrix.from_rows([[-x for x in r[n:2 * n]] for r in rr], n)
        c = tuple(-r[2 * n] for r in rr)
        return cls(n, a, b, c, False, samples)

    @classmethod
    def from_matrices(cls, a: QMatrix, b: QMatrix, c: Sequence) -> AffineTS:
        n = a.cols
        if not (a.rows == b.rows == len(c)) or b.cols != n:
            raise ValueError("a, b and c must describe the same constraints")
        rows = [list(ra) + [-x for x in rb] + [-Fraction(ci)]
                for ra, rb, ci in zip(a.row_list(), b.row_list(), c)]
        return cls.from_block(n, rows)

    @classmethod
    def from_affine_space(cls, n: int, point: Sequence, directions: Sequence[Sequence],
                          samples: tuple = ()) -> AffineTS:
        """The relation whose stacked (x', x) points form point + span(directions)."""
        dirs = Subspace.span(directions, 2 * n)
        rows = []
        for f in dirs.annihilator().basis:
            rows.append(list(f) + [-dot(f, point)])
        return cls.from_block(n, rows, samples)

    @classmethod
    def linear(cls, m: QMatrix) -> AffineTS:
        """The total deterministic linear system x' = m x."""
        return cls.from_matrices(QMatrix.identity(m.rows), m, [0] * m.rows)

    # views ------------------------------------------------------------------
    @property
    def num_constraints(self) -> int:
        return self.a.rows

    def block(self) -> QMatrix:
        """The canonical constraint block [a | -b | -c]."""
        return QMatrix.from_rows(
            [list(ra) + [-x for x in rb] + [-ci]
             for ra, rb, ci in zip(self.a.row_list(), self.b.row_list(), self.c)],
            2 * self.dim + 1)

    def is_linear(self) -> bool:
        return not self.empty and not any(self.c)

    def is_deterministic(self) -> bool:
        return self.empty or rank(self.a) == self.dim

    def contains(self, x: Sequence, x_next: Sequence) -> bool:
        if self.empty:
            return False
        return all(sum((ai * v for ai, v in zip(ra, x_next)), Fraction(0))
                   == sum((bi * v for bi, v in zip(rb, x)), Fraction(0)) + ci
                   for ra, rb, ci in zip(self.a.row_list(), self.b.row_list(), self.c))

    def generators(self) -> tuple[tuple[Fraction, ...], list[tuple[Fraction, ...]]]:
        """A point and a direction basis of the relation in stacked (x', x) coordinates."""
        if self.empty:
            raise ValueError("the empty relation has no generators")
        n = self.dim
        if not self.a.rows:
            return (Fraction(0),) * (2 * n), list(Subspace.full(2 * n).basis)
        lhs = self.a.hstack(-self.b)
        point = solve(lhs, self.c)
        assert point is not None
        return point, list(null_space(lhs).basis)

    def to_formula(self, names: Sequence[str]) -> Formula:
        """The relation as an LIA formula over names and their primed copies."""
        from .lia import FALSE, eq
        if self.empty:
            return FALSE
        stacked = [primed(v) for v in names] + list(names)
        parts = []
        for r in self.block().row_list():
            ints = primitive(r)
            parts.append(eq(LinTerm.from_vector(ints[:-1], stacked, ints[-1]), LinTerm.constant(0)))
        return conj(*parts) if parts else TRUE

    def __str__(self) -> str:
        if self.empty:
            return f"AffineTS(dim={self.dim}, empty)"
        return f"AffineTS(dim={self.dim}, a={self.a}, b={self.b}, c={list(map(str, self.c))})"


@dataclass(frozen=True)
class LinearSimulation:
    """x -> matrix x + offset."""

    matrix: QMatrix
    offset: tuple[Fraction, ...] = ()

    def __post_init__(self) -> None:
        off = qvec(self.offset) if self.offset else (Fraction(0),) * self.matrix.rows
        if len(off) != self.matrix.rows:
            raise ValueError("offset length must equal the target dimension")
        object.__setattr__(self, "offset", off)

    @classmethod
    def identity(cls, n: int) -> LinearSimulation:
        return cls(QMatrix.identity(n))

    @property
    def source_dim(self) -> int:
        return self.matrix.cols

    @property
    def target_dim(self) -> int:
        return self.matrix.rows

    def apply(self, x: Sequence) -> tuple[Fraction, ...]:
        return tuple(v + o for v, o in zip(self.matrix.apply(qvec(x)), self.offset))

    def after(self, inner: LinearSimulation) -> LinearSimulation:
        """self o inner"""
        return LinearSimulation(self.matrix @ inner.matrix,
                                tuple(v + o for v, o in zip(self.matrix.apply(inner.offset), self.offset)))

    def scaled(self, k) -> LinearSimulation:
        return LinearSimulation(self.matrix.scale(k), tuple(Fraction(k) * o for o in self.offset))

    def is_linear(self) -> bool:
        return not any(self.offset)

    def is_simulation(self, source: AffineTS, target: AffineTS) -> bool:
        """Generator check: images of the source's generators satisfy the target."""
        if source.empty:
            return True
        if target.empty:
            return False
        n = source.dim
        point, dirs = source.generators()
        if not target.contains(self.apply(point[n:]), self.apply(point[:n])):
            return False
        lin = LinearSimulation(self.matrix)
        hom = AffineTS(target.dim, target.a, target.b, tuple(Fraction(0) for _ in target.c))
        for d in dirs:
            if not hom.contains(lin.apply(d[n:]), lin.apply(d[:n])):
                return False
        return True


# ---------------------------------------------------------------------------
# affine hull


def _model_vector(m: dict[str, int], names: Sequence[str]) -> tuple[Fraction, ...]:
    return tuple(Fraction(m.get(v, 0)) for v in names)


def affine_hull(f: TransitionFormula) -> AffineTS:
    """Affine hull of the models of f, by sampling models outside the current hull."""
    n = f.dim
    names = f.stacked_vars
    body = qe_cooper(f.body) if not is_quantifier_free(f.body) else f.body
    first = model(body)
    if first is None:
        return AffineTS.empty_relation(n)
    p0 = _model_vector(first, names)
    samples = [p0]
    directions: list[tuple[Fraction, ...]] = []
    while True:
        span = Subspace.span(directions, 2 * n)
        found = None
        for h in span.annihilator().basis:
            hi = primitive(h)
            lhs = LinTerm.from_vector(hi, names)
            v = int(dot(hi, p0))
            for side in (le(lhs, LinTerm.constant(v - 1)), ge(lhs, LinTerm.constant(v + 1))):
                found = model(conj(body, side))
                if found is not None:
                    break
            if found is not None:
                break
        if found is None:
            break
        p = _model_vector(found, names)
        samples.append(p)
        directions.append(tuple(a - b for a, b in zip(p, p0)))
    return AffineTS.from_affine_space(n, p0, directions, tuple(samples))


# ---------------------------------------------------------------------------
# determinization


def det_step(t: AffineTS, lam: FunctionalSpace) -> FunctionalSpace:
    """{d : exists y. M b^T y = 0 and a^T y = d} where M's rows span lam's annihilator."""
    n = t.dim
    if lam.ambient_dim != n:
        raise ValueError("functional space has the wrong dimension")
    if t.empty:
        return Subspace.full(n)
    if not t.a.rows:
        return Subspace.zero(n)
    m = lam.constraint_matrix()
    bt = t.b.T
    if m.rows:
        ys = null_space(m @ bt)
    else:
        ys = Subspace.full(t.a.rows)
    return ys.image(t.a.T)


def det_fixpoint(t: AffineTS) -> FunctionalSpace:
    """Greatest fixpoint of det_step, iterated down from the full dual space."""
    lam = Subspace.full(t.dim)
    while True:
        nxt = det_step(t, lam)
        if nxt == lam:
            return lam
        lam = nxt


def alpha(t: AffineTS, lam: FunctionalSpace) -> tuple[AffineTS, LinearSimulation]:
    """Image of t under the simulation whose rows are lam's basis."""
    s = LinearSimulation(lam.matrix() if lam.dim else QMatrix.zeros(0, t.dim))
    m = lam.dim
    if t.empty:
        return AffineTS.empty_relation(m), s
    n = t.dim
    point, dirs = t.generators()

    def image(z: Sequence[Fraction]) -> tuple[Fraction, ...]:
        return s.matrix.apply(z[:n]) + s.matrix.apply(z[n:])

    return AffineTS.from_affine_space(m, image(point), [image(d) for d in dirs]), s


# ---------------------------------------------------------------------------
# relational composition


def compose(f: TransitionFormula, g: TransitionFormula, eliminate: bool = True) -> TransitionFormula:
    """exists x''. f(x, x'') and g(x'', x')"""
    if f.vars != g.vars:
        raise ValueError("composition requires the same variables")
    avoid = set(f.stacked_vars) | f.body.free_vars() | g.body.free_vars()
    mids = []
    for v in f.vars:
        mid = fresh_var(f"_{v}_", avoid)
        avoid.add(mid)
        mids.append(mid)
    first = rename(f.body, {primed(v): m for v, m in zip(f.vars, mids)})
    second = rename(g.body, dict(zip(f.vars, mids)))
    body = exists_many(mids, conj(first, second))
    if eliminate:
        body = qe_cooper(body)
    return TransitionFormula(f.vars, body)


def equivalent_tf(f: TransitionFormula, g: TransitionFormula) -> bool:
    return entails(f.body, g.body) and entails(g.body, f.body)
