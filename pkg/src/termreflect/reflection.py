"""From deterministic affine systems to linear systems with rational spectrum."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .abstractions import AffineTS, FunctionalSpace, LinearSimulation, alpha, det_fixpoint
from .qlinalg import (
    QMatrix, Subspace, generalized_eigenspace, inverse, lcm_denominators, null_space,
    solve, spectrum,
)


def homogenize(v: AffineTS) -> tuple[AffineTS, LinearSimulation]:
    """[[a,0],[0,1]] x' = [[b,c],[0,1]] x, with the embedding x -> (x, 1)."""
    if v.empty:
        raise ValueError("cannot homogenize the empty relation")
    n = v.dim
    a_rows = [list(r) + [0] for r in v.a.row_list()] + [[0] * n + [1]]
    b_rows = [list(r) + [ci] for r, ci in zip(v.b.row_list(), v.c)] + [[0] * n + [1]]
    lin = AffineTS.from_matrices(QMatrix.from_rows(a_rows, n + 1), QMatrix.from_rows(b_rows, n + 1),
                                 [0] * len(a_rows))
    embed = LinearSimulation(QMatrix.identity(n).vstack(QMatrix.zeros(1, n)),
                             tuple([0] * n + [1]))
    return lin, embed


@dataclass(frozen=True)
class OmegaRestriction:
    """dom^omega(T) and the matrix of T restricted to it.

    ``dynamics`` uses basis coordinates: T(B u) = B (dynamics u), where the
    columns of B are the vectors of ``omega_basis``.
    """

    omega_basis: Subspace
    dynamics: QMatrix
    successor: QMatrix   # ambient successor map, exact on dom(T)
    domain: Subspace     # dom(T)
    rounds: int          # number of dom(T^k) iterations until stable

    def basis_matrix(self) -> QMatrix:
        return self.omega_basis.column_matrix()


def _require_linear_deterministic(t: AffineTS) -> None:
    if t.empty:
        raise ValueError("empty relation")
    if not t.is_linear():
        raise ValueError("expected a linear system (zero offset)")
    if not t.is_deterministic():
        raise ValueError("expected a deterministic system")


def omega_domain(t: AffineTS) -> OmegaRestriction:
    _require_linear_deterministic(t)
    n = t.dim
    if n == 0:
        z = Subspace.zero(0)
        return OmegaRestriction(z, QMatrix.zeros(0, 0), QMatrix.zeros(0, 0), z, 0)
    a, b = t.a, t.b
    # left inverse of a (full column rank): rows solving l a = e_i
    left = QMatrix.from_rows([solve(a.T, [int(i == j) for j in range(n)]) for i in range(n)], a.rows)
    succ = left @ b
    w = null_space(a.T)  # w^T a = 0
    if w.dim:
        dom = null_space(w.matrix() @ b)
    else:
        dom = Subspace.full(n)
    cur, rounds = dom, 1
    while True:
        c = cur.constraint_matrix()
        pre = null_space(c @ succ) if c.rows else Subspace.full(n)
        nxt = dom.intersect(pre)
        if nxt == cur:
            break
        cur, rounds = nxt, rounds + 1
    cols = [cur.coordinates(succ.apply(v)) for v in cur.basis]
    dyn = QMatrix.from_cols(cols, cur.dim) if cur.dim else QMatrix.zeros(0, 0)
    return OmegaRestriction(cur, dyn, succ, dom, rounds)


def rational_eigenspace(t: AffineTS, omega: OmegaRestriction) -> FunctionalSpace:
    """E_Q(T): lifted left generalized eigenvectors for rational eigenvalues plus the annihilator of dom^omega."""
    n = t.dim
    vectors = list(omega.omega_basis.annihilator().basis)
    dyn = omega.dynamics
    if dyn.rows:
        roots, _ = spectrum(dyn)
        bt = omega.basis_matrix().T  # (dim omega) x n
        for lam, _ in roots:
            for h in generalized_eigenspace(dyn, lam, "left").basis:
                lift = solve(bt, h)
                assert lift is not None
                vectors.append(lift)
    return Subspace.span(vectors, n)


def has_rational_spectrum(omega: OmegaRestriction) -> bool:
    return spectrum(omega.dynamics)[1]


def qdlts_reflection(t: AffineTS) -> tuple[AffineTS, LinearSimulation]:
    """Best abstraction of a deterministic linear system by one with rational spectrum."""
    _require_linear_deterministic(t)
    u, s = t, LinearSimulation.identity(t.dim)
    while True:
        omega = omega_domain(u)
        if has_rational_spectrum(omega):
            return u, s
        q_sys, q = alpha(u, rational_eigenspace(u, omega))
        u, d = alpha(q_sys, det_fixpoint(q_sys))
        s = d.after(q.after(s))


@dataclass(frozen=True)
class IntegerRestriction:
    """The integer-eigenvalue part Z(T) of dom^omega(T).

    ``p`` maps ambient states to coordinates on Z(T) (integer entries) and
    ``m`` is the dynamics in those coordinates; ``cmat`` cuts out Z(T).
    """

    z_basis: Subspace
    m: QMatrix
    p: QMatrix
    cmat: QMatrix

    @property
    def dim(self) -> int:
        return self.m.rows


def integer_restriction(t: AffineTS, omega: OmegaRestriction) -> IntegerRestriction:
    n = t.dim
    dyn = omega.dynamics
    roots, split = spectrum(dyn)
    if not split:
        raise ValueError("spectrum is not rational; run qdlts_reflection first")
    bmat = omega.basis_matrix()
    z_vecs: list = []
    other: list = []
    for lam, _ in roots:
        vs = [bmat.apply(v) for v in generalized_eigenspace(dyn, lam, "right").basis]
        (z_vecs if lam.denominator == 1 else other).extend(vs)
    z = Subspace.span(z_vecs, n)
    k = z.dim
    full = list(z.basis) + other + omega.omega_basis.complement_basis()
    if k:
        inv = inverse(QMatrix.from_cols(full, n))
        coords = QMatrix.from_rows(inv.row_list()[:k], n)
        scale = lcm_denominators(coords.entries)
        p = coords.scale(scale)
        cols = [z.coordinates(omega.successor.apply(v)) for v in z.basis]
        m = QMatrix.from_cols(cols, k)
    else:
        p = QMatrix.zeros(0, n)
        m = QMatrix.zeros(0, 0)
    return IntegerRestriction(z, m, p, z.constraint_matrix())


def successor_orbit(omega: OmegaRestriction, x: tuple, steps: int) -> list[tuple[Fraction, ...]]:
    """x, T(x), ..., T^steps(x) for x in dom^omega."""
    out = [tuple(Fraction(v) for v in x)]
    for _ in range(steps):
        out.append(omega.successor.apply(out[-1]))
    return out
