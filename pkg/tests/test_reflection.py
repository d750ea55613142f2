from __future__ import annotations

import random
from fractions import Fraction

import pytest

from termreflect.abstractions import AffineTS, LinearSimulation, det_fixpoint
from termreflect.qlinalg import (
    QMatrix, Subspace, char_poly, null_space, rank, rational_roots, solve, spectrum,
)
from termreflect.reflection import (
    has_rational_spectrum, homogenize, integer_restriction, omega_domain, qdlts_reflection,
    rational_eigenspace, successor_orbit,
)

from oracles import rand_matrix
from worked import HALVING_SYSTEM, MIXED_SPECTRUM, SHRINKING_DOMAIN


def _linear_system(rng: random.Random, n: int, extra: int) -> AffineTS:
    """x' = m x plus `extra` random domain constraints 0 = r x."""
    m = rand_matrix(rng, n, n, -2, 2)
    a = QMatrix.identity(n).vstack(QMatrix.zeros(extra, n))
    b = m.vstack(rand_matrix(rng, extra, n, -1, 1)) if extra else m
    return AffineTS.from_matrices(a, b, [0] * (n + extra))


def _dom_power(t: AffineTS, omega, k: int) -> Subspace:
    """dom(T^k) computed directly: states whose first k successors stay in dom(T)."""
    n = t.dim
    cons = []
    cmat = omega.domain.constraint_matrix()
    power = QMatrix.identity(n)
    for _ in range(k):
        cons.extend((cmat @ power).row_list())
        power = omega.successor @ power
    if not cons:
        return Subspace.full(n)
    return null_space(QMatrix.from_rows(cons, n))


# -- homogenization ------------------------------------------------------------------


def test_homogenize_block_form():
    t = AffineTS.from_matrices(QMatrix.identity(1), QMatrix.from_rows([[1]]), [-1])
    lin, h = homogenize(t)
    assert lin.is_linear() and lin.dim == 2
    assert lin.contains(h.apply([5]), h.apply([4]))
    assert not lin.contains(h.apply([5]), h.apply([5]))
    assert h.is_simulation(t, lin)


def test_homogenize_keeps_every_constraint():
    # a single point relation has more constraints than variables
    t = AffineTS.from_matrices(QMatrix.from_rows([[1], [0]]), QMatrix.from_rows([[0], [-1]]), [0, -1])
    lin, _ = homogenize(t)
    assert lin.is_deterministic()
    assert lin.num_constraints == 3


def test_homogenize_rejects_empty():
    with pytest.raises(ValueError):
        homogenize(AffineTS.empty_relation(2))


# -- omega domain ---------------------------------------------------------------------


def test_omega_domain_shrinking_example():
    om = omega_domain(SHRINKING_DOMAIN)
    assert om.omega_basis == Subspace.span([[1, 1, 0]], 3)
    assert om.dynamics == QMatrix.from_rows([[2]])
    assert om.domain == Subspace.span([[1, 1, 0], [0, 0, 1]], 3)
    assert om.rounds == 2


def test_omega_domain_of_total_system_is_everything():
    om = omega_domain(AffineTS.linear(QMatrix.from_rows([[0, 1], [-1, 0]])))
    assert om.omega_basis == Subspace.full(2)
    assert om.rounds == 1


def test_omega_domain_requires_deterministic_linear():
    with pytest.raises(ValueError):
        omega_domain(AffineTS.from_matrices(QMatrix.identity(1), QMatrix.identity(1), [1]))
    with pytest.raises(ValueError):
        omega_domain(AffineTS.from_matrices(QMatrix.zeros(1, 2), QMatrix.from_rows([[1, 0]]), [0]))


def test_omega_domain_invariance_random():
    rng = random.Random(53)
    for _ in range(80):
        n = rng.randint(1, 4)
        t = _linear_system(rng, n, rng.randint(0, 2))
        om = omega_domain(t)
        for v in om.omega_basis.basis:
            assert om.omega_basis.contains(om.successor.apply(v))
            assert om.domain.contains(v)
        k = om.rounds
        assert _dom_power(t, om, k) == om.omega_basis
        assert _dom_power(t, om, k + 1) == om.omega_basis
        # dynamics in basis coordinates agree with the ambient successor
        bm = om.basis_matrix()
        if om.omega_basis.dim:
            assert om.successor @ bm == bm @ om.dynamics


# -- rational eigenspace and reflection ---------------------------------------------


def test_rational_eigenspace_mixed_example():
    om = omega_domain(MIXED_SPECTRUM)
    assert om.omega_basis == Subspace.span([[1, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]], 4)
    assert spectrum(om.dynamics) == ([(Fraction(2), 1)], False)
    eq = rational_eigenspace(MIXED_SPECTRUM, om)
    assert eq == Subspace.span([[1, 1, 0, 0], [1, -1, 0, 0]], 4)


def test_reflection_mixed_example():
    refl, s = qdlts_reflection(MIXED_SPECTRUM)
    assert refl.dim == 2
    assert s.matrix.rows == 2
    assert Subspace.span(s.matrix.row_list(), 4) == Subspace.span([[1, 1, 0, 0], [1, -1, 0, 0]], 4)
    assert s.is_simulation(MIXED_SPECTRUM, refl)
    om = omega_domain(refl)
    roots, split = spectrum(om.dynamics)
    assert split and [r for r, _ in roots] == [2]


def test_reflection_of_rotation_collapses():
    refl, s = qdlts_reflection(AffineTS.linear(QMatrix.from_rows([[0, 1], [-1, 0]])))
    assert refl.dim == 0
    assert s.matrix.rows == 0


def test_reflection_properties_random():
    rng = random.Random(59)
    for _ in range(60):
        n = rng.randint(1, 4)
        t = _linear_system(rng, n, rng.randint(0, 1))
        refl, s = qdlts_reflection(t)
        assert s.is_simulation(t, refl)
        assert refl.is_deterministic()
        assert det_fixpoint(refl) == Subspace.full(refl.dim)
        assert has_rational_spectrum(omega_domain(refl))


def test_reflection_universal_property_spot_check():
    # T = rotation (x, y) plus a doubling coordinate w; U = doubling on one coordinate,
    # s = projection on w.  The factorization through the reflection is unique.
    m = QMatrix.from_rows([[0, 1, 0], [-1, 0, 0], [0, 0, 2]])
    t = AffineTS.linear(m)
    u = AffineTS.linear(QMatrix.from_rows([[2]]))
    s = LinearSimulation(QMatrix.from_rows([[0, 0, 1]]))
    assert s.is_simulation(t, u)
    refl, q = qdlts_reflection(t)
    # solve sbar q = s for sbar (row by row)
    rows = []
    for target in s.matrix.row_list():
        sol = solve(q.matrix.T, target)
        assert sol is not None
        rows.append(sol)
    sbar = LinearSimulation(QMatrix.from_rows(rows, q.matrix.rows))
    assert rank(q.matrix) == q.matrix.rows  # q surjective, so sbar is unique
    assert sbar.is_simulation(refl, u)


# -- integer restriction ------------------------------------------------------------


def test_integer_restriction_halving():
    om = omega_domain(HALVING_SYSTEM)
    assert om.omega_basis == Subspace.full(3)
    ir = integer_restriction(HALVING_SYSTEM, om)
    assert ir.z_basis == Subspace.span([[0, 1, 0], [0, 0, 1]], 3)
    assert ir.m == QMatrix.from_rows([[1, 1], [0, 1]])
    assert ir.cmat.row_list() == [(1, 0, 0)]


def test_integer_restriction_requires_rational_spectrum():
    t = AffineTS.linear(QMatrix.from_rows([[0, 1], [-1, 0]]))
    with pytest.raises(ValueError):
        integer_restriction(t, omega_domain(t))


def test_integer_restriction_properties_random():
    rng = random.Random(61)
    for _ in range(60):
        n = rng.randint(1, 4)
        t = _linear_system(rng, n, rng.randint(0, 1))
        refl, _ = qdlts_reflection(t)
        om = omega_domain(refl)
        ir = integer_restriction(refl, om)
        k = ir.dim
        assert ir.p.is_integral()
        if k:
            roots, split = rational_roots(char_poly(ir.m)[0])
            assert split and all(r.denominator == 1 for r, _ in roots)
            embed = ir.z_basis.column_matrix()
            assert rank(ir.p @ embed) == k
            # m is the dynamics in p-coordinates
            for v in ir.z_basis.basis:
                assert ir.z_basis.contains(om.successor.apply(v))
                assert ir.p.apply(om.successor.apply(v)) == ir.m.apply(ir.p.apply(v))
        # cmat cuts out exactly z_basis
        for v in ir.z_basis.basis:
            assert not any(ir.cmat.apply(v))
        assert ir.cmat.rows + k == refl.dim


def test_successor_orbit():
    om = omega_domain(SHRINKING_DOMAIN)
    orbit = successor_orbit(om, (1, 1, 0), 3)
    assert orbit[-1] == (8, 8, 0)
