"""Mortal preconditions of transition formulas and the termination prover."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .abstractions import (
    AffineTS, FunctionalSpace, LinearSimulation, TransitionFormula, affine_hull, alpha,
    det_fixpoint,
)
from .asymptotics import PeriodicFormulaSeq, chi_formula, default_names
from .lia import (
    TRUE, Formula, LinTerm, conj, disj, eq, evaluate, exists_many, fresh_var, is_valid, neg,
    qe_cooper, substitute,
)
from .lia.simplify import simplify
from .qlinalg import QMatrix, lcm_denominators
from .reflection import (
    IntegerRestriction, OmegaRestriction, homogenize, integer_restriction, omega_domain,
    qdlts_reflection,
)


@dataclass(frozen=True)
class Stages:
    """Intermediate artifacts of one mp computation (None past a short-circuit)."""

    affine: AffineTS
    det: FunctionalSpace | None = None
    determinized: tuple[AffineTS, LinearSimulation] | None = None
    homogenized: tuple[AffineTS, LinearSimulation] | None = None
    reflection: tuple[AffineTS, LinearSimulation] | None = None
    simulation: LinearSimulation | None = None     # t: F -> T, integer entries
    omega: OmegaRestriction | None = None
    integer: IntegerRestriction | None = None
    w_names: tuple[str, ...] = ()
    guard: Formula | None = None                  # G(w), quantifier-free
    chi: PeriodicFormulaSeq | None = None
    domain: Formula | None = None                 # dom(F) = exists x'. F
    algorithm_mp: Formula | None = None           # not(and_i H_i(p t(x)) and C t(x) = 0)


@dataclass(frozen=True)
class MortalReport:
    vars: tuple[str, ...]
    mp: Formula
    stages: Stages
    proved_universal: bool


def _affine_terms(sim: LinearSimulation, names: Sequence[str]) -> list[LinTerm]:
    out = []
    for row, off in zip(sim.matrix.row_list(), sim.offset):
        out.append(LinTerm.from_vector([int(x) for x in row], names, int(off)))
    return out


def _combine(mat: QMatrix, terms: Sequence[LinTerm]) -> list[LinTerm]:
    out = []
    for row in mat.row_list():
        acc = LinTerm.constant(0)
        for coef, t in zip(row, terms):
            if coef:
                acc = acc + t * int(coef)
        out.append(acc)
    return out


def _zero_conj(terms: Sequence[LinTerm]) -> Formula:
    return conj(*(eq(t, LinTerm.constant(0)) for t in terms))


def domain_formula(f: TransitionFormula) -> Formula:
    """dom(F) = exists x'. F(x, x'), quantifier-free."""
    return simplify(qe_cooper(exists_many(f.primed_vars, f.body)))


def mp(f: TransitionFormula) -> MortalReport:
    """A quantifier-free sufficient condition for termination of the loop F."""
    f = f.quantifier_free()
    xs = f.vars
    dom = domain_formula(f)
    hull = affine_hull(f)
    if hull.empty:
        return MortalReport(xs, TRUE, Stages(hull, domain=dom, algorithm_mp=TRUE), True)

    lam = det_fixpoint(hull)
    det_sys, d = alpha(hull, lam)
    hom_sys, h = homogenize(det_sys)
    refl, s = qdlts_reflection(hom_sys)
    t = s.after(h).after(d)
    scale = lcm_denominators(t.matrix.entries + t.offset)
    t = t.scaled(scale)
    omega = omega_domain(refl)
    ir = integer_restriction(refl, omega)

    avoid = set(f.stacked_vars)
    w_names = []
    for _ in range(ir.dim):
        w = fresh_var("_w", avoid)
        avoid.add(w)
        w_names.append(w)
    w_names = tuple(w_names)

    tx = _affine_terms(t, xs)
    ptx = _combine(ir.p, tx)
    in_z = _zero_conj(_combine(ir.cmat, tx))
    link = conj(*(eq(LinTerm.var(w), pt) for w, pt in zip(w_names, ptx)))
    guard = simplify(qe_cooper(exists_many(f.stacked_vars, conj(f.body, link, in_z))))
    chi = chi_formula(guard, ir.m, w_names)
    pull = dict(zip(w_names, ptx))
    alg_mp = simplify(neg(conj(*(substitute(hk, pull) for hk in chi.formulas), in_z)))
    # states without a successor terminate at once; keeping them makes the
    # result cover the immediate exits as well
    result = simplify(disj(neg(dom), alg_mp))
    stages = Stages(hull, lam, (det_sys, d), (hom_sys, h), (refl, s), t, omega, ir,
                    w_names, guard, chi, dom, alg_mp)
    return MortalReport(xs, result, stages, is_valid(result))


def prove_termination(f: TransitionFormula) -> bool:
    return mp(f).proved_universal


def sat_infty_check(t: AffineTS, ir: IntegerRestriction, g: Formula, x0: Sequence, steps: int,
                    names: Sequence[str] | None = None) -> bool:
    """Bounded check that g holds along the orbit of x0 at every index in (steps/2, steps].

    x0 is an ambient state of t and must lie in Z(T); g is over the
    coordinates p(x) of Z(T), named by ``names``.
    """
    x0 = tuple(Fraction(v) for v in x0)
    if len(x0) != t.dim:
        raise ValueError("state has the wrong dimension")
    if any(ir.cmat.apply(x0)):
        raise ValueError("state is outside Z(T)")
    names = default_names(ir.dim) if names is None else tuple(names)
    w = ir.p.apply(x0)
    for k in range(steps + 1):
        if 2 * k > steps:
            if any(v.denominator != 1 for v in w):
                raise ValueError("orbit left the integer lattice")
            if not evaluate(g, {n: int(v) for n, v in zip(names, w)}):
                return False
        w = ir.m.apply(w)
    return True
