"""Cooper quantifier elimination, satisfiability, models and entailment."""

from __future__ import annotations

import math
from functools import reduce
from typing import Mapping

from .formula import (
    FALSE, TRUE, And, Bool, Div, Exists, Forall, Formula, Leq, Not, Or,
    atoms, conj, disj, div, evaluate, leq, map_atoms, neg, nnf, substitute,
)
from .simplify import simplify
from .terms import LinTerm

# distribute an existential over a conjunction's disjunctions when the
# number of resulting branches stays below this
_DISTRIBUTE_LIMIT = 16


def _lcm(values) -> int:
    return reduce(math.lcm, values, 1)


def qe_cooper(f: Formula) -> Formula:
    """Equivalent quantifier-free formula (Cooper's method)."""
    if isinstance(f, Exists):
        return eliminate(f.var, qe_cooper(f.body))
    if isinstance(f, Forall):
        return neg(eliminate(f.var, neg(qe_cooper(f.body))))
    if isinstance(f, And):
        return conj(*(qe_cooper(a) for a in f.args))
    if isinstance(f, Or):
        return disj(*(qe_cooper(a) for a in f.args))
    if isinstance(f, Not):
        return neg(qe_cooper(f.arg))
    return nnf(f)


def eliminate(v: str, phi: Formula) -> Formula:
    """Quantifier-free equivalent of (exists v. phi) for quantifier-free NNF phi."""
    if v not in phi.free_vars():
        return phi
    if isinstance(phi, Or):
        return disj(*(eliminate(v, d) for d in phi.args))
    if isinstance(phi, And):
        inside = [a for a in phi.args if v in a.free_vars()]
        outside = [a for a in phi.args if v not in a.free_vars()]
        core = conj(*inside) if len(inside) != 1 else inside[0]
        return conj(*outside, _eliminate_conj(v, inside, core))
    return _cooper(v, phi)


def _find_equality(v: str, conjuncts: list[Formula]) -> LinTerm | None:
    """A term t with (t <= 0) and (-t <= 0) among the conjuncts, t mentioning v."""
    leqs = {a.term: a for a in conjuncts if isinstance(a, Leq)}
    best = None
    for t in leqs:
        if t.coeff(v) > 0 and -t in leqs:
            if best is None or abs(t.coeff(v)) < abs(best.coeff(v)):
                best = t
    return best


def _eliminate_conj(v: str, inside: list[Formula], core: Formula) -> Formula:
    t = _find_equality(v, inside)
    if t is not None:
        return _solve_equality(v, t, core)
    ors = [a for a in inside if isinstance(a, Or)]
    if ors:
        branches = reduce(lambda acc, o: acc * len(o.args), ors, 1)
        if branches <= _DISTRIBUTE_LIMIT:
            rest = [a for a in inside if not isinstance(a, Or)]
            first, later = ors[0], ors[1:]
            return disj(*(eliminate(v, conj(*rest, *later, d)) for d in first.args))
    return _cooper(v, core)


def _solve_equality(v: str, t: LinTerm, phi: Formula) -> Formula:
    """exists v. (t = 0 and phi) where t = a*v + s, a > 0."""
    a = t.coeff(v)
    s = t.without(v)
    if a == 1:
        return substitute(phi, {v: -s})

    # v = -s / a; scale each atom mentioning v by a before substituting
    def on_atom(atom: Formula) -> Formula:
        b = atom.term.coeff(v)
        if b == 0:
            return atom
        rest = atom.term.without(v)
        new = rest * a - s * b
        if isinstance(atom, Leq):
            return leq(new)
        return div(atom.modulus * a, new)

    return conj(div(a, s), map_atoms(phi, on_atom))


def _cooper(v: str, phi: Formula) -> Formula:
    coeffs = [abs(a.term.coeff(v)) for a in atoms(phi) if a.term.coeff(v)]
    delta = _lcm(coeffs)

    def normalize(atom: Formula) -> Formula:
        b = atom.term.coeff(v)
        if b == 0:
            return atom
        k = delta // abs(b)
        rest = atom.term.without(v) * k
        unit = LinTerm.var(v, 1 if b > 0 else -1)
        if isinstance(atom, Leq):
            return Leq(unit + rest)
        return Div(atom.modulus * k, unit + rest) if atom.modulus * k > 1 else TRUE

    body = map_atoms_raw(phi, normalize)
    if delta > 1:
        body = conj(body, Div(delta, LinTerm.var(v)))
    lower: list[LinTerm] = []  # b with b < v
    upper: list[LinTerm] = []  # a with v < a
    mods: list[int] = []
    for atom in atoms(body):
        c = atom.term.coeff(v)
        if c == 0:
            continue
        if isinstance(atom, Leq):
            rest = atom.term.without(v)
            if c > 0:   # v <= -rest
                upper.append(1 - rest)
            else:       # v >= rest
                lower.append(rest - 1)
        else:
            mods.append(atom.modulus)
    period = _lcm(mods)
    use_lower = len(lower) <= len(upper)
    bounds = list(dict.fromkeys(lower if use_lower else upper))

    def at_infinity(atom: Formula) -> Formula:
        c = atom.term.coeff(v)
        if c == 0 or not isinstance(atom, Leq):
            return atom
        # minus infinity: upper-bound atoms hold, lower-bound atoms fail
        return TRUE if (c > 0) == use_lower else FALSE

    inf_body = map_atoms_raw(body, at_infinity)
    out: list[Formula] = []
    for j in range(1, period + 1):
        shift = j if use_lower else -j
        out.append(substitute(inf_body, {v: LinTerm.constant(shift)}) if v in inf_body.free_vars() else inf_body)
        if out[-1] is TRUE:
            return TRUE
    for b in bounds:
        for j in range(1, period + 1):
            out.append(substitute(body, {v: b + (j if use_lower else -j)}))
            if out[-1] is TRUE:
                return TRUE
    return disj(*out)


def map_atoms_raw(f: Formula, fn) -> Formula:
    """Like map_atoms but keeps the And/Or skeleton without re-simplifying atoms."""
    memo: dict[int, Formula] = {}

    def go(g: Formula) -> Formula:
        r = memo.get(id(g))
        if r is not None:
            return r
        if isinstance(g, (Leq, Div)):
            r = fn(g)
        elif isinstance(g, Not):
            inner = go(g.arg)
            r = Not(inner) if isinstance(inner, Div) else neg(inner)
        elif isinstance(g, And):
            parts = [go(a) for a in g.args]
            r = conj(*parts) if any(isinstance(p, Bool) for p in parts) else And(parts)
        elif isinstance(g, Or):
            parts = [go(a) for a in g.args]
            r = disj(*parts) if any(isinstance(p, Bool) for p in parts) else Or(parts)
        else:
            r = g
        memo[id(g)] = r
        return r

    return go(f)


# ---------------------------------------------------------------------------
# satisfiability and models


def _pick_var(phi: Formula, candidates: frozenset[str]) -> str:
    conjuncts = list(phi.args) if isinstance(phi, And) else [phi]
    leqs = {a.term for a in conjuncts if isinstance(a, Leq)}
    best, best_key = None, None
    counts: dict[str, int] = {}
    for atom in atoms(phi):
        for u in atom.term.coeffs:
            counts[u] = counts.get(u, 0) + 1
    for u in sorted(candidates):
        has_eq = any(t.coeff(u) and -t in leqs for t in leqs)
        key = (0 if has_eq else 1, counts.get(u, 0), u)
        if best_key is None or key < best_key:
            best, best_key = u, key
    assert best is not None
    return best


def _one_var_witness(v: str, phi: Formula) -> int | None:
    """An integer value of v satisfying phi (phi has v as its only free variable)."""
    cuts: set[int] = set()
    mods: list[int] = []
    for atom in atoms(phi):
        a = atom.term.coeff(v)
        if not a:
            continue
        if isinstance(atom, Leq):
            cuts.add((-atom.term.const) // a)
        else:
            mods.append(atom.modulus)
    period = _lcm(mods)
    cands: set[int] = set(range(period))
    for p in cuts:
        cands.update(range(p - period - 1, p + period + 2))
    for val in sorted(cands, key=lambda x: (abs(x), x)):
        if evaluate(phi, {v: val}):
            return val
    return None


def _search(phi: Formula) -> dict[str, int] | None:
    """A model of the quantifier-free NNF formula phi, by case splitting.

    Disjunctions are split one at a time (with contextual simplification of
    each branch); conjunctions of literals are handled by eliminating one
    variable with Cooper's method and back-substituting a witness.
    """
    if phi is TRUE:
        return {}
    if phi is FALSE:
        return None
    if isinstance(phi, Or):
        for d in phi.args:
            found = _search(d)
            if found is not None:
                return found
        return None
    if isinstance(phi, And):
        ors = [a for a in phi.args if isinstance(a, Or)]
        if ors:
            split = min(ors, key=lambda o: len(o.args))
            rest = [a for a in phi.args if a is not split]
            for d in split.args:
                found = _search(simplify(conj(*rest, d)))
                if found is not None:
                    return found
            return None
    free = phi.free_vars()
    if not free:
        return {} if evaluate(phi, {}) else None
    v = _pick_var(phi, free)
    found = _search(eliminate(v, phi))
    if found is None:
        return None
    vals = dict(found)
    # variables that vanished with v are unconstrained
    for u in free:
        if u != v and u not in vals:
            vals[u] = 0
    w = _one_var_witness(v, substitute(phi, {u: vals[u] for u in free if u != v}))
    if w is None:
        raise AssertionError("model extraction failed; elimination inconsistent")
    vals[v] = w
    return vals


def model(f: Formula) -> dict[str, int] | None:
    """A satisfying integer valuation of the free variables of f, or None."""
    found = _search(simplify(qe_cooper(f)))
    if found is None:
        return None
    return {v: found.get(v, 0) for v in sorted(f.free_vars())}


def is_sat(f: Formula) -> bool:
    return _search(simplify(qe_cooper(f))) is not None


def is_valid(f: Formula) -> bool:
    return not is_sat(neg(f))


def entails(f: Formula, g: Formula) -> bool:
    """f |= g"""
    return not is_sat(conj(f, neg(g)))


def equivalent(f: Formula, g: Formula) -> bool:
    return entails(f, g) and entails(g, f)


def eval_quantified(f: Formula, valuation: Mapping[str, int]) -> bool:
    """Truth value of a possibly quantified formula (quantifiers are eliminated first)."""
    return evaluate(substitute(qe_cooper(f), dict(valuation)), {})
