"""Contextual simplification of quantifier-free formulas.

Atoms are decided against the bounds implied by their siblings: inside a
conjunction the other conjuncts hold, inside a disjunction the other
disjuncts fail.  Common conjuncts of disjuncts are factored out.  The result
is equivalent to the input; nothing canonical is promised.
"""

from __future__ import annotations

from .formula import (
    FALSE, TRUE, And, Bool, Div, Formula, Leq, Not, Or, _split_leq, conj, disj, neg,
)

# context: canonical var-part key -> (lo, hi) bounds; plus known Div facts
_Ctx = tuple[dict, dict]


def _leq_bound(f: Leq) -> tuple[tuple, int, int]:
    """(key, index, value): index 1 is an upper bound s <= value, 0 a lower bound s >= value."""
    key, sign, const = _split_leq(f.term)
    return (key, 1, -const) if sign > 0 else (key, 0, const)


def _with(ctx: _Ctx, facts: list[Formula]) -> _Ctx:
    bounds, divs = dict(ctx[0]), dict(ctx[1])
    for f in facts:
        if isinstance(f, Leq):
            key, idx, val = _leq_bound(f)
            lo, hi = bounds.get(key, (None, None))
            if idx == 1:
                hi = val if hi is None else min(hi, val)
            else:
                lo = val if lo is None else max(lo, val)
            bounds[key] = (lo, hi)
        elif isinstance(f, Div):
            divs[f] = True
        elif isinstance(f, Not) and isinstance(f.arg, Div):
            divs[f.arg] = False
    return bounds, divs


def _decide(f: Formula, ctx: _Ctx) -> Formula:
    if isinstance(f, Leq):
        key, idx, val = _leq_bound(f)
        lo, hi = ctx[0].get(key, (None, None))
        if idx == 1:
            if hi is not None and hi <= val:
                return TRUE
            if lo is not None and lo > val:
                return FALSE
        else:
            if lo is not None and lo >= val:
                return TRUE
            if hi is not None and hi < val:
                return FALSE
        return f
    if isinstance(f, Div):
        known = ctx[1].get(f)
        return f if known is None else (TRUE if known else FALSE)
    if isinstance(f, Not) and isinstance(f.arg, Div):
        known = ctx[1].get(f.arg)
        return f if known is None else (FALSE if known else TRUE)
    return f


def _is_literal(f: Formula) -> bool:
    return isinstance(f, (Leq, Div)) or (isinstance(f, Not) and isinstance(f.arg, Div))


def _factor(parts: list[Formula]) -> Formula:
    """Or of parts, pulling conjuncts shared by every disjunct out front."""
    sets = [set(p.args) if isinstance(p, And) else {p} for p in parts]
    common = set.intersection(*sets) if sets else set()
    if not common or len(parts) < 2:
        return disj(*parts)
    rest = []
    for p in parts:
        args = p.args if isinstance(p, And) else (p,)
        rest.append(conj(*(a for a in args if a not in common)))
    ordered = [a for a in (parts[0].args if isinstance(parts[0], And) else (parts[0],)) if a in common]
    return conj(*ordered, disj(*rest))


def _simp(f: Formula, ctx: _Ctx) -> Formula:
    if isinstance(f, Bool):
        return f
    if _is_literal(f):
        return _decide(f, ctx)
    if isinstance(f, And):
        lits = [_decide(a, ctx) for a in f.args if _is_literal(a)]
        if any(l is FALSE for l in lits):
            return FALSE
        lits = [l for l in lits if l is not TRUE]
        inner = _with(ctx, lits)
        others = [_simp(a, inner) for a in f.args if not _is_literal(a)]
        return conj(*lits, *others)
    if isinstance(f, Or):
        lits = [_decide(a, ctx) for a in f.args if _is_literal(a)]
        if any(l is TRUE for l in lits):
            return TRUE
        lits = [l for l in lits if l is not FALSE]
        inner = _with(ctx, [neg(l) for l in lits])
        others = [_simp(a, inner) for a in f.args if not _is_literal(a)]
        return _factor(lits + others)
    if isinstance(f, Not):
        return neg(_simp(f.arg, ctx))
    raise ValueError("simplify requires a quantifier-free formula")


def simplify(f: Formula, rounds: int = 3) -> Formula:
    """Equivalent, usually smaller, quantifier-free formula."""
    for _ in range(rounds):
        g = _simp(f, ({}, {}))
        if g == f:
            return g
        f = g
    return f
