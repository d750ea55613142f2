"""LIA formulas.

The only atoms are ``t <= 0`` (:class:`Leq`) and ``m | t`` (:class:`Div`).
Build formulas through the lower-case constructors (:func:`leq`,
:func:`conj`, :func:`neg`, ...): they normalize atoms, fold constants and
keep every formula in negation normal form, with :class:`Not` only ever
wrapping a divisibility atom.
"""

from __future__ import annotations

import itertools
import math
from functools import reduce
from typing import Callable, Iterable, Mapping

from .terms import LinTerm

_fresh_counter = itertools.count()


def fresh_var(prefix: str = "_v", avoid: Iterable[str] = ()) -> str:
    avoid = set(avoid)
    while True:
        name = f"{prefix}{next(_fresh_counter)}"
        if name not in avoid:
            return name


class Formula:
    __slots__ = ("_hash", "_fv")

    def __init__(self) -> None:
        self._hash = None
        self._fv = None

    def _key(self) -> tuple:
        raise NotImplementedError

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        return type(self) is type(other) and hash(self) == hash(other) and self._key() == other._key()

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((type(self).__name__, self._key()))
        return self._hash

    def free_vars(self) -> frozenset[str]:
        if self._fv is None:
            self._fv = self._compute_fv()
        return self._fv

    def _compute_fv(self) -> frozenset[str]:
        raise NotImplementedError

    def __str__(self) -> str:
        from .syntax import format_formula
        return format_formula(self)

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self}>"

    # operator sugar
    def __and__(self, other: Formula) -> Formula:
        return conj(self, other)

    def __or__(self, other: Formula) -> Formula:
        return disj(self, other)

    def __invert__(self) -> Formula:
        return neg(self)


class Bool(Formula):
    __slots__ = ("value",)

    def __init__(self, value: bool):
        super().__init__()
        self.value = bool(value)

    def _key(self):
        return (self.value,)

    def _compute_fv(self):
        return frozenset()


TRUE = Bool(True)
FALSE = Bool(False)


class Leq(Formula):
    """term <= 0"""

    __slots__ = ("term",)

    def __init__(self, term: LinTerm):
        super().__init__()
        self.term = term

    def _key(self):
        return self.term.key()

    def _compute_fv(self):
        return self.term.vars()


class Div(Formula):
    """modulus | term"""

    __slots__ = ("modulus", "term")

    def __init__(self, modulus: int, term: LinTerm):
        super().__init__()
        if modulus < 1:
            raise ValueError("divisibility modulus must be positive")
        self.modulus = modulus
        self.term = term

    def _key(self):
        return (self.modulus, self.term.key())

    def _compute_fv(self):
        return self.term.vars()


class Not(Formula):
    __slots__ = ("arg",)

    def __init__(self, arg: Formula):
        super().__init__()
        self.arg = arg

    def _key(self):
        return (self.arg,)

    def _compute_fv(self):
        return self.arg.free_vars()


class _NAry(Formula):
    __slots__ = ("args",)

    def __init__(self, args: Iterable[Formula]):
        super().__init__()
        self.args = tuple(args)

    def _key(self):
        return self.args

    def _compute_fv(self):
        return frozenset().union(*(a.free_vars() for a in self.args))


class And(_NAry):
    __slots__ = ()


class Or(_NAry):
    __slots__ = ()


class _Quant(Formula):
    __slots__ = ("var", "body")

    def __init__(self, var: str, body: Formula):
        super().__init__()
        self.var = var
        self.body = body

    def _key(self):
        return (self.var, self.body)

    def _compute_fv(self):
        return self.body.free_vars() - {self.var}


class Exists(_Quant):
    __slots__ = ()


class Forall(_Quant):
    __slots__ = ()


def is_atom(f: Formula) -> bool:
    return isinstance(f, (Leq, Div)) or (isinstance(f, Not) and isinstance(f.arg, Div))


def is_quantifier_free(f: Formula) -> bool:
    if isinstance(f, _Quant):
        return False
    if isinstance(f, _NAry):
        return all(is_quantifier_free(a) for a in f.args)
    if isinstance(f, Not):
        return is_quantifier_free(f.arg)
    return True


# ---------------------------------------------------------------------------
# smart constructors


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def leq(term: LinTerm) -> Formula:
    """term <= 0, normalized by the gcd of the variable coefficients."""
    if term.is_constant():
        return TRUE if term.const <= 0 else FALSE
    g = term.content()
    if g > 1:
        term = LinTerm({v: c // g for v, c in term.coeffs.items()}, _ceil_div(term.const, g))
    return Leq(term)


def div(modulus: int, term: LinTerm) -> Formula:
    m = abs(int(modulus))
    if m == 0:
        raise ValueError("divisibility modulus must be nonzero")
    if m == 1:
        return TRUE
    coeffs = {v: c % m for v, c in term.coeffs.items() if c % m}
    const = term.const % m
    if not coeffs:
        return TRUE if const == 0 else FALSE
    g = reduce(math.gcd, coeffs.values(), m)
    if const % g:
        return FALSE
    if g > 1:
        m //= g
        if m == 1:
            return TRUE
        coeffs = {v: c // g for v, c in coeffs.items()}
        const //= g
    return Div(m, LinTerm(coeffs, const))


def le(a: LinTerm, b: LinTerm) -> Formula:
    return leq(a - b)


def ge(a: LinTerm, b: LinTerm) -> Formula:
    return leq(b - a)


def lt(a: LinTerm, b: LinTerm) -> Formula:
    return leq(a - b + 1)


def gt(a: LinTerm, b: LinTerm) -> Formula:
    return leq(b - a + 1)


def eq(a: LinTerm, b: LinTerm) -> Formula:
    return conj(leq(a - b), leq(b - a))


def ne(a: LinTerm, b: LinTerm) -> Formula:
    return disj(lt(a, b), gt(a, b))


def _split_leq(t: LinTerm) -> tuple[tuple, int, int]:
    """Return (canonical var-part key, sign, const) for t = sign*s + const with s canonical."""
    items = tuple(sorted(t.coeffs.items()))
    if items[0][1] < 0:
        return tuple((v, -c) for v, c in items), -1, t.const
    return items, 1, t.const


def _flatten(kind: type, fs: Iterable[Formula]) -> Iterable[Formula]:
    for f in fs:
        if type(f) is kind:
            yield from f.args
        else:
            yield f


def conj(*fs: Formula) -> Formula:
    return _combine(And, fs)


def disj(*fs: Formula) -> Formula:
    return _combine(Or, fs)


def _combine(kind: type, fs: Iterable[Formula]) -> Formula:
    is_and = kind is And
    unit, zero = (TRUE, FALSE) if is_and else (FALSE, TRUE)
    bounds: dict[tuple, list] = {}  # key -> [lower, upper] bound on the canonical var part
    others: dict[Formula, None] = {}
    for f in _flatten(kind, fs):
        if isinstance(f, Bool):
            if f.value != unit.value:
                return zero
            continue
        if isinstance(f, Leq):
            key, sign, const = _split_leq(f.term)
            b = bounds.setdefault(key, [None, None])
            if sign > 0:   # s <= -const
                val, idx = -const, 1
            else:          # s >= const
                val, idx = const, 0
            cur = b[idx]
            if cur is None:
                b[idx] = val
            elif is_and:
                b[idx] = min(cur, val) if idx == 1 else max(cur, val)
            else:
                b[idx] = max(cur, val) if idx == 1 else min(cur, val)
            continue
        others[f] = None
    out: list[Formula] = []
    for key, (lo, hi) in bounds.items():
        if lo is not None and hi is not None:
            if is_and and lo > hi:
                return FALSE
            if not is_and and lo <= hi + 1:
                return TRUE
        s = LinTerm(dict(key))
        if lo is not None:
            out.append(Leq(lo - s))
        if hi is not None:
            out.append(Leq(s - hi))
    for f in others:
        if isinstance(f, Not) and f.arg in others:
            return zero
        out.append(f)
    if not out:
        return unit
    if len(out) == 1:
        return out[0]
    return kind(out)


def neg(f: Formula) -> Formula:
    if isinstance(f, Bool):
        return FALSE if f.value else TRUE
    if isinstance(f, Leq):
        return leq(1 - f.term)
    if isinstance(f, Div):
        return Not(f)
    if isinstance(f, Not):
        return f.arg if isinstance(f.arg, Div) else nnf(f.arg)
    if isinstance(f, And):
        return disj(*(neg(a) for a in f.args))
    if isinstance(f, Or):
        return conj(*(neg(a) for a in f.args))
    if isinstance(f, Exists):
        return Forall(f.var, neg(f.body))
    if isinstance(f, Forall):
        return Exists(f.var, neg(f.body))
    raise TypeError(f"not a formula: {f!r}")


def implies(a: Formula, b: Formula) -> Formula:
    return disj(neg(a), b)


def iff(a: Formula, b: Formula) -> Formula:
    return conj(implies(a, b), implies(b, a))


def exists(var: str, body: Formula) -> Formula:
    if var not in body.free_vars():
        return body
    return Exists(var, body)


def forall(var: str, body: Formula) -> Formula:
    if var not in body.free_vars():
        return body
    return Forall(var, body)


def exists_many(vars: Iterable[str], body: Formula) -> Formula:
    for v in reversed(list(vars)):
        body = exists(v, body)
    return body


def nnf(f: Formula) -> Formula:
    """Rebuild through the smart constructors (negation normal form)."""
    if isinstance(f, Not):
        return neg(nnf(f.arg))
    if isinstance(f, And):
        return conj(*(nnf(a) for a in f.args))
    if isinstance(f, Or):
        return disj(*(nnf(a) for a in f.args))
    if isinstance(f, Exists):
        return exists(f.var, nnf(f.body))
    if isinstance(f, Forall):
        return forall(f.var, nnf(f.body))
    if isinstance(f, Leq):
        return leq(f.term)
    if isinstance(f, Div):
        return div(f.modulus, f.term)
    return f


# ---------------------------------------------------------------------------
# traversal


def map_atoms(f: Formula, fn: Callable[[Formula], Formula]) -> Formula:
    """Rebuild a quantifier-free formula with every atom replaced by fn(atom)."""
    memo: dict[int, Formula] = {}

    def go(g: Formula) -> Formula:
        r = memo.get(id(g))
        if r is not None:
            return r
        if isinstance(g, (Leq, Div)):
            r = fn(g)
        elif isinstance(g, Not):
            r = neg(go(g.arg))
        elif isinstance(g, And):
            r = conj(*(go(a) for a in g.args))
        elif isinstance(g, Or):
            r = disj(*(go(a) for a in g.args))
        elif isinstance(g, Bool):
            r = g
        else:
            raise ValueError("map_atoms requires a quantifier-free formula")
        memo[id(g)] = r
        return r

    return go(f)


def atoms(f: Formula) -> list[Formula]:
    """Leq and Div atoms (Div atoms under negation included unwrapped), deduplicated."""
    seen: dict[Formula, None] = {}
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, (Leq, Div)):
            seen[g] = None
        elif isinstance(g, Not):
            stack.append(g.arg)
        elif isinstance(g, _NAry):
            stack.extend(g.args)
        elif isinstance(g, _Quant):
            stack.append(g.body)
    return list(seen)


def size(f: Formula) -> int:
    if isinstance(f, _NAry):
        return 1 + sum(size(a) for a in f.args)
    if isinstance(f, Not):
        return 1 + size(f.arg)
    if isinstance(f, _Quant):
        return 1 + size(f.body)
    return 1


def substitute(f: Formula, sigma: Mapping[str, LinTerm | int]) -> Formula:
    """Capture-avoiding substitution of terms for free variables."""
    sigma = {v: t for v, t in sigma.items() if v in f.free_vars()}
    if not sigma:
        return f
    if is_quantifier_free(f):
        def on_atom(a: Formula) -> Formula:
            t = a.term.substitute(sigma)
            return leq(t) if isinstance(a, Leq) else div(a.modulus, t)
        return map_atoms(f, on_atom)
    return _subst_quant(f, sigma)


def _subst_quant(f: Formula, sigma: Mapping[str, LinTerm | int]) -> Formula:
    if isinstance(f, (Leq, Div, Bool)) or (isinstance(f, Not) and isinstance(f.arg, Div)):
        return substitute(f, sigma)
    if isinstance(f, Not):
        return neg(_subst_quant(f.arg, sigma))
    if isinstance(f, And):
        return conj(*(_subst_quant(a, sigma) for a in f.args))
    if isinstance(f, Or):
        return disj(*(_subst_quant(a, sigma) for a in f.args))
    if isinstance(f, _Quant):
        inner = {v: t for v, t in sigma.items() if v != f.var}
        var, body = f.var, f.body
        incoming = set()
        for t in inner.values():
            if isinstance(t, LinTerm):
                incoming |= t.vars()
        if var in incoming:
            new = fresh_var(var.rstrip("'") + "_", incoming | body.free_vars())
            body = rename(body, {var: new})
            var = new
        body = _subst_quant(body, inner) if inner else body
        return exists(var, body) if isinstance(f, Exists) else forall(var, body)
    raise TypeError(f"not a formula: {f!r}")


def rename(f: Formula, mapping: Mapping[str, str]) -> Formula:
    return substitute(f, {v: LinTerm.var(w) for v, w in mapping.items()})


def evaluate(f: Formula, valuation: Mapping[str, int]) -> bool:
    """Truth value of a quantifier-free formula under an integer valuation."""
    if isinstance(f, Bool):
        return f.value
    if isinstance(f, Leq):
        return f.term.evaluate(valuation) <= 0
    if isinstance(f, Div):
        return f.term.evaluate(valuation) % f.modulus == 0
    if isinstance(f, Not):
        return not evaluate(f.arg, valuation)
    if isinstance(f, And):
        return all(evaluate(a, valuation) for a in f.args)
    if isinstance(f, Or):
        return any(evaluate(a, valuation) for a in f.args)
    if isinstance(f, _Quant):
        raise ValueError("quantified formula; run QE first")
    raise TypeError(f"not a formula: {f!r}")
