"""Linear integer terms: sum of coefficient * variable plus a constant."""

from __future__ import annotations

import math
from functools import reduce
from typing import Iterable, Mapping


class LinTerm:
    """An integer linear term.  Immutable; zero coefficients are never stored."""

    __slots__ = ("coeffs", "const", "_hash")

    def __init__(self, coeffs: Mapping[str, int] | None = None, const: int = 0):
        self.coeffs: dict[str, int] = {v: int(c) for v, c in (coeffs or {}).items() if c}
        self.const: int = int(const)
        self._hash: int | None = None

    @classmethod
    def var(cls, name: str, coeff: int = 1) -> LinTerm:
        return cls({name: coeff})

    @classmethod
    def constant(cls, c: int) -> LinTerm:
        return cls({}, c)

    @classmethod
    def from_vector(cls, coeffs: Iterable[int], names: Iterable[str], const: int = 0) -> LinTerm:
        out: dict[str, int] = {}
        for c, n in zip(coeffs, names):
            if c:
                if int(c) != c:
                    raise ValueError("term coefficients must be integers")
                out[n] = out.get(n, 0) + int(c)
        return cls(out, const)

    def key(self) -> tuple:
        return (tuple(sorted(self.coeffs.items())), self.const)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, LinTerm) and self.const == other.const and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.key())
        return self._hash

    def __repr__(self) -> str:
        return f"LinTerm({self.coeffs!r}, {self.const})"

    def __str__(self) -> str:
        from .syntax import format_term
        return format_term(self)

    # algebra ----------------------------------------------------------
    def __add__(self, other: LinTerm | int) -> LinTerm:
        if isinstance(other, int):
            return LinTerm(self.coeffs, self.const + other)
        out = dict(self.coeffs)
        for v, c in other.coeffs.items():
            out[v] = out.get(v, 0) + c
        return LinTerm(out, self.const + other.const)

    __radd__ = __add__

    def __neg__(self) -> LinTerm:
        return LinTerm({v: -c for v, c in self.coeffs.items()}, -self.const)

    def __sub__(self, other: LinTerm | int) -> LinTerm:
        return self + (-other)

    def __rsub__(self, other: int) -> LinTerm:
        return (-self) + other

    def __mul__(self, k: int) -> LinTerm:
        return LinTerm({v: c * k for v, c in self.coeffs.items()}, self.const * k)

    __rmul__ = __mul__

    def coeff(self, v: str) -> int:
        return self.coeffs.get(v, 0)

    def vars(self) -> frozenset[str]:
        return frozenset(self.coeffs)

    def is_constant(self) -> bool:
        return not self.coeffs

    def without(self, v: str) -> LinTerm:
        return LinTerm({u: c for u, c in self.coeffs.items() if u != v}, self.const)

    def content(self) -> int:
        """gcd of the variable coefficients (0 for a constant term)."""
        return reduce(math.gcd, self.coeffs.values(), 0)

    def evaluate(self, valuation: Mapping[str, int]) -> int:
        try:
            return self.const + sum(c * valuation[v] for v, c in self.coeffs.items())
        except KeyError as exc:
            raise KeyError(f"unbound variable {exc.args[0]!r}") from None

    def substitute(self, sigma: Mapping[str, LinTerm | int]) -> LinTerm:
        if not any(v in sigma for v in self.coeffs):
            return self
        out: dict[str, int] = {}
        const = self.const
        for v, c in self.coeffs.items():
            if v in sigma:
                t = sigma[v]
                if isinstance(t, int):
                    const += c * t
                    continue
                for u, d in t.coeffs.items():
                    out[u] = out.get(u, 0) + c * d
                const += c * t.const
            else:
                out[v] = out.get(v, 0) + c
        return LinTerm(out, const)

    def rename(self, mapping: Mapping[str, str]) -> LinTerm:
        out: dict[str, int] = {}
        for v, c in self.coeffs.items():
            w = mapping.get(v, v)
            out[w] = out.get(w, 0) + c
        return LinTerm(out, self.const)
