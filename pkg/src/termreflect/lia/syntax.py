"""Concrete syntax for terms and formulas: tokenizer, parser and printer.

Formulas use ``&& || ! ->``, comparisons ``<= < >= > == !=``, divisibility
``k | t`` (integer literal k), ``exists x. F`` / ``forall x. F`` and primed
variables ``x'``.  Terms are linear: ``*`` needs a constant on one side.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .formula import (
    FALSE, TRUE, And, Bool, Div, Exists, Forall, Formula, Leq, Not, Or,
    conj, disj, div, exists, forall, ge, gt, implies, le, lt, ne, neg, eq,
)
from .terms import LinTerm


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Token:
    kind: str   # INT, ID, OP, EOF
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r\n]+)|(?P<comment>//[^\n]*)"
    r"|(?P<INT>\d+)"
    r"|(?P<ID>[A-Za-z_][A-Za-z0-9_]*'?)"
    r"|(?P<OP>&&|\|\||->|<=|>=|==|!=|[!<>=|+\-*(){};,.])"
)

KEYWORDS = frozenset({"exists", "forall", "true", "false"})


def tokenize(text: str) -> list[Token]:
    out: list[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind not in ("ws", "comment"):
            out.append(Token(kind, m.group(), line, pos - line_start + 1))
        chunk = m.group()
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    out.append(Token("EOF", "", line, pos - line_start + 1))
    return out


_CMP = {"<=": le, "<": lt, ">=": ge, ">": gt, "==": eq, "!=": ne}


class Parser:
    """Recursive-descent parser over a token list.

    ``declared`` (if given) restricts which variable names may appear free;
    primed names are checked against their unprimed base.
    """

    def __init__(self, text: str, declared: Iterable[str] | None = None):
        self.tokens = tokenize(text)
        self.i = 0
        self.declared = None if declared is None else frozenset(declared)
        self._bound: list[str] = []

    # token helpers ----------------------------------------------------
    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def error(self, message: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(message, tok.line, tok.col)

    def at(self, *texts: str) -> bool:
        return self.tok.kind == "OP" and self.tok.text in texts or (
            self.tok.kind == "ID" and self.tok.text in texts)

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        tok = self.tok
        self.i += 1
        return tok

    def ident(self, allow_prime: bool = True) -> Token:
        tok = self.tok
        if tok.kind != "ID" or tok.text in KEYWORDS:
            raise self.error(f"expected identifier, found {tok.text or 'end of input'!r}")
        if not allow_prime and tok.text.endswith("'"):
            raise self.error("primed name not allowed here")
        self.i += 1
        return tok

    def check_var(self, tok: Token) -> None:
        if self.declared is None or tok.text in self._bound:
            return
        base = tok.text.rstrip("'")
        if base not in self.declared:
            raise self.error(f"undeclared variable {base!r}", tok)

    def finish(self) -> None:
        if self.tok.kind != "EOF":
            raise self.error(f"unexpected {self.tok.text!r}")

    # formulas -----------------------------------------------------------
    def formula(self) -> Formula:
        if self.at("exists", "forall"):
            return self.quantified()
        lhs = self.disjunction()
        if self.accept("->"):
            return implies(lhs, self.formula())
        return lhs

    def quantified(self) -> Formula:
        kind = self.tok.text
        self.i += 1
        names = [self.ident(allow_prime=True).text]
        while self.accept(","):
            names.append(self.ident(allow_prime=True).text)
        self.expect(".")
        self._bound.extend(names)
        try:
            body = self.formula()
        finally:
            del self._bound[-len(names):]
        build = exists if kind == "exists" else forall
        for n in reversed(names):
            body = build(n, body)
        return body

    def disjunction(self) -> Formula:
        parts = [self.conjunction()]
        while self.accept("||"):
            parts.append(self.conjunction())
        return disj(*parts) if len(parts) > 1 else parts[0]

    def conjunction(self) -> Formula:
        parts = [self.unary()]
        while self.accept("&&"):
            parts.append(self.unary())
        return conj(*parts) if len(parts) > 1 else parts[0]

    def unary(self) -> Formula:
        if self.accept("!"):
            return neg(self.unary())
        if self.at("exists", "forall"):
            return self.quantified()
        return self.primary()

    def primary(self) -> Formula:
        if self.accept("true"):
            return TRUE
        if self.accept("false"):
            return FALSE
        if self.tok.kind == "INT" and self.tokens[self.i + 1].text == "|":
            k = int(self.tok.text)
            if k == 0:
                raise self.error("divisibility modulus must be positive")
            self.i += 2
            return div(k, self.term())
        if self.at("("):
            start = self.i
            try:
                return self.comparison()
            except ParseError as term_err:
                self.i = start
                self.expect("(")
                try:
                    f = self.formula()
                    self.expect(")")
                except ParseError as formula_err:
                    raise max(term_err, formula_err, key=lambda e: (e.line, e.col))
                return f
        return self.comparison()

    def comparison(self) -> Formula:
        lhs = self.term()
        tok = self.tok
        if tok.kind == "OP" and tok.text in _CMP:
            self.i += 1
            rhs = self.term()
            return _CMP[tok.text](lhs, rhs)
        raise self.error(f"expected comparison operator, found {tok.text or 'end of input'!r}")

    # terms ------------------------------------------------------------------
    def term(self) -> LinTerm:
        t = self.product()
        while self.at("+", "-"):
            op = self.tok.text
            self.i += 1
            u = self.product()
            t = t + u if op == "+" else t - u
        return t

    def product(self) -> LinTerm:
        start = self.tok
        t = self.signed()
        while self.accept("*"):
            u = self.signed()
            if t.is_constant():
                t = u * t.const
            elif u.is_constant():
                t = t * u.const
            else:
                raise self.error("nonlinear expression", start)
        return t

    def signed(self) -> LinTerm:
        if self.accept("-"):
            return -self.signed()
        return self.atom_term()

    def atom_term(self) -> LinTerm:
        tok = self.tok
        if tok.kind == "INT":
            self.i += 1
            return LinTerm.constant(int(tok.text))
        if tok.kind == "ID" and tok.text not in KEYWORDS:
            self.i += 1
            self.check_var(tok)
            return LinTerm.var(tok.text)
        if self.accept("("):
            t = self.term()
            self.expect(")")
            return t
        raise self.error(f"expected term, found {tok.text or 'end of input'!r}")


def parse_formula(text: str, declared: Iterable[str] | None = None) -> Formula:
    p = Parser(text, declared)
    f = p.formula()
    p.finish()
    return f


def parse_term(text: str, declared: Iterable[str] | None = None) -> LinTerm:
    p = Parser(text, declared)
    t = p.term()
    p.finish()
    return t


# ---------------------------------------------------------------------------
# printing


def _var_order(v: str) -> tuple:
    return (v.startswith("_"), v.rstrip("'"), v.endswith("'"), v)


def _format_linear(coeffs: Sequence[tuple[str, int]]) -> str:
    parts: list[str] = []
    for v, c in coeffs:
        mag = abs(c)
        body = v if mag == 1 else f"{mag}*{v}"
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(("+ " if c > 0 else "- ") + body)
    return " ".join(parts)


def format_term(t: LinTerm) -> str:
    items = sorted(t.coeffs.items(), key=lambda kv: _var_order(kv[0]))
    if not items:
        return str(t.const)
    s = _format_linear(items)
    if t.const > 0:
        s += f" + {t.const}"
    elif t.const < 0:
        s += f" - {-t.const}"
    return s


def _format_rel(t: LinTerm, op: str) -> str:
    """Render ``t op 0`` with the constant moved to the right-hand side."""
    items = sorted(t.coeffs.items(), key=lambda kv: _var_order(kv[0]))
    if op == "<=" and items and items[0][1] < 0:
        return f"{_format_linear([(v, -c) for v, c in items])} >= {t.const}"
    return f"{_format_linear(items)} {op} {-t.const}"


def _format_atom(f: Formula) -> str:
    if isinstance(f, Leq):
        return _format_rel(f.term, "<=")
    if isinstance(f, Div):
        return f"{f.modulus} | {format_term(f.term)}"
    if isinstance(f, Not) and isinstance(f.arg, Div):
        return f"!({_format_atom(f.arg)})"
    raise TypeError(f"not an atom: {f!r}")


def _conjuncts_text(args: Sequence[Formula], wrap: Callable[[Formula], str]) -> list[str]:
    leqs = {a.term: a for a in args if isinstance(a, Leq)}
    used: set[LinTerm] = set()
    out: list[str] = []
    for a in args:
        if isinstance(a, Leq):
            if a.term in used:
                continue
            other = -a.term
            if other in leqs and other not in used:
                used.update((a.term, other))
                t = a.term
                items = sorted(t.coeffs.items(), key=lambda kv: _var_order(kv[0]))
                if items[0][1] < 0:
                    t = other
                out.append(_format_rel(t, "=="))
                continue
        out.append(wrap(a))
    return out


def format_formula(f: Formula) -> str:
    return _fmt(f, 0)


# precedence: 0 quantifier/top, 1 or, 2 and, 3 unary/atom
def _fmt(f: Formula, ctx: int) -> str:
    if isinstance(f, Bool):
        return "true" if f.value else "false"
    if isinstance(f, (Leq, Div)) or (isinstance(f, Not) and isinstance(f.arg, Div)):
        return _format_atom(f)
    if isinstance(f, Not):
        return f"!({_fmt(f.arg, 0)})"
    if isinstance(f, And):
        parts = _conjuncts_text(f.args, lambda a: _fmt(a, 2))
        s = " && ".join(parts)
        return f"({s})" if ctx > 2 and len(parts) > 1 else s
    if isinstance(f, Or):
        s = " || ".join(_fmt(a, 3) for a in f.args)
        return f"({s})" if ctx > 1 else s
    if isinstance(f, (Exists, Forall)):
        kw = "exists" if isinstance(f, Exists) else "forall"
        s = f"{kw} {f.var}. {_fmt(f.body, 0)}"
        return f"({s})" if ctx > 0 else s
    raise TypeError(f"not a formula: {f!r}")
