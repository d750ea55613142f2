"""Input programs: raw transition formulas and structured single loops.

    vars x, y;
    formula x >= 0 && x' == x - 1;

    vars x, y;
    loop {
      assume(x >= 0);
      x = x - y;
      if (y > 0) { y = y - 1; } else { y = *; }
    }
"""

from __future__ import annotations

from dataclasses import dataclass

from .abstractions import TransitionFormula, compose, primed
from .lia import (
    Formula, LinTerm, conj, disj, eq, neg, qe_cooper, TRUE,
)
from .lia.syntax import ParseError, Parser, Token

RESERVED = frozenset({"vars", "formula", "loop", "assume", "if", "else", "exists", "forall",
                      "true", "false"})


@dataclass(frozen=True)
class InputProgram:
    vars: tuple[str, ...]
    kind: str                       # "formula" or "loop"
    transition: TransitionFormula


class _ProgramParser(Parser):
    def __init__(self, text: str):
        super().__init__(text)
        self.names: tuple[str, ...] = ()

    def header(self) -> None:
        self.expect("vars")
        names = [self._decl()]
        while self.accept(","):
            names.append(self._decl())
        self.expect(";")
        self.names = tuple(names)
        self.declared = frozenset(names)

    def _decl(self) -> str:
        tok = self.ident(allow_prime=False)
        if tok.text in RESERVED:
            raise self.error(f"reserved word {tok.text!r} cannot be a variable", tok)
        if tok.text in (self.declared or ()):
            raise self.error(f"duplicate variable {tok.text!r}", tok)
        self.declared = (self.declared or frozenset()) | {tok.text}
        return tok.text

    def unprimed_formula(self) -> Formula:
        start = self.tok
        f = self.formula()
        bad = sorted(v for v in f.free_vars() if v.endswith("'"))
        if bad:
            raise self.error(f"primed variable {bad[0]!r} not allowed here", start)
        return f

    # statements -------------------------------------------------------
    def identity(self) -> TransitionFormula:
        return TransitionFormula.identity(self.names)

    def frame(self, changed: dict[str, LinTerm | None]) -> TransitionFormula:
        parts = []
        for v in self.names:
            if v in changed:
                rhs = changed[v]
                if rhs is not None:
                    parts.append(eq(LinTerm.var(primed(v)), rhs))
            else:
                parts.append(eq(LinTerm.var(primed(v)), LinTerm.var(v)))
        return TransitionFormula(self.names, conj(*parts) if parts else TRUE)

    def block(self) -> TransitionFormula:
        self.expect("{")
        tf = self.statements()
        self.expect("}")
        return tf

    def statements(self) -> TransitionFormula:
        acc: TransitionFormula | None = None
        while not self.at("}") and self.tok.kind != "EOF":
            stmt = self.statement()
            acc = stmt if acc is None else compose(acc, stmt, eliminate=True)
        return acc if acc is not None else self.identity()

    def statement(self) -> TransitionFormula:
        if self.accept("assume"):
            self.expect("(")
            f = self.unprimed_formula()
            self.expect(")")
            self.expect(";")
            ident = self.identity()
            return TransitionFormula(self.names, conj(f, ident.body))
        if self.accept("if"):
            self.expect("(")
            cond = self.unprimed_formula()
            self.expect(")")
            then = self.block()
            other = self.block() if self.accept("else") else self.identity()
            return TransitionFormula(self.names, disj(conj(cond, then.body), conj(neg(cond), other.body)))
        target = self.ident(allow_prime=False)
        if target.text not in self.names:
            raise self.error(f"undeclared variable {target.text!r}", target)
        self.expect("=")
        if self.accept("*"):
            rhs = None
        else:
            start = self.tok
            rhs = self.term()
            if any(v.endswith("'") for v in rhs.coeffs):
                raise self.error("primed variable in assignment", start)
        self.expect(";")
        return self.frame({target.text: rhs})

    def program(self) -> InputProgram:
        self.header()
        if self.accept("formula"):
            body = self.formula()
            self.expect(";")
            self.finish()
            return InputProgram(self.names, "formula", TransitionFormula(self.names, body))
        if self.accept("loop"):
            self.expect("{")
            self.expect("assume")
            self.expect("(")
            guard = self.unprimed_formula()
            self.expect(")")
            self.expect(";")
            body = self.statements()
            self.expect("}")
            self.finish()
            tf = TransitionFormula(self.names, qe_cooper(conj(guard, body.body)))
            return InputProgram(self.names, "loop", tf)
        raise self.error(f"expected 'formula' or 'loop', found {self.tok.text or 'end of input'!r}")


def parse_program(text: str) -> InputProgram:
    """Parse a program file; raises ParseError with line and column on bad input."""
    return _ProgramParser(text).program()


__all__ = ["InputProgram", "ParseError", "parse_input", "parse_program", "RESERVED", "Token"]


parse_input = parse_program
