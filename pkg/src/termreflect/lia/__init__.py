"""Linear integer arithmetic: formulas, Cooper QE, satisfiability and syntax."""

from .terms import LinTerm
from .formula import (
    FALSE, TRUE, And, Bool, Div, Exists, Forall, Formula, Leq, Not, Or,
    atoms, conj, disj, div, eq, evaluate, exists, exists_many, forall, fresh_var,
    ge, gt, iff, implies, is_quantifier_free, le, leq, lt, map_atoms, ne, neg, nnf,
    rename, substitute,
)
from .qe import entails, equivalent, eval_quantified, is_sat, is_valid, model, qe_cooper
from .syntax import ParseError, format_formula, format_term, parse_formula, parse_term

__all__ = [
    "LinTerm", "Formula", "Bool", "Leq", "Div", "Not", "And", "Or", "Exists", "Forall",
    "TRUE", "FALSE", "atoms", "conj", "disj", "div", "eq", "evaluate", "exists",
    "exists_many", "forall", "fresh_var", "ge", "gt", "iff", "implies",
    "is_quantifier_free", "le", "leq", "lt", "map_atoms", "ne", "neg", "nnf", "rename",
    "substitute", "entails", "equivalent", "eval_quantified", "is_sat", "is_valid",
    "model", "qe_cooper", "ParseError", "format_formula", "format_term", "parse_formula",
    "parse_term",
]
