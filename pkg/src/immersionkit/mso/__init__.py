"""Monadic second-order formulas over graph structures and tree-dec expansions."""

from .builders import (
    bounded_satisfiability,
    build_phi_family,
    build_phi_H,
    build_phi_path,
    build_phi_union_class,
)
from .evaluator import SET_DOMAIN_BUDGET, MSOEvaluationError, Structure, as_structure, evaluate
from .parser import MSOSortError, MSOSyntaxError, parse_formula
from .syntax import (
    And,
    Atom,
    Const,
    Eq,
    Formula,
    Member,
    Not,
    Or,
    Quant,
    TwEq,
    free_variables,
    negate,
    to_text,
    uses_expansion,
)

__all__ = [
    "And", "Atom", "Const", "Eq", "Formula", "Member", "Not", "Or", "Quant", "TwEq",
    "MSOEvaluationError", "MSOSortError", "MSOSyntaxError", "SET_DOMAIN_BUDGET", "Structure",
    "as_structure", "bounded_satisfiability", "build_phi_H", "build_phi_family",
    "build_phi_path", "build_phi_union_class", "evaluate", "free_variables", "negate",
    "parse_formula", "to_text", "uses_expansion",
]
