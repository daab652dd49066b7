"""Abstract syntax for MSO over graph structures and tree-dec expansions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union

#: Relation symbols and their arities.
RELATIONS = {"V": 1, "E": 1, "I": 2, "V_T": 1, "E_T": 1, "I_T": 2, "B": 2}
#: Required argument sorts of the binary relations.
POSITION_SORTS = {"I": ("V", "E"), "I_T": ("VT", "ET"), "B": ("VT", "V")}

INDIVIDUAL_SORTS = ("V", "E", "VT", "ET", "U")
SET_SORTS = ("Vset", "Eset", "VTset", "ETset", "Uset")
#: Unary relation that delimits each individual sort (None: whole universe).
SORT_RELATION = {"V": "V", "E": "E", "VT": "V_T", "ET": "E_T", "U": None}


def element_sort(set_sort: str) -> str:
    return set_sort[:-3]


def is_set_sort(sort: str) -> bool:
    return sort in SET_SORTS


@dataclass(frozen=True)
class Const:
    value: bool


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple[str, ...]


@dataclass(frozen=True)
class Eq:
    left: str
    right: str


@dataclass(frozen=True)
class Member:
    set_var: str
    var: str


@dataclass(frozen=True)
class TwEq:
    """Semantic atom: the underlying graph has tree-width exactly ``k``."""

    k: int


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    parts: tuple["Formula", ...]


@dataclass(frozen=True)
class Or:
    parts: tuple["Formula", ...]


@dataclass(frozen=True)
class Quant:
    kind: str  # "exists" | "forall"
    var: str
    sort: str
    body: "Formula"


Formula = Union[Const, Atom, Eq, Member, TwEq, Not, And, Or, Quant]

TRUE = Const(True)
FALSE = Const(False)


def conj(parts: Iterable[Formula]) -> Formula:
    parts = tuple(parts)
    if not parts:
        return TRUE
    if len(parts) == 1:
        return parts[0]
    return And(parts)


def disj(parts: Iterable[Formula]) -> Formula:
    parts = tuple(parts)
    if not parts:
        return FALSE
    if len(parts) == 1:
        return parts[0]
    return Or(parts)


def implies(a: Formula, b: Formula) -> Formula:
    return Or((Not(a), b))


def neq(x: str, y: str) -> Formula:
    return Not(Eq(x, y))


def exists(names: str | Iterable[str], sort: str, body: Formula) -> Formula:
    if isinstance(names, str):
        names = [names]
    for name in reversed(list(names)):
        body = Quant("exists", name, sort, body)
    return body


def forall(names: str | Iterable[str], sort: str, body: Formula) -> Formula:
    if isinstance(names, str):
        names = [names]
    for name in reversed(list(names)):
        body = Quant("forall", name, sort, body)
    return body


def free_variables(phi: Formula) -> frozenset[str]:
    if isinstance(phi, Const) or isinstance(phi, TwEq):
        return frozenset()
    if isinstance(phi, Atom):
        return frozenset(phi.args)
    if isinstance(phi, Eq):
        return frozenset((phi.left, phi.right))
    if isinstance(phi, Member):
        return frozenset((phi.set_var, phi.var))
    if isinstance(phi, Not):
        return free_variables(phi.body)
    if isinstance(phi, (And, Or)):
        return frozenset().union(*(free_variables(p) for p in phi.parts))
    if isinstance(phi, Quant):
        return free_variables(phi.body) - {phi.var}
    raise TypeError(f"not a formula: {phi!r}")


def uses_expansion(phi: Formula) -> bool:
    """True if the formula needs a tree-dec expansion to be evaluated."""
    if isinstance(phi, TwEq):
        return True
    if isinstance(phi, Atom):
        return phi.pred in ("V_T", "E_T", "I_T", "B")
    if isinstance(phi, Quant):
        return phi.sort in ("VT", "ET", "VTset", "ETset") or uses_expansion(phi.body)
    if isinstance(phi, Not):
        return uses_expansion(phi.body)
    if isinstance(phi, (And, Or)):
        return any(uses_expansion(p) for p in phi.parts)
    return False


def negate(phi: Formula) -> Formula:
    """Negation pushed inwards (negation normal form of ``not phi``)."""
    if isinstance(phi, Const):
        return Const(not phi.value)
    if isinstance(phi, Not):
        return phi.body
    if isinstance(phi, And):
        return Or(tuple(negate(p) for p in phi.parts))
    if isinstance(phi, Or):
        return And(tuple(negate(p) for p in phi.parts))
    if isinstance(phi, Quant):
        kind = "forall" if phi.kind == "exists" else "exists"
        return Quant(kind, phi.var, phi.sort, negate(phi.body))
    return Not(phi)


def to_text(phi: Formula) -> str:
    """Render a formula in the concrete ASCII syntax accepted by the parser."""
    if isinstance(phi, Const):
        return "true" if phi.value else "false"
    if isinstance(phi, Atom):
        return f"{phi.pred}({', '.join(phi.args)})"
    if isinstance(phi, Eq):
        return f"{phi.left} = {phi.right}"
    if isinstance(phi, Member):
        return f"{phi.set_var}({phi.var})"
    if isinstance(phi, TwEq):
        return f"TW_EQ({phi.k})"
    if isinstance(phi, Not):
        inner = to_text(phi.body)
        if isinstance(phi.body, Eq):
            inner = f"({inner})"
        return f"not {inner}"
    if isinstance(phi, And):
        return "(" + " and ".join(to_text(p) for p in phi.parts) + ")"
    if isinstance(phi, Or):
        return "(" + " or ".join(to_text(p) for p in phi.parts) + ")"
    if isinstance(phi, Quant):
        return f"({phi.kind} {phi.var}:{phi.sort}. {to_text(phi.body)})"
    raise TypeError(f"not a formula: {phi!r}")


def size(phi: Formula) -> int:
    if isinstance(phi, Not):
        return 1 + size(phi.body)
    if isinstance(phi, (And, Or)):
        return 1 + sum(size(p) for p in phi.parts)
    if isinstance(phi, Quant):
        return 1 + size(phi.body)
    return 1
