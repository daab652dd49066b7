"""Parser for the ASCII formula syntax.

Grammar, lowest precedence first::

    formula  := implies
    implies  := or ("->" implies)?
    or       := and ("or" and)*
    and      := unary ("and" unary)*
    unary    := "not" unary | quant | primary
    quant    := ("exists" | "forall") name ("," name)* (":" sort)? "." formula
    primary  := "(" formula ")" | "true" | "false" | atom
    atom     := REL "(" name ("," name)* ")" | "TW_EQ" "(" int ")"
              | name "(" name ")" | name "=" name | name "!=" name
              | name "subseteq" (name | "V" | "E" | "V_T" | "E_T")
              | name "cap" name "=" "empty"

A quantifier body extends as far to the right as possible. Omitted sorts
are inferred from use; a variable that no atom constrains defaults to the
whole universe (``U`` or ``Uset``). ``->``, ``!=``, ``subseteq`` and
``cap ... = empty`` are expanded into the core connectives once sorts are
known.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from ..exceptions import ImmersionKitError
from .syntax import (
    INDIVIDUAL_SORTS,
    POSITION_SORTS,
    RELATIONS,
    SET_SORTS,
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
    element_sort,
    is_set_sort,
)

KEYWORDS = {"exists", "forall", "not", "and", "or", "true", "false", "subseteq", "cap", "empty"}
SORTS = set(INDIVIDUAL_SORTS) | set(SET_SORTS)
UNARY_RELATION_SORT = {"V": "V", "E": "E", "V_T": "VT", "E_T": "ET"}

_TOKEN = re.compile(r"\s*(?:(->|!=|[(),.:=])|([A-Za-z_][A-Za-z0-9_]*)|(\d+))")


class MSOSyntaxError(ImmersionKitError, ValueError):
    def __init__(self, message: str, pos: Optional[int] = None):
        self.pos = pos
        if pos is not None:
            message = f"at position {pos}: {message}"
        super().__init__(message)


class MSOSortError(MSOSyntaxError):
    pass


@dataclass
class _Tok:
    kind: str  # "sym" | "name" | "int" | "end"
    text: str
    pos: int


def tokenize(text: str) -> list[_Tok]:
    if not text.isascii():
        bad = next(i for i, ch in enumerate(text) if not ch.isascii())
        raise MSOSyntaxError(f"non-ASCII character {text[bad]!r}", bad)
    toks = []
    i = 0
    while True:
        while i < len(text) and text[i].isspace():
            i += 1
        if i >= len(text):
            break
        mt = _TOKEN.match(text, i)
        if mt is None:
            raise MSOSyntaxError(f"unexpected character {text[i]!r}", i)
        start = mt.start(mt.lastindex)
        if mt.group(1):
            toks.append(_Tok("sym", mt.group(1), start))
        elif mt.group(2):
            toks.append(_Tok("name", mt.group(2), start))
        else:
            toks.append(_Tok("int", mt.group(3), start))
        i = mt.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


# Surface-only nodes; they never leave this module.
@dataclass(frozen=True)
class _Implies:
    left: Formula
    right: Formula


@dataclass(frozen=True)
class _Subseteq:
    left: str
    right: str  # a set variable or a unary relation name
    pos: int


@dataclass(frozen=True)
class _Disjoint:
    left: str
    right: str
    pos: int


@dataclass(frozen=True)
class _Pos:
    """Wraps an atom with the source position used in sort errors."""

    node: Formula
    pos: int


@dataclass(frozen=True)
class _QuantSrc:
    kind: str
    var: str
    sort: Optional[str]
    body: object
    pos: int


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def next(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("sym", "name") and t.text == text

    def expect(self, text: str) -> _Tok:
        if not self.at(text):
            raise MSOSyntaxError(f"expected {text!r}, found {self.tok.text or 'end of input'!r}", self.tok.pos)
        return self.next()

    def name(self) -> _Tok:
        t = self.tok
        if t.kind != "name" or t.text in KEYWORDS:
            raise MSOSyntaxError(f"expected a variable name, found {t.text or 'end of input'!r}", t.pos)
        return self.next()

    def parse(self):
        node = self.formula()
        if self.tok.kind != "end":
            raise MSOSyntaxError(f"unexpected {self.tok.text!r}", self.tok.pos)
        return node

    def formula(self):
        left = self.disjunction()
        if self.at("->"):
            self.next()
            return _Implies(left, self.formula())
        return left

    def disjunction(self):
        parts = [self.conjunction()]
        while self.at("or"):
            self.next()
            parts.append(self.conjunction())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def conjunction(self):
        parts = [self.unary()]
        while self.at("and"):
            self.next()
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def unary(self):
        if self.at("not"):
            self.next()
            return Not(self.unary())
        if self.at("exists") or self.at("forall"):
            return self.quant()
        return self.primary()

    def quant(self):
        kw = self.next()
        names = [self.name()]
        while self.at(","):
            self.next()
            names.append(self.name())
        sort = None
        if self.at(":"):
            self.next()
            if self.tok.kind != "name" or self.tok.text not in SORTS:
                raise MSOSyntaxError(f"unknown sort {self.tok.text!r}", self.tok.pos)
            sort = self.next().text
        self.expect(".")
        body = self.formula()
        for t in reversed(names):
            body = _QuantSrc(kw.text, t.text, sort, body, t.pos)
        return body

    def primary(self):
        t = self.tok
        if self.at("("):
            self.next()
            node = self.formula()
            self.expect(")")
            return node
        if self.at("true") or self.at("false"):
            self.next()
            return Const(t.text == "true")
        if t.kind != "name" or t.text in KEYWORDS:
            raise MSOSyntaxError(f"expected a formula, found {t.text or 'end of input'!r}", t.pos)
        self.next()
        if self.at("("):
            self.next()
            if t.text == "TW_EQ":
                k = self.tok
                if k.kind != "int":
                    raise MSOSyntaxError("TW_EQ expects an integer", k.pos)
                self.next()
                self.expect(")")
                return TwEq(int(k.text))
            args = [self.name().text]
            while self.at(","):
                self.next()
                args.append(self.name().text)
            self.expect(")")
            if t.text in RELATIONS:
                if len(args) != RELATIONS[t.text]:
                    raise MSOSyntaxError(f"{t.text} takes {RELATIONS[t.text]} argument(s)", t.pos)
                return _Pos(Atom(t.text, tuple(args)), t.pos)
            if len(args) != 1:
                raise MSOSyntaxError(f"set membership {t.text}(...) takes one argument", t.pos)
            return _Pos(Member(t.text, args[0]), t.pos)
        if self.at("="):
            self.next()
            return _Pos(Eq(t.text, self.name().text), t.pos)
        if self.at("!="):
            self.next()
            return Not(_Pos(Eq(t.text, self.name().text), t.pos))
        if self.at("subseteq"):
            self.next()
            rhs = self.tok
            if rhs.kind != "name" or (rhs.text in KEYWORDS):
                raise MSOSyntaxError("expected a set after subseteq", rhs.pos)
            self.next()
            return _Subseteq(t.text, rhs.text, t.pos)
        if self.at("cap"):
            self.next()
            other = self.name().text
            self.expect("=")
            self.expect("empty")
            return _Disjoint(t.text, other, t.pos)
        raise MSOSyntaxError(f"incomplete atom after {t.text!r}", self.tok.pos)


class _Slot:
    __slots__ = ("name", "sort", "is_set")

    def __init__(self, name: str, sort: Optional[str]):
        self.name = name
        self.sort = sort
        self.is_set = None if sort is None else is_set_sort(sort)


class _Sorter:
    """Infers omitted sorts, checks sorts, and expands the surface sugar."""

    def __init__(self, free: dict[str, str]):
        for v, s in free.items():
            if s not in SORTS:
                raise MSOSortError(f"unknown sort {s!r} for free variable {v!r}")
        self.free = {v: _Slot(v, s) for v, s in free.items()}
        self.changed = False
        self.strict = False
        self.fresh = 0
        self.names: set[str] = set(free)

    # -- constraints ---------------------------------------------------

    def _set(self, slot: _Slot, sort: str, pos):
        if slot.sort is None:
            slot.sort = sort
            self.changed = True
        elif slot.sort != sort:
            raise MSOSortError(f"variable {slot.name!r} has sort {slot.sort}, used as {sort}", pos)

    def individual(self, slot: _Slot, pos, sort: Optional[str] = None):
        if slot.is_set:
            raise MSOSortError(f"set variable {slot.name!r} used as an individual", pos)
        slot.is_set = False
        if sort is not None:
            self._set(slot, sort, pos)

    def set_var(self, slot: _Slot, pos, elem: Optional[str] = None):
        if slot.is_set is False:
            raise MSOSortError(f"individual variable {slot.name!r} used as a set", pos)
        slot.is_set = True
        if elem is not None:
            self._set(slot, elem + "set", pos)

    @staticmethod
    def elem_of(slot: _Slot) -> Optional[str]:
        if slot.sort is None or not is_set_sort(slot.sort):
            return None
        return element_sort(slot.sort)

    def look(self, scope, name, pos) -> _Slot:
        slot = scope.get(name)
        if slot is None:
            raise MSOSortError(f"unbound variable {name!r}", pos)
        return slot

    # -- passes ----------------------------------------------------------

    def run(self, node) -> Formula:
        self.collect_names(node)
        slots: dict[int, _Slot] = {}
        # Propagate constraints until nothing changes, then default the rest.
        while True:
            self.changed = False
            self.walk(node, dict(self.free), slots, build=False)
            if not self.changed:
                break
        for slot in list(slots.values()) + list(self.free.values()):
            if slot.sort is None:
                slot.sort = "Uset" if slot.is_set else "U"
        self.strict = True
        return self.walk(node, dict(self.free), slots, build=True)

    def collect_names(self, node):
        if isinstance(node, _QuantSrc):
            self.names.add(node.var)
            self.collect_names(node.body)
        elif isinstance(node, (And, Or)):
            for p in node.parts:
                self.collect_names(p)
        elif isinstance(node, Not):
            self.collect_names(node.body)
        elif isinstance(node, _Implies):
            self.collect_names(node.left)
            self.collect_names(node.right)

    def fresh_name(self) -> str:
        while True:
            name = f"_z{self.fresh}"
            self.fresh += 1
            if name not in self.names:
                self.names.add(name)
                return name

    def walk(self, node, scope, slots, build):
        if isinstance(node, _QuantSrc):
            slot = slots.get(id(node))
            if slot is None:
                slot = slots[id(node)] = _Slot(node.var, node.sort)
            inner = dict(scope)
            inner[node.var] = slot
            body = self.walk(node.body, inner, slots, build)
            if build:
                return Quant(node.kind, node.var, slot.sort, body)
            return None
        if isinstance(node, (And, Or)):
            parts = [self.walk(p, scope, slots, build) for p in node.parts]
            return type(node)(tuple(parts)) if build else None
        if isinstance(node, Not):
            body = self.walk(node.body, scope, slots, build)
            return Not(body) if build else None
        if isinstance(node, _Implies):
            a = self.walk(node.left, scope, slots, build)
            b = self.walk(node.right, scope, slots, build)
            return Or((Not(a), b)) if build else None
        if isinstance(node, (Const, TwEq)):
            return node
        if isinstance(node, _Pos):
            return self.atom(node.node, node.pos, scope, build)
        if isinstance(node, _Subseteq):
            return self.subseteq(node, scope, build)
        if isinstance(node, _Disjoint):
            return self.disjoint(node, scope, build)
        raise TypeError(node)

    def atom(self, node, pos, scope, build):
        if isinstance(node, Atom):
            slots = [self.look(scope, a, pos) for a in node.args]
            if node.pred in POSITION_SORTS:
                for slot, sort in zip(slots, POSITION_SORTS[node.pred]):
                    self.individual(slot, pos, sort)
            else:
                self.individual(slots[0], pos)
            return node
        if isinstance(node, Eq):
            a = self.look(scope, node.left, pos)
            b = self.look(scope, node.right, pos)
            self.individual(a, pos)
            self.individual(b, pos)
            if a.sort is None and b.sort is not None:
                self._set(a, b.sort, pos)
            elif b.sort is None and a.sort is not None:
                self._set(b, a.sort, pos)
            elif self.strict and a.sort != b.sort and "U" not in (a.sort, b.sort):
                raise MSOSortError(f"comparing {a.name!r}:{a.sort} with {b.name!r}:{b.sort}", pos)
            return node
        if isinstance(node, Member):
            s = self.look(scope, node.set_var, pos)
            x = self.look(scope, node.var, pos)
            self.set_var(s, pos)
            self.individual(x, pos)
            if self.elem_of(s) is None and x.sort is not None:
                self.set_var(s, pos, x.sort)
            elif self.elem_of(s) is not None and x.sort is None:
                self.individual(x, pos, self.elem_of(s))
            elif self.strict and self.elem_of(s) not in (x.sort, "U") and x.sort != "U":
                raise MSOSortError(f"{x.name!r}:{x.sort} cannot belong to {s.name!r}:{s.sort}", pos)
            return node
        raise TypeError(node)

    def _element_test(self, name, scope, var, pos):
        """Membership of ``var`` in a set variable or a unary relation."""
        if name in UNARY_RELATION_SORT and name not in scope:
            return Atom(name, (var,)), UNARY_RELATION_SORT[name]
        slot = self.look(scope, name, pos)
        self.set_var(slot, pos)
        return Member(name, var), self.elem_of(slot)

    def subseteq(self, node: _Subseteq, scope, build):
        left = self.look(scope, node.left, node.pos)
        self.set_var(left, node.pos)
        right_test, right_elem = self._element_test(node.right, scope, "_", node.pos)
        if self.elem_of(left) is None and right_elem is not None:
            self.set_var(left, node.pos, right_elem)
        if node.right in scope:
            right = scope[node.right]
            if self.elem_of(right) is None and self.elem_of(left) is not None:
                self.set_var(right, node.pos, self.elem_of(left))
        if not build:
            return None
        z = self.fresh_name()
        test, _ = self._element_test(node.right, scope, z, node.pos)
        return Quant("forall", z, self.elem_of(left), Or((Not(Member(node.left, z)), test)))

    def disjoint(self, node: _Disjoint, scope, build):
        a = self.look(scope, node.left, node.pos)
        b = self.look(scope, node.right, node.pos)
        self.set_var(a, node.pos)
        self.set_var(b, node.pos)
        if self.elem_of(a) is None and self.elem_of(b) is not None:
            self.set_var(a, node.pos, self.elem_of(b))
        elif self.elem_of(b) is None and self.elem_of(a) is not None:
            self.set_var(b, node.pos, self.elem_of(a))
        if not build:
            return None
        z = self.fresh_name()
        elem = self.elem_of(a) if self.elem_of(a) == self.elem_of(b) else "U"
        return Quant("forall", z, elem, Or((Not(Member(node.left, z)), Not(Member(node.right, z)))))


def parse_formula(text: str, free: Optional[dict[str, str]] = None) -> Formula:
    """Parse ``text`` into a sorted formula.

    ``free`` declares the sorts of free variables; any other variable must be
    bound by a quantifier.
    """
    raw = _Parser(text).parse()
    sorter = _Sorter(dict(free or {}))
    return sorter.run(raw)
