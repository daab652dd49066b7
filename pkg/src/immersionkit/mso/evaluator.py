"""Brute-force MSO evaluation over finite graph structures.

Elements are universe indices (vertices first, then edges, then tree nodes
and tree edges for expansions); set values are bitmasks over the universe.
Each maximal run of like quantifiers is searched as one block: individual
variables are bound before set variables, every conjunct of the matrix is
checked as soon as its block variables are bound, and set variables range
only over subsets that pass the conjuncts depending on already-bound
individuals. Results of quantified subformulas are memoised per structure,
keyed by their shape up to renaming of bound variables and by the values of
their free variables. None of this changes the semantics; it only prunes.
"""

from __future__ import annotations

from functools import cached_property
from typing import Iterable, Mapping, Optional, Union

from ..exceptions import BudgetExceeded, ImmersionKitError
from ..multigraph import MultiGraph
from ..treewidth import TreeDecExpansion, treewidth_exact
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
    element_sort,
    free_variables,
    is_set_sort,
    negate,
)

#: Largest domain a set quantifier may range over (2**budget subsets).
SET_DOMAIN_BUDGET = 16

_MISSING = object()


class MSOEvaluationError(ImmersionKitError):
    pass


class Structure:
    """A graph structure, or a tree-dec expansion when ``expansion`` is set."""

    def __init__(self, graph: MultiGraph, expansion: Optional[TreeDecExpansion] = None,
                 set_budget: int = SET_DOMAIN_BUDGET):
        self.graph = graph
        self.expansion = expansion
        self.set_budget = set_budget
        n, m = graph.n, graph.m
        if expansion is not None:
            t, s = expansion.n_nodes, expansion.n_tree_edges
        else:
            t = s = 0
        self.size = n + m + t + s
        self.domains = {
            "V": tuple(range(n)),
            "E": tuple(range(n, n + m)),
            "VT": tuple(range(n + m, n + m + t)),
            "ET": tuple(range(n + m + t, self.size)),
            "U": tuple(range(self.size)),
        }
        self.unary = {
            "V": _mask(self.domains["V"]),
            "E": _mask(self.domains["E"]),
            "V_T": _mask(self.domains["VT"]),
            "E_T": _mask(self.domains["ET"]),
        }
        self.binary = {"I": frozenset((x, n + e) for e, uv in enumerate(graph.edges) for x in set(uv))}
        if expansion is not None:
            rel = expansion.relations
            self.binary["I_T"] = rel["I_T"]
            self.binary["B"] = rel["B"]
        else:
            self.binary["I_T"] = frozenset()
            self.binary["B"] = frozenset()
        self.memo: dict = {}
        self.filters: dict = {}
        self._subsets: dict[str, tuple[int, ...]] = {}

    @property
    def is_expansion(self) -> bool:
        return self.expansion is not None

    def vertex(self, v: int) -> int:
        return v

    def edge(self, e: int) -> int:
        return self.graph.n + e

    def node(self, t: int) -> int:
        return self.graph.n + self.graph.m + t

    def tree_edge(self, j: int) -> int:
        return self.size - len(self.domains["ET"]) + j

    @cached_property
    def treewidth(self) -> int:
        return treewidth_exact(self.graph, max_n=max(self.graph.n, 12))[0]

    def subsets(self, sort: str) -> tuple[int, ...]:
        """All subsets of the sort's domain as masks, in binary-counter order."""
        cached = self._subsets.get(sort)
        if cached is not None:
            return cached
        dom = self.domains[sort]
        if len(dom) > self.set_budget:
            raise BudgetExceeded(
                f"set quantifier over {len(dom)} elements exceeds budget {self.set_budget}"
            )
        masks = [0]
        for x in dom:
            bit = 1 << x
            masks += [mk | bit for mk in masks]
        # The doubling above yields binary-counter order already.
        out = tuple(masks)
        self._subsets[sort] = out
        return out


def _mask(elems: Iterable[int]) -> int:
    out = 0
    for x in elems:
        out |= 1 << x
    return out


def as_structure(S: Union[Structure, MultiGraph, TreeDecExpansion]) -> Structure:
    if isinstance(S, Structure):
        return S
    if isinstance(S, TreeDecExpansion):
        return Structure(S.graph, S)
    if isinstance(S, MultiGraph):
        return Structure(S)
    raise TypeError(f"cannot evaluate over {type(S).__name__}")


def shape(phi: Formula) -> tuple[str, tuple[str, ...]]:
    """Serialisation up to renaming, plus free variables in first-use order."""
    free: list[str] = []
    out: list[str] = []

    def name(v, bound):
        if v in bound:
            return f"b{bound[v]}"
        if v not in free:
            free.append(v)
        return f"f{free.index(v)}"

    def rec(p, bound):
        if isinstance(p, Const):
            out.append("T" if p.value else "F")
        elif isinstance(p, TwEq):
            out.append(f"W{p.k}")
        elif isinstance(p, Atom):
            out.append(p.pred + "(" + ",".join(name(a, bound) for a in p.args) + ")")
        elif isinstance(p, Eq):
            out.append(f"={name(p.left, bound)},{name(p.right, bound)}")
        elif isinstance(p, Member):
            out.append(f"@{name(p.set_var, bound)},{name(p.var, bound)}")
        elif isinstance(p, Not):
            out.append("!")
            rec(p.body, bound)
        elif isinstance(p, (And, Or)):
            out.append("&(" if isinstance(p, And) else "|(")
            for q in p.parts:
                rec(q, bound)
                out.append(";")
            out.append(")")
        elif isinstance(p, Quant):
            inner = dict(bound)
            inner[p.var] = len(bound)
            out.append(f"{'E' if p.kind == 'exists' else 'A'}{p.sort}.")
            rec(p.body, inner)
        else:
            raise TypeError(p)

    rec(phi, {})
    return "".join(out), tuple(free)


def _flatten_and(phi: Formula) -> list[Formula]:
    if isinstance(phi, And):
        out = []
        for p in phi.parts:
            out.extend(_flatten_and(p))
        return out
    return [phi]


class _Compiler:
    def __init__(self, S: Structure):
        self.S = S

    def compile(self, phi: Formula):
        S = self.S
        if isinstance(phi, Const):
            v = phi.value
            return lambda env: v
        if isinstance(phi, TwEq):
            if not S.is_expansion:
                raise MSOEvaluationError("TW_EQ needs a tree-dec expansion, not a plain graph structure")
            k = phi.k
            return lambda env: S.treewidth == k
        if isinstance(phi, Atom):
            if len(phi.args) == 1:
                mask = S.unary[phi.pred]
                x = phi.args[0]
                return lambda env: (mask >> env[x]) & 1 == 1
            rel = S.binary[phi.pred]
            a, b = phi.args
            return lambda env: (env[a], env[b]) in rel
        if isinstance(phi, Eq):
            a, b = phi.left, phi.right
            return lambda env: env[a] == env[b]
        if isinstance(phi, Member):
            X, x = phi.set_var, phi.var
            return lambda env: (env[X] >> env[x]) & 1 == 1
        if isinstance(phi, Not):
            f = self.compile(phi.body)
            return lambda env: not f(env)
        if isinstance(phi, And):
            fs = [self.compile(p) for p in phi.parts]

            def conj_fn(env):
                for f in fs:
                    if not f(env):
                        return False
                return True

            return conj_fn
        if isinstance(phi, Or):
            fs = [self.compile(p) for p in phi.parts]

            def disj_fn(env):
                for f in fs:
                    if f(env):
                        return True
                return False

            return disj_fn
        if isinstance(phi, Quant):
            return self.block(phi)
        raise TypeError(f"not a formula: {phi!r}")

    def block(self, node: Quant):
        S = self.S
        kind = node.kind
        bvars: list[tuple[str, str]] = []
        cur: Formula = node
        while isinstance(cur, Quant) and cur.kind == kind and all(cur.var != v for v, _ in bvars):
            bvars.append((cur.var, cur.sort))
            cur = cur.body
        matrix = cur if kind == "exists" else negate(cur)
        order = [b for b in bvars if not is_set_sort(b[1])] + [b for b in bvars if is_set_sort(b[1])]
        pos = {v: i for i, (v, _) in enumerate(order)}
        nsteps = len(order)
        checks: list[list] = [[] for _ in range(nsteps + 1)]
        filters: list[list] = [[] for _ in range(nsteps + 1)]
        for c in _flatten_and(matrix):
            fv = free_variables(c)
            mine = [pos[v] for v in fv if v in pos]
            step = max(mine) + 1 if mine else 0
            fn = self.compile(c)
            if step > 0:
                var, sort = order[step - 1]
                others = [v for v in fv if v != var and v in pos]
                if is_set_sort(sort) and all(not is_set_sort(order[pos[v]][1]) for v in others):
                    sh, forder = shape(c)
                    filters[step].append((fn, sh, forder, var))
                    continue
            checks[step].append(fn)

        domains = []
        for var, sort in order:
            if is_set_sort(sort):
                domains.append(None)
            else:
                domains.append(S.domains[sort])

        block_shape, block_free = shape(node)
        names = [v for v, _ in order]
        memo = S.memo
        filter_cache = S.filters
        exists_kind = kind == "exists"

        def candidates(j, env):
            var, sort = order[j]
            flist = filters[j + 1]
            if not flist:
                return S.subsets(element_sort(sort))
            result = None
            for fn, sh, forder, fvar in flist:
                key = (sh, tuple(None if v == fvar else env[v] for v in forder))
                hit = filter_cache.get(key)
                if hit is None:
                    # Sweep each mask through the conjunct once per key.
                    saved = env.get(var, _MISSING)
                    good = []
                    for mk in S.subsets(element_sort(sort)):
                        env[var] = mk
                        if fn(env):
                            good.append(mk)
                    _restore(env, var, saved)
                    hit = filter_cache[key] = (tuple(good), frozenset(good))
                if result is None:
                    result = hit[0]
                else:
                    allowed = hit[1]
                    result = tuple(mk for mk in result if mk in allowed)
                if not result:
                    break
            return result

        def search(j, env):
            for f in checks[j]:
                if not f(env):
                    return False
            if j == nsteps:
                return True
            var = names[j]
            dom = domains[j]
            if dom is None:
                dom = candidates(j, env)
            for a in dom:
                env[var] = a
                if search(j + 1, env):
                    return True
            return False

        def run(env):
            key = (block_shape, tuple(env[v] for v in block_free))
            hit = memo.get(key)
            if hit is not None:
                return hit
            saved = [(v, env.get(v, _MISSING)) for v in names]
            found = search(0, env)
            for v, old in saved:
                _restore(env, v, old)
            res = found if exists_kind else not found
            memo[key] = res
            return res

        return run


def _restore(env, var, old):
    if old is _MISSING:
        env.pop(var, None)
    else:
        env[var] = old


def _convert(value) -> int:
    if isinstance(value, bool):
        raise TypeError("assignment values must be elements or sets of elements")
    if isinstance(value, int):
        return value
    return _mask(value)


def _set_variables(phi: Formula) -> set[str]:
    if isinstance(phi, Member):
        return {phi.set_var}
    if isinstance(phi, Not):
        return _set_variables(phi.body)
    if isinstance(phi, (And, Or)):
        return set().union(*(_set_variables(p) for p in phi.parts))
    if isinstance(phi, Quant):
        return _set_variables(phi.body)
    return set()


def evaluate(S, phi: Formula, asg: Optional[Mapping[str, object]] = None) -> bool:
    """Truth value of ``phi`` in ``S`` under ``asg``.

    ``S`` may be a :class:`Structure`, a MultiGraph or a TreeDecExpansion.
    Assignment values are universe elements (see ``Structure.vertex`` and
    ``Structure.edge``) or iterables of them for set variables.
    """
    S = as_structure(S)
    asg = dict(asg or {})
    missing = free_variables(phi) - set(asg)
    if missing:
        raise MSOEvaluationError(f"unassigned free variables: {sorted(missing)}")
    set_vars = _set_variables(phi)
    for k, v in asg.items():
        if (k in set_vars) == isinstance(v, int):
            kind = "a set" if k in set_vars else "a single element"
            raise MSOEvaluationError(f"{k!r} needs {kind}")
    env = {k: _convert(v) for k, v in asg.items()}
    for k, v in env.items():
        if v < 0 or (v >> S.size if k in set_vars else v >= S.size):
            raise MSOEvaluationError(f"value of {k!r} is outside the universe")
    return bool(_Compiler(S).compile(phi)(env))
