"""Formulas expressing immersion of a fixed pattern, and bounded satisfiability."""

from __future__ import annotations

from itertools import combinations
from typing import Iterable, Optional

from ..multigraph import MultiGraph, enumerate_graphs
from ..treewidth import TreeDecExpansion, treewidth_exact
from .evaluator import Structure, evaluate
from .syntax import (
    FALSE,
    Atom,
    Eq,
    Formula,
    Member,
    Not,
    TwEq,
    conj,
    disj,
    exists,
    forall,
    implies,
    neq,
    uses_expansion,
)


def build_phi_path(x: str = "x", y: str = "y", Z: str = "Z", connected: bool = False) -> Formula:
    """``path(x, y, Z)``: x != y, exactly one Z-edge at x and at y, two at
    every other vertex touching Z, and no vertex with three Z-edges.

    These local conditions allow Z to carry extra cycles disjoint from the
    x-y path. With ``connected=True`` a closure clause additionally forces
    every vertex touching Z to be reachable from x along Z, so that Z is
    exactly the edge set of an x-y path.
    """

    reserved = {"p", "q", "p1", "p2", "p3", "q1", "q2", "q3", "w", "m", "u", "v", "e", "R"}
    if {x, y, Z} & reserved or len({x, y, Z}) < 3:
        raise ValueError(f"path variables must be distinct and avoid {sorted(reserved)}")

    def z(e):
        return Member(Z, e)

    def inc(v, e):
        return Atom("I", (v, e))

    ends = exists(
        ["p", "q"],
        "E",
        conj([
            z("p"),
            z("q"),
            inc(x, "p"),
            inc(y, "q"),
            forall("p2", "E", implies(conj([z("p2"), inc(x, "p2")]), Eq("p", "p2"))),
            forall("q2", "E", implies(conj([z("q2"), inc(y, "q2")]), Eq("q", "q2"))),
        ]),
    )
    inner = forall(
        "w",
        "V",
        implies(
            conj([
                Atom("V", ("w",)),
                neq("w", x),
                neq("w", y),
                exists("q1", "E", conj([z("q1"), inc("w", "q1")])),
            ]),
            exists(
                ["q2", "q3"],
                "E",
                conj([z("q2"), z("q3"), neq("q2", "q3"), inc("w", "q2"), inc("w", "q3")]),
            ),
        ),
    )
    no_three = forall(
        ["p1", "p2", "p3"],
        "E",
        implies(
            conj([
                z("p1"),
                z("p2"),
                z("p3"),
                exists(
                    "m",
                    "V",
                    conj([Atom("V", ("m",)), inc("m", "p1"), inc("m", "p2"), inc("m", "p3")]),
                ),
            ]),
            disj([Eq("p1", "p2"), Eq("p1", "p3"), Eq("p2", "p3")]),
        ),
    )
    parts = [neq(x, y), ends, inner, no_three]
    if connected:
        parts.append(_reachable_from(x, Z))
    return conj(parts)


def _reachable_from(x: str, Z: str) -> Formula:
    # Every set containing x and closed under Z-edges contains all Z-vertices.
    closed = forall(
        ["u", "v"],
        "V",
        forall(
            "e",
            "E",
            implies(
                conj([Member("R", "u"), Member(Z, "e"), Atom("I", ("u", "e")), Atom("I", ("v", "e"))]),
                Member("R", "v"),
            ),
        ),
    )
    covers = forall(
        "w",
        "V",
        forall("e", "E", implies(conj([Member(Z, "e"), Atom("I", ("w", "e"))]), Member("R", "w"))),
    )
    return forall("R", "Vset", implies(conj([Member("R", x), closed]), covers))


def build_phi_H(H: MultiGraph) -> Formula:
    """Closed formula true in exactly the graphs that contain an immersion of H."""
    if H.has_loops():
        raise ValueError("pattern must be loopless")
    xs = [f"x{i + 1}" for i in range(H.n)]
    Es = [f"E{j + 1}" for j in range(H.m)]
    parts: list[Formula] = [Atom("V", (x,)) for x in xs]
    parts += [forall("_z", "E", implies(Member(Ej, "_z"), Atom("E", ("_z",)))) for Ej in Es]
    parts += [neq(a, b) for a, b in combinations(xs, 2)]
    parts += [
        forall("_z", "E", disj([Not(Member(a, "_z")), Not(Member(b, "_z"))]))
        for a, b in combinations(Es, 2)
    ]
    parts += [build_phi_path(xs[k], xs[l], Es[r]) for r, (k, l) in enumerate(H.edges)]
    return exists(Es, "Eset", exists(xs, "V", conj(parts)))


def build_phi_family(F: Iterable[MultiGraph]) -> Formula:
    """Disjunction of the pattern formulas; the empty family gives false."""
    members = list(F)
    if not members:
        return FALSE
    return disj([build_phi_H(H) for H in members])


def build_phi_union_class(obs1: Iterable[MultiGraph], obs2: Iterable[MultiGraph], k: int) -> Formula:
    """Graphs of tree-width at most k excluding every member of obs1 or of obs2."""
    if k < 0:
        raise ValueError("k must be non-negative")
    avoid1 = conj([Not(build_phi_H(G)) for G in obs1])
    avoid2 = conj([Not(build_phi_H(H)) for H in obs2])
    return conj([disj([avoid1, avoid2]), disj([TwEq(j) for j in range(k + 1)])])


def bounded_satisfiability(
    phi: Formula,
    k: int,
    n_max: int,
    m_max: int,
    cache: Optional[dict] = None,
) -> Optional[MultiGraph]:
    """First canonical simple graph (n <= n_max, m <= m_max, tw <= k) modelling phi.

    Graphs come in enumeration order (vertices, then edges, then canonical
    form). When phi mentions the decomposition vocabulary each graph is
    paired with an optimal tree decomposition. ``cache`` may carry
    structures across calls so that memo tables are reused.
    """
    need_td = uses_expansion(phi)
    if cache is None:
        cache = {}
    for G in enumerate_graphs(n_max, m_max, simple=True):
        key = (G.canonical_form(), need_td)
        entry = cache.get(key)
        if entry is None:
            w, td = treewidth_exact(G, max_n=max(G.n, 12))
            entry = cache[key] = (w, Structure(G, TreeDecExpansion(G, td) if need_td else None))
        w, S = entry
        if w <= k and evaluate(S, phi):
            return G
    return None
