"""Immersion-closed classes, their obstruction sets, and unions of classes."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterable, Iterator, Optional

from .exceptions import BudgetExceeded, ImmersionKitError
from .immersion import immerses, single_step_reductions
from .multigraph import MultiGraph, canonical_form, canonical_graph, enumerate_graphs
from .mso import Formula, Not, bounded_satisfiability, build_phi_family
from .mso.syntax import conj
from .treewidth import treewidth_exact


class NotImmersionClosed(ImmersionKitError):
    def __init__(self, cls: "ClassHandle", G: MultiGraph, R: MultiGraph):
        self.graph, self.reduction = G, R
        super().__init__(
            f"class {cls.name!r} is not immersion-closed: it contains {G.edges} on {G.n} "
            f"vertices but not the reduction {R.edges} on {R.n} vertices"
        )


def graph_key(G: MultiGraph) -> tuple:
    """Sort key for single graphs: vertex count, edge count, canonical form."""
    return (G.n, G.m, canonical_form(G))


@dataclass(frozen=True)
class ObstructionSet:
    """Finite family of pairwise non-isomorphic canonical graphs.

    ``complete_up_to`` is ``None`` for given sets, otherwise the
    ``(n_max, m_max)`` budget that was searched exhaustively.
    """

    members: tuple[MultiGraph, ...]
    name: str = "obs"
    provenance: str = "given"
    complete_up_to: Optional[tuple[int, int]] = None

    def __post_init__(self):
        canon = [canonical_graph(G) for G in self.members]
        keys = [canonical_form(G) for G in canon]
        if len(set(keys)) != len(keys):
            raise ValueError("obstruction set members must be pairwise non-isomorphic")
        object.__setattr__(self, "members", tuple(sorted(canon, key=graph_key)))

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[MultiGraph]:
        return iter(self.members)

    def keys(self) -> frozenset:
        return frozenset(canonical_form(G) for G in self.members)

    def weight(self) -> tuple[int, int]:
        return family_weight(self.members)

    def antichain_violations(self) -> list[tuple[int, int]]:
        """Index pairs ``(i, j)`` with member i immersing into member j."""
        out = []
        for i, A in enumerate(self.members):
            for j, B in enumerate(self.members):
                if i != j and immerses(A, B):
                    out.append((i, j))
        return out

    def stamp(self) -> str:
        if self.complete_up_to is None:
            return "*,*"
        return f"{self.complete_up_to[0]},{self.complete_up_to[1]}"


# -- class handles -------------------------------------------------------------


class ClassHandle:
    name = "class"

    def contains(self, G: MultiGraph) -> bool:
        raise NotImplementedError


class ObstructionClass(ClassHandle):
    """Graphs into which no member of the obstruction set immerses."""

    def __init__(self, obs: ObstructionSet, name: Optional[str] = None):
        self.obs = obs
        self.name = name or obs.name

    def contains(self, G: MultiGraph) -> bool:
        return not any(immerses(F, G) for F in self.obs)


class PredicateClass(ClassHandle):
    """Class given by a membership predicate; the predicate must be immersion-closed."""

    def __init__(self, name: str, predicate: Callable[[MultiGraph], bool]):
        self.name = name
        self.predicate = predicate

    def contains(self, G: MultiGraph) -> bool:
        return bool(self.predicate(G))


class UnionClass(ClassHandle):
    def __init__(self, first: ClassHandle, second: ClassHandle):
        self.first, self.second = first, second
        self.name = f"{first.name} | {second.name}"

    def contains(self, G: MultiGraph) -> bool:
        return self.first.contains(G) or self.second.contains(G)


def max_degree_at_most(d: int) -> PredicateClass:
    # Loops count twice, parallel edges with multiplicity.
    return PredicateClass(f"maxdeg<={d}", lambda G: G.max_degree() <= d)


def at_most_edges(m: int) -> PredicateClass:
    return PredicateClass(f"edges<={m}", lambda G: G.m <= m)


def no_edges() -> PredicateClass:
    return PredicateClass("edgeless", lambda G: G.m == 0)


def all_graphs() -> PredicateClass:
    return PredicateClass("all", lambda G: True)


def membership(G: MultiGraph, C: ClassHandle) -> bool:
    return C.contains(G)


def is_obstruction(G: MultiGraph, C: ClassHandle) -> bool:
    """G lies outside C while every single deletion or lift of G lies inside.

    For an immersion-closed C this is the same as being immersion-minimal
    outside C: any proper immersion factors through one of these steps.
    """
    if C.contains(G):
        return False
    return all(C.contains(R) for R in single_step_reductions(G))


def check_immersion_closed(C: ClassHandle, graphs: Iterable[MultiGraph]) -> None:
    """Raise :class:`NotImmersionClosed` if some member has a reduction outside C."""
    for G in graphs:
        if C.contains(G):
            for R in single_step_reductions(G):
                if not C.contains(R):
                    raise NotImmersionClosed(C, G, R)


# -- the family ordering ------------------------------------------------------


class Order(enum.Enum):
    LESS = "Less"
    GREATER = "Greater"
    EQUAL_WEIGHT = "EqualWeight"


def family_weight(F: Iterable[MultiGraph]) -> tuple[int, int]:
    F = list(F)
    return (sum(G.n for G in F), sum(G.m for G in F))


def family_compare(F1: Iterable[MultiGraph], F2: Iterable[MultiGraph]) -> Order:
    """Compare by total vertex count, then by total edge count."""
    w1, w2 = family_weight(F1), family_weight(F2)
    if w1 < w2:
        return Order.LESS
    if w1 > w2:
        return Order.GREATER
    return Order.EQUAL_WEIGHT


# -- obstruction computation --------------------------------------------------


def compute_obstructions(
    C: ClassHandle,
    n_max: int,
    m_max: int,
    check_closed: bool = True,
    name: Optional[str] = None,
) -> ObstructionSet:
    """All simple graphs within the budget that are obstructions of C."""
    graphs = list(enumerate_graphs(n_max, m_max, simple=True))
    if check_closed:
        check_immersion_closed(C, graphs)
    found = [G for G in graphs if is_obstruction(G, C)]
    return ObstructionSet(tuple(found), name or f"obs({C.name})", "computed", (n_max, m_max))


def compute_union_obstructions(
    C1: ClassHandle,
    C2: ClassHandle,
    n_max: int,
    m_max: int,
    check_closed: bool = True,
) -> ObstructionSet:
    """Obstructions of the union of two immersion-closed classes, within budget."""
    graphs = list(enumerate_graphs(n_max, m_max, simple=True))
    if check_closed:
        check_immersion_closed(C1, graphs)
        check_immersion_closed(C2, graphs)
    union = UnionClass(C1, C2)
    found = [
        G for G in graphs
        if not C1.contains(G) and not C2.contains(G) and is_obstruction(G, union)
    ]
    return ObstructionSet(tuple(found), f"obs({union.name})", "computed", (n_max, m_max))


def characterization_violations(
    C: ClassHandle, obs: ObstructionSet, n_max: int, m_max: int
) -> list[MultiGraph]:
    """Graphs within budget where membership disagrees with avoiding ``obs``."""
    bad = []
    for G in enumerate_graphs(n_max, m_max, simple=True):
        hit = any(immerses(F, G) for F in obs)
        if C.contains(G) == hit:
            bad.append(G)
    return bad


def compute_intertwines(G1: MultiGraph, G2: MultiGraph, n_max: int, m_max: int) -> list[MultiGraph]:
    """Immersion-minimal simple graphs containing both G1 and G2, within budget."""

    def both(G):
        return immerses(G1, G) and immerses(G2, G)

    out = []
    for G in enumerate_graphs(n_max, m_max, simple=True):
        if both(G) and not any(both(R) for R in single_step_reductions(G)):
            out.append(G)
    return sorted(out, key=graph_key)


# -- width of a class ---------------------------------------------------------


@dataclass
class WidthEstimate:
    width: int
    witness: Optional[MultiGraph]  # graph forcing the width, if any
    n_max: int
    checked: int = 0


def estimate_class_width(C: ClassHandle, n_max: int, m_max: Optional[int] = None) -> WidthEstimate:
    """Least positive k such that every enumerated graph outside C has a
    subgraph outside C of tree-width at most k.

    Spanning subgraphs suffice: isolated vertices never raise tree-width and
    never help a graph into an immersion-closed class. The value is a lower
    bound on the width of C, exact for the enumerated graphs.
    """
    if m_max is None:
        m_max = n_max * (n_max - 1) // 2
    tw_cache: dict = {}

    def tw(H):
        key = canonical_form(H)
        if key not in tw_cache:
            tw_cache[key] = treewidth_exact(H)[0]
        return tw_cache[key]

    best, witness, checked = 1, None, 0
    for G in enumerate_graphs(n_max, m_max, simple=True):
        if C.contains(G):
            continue
        checked += 1
        least = None
        for mask in range(1 << G.m):
            ids = [e for e in range(G.m) if mask >> e & 1]
            sub = MultiGraph(G.n, tuple(G.edges[e] for e in ids))
            if C.contains(sub):
                continue
            w = tw(sub)
            if least is None or w < least:
                least = w
                if least <= best:
                    break
        if least is not None and least > best:
            best, witness = least, G
    return WidthEstimate(best, witness, n_max, checked)


# -- the formula-driven search ------------------------------------------------


@dataclass
class FamilySearchResult:
    family: Optional[ObstructionSet]
    families_tested: int
    rejected: list = field(default_factory=list)  # (weights, member keys, which condition)


def _families(candidates: list[MultiGraph], max_members: int) -> list[tuple[MultiGraph, ...]]:
    fams = []
    for r in range(max_members + 1):
        fams.extend(combinations(candidates, r))
    fams.sort(key=lambda F: (family_weight(F), tuple(graph_key(G) for G in F)))
    return fams


def lemma4_search(
    phi_builder: Callable[[int], Formula],
    width_bound: int,
    family_budget: tuple[int, int, int],
    graph_budget: tuple[int, int],
    name: str = "family_search",
) -> FamilySearchResult:
    """Find the first family F, in weight order, for which both

    * some graph in C contains a member of F, and
    * some graph outside C contains no member of F

    are unsatisfiable over graphs of tree-width at most ``width_bound``.
    ``phi_builder(k)`` must define C among graphs of tree-width at most k.

    ``family_budget = (max_members, member_n_max, member_m_max)`` bounds the
    families tried; ``graph_budget = (n_max, m_max)`` bounds the
    satisfiability search, so the answer is only as complete as that budget.
    """
    max_members, fn, fm = family_budget
    n_max, m_max = graph_budget
    candidates = list(enumerate_graphs(fn, fm, simple=True))
    phi_c = phi_builder(width_bound)
    not_phi_c = Not(phi_c)
    cache: dict = {}
    tested = 0
    rejected = []
    for F in _families(candidates, max_members):
        tested += 1
        phi_f = build_phi_family(F)
        chi = conj([phi_c, phi_f])
        witness = bounded_satisfiability(chi, width_bound, n_max, m_max, cache=cache)
        if witness is not None:
            rejected.append((family_weight(F), F, "member of C contains F", witness))
            continue
        psi = conj([not_phi_c, Not(phi_f)])
        witness = bounded_satisfiability(psi, width_bound, n_max, m_max, cache=cache)
        if witness is not None:
            rejected.append((family_weight(F), F, "non-member avoids F", witness))
            continue
        fam = ObstructionSet(tuple(F), name, "computed", graph_budget)
        return FamilySearchResult(fam, tested, rejected)
    raise BudgetExceeded(f"no family found among {tested} candidates within the family budget")
