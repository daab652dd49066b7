"""Approximate linkages and edge-linkages, uniqueness, and the doubling constructions."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterator, Sequence

from .exceptions import BudgetExceeded
from .immersion import MinorModel, find_immersion, find_minor, verify_minor_model
from .multigraph import MultiGraph, line_graph
from .treewidth import treewidth

#: Default host-size cap for exhaustive uniqueness/vitality checks.
UNIQUENESS_MAX_N = 9


@dataclass(frozen=True)
class Linkage:
    """k paths given as vertex sequences, ``paths[i]`` running sources[i] -> targets[i]."""

    graph: MultiGraph
    sources: tuple[int, ...]
    targets: tuple[int, ...]
    paths: tuple[tuple[int, ...], ...]
    r: int = 1

    @property
    def k(self) -> int:
        return len(self.paths)

    def vertices(self) -> frozenset[int]:
        return frozenset(v for p in self.paths for v in p)

    def has_distinct_endpoints(self) -> bool:
        ends = self.sources + self.targets
        return len(set(ends)) == len(ends)


@dataclass(frozen=True)
class EdgeLinkage:
    """k paths given as edge-id sequences; endpoints may repeat across paths."""

    graph: MultiGraph
    sources: tuple[int, ...]
    targets: tuple[int, ...]
    paths: tuple[tuple[int, ...], ...]
    r: int = 1

    @property
    def k(self) -> int:
        return len(self.paths)

    def edges(self) -> frozenset[int]:
        return frozenset(e for p in self.paths for e in p)

    def vertex_paths(self) -> tuple[tuple[int, ...], ...]:
        out = []
        for s, path in zip(self.sources, self.paths):
            seq = [s]
            for e in path:
                seq.append(self.graph.other_end(e, seq[-1]))
            out.append(tuple(seq))
        return tuple(out)


def validate_linkage(L: Linkage) -> tuple[bool, str | None]:
    G = L.graph
    if L.r < 1:
        return False, "approximation parameter"
    if not (len(L.sources) == len(L.targets) == len(L.paths)):
        return False, "order"
    count: Counter = Counter()
    for a, b, path in zip(L.sources, L.targets, L.paths):
        if not path or path[0] != a or path[-1] != b:
            return False, "path endpoints"
        if a == b:
            return False, "distinct endpoints"
        if any(not 0 <= v < G.n for v in path):
            return False, "vertex range"
        if len(set(path)) != len(path):
            return False, "path simplicity"
        if any(not G.has_edge(x, y) for x, y in zip(path, path[1:])):
            return False, "path adjacency"
        count.update(path)
    if count and max(count.values()) > L.r:
        return False, f"{L.r + 1}-wise vertex intersection"
    return True, None


def validate_edge_linkage(E: EdgeLinkage) -> tuple[bool, str | None]:
    G = E.graph
    if E.r < 1:
        return False, "approximation parameter"
    if not (len(E.sources) == len(E.targets) == len(E.paths)):
        return False, "order"
    count: Counter = Counter()
    for a, b, path in zip(E.sources, E.targets, E.paths):
        cur = a
        seen = {a}
        for e in path:
            if not 0 <= e < G.m:
                return False, "edge id range"
            x, y = G.edges[e]
            if cur not in (x, y) or x == y:
                return False, "path continuity"
            cur = y if x == cur else x
            if cur in seen:
                return False, "path simplicity"
            seen.add(cur)
        if cur != b:
            return False, "path endpoints"
        count.update(path)
    if count and max(count.values()) > E.r:
        return False, f"{E.r + 1}-wise edge intersection"
    return True, None


def _vertex_paths(G: MultiGraph, s: int, t: int, allowed: int) -> list[tuple[tuple[int, ...], int]]:
    """Simple s-t vertex paths inside the ``allowed`` mask, with their masks."""
    adj = G.adjacency_masks
    out = []
    seq = [s]

    def dfs(v: int, mask: int):
        nb = adj[v] & allowed & ~mask
        while nb:
            low = nb & -nb
            w = low.bit_length() - 1
            nb ^= low
            seq.append(w)
            if w == t:
                out.append((tuple(seq), mask | low))
            else:
                dfs(w, mask | low)
            seq.pop()

    if s == t:
        return []
    dfs(s, 1 << s)
    return out


def iter_linkages(
    G: MultiGraph,
    sources: Sequence[int],
    targets: Sequence[int],
    r: int = 1,
    allowed: frozenset[int] | None = None,
    max_n: int = UNIQUENESS_MAX_N,
) -> Iterator[Linkage]:
    """All r-approximate linkages with the given ordered endpoints.

    Components are pairwise distinct paths; this only matters when an
    endpoint pair repeats.
    """
    if G.n > max_n:
        raise BudgetExceeded(f"linkage enumeration limited to {max_n} vertices, got {G.n}")
    sources, targets = tuple(sources), tuple(targets)
    mask = (1 << G.n) - 1 if allowed is None else sum(1 << v for v in allowed)
    cands = [_vertex_paths(G, a, b, mask) for a, b in zip(sources, targets)]
    if any(not c for c in cands):
        return
    k = len(cands)
    count = [0] * G.n
    chosen: list = [None] * k

    def rec(i: int):
        if i == k:
            yield Linkage(G, sources, targets, tuple(chosen), r)
            return
        for path, _ in cands[i]:
            if any(count[v] >= r for v in path) or path in chosen[:i]:
                continue
            for v in path:
                count[v] += 1
            chosen[i] = path
            yield from rec(i + 1)
            for v in path:
                count[v] -= 1

    yield from rec(0)


def find_linkage(G: MultiGraph, sources, targets, r: int = 1, **kw) -> Linkage | None:
    for L in iter_linkages(G, sources, targets, r, **kw):
        return L
    return None


def is_unique_linkage(L: Linkage, max_n: int = UNIQUENESS_MAX_N) -> bool:
    """True iff every equivalent r-approximate linkage uses the same vertex set."""
    target = L.vertices()
    return all(
        other.vertices() == target
        for other in iter_linkages(L.graph, L.sources, L.targets, L.r, max_n=max_n)
    )


def is_vital_linkage(L: Linkage, max_n: int = UNIQUENESS_MAX_N) -> bool:
    """True iff no different equivalent linkage exists."""
    return all(
        other.paths == L.paths
        for other in iter_linkages(L.graph, L.sources, L.targets, L.r, max_n=max_n)
    )


# -- doubling construction -------------------------------------------------


@dataclass(frozen=True)
class DoubledGraph:
    """The host with non-terminals replaced by ``r`` adjacent twin copies.

    ``origin[i] = (v, c)``: vertex ``i`` is copy ``c`` of ``v``; terminals have
    ``c = 0``, copies are numbered ``1..r``.
    """

    graph: MultiGraph
    origin: tuple[tuple[int, int], ...]
    sources: tuple[int, ...]
    targets: tuple[int, ...]

    def index(self, v: int, copy: int = 0) -> int:
        return self.origin.index((v, copy))


def build_Gb(G: MultiGraph, sources: Sequence[int], targets: Sequence[int], r: int = 2) -> DoubledGraph:
    """(G - T) x K_r plus the terminals T, each joined to every copy of its neighbours."""
    if not G.is_simple():
        raise ValueError("the doubling construction needs a simple graph")
    if len(sources) != len(targets):
        raise ValueError("endpoint tuples differ in length")
    ends = list(sources) + list(targets)
    if any(not 0 <= v < G.n for v in ends):
        raise ValueError("endpoint outside the graph")
    if len(set(ends)) != len(ends):
        raise ValueError("endpoints must be pairwise distinct")
    if r < 1:
        raise ValueError("r must be positive")
    T = set(ends)
    origin: list[tuple[int, int]] = []
    for v in range(G.n):
        if v in T:
            origin.append((v, 0))
        else:
            origin.extend((v, c) for c in range(1, r + 1))
    pos = {o: i for i, o in enumerate(origin)}

    def copies(v):
        return [pos[(v, 0)]] if v in T else [pos[(v, c)] for c in range(1, r + 1)]

    edges = set()
    for a, b in G.edges:
        for x in copies(a):
            for y in copies(b):
                edges.add((min(x, y), max(x, y)))
    for v in range(G.n):
        if v not in T:
            edges.update(combinations(copies(v), 2))
    graph = MultiGraph(len(origin), tuple(sorted(edges)))
    return DoubledGraph(
        graph,
        tuple(origin),
        tuple(pos[(v, 0)] for v in sources),
        tuple(pos[(v, 0)] for v in targets),
    )


def build_Ghat(
    Gp: MultiGraph, sources: Sequence[int], targets: Sequence[int]
) -> tuple[MultiGraph, tuple[int, ...], tuple[int, ...]]:
    """Attach a fresh pendant edge at every source and every target.

    Returns the new graph and the pendant edge ids at sources and targets;
    these are vertices of the line graph.  Source pendants come first.
    """
    if len(sources) != len(targets):
        raise ValueError("endpoint tuples differ in length")
    if any(not 0 <= v < Gp.n for v in list(sources) + list(targets)):
        raise ValueError("endpoint outside the graph")
    k = len(sources)
    n, m = Gp.n, Gp.m
    pend = tuple((v, n + q) for q, v in enumerate(sources)) + tuple(
        (v, n + k + q) for q, v in enumerate(targets)
    )
    Ghat = MultiGraph(n + 2 * k, Gp.edges + pend)
    return Ghat, tuple(range(m, m + k)), tuple(range(m + k, m + 2 * k))


def edge_linkage_to_line_linkage(
    Ghat: MultiGraph, E: EdgeLinkage, A_L: Sequence[int], B_L: Sequence[int]
) -> Linkage:
    """Map each edge path ``v, e1..es, w`` to the line-graph path ``t_v, e1..es, t_w``."""
    Gp = E.graph
    if Ghat.edges[: Gp.m] != Gp.edges:
        raise ValueError("Ghat does not extend the edge-linkage host")
    if not (len(A_L) == len(B_L) == E.k):
        raise ValueError("pendant tuples do not match the linkage order")
    for q in range(E.k):
        if E.sources[q] not in Ghat.edges[A_L[q]] or E.targets[q] not in Ghat.edges[B_L[q]]:
            raise ValueError(f"pendant edges do not meet the endpoints of component {q}")
    ok, why = validate_edge_linkage(E)
    if not ok:
        raise ValueError(f"invalid edge-linkage: {why}")
    LG = line_graph(Ghat)
    paths = tuple((A_L[q],) + tuple(E.paths[q]) + (B_L[q],) for q in range(E.k))
    return Linkage(LG, tuple(A_L), tuple(B_L), paths, E.r)


def witnessing_edge_linkage(G1: MultiGraph, G2: MultiGraph, Gp: MultiGraph) -> EdgeLinkage:
    """Edge-linkage formed by one immersion model of each of G1 and G2 in ``Gp``.

    Every host edge lies on at most one path per model, so the result is
    2-approximate. Its components follow the edges of G1, then those of G2.
    """
    sources, targets, paths = [], [], []
    for H in (G1, G2):
        model = find_immersion(H, Gp)
        if model is None:
            raise ValueError("pattern does not immerse into the host")
        for (u, v), path in zip(H.edges, model.paths):
            sources.append(model.branch[u])
            targets.append(model.branch[v])
            paths.append(tuple(path))
    return EdgeLinkage(Gp, tuple(sources), tuple(targets), tuple(paths), 2)


# -- verification harness ---------------------------------------------------


@dataclass
class DoublingReport:
    graph: MultiGraph
    sources: tuple[int, ...]
    targets: tuple[int, ...]
    r: int
    gb_vertices: int = 0
    gb_linkage_found: bool = False
    minimal_origin: tuple[tuple[int, int], ...] = ()
    linkages_checked: int = 0
    copies_apart: bool = False
    copies_covered: bool = False
    minor_recovered: bool = False
    tw_graph: int | None = None
    tw_minimal: int | None = None
    # some terminal is an inner vertex of another component of the input linkage
    terminal_inside: bool = False
    falsifications: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.falsifications


def lemma5_harness(G: MultiGraph, L: Linkage, max_n: int = 12) -> DoublingReport:
    """Run the doubling argument on a unique approximate linkage spanning ``G``.

    Every failed step is recorded in ``falsifications``; nothing is skipped
    silently.
    """
    ok, why = validate_linkage(L)
    if not ok:
        raise ValueError(f"invalid linkage: {why}")
    if L.graph != G:
        raise ValueError("linkage lives in a different graph")
    if L.vertices() != frozenset(range(G.n)):
        raise ValueError("linkage must cover every vertex")
    if not L.has_distinct_endpoints():
        raise ValueError("endpoints must be pairwise distinct")
    if not is_unique_linkage(L):
        raise ValueError("linkage is not unique")
    report = DoublingReport(G, L.sources, L.targets, L.r)
    ends = set(L.sources) | set(L.targets)
    report.terminal_inside = any(v in ends for P in L.paths for v in P[1:-1])
    report.tw_graph = treewidth(G)
    gb = build_Gb(G, L.sources, L.targets, L.r)
    H = gb.graph
    report.gb_vertices = H.n
    terminals = set(gb.sources) | set(gb.targets)
    keep = list(range(H.n))
    if find_linkage(H, gb.sources, gb.targets, 1, max_n=max_n) is None:
        report.falsifications.append("doubled graph has no linkage of the same order")
        return report
    report.gb_linkage_found = True
    for v in range(H.n):
        if v in terminals:
            continue
        trial = [x for x in keep if x != v]
        if find_linkage(H, gb.sources, gb.targets, 1, allowed=frozenset(trial), max_n=max_n):
            keep = trial
    pos = {v: i for i, v in enumerate(keep)}
    sub = H.induced_subgraph(keep)
    origin = tuple(gb.origin[v] for v in keep)
    report.minimal_origin = origin
    src = tuple(pos[v] for v in gb.sources)
    tgt = tuple(pos[v] for v in gb.targets)
    non_terminal = [v for v in range(G.n) if v not in set(L.sources) | set(L.targets)]
    copies_apart = copies_covered = True
    for Lp in iter_linkages(sub, src, tgt, 1, max_n=max_n):
        report.linkages_checked += 1
        for path in Lp.paths:
            seen = [origin[x][0] for x in path if origin[x][1] > 0]
            if len(seen) != len(set(seen)):
                copies_apart = False
        used = {origin[x][0] for x in Lp.vertices()}
        if any(v not in used for v in non_terminal):
            copies_covered = False
    report.copies_apart, report.copies_covered = copies_apart, copies_covered
    if not copies_apart:
        report.falsifications.append("a path of a minimal linkage uses two copies of one vertex")
    if not copies_covered:
        report.falsifications.append("a minimal linkage misses both copies of some vertex")
    # contract twin copies: branch set of v is the set of its surviving copies
    branch = [frozenset(i for i, o in enumerate(origin) if o[0] == v) for v in range(G.n)]
    recovered = False
    if all(branch):
        witnesses = []
        for a, b in G.edges:
            w = next(
                (i for i, (x, y) in enumerate(sub.edges)
                 if (x in branch[a] and y in branch[b]) or (x in branch[b] and y in branch[a])),
                None,
            )
            witnesses.append(w)
        if None not in witnesses:
            recovered = verify_minor_model(G, sub, MinorModel(tuple(branch), tuple(witnesses)))[0]
        contracted = _project(sub, origin, G.n)
        recovered = recovered and find_minor(G, contracted) is not None
    report.minor_recovered = recovered
    if not recovered:
        report.falsifications.append("original graph not recovered as a minor")
    report.tw_minimal = treewidth(sub, max_n=max(sub.n, 12))
    return report


def _project(sub: MultiGraph, origin, n: int) -> MultiGraph:
    edges = set()
    for x, y in sub.edges:
        a, b = origin[x][0], origin[y][0]
        if a != b:
            edges.add((min(a, b), max(a, b)))
    return MultiGraph(n, tuple(sorted(edges)))
