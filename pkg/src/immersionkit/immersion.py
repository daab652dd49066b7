"""Exact immersion, strong immersion and minor containment on small graphs."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Iterator

from .exceptions import BudgetExceeded
from .multigraph import MultiGraph, canonical_form, lift_results

#: Default limit on the host size for exact searches.
MAX_HOST_VERTICES = 12
#: Default hard cap on host edges for :func:`reduction_oracle`.
REDUCTION_ORACLE_MAX_EDGES = 8


@dataclass(frozen=True)
class ImmersionModel:
    """Branch map plus one edge-id path of the host per pattern edge."""

    branch: tuple[int, ...]
    paths: tuple[tuple[int, ...], ...]
    strong: bool = False

    def used_edges(self) -> frozenset[int]:
        return frozenset(e for p in self.paths for e in p)

    def used_vertices(self, G: MultiGraph) -> frozenset[int]:
        vs = set(self.branch)
        for p in self.paths:
            for e in p:
                vs.update(G.edges[e])
        return frozenset(vs)


@dataclass(frozen=True)
class MinorModel:
    branch_sets: tuple[frozenset[int], ...]
    witnesses: tuple[int, ...]  # host edge id per pattern edge


def _check_pattern(H: MultiGraph):
    if H.has_loops():
        raise ValueError("pattern graphs must be loopless")


def _simple_paths(G: MultiGraph, s: int, t: int, forbidden: frozenset[int] = frozenset()):
    """All simple s-t paths as (edge-id tuple, edge bitmask); loops never used."""
    out = []
    visited = {s}
    stack_edges: list[int] = []

    def dfs(v: int, mask: int):
        for e in G.incident(v):
            w = G.other_end(e, v)
            if w == v or w in visited:
                continue
            if w == t:
                out.append((tuple(stack_edges) + (e,), mask | (1 << e)))
                continue
            if w in forbidden:
                continue
            visited.add(w)
            stack_edges.append(e)
            dfs(w, mask | (1 << e))
            stack_edges.pop()
            visited.discard(w)

    dfs(s, 0)
    return out


class _PathTable:
    """Lazily computed s-t path lists for one host and one branch image set."""

    def __init__(self, G: MultiGraph, forbidden: frozenset[int] = frozenset()):
        self.G = G
        self.forbidden = forbidden
        self._cache: dict[tuple[int, int], list] = {}

    def get(self, s: int, t: int):
        key = (s, t)
        if key not in self._cache:
            if (t, s) in self._cache:
                self._cache[key] = [(p[::-1], mk) for p, mk in self._cache[(t, s)]]
            else:
                self._cache[key] = _simple_paths(self.G, s, t, self.forbidden - {s, t})
        return self._cache[key]


def _pack(H: MultiGraph, cands: list[list], budget: list[int]) -> Iterator[tuple]:
    """Backtracking edge-disjoint packing, fail-first on the tightest pattern edge."""
    m = H.m
    chosen: list = [None] * m

    def rec(remaining: list[int], used: int):
        if budget[0] <= 0:
            raise BudgetExceeded("immersion search node budget exhausted")
        budget[0] -= 1
        if not remaining:
            yield tuple(chosen)
            return
        best_i, best_opts = None, None
        for i in remaining:
            opts = [c for c in cands[i] if not c[1] & used]
            if not opts:
                return
            if best_opts is None or len(opts) < len(best_opts):
                best_i, best_opts = i, opts
        rest = [i for i in remaining if i != best_i]
        for path, mask in best_opts:
            chosen[best_i] = path
            yield from rec(rest, used | mask)
        chosen[best_i] = None

    yield from rec(list(range(m)), 0)


def _branch_maps(H: MultiGraph, G: MultiGraph) -> Iterator[tuple[int, ...]]:
    """Injective maps V(H)->V(G) in lexicographic order with degree pruning."""
    gdeg = [sum(1 for e in G.incident(v) if G.edges[e][0] != G.edges[e][1]) for v in range(G.n)]
    hdeg = H.degrees()
    img: list[int] = []
    used = [False] * G.n

    def rec(i: int):
        if i == H.n:
            yield tuple(img)
            return
        for g in range(G.n):
            if used[g] or gdeg[g] < hdeg[i]:
                continue
            used[g] = True
            img.append(g)
            yield from rec(i + 1)
            img.pop()
            used[g] = False

    yield from rec(0)


def iter_models(
    H: MultiGraph,
    G: MultiGraph,
    strong: bool = False,
    max_nodes: int = 10_000_000,
    max_host_vertices: int = MAX_HOST_VERTICES,
) -> Iterator[ImmersionModel]:
    """Every immersion model of ``H`` in ``G`` (maps in lexicographic order)."""
    _check_pattern(H)
    if G.n > max_host_vertices:
        raise BudgetExceeded(f"host has {G.n} vertices, exact limit is {max_host_vertices}")
    if H.n > G.n or H.m > G.m - sum(1 for u, v in G.edges if u == v):
        return
    budget = [max_nodes]
    table = None if strong else _PathTable(G)
    for f in _branch_maps(H, G):
        paths = table if table is not None else _PathTable(G, frozenset(f))
        cands = [paths.get(f[u], f[v]) for u, v in H.edges]
        if any(not c for c in cands):
            continue
        for packing in _pack(H, cands, budget):
            yield ImmersionModel(f, packing, strong)


def find_immersion(
    H: MultiGraph,
    G: MultiGraph,
    strong: bool = False,
    max_nodes: int = 10_000_000,
    max_host_vertices: int = MAX_HOST_VERTICES,
) -> ImmersionModel | None:
    """First immersion model of ``H`` in ``G`` or None; exact."""
    _check_pattern(H)
    if H.n > G.n or H.m > G.m:
        return None
    if H.m and max(H.degrees()) > G.max_degree():
        return None
    for model in iter_models(H, G, strong, max_nodes, max_host_vertices):
        return model
    return None


def immerses(H: MultiGraph, G: MultiGraph, strong: bool = False) -> bool:
    return find_immersion(H, G, strong) is not None


def verify_model(H: MultiGraph, G: MultiGraph, model: ImmersionModel) -> tuple[bool, str | None]:
    """Check every model invariant; returns ``(ok, first violated clause)``."""
    f = model.branch
    if len(f) != H.n:
        return False, "branch map size"
    if any(not 0 <= x < G.n for x in f):
        return False, "branch map range"
    if len(set(f)) != len(f):
        return False, "injectivity"
    if len(model.paths) != H.m:
        return False, "path count"
    seen: set[int] = set()
    image = set(f)
    for (u, v), path in zip(H.edges, model.paths):
        if not path:
            return False, "path endpoints"
        cur = f[u]
        visited = {cur}
        for e in path:
            if not 0 <= e < G.m:
                return False, "edge id range"
            a, b = G.edges[e]
            if cur not in (a, b) or a == b:
                return False, "path continuity"
            cur = b if a == cur else a
            if cur in visited:
                return False, "path simplicity"
            visited.add(cur)
        if cur != f[v]:
            return False, "path endpoints"
        if model.strong and (visited - {f[u], f[v]}) & image:
            return False, "strong internal disjointness"
        for e in path:
            if e in seen:
                return False, "edge-disjointness"
            seen.add(e)
    return True, None


def minimal_model(H: MultiGraph, G: MultiGraph, strong: bool = False) -> ImmersionModel:
    """Model minimising (|V|, |E|) of the path union, ties by canonical encoding."""
    best = None
    best_key = None
    for model in iter_models(H, G, strong):
        edges = model.used_edges()
        verts = model.used_vertices(G)
        head = (len(verts), len(edges))
        if best_key is not None and head > best_key[:2]:
            continue
        sub = G.edge_subgraph(edges).induced_subgraph(verts)
        key = head + (canonical_form(sub),)
        if best_key is None or key < best_key:
            best, best_key = model, key
    if best is None:
        raise ValueError("pattern does not immerse into host")
    return best


@dataclass(frozen=True)
class SubgraphResult:
    """A subgraph together with its embedding into the original host."""

    graph: MultiGraph
    vertex_map: tuple[int, ...]  # new vertex -> host vertex
    edge_map: tuple[int, ...]  # new edge id -> host edge id


def _greedy_minimal(G: MultiGraph, holds) -> SubgraphResult:
    keep = list(range(G.m))
    for e in range(G.m):
        trial = [x for x in keep if x != e]
        if holds(G.edge_subgraph(trial)):
            keep = trial
    sub = G.edge_subgraph(keep)
    vertices = list(range(G.n))
    for v in sub.isolated_vertices():
        trial = [x for x in vertices if x != v]
        if trial and holds(sub.induced_subgraph(trial)):
            vertices = trial
    final = sub.induced_subgraph(vertices)
    return SubgraphResult(final, tuple(vertices), tuple(keep))


def minimal_immersion_embedding(H: MultiGraph, G: MultiGraph) -> SubgraphResult:
    """Like :func:`minimal_immersion_subgraph` but also returns the embedding."""
    if not immerses(H, G):
        raise ValueError("pattern does not immerse into host")
    return _greedy_minimal(G, lambda S: immerses(H, S))


def minimal_immersion_subgraph(H: MultiGraph, G: MultiGraph) -> MultiGraph:
    """Edge-minimal subgraph of ``G`` still containing ``H`` as an immersion.

    Edges are deleted greedily in ascending id order, then isolated vertices
    that ``H`` does not need are removed.
    """
    return minimal_immersion_embedding(H, G).graph


def minimal_double_embedding(G1: MultiGraph, G2: MultiGraph, G: MultiGraph) -> SubgraphResult:
    if not (immerses(G1, G) and immerses(G2, G)):
        raise ValueError("both graphs must immerse into the host")
    return _greedy_minimal(G, lambda S: immerses(G1, S) and immerses(G2, S))


def minimal_double_subgraph(G1: MultiGraph, G2: MultiGraph, G: MultiGraph) -> MultiGraph:
    """Edge-minimal subgraph of ``G`` containing both ``G1`` and ``G2`` as immersions."""
    return minimal_double_embedding(G1, G2, G).graph


# -- minors -----------------------------------------------------------------


def _connected_subsets(G: MultiGraph) -> list[int]:
    adj = G.adjacency_masks
    out = []
    for mask in range(1, 1 << G.n):
        start = mask & -mask
        seen = start
        frontier = start
        while frontier:
            v = frontier.bit_length() - 1
            frontier &= frontier - 1
            new = adj[v] & mask & ~seen
            seen |= new
            frontier |= new
        if seen == mask:
            out.append(mask)
    out.sort(key=lambda s: (bin(s).count("1"), s))
    return out


def find_minor(
    H: MultiGraph,
    G: MultiGraph,
    max_nodes: int = 5_000_000,
    max_host_vertices: int = MAX_HOST_VERTICES,
) -> MinorModel | None:
    """Exact minor test returning disjoint connected branch sets and witnesses."""
    if not (H.is_simple() and G.is_simple()):
        raise ValueError("minor testing needs simple graphs")
    if G.n > max_host_vertices:
        raise BudgetExceeded(f"host has {G.n} vertices, exact limit is {max_host_vertices}")
    if H.n > G.n or H.m > G.m:
        return None
    subsets = _connected_subsets(G)
    adj = G.adjacency_masks
    nbr_of = {}
    for s in subsets:
        nb = 0
        x = s
        while x:
            v = x.bit_length() - 1
            x &= x - 1
            nb |= adj[v]
        nbr_of[s] = nb & ~s
    earlier = [[u for u in H.neighbors(h) if u < h] for h in range(H.n)]
    chosen: list[int] = []
    budget = [max_nodes]

    def rec(h: int, used: int, size: int) -> bool:
        if h == H.n:
            return True
        budget[0] -= 1
        if budget[0] <= 0:
            raise BudgetExceeded("minor search node budget exhausted")
        room = G.n - size - (H.n - h - 1)
        for s in subsets:
            c = bin(s).count("1")
            if c > room:
                break
            if s & used:
                continue
            if any(not nbr_of[s] & chosen[u] for u in earlier[h]):
                continue
            chosen.append(s)
            if rec(h + 1, used | s, size + c):
                return True
            chosen.pop()
        return False

    if not rec(0, 0, 0):
        return None
    sets = tuple(frozenset(v for v in range(G.n) if s >> v & 1) for s in chosen)
    witnesses = []
    for u, v in H.edges:
        for i, (a, b) in enumerate(G.edges):
            if (a in sets[u] and b in sets[v]) or (a in sets[v] and b in sets[u]):
                witnesses.append(i)
                break
    return MinorModel(sets, tuple(witnesses))


def verify_minor_model(H: MultiGraph, G: MultiGraph, model: MinorModel) -> tuple[bool, str | None]:
    sets = model.branch_sets
    if len(sets) != H.n:
        return False, "branch set count"
    for s in sets:
        if not s or any(not 0 <= v < G.n for v in s):
            return False, "branch set range"
        if not G.induced_subgraph(s).is_connected():
            return False, "connectivity"
    for a, b in combinations(sets, 2):
        if a & b:
            return False, "disjointness"
    if len(model.witnesses) != H.m:
        return False, "witness count"
    for (u, v), e in zip(H.edges, model.witnesses):
        if not 0 <= e < G.m:
            return False, "witness range"
        a, b = G.edges[e]
        if not ((a in sets[u] and b in sets[v]) or (a in sets[v] and b in sets[u])):
            return False, "witness edge"
    return True, None


# -- lift-based definition ---------------------------------------------------


def single_step_reductions(G: MultiGraph) -> Iterator[MultiGraph]:
    """Edge deletions, vertex deletions and lifts of ``G`` (one step each)."""
    for e in range(G.m):
        yield G.delete_edge(e)
    if G.n > 1:
        for v in range(G.n):
            yield G.delete_vertex(v)
    yield from lift_results(G)


@lru_cache(maxsize=256)
def _downset(G: MultiGraph, min_edges: int, min_vertices: int) -> frozenset:
    start = canonical_form(G)
    seen = {start}
    queue = deque([G])
    while queue:
        cur = queue.popleft()
        for nxt in single_step_reductions(cur):
            if nxt.m < min_edges or nxt.n < min_vertices:
                continue
            key = canonical_form(nxt)
            if key not in seen:
                seen.add(key)
                queue.append(nxt)
    return frozenset(seen)


def immersion_downset(G: MultiGraph, min_edges: int = 0, min_vertices: int = 1) -> frozenset:
    """Canonical forms of all graphs reachable from ``G`` by deletions and lifts.

    States with fewer than ``min_edges`` edges or ``min_vertices`` vertices are
    pruned, which is safe when only larger targets are of interest.
    """
    if G.m > REDUCTION_ORACLE_MAX_EDGES:
        raise BudgetExceeded(
            f"reduction search limited to {REDUCTION_ORACLE_MAX_EDGES} edges, got {G.m}"
        )
    return _downset(G, min_edges, min_vertices)


def reduction_oracle(H: MultiGraph, G: MultiGraph, max_edges: int = REDUCTION_ORACLE_MAX_EDGES) -> bool:
    """Breadth-first search over deletions and lifts from ``G`` looking for ``H``.

    Independent of :func:`find_immersion`; only for cross-validation on tiny
    instances.
    """
    if G.m > max_edges:
        raise BudgetExceeded(f"reduction oracle limited to {max_edges} edges, got {G.m}")
    target = canonical_form(H)
    start = canonical_form(G)
    if start == target:
        return True
    seen = {start}
    queue = deque([G])
    while queue:
        cur = queue.popleft()
        for nxt in single_step_reductions(cur):
            if nxt.m < H.m or nxt.n < H.n:
                continue
            key = canonical_form(nxt)
            if key == target:
                return True
            if key not in seen:
                seen.add(key)
                queue.append(nxt)
    return False
