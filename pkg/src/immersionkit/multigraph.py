"""Undirected multigraphs and the structural operations built on them.

Vertices are ``0..n-1``; edges are ordered records ``(u, v)`` with ``u <= v``
whose position in :attr:`MultiGraph.edges` is the edge id.  Parallel edges are
distinct records and a loop is ``(u, u)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable, Iterator, Sequence

from .exceptions import BudgetExceeded

#: Largest vertex count accepted by the exact canonical labeling.
CANONICAL_MAX_N = 10


@dataclass(frozen=True)
class MultiGraph:
    n: int
    edges: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("graphs must have at least one vertex")
        norm = []
        for e in self.edges:
            u, v = e
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge {e} has an endpoint outside 0..{self.n - 1}")
            norm.append((u, v) if u <= v else (v, u))
        object.__setattr__(self, "edges", tuple(norm))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "MultiGraph":
        return cls(n, tuple((int(u), int(v)) for u, v in edges))

    @property
    def m(self) -> int:
        return len(self.edges)

    def __repr__(self):
        return f"MultiGraph(n={self.n}, edges={list(self.edges)})"

    def has_loops(self) -> bool:
        return any(u == v for u, v in self.edges)

    def is_simple(self) -> bool:
        return not self.has_loops() and len(set(self.edges)) == len(self.edges)

    @cached_property
    def _degrees(self) -> tuple[int, ...]:
        deg = [0] * self.n
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return tuple(deg)

    def degree(self, v: int) -> int:
        """Degree counting multiplicities; a loop contributes 2."""
        return self._degrees[v]

    def degrees(self) -> tuple[int, ...]:
        return self._degrees

    def max_degree(self) -> int:
        return max(self._degrees)

    @cached_property
    def _incidence(self) -> tuple[tuple[int, ...], ...]:
        inc: list[list[int]] = [[] for _ in range(self.n)]
        for i, (u, v) in enumerate(self.edges):
            inc[u].append(i)
            if v != u:
                inc[v].append(i)
        return tuple(tuple(x) for x in inc)

    def incident(self, v: int) -> tuple[int, ...]:
        """Ids of edges incident with ``v`` (a loop is listed once)."""
        return self._incidence[v]

    def other_end(self, e: int, v: int) -> int:
        a, b = self.edges[e]
        if a == v:
            return b
        if b == v:
            return a
        raise ValueError(f"vertex {v} is not an endpoint of edge {e}")

    def neighbors(self, v: int) -> frozenset[int]:
        return frozenset(self.other_end(e, v) for e in self._incidence[v]) - {v}

    @cached_property
    def adjacency_masks(self) -> tuple[int, ...]:
        """Neighbourhood bitmasks of the underlying simple graph."""
        adj = [0] * self.n
        for u, v in self.edges:
            if u != v:
                adj[u] |= 1 << v
                adj[v] |= 1 << u
        return tuple(adj)

    @cached_property
    def multiplicity(self) -> tuple[tuple[int, ...], ...]:
        """Symmetric edge-count matrix; the diagonal holds loop counts."""
        mat = [[0] * self.n for _ in range(self.n)]
        for u, v in self.edges:
            mat[u][v] += 1
            if u != v:
                mat[v][u] += 1
        return tuple(tuple(row) for row in mat)

    def has_edge(self, u: int, v: int) -> bool:
        return self.multiplicity[u][v] > 0

    def simplify(self) -> "MultiGraph":
        """Drop loops and merge parallel edges (first occurrence order)."""
        seen = set()
        out = []
        for e in self.edges:
            if e[0] != e[1] and e not in seen:
                seen.add(e)
                out.append(e)
        return MultiGraph(self.n, tuple(out))

    def isolated_vertices(self) -> list[int]:
        return [v for v in range(self.n) if not self._incidence[v]]

    def components(self) -> list[list[int]]:
        seen = [False] * self.n
        comps = []
        for s in range(self.n):
            if seen[s]:
                continue
            seen[s] = True
            stack, comp = [s], []
            while stack:
                v = stack.pop()
                comp.append(v)
                for u in self.neighbors(v):
                    if not seen[u]:
                        seen[u] = True
                        stack.append(u)
            comps.append(sorted(comp))
        return comps

    def is_connected(self) -> bool:
        return len(self.components()) == 1

    # -- derived graphs -------------------------------------------------

    def add_edge(self, u: int, v: int) -> "MultiGraph":
        return MultiGraph(self.n, self.edges + ((u, v),))

    def delete_edges(self, ids: Iterable[int]) -> "MultiGraph":
        drop = set(ids)
        for e in drop:
            if not 0 <= e < self.m:
                raise ValueError(f"invalid edge id {e}")
        return MultiGraph(self.n, tuple(e for i, e in enumerate(self.edges) if i not in drop))

    def delete_edge(self, e: int) -> "MultiGraph":
        return self.delete_edges((e,))

    def delete_vertices(self, vertices: Iterable[int]) -> "MultiGraph":
        """Remove vertices and their edges, renumbering densely in order."""
        drop = set(vertices)
        keep = [v for v in range(self.n) if v not in drop]
        return self.induced_subgraph(keep)

    def delete_vertex(self, v: int) -> "MultiGraph":
        return self.delete_vertices((v,))

    def induced_subgraph(self, vertices: Iterable[int]) -> "MultiGraph":
        keep = sorted(set(vertices))
        if not keep:
            raise ValueError("cannot delete every vertex")
        pos = {v: i for i, v in enumerate(keep)}
        edges = tuple(
            (pos[u], pos[v]) for u, v in self.edges if u in pos and v in pos
        )
        return MultiGraph(len(keep), edges)

    def edge_subgraph(self, ids: Iterable[int], drop_isolated: bool = False) -> "MultiGraph":
        """Spanning subgraph keeping the given edge ids (in id order)."""
        keep = sorted(set(ids))
        g = MultiGraph(self.n, tuple(self.edges[i] for i in keep))
        if drop_isolated:
            iso = g.isolated_vertices()
            if len(iso) < g.n:
                g = g.delete_vertices(iso)
        return g

    def relabel(self, mapping: Sequence[int]) -> "MultiGraph":
        """Rename vertex ``v`` to ``mapping[v]``; ``mapping`` is a permutation."""
        if sorted(mapping) != list(range(self.n)):
            raise ValueError("mapping must be a permutation of the vertices")
        return MultiGraph(self.n, tuple((mapping[u], mapping[v]) for u, v in self.edges))

    # -- isomorphism ------------------------------------------------------

    @cached_property
    def _canonical(self) -> tuple[tuple, tuple[int, ...]]:
        return _canonical_labeling(self)

    def canonical_form(self) -> tuple:
        return canonical_form(self)


# -- named graphs ----------------------------------------------------------


def empty_graph(n: int) -> MultiGraph:
    return MultiGraph(n)


def complete_graph(n: int) -> MultiGraph:
    return MultiGraph(n, tuple(combinations(range(n), 2)))


def path_graph(n: int) -> MultiGraph:
    """Path on ``n`` vertices ``0-1-...-(n-1)``."""
    return MultiGraph(n, tuple((i, i + 1) for i in range(n - 1)))


def cycle_graph(n: int) -> MultiGraph:
    if n < 3:
        raise ValueError("a simple cycle needs at least 3 vertices")
    return MultiGraph(n, tuple((i, i + 1) for i in range(n - 1)) + ((0, n - 1),))


def star_graph(k: int) -> MultiGraph:
    """K_{1,k} with centre 0."""
    return MultiGraph(k + 1, tuple((0, i) for i in range(1, k + 1)))


def complete_bipartite(a: int, b: int) -> MultiGraph:
    return MultiGraph(a + b, tuple((i, a + j) for i in range(a) for j in range(b)))


def disjoint_union(*graphs: MultiGraph) -> MultiGraph:
    edges = []
    offset = 0
    for g in graphs:
        edges.extend((u + offset, v + offset) for u, v in g.edges)
        offset += g.n
    return MultiGraph(offset, tuple(edges))


# -- structural operations ------------------------------------------------


def lift(G: MultiGraph, e1: int, e2: int, via: int | None = None) -> MultiGraph:
    """Replace edges ``{x,y}`` and ``{x,z}`` by ``{y,z}``.

    ``via`` selects the shared endpoint ``x``.  When the two edges are
    parallel and ``via`` is omitted, the loop lands on the smaller endpoint.
    The new edge is appended after the surviving edges.
    """
    if not (0 <= e1 < G.m and 0 <= e2 < G.m):
        raise ValueError("invalid edge id")
    if e1 == e2:
        raise ValueError("cannot lift an edge with itself")
    a, b = G.edges[e1], G.edges[e2]
    shared = set(a) & set(b)
    if not shared:
        raise ValueError(f"edges {e1} and {e2} share no endpoint")
    if via is None:
        via = max(shared)
    elif via not in shared:
        raise ValueError(f"vertex {via} is not shared by edges {e1} and {e2}")
    y = a[1] if a[0] == via else a[0]
    z = b[1] if b[0] == via else b[0]
    rest = tuple(e for i, e in enumerate(G.edges) if i != e1 and i != e2)
    return MultiGraph(G.n, rest + ((y, z),))


def lift_results(G: MultiGraph) -> Iterator[MultiGraph]:
    """Every graph reachable from ``G`` by one lift (all pivot choices)."""
    for v in range(G.n):
        inc = G.incident(v)
        for i, j in combinations(inc, 2):
            yield lift(G, i, j, via=v)


def contract(G: MultiGraph, e: int) -> MultiGraph:
    """Simple-graph contraction of edge ``e``.

    The merged vertex keeps the smaller id; parallels and loops created by the
    contraction are discarded.
    """
    if not 0 <= e < G.m:
        raise ValueError(f"invalid edge id {e}")
    x, y = G.edges[e]
    if x == y:
        raise ValueError("cannot contract a loop")
    keep = [v for v in range(G.n) if v != y]
    pos = {v: i for i, v in enumerate(keep)}
    pos[y] = pos[x]
    seen = set()
    out = []
    for u, v in G.edges:
        a, b = pos[u], pos[v]
        if a == b:
            continue
        key = (min(a, b), max(a, b))
        if key not in seen:
            seen.add(key)
            out.append(key)
    return MultiGraph(len(keep), tuple(out))


def line_graph(G: MultiGraph) -> MultiGraph:
    """Vertex ``i`` of the result is edge ``i`` of ``G``."""
    if G.has_loops():
        raise ValueError("line graph of a graph with loops is not supported")
    if G.m == 0:
        raise ValueError("line graph of an edgeless graph is empty")
    out = []
    for i, j in combinations(range(G.m), 2):
        if set(G.edges[i]) & set(G.edges[j]):
            out.append((i, j))
    return MultiGraph(G.m, tuple(out))


def lex_product(G: MultiGraph, H: MultiGraph) -> MultiGraph:
    """Lexicographic product; vertex ``(x, y)`` is encoded as ``x*H.n + y``."""
    if not (G.is_simple() and H.is_simple()):
        raise ValueError("lexicographic product needs simple factors")
    k = H.n
    out = []
    for a, b in combinations(range(G.n * k), 2):
        x, y = divmod(a, k)
        x2, y2 = divmod(b, k)
        if G.has_edge(x, x2) or (x == x2 and H.has_edge(y, y2)):
            out.append((a, b))
    return MultiGraph(G.n * k, tuple(out))


# -- canonical labeling ---------------------------------------------------


def _refine(colors: list[int], nbrs: list[list[tuple[int, int]]]) -> list[int]:
    ncol = len(set(colors))
    while True:
        sigs = [
            (colors[v], tuple(sorted((colors[u], mu) for u, mu in nbrs[v])))
            for v in range(len(colors))
        ]
        uniq = sorted(set(sigs))
        rank = {s: i for i, s in enumerate(uniq)}
        colors = [rank[s] for s in sigs]
        if len(uniq) == ncol:
            return colors
        ncol = len(uniq)


def _twins(A, u: int, w: int) -> bool:
    if A[u][u] != A[w][w]:
        return False
    ru, rw = A[u], A[w]
    return all(ru[x] == rw[x] for x in range(len(ru)) if x != u and x != w)


def _canonical_labeling(G: MultiGraph, max_n: int | None = None) -> tuple[tuple, tuple[int, ...]]:
    n = G.n
    cap = CANONICAL_MAX_N if max_n is None else max_n
    if n > cap:
        raise BudgetExceeded(f"canonical labeling limited to {cap} vertices, got {n}")
    A = G.multiplicity
    nbrs = [[(u, A[v][u]) for u in range(n) if u != v and A[v][u]] for v in range(n)]
    init = [(A[v][v], G.degree(v)) for v in range(n)]
    uniq = sorted(set(init))
    colors = _refine([uniq.index(c) for c in init], nbrs)
    best: list = [None, None]

    def rec(order: list[int], colors: list[int], prefix: list[int]):
        k = len(order)
        if k == n:
            if best[0] is None or prefix < best[0]:
                best[0], best[1] = prefix, tuple(order)
            return
        c = min(colors[v] for v in range(n) if colors[v] >= k)
        cell = [v for v in range(n) if colors[v] == c]
        tried: list[int] = []
        for v in cell:
            if any(_twins(A, v, u) for u in tried):
                continue
            tried.append(v)
            new_prefix = prefix + [A[order[i]][v] for i in range(k)] + [A[v][v]]
            if best[0] is not None and new_prefix > best[0][: len(new_prefix)]:
                continue
            shifted = [
                colors[u] if colors[u] < k else (k if u == v else colors[u] + 1)
                for u in range(n)
            ]
            rec(order + [v], _refine(shifted, nbrs), new_prefix)

    rec([], colors, [])
    return (n, tuple(best[0])), best[1]


def canonical_form(G: MultiGraph) -> tuple:
    """Isomorphism-invariant encoding respecting multiplicities and loops.

    Two graphs have equal canonical forms exactly when they are isomorphic.
    Raises :class:`BudgetExceeded` above :data:`CANONICAL_MAX_N` vertices.
    """
    return G._canonical[0]


def canonical_order(G: MultiGraph) -> tuple[int, ...]:
    """``order[i]`` is the vertex placed at canonical position ``i``."""
    return G._canonical[1]


def canonical_graph(G: MultiGraph) -> MultiGraph:
    order = canonical_order(G)
    mapping = [0] * G.n
    for i, v in enumerate(order):
        mapping[v] = i
    return MultiGraph(G.n, tuple(sorted(G.relabel(mapping).edges)))


def is_isomorphic(G: MultiGraph, H: MultiGraph) -> dict[int, int] | None:
    """Return a vertex bijection ``G -> H`` preserving edge multiplicities, or None."""
    if G.n != H.n or G.m != H.m or sorted(G.degrees()) != sorted(H.degrees()):
        return None
    if canonical_form(G) != canonical_form(H):
        return None
    og, oh = canonical_order(G), canonical_order(H)
    return {og[i]: oh[i] for i in range(G.n)}


# -- enumeration ------------------------------------------------------------


def enumerate_graphs(
    n_max: int,
    m_max: int,
    simple: bool = True,
    loops: bool = True,
    n_min: int = 1,
) -> Iterator[MultiGraph]:
    """Yield one canonical representative per isomorphism class.

    Order is by vertex count, then edge count, then canonical form.  With
    ``simple=False`` parallel edges are allowed, and loops too unless
    ``loops=False``.
    """
    if n_max > CANONICAL_MAX_N:
        raise BudgetExceeded(f"enumeration limited to {CANONICAL_MAX_N} vertices")
    if m_max < 0:
        return
    for n in range(max(1, n_min), n_max + 1):
        if simple or not loops:
            slots = list(combinations(range(n), 2))
        else:
            slots = [(u, v) for u in range(n) for v in range(u, n)]
        level = [MultiGraph(n)]
        for m in range(m_max + 1):
            level.sort(key=canonical_form)
            yield from level
            if m == m_max:
                break
            nxt: dict[tuple, MultiGraph] = {}
            for g in level:
                present = set(g.edges)
                for s in slots:
                    if simple and s in present:
                        continue
                    h = canonical_graph(g.add_edge(*s))
                    nxt.setdefault(canonical_form(h), h)
            level = list(nxt.values())
            if not level:
                break
