"""Exact tree-width, decomposition checking, and tree-dec expansions."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .exceptions import BudgetExceeded
from .multigraph import MultiGraph, line_graph

#: Default vertex limit for :func:`treewidth_exact`.
TW_EXACT_MAX_N = 12


@dataclass(frozen=True)
class TreeDecomposition:
    """Tree on nodes ``0..size-1`` with one bag of host vertices per node."""

    bags: tuple[frozenset[int], ...]
    tree_edges: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "bags", tuple(frozenset(b) for b in self.bags))
        object.__setattr__(
            self, "tree_edges", tuple((min(s, t), max(s, t)) for s, t in self.tree_edges)
        )

    @property
    def size(self) -> int:
        return len(self.bags)

    @property
    def width(self) -> int:
        return max(len(b) for b in self.bags) - 1


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _popcount(mask: int) -> int:
    return bin(mask).count("1")


def _min_degree_lower_bound(adj: list[int], remaining: int) -> int:
    """Contraction degeneracy bound (repeatedly contract a min-degree vertex)."""
    g = {v: adj[v] & remaining for v in _bits(remaining)}
    best = 0
    while len(g) > 1:
        v = min(g, key=lambda x: (_popcount(g[x]), x))
        d = _popcount(g[v])
        best = max(best, d)
        nb = g[v]
        if not nb:
            del g[v]
            continue
        u = min(_bits(nb), key=lambda x: (_popcount(g[x] & ~nb), x))
        vbit = 1 << v
        merged = (g[u] | nb) & ~(vbit | (1 << u))
        del g[v]
        for w in _bits(nb):
            if w != u:
                g[w] = (g[w] & ~vbit) | (1 << u)
        g[u] = merged
    return best


def _elimination_width(adj: list[int], order: list[int]) -> int:
    cur = list(adj)
    width = 0
    remaining = (1 << len(adj)) - 1
    for v in order:
        nb = cur[v] & remaining & ~(1 << v)
        width = max(width, _popcount(nb))
        for u in _bits(nb):
            cur[u] |= nb & ~(1 << u)
        remaining &= ~(1 << v)
    return width


def _min_fill_order(adj: list[int]) -> list[int]:
    n = len(adj)
    cur = list(adj)
    remaining = (1 << n) - 1
    order = []
    while remaining:
        best, best_key = None, None
        for v in _bits(remaining):
            nb = cur[v] & remaining
            fill = sum(_popcount(nb & ~cur[u] & ~(1 << u)) for u in _bits(nb)) // 2
            key = (fill, _popcount(nb), v)
            if best_key is None or key < best_key:
                best, best_key = v, key
        nb = cur[best] & remaining
        for u in _bits(nb):
            cur[u] |= nb & ~(1 << u)
        remaining &= ~(1 << best)
        order.append(best)
    return order


def _decide(adj: list[int], k: int, max_states: int) -> list[int] | None:
    """Elimination order of width <= k, or None; exhaustive with safe reductions."""
    n = len(adj)
    failed: set[int] = set()
    states = [0]

    def rec(cur: list[int], remaining: int, order: list[int]) -> bool:
        if _popcount(remaining) <= k + 1:
            order.extend(_bits(remaining))
            return True
        if remaining in failed:
            return False
        states[0] += 1
        if states[0] > max_states:
            raise BudgetExceeded("tree-width search state budget exhausted")
        forced = None
        for v in _bits(remaining):
            nb = cur[v]
            deg = _popcount(nb)
            if deg > k:
                continue
            # simplicial, or almost simplicial with degree <= k: safe to eliminate
            missing = [u for u in _bits(nb) if (nb & ~(1 << u)) & ~cur[u]]
            if not missing:
                forced = v
                break
            for w in missing:
                rest = nb & ~(1 << w)
                if all(not (rest & ~(1 << u)) & ~cur[u] for u in _bits(rest)):
                    forced = v
                    break
            if forced is not None:
                break
        if forced is not None:
            candidates = [forced]
        else:
            if _min_degree_lower_bound(cur, remaining) > k:
                failed.add(remaining)
                return False
            candidates = [v for v in _bits(remaining) if _popcount(cur[v]) <= k]
        for v in candidates:
            nb = cur[v]
            nxt = list(cur)
            vbit = 1 << v
            for u in _bits(nb):
                nxt[u] = (nxt[u] | nb) & ~((1 << u) | vbit)
            nxt[v] = 0
            order.append(v)
            if rec(nxt, remaining & ~vbit, order):
                return True
            order.pop()
        failed.add(remaining)
        return False

    order: list[int] = []
    full = (1 << n) - 1
    if rec([a & full for a in adj], full, order):
        return order
    return None


def decomposition_from_order(n: int, adj: list[int], order: list[int]) -> TreeDecomposition:
    """Tree decomposition induced by an elimination order (one bag per vertex)."""
    pos = {v: i for i, v in enumerate(order)}
    cur = list(adj)
    remaining = (1 << n) - 1
    bags = []
    parents = []
    for v in order:
        nb = cur[v] & remaining & ~(1 << v)
        bags.append(frozenset([v, *_bits(nb)]))
        parents.append(min(_bits(nb), key=pos.__getitem__) if nb else None)
        for u in _bits(nb):
            cur[u] |= nb & ~(1 << u)
        remaining &= ~(1 << v)
    edges = []
    roots = []
    for i, p in enumerate(parents):
        if p is None:
            roots.append(i)
        else:
            edges.append((i, pos[p]))
    for a, b in zip(roots, roots[1:]):
        edges.append((a, b))
    return TreeDecomposition(tuple(bags), tuple(edges))


def treewidth_exact(
    G: MultiGraph, max_n: int = TW_EXACT_MAX_N, max_states: int = 2_000_000
) -> tuple[int, TreeDecomposition]:
    """Exact tree-width of the underlying simple graph with a witnessing decomposition.

    Decides ``tw <= k`` for increasing ``k`` from a contraction-degeneracy lower
    bound up to a min-fill upper bound, by exhaustive search over eliminated
    vertex sets with simplicial and almost-simplicial reductions.
    """
    n = G.n
    if n > max_n:
        raise BudgetExceeded(f"exact tree-width limited to {max_n} vertices, got {n}")
    adj = list(G.adjacency_masks)
    heuristic = _min_fill_order(adj)
    ub = _elimination_width(adj, heuristic)
    lb = _min_degree_lower_bound(adj, (1 << n) - 1)
    for k in range(lb, ub):
        order = _decide(adj, k, max_states)
        if order is not None:
            return k, decomposition_from_order(n, adj, order)
    return ub, decomposition_from_order(n, adj, heuristic)


def treewidth(G: MultiGraph, max_n: int = TW_EXACT_MAX_N) -> int:
    return treewidth_exact(G, max_n)[0]


def validate_decomposition(G: MultiGraph, td: TreeDecomposition) -> tuple[bool, list[str]]:
    """Check the tree shape and clauses (i) edge cover, (ii) connectivity, (iii) vertex cover."""
    problems: list[str] = []
    p = td.size
    if p == 0:
        return False, ["tree"]
    if any(not 0 <= s < p or not 0 <= t < p or s == t for s, t in td.tree_edges):
        return False, ["tree"]
    if len(set(td.tree_edges)) != p - 1 or not _tree_connected(p, td.tree_edges):
        problems.append("tree")
    if any(v < 0 or v >= G.n for b in td.bags for v in b):
        problems.append("bag range")
    for u, v in G.edges:
        if not any(u in b and v in b for b in td.bags):
            problems.append("(i)")
            break
    for v in range(G.n):
        nodes = [t for t in range(p) if v in td.bags[t]]
        if nodes:
            sub = [(s, t) for s, t in td.tree_edges if v in td.bags[s] and v in td.bags[t]]
            if not _tree_connected(len(nodes), _reindex(nodes, sub)):
                problems.append("(ii)")
                break
    covered = set().union(*td.bags)
    if not set(range(G.n)) <= covered:
        problems.append("(iii)")
    return not problems, problems


def _reindex(nodes, edges):
    pos = {t: i for i, t in enumerate(nodes)}
    return [(pos[s], pos[t]) for s, t in edges]


def _tree_connected(p: int, edges) -> bool:
    adj: list[list[int]] = [[] for _ in range(p)]
    for s, t in edges:
        adj[s].append(t)
        adj[t].append(s)
    seen = {0}
    stack = [0]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == p


def decomposition_from_line_graph(G: MultiGraph, td_line: TreeDecomposition) -> TreeDecomposition:
    """Replace every line-graph vertex (an edge of G) in each bag by its endpoints.

    Isolated vertices of ``G`` get singleton bags hung off node 0.
    """
    ok, problems = validate_decomposition(line_graph(G), td_line)
    if not ok:
        raise ValueError(f"invalid line-graph decomposition: {problems}")
    bags = [frozenset(v for e in bag for v in G.edges[e]) for bag in td_line.bags]
    edges = list(td_line.tree_edges)
    for v in G.isolated_vertices():
        edges.append((0, len(bags)))
        bags.append(frozenset([v]))
    return TreeDecomposition(tuple(bags), tuple(edges))


@dataclass(frozen=True)
class TreeDecExpansion:
    """Relational structure pairing a graph with one of its tree decompositions.

    Universe layout: vertices ``0..n-1``, graph edges ``n..n+m-1``, tree nodes
    next, tree edges last.
    """

    graph: MultiGraph
    decomposition: TreeDecomposition

    @property
    def n_vertices(self) -> int:
        return self.graph.n

    @property
    def n_edges(self) -> int:
        return self.graph.m

    @property
    def n_nodes(self) -> int:
        return self.decomposition.size

    @property
    def n_tree_edges(self) -> int:
        return len(self.decomposition.tree_edges)

    @property
    def universe_size(self) -> int:
        return self.n_vertices + self.n_edges + self.n_nodes + self.n_tree_edges

    def vertex(self, v: int) -> int:
        return v

    def edge(self, e: int) -> int:
        return self.n_vertices + e

    def node(self, t: int) -> int:
        return self.n_vertices + self.n_edges + t

    def tree_edge(self, j: int) -> int:
        return self.n_vertices + self.n_edges + self.n_nodes + j

    @cached_property
    def relations(self) -> dict[str, frozenset]:
        G, td = self.graph, self.decomposition
        rel = {
            "V": frozenset((self.vertex(v),) for v in range(G.n)),
            "E": frozenset((self.edge(e),) for e in range(G.m)),
            "I": frozenset(
                (self.vertex(x), self.edge(e)) for e, uv in enumerate(G.edges) for x in set(uv)
            ),
            "V_T": frozenset((self.node(t),) for t in range(td.size)),
            "E_T": frozenset((self.tree_edge(j),) for j in range(len(td.tree_edges))),
            "I_T": frozenset(
                (self.node(t), self.tree_edge(j))
                for j, st in enumerate(td.tree_edges)
                for t in st
            ),
            "B": frozenset(
                (self.node(t), self.vertex(v)) for t, bag in enumerate(td.bags) for v in bag
            ),
        }
        return rel

    def gaifman_graph(self) -> MultiGraph:
        pairs = set()
        for name, tuples in self.relations.items():
            for tup in tuples:
                for a in tup:
                    for b in tup:
                        if a < b:
                            pairs.add((a, b))
        return MultiGraph(self.universe_size, tuple(sorted(pairs)))


def build_tree_dec_expansion(G: MultiGraph, td: TreeDecomposition) -> TreeDecExpansion:
    ok, problems = validate_decomposition(G, td)
    if not ok:
        raise ValueError(f"invalid tree decomposition: {problems}")
    return TreeDecExpansion(G, td)


def expansion_gaifman_treewidth(X: TreeDecExpansion, max_n: int = 64) -> int:
    """Exact tree-width of the Gaifman graph of a tree-dec expansion."""
    return treewidth_exact(X.gaifman_graph(), max_n=max_n)[0]
