"""Exhaustive verification suites and the independent oracles they compare against.

Each ``criterion_*`` function runs one sweep and returns a
:class:`CriterionResult`. The oracles here deliberately avoid the package's
own search code: they use networkx (graph atlas, isomorphism) or plain
brute force.
"""

from __future__ import annotations

import random
import time
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations, permutations

import networkx as nx

from .immersion import find_immersion, minimal_double_embedding, reduction_oracle
from .linkage import (
    build_Ghat,
    edge_linkage_to_line_linkage,
    iter_linkages,
    lemma5_harness,
    validate_edge_linkage,
    validate_linkage,
    witnessing_edge_linkage,
)
from .mso import Not, Structure, build_phi_H, evaluate
from .multigraph import MultiGraph, enumerate_graphs, line_graph
from .obstructions import (
    ObstructionSet,
    UnionClass,
    at_most_edges,
    characterization_violations,
    compute_obstructions,
    compute_union_obstructions,
    is_obstruction,
    lemma4_search,
    max_degree_at_most,
    no_edges,
)
from .treewidth import (
    TreeDecExpansion,
    decomposition_from_line_graph,
    expansion_gaifman_treewidth,
    treewidth_exact,
    validate_decomposition,
)

MAX_REPORTED_FAILURES = 10


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    checked: int
    failures: list = field(default_factory=list)
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = "".join(f" {k}={v}" for k, v in self.details.items())
        return (
            f"criterion {self.number} [{status}] {self.title}: checked={self.checked} "
            f"failures={self.details.get('failure_count', len(self.failures))}{extra}"
        )

    def as_record(self, timing: bool = False) -> dict:
        rec = {
            "criterion": self.number,
            "title": self.title,
            "passed": self.passed,
            "checked": self.checked,
            "failures": [str(f) for f in self.failures[:MAX_REPORTED_FAILURES]],
            "details": self.details,
        }
        if timing:
            rec["seconds"] = round(self.seconds, 3)
        return rec


def _finish(res: CriterionResult, start: float) -> CriterionResult:
    res.seconds = time.perf_counter() - start
    return res


def _describe(G: MultiGraph) -> str:
    return f"n={G.n} edges={list(G.edges)}"


# -- independent oracles -------------------------------------------------------


def to_networkx(G: MultiGraph) -> nx.MultiGraph:
    g = nx.MultiGraph()
    g.add_nodes_from(range(G.n))
    g.add_edges_from(G.edges)
    return g


def atlas_graphs(n_max: int, m_max: int) -> list[nx.Graph]:
    """Every simple graph with 1..n_max vertices (n_max <= 7) and <= m_max edges."""
    if n_max > 7:
        raise ValueError("the graph atlas stops at 7 vertices")
    return [
        g for g in nx.graph_atlas_g()
        if 1 <= g.number_of_nodes() <= n_max and g.number_of_edges() <= m_max
    ]


def brute_force_treewidth(G: MultiGraph) -> int:
    """Minimum over all elimination orders of the largest eliminated neighbourhood."""
    g = nx.Graph()
    g.add_nodes_from(range(G.n))
    g.add_edges_from((u, v) for u, v in G.edges if u != v)
    best = G.n - 1
    for order in permutations(range(G.n)):
        h = g.copy()
        width = 0
        for v in order:
            nbrs = list(h.neighbors(v))
            width = max(width, len(nbrs))
            if width >= best:
                break
            h.add_edges_from(combinations(nbrs, 2))
            h.remove_node(v)
        best = min(best, width)
    return best


def _nx_reductions(g: nx.MultiGraph):
    """Edge deletions, vertex deletions and lifts, written against networkx."""
    for key in list(g.edges(keys=True)):
        h = g.copy()
        h.remove_edge(*key)
        yield h
    if g.number_of_nodes() > 1:
        for v in list(g.nodes()):
            h = g.copy()
            h.remove_node(v)
            yield h
    edges = list(g.edges(keys=True))
    for i, j in combinations(range(len(edges)), 2):
        (a, b, ka), (c, d, kc) = edges[i], edges[j]
        for x in {a, b} & {c, d}:
            y = b if a == x else a
            z = d if c == x else c
            h = g.copy()
            h.remove_edge(a, b, ka)
            h.remove_edge(c, d, kc)
            h.add_edge(y, z)
            yield h


def _nx_max_degree(g: nx.MultiGraph) -> int:
    return max((d for _, d in g.degree()), default=0)


def oracle_union_obstructions(pred1, pred2, n_max: int, m_max: int) -> list[nx.Graph]:
    """Atlas enumeration plus one-step minimality, membership by predicate."""
    def inside(g):
        return pred1(g) or pred2(g)

    out = []
    for g in atlas_graphs(n_max, m_max):
        mg = nx.MultiGraph(g)
        if inside(mg):
            continue
        if all(inside(h) for h in _nx_reductions(mg)):
            out.append(g)
    return out


def same_graph_sets(ours: list[MultiGraph], theirs: list[nx.Graph]) -> bool:
    if len(ours) != len(theirs):
        return False
    left = [to_networkx(G) for G in ours]
    used = [False] * len(theirs)
    for g in left:
        for i, h in enumerate(theirs):
            if not used[i] and nx.is_isomorphic(g, nx.MultiGraph(h)):
                used[i] = True
                break
        else:
            return False
    return True


# -- shared sweep domains --------------------------------------------------------


def patterns_up_to_three_edges() -> list[MultiGraph]:
    """Loopless multigraph patterns with at most 3 edges and at most 6 vertices."""
    return list(enumerate_graphs(6, 3, simple=False, loops=False))


def hosts(n_max: int, m_max: int) -> list[MultiGraph]:
    return list(enumerate_graphs(n_max, m_max, simple=True))


# -- the criteria ----------------------------------------------------------------


def criterion_1() -> CriterionResult:
    start = time.perf_counter()
    res = CriterionResult(1, "immersion search agrees with the lift/delete oracle", True, 0)
    for G in hosts(5, 7):
        for H in patterns_up_to_three_edges():
            res.checked += 1
            a = find_immersion(H, G) is not None
            b = reduction_oracle(H, G)
            if a != b:
                res.failures.append(f"H {_describe(H)} G {_describe(G)}: search={a} oracle={b}")
    res.passed = not res.failures
    return _finish(res, start)


def criterion_2() -> CriterionResult:
    start = time.perf_counter()
    res = CriterionResult(2, "pattern formula agrees with immersion search", True, 0)
    Hs = patterns_up_to_three_edges()
    phis = [build_phi_H(H) for H in Hs]
    for G in hosts(5, 7):
        S = Structure(G)
        for H, phi in zip(Hs, phis):
            res.checked += 1
            a = evaluate(S, phi)
            b = find_immersion(H, G) is not None
            if a != b:
                res.failures.append(f"H {_describe(H)} G {_describe(G)}: formula={a} search={b}")
    res.passed = not res.failures
    return _finish(res, start)


def criterion_3() -> CriterionResult:
    start = time.perf_counter()
    res = CriterionResult(3, "line-graph width transfer tw(G) <= 2 tw(L(G)) + 1", True, 0)
    worst = 0
    for G in hosts(7, 21):
        if G.n < 2 or not G.is_connected():
            continue
        res.checked += 1
        tw_g = treewidth_exact(G)[0]
        LG = line_graph(G)
        k, td_line = treewidth_exact(LG, max_n=max(LG.n, 12))
        td = decomposition_from_line_graph(G, td_line)
        ok, problems = validate_decomposition(G, td)
        bound = 2 * k + 1
        worst = max(worst, td.width - bound)
        if tw_g > bound or not ok or td.width > bound:
            res.failures.append(f"{_describe(G)}: tw={tw_g} tw(L)={k} width={td.width} valid={ok} {problems}")
    res.details["max_width_minus_bound"] = worst
    res.passed = not res.failures
    return _finish(res, start)


def criterion_4() -> CriterionResult:
    start = time.perf_counter()
    res = CriterionResult(4, "tree-dec expansion width at most width + 2", True, 0)
    slack = Counter()
    for G in hosts(6, 15):
        res.checked += 1
        w, td = treewidth_exact(G)
        X = TreeDecExpansion(G, td)
        gw = expansion_gaifman_treewidth(X)
        slack[td.width + 2 - gw] += 1
        if gw > td.width + 2:
            res.failures.append(f"{_describe(G)}: width={td.width} gaifman tw={gw}")
    res.details["slack_histogram"] = dict(sorted(slack.items()))
    res.passed = not res.failures
    return _finish(res, start)


def _pairings(n: int, k: int):
    """Ways to choose k disjoint unordered vertex pairs, up to reordering."""
    for verts in combinations(range(n), 2 * k):
        def rec(rest):
            if not rest:
                yield []
                return
            a = rest[0]
            for b in rest[1:]:
                left = [x for x in rest if x not in (a, b)]
                for tail in rec(left):
                    yield [(a, b)] + tail
        yield from rec(list(verts))


def spanning_unique_linkages(n_max: int = 6, k_max: int = 2, r: int = 2):
    """Yield ``(G, L, count)`` for every endpoint configuration with a unique
    r-approximate linkage covering all vertices; ``count`` is the number of
    equivalent linkages, all of which are unique with the same vertex set.

    Endpoint pairs are taken up to reordering and reversal, which the
    construction under test does not distinguish.
    """
    for G in enumerate_graphs(n_max, n_max * (n_max - 1) // 2):
        if G.isolated_vertices():
            continue
        full = frozenset(range(G.n))
        for k in range(1, k_max + 1):
            for pairs in _pairings(G.n, k):
                A = tuple(p[0] for p in pairs)
                B = tuple(p[1] for p in pairs)
                first, count, unique = None, 0, True
                for L in iter_linkages(G, A, B, r):
                    if L.vertices() != full:
                        unique = False
                        break
                    count += 1
                    if first is None:
                        first = L
                if unique and first is not None:
                    yield G, first, count


def criterion_5() -> CriterionResult:
    start = time.perf_counter()
    res = CriterionResult(5, "doubling argument on unique spanning 2-approximate linkages", True, 0)
    by_kind = Counter()
    linkages = 0
    for G, L, count in spanning_unique_linkages():
        res.checked += 1
        linkages += count
        rep = lemma5_harness(G, L)
        kind = "terminal_inside" if rep.terminal_inside else "terminals_at_ends"
        by_kind[(kind, rep.passed)] += 1
        if not rep.passed:
            res.failures.append(
                f"{_describe(G)} A={L.sources} B={L.targets} paths={L.paths}: {rep.falsifications}"
            )
    res.details["linkages"] = linkages
    res.details["failure_count"] = len(res.failures)
    res.details["failed_with_terminal_inside"] = by_kind[("terminal_inside", False)]
    res.details["failed_with_terminals_at_ends"] = by_kind[("terminals_at_ends", False)]
    res.details["passed_configurations"] = by_kind[("terminal_inside", True)] + by_kind[("terminals_at_ends", True)]
    res.passed = not res.failures
    return _finish(res, start)


def random_triples(count: int = 200, seed: int = 20240607):
    """Deterministic random (G1, G2, G) with both patterns immersing into G."""
    rng = random.Random(seed)
    patterns = [H for H in enumerate_graphs(4, 3) if H.m >= 1 and not H.isolated_vertices()]
    made = 0
    while made < count:
        G1, G2 = rng.choice(patterns), rng.choice(patterns)
        n = rng.randint(4, 7)
        p = rng.choice((0.4, 0.5, 0.6, 0.7))
        edges = tuple((u, v) for u, v in combinations(range(n), 2) if rng.random() < p)
        G = MultiGraph(n, edges)
        if find_immersion(G1, G) is None or find_immersion(G2, G) is None:
            continue
        made += 1
        yield G1, G2, G


def criterion_6() -> CriterionResult:
    start = time.perf_counter()
    res = CriterionResult(6, "minimal double subgraph and pendant line-graph linkage", True, 0)
    for G1, G2, G in random_triples():
        res.checked += 1
        Gp = minimal_double_embedding(G1, G2, G).graph
        E = witnessing_edge_linkage(G1, G2, Gp)
        problems = []
        ok, why = validate_edge_linkage(E)
        if not ok:
            problems.append(f"edge-linkage invalid: {why}")
        if E.edges() != frozenset(range(Gp.m)):
            problems.append("edge-linkage does not cover the minimal subgraph")
        touched = set(E.sources) | set(E.targets) | {v for uv in Gp.edges for v in uv}
        if touched != set(range(Gp.n)):
            problems.append("minimal subgraph has vertices outside the edge-linkage")
        Ghat, A_L, B_L = build_Ghat(Gp, E.sources, E.targets)
        LL = edge_linkage_to_line_linkage(Ghat, E, A_L, B_L)
        ok, why = validate_linkage(LL)
        if not ok:
            problems.append(f"line linkage invalid: {why}")
        if LL.r != 2 or not LL.has_distinct_endpoints():
            problems.append("line linkage is not 2-approximate with distinct endpoints")
        if problems:
            res.failures.append(f"G1 {_describe(G1)} G2 {_describe(G2)} G {_describe(G)}: {problems}")
    res.passed = not res.failures
    return _finish(res, start)


def _union_setup():
    return max_degree_at_most(2), at_most_edges(3)


def union_obstruction_set() -> ObstructionSet:
    C1, C2 = _union_setup()
    return compute_union_obstructions(C1, C2, 6, 7)


def criterion_7(obs: ObstructionSet | None = None) -> CriterionResult:
    start = time.perf_counter()
    res = CriterionResult(7, "union obstructions match the brute-force oracle", True, 0)
    C1, C2 = _union_setup()
    obs = obs or union_obstruction_set()
    oracle = oracle_union_obstructions(
        lambda g: _nx_max_degree(g) <= 2, lambda g: g.number_of_edges() <= 3, 6, 7
    )
    res.checked = len(atlas_graphs(6, 7))
    if not same_graph_sets(list(obs), oracle):
        res.failures.append(
            f"computed {[_describe(G) for G in obs]} oracle {[sorted(g.edges()) for g in oracle]}"
        )
    union = UnionClass(C1, C2)
    for G in obs:
        if not is_obstruction(G, union):
            res.failures.append(f"{_describe(G)} is not an obstruction")
    res.details["obstructions"] = len(obs)
    res.passed = not res.failures
    return _finish(res, start)


def family_search_cases():
    """(name, formula builder, predicate class, family budget, graph budget)."""
    K13 = MultiGraph(4, ((0, 3), (1, 3), (2, 3)))
    K2 = MultiGraph(2, ((0, 1),))
    return [
        ("maxdeg<=2", lambda k: Not(build_phi_H(K13)), max_degree_at_most(2), (2, 4, 3), (5, 4)),
        ("edgeless", lambda k: Not(build_phi_H(K2)), no_edges(), (2, 4, 3), (4, 3)),
    ]


def criterion_8() -> tuple[CriterionResult, list[tuple[str, ObstructionSet]]]:
    start = time.perf_counter()
    res = CriterionResult(8, "formula-driven family search recovers obstruction sets", True, 0)
    expected = {
        "maxdeg<=2": [MultiGraph(4, ((0, 3), (1, 3), (2, 3)))],
        "edgeless": [MultiGraph(2, ((0, 1),))],
    }
    found = []
    for name, builder, C, fam_budget, graph_budget in family_search_cases():
        res.checked += 1
        result = lemma4_search(builder, 1, fam_budget, graph_budget, name=name)
        fam = result.family
        direct = compute_obstructions(C, graph_budget[0], graph_budget[1])
        found.append((name, fam))
        want = ObstructionSet(tuple(expected[name])).keys()
        if fam.keys() != want:
            res.failures.append(f"{name}: search returned {[_describe(G) for G in fam]}")
        if fam.keys() != direct.keys():
            res.failures.append(f"{name}: direct enumeration gives {[_describe(G) for G in direct]}")
        res.details[f"{name}_families_tested"] = result.families_tested
    res.passed = not res.failures
    return _finish(res, start), found


def criterion_9() -> CriterionResult:
    start = time.perf_counter()
    res = CriterionResult(9, "exact tree-width matches elimination-order brute force", True, 0)
    for G in hosts(6, 15):
        res.checked += 1
        w, td = treewidth_exact(G)
        ok, problems = validate_decomposition(G, td)
        bf = brute_force_treewidth(G)
        if w != bf or not ok or td.width != w:
            res.failures.append(f"{_describe(G)}: exact={w} brute={bf} width={td.width} valid={ok} {problems}")
    res.passed = not res.failures
    return _finish(res, start)


def criterion_10(union_obs: ObstructionSet, searched_sets: list[tuple[str, ObstructionSet]]) -> CriterionResult:
    start = time.perf_counter()
    res = CriterionResult(10, "antichain and characterization within budget", True, 0)
    C1, C2 = _union_setup()
    cases = [("union", union_obs, UnionClass(C1, C2), (6, 7))]
    classes = {name: (C, gb) for name, _, C, _, gb in family_search_cases()}
    for name, fam in searched_sets:
        C, gb = classes[name]
        cases.append((name, fam, C, gb))
    for name, obs, C, (n_max, m_max) in cases:
        res.checked += 1
        bad = obs.antichain_violations()
        if bad:
            res.failures.append(f"{name}: not an antichain {bad}")
        viol = characterization_violations(C, obs, n_max, m_max)
        if viol:
            res.failures.append(f"{name}: membership disagrees on {[_describe(G) for G in viol[:3]]}")
    res.passed = not res.failures
    return _finish(res, start)


def run_all(selected=None) -> list[CriterionResult]:
    """Run the selected criteria (default: all ten) in order."""
    selected = set(selected or range(1, 11))
    out: dict[int, CriterionResult] = {}
    simple = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4,
              5: criterion_5, 6: criterion_6, 9: criterion_9}
    for num, fn in simple.items():
        if num in selected:
            out[num] = fn()
    union_obs = searched_sets = None
    if selected & {7, 10}:
        union_obs = union_obstruction_set()
    if 7 in selected:
        out[7] = criterion_7(union_obs)
    if selected & {8, 10}:
        res8, searched_sets = criterion_8()
        if 8 in selected:
            out[8] = res8
    if 10 in selected:
        out[10] = criterion_10(union_obs, searched_sets)
    return [out[k] for k in sorted(out)]
