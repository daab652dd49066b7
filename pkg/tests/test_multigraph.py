import random

import pytest

from immersionkit.multigraph import (
    MultiGraph,
    canonical_form,
    complete_bipartite,
    complete_graph,
    contract,
    cycle_graph,
    disjoint_union,
    empty_graph,
    enumerate_graphs,
    is_isomorphic,
    lex_product,
    lift,
    line_graph,
    path_graph,
    star_graph,
)


def test_rejects_empty_graph_and_bad_endpoints():
    with pytest.raises(ValueError):
        MultiGraph(0)
    with pytest.raises(ValueError):
        MultiGraph(2, ((0, 2),))


def test_lift_path_gives_edge_and_isolated_middle():
    G = MultiGraph(3, ((1, 0), (0, 2)))  # y=1, x=0, z=2
    R = lift(G, 0, 1)
    assert R.n == 3 and R.edges == ((1, 2),)
    assert R.degree(0) == 0


def test_lift_parallel_pair_makes_one_loop_on_smaller_endpoint():
    R = lift(MultiGraph(2, ((0, 1), (0, 1))), 0, 1)
    assert R.edges == ((0, 0),)


def test_lift_triangle_creates_parallel_edge():
    R = lift(complete_graph(3), 0, 2)  # edges 01 and 12 share vertex 1
    assert R.m == 2 and not R.is_simple()
    assert R.degree(1) == 0


@pytest.mark.parametrize("e1,e2", [(0, 0), (0, 5)])
def test_lift_rejects_bad_ids(e1, e2):
    with pytest.raises(ValueError):
        lift(path_graph(3), e1, e2)


def test_lift_rejects_disjoint_edges():
    with pytest.raises(ValueError):
        lift(MultiGraph(4, ((0, 1), (2, 3))), 0, 1)


def test_contract_examples():
    assert is_isomorphic(contract(cycle_graph(3), 0), complete_graph(2))
    assert is_isomorphic(contract(contract(cycle_graph(5), 0), 0), cycle_graph(3))
    assert is_isomorphic(contract(complete_graph(4), 2), complete_graph(3))
    with pytest.raises(ValueError):
        contract(MultiGraph(1, ((0, 0),)), 0)


def test_line_graph_examples():
    assert is_isomorphic(line_graph(star_graph(3)), complete_graph(3))
    assert is_isomorphic(line_graph(cycle_graph(5)), cycle_graph(5))
    assert line_graph(path_graph(3)).edges == ((0, 1),)
    with pytest.raises(ValueError):
        line_graph(MultiGraph(1, ((0, 0),)))


def test_line_graph_counts():
    rng = random.Random(3)
    for _ in range(30):
        n = rng.randint(2, 7)
        pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
        G = MultiGraph(n, tuple(p for p in pairs if rng.random() < 0.5) or ((0, 1),))
        L = line_graph(G)
        assert L.n == G.m
        assert L.m == sum(d * (d - 1) // 2 for d in G.degrees())


def test_lex_product_examples():
    assert is_isomorphic(lex_product(complete_graph(3), complete_graph(2)), complete_graph(6))
    assert is_isomorphic(lex_product(path_graph(2), complete_graph(1)), path_graph(2))
    P = lex_product(path_graph(3), complete_graph(2))
    assert (P.n, P.m) == (6, 11)
    assert is_isomorphic(lex_product(complete_graph(2), complete_graph(3)), complete_graph(6))


def test_isomorphism_examples():
    assert is_isomorphic(cycle_graph(4), star_graph(3)) is None
    P = path_graph(4)
    relabeled = MultiGraph(4, ((2, 0), (0, 3), (3, 1)))
    assert is_isomorphic(P, relabeled) is not None
    assert canonical_form(path_graph(4)) != canonical_form(star_graph(3))


def test_canonical_form_respects_multiplicity_and_loops():
    a = MultiGraph(2, ((0, 1), (0, 1)))
    b = MultiGraph(2, ((0, 1),))
    c = MultiGraph(2, ((0, 1), (1, 1)))
    d = MultiGraph(2, ((0, 0), (0, 1)))
    assert canonical_form(a) != canonical_form(b)
    assert canonical_form(c) == canonical_form(d)


def test_canonical_form_relabeling_invariance():
    rng = random.Random(11)
    for _ in range(1000):
        n = rng.randint(1, 7)
        edges = [(rng.randrange(n), rng.randrange(n)) for _ in range(rng.randint(0, 9))]
        G = MultiGraph(n, tuple(edges))
        perm = list(range(n))
        rng.shuffle(perm)
        H = MultiGraph(n, tuple((perm[u], perm[v]) for u, v in edges))
        assert canonical_form(G) == canonical_form(H)


def test_enumeration_counts():
    two = list(enumerate_graphs(2, 1, simple=True))
    assert [(G.n, G.m) for G in two] == [(1, 0), (2, 0), (2, 1)]
    four = [G for G in enumerate_graphs(4, 6, simple=True) if G.n == 4]
    assert len(four) == 11
    assert [G.n for G in enumerate_graphs(1, 3)] == [1]


def test_enumeration_order_and_uniqueness():
    graphs = list(enumerate_graphs(5, 10, simple=True))
    assert len(graphs) == 1 + 2 + 4 + 11 + 34
    keys = [(G.n, G.m) for G in graphs]
    assert keys == sorted(keys)
    assert len({canonical_form(G) for G in graphs}) == len(graphs)


def test_multigraph_enumeration_matches_brute_force():
    # 3 vertices, up to 3 edge records, loops and parallels allowed
    slots = [(u, v) for u in range(3) for v in range(u, 3)]
    seen = set()

    def rec(start, chosen):
        if len(chosen) <= 3:
            for n in (1, 2, 3):
                if all(max(e) < n for e in chosen):
                    seen.add(canonical_form(MultiGraph(n, tuple(chosen))))
        if len(chosen) == 3:
            return
        for i in range(start, len(slots)):
            rec(i, chosen + [slots[i]])

    rec(0, [])
    ours = {canonical_form(G) for G in enumerate_graphs(3, 3, simple=False, loops=True)}
    assert ours == seen


def test_small_constructors():
    assert disjoint_union(complete_graph(2), complete_graph(2)).edges == ((0, 1), (2, 3))
    assert complete_bipartite(1, 3).m == 3
    assert empty_graph(3).m == 0
