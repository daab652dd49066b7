import random

import pytest

from immersionkit.exceptions import BudgetExceeded
from immersionkit.immersion import (
    ImmersionModel,
    find_immersion,
    find_minor,
    immerses,
    minimal_double_subgraph,
    minimal_immersion_subgraph,
    minimal_model,
    reduction_oracle,
    single_step_reductions,
    verify_minor_model,
    verify_model,
)
from immersionkit.multigraph import (
    MultiGraph,
    complete_graph,
    cycle_graph,
    enumerate_graphs,
    is_isomorphic,
    path_graph,
    star_graph,
)

K3, C5, K13, K4 = complete_graph(3), cycle_graph(5), star_graph(3), complete_graph(4)


def test_triangle_into_five_cycle():
    model = find_immersion(K3, C5)
    assert model is not None
    assert verify_model(K3, C5, model) == (True, None)
    assert sorted(e for p in model.paths for e in p) == list(range(5))


def test_claw_not_into_cycle():
    assert find_immersion(K13, C5) is None


def test_triangle_not_into_trees():
    for T in enumerate_graphs(6, 5, simple=True):
        if T.is_connected() and T.m == T.n - 1:
            assert find_immersion(K3, T) is None


def test_verify_model_reports_violations():
    H = MultiGraph(2, ((0, 1), (0, 1)))
    G = path_graph(2)
    assert verify_model(H, G, ImmersionModel((0, 1), ((0,), (0,)))) == (False, "edge-disjointness")
    assert verify_model(path_graph(2), G, ImmersionModel((0, 0), ((0,),)))[1] == "injectivity"
    assert verify_model(path_graph(2), G, ImmersionModel((0, 1), ((0,),)))[0]


def test_strong_immersion_forbids_branch_vertices_inside_paths():
    assert find_immersion(K13, star_graph(4), strong=True) is not None
    # K_3 immerses into the bowtie only by routing through the shared vertex
    bowtie = MultiGraph(5, ((0, 1), (0, 2), (1, 2), (2, 3), (2, 4), (3, 4)))
    H = MultiGraph(3, ((0, 1), (0, 2), (1, 2)))
    assert find_immersion(H, bowtie) is not None
    model = find_immersion(H, bowtie, strong=True)
    assert model is not None and verify_model(H, bowtie, model)[0]
    # P_3 with both ends fixed next to the centre of K_{1,3}: strong fails for K_{1,3} into P_4
    assert find_immersion(star_graph(3), path_graph(4), strong=True) is None


def test_minimal_model_examples():
    def union_size(H, G, model):
        return len(model.used_vertices(G)), len(model.used_edges())

    assert union_size(path_graph(2), K4, minimal_model(path_graph(2), K4)) == (2, 1)
    assert union_size(K3, K4, minimal_model(K3, K4)) == (3, 3)
    assert union_size(path_graph(3), cycle_graph(4), minimal_model(path_graph(3), cycle_graph(4))) == (3, 2)
    with pytest.raises(ValueError):
        minimal_model(K13, C5)


def test_minimal_immersion_subgraph_examples():
    sub = minimal_immersion_subgraph(K3, K4)
    assert is_isomorphic(sub, K3)
    assert minimal_immersion_subgraph(path_graph(2), path_graph(4)).m == 1
    two_k2 = MultiGraph(4, ((0, 1), (2, 3)))
    sub = minimal_immersion_subgraph(two_k2, path_graph(4))
    assert is_isomorphic(sub, two_k2)


def test_minimal_subgraph_is_edge_minimal():
    rng = random.Random(5)
    hosts = [G for G in enumerate_graphs(6, 8, simple=True) if G.m >= 3]
    for _ in range(40):
        G = rng.choice(hosts)
        H = rng.choice([K3, path_graph(3), path_graph(4), K13])
        if not immerses(H, G):
            continue
        sub = minimal_immersion_subgraph(H, G)
        assert immerses(H, sub)
        assert all(not immerses(H, sub.delete_edge(e)) for e in range(sub.m))
        assert not sub.isolated_vertices()


def test_minimal_double_subgraph_examples():
    assert minimal_double_subgraph(path_graph(2), path_graph(2), path_graph(4)).m == 1
    sub = minimal_double_subgraph(K3, K13, K4)
    assert 4 <= sub.m <= 6
    assert immerses(K3, sub) and immerses(K13, sub)
    chorded = MultiGraph(5, cycle_graph(5).edges + ((0, 2),))
    sub = minimal_double_subgraph(K3, path_graph(4), chorded)
    for e in range(sub.m):
        R = sub.delete_edge(e)
        assert not (immerses(K3, R) and immerses(path_graph(4), R))
    with pytest.raises(ValueError):
        minimal_double_subgraph(K13, K3, C5)


def test_minor_examples():
    model = find_minor(K3, C5)
    assert model is not None and verify_minor_model(K3, C5, model)[0]
    assert find_minor(K13, C5) is None
    assert find_minor(complete_graph(5), K4) is None


def test_reduction_oracle_examples():
    assert reduction_oracle(K3, C5)
    assert not reduction_oracle(K13, C5)
    with pytest.raises(BudgetExceeded):
        reduction_oracle(K3, complete_graph(5), max_edges=8)


def test_degree_necessity_and_monotonicity():
    rng = random.Random(9)
    graphs = list(enumerate_graphs(6, 8, simple=True))
    for _ in range(500):
        G = rng.choice(graphs)
        H = rng.choice([K3, K13, path_graph(4), cycle_graph(4)])
        if H.m and max(H.degrees()) > G.max_degree():
            assert find_immersion(H, G) is None
        if G.m and immerses(H, G.delete_edge(rng.randrange(G.m))):
            assert immerses(H, G)


def test_vertex_disjoint_models_give_minors():
    for G in enumerate_graphs(5, 7, simple=True):
        for H in (K3, path_graph(3), cycle_graph(4)):
            model = find_immersion(H, G, strong=True)
            if model is None:
                continue
            inner = [set() for _ in model.paths]
            for i, p in enumerate(model.paths):
                for e in p:
                    inner[i].update(G.edges[e])
                inner[i] -= set(model.branch)
            if all(not (inner[i] & inner[j]) for i in range(len(inner)) for j in range(i)):
                assert find_minor(H, G) is not None


def test_single_step_reductions_shrink():
    G = K4
    for R in single_step_reductions(G):
        assert R.n + R.m < G.n + G.m
