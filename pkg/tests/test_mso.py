import random
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from immersionkit.immersion import immerses
from immersionkit.multigraph import (
    MultiGraph,
    complete_graph,
    cycle_graph,
    enumerate_graphs,
    path_graph,
    star_graph,
)
from immersionkit.mso import (
    And,
    Atom,
    Eq,
    Member,
    MSOSortError,
    MSOSyntaxError,
    Not,
    Or,
    Quant,
    Structure,
    bounded_satisfiability,
    build_phi_family,
    build_phi_H,
    build_phi_path,
    build_phi_union_class,
    evaluate,
    free_variables,
    negate,
    parse_formula,
    to_text,
)
from immersionkit.mso.evaluator import MSOEvaluationError
from immersionkit.mso.syntax import FALSE, TRUE
from immersionkit.treewidth import TreeDecExpansion, TreeDecomposition, treewidth_exact

K2, K3, K13, C5 = complete_graph(2), complete_graph(3), star_graph(3), cycle_graph(5)


def expansion(G):
    return Structure(G, TreeDecExpansion(G, treewidth_exact(G)[1]))


# -- parser ------------------------------------------------------------------


def test_parse_examples():
    phi = parse_formula("exists x. V(x)")
    assert isinstance(phi, Quant) and phi.body == Atom("V", ("x",))
    # nothing pins x to a sort, so it ranges over the whole universe
    assert phi.sort == "U"
    assert free_variables(parse_formula("exists X:Eset. X subseteq E")) == frozenset()
    with pytest.raises(MSOSortError) as err:
        parse_formula("exists e:E. exists x:V. I(e, x)")
    assert err.value.pos == 24


def test_parse_errors_carry_positions():
    with pytest.raises(MSOSyntaxError) as err:
        parse_formula("exists x. V(x) and")
    assert err.value.pos == 18
    with pytest.raises(MSOSortError):
        parse_formula("V(x)")
    with pytest.raises(MSOSyntaxError):
        parse_formula("exists x. V(x) ∧ V(x)")


def test_sort_inference_from_positions():
    phi = parse_formula("exists x, e. I(x, e)")
    assert phi.sort == "V" and phi.body.sort == "E"
    phi = parse_formula("exists t, v. B(t, v)")
    assert (phi.sort, phi.body.sort) == ("VT", "V")


def test_sugar_is_expanded():
    phi = parse_formula("exists x. V(x) -> V(x)")
    assert isinstance(phi.body, Or)
    phi = parse_formula("exists X, Y:Vset. X cap Y = empty")
    assert "cap" not in to_text(phi) and "subseteq" not in to_text(phi)


CORPUS = [
    "exists x. V(x)",
    "exists X:Eset. X subseteq E",
    "forall x, y. x = y -> V(x)",
    "exists X, Y:Vset. X cap Y = empty and (exists v. X(v))",
    "not (exists e. E(e)) or (forall e. exists x. I(x, e))",
    "exists t:VT. exists v:V. B(t, v) and TW_EQ(1)",
    "forall s:ET. exists t. I_T(t, s)",
    "exists x, y. x != y and not (x = y)",
    "true and not false",
]


@pytest.mark.parametrize("text", CORPUS)
def test_round_trip(text):
    phi = parse_formula(text)
    again = parse_formula(to_text(phi))
    assert again == phi


def test_round_trip_of_built_formulas():
    for phi in (build_phi_H(K3), build_phi_path(connected=True)):
        free = {"x": "V", "y": "V", "Z": "Eset"} if free_variables(phi) else None
        assert parse_formula(to_text(phi), free) == phi


# -- evaluator ---------------------------------------------------------------


def test_evaluate_examples():
    phi = parse_formula("exists e. E(e)")
    assert evaluate(Structure(K2), phi)
    assert not evaluate(Structure(MultiGraph(1)), phi)
    single = TreeDecomposition((frozenset({0, 1, 2}),))
    S = Structure(K3, TreeDecExpansion(K3, single))
    assert evaluate(S, parse_formula("TW_EQ(2)"))
    assert not evaluate(S, parse_formula("TW_EQ(1)"))


def test_tw_atom_needs_expansion():
    with pytest.raises(MSOEvaluationError):
        evaluate(Structure(K3), parse_formula("TW_EQ(2)"))


def test_free_variables_must_be_assigned():
    phi = parse_formula("V(x)", {"x": "V"})
    assert evaluate(Structure(K2), phi, {"x": 0})
    assert not evaluate(Structure(K2), phi, {"x": 2})  # universe element 2 is the edge
    with pytest.raises(MSOEvaluationError):
        evaluate(Structure(K2), phi)
    with pytest.raises(MSOEvaluationError):
        evaluate(Structure(K2), phi, {"x": 3})
    with pytest.raises(MSOEvaluationError):
        evaluate(Structure(K2), phi, {"x": [0]})


def test_expansion_relations():
    S = expansion(path_graph(3))
    assert evaluate(S, parse_formula("forall v:V. exists t:VT. B(t, v)"))
    assert evaluate(S, parse_formula("forall s:ET. exists t, u. t != u and I_T(t, s) and I_T(u, s)"))


# -- path formula --------------------------------------------------------------


def _path_asg(S, x, y, Z):
    return {"x": S.vertex(x), "y": S.vertex(y), "Z": [S.edge(e) for e in Z]}


def test_path_examples():
    P3 = path_graph(3)
    S = Structure(P3)
    phi = build_phi_path()
    assert evaluate(S, phi, _path_asg(S, 0, 2, [0, 1]))
    assert not evaluate(S, phi, _path_asg(S, 0, 2, [0]))
    S = Structure(K3)
    for x, y in ((0, 1), (1, 2), (0, 2)):
        assert not evaluate(S, phi, _path_asg(S, x, y, [0, 1, 2]))


def _degree_condition(G, x, y, Z):
    deg = [0] * G.n
    for e in Z:
        for v in G.edges[e]:
            deg[v] += 1
    if x == y or deg[x] != 1 or deg[y] != 1:
        return False
    return all(d in (0, 2) for v, d in enumerate(deg) if v not in (x, y))


def _z_connected(G, x, Z):
    reach, frontier = {x}, [x]
    while frontier:
        v = frontier.pop()
        for e in Z:
            a, b = G.edges[e]
            if v in (a, b):
                w = b if v == a else a
                if w not in reach:
                    reach.add(w)
                    frontier.append(w)
    return all(set(G.edges[e]) <= reach for e in Z)


def _subsets(m):
    for r in range(m + 1):
        yield from combinations(range(m), r)


def test_path_formula_accepts_exactly_path_plus_disjoint_cycles():
    plain = build_phi_path()
    extra_cycle_seen = False
    for G in enumerate_graphs(7, 4, simple=True):
        S = Structure(G)
        for x in range(G.n):
            for y in range(G.n):
                for Z in _subsets(G.m):
                    want = _degree_condition(G, x, y, Z)
                    assert evaluate(S, plain, _path_asg(S, x, y, Z)) == want
                    if want and not _z_connected(G, x, Z):
                        extra_cycle_seen = True
    assert extra_cycle_seen


def test_connected_path_formula_accepts_exactly_paths():
    connected = build_phi_path(connected=True)
    for G in enumerate_graphs(7, 4, simple=True):
        S = Structure(G)
        for x in range(G.n):
            for y in range(G.n):
                for Z in _subsets(G.m):
                    want = _degree_condition(G, x, y, Z) and _z_connected(G, x, Z)
                    assert evaluate(S, connected, _path_asg(S, x, y, Z)) == want


def test_path_variable_clash_rejected():
    with pytest.raises(ValueError):
        build_phi_path("p", "y", "Z")


# -- pattern formulas ----------------------------------------------------------


def test_phi_h_examples():
    assert evaluate(Structure(C5), build_phi_H(K3))
    assert not evaluate(Structure(C5), build_phi_H(K13))
    with pytest.raises(ValueError):
        build_phi_H(MultiGraph(1, ((0, 0),)))


def test_phi_h_with_isolated_pattern_vertex():
    H = MultiGraph(3, ((0, 1),))
    assert evaluate(Structure(path_graph(3)), build_phi_H(H))
    assert not evaluate(Structure(K2), build_phi_H(H))


def test_family_formula():
    assert build_phi_family([K3]) == build_phi_H(K3)
    assert build_phi_family([]) == FALSE
    assert not evaluate(Structure(K3), build_phi_family([]))
    fam = build_phi_family([K3, K13])
    for G in enumerate_graphs(5, 5, simple=True):
        assert evaluate(Structure(G), fam) == (immerses(K3, G) or immerses(K13, G))


def test_union_class_formula():
    obs1, obs2 = [K13], [K2]
    for k in (1, 2):
        phi = build_phi_union_class(obs1, obs2, k)
        for G in enumerate_graphs(4, 4, simple=True):
            w = treewidth_exact(G)[0]
            member = G.max_degree() <= 2 or G.m == 0
            assert evaluate(expansion(G), phi) == (member and w <= k)
    star = star_graph(3)
    assert not evaluate(expansion(star), build_phi_union_class(obs1, obs2, 3))
    assert not evaluate(expansion(K3), build_phi_union_class(obs1, obs2, 1))


# -- bounded satisfiability ----------------------------------------------------


def test_bounded_satisfiability_examples():
    G = bounded_satisfiability(build_phi_H(K3), 2, 3, 3)
    assert G is not None and G.n == 3 and G.m == 3
    assert bounded_satisfiability(parse_formula("exists x. V(x) and not V(x)"), 3, 4, 6) is None
    G = bounded_satisfiability(build_phi_H(K13), 1, 4, 3)
    assert G is not None and (G.n, G.m, G.max_degree()) == (4, 3, 3)


@pytest.mark.parametrize("text,k", [
    ("exists x, y, z. x != y and y != z and x != z and (exists e. I(x, e) and I(y, e))", 1),
    ("forall x. exists e. I(x, e)", 1),
    ("exists X:Vset. (exists v. X(v)) and (forall v, w, e. X(v) and I(v, e) and I(w, e) -> X(w)) and (exists u. not X(u))", 2),
    ("TW_EQ(2) and exists e. E(e)", 2),
])
def test_bounded_satisfiability_results_reverify(text, k):
    phi = parse_formula(text)
    G = bounded_satisfiability(phi, k, 5, 6)
    assert G is not None
    w, td = treewidth_exact(G)
    assert w <= k
    S = Structure(G, TreeDecExpansion(G, td))
    assert evaluate(S, phi)
    for H in enumerate_graphs(5, 6, simple=True):
        if H == G:
            break
        wh, tdh = treewidth_exact(H)
        if wh <= k:
            assert not evaluate(Structure(H, TreeDecExpansion(H, tdh)), phi)


# -- De Morgan on random formulas ----------------------------------------------


def random_formula(rng, bound, depth):
    vs = [v for v, s in bound if s == "V"]
    es = [v for v, s in bound if s == "E"]
    sets = [v for v, s in bound if s.endswith("set")]
    if depth == 0 or rng.random() < 0.25:
        choices = []
        if vs:
            choices += [lambda: Atom("V", (rng.choice(vs),)), lambda: Eq(rng.choice(vs), rng.choice(vs))]
        if es:
            choices.append(lambda: Atom("E", (rng.choice(es),)))
        if vs and es:
            choices.append(lambda: Atom("I", (rng.choice(vs), rng.choice(es))))
        for X, sort in bound:
            if sort == "Vset" and vs:
                choices.append(lambda X=X: Member(X, rng.choice(vs)))
            if sort == "Eset" and es:
                choices.append(lambda X=X: Member(X, rng.choice(es)))
        if choices:
            return rng.choice(choices)()
        if depth <= 0:
            return rng.choice([TRUE, FALSE])
    kind = rng.choice(["not", "and", "or", "q", "q"])
    if kind == "not":
        return Not(random_formula(rng, bound, depth - 1))
    if kind in ("and", "or"):
        parts = (random_formula(rng, bound, depth - 1), random_formula(rng, bound, depth - 1))
        return And(parts) if kind == "and" else Or(parts)
    name = f"v{len(bound)}"
    sort = rng.choice(["V", "E", "V", "E", "Vset", "Eset"])
    return Quant(rng.choice(["exists", "forall"]), name, sort, random_formula(rng, bound + [(name, sort)], depth - 1))


SMALL = [MultiGraph(1), K2, path_graph(3), K3, star_graph(3), MultiGraph(3, ((0, 1), (0, 1), (2, 2)))]


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=0, max_value=2**32), st.sampled_from(range(len(SMALL))))
def test_de_morgan(seed, gi):
    rng = random.Random(seed)
    a = random_formula(rng, [], 3)
    b = random_formula(rng, [], 3)
    S = Structure(SMALL[gi])
    lhs = evaluate(S, Not(And((a, b))))
    assert lhs == evaluate(S, Or((Not(a), Not(b))))
    assert lhs == evaluate(S, negate(And((a, b))))
    assert lhs == (not (evaluate(S, a) and evaluate(S, b)))
