import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from immersionkit import io
from immersionkit.exceptions import FormatError
from immersionkit.immersion import ImmersionModel, find_immersion
from immersionkit.linkage import EdgeLinkage, Linkage
from immersionkit.multigraph import MultiGraph, complete_graph, cycle_graph, enumerate_graphs, path_graph
from immersionkit.obstructions import ObstructionSet
from immersionkit.treewidth import treewidth_exact


@st.composite
def multigraphs(draw, max_n=7, max_m=10, simple=False):
    n = draw(st.integers(1, max_n))
    pairs = st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))
    edges = draw(st.lists(pairs, max_size=max_m))
    if simple:
        edges = sorted({(min(u, v), max(u, v)) for u, v in edges if u != v})
    return MultiGraph(n, tuple(edges))


@settings(max_examples=200, deadline=None)
@given(multigraphs())
def test_mg_round_trip(G):
    text = io.format_mg(G)
    assert io.parse_mg(text) == G
    assert io.format_mg(io.parse_mg(text)) == text
    assert "\r" not in text and text.endswith("\n")


@settings(max_examples=100, deadline=None)
@given(multigraphs(simple=True))
def test_graph6_round_trip(G):
    assert io.parse_graph6(io.format_graph6(G)).edges == tuple(sorted(G.edges))


@settings(max_examples=100, deadline=None)
@given(multigraphs(max_n=7, simple=True))
def test_td_round_trip(G):
    _, td = treewidth_exact(G)
    text = io.format_td(td)
    assert io.parse_td(text) == td
    assert io.format_td(io.parse_td(text)) == text


@settings(max_examples=100, deadline=None)
@given(multigraphs(max_n=6, max_m=8, simple=True), st.booleans())
def test_model_round_trip(G, strong):
    H = path_graph(2) if G.m else MultiGraph(1)
    model = find_immersion(H, G, strong=strong) or ImmersionModel((0,), (), strong)
    text = io.format_model(model)
    assert io.parse_model(text) == model
    assert io.format_model(io.parse_model(text)) == text


def test_linkage_round_trips():
    C = cycle_graph(6)
    L = Linkage(C, (0, 3), (2, 5), ((0, 1, 2), (3, 4, 5)), r=1)
    text = io.format_linkage(L)
    assert text == "1 2\n0 3\n2 5\n0 1 2\n3 4 5\n"
    assert io.parse_linkage(text, C) == L
    E = EdgeLinkage(C, (0, 1, 2), (2, 1, 3), ((0, 1), (), (2,)), r=2)
    text = io.format_edge_linkage(E)
    assert "\n-\n" in text
    assert io.parse_edge_linkage(text, C) == E
    assert io.format_edge_linkage(io.parse_edge_linkage(text, C)) == text


def test_obsset_round_trip():
    obs = ObstructionSet(tuple(G for G in enumerate_graphs(4, 3) if G.m == 3), "three", "computed", (4, 3))
    text = io.format_obsset(obs)
    assert text.startswith("obsset three count=4 complete_up_to=4,3\n")
    again = io.parse_obsset(text)
    assert again == obs and io.format_obsset(again) == text
    empty = ObstructionSet((), "none", "computed", (3, 3))
    assert io.parse_obsset(io.format_obsset(empty)) == empty
    given = ObstructionSet((complete_graph(3),), "tri")
    assert io.parse_obsset(io.format_obsset(given)).stamp() == "*,*"


def test_comments_are_skipped():
    assert io.parse_mg("# a triangle\n3 3\n0 1\n# middle\n0 2\n1 2\n") == complete_graph(3)


@pytest.mark.parametrize("text,line", [
    ("3\n", 1),
    ("3 2\n0 1\n", 1),
    ("3 1\n2 1\n", 2),
    ("3 1\n0 x\n", 2),
    ("2 1\n0 5\n", 2),
])
def test_malformed_mg_reports_line(text, line):
    with pytest.raises(FormatError) as err:
        io.parse_mg(text)
    assert err.value.line == line


def test_malformed_obsset_reports_line():
    text = "obsset bad count=1 complete_up_to=3,3\n3 1\n0 9\n"
    with pytest.raises(FormatError) as err:
        io.parse_obsset(text)
    assert err.value.line == 3
    with pytest.raises(FormatError):
        io.parse_obsset("obsset bad count=2 complete_up_to=3,3\n1 0\n")


def test_graph6_file_reader(tmp_path):
    p = tmp_path / "g.g6"
    p.write_text(io.format_graph6(complete_graph(4)) + "\n" + io.format_graph6(path_graph(3)) + "\n")
    graphs = io.read_graph6_file(p)
    assert [G.m for G in graphs] == [6, 2]
    assert io.read_graph(p) == graphs[0]
