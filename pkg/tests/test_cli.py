import json

import pytest

from immersionkit import io
from immersionkit.checks import oracle_union_obstructions, same_graph_sets
from immersionkit.cli import RunConfig, cli_dispatch
from immersionkit.multigraph import MultiGraph, complete_graph, cycle_graph, path_graph, star_graph
from immersionkit.obstructions import ObstructionSet, at_most_edges, compute_obstructions
from immersionkit.treewidth import validate_decomposition


@pytest.fixture
def files(tmp_path):
    def write(name, G):
        p = tmp_path / name
        io.write_mg(p, G)
        return str(p)

    return {
        "k3": write("k3.mg", complete_graph(3)),
        "k4": write("k4.mg", complete_graph(4)),
        "c5": write("c5.mg", cycle_graph(5)),
        "k13": write("k13.mg", star_graph(3)),
        "k2": write("k2.mg", complete_graph(2)),
        "p5": write("p5.mg", path_graph(5)),
        "dir": tmp_path,
    }


def test_immerse_triangle_into_cycle(files, capsys):
    out = files["dir"] / "model.txt"
    assert cli_dispatch(["immerse", "--pattern", files["k3"], "--host", files["c5"], "--out", str(out)]) == 0
    model = io.parse_model(out.read_text())
    assert len(model.paths) == 3
    assert cli_dispatch(["immerse", "--pattern", files["k13"], "--host", files["c5"]]) == 1
    assert "not immersed" in capsys.readouterr().out


def test_tw_of_k4(files, capsys):
    td_path = files["dir"] / "k4.td"
    assert cli_dispatch(["tw", files["k4"], "--out", str(td_path)]) == 0
    assert capsys.readouterr().out.splitlines()[0] == "3"
    td = io.read_td(td_path)
    assert validate_decomposition(complete_graph(4), td)[0]
    assert cli_dispatch(["validate-td", files["k4"], str(td_path)]) == 0
    assert cli_dispatch(["validate-td", files["c5"], str(td_path)]) == 1


def test_obstruct_union_from_obstruction_files(files):
    d = files["dir"]
    io.write_obsset(d / "obs1.obs", ObstructionSet((star_graph(3),), "claw"))
    io.write_obsset(d / "obs2.obs", compute_obstructions(at_most_edges(3), 6, 7, name="e3"))
    out = d / "union.obs"
    code = cli_dispatch(["obstruct-union", "--c1", str(d / "obs1.obs"), "--c2", str(d / "obs2.obs"),
                         "--nmax", "6", "--mmax", "7", "--out", str(out)])
    assert code == 0
    obs = io.read_obsset(out)
    assert out.read_text().splitlines()[0].endswith("complete_up_to=6,7")
    oracle = oracle_union_obstructions(lambda G: max(dict(G.degree()).values(), default=0) <= 2,
                                       lambda G: G.number_of_edges() <= 3, 6, 7)
    assert same_graph_sets(list(obs), oracle)


def test_minor_and_minimal_sub(files, capsys):
    assert cli_dispatch(["minor", "--pattern", files["k3"], "--host", files["c5"]]) == 0
    assert cli_dispatch(["minor", "--pattern", files["k13"], "--host", files["c5"]]) == 1
    capsys.readouterr()
    assert cli_dispatch(["minimal-sub", "--pattern", files["k3"], "--host", files["k4"]]) == 0
    sub = io.parse_mg(capsys.readouterr().out)
    assert (sub.n, sub.m) == (3, 3)


def test_linkage_commands(files, capsys):
    d = files["dir"]
    link = d / "link.txt"
    link.write_text("1 2\n0 2\n1 4\n0 1\n2 3 4\n")
    assert cli_dispatch(["linkage-check", files["p5"], str(link)]) == 0
    assert cli_dispatch(["linkage-unique", files["p5"], str(link)]) == 0
    assert cli_dispatch(["linkage-unique", "--vital", files["p5"], str(link)]) == 0
    assert cli_dispatch(["gb-build", files["p5"], str(link), "--out", str(d / "gb.mg")]) == 0
    assert io.read_mg(d / "gb.mg").n == 5 + 1  # r=2 doubles the single non-terminal
    report = d / "r.json"
    assert cli_dispatch(["--report", str(report), "lemma5-harness", files["p5"], str(link)]) == 0
    assert json.loads(report.read_text())["falsifications"] == []
    el = d / "el.txt"
    el.write_text("edges 2 2\n0 2\n1 4\n0\n2 3\n")
    code = cli_dispatch(["ghat-build", files["p5"], str(el), "--out", str(d / "gh.mg"),
                         "--line-linkage", str(d / "ll.txt")])
    assert code == 0
    assert io.read_mg(d / "gh.mg").m == 4 + 4


def test_mso_commands(files, capsys):
    assert cli_dispatch(["mso-eval", "--formula", "exists e. E(e)", files["k2"]]) == 0
    assert cli_dispatch(["mso-eval", "--formula", "TW_EQ(2)", "--expand", files["k3"]]) == 0
    assert cli_dispatch(["mso-eval", "--formula", "Z(e) and V(x)", "--assign", "Z={e0,e1}",
                         "--assign", "e=e1", "--assign", "x=v0", files["k3"]]) == 0
    assert cli_dispatch(["mso-eval", "--formula", "exists x. V(x) and", files["k3"]]) == 2
    capsys.readouterr()
    assert cli_dispatch(["mso-sat", "--formula", "exists x, y. x != y and V(x) and V(y)",
                         "--k", "1", "--nmax", "3", "--mmax", "2"]) == 0
    assert "2 0" in capsys.readouterr().out
    assert cli_dispatch(["mso-sat", "--formula", "exists x. V(x) and not V(x)", "--k", "1",
                         "--nmax", "3", "--mmax", "2"]) == 1
    assert cli_dispatch(["phi-emit", "--pattern", files["k2"]]) == 0
    assert cli_dispatch(["phi-emit", "--path", "--connected"]) == 0


def test_obstruction_side_commands(files, capsys):
    assert cli_dispatch(["intertwine", files["k2"], files["k3"], "--nmax", "4", "--mmax", "4"]) == 0
    assert cli_dispatch(["class-width", "--class", "maxdeg:2", "--nmax", "4"]) == 0
    assert cli_dispatch(["lemma4-demo", "--class", "edgeless"]) == 0
    capsys.readouterr()
    assert cli_dispatch(["enumerate", "--nmax", "4", "--mmax", "6", "--format", "g6"]) == 0
    assert len(capsys.readouterr().out.split()) == 1 + 2 + 4 + 11


def test_sweep_subset(capsys):
    assert cli_dispatch(["sweep", "--criteria", "9"]) == 0
    assert "criterion 9 [PASS]" in capsys.readouterr().out


def test_usage_and_format_errors(files, capsys):
    bad = files["dir"] / "bad.mg"
    bad.write_text("2 1\n1 0\n")
    assert cli_dispatch(["tw", str(bad)]) == 2
    assert "line 2" in capsys.readouterr().err
    assert cli_dispatch(["tw", str(files["dir"] / "missing.mg")]) == 2
    assert cli_dispatch(["nonsense"]) == 2
    assert cli_dispatch(["immerse", "--pattern", files["k3"]]) == 2


def test_budget_exit_code(files, tmp_path):
    big = tmp_path / "big.mg"
    io.write_mg(big, path_graph(20))
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"tw_exact_cap": 8}))
    assert cli_dispatch(["--config", str(cfg), "tw", str(big)]) == 3


def test_config_from_environment(monkeypatch, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n_max": 3, "timeout": 5}))
    monkeypatch.setenv("IMMERSIONKIT_CONFIG", str(cfg))
    assert RunConfig.load(None).n_max == 3
    cfg.write_text(json.dumps({"timeout": 0.5}))
    with pytest.raises(ValueError):
        RunConfig.load(None)
    cfg.write_text(json.dumps({"bogus": 1}))
    assert cli_dispatch(["tw", "x.mg"]) == 2


def test_reports_are_deterministic(files, tmp_path):
    texts = []
    for i in range(2):
        rep = tmp_path / f"r{i}.json"
        cli_dispatch(["--report", str(rep), "immerse", "--pattern", files["k3"], "--host", files["c5"],
                      "--out", str(tmp_path / f"m{i}.txt")])
        texts.append(rep.read_text().replace(f"m{i}.txt", "m.txt"))
    assert texts[0] == texts[1]
    assert "wall_time" not in texts[0]
    rep = tmp_path / "timed.json"
    cli_dispatch(["--report", str(rep), "--timing", "tw", files["k3"]])
    assert "wall_time" in json.loads(rep.read_text())


def test_output_directory_from_config(files, tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    out_dir = tmp_path / "certs"
    cfg.write_text(json.dumps({"output_dir": str(out_dir)}))
    assert cli_dispatch(["--config", str(cfg), "tw", files["k4"]]) == 0
    assert capsys.readouterr().out == "3\n"
    assert validate_decomposition(complete_graph(4), io.read_td(out_dir / "k4.td"))[0]


def test_immerse_cross_check(files, capsys):
    assert cli_dispatch(["immerse", "--oracle", "--pattern", files["k3"], "--host", files["c5"]]) == 0
    assert "agrees" in capsys.readouterr().out
    assert cli_dispatch(["immerse", "--oracle", "--pattern", files["k13"], "--host", files["c5"]]) == 1
    assert cli_dispatch(["immerse", "--oracle", "--strong", "--pattern", files["k3"], "--host", files["c5"]]) == 2


def test_timeout_exit_code(capsys):
    assert cli_dispatch(["--timeout", "1", "sweep", "--criteria", "1"]) == 3
    assert "timed out" in capsys.readouterr().err
