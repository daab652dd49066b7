"""Command-line interface.

Exit codes: 0 success or positive decision, 1 negative decision, 2 usage or
input-format error, 3 budget exceeded or timeout.
"""

from __future__ import annotations

import argparse
import json
import os
import signal
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

from . import io
from .checks import run_all
from .exceptions import BudgetExceeded, FormatError, ImmersionKitError
from .immersion import (
    find_immersion,
    find_minor,
    minimal_double_subgraph,
    minimal_immersion_subgraph,
    reduction_oracle,
)
from .linkage import (
    build_Gb,
    build_Ghat,
    edge_linkage_to_line_linkage,
    is_unique_linkage,
    is_vital_linkage,
    lemma5_harness,
    validate_edge_linkage,
    validate_linkage,
)
from .mso import (
    MSOSyntaxError,
    Not,
    Structure,
    bounded_satisfiability,
    build_phi_H,
    build_phi_path,
    evaluate,
    parse_formula,
    to_text,
)
from .multigraph import MultiGraph, enumerate_graphs, line_graph
from .obstructions import (
    ClassHandle,
    ObstructionClass,
    ObstructionSet,
    all_graphs,
    at_most_edges,
    compute_intertwines,
    compute_obstructions,
    compute_union_obstructions,
    estimate_class_width,
    lemma4_search,
    max_degree_at_most,
    no_edges,
)
from .treewidth import (
    TreeDecExpansion,
    decomposition_from_line_graph,
    treewidth_exact,
    validate_decomposition,
)

CONFIG_ENV = "IMMERSIONKIT_CONFIG"

EXIT_OK, EXIT_NO, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


@dataclass
class RunConfig:
    n_max: int = 6
    m_max: int = 7
    tw_exact_cap: int = 12
    uniqueness_cap: int = 9
    reduction_oracle_cap: int = 8
    timeout: float = 3600.0
    workers: int = 1
    output_dir: Optional[str] = None  # certificates land here when --out is absent

    def __post_init__(self):
        for name in ("n_max", "m_max", "tw_exact_cap", "uniqueness_cap", "reduction_oracle_cap", "workers"):
            if getattr(self, name) < 1:
                raise ValueError(f"config value {name} must be positive")
        if self.timeout < 1:
            raise ValueError("timeout must be at least one second")

    @classmethod
    def load(cls, path: Optional[str]) -> "RunConfig":
        path = path or os.environ.get(CONFIG_ENV)
        if not path:
            return cls()
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


class _Timeout(Exception):
    pass


@dataclass
class Outcome:
    code: int
    decision: str
    record: dict = field(default_factory=dict)


# -- helpers ---------------------------------------------------------------------


def _write_or_print(text: str, path: Optional[str], cfg: Optional[RunConfig] = None,
                    default_name: Optional[str] = None) -> Optional[str]:
    if not path and cfg is not None and cfg.output_dir and default_name:
        Path(cfg.output_dir).mkdir(parents=True, exist_ok=True)
        path = str(Path(cfg.output_dir) / default_name)
    if path:
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
        return path
    sys.stdout.write(text)
    return None


def _stem(path: str) -> str:
    return Path(path).stem


def _read_text(path: str) -> str:
    with open(path, encoding="ascii") as fh:
        return fh.read()


def parse_class(spec: str, cfg: RunConfig) -> ClassHandle:
    """``maxdeg:D``, ``edges:M``, ``edgeless``, ``all`` or a path to an .obs file."""
    if spec.startswith("maxdeg:"):
        return max_degree_at_most(int(spec.split(":", 1)[1]))
    if spec.startswith("edges:"):
        return at_most_edges(int(spec.split(":", 1)[1]))
    if spec == "edgeless":
        return no_edges()
    if spec == "all":
        return all_graphs()
    return ObstructionClass(io.read_obsset(spec))


def _formula_arg(args) -> str:
    if args.formula is not None:
        return args.formula
    return _read_text(args.formula_file)


_KIND_SORT = {"v": "V", "e": "E", "t": "VT", "s": "ET"}


def _parse_element(tok: str, S: Structure) -> tuple[int, str]:
    kind, idx = tok[:1], tok[1:]
    if kind not in _KIND_SORT or not idx.isdigit():
        raise FormatError(f"element {tok!r} must look like v3, e0, t1 or s2")
    i = int(idx)
    conv = {"v": (S.vertex, S.graph.n), "e": (S.edge, S.graph.m),
            "t": (S.node, len(S.domains["VT"])), "s": (S.tree_edge, len(S.domains["ET"]))}[kind]
    if not 0 <= i < conv[1]:
        raise FormatError(f"element {tok!r} out of range")
    return conv[0](i), _KIND_SORT[kind]


def parse_assignments(items, S: Structure) -> tuple[dict, dict]:
    """``x=v0`` or ``Z={e0,e2}``; an optional sort may follow the name (``Z:Eset={}``)."""
    asg, sorts = {}, {}
    for item in items or []:
        lhs, eq, rhs = item.partition("=")
        if not eq:
            raise FormatError(f"assignment {item!r} must be name=value")
        name, _, sort = lhs.partition(":")
        rhs = rhs.strip()
        if rhs.startswith("{") and rhs.endswith("}"):
            toks = [t.strip() for t in rhs[1:-1].split(",") if t.strip()]
            elems = [_parse_element(t, S) for t in toks]
            kinds = {k for _, k in elems}
            inferred = (kinds.pop() + "set") if len(kinds) == 1 else "Uset"
            asg[name] = [x for x, _ in elems]
            sorts[name] = sort or inferred
        else:
            x, kind = _parse_element(rhs, S)
            asg[name] = x
            sorts[name] = sort or kind
    return asg, sorts


def _obs_text(members, name: str, complete) -> str:
    return io.format_obsset(ObstructionSet(tuple(members), name, "computed", complete))


# -- subcommands -------------------------------------------------------------------


def cmd_immerse(args, cfg):
    H, G = io.read_graph(args.pattern), io.read_graph(args.host)
    model = find_immersion(H, G, strong=args.strong)
    if args.oracle:
        if args.strong:
            raise ValueError("the lift/delete cross-check covers plain immersion only")
        agrees = reduction_oracle(H, G, max_edges=cfg.reduction_oracle_cap) == (model is not None)
        print(f"lift/delete cross-check: {'agrees' if agrees else 'DISAGREES'}")
        if not agrees:
            return Outcome(EXIT_NO, "cross-check failed")
    if model is None:
        print("not immersed")
        return Outcome(EXIT_NO, "not immersed")
    print("immersed")
    cert = _write_or_print(io.format_model(model), args.out, cfg, f"{_stem(args.host)}.model")
    return Outcome(EXIT_OK, "immersed", {"certificate": cert})


def cmd_minor(args, cfg):
    H, G = io.read_graph(args.pattern), io.read_graph(args.host)
    model = find_minor(H, G)
    if model is None:
        print("not a minor")
        return Outcome(EXIT_NO, "not a minor")
    print("minor")
    for h, bs in enumerate(model.branch_sets):
        print(f"{h} -> {' '.join(map(str, sorted(bs)))}")
    print("witnesses: " + " ".join(map(str, model.witnesses)))
    return Outcome(EXIT_OK, "minor")


def cmd_minimal_sub(args, cfg):
    H, G = io.read_graph(args.pattern), io.read_graph(args.host)
    try:
        if args.second:
            sub = minimal_double_subgraph(H, io.read_graph(args.second), G)
        else:
            sub = minimal_immersion_subgraph(H, G)
    except ValueError as exc:
        print(str(exc))
        return Outcome(EXIT_NO, "not immersed")
    cert = _write_or_print(io.format_mg(sub), args.out, cfg, f"{_stem(args.host)}.min.mg")
    return Outcome(EXIT_OK, "found", {"certificate": cert, "vertices": sub.n, "edges": sub.m})


def cmd_tw(args, cfg):
    G = io.read_graph(args.graph)
    w, td = treewidth_exact(G, max_n=cfg.tw_exact_cap)
    print(w)
    cert = _write_or_print(io.format_td(td), args.out, cfg, f"{_stem(args.graph)}.td")
    return Outcome(EXIT_OK, str(w), {"treewidth": w, "certificate": cert})


def cmd_validate_td(args, cfg):
    G, td = io.read_graph(args.graph), io.read_td(args.decomposition)
    ok, problems = validate_decomposition(G, td)
    if ok:
        print(f"valid width={td.width}")
        return Outcome(EXIT_OK, "valid", {"width": td.width})
    print("invalid: " + "; ".join(problems))
    return Outcome(EXIT_NO, "invalid", {"problems": problems})


def cmd_l6_transfer(args, cfg):
    G = io.read_graph(args.graph)
    LG = line_graph(G)
    k, td_line = treewidth_exact(LG, max_n=max(cfg.tw_exact_cap, LG.n))
    td = decomposition_from_line_graph(G, td_line)
    ok, problems = validate_decomposition(G, td)
    bound = 2 * k + 1
    within = ok and td.width <= bound
    print(f"tw(L(G))={k} width={td.width} bound={bound} valid={ok}")
    cert = _write_or_print(io.format_td(td), args.out, cfg, f"{_stem(args.graph)}.line.td")
    rec = {"line_treewidth": k, "width": td.width, "bound": bound, "valid": ok, "certificate": cert}
    return Outcome(EXIT_OK if within else EXIT_NO, "within bound" if within else "violated", rec)


def _linkage(args):
    G = io.read_graph(args.graph)
    return G, io.parse_linkage(_read_text(args.linkage), G)


def cmd_linkage_check(args, cfg):
    _, L = _linkage(args)
    ok, why = validate_linkage(L)
    print("valid" if ok else f"invalid: {why}")
    return Outcome(EXIT_OK if ok else EXIT_NO, "valid" if ok else "invalid", {"reason": why})


def cmd_linkage_unique(args, cfg):
    _, L = _linkage(args)
    ok, why = validate_linkage(L)
    if not ok:
        print(f"invalid: {why}")
        return Outcome(EXIT_NO, "invalid", {"reason": why})
    if args.vital:
        yes = is_vital_linkage(L, max_n=cfg.uniqueness_cap)
        word = "vital" if yes else "not vital"
    else:
        yes = is_unique_linkage(L, max_n=cfg.uniqueness_cap)
        word = "unique" if yes else "not unique"
    print(word)
    return Outcome(EXIT_OK if yes else EXIT_NO, word)


def cmd_gb_build(args, cfg):
    G, L = _linkage(args)
    gb = build_Gb(G, L.sources, L.targets, r=args.r)
    cert = _write_or_print(io.format_mg(gb.graph), args.out, cfg, f"{_stem(args.graph)}.gb.mg")
    if cert:
        print(f"doubled graph: {gb.graph.n} vertices, {gb.graph.m} edges")
    rec = {"origin": [list(o) for o in gb.origin], "sources": list(gb.sources),
           "targets": list(gb.targets), "certificate": cert}
    return Outcome(EXIT_OK, "built", rec)


def cmd_ghat_build(args, cfg):
    G = io.read_graph(args.graph)
    E = io.parse_edge_linkage(_read_text(args.edge_linkage), G)
    ok, why = validate_edge_linkage(E)
    if not ok:
        print(f"invalid edge-linkage: {why}")
        return Outcome(EXIT_NO, "invalid", {"reason": why})
    Ghat, A_L, B_L = build_Ghat(G, E.sources, E.targets)
    cert = _write_or_print(io.format_mg(Ghat), args.out, cfg, f"{_stem(args.graph)}.ghat.mg")
    rec = {"A_L": list(A_L), "B_L": list(B_L), "certificate": cert}
    if args.line_linkage:
        LL = edge_linkage_to_line_linkage(Ghat, E, A_L, B_L)
        ok, why = validate_linkage(LL)
        with open(args.line_linkage, "w", encoding="ascii", newline="\n") as fh:
            fh.write(io.format_linkage(LL))
        rec["line_linkage"] = args.line_linkage
        rec["line_linkage_valid"] = ok
        if not ok:
            print(f"line linkage invalid: {why}")
            return Outcome(EXIT_NO, "line linkage invalid", rec)
    return Outcome(EXIT_OK, "built", rec)


def cmd_doubling_harness(args, cfg):
    G, L = _linkage(args)
    rep = lemma5_harness(G, L, max_n=max(cfg.tw_exact_cap, 2 * G.n))
    rec = {k: v for k, v in asdict(rep).items() if k not in ("graph",)}
    rec["passed"] = rep.passed
    print(json.dumps(rec, sort_keys=True, default=list))
    return Outcome(EXIT_OK if rep.passed else EXIT_NO, "passed" if rep.passed else "falsified", rec)


def _structure(args, cfg) -> Structure:
    G = io.read_graph(args.graph)
    if args.td:
        td = io.read_td(args.td)
        ok, problems = validate_decomposition(G, td)
        if not ok:
            raise FormatError(f"decomposition is invalid: {problems}")
        return Structure(G, TreeDecExpansion(G, td))
    if args.expand:
        _, td = treewidth_exact(G, max_n=cfg.tw_exact_cap)
        return Structure(G, TreeDecExpansion(G, td))
    return Structure(G)


def cmd_mso_eval(args, cfg):
    S = _structure(args, cfg)
    asg, sorts = parse_assignments(args.assign, S)
    phi = parse_formula(_formula_arg(args), sorts)
    val = evaluate(S, phi, asg)
    print("true" if val else "false")
    return Outcome(EXIT_OK if val else EXIT_NO, str(val).lower())


def cmd_mso_sat(args, cfg):
    phi = parse_formula(_formula_arg(args))
    n_max = args.nmax or cfg.n_max
    m_max = args.mmax if args.mmax is not None else cfg.m_max
    G = bounded_satisfiability(phi, args.k, n_max, m_max)
    stamp = f"{n_max},{m_max}"
    if G is None:
        print(f"unsatisfiable, complete up to ({stamp})")
        return Outcome(EXIT_NO, "unsatisfiable", {"complete_up_to": stamp})
    print(f"satisfiable, first model within ({stamp}):")
    cert = _write_or_print(io.format_mg(G), args.out, cfg, "model.mg")
    return Outcome(EXIT_OK, "satisfiable", {"complete_up_to": stamp, "certificate": cert})


def cmd_phi_emit(args, cfg):
    if args.pattern:
        phi = build_phi_H(io.read_graph(args.pattern))
        if args.negate:
            phi = Not(phi)
    else:
        phi = build_phi_path(connected=args.connected)
    print(to_text(phi))
    return Outcome(EXIT_OK, "emitted")


def cmd_obstruct_union(args, cfg):
    C1, C2 = parse_class(args.c1, cfg), parse_class(args.c2, cfg)
    n_max = args.nmax or cfg.n_max
    m_max = args.mmax if args.mmax is not None else cfg.m_max
    obs = compute_union_obstructions(C1, C2, n_max, m_max)
    obs = ObstructionSet(obs.members, args.name or "union", obs.provenance, obs.complete_up_to)
    cert = _write_or_print(io.format_obsset(obs), args.out, cfg, f"{obs.name}.obs")
    if cert:
        print(f"{len(obs)} obstructions, complete up to ({obs.stamp()})")
    return Outcome(EXIT_OK, f"{len(obs)} obstructions", {"count": len(obs), "complete_up_to": obs.stamp(),
                                                         "certificate": cert})


def cmd_intertwine(args, cfg):
    G1, G2 = io.read_graph(args.first), io.read_graph(args.second)
    n_max = args.nmax or cfg.n_max
    m_max = args.mmax if args.mmax is not None else cfg.m_max
    found = compute_intertwines(G1, G2, n_max, m_max)
    cert = _write_or_print(_obs_text(found, "intertwines", (n_max, m_max)), args.out, cfg, "intertwines.obs")
    return Outcome(EXIT_OK if found else EXIT_NO, f"{len(found)} intertwines",
                   {"count": len(found), "complete_up_to": f"{n_max},{m_max}", "certificate": cert})


def cmd_class_width(args, cfg):
    C = parse_class(args.cls, cfg)
    n_max = args.nmax or min(cfg.n_max, 5)
    est = estimate_class_width(C, n_max)
    print(est.width)
    return Outcome(EXIT_OK, str(est.width), {"width": est.width, "graphs_outside": est.checked,
                                             "complete_up_to": f"{n_max},*"})


_DEMOS = {
    "maxdeg2": (lambda k: Not(build_phi_H(MultiGraph(4, ((0, 3), (1, 3), (2, 3))))), "maxdeg:2", (2, 4, 3), (5, 4)),
    "edgeless": (lambda k: Not(build_phi_H(MultiGraph(2, ((0, 1),)))), "edgeless", (2, 4, 3), (4, 3)),
    "all": (lambda k: parse_formula("true"), "all", (2, 4, 3), (4, 3)),
}


def cmd_family_demo(args, cfg):
    builder, spec, fam_budget, graph_budget = _DEMOS[args.cls]
    res = lemma4_search(builder, args.width, fam_budget, graph_budget, name=args.cls)
    direct = compute_obstructions(parse_class(spec, cfg), *graph_budget)
    agree = res.family.keys() == direct.keys()
    cert = _write_or_print(io.format_obsset(res.family), args.out, cfg, f"{args.cls}.obs")
    print(f"families tested: {res.families_tested}; agrees with direct enumeration: {agree}")
    return Outcome(EXIT_OK if agree else EXIT_NO, "found", {"families_tested": res.families_tested,
                                                           "agrees": agree, "certificate": cert})


def cmd_enumerate(args, cfg):
    n_max = args.nmax or cfg.n_max
    m_max = args.mmax if args.mmax is not None else cfg.m_max
    graphs = list(enumerate_graphs(n_max, m_max, simple=not args.multi, loops=not args.no_loops))
    if args.format == "g6":
        text = "".join(io.format_graph6(G) + "\n" for G in graphs)
    else:
        text = "---\n".join(io.format_mg(G) for G in graphs)
    cert = _write_or_print(text, args.out, cfg, f"graphs.{args.format}")
    return Outcome(EXIT_OK, f"{len(graphs)} graphs", {"count": len(graphs), "certificate": cert})


def cmd_sweep(args, cfg):
    selected = [int(x) for x in args.criteria.split(",")] if args.criteria else None
    results = run_all(selected)
    for r in results:
        print(r.line())
    ok = all(r.passed for r in results)
    rec = {"criteria": [r.as_record(timing=args.timing) for r in results]}
    return Outcome(EXIT_OK if ok else EXIT_NO, "all passed" if ok else "some failed", rec)


# -- parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="immersionkit", description=__doc__.splitlines()[0])
    p.add_argument("--config", help=f"JSON run configuration (default: ${CONFIG_ENV})")
    p.add_argument("--report", help="write a JSON report record to this file")
    p.add_argument("--timing", action="store_true", help="include wall time in the report")
    p.add_argument("--timeout", type=float, help="override the configured timeout in seconds")
    sub = p.add_subparsers(dest="command", required=True)

    def cmd(name, fn, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.set_defaults(func=fn)
        return sp

    sp = cmd("immerse", cmd_immerse, "decide H <=im G and print a model")
    sp.add_argument("--pattern", required=True)
    sp.add_argument("--host", required=True)
    sp.add_argument("--strong", action="store_true")
    sp.add_argument("--oracle", action="store_true", help="cross-check against the lift/delete search")
    sp.add_argument("--out")

    sp = cmd("minor", cmd_minor, "decide whether H is a minor of G")
    sp.add_argument("--pattern", required=True)
    sp.add_argument("--host", required=True)

    sp = cmd("minimal-sub", cmd_minimal_sub, "edge-minimal subgraph still containing the pattern(s)")
    sp.add_argument("--pattern", required=True)
    sp.add_argument("--host", required=True)
    sp.add_argument("--second", help="second pattern that must also immerse")
    sp.add_argument("--out")

    sp = cmd("tw", cmd_tw, "exact tree-width with a decomposition")
    sp.add_argument("graph")
    sp.add_argument("--out")

    sp = cmd("validate-td", cmd_validate_td, "check a tree decomposition")
    sp.add_argument("graph")
    sp.add_argument("decomposition")

    sp = cmd("l6-transfer", cmd_l6_transfer, "decomposition of G from one of its line graph")
    sp.add_argument("graph")
    sp.add_argument("--out")

    for name, fn, text in (("linkage-check", cmd_linkage_check, "validate a linkage file"),
                           ("linkage-unique", cmd_linkage_unique, "decide uniqueness of a linkage"),
                           ("gb-build", cmd_gb_build, "build the doubled graph of a linkage"),
                           ("lemma5-harness", cmd_doubling_harness, "run the doubling argument checks")):
        sp = cmd(name, fn, text)
        sp.add_argument("graph")
        sp.add_argument("linkage")
        if name == "linkage-unique":
            sp.add_argument("--vital", action="store_true")
        if name == "gb-build":
            sp.add_argument("--r", type=int, default=2)
            sp.add_argument("--out")

    sp = cmd("ghat-build", cmd_ghat_build, "attach pendant edges at edge-linkage endpoints")
    sp.add_argument("graph")
    sp.add_argument("edge_linkage")
    sp.add_argument("--out")
    sp.add_argument("--line-linkage", help="also write the induced line-graph linkage here")

    for name, fn, text in (("mso-eval", cmd_mso_eval, "evaluate a formula on a graph"),
                           ("mso-sat", cmd_mso_sat, "bounded satisfiability of a sentence")):
        sp = cmd(name, fn, text)
        src = sp.add_mutually_exclusive_group(required=True)
        src.add_argument("--formula")
        src.add_argument("--formula-file")
        if name == "mso-eval":
            sp.add_argument("graph")
            sp.add_argument("--td", help="decomposition file; evaluates on the tree-dec expansion")
            sp.add_argument("--expand", action="store_true", help="use an optimal decomposition")
            sp.add_argument("--assign", action="append", help="x=v0, e=e1, Z={e0,e2}")
        else:
            sp.add_argument("--k", type=int, required=True)
            sp.add_argument("--nmax", type=int)
            sp.add_argument("--mmax", type=int)
            sp.add_argument("--out")

    sp = cmd("phi-emit", cmd_phi_emit, "print the immersion formula of a pattern or the path formula")
    grp = sp.add_mutually_exclusive_group(required=True)
    grp.add_argument("--pattern")
    grp.add_argument("--path", action="store_true")
    sp.add_argument("--connected", action="store_true")
    sp.add_argument("--negate", action="store_true")

    sp = cmd("obstruct-union", cmd_obstruct_union, "obstructions of the union of two classes")
    sp.add_argument("--c1", required=True, help="maxdeg:D, edges:M, edgeless, all, or an .obs file")
    sp.add_argument("--c2", required=True)
    sp.add_argument("--nmax", type=int)
    sp.add_argument("--mmax", type=int)
    sp.add_argument("--name")
    sp.add_argument("--out")

    sp = cmd("intertwine", cmd_intertwine, "minimal graphs containing both inputs")
    sp.add_argument("first")
    sp.add_argument("second")
    sp.add_argument("--nmax", type=int)
    sp.add_argument("--mmax", type=int)
    sp.add_argument("--out")

    sp = cmd("class-width", cmd_class_width, "estimate the width of a class")
    sp.add_argument("--class", dest="cls", required=True)
    sp.add_argument("--nmax", type=int)

    sp = cmd("lemma4-demo", cmd_family_demo, "formula-driven obstruction search on a toy class")
    sp.add_argument("--class", dest="cls", choices=sorted(_DEMOS), required=True)
    sp.add_argument("--width", type=int, default=1)
    sp.add_argument("--out")

    sp = cmd("enumerate", cmd_enumerate, "canonical graphs up to isomorphism")
    sp.add_argument("--nmax", type=int)
    sp.add_argument("--mmax", type=int)
    sp.add_argument("--multi", action="store_true")
    sp.add_argument("--no-loops", action="store_true")
    sp.add_argument("--format", choices=("mg", "g6"), default="mg")
    sp.add_argument("--out")

    sp = cmd("sweep", cmd_sweep, "run the verification suites")
    sp.add_argument("--criteria", help="comma-separated subset, e.g. 1,3,9")
    return p


def _alarm(signum, frame):
    raise _Timeout()


def cli_dispatch(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        cfg = RunConfig.load(args.config)
        if args.timeout is not None:
            cfg = RunConfig(**{**asdict(cfg), "timeout": args.timeout})
    except (OSError, ValueError, TypeError) as exc:
        print(f"error: bad configuration: {exc}", file=sys.stderr)
        return EXIT_USAGE

    use_alarm = hasattr(signal, "SIGALRM")
    if use_alarm:
        old = signal.signal(signal.SIGALRM, _alarm)
        signal.setitimer(signal.ITIMER_REAL, cfg.timeout)
    start = time.perf_counter()
    try:
        outcome = args.func(args, cfg)
    except _Timeout:
        print(f"error: timed out after {cfg.timeout:g} s", file=sys.stderr)
        outcome = Outcome(EXIT_BUDGET, "timeout")
    except BudgetExceeded as exc:
        print(f"error: budget exceeded: {exc}", file=sys.stderr)
        outcome = Outcome(EXIT_BUDGET, "budget exceeded", {"reason": str(exc)})
    except (FormatError, MSOSyntaxError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        outcome = Outcome(EXIT_USAGE, "malformed input", {"reason": str(exc)})
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        outcome = Outcome(EXIT_USAGE, "unreadable input", {"reason": str(exc)})
    except (ImmersionKitError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        outcome = Outcome(EXIT_USAGE, "rejected input", {"reason": str(exc)})
    finally:
        if use_alarm:
            signal.setitimer(signal.ITIMER_REAL, 0)
            signal.signal(signal.SIGALRM, old)
    elapsed = time.perf_counter() - start
    if args.report:
        rec = {"command": args.command, "decision": outcome.decision, "exit_code": outcome.code}
        rec.update(outcome.record)
        rec.setdefault("certificate", None)
        rec["budget"] = {k: v for k, v in asdict(cfg).items() if k != "output_dir"}
        if args.timing:
            rec["wall_time"] = round(elapsed, 3)
        Path(args.report).write_text(json.dumps(rec, sort_keys=True, indent=2, default=list) + "\n")
    return outcome.code


def main() -> None:
    sys.exit(cli_dispatch())
