"""Readers and writers for the text formats used by the command line.

Every writer emits LF-terminated text that the matching reader accepts and
re-emits byte for byte.
"""

from __future__ import annotations

import networkx as nx

from .exceptions import FormatError
from .immersion import ImmersionModel
from .linkage import EdgeLinkage, Linkage
from .multigraph import MultiGraph
from .obstructions import ObstructionSet
from .treewidth import TreeDecomposition


def _content_lines(text: str):
    """(line number, stripped text) for non-blank, non-comment lines."""
    for no, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield no, line


def _ints(line: str, no: int, what: str) -> list[int]:
    try:
        return [int(tok) for tok in line.split()]
    except ValueError:
        raise FormatError(f"expected integers in {what}, got {line!r}", no) from None


# -- .mg -----------------------------------------------------------------------


def format_mg(G: MultiGraph) -> str:
    out = [f"{G.n} {G.m}"]
    out += [f"{u} {v}" for u, v in G.edges]
    return "\n".join(out) + "\n"


def parse_mg(text: str) -> MultiGraph:
    lines = list(_content_lines(text))
    if not lines:
        raise FormatError("empty graph file", 1)
    no, head = lines[0]
    nums = _ints(head, no, "header")
    if len(nums) != 2:
        raise FormatError("header must be 'n m'", no)
    n, m = nums
    if n < 1 or m < 0:
        raise FormatError(f"bad sizes n={n} m={m}", no)
    if len(lines) - 1 != m:
        raise FormatError(f"header announces {m} edges, found {len(lines) - 1}", no)
    edges = []
    for no, line in lines[1:]:
        uv = _ints(line, no, "edge")
        if len(uv) != 2:
            raise FormatError("edge line must be 'u v'", no)
        u, v = uv
        if not (0 <= u <= v < n):
            raise FormatError(f"edge {u} {v} violates 0 <= u <= v < {n}", no)
        edges.append((u, v))
    return MultiGraph(n, tuple(edges))


def read_mg(path) -> MultiGraph:
    with open(path, encoding="ascii") as fh:
        return parse_mg(fh.read())


def write_mg(path, G: MultiGraph) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(format_mg(G))


# -- graph6 --------------------------------------------------------------------


def parse_graph6(line: str) -> MultiGraph:
    """Decode one graph6 string (simple graphs only)."""
    line = line.strip()
    if line.startswith(">>graph6<<"):
        line = line[len(">>graph6<<"):]
    try:
        g = nx.from_graph6_bytes(line.encode("ascii"))
    except Exception as exc:  # networkx raises several types for bad input
        raise FormatError(f"invalid graph6 string {line!r}: {exc}") from None
    if g.number_of_nodes() == 0:
        raise FormatError("graph6 string encodes the empty graph")
    return MultiGraph(g.number_of_nodes(), tuple(sorted((min(e), max(e)) for e in g.edges())))


def format_graph6(G: MultiGraph) -> str:
    if not G.is_simple():
        raise ValueError("graph6 only encodes simple graphs")
    g = nx.Graph()
    g.add_nodes_from(range(G.n))
    g.add_edges_from(G.edges)
    return nx.to_graph6_bytes(g, header=False).decode("ascii").strip()


def read_graph6_file(path) -> list[MultiGraph]:
    out = []
    with open(path, encoding="ascii") as fh:
        for no, line in enumerate(fh, start=1):
            if line.strip():
                try:
                    out.append(parse_graph6(line))
                except FormatError as exc:
                    raise FormatError(str(exc), no) from None
    return out


def read_graph(path) -> MultiGraph:
    """Read a .mg file, or the first graph of a graph6 file (``.g6``)."""
    if str(path).endswith(".g6"):
        graphs = read_graph6_file(path)
        if not graphs:
            raise FormatError("no graphs in graph6 file")
        return graphs[0]
    return read_mg(path)


# -- tree decompositions -------------------------------------------------------


def format_td(td: TreeDecomposition) -> str:
    out = [f"p {td.size}"]
    for t, bag in enumerate(td.bags):
        out.append(f"{t}:" + "".join(f" {v}" for v in sorted(bag)))
    out.append("tree:")
    out += [f"{s} {t}" for s, t in td.tree_edges]
    return "\n".join(out) + "\n"


def parse_td(text: str) -> TreeDecomposition:
    lines = list(_content_lines(text))
    if not lines:
        raise FormatError("empty decomposition file", 1)
    no, head = lines[0]
    parts = head.split()
    if len(parts) != 2 or parts[0] != "p":
        raise FormatError("header must be 'p <nodes>'", no)
    p = _ints(parts[1], no, "header")[0]
    if len(lines) < p + 2:
        raise FormatError(f"expected {p} bag lines and a 'tree:' line", lines[-1][0])
    bags = []
    for t in range(p):
        no, line = lines[1 + t]
        label, sep, rest = line.partition(":")
        if not sep or label.strip() != str(t):
            raise FormatError(f"expected bag line '{t}: ...'", no)
        bags.append(tuple(_ints(rest, no, "bag")))
    no, line = lines[1 + p]
    if line != "tree:":
        raise FormatError("expected 'tree:'", no)
    tree = []
    for no, line in lines[2 + p:]:
        st = _ints(line, no, "tree edge")
        if len(st) != 2 or not all(0 <= x < p for x in st):
            raise FormatError("tree edge must be 's t' with valid node ids", no)
        tree.append((st[0], st[1]))
    try:
        return TreeDecomposition(tuple(bags), tuple(tree))
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def read_td(path) -> TreeDecomposition:
    with open(path, encoding="ascii") as fh:
        return parse_td(fh.read())


def write_td(path, td: TreeDecomposition) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(format_td(td))


# -- linkages --------------------------------------------------------------------


def format_linkage(L: Linkage) -> str:
    out = [f"{L.r} {L.k}", " ".join(map(str, L.sources)), " ".join(map(str, L.targets))]
    out += [" ".join(map(str, P)) for P in L.paths]
    return "\n".join(out) + "\n"


def parse_linkage(text: str, G: MultiGraph) -> Linkage:
    lines = list(_content_lines(text))
    if len(lines) < 3:
        raise FormatError("linkage file needs 'r k', sources and targets", 1)
    no, head = lines[0]
    rk = _ints(head, no, "header")
    if len(rk) != 2:
        raise FormatError("header must be 'r k'", no)
    r, k = rk
    A = _ints(lines[1][1], lines[1][0], "sources")
    B = _ints(lines[2][1], lines[2][0], "targets")
    if len(A) != k or len(B) != k:
        raise FormatError(f"expected {k} sources and {k} targets", lines[1][0])
    if len(lines) - 3 != k:
        raise FormatError(f"expected {k} path lines, found {len(lines) - 3}", lines[-1][0])
    paths = []
    for no, line in lines[3:]:
        P = _ints(line, no, "path")
        if any(not 0 <= v < G.n for v in P):
            raise FormatError("path vertex out of range", no)
        paths.append(tuple(P))
    return Linkage(G, tuple(A), tuple(B), tuple(paths), r)


def format_edge_linkage(E: EdgeLinkage) -> str:
    out = [f"edges {E.r} {len(E.paths)}", " ".join(map(str, E.sources)), " ".join(map(str, E.targets))]
    out += [" ".join(map(str, P)) if P else "-" for P in E.paths]
    return "\n".join(out) + "\n"


def parse_edge_linkage(text: str, G: MultiGraph) -> EdgeLinkage:
    lines = list(_content_lines(text))
    if len(lines) < 3:
        raise FormatError("edge-linkage file needs a header, sources and targets", 1)
    no, head = lines[0]
    parts = head.split()
    if len(parts) != 3 or parts[0] != "edges":
        raise FormatError("header must be 'edges r k'", no)
    r, k = _ints(" ".join(parts[1:]), no, "header")
    A = _ints(lines[1][1], lines[1][0], "sources")
    B = _ints(lines[2][1], lines[2][0], "targets")
    if len(A) != k or len(B) != k or len(lines) - 3 != k:
        raise FormatError(f"expected {k} sources, targets and paths", no)
    paths = []
    for no, line in lines[3:]:
        P = () if line == "-" else tuple(_ints(line, no, "edge path"))
        if any(not 0 <= e < G.m for e in P):
            raise FormatError("edge id out of range", no)
        paths.append(P)
    return EdgeLinkage(G, tuple(A), tuple(B), tuple(paths), r)


# -- immersion models ------------------------------------------------------------


def format_model(model: ImmersionModel) -> str:
    out = [f"immersion strong={int(model.strong)}", "branch:"]
    out += [f"{h} -> {g}" for h, g in enumerate(model.branch)]
    out.append("paths:")
    out += [f"{j}:" + "".join(f" {e}" for e in P) for j, P in enumerate(model.paths)]
    return "\n".join(out) + "\n"


def parse_model(text: str) -> ImmersionModel:
    lines = list(_content_lines(text))
    if not lines or not lines[0][1].startswith("immersion strong="):
        raise FormatError("header must be 'immersion strong=<0|1>'", lines[0][0] if lines else 1)
    strong = lines[0][1].split("=", 1)[1] == "1"
    if len(lines) < 2 or lines[1][1] != "branch:":
        raise FormatError("expected 'branch:'", lines[1][0] if len(lines) > 1 else 1)
    i = 2
    branch = []
    while i < len(lines) and lines[i][1] != "paths:":
        no, line = lines[i]
        h, arrow, g = line.partition("->")
        if not arrow or int(h) != len(branch):
            raise FormatError("branch lines must be 'h -> g' in order", no)
        branch.append(_ints(g, no, "branch image")[0])
        i += 1
    if i == len(lines):
        raise FormatError("missing 'paths:' section", lines[-1][0])
    paths = []
    for no, line in lines[i + 1:]:
        j, sep, rest = line.partition(":")
        if not sep or j.strip() != str(len(paths)):
            raise FormatError("path lines must be 'j: e1 e2 ...' in order", no)
        paths.append(tuple(_ints(rest, no, "path")))
    return ImmersionModel(tuple(branch), tuple(paths), strong)


# -- obstruction sets ------------------------------------------------------------


def format_obsset(obs: ObstructionSet) -> str:
    if any(ch.isspace() for ch in obs.name) or not obs.name:
        raise ValueError("obstruction set names must be non-empty without whitespace")
    head = f"obsset {obs.name} count={len(obs)} complete_up_to={obs.stamp()}\n"
    return head + "---\n".join(format_mg(G) for G in obs)


def parse_obsset(text: str) -> ObstructionSet:
    lines = text.split("\n")
    head = lines[0].split()
    if len(head) != 4 or head[0] != "obsset" or not head[2].startswith("count=") \
            or not head[3].startswith("complete_up_to="):
        raise FormatError("header must be 'obsset <name> count=<c> complete_up_to=<n>,<m>'", 1)
    name = head[1]
    count = _ints(head[2][len("count="):], 1, "count")[0]
    stamp = head[3][len("complete_up_to="):]
    if stamp == "*,*":
        complete, provenance = None, "given"
    else:
        nm = stamp.split(",")
        if len(nm) != 2:
            raise FormatError("complete_up_to must be '<n>,<m>' or '*,*'", 1)
        complete, provenance = (_ints(nm[0], 1, "stamp")[0], _ints(nm[1], 1, "stamp")[0]), "computed"
    blocks, cur, start = [], [], 2
    for no, line in enumerate(lines[1:], start=2):
        if line.strip() == "---":
            blocks.append((start, cur))
            cur, start = [], no + 1
        else:
            cur.append(line)
    if any(s.strip() for s in cur) or count:
        blocks.append((start, cur))
    if len(blocks) != count:
        raise FormatError(f"header announces {count} graphs, found {len(blocks)}", 1)
    graphs = []
    for start, block in blocks:
        try:
            graphs.append(parse_mg("\n".join(block)))
        except FormatError as exc:
            line = exc.line + start - 1 if exc.line is not None else start
            raise FormatError(exc.args[0].split(": ", 1)[-1], line) from None
    return ObstructionSet(tuple(graphs), name, provenance, complete)


def read_obsset(path) -> ObstructionSet:
    with open(path, encoding="ascii") as fh:
        return parse_obsset(fh.read())


def write_obsset(path, obs: ObstructionSet) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(format_obsset(obs))
