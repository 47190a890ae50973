"""Text formats: graphs, visit subgraphs and key=value metadata sidecars.

Graph files start with ``n <count>`` and list one ``src dst`` arc per line.
Lines starting with ``#`` and blank lines are ignored.  Visit-subgraph
files replace the header with ``kernel:`` and ``frontier:`` lines.
"""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path

from .graph import DirectedGraph
from .rank_subgraph import StructuralError, VisitSubgraph


class FormatError(ValueError):
    def __init__(self, message, line=None, column=None, path=None):
        self.line, self.column, self.path = line, column, path
        where = ""
        if line is not None:
            where = f"{path or '<input>'}:{line}:{column or 1}: "
        super().__init__(where + message)


def _content_lines(text):
    for no, raw in enumerate(text.splitlines(), 1):
        stripped = raw.strip()
        if stripped and not stripped.startswith("#"):
            yield no, raw


def _column(raw, token_index):
    col, pos = 1, 0
    for i, tok in enumerate(raw.split()):
        pos = raw.index(tok, pos)
        if i == token_index:
            return pos + 1
        pos += len(tok)
    return col


def _int(tok, no, raw, idx, path):
    try:
        return int(tok)
    except ValueError:
        raise FormatError(f"expected an integer, got {tok!r}", no, _column(raw, idx), path) from None


def _parse_arcs(lines, n, path):
    arcs, seen = [], {}
    for no, raw in lines:
        toks = raw.split()
        if len(toks) != 2:
            raise FormatError(f"expected 'src dst', got {raw.strip()!r}", no, 1, path)
        s = _int(toks[0], no, raw, 0, path)
        t = _int(toks[1], no, raw, 1, path)
        for idx, x in ((0, s), (1, t)):
            if not 0 <= x < n:
                raise FormatError(f"node id {x} outside 0..{n - 1}", no, _column(raw, idx), path)
        if (s, t) in seen:
            raise FormatError(f"duplicate arc ({s}, {t}), first seen on line {seen[s, t]}", no, 1, path)
        seen[s, t] = no
        arcs.append((s, t))
    return arcs


def parse_graph(text: str, path=None) -> DirectedGraph:
    lines = _content_lines(text)
    header = next(lines, None)
    if header is None:
        raise FormatError("missing 'n <count>' header", 1, 1, path)
    no, raw = header
    toks = raw.split()
    if len(toks) != 2 or toks[0] != "n":
        raise FormatError(f"bad header {raw.strip()!r}, expected 'n <count>'", no, 1, path)
    n = _int(toks[1], no, raw, 1, path)
    if n < 0:
        raise FormatError("node count must be non-negative", no, _column(raw, 1), path)
    return DirectedGraph(n, _parse_arcs(lines, n, path))


def format_graph(g: DirectedGraph) -> str:
    out = [f"n {g.node_count}"]
    out += [f"{s} {t}" for s, t in g.arcs]
    return "\n".join(out) + "\n"


def parse_graph_file(path) -> DirectedGraph:
    return parse_graph(Path(path).read_text(encoding="utf-8"), str(path))


def write_graph_file(g: DirectedGraph, path) -> None:
    Path(path).write_text(format_graph(g), encoding="utf-8", newline="\n")


def _id_list(raw, key, no, path):
    body = raw.split(":", 1)[1]
    ids = []
    for i, tok in enumerate(body.replace(",", " ").split()):
        try:
            ids.append(int(tok))
        except ValueError:
            raise FormatError(f"bad id {tok!r} in {key} list", no, raw.index(tok) + 1, path) from None
    return ids


def parse_visit_subgraph(text: str, path=None) -> VisitSubgraph:
    lines = _content_lines(text)
    sets = {}
    for key in ("kernel", "frontier"):
        item = next(lines, None)
        if item is None or not item[1].strip().startswith(key + ":"):
            no = item[0] if item else 1
            raise FormatError(f"expected '{key}: <ids>' line", no, 1, path)
        sets[key] = _id_list(item[1], key, item[0], path)
    nodes = sets["kernel"] + sets["frontier"]
    n = max(nodes) + 1 if nodes else 0
    arcs = _parse_arcs(lines, n, path)
    try:
        return VisitSubgraph(set(sets["kernel"]), set(sets["frontier"]), arcs)
    except StructuralError as exc:
        raise FormatError(str(exc), path=path) from exc


def format_visit_subgraph(h: VisitSubgraph) -> str:
    out = ["kernel: " + " ".join(map(str, sorted(h.kernel))), "frontier: " + " ".join(map(str, sorted(h.frontier)))]
    out += [f"{s} {t}" for s, t in sorted(h.arcs)]
    return "\n".join(out) + "\n"


def parse_visit_file(path) -> VisitSubgraph:
    return parse_visit_subgraph(Path(path).read_text(encoding="utf-8"), str(path))


def write_visit_file(h: VisitSubgraph, path) -> None:
    Path(path).write_text(format_visit_subgraph(h), encoding="utf-8", newline="\n")


def _meta_value(v):
    if isinstance(v, (list, tuple)):
        return ",".join(_meta_value(x) for x in v)
    if isinstance(v, dict):
        return ";".join(f"{k}:{_meta_value(x)}" for k, x in v.items())
    if isinstance(v, Fraction):
        return str(v)
    return str(v)


def format_metadata(meta: dict) -> str:
    return "".join(f"{k}={_meta_value(v)}\n" for k, v in meta.items())


def write_metadata(meta: dict, path) -> None:
    Path(path).write_text(format_metadata(meta), encoding="utf-8", newline="\n")


def read_metadata(path) -> dict:
    """Flat ``key=value`` records; values stay strings."""
    out = {}
    for no, raw in _content_lines(Path(path).read_text(encoding="utf-8")):
        if "=" not in raw:
            raise FormatError("expected key=value", no, 1, str(path))
        k, v = raw.split("=", 1)
        out[k.strip()] = v.strip()
    return out
