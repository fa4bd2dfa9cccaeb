"""JSON serialization of graphs, terminal sets and hairy Path-of-Sets systems."""

from __future__ import annotations

import json
from pathlib import Path

from .graph import Graph
from .pos import HairyPoS, PathOfSets

SCHEMA_VERSION = 1


class SchemaError(ValueError):
    pass


def dumps(obj) -> str:
    """Canonical text form: sorted keys, one space indent, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"


def write_json(path, obj):
    Path(path).write_text(dumps(obj))


def read_json(path) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise SchemaError(f"{path}: top level must be an object")
    return data


def _check_version(data: dict, what: str):
    if data.get("schema_version") != SCHEMA_VERSION:
        raise SchemaError(f"{what}: unsupported schema_version {data.get('schema_version')!r}")


def graph_to_json(G: Graph) -> dict:
    return {"schema_version": SCHEMA_VERSION, "vertices": list(G.vertices),
            "edges": [[e, *G.endpoints(e)] for e in G.edge_ids()]}


def graph_from_json(data: dict) -> Graph:
    _check_version(data, "graph")
    try:
        return Graph(data["vertices"], {int(e): (u, v) for e, u, v in data["edges"]})
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"graph: malformed ({exc})") from exc


def sets_to_json(A, B, X, P=None, Q=None) -> dict:
    out = {"schema_version": SCHEMA_VERSION, "A": list(A), "B": list(B), "X": list(X)}
    if P is not None:
        out["P"] = [list(p) for p in P]
    if Q is not None:
        out["Q"] = [list(q) for q in Q]
    return out


def sets_from_json(data: dict) -> tuple:
    _check_version(data, "sets")
    try:
        P = [tuple(p) for p in data["P"]] if "P" in data else None
        Q = [tuple(q) for q in data["Q"]] if "Q" in data else None
        return list(data["A"]), list(data["B"]), list(data["X"]), P, Q
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"sets: malformed ({exc})") from exc


def hairy_to_json(h: HairyPoS) -> dict:
    p = h.pos
    return {"schema_version": SCHEMA_VERSION, "graph": graph_to_json(p.host),
            "clusters": [sorted(c) for c in p.clusters],
            "A": [list(a) for a in p.A], "B": [list(b) for b in p.B],
            "connectors": [[list(q) for q in fam] for fam in p.connectors],
            "hairs": [sorted(s) for s in h.hairs], "X": [list(x) for x in h.X],
            "Y": [list(y) for y in h.Y],
            "hair_paths": [[list(q) for q in fam] for fam in h.hair_paths]}


def hairy_from_json(data: dict) -> HairyPoS:
    _check_version(data, "hairy")
    try:
        G = graph_from_json(data["graph"])
        pos = PathOfSets(G, data["clusters"], data["A"], data["B"], data["connectors"], "strong")
        return HairyPoS(pos, data["hairs"], data["X"], data["Y"], data["hair_paths"])
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"hairy: malformed ({exc})") from exc


def to_dot(G: Graph, highlight: dict | None = None, name: str = "G") -> str:
    """DOT text; highlight maps a colour to vertex sets or paths to draw bold."""
    colour_of = {}
    bold = {}
    for colour, items in (highlight or {}).items():
        for item in items:
            seq = list(item) if isinstance(item, (list, tuple)) else [item]
            for v in seq:
                colour_of.setdefault(v, colour)
            if isinstance(item, (list, tuple)):
                for u, v in zip(seq, seq[1:]):
                    bold.setdefault((min(u, v), max(u, v)), colour)
    lines = [f"graph {name} {{", "  node [shape=circle, fontsize=10];"]
    for v in G.vertices:
        attr = f' [color="{colour_of[v]}", style=filled]' if v in colour_of else ""
        lines.append(f"  {v}{attr};")
    for e in G.edge_ids():
        u, v = G.endpoints(e)
        attr = f' [color="{bold[(u, v)]}", penwidth=2]' if (u, v) in bold else ""
        lines.append(f"  {u} -- {v}{attr};")
    lines.append("}")
    return "\n".join(lines) + "\n"
