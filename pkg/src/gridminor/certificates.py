"""Certificates: a crossbar in the host, or a Path-of-Sets system in a minor of
the host together with the minor model. Validation rebuilds every check
from the host graph and the certificate alone."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .expander import EXACT_CAP, ExpanderEmbedding, exact_expansion
from .graph import Graph, MinorModel, validate_minor_model
from .pos import PathOfSets, validate_pos
from .pseudo_grid import Crossbar, validate_crossbar

SCHEMA_VERSION = 1
KINDS = ("crossbar", "pos", "expander")


@dataclass
class Certificate:
    kind: str  # crossbar | pos | expander
    body: dict
    config: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"schema_version": SCHEMA_VERSION, "kind": self.kind, "body": self.body,
                "config": self.config, "provenance": self.provenance}

    @classmethod
    def from_json(cls, data: dict) -> "Certificate":
        if data.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {data.get('schema_version')}")
        if data.get("kind") not in KINDS:
            raise ValueError(f"unknown certificate kind {data.get('kind')}")
        return cls(data["kind"], data["body"], data.get("config", {}), data.get("provenance", {}))


@dataclass
class CertificateReport:
    ok: bool
    violations: list  # (clause, message)

    def clauses(self) -> set:
        return {c for c, _ in self.violations}


def crossbar_certificate(cb: Crossbar, config: dict, provenance: dict) -> Certificate:
    body = {"A": list(cb.A), "B": list(cb.B), "X": list(cb.X),
            "P": [list(p) for p in cb.P], "Q": [list(q) for q in cb.Q]}
    return Certificate("crossbar", body, config, provenance)


def minor_model_body(pattern: Graph, branch: dict, host_edge: dict) -> dict:
    """branch: pattern vertex -> host vertices; host_edge: pattern edge id -> host path."""
    return {"vertices": [[v, sorted(branch[v])] for v in pattern.vertices],
            "edges": [[*pattern.endpoints(e), list(host_edge[e])] for e in pattern.edge_ids()]}


def pos_certificate(p: PathOfSets, model: dict, config: dict, provenance: dict) -> Certificate:
    body = {"strength": p.strength, "minor": model,
            "clusters": [sorted(c) for c in p.clusters],
            "A": [list(a) for a in p.A], "B": [list(b) for b in p.B],
            "connectors": [[list(q) for q in fam] for fam in p.connectors]}
    return Certificate("pos", body, config, provenance)


def expander_certificate(emb: ExpanderEmbedding, config: dict, provenance: dict) -> Certificate:
    body = emb.to_json()
    body.pop("schema_version")
    return Certificate("expander", body, config, provenance)


def _validate_expander(b: dict, host: Graph) -> CertificateReport:
    N = b["N"]
    pattern = Graph(range(N), [(u, v) for u, v, _, _ in b["edges"]])
    vmap = {u: set(p) for u, p in b["vertices"]}
    emap = {e: tuple(p) for e, (_, _, _, p) in enumerate(b["edges"])}
    bad = []
    for u, p in b["vertices"]:
        if not host.is_path(p):
            bad.append(("vertices", f"image of {u} is not a host path"))
    rep = validate_minor_model(MinorModel(host, pattern, vmap, emap))
    if not rep.ok:
        bad.append(("minor-" + rep.clause, rep.detail))
    flat = [tuple(sorted(e)) for M in b["matchings"] for e in M]
    if flat != [tuple(sorted((u, v))) for u, v, _, _ in b["edges"]]:
        bad.append(("matchings", "edges do not follow the recorded matchings"))
    for j, M in enumerate(b["matchings"]):
        if sorted(x for e in M for x in e) != list(range(N)):
            bad.append(("matchings", f"matching {j} is not perfect"))
    iters = len(b["matchings"])
    if any(pattern.degree(v) > iters for v in pattern.vertices):
        bad.append(("degree", "a vertex has more edges than iterations"))
    claim = b.get("expansion") or {}
    if claim.get("status") == "certified":
        if N > EXACT_CAP:
            bad.append(("expansion", "exact certification claimed above the enumeration cap"))
        else:
            a, _ = exact_expansion(pattern)
            if a < Fraction(1, 2) or str(a) != claim.get("alpha"):
                bad.append(("expansion", f"claimed alpha {claim.get('alpha')}, recomputed {a}"))
    return CertificateReport(not bad, bad)


def _pattern_of(body: dict) -> tuple[Graph, dict, dict]:
    verts = [v for v, _ in body["minor"]["vertices"]]
    branch = {v: set(img) for v, img in body["minor"]["vertices"]}
    edges = {}
    paths = {}
    for eid, (u, v, path) in enumerate(body["minor"]["edges"]):
        edges[eid] = (u, v)
        paths[eid] = tuple(path)
    return Graph(verts, edges), branch, paths


def validate_certificate(cert: Certificate, host: Graph, cap: int = 12, samples: int = 200,
                         seed: int = 0) -> CertificateReport:
    b = cert.body
    try:
        if cert.kind == "crossbar":
            cb = Crossbar(host, tuple(b["A"]), tuple(b["B"]), tuple(b["X"]),
                          [tuple(p) for p in b["P"]], [tuple(q) for q in b["Q"]])
            rep = validate_crossbar(cb)
            return CertificateReport(rep.ok, list(rep.violations))
        if cert.kind == "expander":
            return _validate_expander(b, host)
        pattern, branch, paths = _pattern_of(b)
    except (KeyError, TypeError, ValueError) as exc:
        return CertificateReport(False, [("schema", str(exc))])
    mrep = validate_minor_model(MinorModel(host, pattern, branch, paths))
    if not mrep.ok:
        return CertificateReport(False, [("minor-" + mrep.clause, mrep.detail)])
    try:
        p = PathOfSets(pattern, b["clusters"], b["A"], b["B"], b["connectors"], b["strength"])
    except (KeyError, TypeError) as exc:
        return CertificateReport(False, [("schema", str(exc))])
    rep = validate_pos(p, b["strength"], cap=cap, samples=samples, seed=seed)
    return CertificateReport(rep.ok, list(rep.violations))


def pos_from_certificate(cert: Certificate) -> PathOfSets:
    pattern, _, _ = _pattern_of(cert.body)
    b = cert.body
    return PathOfSets(pattern, b["clusters"], b["A"], b["B"], b["connectors"], b["strength"])
