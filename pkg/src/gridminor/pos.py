"""Path-of-Sets systems (weak, strong and hairy): validation, stitching and
the weak-to-strong boosting cascade."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .graph import Graph
from .linkage import (
    DEFAULT_CAP, DEFAULT_SAMPLES, check_edge_well_linked, check_linked, check_node_well_linked,
    max_node_disjoint_paths,
)


@dataclass
class PathOfSets:
    host: Graph
    clusters: list  # vertex sets
    A: list  # nail sets, one tuple per cluster
    B: list
    connectors: list  # connectors[i]: paths from B[i] to A[i+1]
    strength: str = "weak"

    def __post_init__(self):
        self.clusters = [frozenset(c) for c in self.clusters]
        self.A = [tuple(sorted(a)) for a in self.A]
        self.B = [tuple(sorted(b)) for b in self.B]
        self.connectors = [[tuple(p) for p in fam] for fam in self.connectors]

    @property
    def length(self) -> int:
        return len(self.clusters)

    @property
    def width(self) -> int:
        return len(self.A[0]) if self.A else 0

    def cluster_graph(self, i: int) -> Graph:
        return self.host.subgraph(self.clusters[i])


@dataclass
class HairyPoS:
    pos: PathOfSets
    hairs: list  # S_i vertex sets
    X: list
    Y: list
    hair_paths: list  # hair_paths[i]: paths from X[i] to Y[i]

    def __post_init__(self):
        self.hairs = [frozenset(s) for s in self.hairs]
        self.X = [tuple(sorted(x)) for x in self.X]
        self.Y = [tuple(sorted(y)) for y in self.Y]
        self.hair_paths = [[tuple(p) for p in fam] for fam in self.hair_paths]

    @property
    def length(self) -> int:
        return self.pos.length

    @property
    def width(self) -> int:
        return self.pos.width


@dataclass
class PoSReport:
    ok: bool
    violations: list = field(default_factory=list)  # (clause, detail)
    verdicts: dict = field(default_factory=dict)

    def clauses(self) -> set:
        return {c for c, _ in self.violations}


class StitchError(Exception):
    def __init__(self, message, separator=None):
        super().__init__(message)
        self.separator = separator


class BoostError(Exception):
    def __init__(self, kind, message, cut=None, widths=None):
        super().__init__(message)
        self.kind = kind  # "underflow" | "exhausted" | "precondition"
        self.cut = cut
        self.widths = widths


def _structure_violations(p: PathOfSets) -> list:
    bad = []
    host = p.host
    if p.length == 0:
        return [("shape", "no clusters")]
    if len(p.A) != p.length or len(p.B) != p.length or len(p.connectors) != p.length - 1:
        return [("shape", "nail or connector lists do not match the cluster count")]
    w = p.width
    owner = {}
    for i, C in enumerate(p.clusters):
        if not C:
            bad.append(("cluster", f"cluster {i} is empty"))
            continue
        if not all(host.has_vertex(v) for v in C):
            bad.append(("cluster", f"cluster {i} has vertices outside the host"))
            continue
        if not host.is_connected(C):
            bad.append(("connected", f"cluster {i} is not connected"))
        for v in C:
            if v in owner:
                bad.append(("disjoint-clusters", f"clusters {owner[v]} and {i} share {v}"))
            owner[v] = i
    for i in range(p.length):
        A, B = set(p.A[i]), set(p.B[i])
        if len(A) != w or len(B) != w:
            bad.append(("width", f"cluster {i} nails have sizes {len(A)}, {len(B)} instead of {w}"))
        if not (A | B) <= p.clusters[i]:
            bad.append(("nails", f"nails of cluster {i} leave the cluster"))
        if A & B:
            bad.append(("nails", f"A and B of cluster {i} intersect"))
    used = {}
    for i, fam in enumerate(p.connectors):
        if len(fam) != w:
            bad.append(("width", f"connector family {i} has {len(fam)} paths"))
        starts = {q[0] for q in fam}
        ends = {q[-1] for q in fam}
        if starts != set(p.B[i]):
            bad.append(("connector-ends", f"connectors {i} do not start exactly at B_{i}"))
        if ends != set(p.A[i + 1]):
            bad.append(("connector-ends", f"connectors {i} do not end exactly at A_{i + 1}"))
        for j, q in enumerate(fam):
            if not host.is_path(q) or len(q) < 2:
                bad.append(("connector-path", f"connector {i}.{j} is not a host path"))
                continue
            for v in q[1:-1]:
                if v in owner:
                    bad.append(("connector-interior", f"connector {i}.{j} passes through cluster {owner[v]} at {v}"))
            for v in q:
                if v in used and used[v] != (i, j):
                    bad.append(("connector-disjoint", f"connectors {used[v]} and {(i, j)} share {v}"))
                used[v] = (i, j)
    return bad


def validate_pos(p: PathOfSets, strength: str | None = None, cap: int = DEFAULT_CAP,
                 samples: int = DEFAULT_SAMPLES, seed: int = 0) -> PoSReport:
    """Check structure exactly and in-cluster linkage through the verifiers."""
    strength = strength or p.strength
    bad = _structure_violations(p)
    verdicts = {}
    if any(c in ("shape", "cluster") for c, _ in bad):
        return PoSReport(False, bad, verdicts)
    for i in range(p.length):
        CG = p.cluster_graph(i)
        A, B = p.A[i], p.B[i]
        if not (set(A) | set(B)) <= p.clusters[i] or set(A) & set(B):
            continue
        if strength == "weak":
            v = check_edge_well_linked(CG, A + B, cap=cap, samples=samples, seed=seed)
            verdicts[f"{i}:edge_well_linked"] = v
            if not v.ok:
                bad.append(("weak", f"A_{i} + B_{i} not edge-well-linked in C_{i}"))
        elif strength == "strong":
            for name, T in (("A", A), ("B", B)):
                v = check_node_well_linked(CG, T, cap=cap, samples=samples, seed=seed)
                verdicts[f"{i}:{name}_node_well_linked"] = v
                if not v.ok:
                    bad.append(("strong", f"{name}_{i} not node-well-linked in C_{i}"))
            v = check_linked(CG, A, B, cap=cap, samples=samples, seed=seed)
            verdicts[f"{i}:linked"] = v
            if not v.ok:
                bad.append(("strong", f"(A_{i}, B_{i}) not linked in C_{i}"))
        else:
            bad.append(("strength", f"unknown strength {strength}"))
    return PoSReport(not bad, bad, verdicts)


def validate_hairy_pos(h: HairyPoS, cap: int = DEFAULT_CAP, samples: int = DEFAULT_SAMPLES,
                       seed: int = 0) -> PoSReport:
    rep = validate_pos(h.pos, "strong", cap, samples, seed)
    bad = list(rep.violations)
    verdicts = dict(rep.verdicts)
    p = h.pos
    host = p.host
    ell, w = p.length, p.width
    if not (len(h.hairs) == len(h.X) == len(h.Y) == len(h.hair_paths) == ell):
        bad.append(("shape", "hair lists do not match the cluster count"))
        return PoSReport(False, bad, verdicts)
    clusters = set().union(*p.clusters)
    connector_vs = {v for fam in p.connectors for q in fam for v in q}
    owner = {}
    for i, S in enumerate(h.hairs):
        if not S or not all(host.has_vertex(v) for v in S):
            bad.append(("hair", f"hair cluster {i} is empty or leaves the host"))
            continue
        if not host.is_connected(S):
            bad.append(("connected", f"hair cluster {i} is not connected"))
        if S & clusters or S & connector_vs:
            bad.append(("hair-disjoint", f"hair cluster {i} meets a cluster or connector"))
        for v in S:
            if v in owner:
                bad.append(("hair-disjoint", f"hair clusters {owner[v]} and {i} share {v}"))
            owner[v] = i
    used = {}
    for i in range(ell):
        X, Y = set(h.X[i]), set(h.Y[i])
        if len(X) != w or len(Y) != w:
            bad.append(("width", f"hair anchors of {i} have wrong size"))
        if not Y <= h.hairs[i]:
            bad.append(("anchors", f"Y_{i} not inside S_{i}"))
        if not X <= p.clusters[i]:
            bad.append(("anchors", f"X_{i} not inside C_{i}"))
        if X & (set(p.A[i]) | set(p.B[i])):
            bad.append(("anchors", f"X_{i} meets the nails of C_{i}"))
        fam = h.hair_paths[i]
        if len(fam) != w or {q[0] for q in fam} != X or {q[-1] for q in fam} != Y:
            bad.append(("hair-paths", f"hair paths {i} do not join X_{i} to Y_{i}"))
        for j, q in enumerate(fam):
            if not host.is_path(q):
                bad.append(("hair-paths", f"hair path {i}.{j} is not a host path"))
                continue
            for v in q[1:-1]:
                if v in clusters or v in owner:
                    bad.append(("hair-interior", f"hair path {i}.{j} enters a cluster at {v}"))
            for v in q:
                if v in connector_vs:
                    bad.append(("hair-disjoint", f"hair path {i}.{j} meets a connector at {v}"))
                if v in used and used[v] != (i, j):
                    bad.append(("hair-disjoint", f"hair paths {used[v]} and {(i, j)} share {v}"))
                used[v] = (i, j)
        if Y <= h.hairs[i] and h.hairs[i]:
            v = check_node_well_linked(host.subgraph(h.hairs[i]), sorted(Y), cap=cap, samples=samples, seed=seed)
            verdicts[f"{i}:Y_node_well_linked"] = v
            if not v.ok:
                bad.append(("hair-linkage", f"Y_{i} not node-well-linked in S_{i}"))
        if X <= p.clusters[i] and not X & set(p.A[i]):
            v = check_linked(p.cluster_graph(i), p.A[i], sorted(X), cap=cap, samples=samples, seed=seed)
            verdicts[f"{i}:AX_linked"] = v
            if not v.ok:
                bad.append(("hair-linkage", f"(A_{i}, X_{i}) not linked in C_{i}"))
    return PoSReport(not bad, bad, verdicts)


def stitch(p: PathOfSets, selected: list) -> PathOfSets:
    """Join the odd clusters through the even ones.

    selected[k] = (A', B') for cluster 2k (0-based), all of one size w'.
    Connector k of the result runs along the old connectors into cluster
    2k+1, through a linkage inside it, and out along the next connectors.
    """
    ell = p.length
    keep = list(range(0, ell, 2))
    if len(selected) != len(keep):
        raise ValueError(f"need {len(keep)} selections, got {len(selected)}")
    sizes = {len(a) for a, _ in selected} | {len(b) for _, b in selected}
    if len(sizes) != 1:
        raise ValueError("selected subsets must share one size")
    for k, (a, b) in enumerate(selected):
        if not set(a) <= set(p.A[keep[k]]) or not set(b) <= set(p.B[keep[k]]):
            raise ValueError(f"selection {k} is not a subset of the nails")
    connectors = []
    for k in range(len(keep) - 1):
        c = keep[k]
        start_of = {q[0]: q for q in p.connectors[c]}
        end_of = {q[-1]: q for q in p.connectors[c + 1]}
        first = [start_of[b] for b in sorted(selected[k][1])]
        second = [end_of[a] for a in sorted(selected[k + 1][0])]
        X_hat = [q[-1] for q in first]
        Y_hat = [q[0] for q in second]
        mid = p.clusters[c + 1]
        res = max_node_disjoint_paths(p.host, X_hat, Y_hat, allowed=mid)
        if res.value < len(X_hat):
            raise StitchError(f"only {res.value} of {len(X_hat)} paths route through cluster {c + 1}",
                              res.separator)
        by_x = {q[0]: q for q in res.paths}
        by_y = {q[0]: q for q in second}
        fam = []
        for q1 in first:
            inner = by_x[q1[-1]]
            q2 = by_y[inner[-1]]
            fam.append(q1 + inner[1:] + q2[1:])
        connectors.append(fam)
    return PathOfSets(p.host, [p.clusters[c] for c in keep], [a for a, _ in selected],
                      [b for _, b in selected], connectors, p.strength)


def boost_widths(w: int, delta: int = 4, alpha: Fraction = Fraction(1), fractions=None):
    """Target widths (w', w'', w~) of the boosting cascade."""
    if fractions is None:
        f1 = f2 = Fraction(3) * alpha / (10 * delta)
        f3 = alpha / (2 * delta)
    else:
        f1, f2, f3 = (Fraction(f) for f in fractions)
    w1 = math.ceil(f1 * w)
    w2 = math.ceil(f2 * w1)
    w3 = math.floor(f3 * w2)
    return w1, w2, w3


def _pick_well_linked(G: Graph, pool, size, rng, attempt, cap, samples, seed):
    pool = sorted(pool)
    cand = pool[:size] if attempt == 0 else sorted(rng.sample(pool, size))
    v = check_node_well_linked(G, cand, cap=cap, samples=samples, seed=seed)
    return (cand if v.ok else None), v


def boost_to_strong(p: PathOfSets, delta: int = 4, retries: int = 20, seed: int = 0,
                    fractions=None, cap: int = DEFAULT_CAP, samples: int = DEFAULT_SAMPLES) -> PathOfSets:
    """Select node-well-linked nail subsets so the result is a strong PoS.

    Every candidate is verified; failures draw a fresh seeded subset. The
    first attempt takes lowest ids.
    """
    if p.host.max_degree() > delta:
        raise BoostError("precondition", f"host degree {p.host.max_degree()} exceeds {delta}")
    w1, w2, w3 = boost_widths(p.width, delta, fractions=fractions)
    if w3 < 1 or w2 > w1 or w1 > p.width:
        raise BoostError("underflow", f"widths {w1}, {w2}, {w3} from w={p.width}", widths=(w1, w2, w3))
    rng = random.Random(seed)
    ell = p.length
    graphs = [p.cluster_graph(i) for i in range(ell)]
    last = None
    for attempt in range(retries + 1):
        A_new = [None] * ell
        B_new = [None] * ell
        conns = []
        failed = False
        for i in range(ell - 1):
            Bt, last = _pick_well_linked(graphs[i], p.B[i], w1, rng, attempt, cap, samples, seed)
            if Bt is None:
                failed = True
                break
            start_of = {q[0]: q for q in p.connectors[i]}
            fam = [start_of[b] for b in Bt]
            At, last = _pick_well_linked(graphs[i + 1], [q[-1] for q in fam], w2, rng, attempt, cap, samples, seed)
            if At is None:
                failed = True
                break
            fam = sorted((q for q in fam if q[-1] in set(At)), key=lambda q: q[0])
            fam = fam[:w3] if attempt == 0 else sorted(rng.sample(fam, w3), key=lambda q: q[0])
            conns.append(fam)
            B_new[i] = tuple(q[0] for q in fam)
            A_new[i + 1] = tuple(q[-1] for q in fam)
        if failed:
            continue
        At, last = _pick_well_linked(graphs[0], p.A[0], w1, rng, attempt, cap, samples, seed)
        Bt, last2 = _pick_well_linked(graphs[-1], p.B[-1], w1, rng, attempt, cap, samples, seed)
        if At is None or Bt is None:
            last = last if At is None else last2
            continue
        A_new[0] = tuple(At[:w3]) if attempt == 0 else tuple(sorted(rng.sample(At, w3)))
        B_new[-1] = tuple(Bt[:w3]) if attempt == 0 else tuple(sorted(rng.sample(Bt, w3)))
        cand = PathOfSets(p.host, p.clusters, A_new, B_new, conns, "strong")
        linked_ok = True
        for i in range(ell):
            v = check_linked(graphs[i], cand.A[i], cand.B[i], cap=cap, samples=samples, seed=seed)
            if not v.ok:
                last = v
                linked_ok = False
                break
        if linked_ok:
            return cand
    cut = last.witness if last is not None else None
    raise BoostError("exhausted", f"no verified selection after {retries + 1} attempts", cut=cut,
                     widths=(w1, w2, w3))
