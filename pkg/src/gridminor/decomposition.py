"""Pruning path families to intersecting pairs, well-linked decomposition into
happy clusters, and geometric grouping of clusters by size."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .graph import Graph
from .linkage import DEFAULT_CAP, DEFAULT_SAMPLES, check_weak_well_linked


class DecompositionError(Exception):
    pass


def hit_table(R: Sequence, Q: Sequence) -> tuple[list[set], list[set]]:
    """r_hits[i] = Q indices meeting R[i]; q_hits[j] = R indices meeting Q[j].

    A shared vertex counts once per pair, however many vertices the two
    paths share.
    """
    qof = {}
    for j, q in enumerate(Q):
        for v in q:
            qof[v] = j
    r_hits = [set() for _ in R]
    q_hits = [set() for _ in Q]
    for i, r in enumerate(R):
        for v in r:
            j = qof.get(v)
            if j is not None:
                r_hits[i].add(j)
                q_hits[j].add(i)
    return r_hits, q_hits


@dataclass
class IntersectingPair:
    R: list
    Q: list
    kept: list  # indices into R
    discarded: list
    q_kept: list  # indices into Q
    w_hat: int
    D_hat: int
    r_count: dict = field(default_factory=dict)  # R index -> #q_kept paths met
    q_count: dict = field(default_factory=dict)  # q_kept index -> #kept paths met
    waived: list = field(default_factory=list)

    def violations(self) -> list[str]:
        bad = []
        for i in self.kept:
            if self.r_count[i] < self.w_hat:
                bad.append(f"kept path {i} meets {self.r_count[i]} < {self.w_hat}")
        for i in self.discarded:
            if self.r_count[i] > self.w_hat:
                bad.append(f"discarded path {i} meets {self.r_count[i]} > {self.w_hat}")
        for j in self.q_kept:
            if self.q_count[j] < self.D_hat:
                bad.append(f"Q path {j} meets {self.q_count[j]} < {self.D_hat}")
        if not self.waived and 2 * len(self.q_kept) < len(self.Q):
            bad.append(f"kept {len(self.q_kept)} of {len(self.Q)} Q paths")
        return bad

    def to_json(self) -> dict:
        return {"kept": self.kept, "discarded": self.discarded, "q_kept": self.q_kept,
                "w_hat": self.w_hat, "D_hat": self.D_hat, "waived": self.waived}


def intersecting_preconditions(R: Sequence, Q: Sequence, w_hat: int, D_hat: int) -> list[str]:
    _, q_hits = hit_table(R, Q)
    bad = []
    short = [j for j, h in enumerate(q_hits) if len(h) < 2 * D_hat]
    if short:
        bad.append(f"{len(short)} Q paths meet fewer than {2 * D_hat} R paths")
    if len(Q) * D_hat < 2 * len(R) * w_hat:
        bad.append(f"|Q|={len(Q)} below 2|R|w/D={2 * len(R) * w_hat / D_hat:g}")
    return bad


def prune_to_intersecting(R: Sequence, Q: Sequence, w_hat: int, D_hat: int,
                          strict: bool = True, order: str = "R-first") -> IntersectingPair:
    """Delete R paths meeting < w_hat kept Q paths and Q paths meeting < D_hat
    kept R paths until neither rule fires.

    order picks which rule is applied first in each sweep ("R-first" or
    "Q-first"); the fixpoint is the same either way.
    """
    if w_hat < 1 or D_hat < 1:
        raise ValueError("w_hat and D_hat must be positive")
    waived = intersecting_preconditions(R, Q, w_hat, D_hat)
    if strict and waived:
        raise ValueError("; ".join(waived))
    r_hits, q_hits = hit_table(R, Q)
    r_alive = set(range(len(R)))
    q_alive = set(range(len(Q)))
    rc = [len(h) for h in r_hits]
    qc = [len(h) for h in q_hits]
    removed_pairs = 0

    def drop_r():
        nonlocal removed_pairs
        hit = False
        for i in sorted(r_alive):
            if rc[i] < w_hat:
                r_alive.discard(i)
                for j in r_hits[i]:
                    if j in q_alive:
                        qc[j] -= 1
                        removed_pairs += 1
                hit = True
        return hit

    def drop_q():
        hit = False
        for j in sorted(q_alive):
            if qc[j] < D_hat:
                q_alive.discard(j)
                for i in q_hits[j]:
                    if i in r_alive:
                        rc[i] -= 1
                hit = True
        return hit

    rules = (drop_r, drop_q) if order == "R-first" else (drop_q, drop_r)
    while True:
        a = rules[0]()
        b = rules[1]()
        if not (a or b):
            break
    r_count = {i: sum(1 for j in r_hits[i] if j in q_alive) for i in range(len(R))}
    q_count = {j: sum(1 for i in q_hits[j] if i in r_alive) for j in sorted(q_alive)}
    pair = IntersectingPair([tuple(r) for r in R], [tuple(q) for q in Q], sorted(r_alive),
                            sorted(set(range(len(R))) - r_alive), sorted(q_alive),
                            w_hat, D_hat, r_count, q_count, waived)
    if not waived:
        # deleted Q paths lost >= D_hat intersections each, all charged to deleted R paths
        lost = len(Q) - len(q_alive)
        if lost * D_hat > len(R) * w_hat:
            raise DecompositionError(f"{lost} Q paths deleted, bound {len(R) * w_hat / D_hat:g}")
        bad = pair.violations()
        if bad:
            raise DecompositionError("; ".join(bad))
    return pair


# well-linked decomposition

CutOracle = Callable[[Graph, list, int], "tuple[set, set] | None"]


@dataclass
class OracleVerdict:
    status: str  # verified_exact | verified_sampled | refuted
    partition: tuple | None = None


def exact_or_sampled_oracle(cap: int = DEFAULT_CAP, samples: int = DEFAULT_SAMPLES, seed: int = 0):
    """Cut oracle backed by subset-pair enumeration (sampled above cap terminals)."""

    def oracle(C: Graph, T: list, w_hat: int) -> OracleVerdict:
        v = check_weak_well_linked(C, T, w_hat, cap=cap, samples=samples, seed=seed)
        if v.status == "refuted":
            return OracleVerdict("refuted", (set(v.witness["X"]), set(v.witness["Y"])))
        return OracleVerdict(v.status)

    return oracle


@dataclass
class ClusterDecomposition:
    host: Graph
    sigma: list
    w_hat: int
    D_hat: int
    clusters: list  # frozensets of vertices, every final cluster
    members: list  # members[c]: sigma indices inside cluster c
    out: list  # out[c]: number of deleted edges incident to cluster c
    verdicts: list  # oracle status per final cluster
    kept: list  # cluster indices with out < 4 w_hat and enough paths
    deleted: list  # edge ids of E'
    splits: int
    status: str = "ok"  # ok | oracle-incomplete
    waived: list = field(default_factory=list)

    @property
    def survivors(self) -> list:
        return sorted(i for c in self.kept for i in self.members[c])

    def gamma(self, c: int) -> list:
        return sorted({v for i in self.members[c] for v in (self.sigma[i][0], self.sigma[i][-1])})

    def ledger(self) -> dict:
        r = len(self.clusters)
        inside = {i for m in self.members for i in m}
        return {"clusters": r, "kept": len(self.kept), "deleted_edges": len(self.deleted),
                "edge_bound": (r - 1) * self.w_hat, "destroyed": len(self.sigma) - len(inside),
                "destroyed_bound": r * self.w_hat, "survivors": len(self.survivors),
                "survivor_bound": len(self.sigma) / 4}

    def ledger_violations(self) -> list[str]:
        led = self.ledger()
        bad = []
        if led["deleted_edges"] > led["edge_bound"]:
            bad.append(f"|E'|={led['deleted_edges']} > (r-1)w={led['edge_bound']}")
        if 2 * led["kept"] < led["clusters"]:
            bad.append(f"kept {led['kept']} of {led['clusters']} clusters")
        if led["destroyed"] > led["destroyed_bound"]:
            bad.append(f"destroyed {led['destroyed']} > rw={led['destroyed_bound']}")
        if 4 * led["survivors"] < len(self.sigma):
            bad.append(f"survivors {led['survivors']} < |sigma|/4")
        for c in self.kept:
            if len(self.members[c]) < self.D_hat:
                bad.append(f"kept cluster {c} holds {len(self.members[c])} < {self.D_hat} paths")
        return bad

    def to_json(self) -> dict:
        return {"w_hat": self.w_hat, "D_hat": self.D_hat, "status": self.status,
                "clusters": [sorted(c) for c in self.clusters],
                "gamma": [self.gamma(c) for c in range(len(self.clusters))],
                "members": self.members, "out": self.out, "verdicts": self.verdicts,
                "kept": self.kept, "deleted": self.deleted, "waived": self.waived}


def _inside(sigma: list, C: frozenset) -> list:
    return [i for i, p in enumerate(sigma) if all(v in C for v in p)]


def well_linked_decompose(G: Graph, sigma: Sequence, Q: Sequence, w_hat: int, D_hat: int,
                          cut_oracle=None, strict: bool = True,
                          max_splits: int = 10_000) -> ClusterDecomposition:
    """Split clusters along violating cuts until every cluster's segment
    endpoints are w_hat-weakly well-linked, then keep clusters with fewer
    than 4 w_hat deleted edges incident to them.

    The largest violating cluster is split first. Splits that leave a side
    without a whole sigma path mean the oracle returned a bad cut.
    """
    if w_hat < 1 or D_hat < 1:
        raise ValueError("w_hat and D_hat must be positive")
    sigma = [tuple(p) for p in sigma]
    Q = [tuple(q) for q in Q]
    waived = []
    if D_hat < 8 * w_hat:
        waived.append(f"D_hat={D_hat} < 8 w_hat={8 * w_hat}")
    waived += [f"intersecting: {b}" for b in intersecting_preconditions(sigma, Q, 4 * w_hat, D_hat)]
    r_hits, _ = hit_table(sigma, Q)
    short = sum(1 for h in r_hits if len(h) < 4 * w_hat)
    if short:
        waived.append(f"intersecting: {short} sigma paths meet fewer than {4 * w_hat} Q paths")
    if strict and waived:
        raise ValueError("; ".join(waived))
    oracle = cut_oracle or exact_or_sampled_oracle()

    clusters = [frozenset(G.vertices)]
    verdict_of: dict = {}
    deleted: list = []
    splits = 0
    while True:
        order = sorted(range(len(clusters)), key=lambda c: (-len(clusters[c]), min(clusters[c], default=0)))
        target = None
        for c in order:
            C = clusters[c]
            if C not in verdict_of:
                members = _inside(sigma, C)
                T = sorted({v for i in members for v in (sigma[i][0], sigma[i][-1])})
                verdict_of[C] = oracle(G.subgraph(C), T, w_hat) if len(T) > 1 else OracleVerdict("verified_exact")
            if verdict_of[C].status == "refuted":
                target = c
                break
        if target is None:
            break
        splits += 1
        if splits > max_splits:
            raise DecompositionError("split limit reached")
        C = clusters[target]
        X, Y = verdict_of[C].partition
        X, Y = frozenset(X) & C, frozenset(Y) & C
        if X | Y != C or X & Y or not X or not Y:
            raise DecompositionError("oracle returned a partition that does not cover the cluster")
        members = _inside(sigma, C)
        T = {v for i in members for v in (sigma[i][0], sigma[i][-1])}
        cut = [e for e in G.subgraph(C).edge_ids() if (G.endpoints(e)[0] in X) != (G.endpoints(e)[1] in X)]
        if len(cut) >= min(w_hat, len(T & X), len(T & Y)):
            raise DecompositionError(f"oracle returned a non-violating cut of {len(cut)} edges")
        if not _inside(sigma, X) or not _inside(sigma, Y):
            raise DecompositionError("split left a side without a whole path")
        deleted += cut
        clusters = clusters[:target] + clusters[target + 1:] + [X, Y]

    clusters.sort(key=lambda c: min(c, default=0))
    members = [_inside(sigma, C) for C in clusters]
    dset = set(deleted)
    out = []
    for C in clusters:
        out.append(sum(1 for e in dset if G.endpoints(e)[0] in C or G.endpoints(e)[1] in C))
    kept = [c for c in range(len(clusters)) if out[c] < 4 * w_hat and len(members[c]) >= D_hat]
    verdicts = [verdict_of[C].status for C in clusters]
    dec = ClusterDecomposition(G, sigma, w_hat, D_hat, clusters, members, out, verdicts, kept,
                               sorted(deleted), splits, "ok", waived)
    if not waived:
        bad = dec.ledger_violations()
        for c in range(len(clusters)):
            if out[c] < 4 * w_hat and len(members[c]) < 2 * D_hat - 4 * w_hat:
                bad.append(f"cluster {c} holds {len(members[c])} < 2D-4w paths")
        if bad:
            if any(v == "verified_sampled" for v in verdicts):
                dec.status = "oracle-incomplete"
            else:
                raise DecompositionError("; ".join(bad))
    return dec


def validate_decomposition(dec: ClusterDecomposition, cap: int = DEFAULT_CAP,
                           samples: int = DEFAULT_SAMPLES) -> list[str]:
    """Re-check a decomposition from the host graph and the paths alone."""
    bad = []
    seen: set = set()
    for c, C in enumerate(dec.clusters):
        if seen & C:
            bad.append(f"cluster {c} overlaps an earlier cluster")
        seen |= C
        if sorted(dec.members[c]) != _inside(dec.sigma, C):
            bad.append(f"cluster {c} member list is wrong")
    for c in dec.kept:
        C = dec.clusters[c]
        if len(dec.members[c]) < dec.D_hat:
            bad.append(f"kept cluster {c} is not happy: {len(dec.members[c])} < {dec.D_hat} paths")
        T = dec.gamma(c)
        if len(T) > 1:
            v = check_weak_well_linked(dec.host.subgraph(C), T, dec.w_hat, cap=cap, samples=samples)
            if v.status == "refuted":
                bad.append(f"kept cluster {c}: endpoints not {dec.w_hat}-weakly well-linked")
    for i in dec.survivors:
        if not any(i in dec.members[c] for c in dec.kept):
            bad.append(f"survivor {i} outside every kept cluster")
    return bad


# grouping clusters by size

@dataclass
class ClassGrouping:
    j: int
    members: list  # cluster keys in class j
    retained: int  # total paths held by the class
    classes: dict  # j -> (keys, mass) for every non-empty class

    def lower(self, D: int) -> float:
        return D * 2 ** self.j / 4


def size_class(size: int, D: int) -> int:
    """j with D 2^j / 4 <= size < D 2^(j+1) / 4."""
    if 4 * size < D:
        raise ValueError(f"size {size} below D/4")
    j = 0
    while 4 * size >= D * 2 ** (j + 1):
        j += 1
    return j


def group_by_class(sizes: Sequence[tuple], D: int, num_classes: int | None = None) -> ClassGrouping:
    """Bucket (key, size) pairs geometrically and keep the class of largest mass.

    Ties go to the smallest class index.
    """
    if not sizes:
        raise ValueError("no clusters to group")
    classes: dict = {}
    for key, size in sizes:
        j = size_class(size, D)
        if num_classes is not None and j >= num_classes:
            raise ValueError(f"size {size} outside the {num_classes} classes")
        keys, mass = classes.get(j, ([], 0))
        classes[j] = (keys + [key], mass + size)
    j = min(classes, key=lambda c: (-classes[c][1], c))
    keys, mass = classes[j]
    if len(keys) * D * 2 ** (j + 1) <= 4 * mass:
        raise DecompositionError("class count below mass / (D 2^(j+1) / 4)")
    if num_classes is not None and mass * num_classes < sum(s for _, s in sizes):
        raise DecompositionError("best class holds less than an even share")
    return ClassGrouping(j, keys, mass, classes)


def class_count(g: int) -> int:
    """Number of size classes for parameter g: 2 log g + 2."""
    return 2 * math.ceil(math.log2(g)) + 2 if g > 1 else 2
