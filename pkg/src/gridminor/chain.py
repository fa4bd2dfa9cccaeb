"""Long chains of pairwise-intersecting index sets, and assembly of a weak
Path-of-Sets system from such a chain of clusters."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .graph import Graph
from .pos import PathOfSets


class ChainError(Exception):
    pass


@dataclass
class IndexSets:
    N: int
    sets: list  # frozensets of elements of range(N)
    D_hat: int
    w_hat: int

    def __post_init__(self):
        self.sets = [frozenset(s) for s in self.sets]

    @property
    def M(self) -> int:
        return len(self.sets)

    def violations(self) -> list[str]:
        bad = []
        for i, s in enumerate(self.sets):
            if len(s) < self.D_hat:
                bad.append(f"set {i} has {len(s)} < {self.D_hat} elements")
            if any(not 0 <= x < self.N for x in s):
                bad.append(f"set {i} leaves the ground set")
        return bad

    def hypotheses(self) -> list[str]:
        N, D, w, M = self.N, self.D_hat, self.w_hat, self.M
        bad = []
        if N < 3 * w:
            bad.append(f"N={N} < 3w={3 * w}")
        if D * D < 4 * N * w:
            bad.append(f"D^2={D * D} < 4Nw={4 * N * w}")
        if M * D < 2 * N * w:
            bad.append(f"MD={M * D} < 2Nw={2 * N * w}")
        return bad

    def guaranteed(self) -> int:
        return math.ceil(self.M * self.D_hat / (2 * self.N))


@dataclass
class Chain:
    indices: list
    shared: list = field(default_factory=list)  # shared[j] = S_{i_j} & S_{i_{j+1}}

    def __len__(self):
        return len(self.indices)


def intersection_dag(idx: IndexSets) -> dict:
    """Successor lists: i -> j for i < j whenever |S_i & S_j| >= w_hat."""
    succ = {i: [] for i in range(idx.M)}
    for i in range(idx.M):
        for j in range(i + 1, idx.M):
            if len(idx.sets[i] & idx.sets[j]) >= idx.w_hat:
                succ[i].append(j)
    return succ


def dag_layers(M: int, succ: dict) -> list[list[int]]:
    """Peel sources repeatedly; layer k holds the vertices whose longest
    incoming path has k edges."""
    indeg = [0] * M
    for i in succ:
        for j in succ[i]:
            indeg[j] += 1
    layers = []
    cur = sorted(i for i in range(M) if indeg[i] == 0)
    while cur:
        layers.append(cur)
        nxt = []
        for i in cur:
            for j in succ[i]:
                indeg[j] -= 1
                if indeg[j] == 0:
                    nxt.append(j)
        cur = sorted(nxt)
    if sum(len(L) for L in layers) != M:
        raise ChainError("intersection graph has a cycle")
    return layers


def find_chain(idx: IndexSets, L: int | None = None, strict: bool = True) -> Chain:
    """Indices i_1 < ... < i_L with consecutive intersections of size >= w_hat.

    L=None returns a longest chain. With strict=True the three size
    hypotheses must hold and L may not exceed the guaranteed length.
    """
    bad = idx.violations()
    if bad:
        raise ValueError("; ".join(bad))
    hyp = idx.hypotheses()
    if strict and hyp:
        raise ValueError("; ".join(hyp))
    if strict and L is not None and L > idx.guaranteed():
        raise ValueError(f"L={L} exceeds the guaranteed length {idx.guaranteed()}")
    if idx.M == 0:
        raise ValueError("no sets")
    succ = intersection_dag(idx)
    pred = {j: [] for j in range(idx.M)}
    for i, js in succ.items():
        for j in js:
            pred[j].append(i)
    layers = dag_layers(idx.M, succ)
    layer_of = {v: k for k, lay in enumerate(layers) for v in lay}
    for k in range(1, len(layers)):
        for v in layers[k]:
            if not any(layer_of[u] == k - 1 for u in pred[v]):
                raise ChainError(f"vertex {v} of layer {k} has no in-neighbour in the layer before")
    for lay in layers:
        if any(v2 in succ[v1] for v1 in lay for v2 in lay):
            raise ChainError("a layer is not independent")
    h = len(layers)
    if not hyp and h < idx.guaranteed():
        raise ChainError(f"longest chain {h} below the guaranteed {idx.guaranteed()}")
    if L is not None and h < L:
        raise ChainError(f"longest chain has {h} sets, {L} requested")
    v = layers[-1][0]
    walk = [v]
    for k in range(h - 2, -1, -1):
        v = min(u for u in pred[v] if layer_of[u] == k)
        walk.append(v)
    walk.reverse()
    if L is not None:
        walk = walk[:L]
    shared = [idx.sets[a] & idx.sets[b] for a, b in zip(walk, walk[1:])]
    return Chain(walk, shared)


def validate_chain(idx: IndexSets, ch: Chain) -> list[str]:
    bad = []
    if any(b <= a for a, b in zip(ch.indices, ch.indices[1:])):
        bad.append("indices not increasing")
    for a, b in zip(ch.indices, ch.indices[1:]):
        if len(idx.sets[a] & idx.sets[b]) < idx.w_hat:
            bad.append(f"|S_{a} & S_{b}| < {idx.w_hat}")
    return bad


# weak Path-of-Sets assembly

@dataclass
class ClusterSlot:
    slice: int  # 1-based slice index of the cluster
    vertices: frozenset
    members: frozenset  # R indices whose segment in this slice lies in the cluster


def _segment(R: Sequence, markers: Sequence, r: int, i: int) -> tuple:
    lo, hi = markers[r][i - 1], markers[r][i]
    return tuple(R[r][lo + 1:hi])


def assemble_weak_pos(host: Graph, R: Sequence, markers: Sequence, slots: Sequence[ClusterSlot],
                      chain: Chain, w: int) -> PathOfSets:
    """Clusters of the chain become a weak Path-of-Sets system of width w.

    T_1 takes w members of the first cluster, T_j (j > 1) takes w paths shared
    by clusters j-1 and j, and T_{L+1} = T_L. Paths whose segment is a
    single vertex in a cluster where they would serve as both A and B nail
    are avoided when possible; otherwise lowest ids first.
    """
    L = len(chain)
    if L == 0:
        raise ChainError("empty chain")
    pick = [slots[i] for i in chain.indices]
    if any(b.slice <= a.slice for a, b in zip(pick, pick[1:])):
        raise ChainError("chain clusters are not in increasing slice order")
    seg = {}

    def segment(r, j):
        key = (r, pick[j].slice)
        if key not in seg:
            seg[key] = _segment(R, markers, r, pick[j].slice)
        return seg[key]

    def choose(pool, j, prev):
        pool = sorted(pool)
        if len(pool) < w:
            raise ChainError(f"only {len(pool)} paths available, width {w} requested")

        def clash(r):
            bad = len(segment(r, j)) < 2
            if j > 0 and r in prev:
                bad += len(segment(r, j - 1)) < 2
            return bad
        return sorted(pool, key=lambda r: (clash(r), r))[:w]

    T = [None] * (L + 1)
    for j in range(L):
        pool = pick[0].members if j == 0 else pick[j - 1].members & pick[j].members
        T[j] = choose(pool, j, set(T[j - 1]) if j else set())
    T[L] = T[L - 1]
    A, B, connectors = [], [], []
    for j in range(L):
        A.append(tuple(segment(r, j)[0] for r in T[j]))
        B.append(tuple(segment(r, j)[-1] for r in T[j + 1]))
    for j in range(L - 1):
        fam = []
        for r in T[j + 1]:
            path = R[r]
            a = path.index(segment(r, j)[-1])
            b = path.index(segment(r, j + 1)[0])
            fam.append(tuple(path[a:b + 1]))
        connectors.append(fam)
    for j, slot in enumerate(pick):
        for r in set(T[j]) | set(T[j + 1]):
            if not set(segment(r, j)) <= slot.vertices:
                raise ChainError(f"segment of path {r} leaves cluster {j}")
    return PathOfSets(host, [s.vertices for s in pick], A, B, connectors, "weak")
