"""Witness-path minimisation and the crossbar-or-pseudo-grid dichotomy."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .graph import Graph, quotient
from .linkage import NodeFlow, max_node_disjoint_paths
from .pos import PoSReport


def _pair(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


def path_edges(paths: Iterable[Sequence[int]]) -> set[tuple[int, int]]:
    return {_pair(a, b) for p in paths for a, b in zip(p, p[1:])}


@dataclass
class WitnessPaths:
    """kappa node-disjoint A-B paths P and kappa node-disjoint A-X paths Q.

    P[i] and Q[i] share their first vertex, which lies in A.
    """
    P: list
    Q: list

    def __post_init__(self):
        self.P = [tuple(p) for p in self.P]
        self.Q = [tuple(q) for q in self.Q]

    @property
    def kappa(self) -> int:
        return len(self.P)

    def edge_count(self) -> int:
        return len(path_edges(self.P) | path_edges(self.Q))

    def violations(self, H: Graph, A, B, X) -> list[str]:
        A, B, X = set(A), set(B), set(X)
        bad = []
        if len(self.P) != len(self.Q):
            bad.append("P and Q differ in size")
        for name, fam, end in (("P", self.P, B), ("Q", self.Q, X)):
            seen = set()
            for i, p in enumerate(fam):
                if not H.is_path(p):
                    bad.append(f"{name}[{i}] is not a path")
                    continue
                if p[0] not in A or p[-1] not in end:
                    bad.append(f"{name}[{i}] has wrong endpoints")
                if seen & set(p):
                    bad.append(f"{name}[{i}] is not disjoint from earlier paths")
                seen |= set(p)
        for i, p in enumerate(self.P):
            if set(p) & X:
                bad.append(f"P[{i}] touches X")
        for i, q in enumerate(self.Q):
            if len(set(q) & X) != 1:
                bad.append(f"Q[{i}] must contain exactly one X vertex")
        for i, (p, q) in enumerate(zip(self.P, self.Q)):
            if p and q and p[0] != q[0]:
                bad.append(f"P[{i}] and Q[{i}] do not share their A endpoint")
        return bad


def initial_witnesses(H: Graph, A, B, X) -> WitnessPaths:
    """Any pair of witness families, found by two max-flow computations."""
    A, B, X = sorted(A), sorted(B), sorted(X)
    if not len(A) == len(B) == len(X):
        raise ValueError("A, B and X must have equal size")
    k = len(A)
    rp = max_node_disjoint_paths(H, A, B, allowed=set(H.vertices) - set(X))
    rq = max_node_disjoint_paths(H, A, X)
    if rp.value < k or rq.value < k:
        raise ValueError(f"no witness families: {rp.value} A-B and {rq.value} A-X paths for kappa={k}")
    P = sorted(rp.paths)
    byA = {q[0]: q for q in rq.paths}
    return WitnessPaths(P, [byA[p[0]] for p in P])


class _CostFlow:
    """Unit node-capacity min-cost flow via shortest augmenting paths.

    Each Dijkstra phase is followed by augmentation along every zero reduced
    cost path that a depth-first search can still find.
    """

    def __init__(self, H: Graph, allowed: set, cost_of):
        verts = sorted(allowed)
        self.verts = verts
        self.idx = {v: i for i, v in enumerate(verts)}
        n = 2 * len(verts) + 2
        self.s, self.t = n - 2, n - 1
        self.head: list[int] = []
        self.cap: list[int] = []
        self.cost: list[int] = []
        self.adj: list[list[int]] = [[] for _ in range(n)]
        for i in range(len(verts)):
            self._arc(2 * i, 2 * i + 1, 0)
        for v in verts:
            i = self.idx[v]
            for w in H.neighbors(v):
                j = self.idx.get(w)
                if j is not None:
                    self._arc(2 * i + 1, 2 * j, cost_of(v, w))

    def _arc(self, u: int, v: int, c: int):
        k = len(self.head)
        self.head += [v, u]
        self.cap += [1, 0]
        self.cost += [c, -c]
        self.adj[u].append(k)
        self.adj[v].append(k + 1)

    def run(self, sources, targets, need: int) -> list[tuple]:
        for a in sorted(sources):
            self._arc(self.s, 2 * self.idx[a], 0)
        for b in sorted(targets):
            self._arc(2 * self.idx[b] + 1, self.t, 0)
        n = len(self.adj)
        head, cap, cost, adj = self.head, self.cap, self.cost, self.adj
        pot = [0] * n
        flow = 0
        big = 1 << 40
        while flow < need:
            dist = [big] * n
            dist[self.s] = 0
            heap = [(0, self.s)]
            while heap:
                d, x = heapq.heappop(heap)
                if d > dist[x]:
                    continue
                for k in adj[x]:
                    if cap[k] > 0:
                        y = head[k]
                        nd = d + cost[k] + pot[x] - pot[y]
                        if nd < dist[y]:
                            dist[y] = nd
                            heapq.heappush(heap, (nd, y))
            if dist[self.t] >= big:
                break
            top = dist[self.t]
            for x in range(n):
                pot[x] += dist[x] if dist[x] < top else top
            dead = [False] * n
            while flow < need and self._augment(pot, dead):
                flow += 1
        if flow < need:
            raise RuntimeError(f"only {flow} of {need} paths exist")
        return self._paths()

    def _augment(self, pot, dead) -> bool:
        head, cap, cost, adj = self.head, self.cap, self.cost, self.adj
        on = [False] * len(adj)
        stack = [(self.s, iter(adj[self.s]))]
        trail: list[int] = []
        on[self.s] = True
        while stack:
            x, it = stack[-1]
            if x == self.t:
                for k in trail:
                    cap[k] -= 1
                    cap[k ^ 1] += 1
                return True
            for k in it:
                y = head[k]
                if cap[k] > 0 and not dead[y] and not on[y] and cost[k] + pot[x] - pot[y] == 0:
                    on[y] = True
                    trail.append(k)
                    stack.append((y, iter(adj[y])))
                    break
            else:
                dead[x] = True
                on[x] = False
                stack.pop()
                if trail:
                    trail.pop()
        return False

    def _paths(self) -> list[tuple]:
        head, cap, adj = self.head, self.cap, self.adj
        nreal = 2 * len(self.verts)
        out = []
        for k0 in adj[self.s]:
            if k0 % 2 or cap[k0] > 0:
                continue
            x = head[k0]
            path = []
            while x != self.t:
                if x < nreal and x % 2 == 0:
                    path.append(self.verts[x // 2])
                x = next(head[k] for k in adj[x] if k % 2 == 0 and cap[k] == 0)
            out.append(tuple(path))
        return out


def _reroute(H: Graph, sources, targets, allowed: set, keep: set) -> list[tuple]:
    flow = _CostFlow(H, allowed, lambda u, v: 0 if _pair(u, v) in keep else 1)
    return flow.run(sources, targets, len(sources))


def select_min_edge_witnesses(H: Graph, A, B, X, P0, Q0, max_rounds: int = 100) -> WitnessPaths:
    """Locally minimise the number of edges of the union of P and Q.

    Alternately fixes one family and reroutes the other by a minimum-cost
    node-disjoint flow that charges only for edges outside the fixed family.
    A move is kept only if it strictly shrinks the union.
    """
    w = WitnessPaths(P0, Q0)
    bad = w.violations(H, A, B, X)
    if bad:
        raise ValueError("invalid witness families: " + "; ".join(bad))
    Xs = set(X)
    no_x = set(H.vertices) - Xs
    allv = set(H.vertices)
    best = w.edge_count()
    for _ in range(max_rounds):
        improved = False
        newP = _reroute(H, A, B, no_x, path_edges(w.Q))
        byA = {p[0]: p for p in newP}
        cand = WitnessPaths([byA[q[0]] for q in w.Q], w.Q)
        if cand.edge_count() < best:
            w, best, improved = cand, cand.edge_count(), True
        newQ = _reroute(H, A, X, allv, path_edges(w.P))
        byA = {q[0]: q for q in newQ}
        cand = WitnessPaths(w.P, [byA[p[0]] for p in w.P])
        if cand.edge_count() < best:
            w, best, improved = cand, cand.edge_count(), True
        if not improved:
            break
    return w


# dichotomy results

@dataclass
class Crossbar:
    host: Graph
    A: tuple
    B: tuple
    X: tuple
    P: list  # node-disjoint A-B paths
    Q: list  # Q[i] starts on P[i] and ends in X

    @property
    def width(self) -> int:
        return len(self.P)

    def to_json(self) -> dict:
        return {"kind": "crossbar", "width": self.width,
                "P": [list(p) for p in self.P], "Q": [list(q) for q in self.Q]}


@dataclass
class PseudoGrid:
    host: Graph
    A: tuple
    B: tuple
    X: tuple
    witness: WitnessPaths
    rho: int
    layers: list  # layers[i]: indices into witness.P
    rest: list  # indices of the surviving paths
    tails: list  # (index into witness.P, tail of its Q path ending in X)
    misses: list = field(default_factory=list)  # per layer, tails avoiding it
    not_good: list = field(default_factory=list)  # per layer, selected tails that are not good in it
    not_final_good: int = 0

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def kappa(self) -> int:
        return self.witness.kappa

    def layer_paths(self, i: int) -> list[tuple]:
        return [self.witness.P[j] for j in self.layers[i]]

    def to_json(self) -> dict:
        return {"kind": "pseudo_grid", "rho": self.rho, "depth": self.depth,
                "layers": [list(l) for l in self.layers], "rest": list(self.rest),
                "tails": [[j, list(t)] for j, t in self.tails], "misses": list(self.misses)}


class DichotomyError(Exception):
    pass


def _crossbar_from_flow(H: Graph, Hi: Graph, flow_paths, rep_to_idx: dict, P: list, X: set):
    Pstar, Qstar = [], []
    for q in flow_paths:
        last = max(t for t, v in enumerate(q) if v in rep_to_idx)
        j = rep_to_idx[q[last]]
        Pj = set(P[j])
        U = set(q[last + 1:]) | Pj
        path = H.bfs_path(Pj, X & U, allowed=U)
        if path is None:
            raise DichotomyError("expanded flow path does not reach X")
        Pstar.append(P[j])
        Qstar.append(path)
    order = sorted(range(len(Pstar)), key=lambda t: Pstar[t])
    return [Pstar[t] for t in order], [Qstar[t] for t in order]


def build_pseudo_grid_or_crossbar(H: Graph, A, B, X, w: WitnessPaths, D: int, rho: int):
    """Either a crossbar of width rho or a pseudo-grid of depth D.

    Round i contracts every surviving path of P to one vertex and asks for rho
    node-disjoint paths from the contracted vertices to X. If they exist they
    expand into a crossbar; otherwise a minimum separator peels off at most
    rho paths as the next layer.
    """
    kappa = w.kappa
    if rho < 1 or D < 1:
        raise ValueError("rho and D must be positive")
    if 2 * rho * D > kappa:
        raise ValueError(f"need D <= kappa/(2 rho); got D={D}, rho={rho}, kappa={kappa}")
    A, B, X = tuple(sorted(A)), tuple(sorted(B)), tuple(sorted(X))
    Xs = set(X)
    P, Q = w.P, w.Q
    alive = list(range(kappa))
    layers: list[list[int]] = []
    good: dict[int, list[bool]] = {j: [] for j in alive}
    tails: dict[int, tuple] = {}
    for _ in range(D):
        Hi, remap = quotient(H, [P[j] for j in alive])
        rep_to_idx = {remap[P[j][0]]: j for j in alive}
        res = NodeFlow(Hi).run(rep_to_idx, Xs, limit=rho)
        if res.value >= rho:
            Pstar, Qstar = _crossbar_from_flow(H, Hi, res.paths, rep_to_idx, P, Xs)
            cb = Crossbar(H, A, B, X, Pstar, Qstar)
            rep = validate_crossbar(cb)
            if not rep.ok:
                raise DichotomyError(f"crossbar failed validation: {rep.violations}")
            return cb
        J = res.separator
        layer = sorted(rep_to_idx[v] for v in J if v in rep_to_idx)
        layer_vs = {v for j in layer for v in P[j]}
        Vi = (J - set(rep_to_idx)) | layer_vs
        alive = [j for j in alive if j not in set(layer)]
        rest_vs = {v for j in alive for v in P[j]}
        for j in alive:
            q = Q[j]
            hits = [t for t, v in enumerate(q) if v in Vi]
            if not hits:
                raise DichotomyError(f"separator misses Q[{j}]")
            t = hits[-1]
            tails[j] = q[t:]
            good[j].append(q[t] in layer_vs)
            if set(tails[j]) & rest_vs:
                raise DichotomyError(f"tail of Q[{j}] meets a surviving path")
        layers.append(layer)
    need = math.ceil(kappa / 4)
    if len(alive) < need:
        raise DichotomyError(f"only {len(alive)} surviving paths, need {need}")
    layer_sets = [{v for j in lay for v in P[j]} for lay in layers]

    def missed(j):
        return sum(1 for s in layer_sets if not s & set(tails[j]))

    chosen = sorted(alive, key=lambda j: (missed(j), j))[:need]
    chosen.sort()
    misses = [sum(1 for j in chosen if not s & set(tails[j])) for s in layer_sets]
    not_good = [sum(1 for j in chosen if not good[j][i]) for i in range(D)]
    not_final = sum(1 for j in chosen if not good[j][-1])
    pg = PseudoGrid(H, A, B, X, w, rho, layers, alive, [(j, tails[j]) for j in chosen],
                    misses, not_good, not_final)
    rep = validate_pseudo_grid(pg, rho)
    if not rep.ok:
        raise DichotomyError(f"pseudo-grid failed validation: {rep.violations}")
    return pg


# validators

def validate_crossbar(cb: Crossbar) -> PoSReport:
    H = cb.host
    A, B, X = set(cb.A), set(cb.B), set(cb.X)
    bad = []
    if len(cb.P) != len(cb.Q):
        bad.append(("shape", "P and Q differ in size"))
    for i, p in enumerate(cb.P):
        if not H.is_path(p):
            bad.append(("path", f"P[{i}] is not a path"))
        elif p[0] not in A or p[-1] not in B:
            bad.append(("ends", f"P[{i}] does not join A to B"))
    for i, q in enumerate(cb.Q):
        if not H.is_path(q):
            bad.append(("path", f"Q[{i}] is not a path"))
        elif q[-1] not in X:
            bad.append(("ends", f"Q[{i}] does not end in X"))
    for fam, name in ((cb.P, "P"), (cb.Q, "Q")):
        seen: set = set()
        for i, p in enumerate(fam):
            if seen & set(p):
                bad.append(("disjoint", f"{name}[{i}] meets an earlier {name} path"))
            seen |= set(p)
    for i, (p, q) in enumerate(zip(cb.P, cb.Q)):
        meet = set(p) & set(q)
        if len(meet) != 1 or q[0] not in meet:
            bad.append(("own", f"Q[{i}] must meet P[{i}] exactly in its first vertex"))
        for j, p2 in enumerate(cb.P):
            if j != i and set(p2) & set(q):
                bad.append(("foreign", f"Q[{i}] meets P[{j}]"))
    return PoSReport(not bad, bad)


def validate_pseudo_grid(pg: PseudoGrid, rho: int | None = None) -> PoSReport:
    rho = pg.rho if rho is None else rho
    H, P, Q = pg.host, pg.witness.P, pg.witness.Q
    X = set(pg.X)
    bad = []
    used: set = set()
    for i, lay in enumerate(pg.layers):
        if len(lay) > rho:
            bad.append(("layer-size", f"layer {i} has {len(lay)} > {rho} paths"))
        if used & set(lay):
            bad.append(("layer-disjoint", f"layer {i} reuses a path"))
        used |= set(lay)
    if set(pg.rest) & used or set(pg.rest) | used != set(range(len(P))):
        bad.append(("rest", "surviving paths are not the complement of the layers"))
    need = math.ceil(pg.kappa / 4)
    if len(pg.tails) != need:
        bad.append(("size", f"{len(pg.tails)} tails, expected {need}"))
    rest_vs = {v for j in pg.rest for v in P[j]}
    seen: set = set()
    idx = set()
    for j, t in pg.tails:
        if j not in pg.rest:
            bad.append(("tail-owner", f"tail {j} does not belong to a surviving path"))
        if j in idx:
            bad.append(("tail-owner", f"two tails for path {j}"))
        idx.add(j)
        q = Q[j]
        if len(t) == 0 or tuple(q[len(q) - len(t):]) != tuple(t):
            bad.append(("tail", f"tail {j} is not a final segment of its Q path"))
        elif t[-1] not in X:
            bad.append(("tail", f"tail {j} does not end in X"))
        if set(t) & rest_vs:
            bad.append(("P1", f"tail {j} meets a surviving path"))
        if set(t) & seen:
            bad.append(("tail-disjoint", f"tail {j} meets another tail"))
        seen |= set(t)
    for i, lay in enumerate(pg.layers):
        lv = {v for j in lay for v in P[j]}
        m = sum(1 for _, t in pg.tails if not lv & set(t))
        if m > 2 * rho:
            bad.append(("P2", f"{m} tails miss layer {i}"))
    return PoSReport(not bad, bad)
