"""Unit-capacity disjoint-path flows and well-linkedness verifiers."""

from __future__ import annotations

import itertools
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

from .graph import Graph

INF = 1 << 30
DEFAULT_CAP = 12
DEFAULT_SAMPLES = 200


@dataclass
class LinkageResult:
    value: int
    paths: list
    separator: set | None  # vertices (node version) or edge ids (edge version)


@dataclass
class WellLinkedVerdict:
    status: str  # verified_exact | verified_sampled | refuted
    witness: dict | None = None
    trials: int = 0

    @property
    def ok(self) -> bool:
        return self.status != "refuted"

    def to_json(self) -> dict:
        out = {"status": self.status, "trials": self.trials}
        if self.witness is not None:
            out["witness"] = {k: sorted(v) if isinstance(v, (set, frozenset, list, tuple)) else v
                              for k, v in self.witness.items()}
        return out


class _Network:
    """Residual network with paired arcs; arc k and k ^ 1 are mutual reverses."""

    def __init__(self, n_nodes: int):
        self.adj: list[list[int]] = [[] for _ in range(n_nodes)]
        self.head: list[int] = []
        self.cap: list[int] = []

    def add_node(self) -> int:
        self.adj.append([])
        return len(self.adj) - 1

    def add_arc(self, u: int, v: int, c: int, rc: int = 0) -> int:
        k = len(self.head)
        self.head += [v, u]
        self.cap += [c, rc]
        self.adj[u].append(k)
        self.adj[v].append(k + 1)
        return k

    def sort_adjacency(self):
        head = self.head
        for lst in self.adj:
            lst.sort(key=lambda k: head[k])

    def max_flow(self, s: int, t: int, limit: int = INF) -> int:
        """Dinic's algorithm; arcs are scanned in increasing head order."""
        head, cap, adj = self.head, self.cap, self.adj
        flow = 0
        n = len(adj)
        while flow < limit:
            level = [-1] * n
            level[s] = 0
            q = deque([s])
            while q:
                x = q.popleft()
                for k in adj[x]:
                    if cap[k] > 0 and level[head[k]] < 0:
                        level[head[k]] = level[x] + 1
                        q.append(head[k])
            if level[t] < 0:
                break
            it = [0] * n
            while flow < limit:
                # iterative DFS for one augmenting path in the level graph
                stack = [s]
                arcs: list[int] = []
                while stack:
                    x = stack[-1]
                    if x == t:
                        break
                    advanced = False
                    lst = adj[x]
                    while it[x] < len(lst):
                        k = lst[it[x]]
                        y = head[k]
                        if cap[k] > 0 and level[y] == level[x] + 1:
                            stack.append(y)
                            arcs.append(k)
                            advanced = True
                            break
                        it[x] += 1
                    if not advanced:
                        stack.pop()
                        level[x] = -1
                        if arcs:
                            arcs.pop()
                            it[stack[-1]] += 1
                if not stack:
                    break
                push = min(cap[k] for k in arcs)
                push = min(push, limit - flow)
                for k in arcs:
                    cap[k] -= push
                    cap[k ^ 1] += push
                flow += push
        return flow

    def reachable(self, s: int) -> set[int]:
        seen = {s}
        todo = [s]
        head, cap = self.head, self.cap
        while todo:
            x = todo.pop()
            for k in self.adj[x]:
                if cap[k] > 0 and head[k] not in seen:
                    seen.add(head[k])
                    todo.append(head[k])
        return seen


class NodeFlow:
    """Reusable vertex-capacity flow structure for one graph.

    Each vertex v becomes an arc in(v) -> out(v) of capacity 1; graph edges
    become infinite arcs, so every minimum cut is a vertex set.
    """

    def __init__(self, G: Graph, allowed: Iterable[int] | None = None):
        verts = list(G.vertices) if allowed is None else sorted(set(allowed) & set(G.vertices))
        self.G = G
        self.verts = verts
        self.idx = {v: i for i, v in enumerate(verts)}
        net = _Network(2 * len(verts))
        for v in verts:
            i = self.idx[v]
            net.add_arc(2 * i, 2 * i + 1, 1)
        for v in verts:
            i = self.idx[v]
            for w in G.neighbors(v):
                j = self.idx.get(w)
                if j is not None:
                    net.add_arc(2 * i + 1, 2 * j, INF)
        net.sort_adjacency()
        self.base_head = list(net.head)
        self.base_cap = list(net.cap)
        self.base_adj = [list(a) for a in net.adj]
        self.net = net

    def run(self, A: Iterable[int], B: Iterable[int], limit: int = INF,
            want_paths: bool = True, want_cut: bool = True) -> LinkageResult:
        A = sorted({a for a in A if a in self.idx})
        B = sorted({b for b in B if b in self.idx})
        net = _Network(0)
        net.head = list(self.base_head)
        net.cap = list(self.base_cap)
        net.adj = [list(a) for a in self.base_adj]
        s = net.add_node()
        t = net.add_node()
        for a in A:
            net.add_arc(s, 2 * self.idx[a], INF)
        for b in B:
            net.add_arc(2 * self.idx[b] + 1, t, INF)
        value = net.max_flow(s, t, limit) if A and B else 0
        sep = None
        if want_cut and value < limit:
            R = net.reachable(s)
            sep = {v for v in self.verts if 2 * self.idx[v] in R and 2 * self.idx[v] + 1 not in R}
        paths = self._paths(net, s, t) if want_paths else []
        return LinkageResult(value, paths, sep)

    def _paths(self, net: _Network, s: int, t: int) -> list[tuple]:
        # every arc was added with zero reverse capacity, so the flow on an
        # even (forward) arc k equals cap[k ^ 1]
        head, cap, adj = net.head, net.cap, net.adj
        n_real = 2 * len(self.verts)
        paths = []
        for k0 in adj[s]:
            if k0 % 2 or cap[k0 ^ 1] == 0:
                continue
            x = head[k0]
            path = []
            while x != t:
                if x < n_real and x % 2 == 0:
                    path.append(self.verts[x // 2])
                nxt = next(k for k in adj[x] if k % 2 == 0 and cap[k ^ 1] > 0)
                cap[nxt ^ 1] -= 1
                x = head[nxt]
            paths.append(tuple(path))
        return sorted(paths)


class EdgeFlow:
    """Reusable edge-capacity flow for a multigraph; one unit per edge."""

    def __init__(self, G: Graph, allowed: Iterable[int] | None = None):
        verts = list(G.vertices) if allowed is None else sorted(set(allowed) & set(G.vertices))
        self.G = G
        self.verts = verts
        self.idx = {v: i for i, v in enumerate(verts)}
        net = _Network(len(verts))
        self.arc_edge: dict[int, int] = {}
        for eid in G.edge_ids():
            u, v = G.endpoints(eid)
            if u in self.idx and v in self.idx:
                k = net.add_arc(self.idx[u], self.idx[v], 1, 1)
                self.arc_edge[k] = eid
        net.sort_adjacency()
        self.base = (list(net.head), list(net.cap), [list(a) for a in net.adj])

    def run(self, A: Iterable[int], B: Iterable[int], limit: int = INF,
            want_paths: bool = True, want_cut: bool = True) -> LinkageResult:
        A = sorted({a for a in A if a in self.idx})
        B = sorted({b for b in B if b in self.idx})
        if set(A) & set(B):
            raise ValueError("edge-disjoint paths need disjoint terminal sets")
        net = _Network(0)
        net.head, net.cap, net.adj = list(self.base[0]), list(self.base[1]), [list(a) for a in self.base[2]]
        s = net.add_node()
        t = net.add_node()
        for a in A:
            net.add_arc(s, self.idx[a], INF)
        for b in B:
            net.add_arc(self.idx[b], t, INF)
        value = net.max_flow(s, t, limit) if A and B else 0
        sep = None
        if want_cut and value < limit:
            R = net.reachable(s)
            sep = set()
            for k, eid in self.arc_edge.items():
                u, v = net.head[k ^ 1], net.head[k]
                if (u in R) != (v in R):
                    sep.add(eid)
        paths = self._paths(net, s, B) if want_paths else []
        return LinkageResult(value, paths, sep)

    def _paths(self, net: _Network, s: int, B) -> list[tuple]:
        out: dict[int, list[int]] = {}
        for k, eid in self.arc_edge.items():
            u, v = net.head[k ^ 1], net.head[k]
            if net.cap[k] == 0:
                out.setdefault(u, []).append(v)
            elif net.cap[k ^ 1] == 0:
                out.setdefault(v, []).append(u)
        for lst in out.values():
            lst.sort(reverse=True)
        Bset = {self.idx[b] for b in B}
        paths = []
        for k0 in net.adj[s]:
            if k0 % 2:
                continue
            ia = net.head[k0]
            for _ in range(net.cap[k0 ^ 1]):
                walk = [ia]
                x = ia
                while x not in Bset:
                    x = out[x].pop()
                    walk.append(x)
                paths.append(_loop_erase([self.verts[i] for i in walk]))
        return sorted(paths)


def _loop_erase(walk: list) -> tuple:
    out: list = []
    pos: dict = {}
    for v in walk:
        if v in pos:
            cut = pos[v]
            for x in out[cut + 1:]:
                del pos[x]
            del out[cut + 1:]
        else:
            pos[v] = len(out)
            out.append(v)
    return tuple(out)


def max_node_disjoint_paths(G: Graph, A: Iterable[int], B: Iterable[int],
                            allowed: Iterable[int] | None = None, limit: int = INF) -> LinkageResult:
    """Maximum family of node-disjoint A-B paths with a minimum vertex separator."""
    return NodeFlow(G, allowed).run(A, B, limit)


def max_edge_disjoint_paths(G: Graph, A: Iterable[int], B: Iterable[int],
                            allowed: Iterable[int] | None = None, limit: int = INF) -> LinkageResult:
    """Maximum family of edge-disjoint A-B paths with a minimum edge cut."""
    return EdgeFlow(G, allowed).run(A, B, limit)


# well-linkedness verifiers

def _equal_pairs(T: list, kmax: int):
    """Unordered disjoint pairs (T1, T2) with |T1| = |T2| = k <= kmax."""
    for k in range(1, kmax + 1):
        for T1 in itertools.combinations(T, k):
            rest = [t for t in T if t not in T1]
            for T2 in itertools.combinations(rest, k):
                if T1 < T2:
                    yield T1, T2


def _sampled_pairs(T: list, samples: int, seed: int, kmax: int):
    rng = random.Random(seed)
    n = len(T)
    for t in T:
        yield (t,), tuple(x for x in T if x != t)
    for _ in range(samples):
        k = rng.randint(1, kmax)
        pick = rng.sample(T, 2 * k)
        yield tuple(sorted(pick[:k])), tuple(sorted(pick[k:]))
    for _ in range(max(1, samples // 10)):
        perm = list(T)
        rng.shuffle(perm)
        h = n // 2
        yield tuple(sorted(perm[:h])), tuple(sorted(perm[h:]))


def _check_pairs(flow, pairs, demand_cap: int | None, exact: bool) -> WellLinkedVerdict:
    trials = 0
    for T1, T2 in pairs:
        need = min(len(T1), len(T2))
        if demand_cap is not None:
            need = min(need, demand_cap)
        if need == 0:
            continue
        trials += 1
        res = flow.run(T1, T2, limit=need, want_paths=False, want_cut=True)
        if res.value < need:
            return WellLinkedVerdict("refuted", {"T1": list(T1), "T2": list(T2), "cut": res.separator,
                                                 "value": res.value, "demand": need}, trials)
    return WellLinkedVerdict("verified_exact" if exact else "verified_sampled", None, trials)


def check_node_well_linked(G: Graph, T: Iterable[int], cap: int = DEFAULT_CAP,
                           samples: int = DEFAULT_SAMPLES, seed: int = 0,
                           allowed: Iterable[int] | None = None) -> WellLinkedVerdict:
    T = sorted(set(T))
    if any(not G.has_vertex(t) for t in T):
        raise ValueError("terminal outside the graph")
    flow = NodeFlow(G, allowed)
    if len(T) <= 1:
        return WellLinkedVerdict("verified_exact")
    if len(T) <= cap:
        return _check_pairs(flow, _equal_pairs(T, len(T) // 2), None, True)
    return _check_pairs(flow, _sampled_pairs(T, samples, seed, len(T) // 2), None, False)


def check_edge_well_linked(G: Graph, T: Iterable[int], cap: int = DEFAULT_CAP,
                           samples: int = DEFAULT_SAMPLES, seed: int = 0,
                           allowed: Iterable[int] | None = None) -> WellLinkedVerdict:
    return check_weak_well_linked(G, T, None, cap, samples, seed, allowed)


def check_weak_well_linked(G: Graph, T: Iterable[int], w_hat: int | None, cap: int = DEFAULT_CAP,
                           samples: int = DEFAULT_SAMPLES, seed: int = 0,
                           allowed: Iterable[int] | None = None) -> WellLinkedVerdict:
    """Edge-disjoint demand min(|T1|, |T2|, w_hat); w_hat=None means uncapped.

    A refutation carries the partition (X, Y) from the minimum cut, with
    |E(X, Y)| < min(w_hat, |T & X|, |T & Y|).
    """
    if w_hat is not None and w_hat < 1:
        raise ValueError("w_hat must be at least 1")
    T = sorted(set(T))
    if any(not G.has_vertex(t) for t in T):
        raise ValueError("terminal outside the graph")
    flow = EdgeFlow(G, allowed)
    if len(T) <= 1:
        return WellLinkedVerdict("verified_exact")
    kmax = len(T) // 2 if w_hat is None else min(len(T) // 2, w_hat)
    if len(T) <= cap:
        verdict = _check_pairs(flow, _equal_pairs(T, kmax), w_hat, True)
    else:
        verdict = _check_pairs(flow, _sampled_pairs(T, samples, seed, kmax), w_hat, False)
    if verdict.status == "refuted":
        _attach_partition(flow, verdict)
    return verdict


def _attach_partition(flow: EdgeFlow, verdict: WellLinkedVerdict):
    T1 = verdict.witness["T1"]
    T2 = verdict.witness["T2"]
    net = _Network(0)
    net.head, net.cap, net.adj = list(flow.base[0]), list(flow.base[1]), [list(a) for a in flow.base[2]]
    s = net.add_node()
    t = net.add_node()
    for a in T1:
        net.add_arc(s, flow.idx[a], INF)
    for b in T2:
        net.add_arc(flow.idx[b], t, INF)
    net.max_flow(s, t)
    R = net.reachable(s)
    X = {v for v in flow.verts if flow.idx[v] in R}
    verdict.witness["X"] = X
    verdict.witness["Y"] = set(flow.verts) - X


def check_linked(G: Graph, A: Iterable[int], B: Iterable[int], cap: int = DEFAULT_CAP,
                 samples: int = DEFAULT_SAMPLES, seed: int = 0,
                 allowed: Iterable[int] | None = None) -> WellLinkedVerdict:
    """Every A' in A, B' in B are joined by min(|A'|,|B'|) node-disjoint paths."""
    A = sorted(set(A))
    B = sorted(set(B))
    if set(A) & set(B):
        raise ValueError("linkedness needs disjoint sets")
    flow = NodeFlow(G, allowed)
    kmax = min(len(A), len(B))
    if len(A) + len(B) <= cap:
        pairs = ((A1, B1) for k in range(1, kmax + 1)
                 for A1 in itertools.combinations(A, k) for B1 in itertools.combinations(B, k))
        return _check_pairs(flow, pairs, None, True)
    rng = random.Random(seed)

    def sampled():
        for a in A:
            yield (a,), tuple(B[:1])
        yield tuple(A[:kmax]), tuple(B[:kmax])
        for _ in range(samples):
            k = rng.randint(1, kmax)
            yield tuple(sorted(rng.sample(A, k))), tuple(sorted(rng.sample(B, k)))
    return _check_pairs(flow, sampled(), None, False)
