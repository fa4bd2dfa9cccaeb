"""Unique-linkage reduction, separator numbering and slicings of path families."""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Sequence

from .graph import Graph, graph_from_paths, quotient, remap_path
from .linkage import max_node_disjoint_paths
from .pseudo_grid import Crossbar, path_edges, validate_crossbar


class SlicingError(Exception):
    pass


class NumberingError(Exception):
    def __init__(self, message, cycle=None):
        super().__init__(message)
        self.cycle = cycle


@dataclass
class UniqueLinkageInstance:
    graph: Graph
    R: list  # node-disjoint paths, first vertex in A, last in B
    Q: list  # node-disjoint paths, each meeting some R path

    def __post_init__(self):
        self.R = [tuple(r) for r in self.R]
        self.Q = [tuple(q) for q in self.Q]

    @property
    def A(self) -> tuple:
        return tuple(r[0] for r in self.R)

    @property
    def B(self) -> tuple:
        return tuple(r[-1] for r in self.R)

    def is_perfect(self) -> bool:
        on_r = {v for r in self.R for v in r}
        return on_r == set(self.graph.vertices)


# reduction

@dataclass
class Reduction:
    instance: UniqueLinkageInstance
    remap: dict  # original vertex -> reduced vertex
    shared_contractions: int
    private_contractions: int


class _DSU:
    def __init__(self):
        self.parent: dict = {}

    def find(self, x):
        p = self.parent.setdefault(x, x)
        if p != x:
            p = self.parent[x] = self.find(p)
        return p

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return True


def reduce_to_perfect_unique_linkage(R: Sequence, Q: Sequence, Q_all: Sequence | None = None) -> Reduction:
    """Contract the union of R and Q until every vertex lies on R.

    First every R edge that also lies on a path of Q_all (default Q) is
    contracted, until none is left; then each run of Q vertices off R is
    merged into a neighbouring R vertex along its Q path.
    """
    R = [tuple(r) for r in R]
    Q = [tuple(q) for q in Q]
    Q_all = Q if Q_all is None else [tuple(q) for q in Q_all]
    Hp = graph_from_paths(R + Q)
    dsu = _DSU()
    for v in Hp.vertices:
        dsu.find(v)
    shared = 0
    while True:
        qpairs = set()
        for q in Q_all:
            img = [dsu.find(v) for v in q]
            qpairs |= {(min(a, b), max(a, b)) for a, b in zip(img, img[1:]) if a != b}
        todo = []
        for r in R:
            img = [dsu.find(v) for v in r]
            todo += [(a, b) for a, b in zip(img, img[1:]) if a != b and (min(a, b), max(a, b)) in qpairs]
        if not todo:
            break
        for a, b in todo:
            shared += dsu.union(a, b)
    on_r = {dsu.find(v) for r in R for v in r}
    private = 0
    for q in Q:
        img = remap_path(q, {v: dsu.find(v) for v in q})
        t = 0
        while t < len(img):
            if img[t] in on_r:
                t += 1
                continue
            s = t
            while t < len(img) and img[t] not in on_r:
                t += 1
            anchor = img[s - 1] if s > 0 else (img[t] if t < len(img) else None)
            if anchor is None:
                raise SlicingError("a Q path does not meet any R path")
            for v in img[s:t]:
                private += dsu.union(anchor, v)
    groups: dict = {}
    for v in Hp.vertices:
        groups.setdefault(dsu.find(v), []).append(v)
    H2, remap = quotient(Hp, groups.values())
    inst = UniqueLinkageInstance(H2, [remap_path(r, remap) for r in R], [remap_path(q, remap) for q in Q])
    return Reduction(inst, remap, shared, private)


@dataclass
class UniquenessVerdict:
    status: str  # unique | not_unique | unverified
    counterexample: list | None = None

    @property
    def ok(self) -> bool:
        return self.status != "not_unique"


def _residual_cycle_linkage(inst: UniqueLinkageInstance):
    """Another linkage of a perfect instance, or None if R is unique.

    In the split network every vertex carries one unit of R-flow, so a
    different integral flow exists iff the residual graph has a directed
    cycle. Nodes are (v, 0) for in-copies and (v, 1) for out-copies.
    """
    G = inst.graph
    used = {(a, b) for r in inst.R for a, b in zip(r, r[1:])}
    succ: dict = {}
    for v in G.vertices:
        succ.setdefault((v, 1), []).append((v, 0))
        for w in G.neighbors(v):
            if (v, w) in used:
                succ.setdefault((w, 0), []).append((v, 1))
            else:
                succ.setdefault((v, 1), []).append((w, 0))
    color: dict = {}
    cycle = None
    for s0 in sorted(succ):
        if s0 in color or cycle:
            continue
        color[s0] = 1
        trail = [s0]
        stack = [iter(succ.get(s0, ()))]
        while stack and cycle is None:
            for y in stack[-1]:
                if color.get(y) == 1:
                    cycle = trail[trail.index(y):]
                    break
                if y not in color:
                    color[y] = 1
                    trail.append(y)
                    stack.append(iter(succ.get(y, ())))
                    break
            else:
                color[trail.pop()] = 2
                stack.pop()
    if cycle is None:
        return None
    arcs = set(used)
    for x, y in zip(cycle, cycle[1:] + cycle[:1]):
        if x[1] == 1 and y[1] == 0 and x[0] != y[0]:
            arcs.add((x[0], y[0]))
        elif x[1] == 0 and y[1] == 1 and x[0] != y[0]:
            arcs.discard((y[0], x[0]))
    nxt = dict(arcs)
    B = set(inst.B)
    paths = []
    for a in inst.A:
        p = [a]
        while p[-1] not in B:
            p.append(nxt[p[-1]])
        paths.append(tuple(p))
    return paths


def verify_unique_linkage(inst: UniqueLinkageInstance, cap: int | None = None) -> UniquenessVerdict:
    """Is R the only linkage between its endpoint sets?

    Perfect instances use the residual-cycle test. Otherwise: any other
    linkage misses some edge of R, so R is unique iff deleting any single R
    edge drops the maximum linkage below |R|.
    """
    G = inst.graph
    if cap is not None and G.n() > cap:
        return UniquenessVerdict("unverified")
    N = len(inst.R)
    if max_node_disjoint_paths(G, inst.A, inst.B).value < N:
        raise SlicingError("R is not a linkage of the instance")
    if inst.is_perfect():
        other = _residual_cycle_linkage(inst)
        return UniquenessVerdict("unique") if other is None else UniquenessVerdict("not_unique", other)
    for u, v in sorted(path_edges(inst.R)):
        res = max_node_disjoint_paths(G.remove_pair(u, v), inst.A, inst.B, limit=N)
        if res.value >= N:
            return UniquenessVerdict("not_unique", res.paths)
    return UniquenessVerdict("unique")


# numbering

@dataclass
class Numbering:
    graph: Graph
    R: list
    mu: dict  # vertex -> 1..n

    def order(self) -> list:
        return sorted(self.mu, key=self.mu.get)

    def separator(self, t: int) -> list:
        """Per path, the first vertex with mu >= t, or its last vertex."""
        out = []
        for r in self.R:
            out.append(next((v for v in r if self.mu[v] >= t), r[-1]))
        return out

    def violations(self) -> list[str]:
        bad = []
        for i, r in enumerate(self.R):
            if any(self.mu[a] >= self.mu[b] for a, b in zip(r, r[1:])):
                bad.append(f"mu not increasing on R[{i}]")
        n = len(self.mu)
        for t in range(1, n + 1):
            S = set(self.separator(t))
            for u, v in self.graph.edges.values():
                if u in S or v in S:
                    continue
                if (self.mu[u] < t) != (self.mu[v] < t):
                    bad.append(f"t={t}: edge {u}-{v} crosses the separator")
                    break
        return bad


def _find_cycle(succ: dict, nodes: set) -> list:
    color: dict = {}
    for s in sorted(nodes):
        if s in color:
            continue
        stack = [(s, iter(sorted(succ.get(s, ()))))]
        color[s] = 1
        trail = [s]
        while stack:
            x, it = stack[-1]
            for y in it:
                if y not in nodes:
                    continue
                if color.get(y) == 1:
                    return trail[trail.index(y):]
                if y not in color:
                    color[y] = 1
                    trail.append(y)
                    stack.append((y, iter(sorted(succ.get(y, ())))))
                    break
            else:
                color[x] = 2
                trail.pop()
                stack.pop()
    return []


def numbering_dag(inst: UniqueLinkageInstance) -> dict:
    """Successor lists of a DAG with the same reachability as the ordering graph.

    Arcs: consecutive vertices of each R path, and for every graph edge
    (u, v') between different paths, an arc from the predecessor of u on its
    path to v'.
    """
    owner, pos = {}, {}
    for i, r in enumerate(inst.R):
        for k, v in enumerate(r):
            owner[v], pos[v] = i, k
    missing = set(inst.graph.vertices) - set(owner)
    if missing:
        raise NumberingError(f"vertices off the linkage: {sorted(missing)[:5]}")
    succ: dict = {v: set() for v in owner}
    for r in inst.R:
        for a, b in zip(r, r[1:]):
            succ[a].add(b)
    for u, v in inst.graph.edges.values():
        if owner[u] == owner[v]:
            continue
        for x, y in ((u, v), (v, u)):
            if pos[x] > 0:
                succ[inst.R[owner[x]][pos[x] - 1]].add(y)
    return succ


def rs_numbering(inst: UniqueLinkageInstance) -> Numbering:
    """Topological numbering of the ordering DAG, lowest id first."""
    succ = numbering_dag(inst)
    indeg = {v: 0 for v in succ}
    for v, ys in succ.items():
        for y in ys:
            indeg[y] += 1
    heap = [v for v, d in indeg.items() if d == 0]
    heapq.heapify(heap)
    mu = {}
    while heap:
        v = heapq.heappop(heap)
        mu[v] = len(mu) + 1
        for y in succ[v]:
            indeg[y] -= 1
            if indeg[y] == 0:
                heapq.heappush(heap, y)
    if len(mu) < len(succ):
        cyc = _find_cycle(succ, set(succ) - set(mu))
        raise NumberingError("ordering graph has a cycle; the linkage is not unique", cyc)
    return Numbering(inst.graph, inst.R, mu)


# slicings

def slice_families(R: Sequence, Q: Sequence, markers: Sequence) -> list[list[int]]:
    """For each slice, the Q paths whose R-vertices all lie strictly inside it."""
    where = {}
    for i, r in enumerate(R):
        for k, v in enumerate(r):
            where[v] = (i, k)
    M = len(markers[0]) - 1 if markers else 0
    fams: list[list[int]] = [[] for _ in range(M)]
    for qi, q in enumerate(Q):
        hits = [where[v] for v in q if v in where]
        if not hits:
            continue
        for j in range(1, M + 1):
            if all(markers[i][j - 1] < k < markers[i][j] for i, k in hits):
                fams[j - 1].append(qi)
                break
    return fams


@dataclass
class Slicing:
    R: list
    Q: list
    markers: list  # markers[r]: positions on R[r], length M+1
    families: list = field(default_factory=list)

    def __post_init__(self):
        if not self.families:
            self.families = slice_families(self.R, self.Q, self.markers)

    @property
    def M(self) -> int:
        return len(self.markers[0]) - 1 if self.markers else 0

    @property
    def width(self) -> int:
        return min((len(f) for f in self.families), default=0)

    def segment(self, r: int, j: int) -> tuple:
        """Vertices of R[r] strictly between markers j-1 and j (1-based j)."""
        lo, hi = self.markers[r][j - 1], self.markers[r][j]
        return self.R[r][lo + 1:hi]

    def to_json(self) -> dict:
        return {"M": self.M, "width": self.width, "markers": [list(m) for m in self.markers],
                "families": [list(f) for f in self.families]}


def validate_slicing(s: Slicing, w_hat: int | None = None) -> list[str]:
    bad = []
    for i, (r, m) in enumerate(zip(s.R, s.markers)):
        if m[0] != 0 or m[-1] != len(r) - 1:
            bad.append(f"markers of R[{i}] do not start and end at its endpoints")
        if any(a > b for a, b in zip(m, m[1:])):
            bad.append(f"markers of R[{i}] are out of order")
    if len({len(m) for m in s.markers}) > 1:
        bad.append("paths have different marker counts")
    if s.families != slice_families(s.R, s.Q, s.markers):
        bad.append("families do not match the markers")
    if w_hat is not None and s.width < w_hat:
        bad.append(f"width {s.width} < {w_hat}")
    return bad


class _Sweep:
    """Walks t upwards, keeping the family of Q paths that lie left of S_t."""

    def __init__(self, inst: UniqueLinkageInstance, num: Numbering):
        self.inst, self.num = inst, num
        self.order = num.order()
        self.owner, self.pos = {}, {}
        for i, r in enumerate(inst.R):
            for k, v in enumerate(r):
                self.owner[v], self.pos[v] = i, k
        self.qof = {v: qi for qi, q in enumerate(inst.Q) for v in q}
        nq = len(inst.Q)
        self.ycnt = [0] * nq
        self.scnt = [0] * nq
        self.cut = [0] * len(inst.R)  # index of the S_t vertex on each path
        for r in inst.R:
            qi = self.qof.get(r[0])
            if qi is not None:
                self.scnt[qi] += 1
        self.t = 1
        self.left = set()  # the family Q^1(S_t)

    def _status(self, qi) -> bool:
        return self.ycnt[qi] > 0 and self.scnt[qi] == 0

    def step(self):
        v = self.order[self.t - 1]  # mu(v) == t joins Y
        touched = set()
        qi = self.qof.get(v)
        if qi is not None:
            self.ycnt[qi] += 1
            touched.add(qi)
        i = self.owner[v]
        r = self.inst.R[i]
        if self.cut[i] == self.pos[v] and self.pos[v] < len(r) - 1:
            for x, d in ((r[self.cut[i]], -1), (r[self.cut[i] + 1], 1)):
                qx = self.qof.get(x)
                if qx is not None:
                    self.scnt[qx] += d
                    touched.add(qx)
            self.cut[i] += 1
        self.t += 1
        gained = 0
        for qi in touched:
            now = self._status(qi)
            if now and qi not in self.left:
                self.left.add(qi)
                gained += 1
            elif not now and qi in self.left:
                raise SlicingError("left family shrank; numbering is invalid")
        if gained > 1:
            raise SlicingError("left family grew by more than one path")

    def run_until(self, target: set | None, count: int) -> bool:
        n = len(self.order)
        while True:
            have = len(self.left) if target is None else len(self.left & target)
            if have >= count:
                return have == count
            if self.t > n:
                return False
            self.step()


def compute_slicing(inst: UniqueLinkageInstance, M: int, w_hat: int,
                    numbering: Numbering | None = None, strict: bool = True) -> Slicing:
    """An M-slicing of inst.R of width at least w_hat with respect to inst.Q.

    With strict=False the size precondition is not enforced; the sweep then
    either finds the cuts anyway or raises SlicingError.
    """
    N = len(inst.R)
    if M < 1 or w_hat < 0:
        raise ValueError("M must be positive and w_hat non-negative")
    need = M * w_hat + (M + 1) * N
    if strict and len(inst.Q) < need:
        raise SlicingError(f"need {need} Q paths, have {len(inst.Q)}")
    last = [len(r) - 1 for r in inst.R]
    markers = [[0] for _ in inst.R]
    if M > 1:
        num = numbering or rs_numbering(inst)
        sw = _Sweep(inst, num)
        target = None
        count = w_hat + N
        for i in range(1, M):
            if not sw.run_until(target, count):
                raise SlicingError(f"no cut found in round {i}")
            for k in range(N):
                markers[k].append(min(sw.cut[k], last[k]))
            trial = [m + [last[k]] for k, m in enumerate(markers)]
            target = set(slice_families(inst.R, inst.Q, trial)[i])
            count = w_hat
    for k in range(N):
        markers[k].append(last[k])
    s = Slicing(inst.R, inst.Q, markers)
    bad = validate_slicing(s, w_hat)
    if bad:
        raise SlicingError("; ".join(bad))
    return s


# re-slicing a thin slice

@dataclass
class Lift:
    """How the reduced instance sits in the original host."""
    host: Graph
    A: tuple
    B: tuple
    X: tuple
    R_host: list  # aligned with instance.R
    Q_host: list  # aligned with instance.Q, each ending in X


@dataclass
class Reslice:
    inner: dict  # r -> positions of the M-1 inner markers on R[r]
    families: list  # families of the sub-slicing, as indices into the instance Q
    width: int


def _segment_bounds(s: Slicing, r: int, i: int) -> tuple[int, int]:
    return s.markers[r][i - 1] + 1, s.markers[r][i] - 1


def case2_reslice(inst: UniqueLinkageInstance, s: Slicing, i: int, kept: Sequence[int],
                  dropped: Sequence[int], q_kept: Sequence[int], M_hat: int, w_hat: int,
                  lift: Lift | None = None, rho: int | None = None, hit_bound: int | None = None):
    """Refine slice i into M_hat slices, or find a crossbar of width rho.

    kept/dropped split the segments of slice i by R index and q_kept lists the
    Q paths retained for it. Paths of q_kept avoiding every dropped segment
    are used to slice the kept segments; if there are too few of them, the
    paths that do meet dropped segments are turned into a crossbar.
    """
    seg = {r: s.segment(r, i) for r in range(len(s.R))}
    dropped_vs = {r: set(seg[r]) for r in dropped}
    all_dropped = set().union(*dropped_vs.values()) if dropped_vs else set()
    clean = [q for q in q_kept if not set(inst.Q[q]) & all_dropped]
    kept = [r for r in kept if seg[r]]
    need = M_hat * w_hat + (M_hat + 1) * len(kept)
    if len(clean) >= need:
        sub_R = [seg[r] for r in kept]
        sub_Q = [inst.Q[q] for q in clean]
        sub = UniqueLinkageInstance(graph_from_paths(sub_R + sub_Q), sub_R, sub_Q)
        ss = compute_slicing(sub, M_hat, w_hat)
        inner = {}
        for k, r in enumerate(kept):
            lo, _ = _segment_bounds(s, r, i)
            inner[r] = [lo + p for p in ss.markers[k][1:-1]]
        for r in range(len(s.R)):
            if r not in inner:
                lo, hi = _segment_bounds(s, r, i)
                inner[r] = [hi if seg[r] else s.markers[r][i]] * (M_hat - 1)
        fams = [[clean[q] for q in f] for f in ss.families]
        return Reslice(inner, fams, ss.width)
    if lift is None or rho is None:
        raise SlicingError(f"only {len(clean)} of {need} clean paths and no crossbar context")
    return _case2_crossbar(inst, seg, dropped, q_kept, lift, rho, hit_bound)


def _case2_crossbar(inst, seg, dropped, q_kept, lift: Lift, rho: int, hit_bound):
    hit_bound = 8 * rho if hit_bound is None else hit_bound
    qsets = {q: set(inst.Q[q]) for q in q_kept}
    meets = {q: [r for r in dropped if qsets[q] & set(seg[r])] for q in q_kept}
    bad = [q for q in q_kept if meets[q]]
    B2 = sorted(q for q in bad if len(meets[q]) < hit_bound)
    S2 = set(dropped)
    Pstar, Qstar = [], []
    for _ in range(rho):
        if not B2:
            break
        q = B2[0]
        r = min(x for x in meets[q] if x in S2)
        P = lift.R_host[r]
        Qh = lift.Q_host[q]
        pv = set(P)
        start = max(k for k, v in enumerate(Qh) if v in pv)
        Pstar.append(tuple(P))
        Qstar.append(tuple(Qh[start:]))
        Sj = {x for x in S2 if qsets[q] & set(seg[x])}
        Yj = {y for y in B2 if any(qsets[y] & set(seg[x]) for x in Sj)}
        S2 -= Sj
        B2 = [y for y in B2 if y not in Yj]
        for y in B2:
            if not any(qsets[y] & set(seg[x]) for x in S2):
                raise SlicingError("a remaining path lost all its dropped segments")
        used = {v for p in Pstar + Qstar for v in p}
        for x in S2:
            if used & set(lift.R_host[x]):
                raise SlicingError("crossbar touches a remaining dropped path")
        for y in B2:
            if used & set(lift.Q_host[y]):
                raise SlicingError("crossbar touches a remaining candidate path")
    if len(Pstar) < rho:
        raise SlicingError(f"crossbar construction stalled at width {len(Pstar)}")
    order = sorted(range(rho), key=lambda k: Pstar[k])
    cb = Crossbar(lift.host, lift.A, lift.B, lift.X, [Pstar[k] for k in order], [Qstar[k] for k in order])
    rep = validate_crossbar(cb)
    if not rep.ok:
        raise SlicingError(f"crossbar failed validation: {rep.violations}")
    return cb


def refine_slicing(s: Slicing, refinements: dict) -> Slicing:
    """Replace each refined slice i (1-based) by its sub-slices."""
    markers = []
    for r in range(len(s.R)):
        m = [0]
        for i in range(1, s.M + 1):
            if i in refinements:
                m += refinements[i].inner[r]
            m.append(s.markers[r][i])
        markers.append(m)
    return Slicing(s.R, s.Q, markers)
