"""Cut-matching game expanders, their embedding into a hairy Path-of-Sets
system, and exact or spectral expansion checks."""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .graph import Graph, MinorModel, validate_minor_model
from .linkage import NodeFlow
from .pos import HairyPoS

EXACT_CAP = 20
STRATEGIES = ("random_balanced", "spectral")
MATCHERS = ("random", "adversarial-greedy")


def default_cap(N: int) -> int:
    """10 * ceil(log2(N)^2), at least 1."""
    return max(1, 10 * math.ceil(math.log2(N) ** 2)) if N > 1 else 1


# expansion

@dataclass
class ExpansionResult:
    status: str  # certified | refuted | bound
    alpha: Fraction | float | None
    witness: frozenset = frozenset()
    mode: str = "exact"

    @property
    def certified(self) -> bool:
        return self.status == "certified"

    def to_json(self) -> dict:
        a = self.alpha
        return {"status": self.status, "mode": self.mode,
                "alpha": str(a) if isinstance(a, Fraction) else a, "witness": sorted(self.witness)}


def _pair_counts(H: Graph) -> tuple[list, dict]:
    verts = list(H.vertices)
    pos = {v: i for i, v in enumerate(verts)}
    mult: dict = {}
    for e in H.edge_ids():
        u, v = H.endpoints(e)
        key = (pos[u], pos[v])
        mult[key] = mult.get(key, 0) + 1
    return verts, mult


def exact_expansion(H: Graph) -> tuple[Fraction, frozenset]:
    """min |E(S, V-S)| / |S| over 1 <= |S| <= n/2, with a minimizing S."""
    verts, mult = _pair_counts(H)
    n = len(verts)
    if n < 2:
        raise ValueError("expansion needs at least two vertices")
    if n > EXACT_CAP:
        raise ValueError(f"exact expansion is limited to {EXACT_CAP} vertices")
    masks = np.arange(1, 1 << n, dtype=np.int64)
    size = np.bitwise_count(masks).astype(np.int64)
    keep = size <= n // 2
    masks, size = masks[keep], size[keep]
    cut = np.zeros_like(masks)
    for (a, b), m in mult.items():
        cut += m * (((masks >> a) ^ (masks >> b)) & 1)
    k = int(np.argmin(cut / size))
    S = frozenset(verts[i] for i in range(n) if masks[k] >> i & 1)
    return Fraction(int(cut[k]), int(size[k])), S


def spectral_lower_bound(H: Graph) -> float:
    """Cheeger-style bound: alpha >= d_min * lambda_2 / 2 for the normalized Laplacian."""
    verts, mult = _pair_counts(H)
    n = len(verts)
    A = np.zeros((n, n))
    for (a, b), m in mult.items():
        A[a, b] += m
        A[b, a] += m
    deg = A.sum(axis=1)
    if n < 2 or deg.min() == 0:
        return 0.0
    d = 1 / np.sqrt(deg)
    L = np.eye(n) - d[:, None] * A * d[None, :]
    lam = np.linalg.eigvalsh(L)
    return max(0.0, float(deg.min() * lam[1] / 2))


def check_expansion(H: Graph, mode: str = "exact", alpha: Fraction = Fraction(1, 2)) -> ExpansionResult:
    """Exact mode certifies or refutes alpha-expansion; spectral mode only
    reports a lower bound and never certifies."""
    if H.n() < 2:
        return ExpansionResult("certified", None, frozenset(), mode)
    if mode == "exact":
        a, S = exact_expansion(H)
        return ExpansionResult("certified" if a >= alpha else "refuted", a, S, mode)
    if mode == "spectral":
        return ExpansionResult("bound", spectral_lower_bound(H), frozenset(), mode)
    raise ValueError(f"unknown mode {mode}")


@dataclass
class SeparatorReport:
    ok: bool
    minimum: int
    bound: Fraction
    witness: tuple  # (A, B, S)


def min_balanced_separator(H: Graph) -> tuple[int, tuple]:
    """Smallest S such that V - S splits into A, B with no A-B edge and
    |A|, |B| <= 2n/3. Either side may be empty."""
    verts = list(H.vertices)
    n = len(verts)
    pos = {v: i for i, v in enumerate(verts)}
    adj = [0] * n
    for e in H.edge_ids():
        u, v = H.endpoints(e)
        adj[pos[u]] |= 1 << pos[v]
        adj[pos[v]] |= 1 << pos[u]
    lim = 2 * n // 3
    full = (1 << n) - 1
    for k in range(n + 1):
        for S in itertools.combinations(range(n), k):
            smask = sum(1 << i for i in S)
            rest = full & ~smask
            comps = []
            while rest:
                low = rest & -rest
                comp, frontier = low, low
                while frontier:
                    nxt = 0
                    f = frontier
                    while f:
                        b = f & -f
                        nxt |= adj[b.bit_length() - 1]
                        f ^= b
                    frontier = nxt & rest & ~comp
                    comp |= frontier
                comps.append(comp)
                rest &= ~comp
            side = _split(comps, n - k, lim)
            if side is not None:
                A = [verts[i] for i in range(n) if side >> i & 1]
                B = [verts[i] for i in range(n) if (full & ~smask & ~side) >> i & 1]
                return k, (A, B, [verts[i] for i in S])
    raise AssertionError("S = V always qualifies")


def _split(comps: list, total: int, lim: int):
    """Union of components with size in [total - lim, lim], as a bit mask."""
    reach = {0: 0}
    for c in comps:
        sz = bin(c).count("1")
        for s, m in list(reach.items()):
            if s + sz <= lim and s + sz not in reach:
                reach[s + sz] = m | c
    for s, m in sorted(reach.items()):
        if total - s <= lim:
            return m
    return None


def check_separator_bound(H: Graph, d: int | None = None) -> SeparatorReport:
    if H.n() > EXACT_CAP:
        raise ValueError(f"separator enumeration is limited to {EXACT_CAP} vertices")
    if d is None:
        d = max((H.degree(v) for v in H.vertices), default=0)
    bound = Fraction(H.n(), 24 * max(d, 1))
    k, wit = min_balanced_separator(H)
    return SeparatorReport(k >= bound, k, bound, wit)


# cut-matching game

def _power_vector(n: int, mult: dict, rng: random.Random, iters: int = 300) -> np.ndarray:
    A = np.zeros((n, n))
    for (a, b), m in mult.items():
        A[a, b] += m
        A[b, a] += m
    L = np.diag(A.sum(axis=1)) - A
    c = 2 * A.sum(axis=1).max() + 1
    Mop = c * np.eye(n) - L
    x = np.array([rng.gauss(0, 1) for _ in range(n)])
    for _ in range(iters):
        x -= x.mean()
        x = Mop @ x
        norm = np.linalg.norm(x)
        if norm == 0:
            break
        x /= norm
    return x - x.mean()


def cut_player_partition(H: Graph, strategy: str = "spectral", seed: int = 0) -> tuple[tuple, tuple]:
    """Balanced bipartition (Z, Z') of V(H).

    spectral: power iteration for the Fiedler direction of the Laplacian,
    split at the median. With no edges there is no spectral signal and the
    random balanced split is used instead.
    """
    verts = list(H.vertices)
    n = len(verts)
    if n % 2:
        raise ValueError("the cut player needs an even number of vertices")
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy}")
    rng = random.Random(seed)
    if strategy == "spectral" and H.m() > 0:
        _, mult = _pair_counts(H)
        x = _power_vector(n, mult, rng)
        order = sorted(range(n), key=lambda i: (x[i], i))
    else:
        order = list(range(n))
        rng.shuffle(order)
    Z = tuple(sorted(verts[i] for i in order[:n // 2]))
    Zp = tuple(sorted(verts[i] for i in order[n // 2:]))
    return Z, Zp


def _match(H: Graph, Z, Zp, matcher: str, rng: random.Random) -> list[tuple]:
    if matcher == "random":
        other = list(Zp)
        rng.shuffle(other)
        return [tuple(sorted(p)) for p in zip(Z, other)]
    if matcher == "adversarial-greedy":
        free = set(Zp)
        out = []
        for z in Z:
            nz = set(H.neighbors(z))

            def score(y):
                return (-H.multiplicity(z, y), -len(nz & set(H.neighbors(y))), y)
            y = min(free, key=score)
            free.remove(y)
            out.append(tuple(sorted((z, y))))
        return out
    raise ValueError(f"unknown matcher {matcher}")


@dataclass
class CutMatchingState:
    N: int
    cap: int
    seed: int
    matchings: list = field(default_factory=list)  # per iteration: list of pairs
    partitions: list = field(default_factory=list)
    expansion: ExpansionResult | None = None

    @property
    def iterations(self) -> int:
        return len(self.matchings)

    @property
    def edges(self) -> list:
        return [e for M in self.matchings for e in M]

    @property
    def certified(self) -> bool:
        return self.expansion is not None and self.expansion.certified

    def graph(self) -> Graph:
        return Graph(range(self.N), self.edges)

    def add(self, partition, matching):
        self.partitions.append(partition)
        self.matchings.append(list(matching))
        G = self.graph()
        assert max((G.degree(v) for v in G.vertices), default=0) <= self.iterations

    def to_json(self) -> dict:
        return {"N": self.N, "cap": self.cap, "seed": self.seed, "iterations": self.iterations,
                "matchings": [[list(e) for e in M] for M in self.matchings],
                "expansion": self.expansion.to_json() if self.expansion else None}


def _assess(state: CutMatchingState) -> ExpansionResult:
    G = state.graph()
    if G.n() <= EXACT_CAP:
        return check_expansion(G, "exact")
    return check_expansion(G, "spectral")


def play_cut_matching(N: int, strategy: str = "spectral", matcher: str = "random",
                      cap: int | None = None, seed: int = 0) -> CutMatchingState:
    """Play until the graph is certified a 1/2-expander or the cap is hit.

    Certification is exact for N <= 20; above that only a spectral bound is
    recorded and the game runs to the cap.
    """
    if N < 2 or N % 2:
        raise ValueError("N must be even and at least 2")
    state = CutMatchingState(N, cap or default_cap(N), seed)
    rng = random.Random(seed)
    while state.iterations < state.cap:
        G = state.graph()
        Z, Zp = cut_player_partition(G, strategy, rng.randrange(2 ** 32))
        state.add((Z, Zp), _match(G, Z, Zp, matcher, rng))
        state.expansion = _assess(state)
        if state.certified:
            break
    return state


# embedding into a hairy Path-of-Sets system

class EmbeddingError(Exception):
    def __init__(self, message, cut=None):
        super().__init__(message)
        self.cut = cut


@dataclass
class ExpanderEmbedding:
    hairy: HairyPoS
    state: CutMatchingState
    R: list  # R[u]: host path carrying expander vertex u
    edge_paths: list  # per pattern edge id: host path
    edge_iteration: list  # per pattern edge id: iteration (cluster index)
    representatives: list  # per iteration: {u: y_j(u)}
    routes: list  # per iteration: {u: Q_j(u)}

    @property
    def pattern(self) -> Graph:
        return self.state.graph()

    def model(self) -> MinorModel:
        return MinorModel(self.hairy.pos.host, self.pattern,
                          {u: set(p) for u, p in enumerate(self.R)},
                          dict(enumerate(self.edge_paths)))

    def to_json(self) -> dict:
        return {"schema_version": 1, "N": self.state.N,
                "vertices": [[u, list(p)] for u, p in enumerate(self.R)],
                "edges": [[*self.pattern.endpoints(e), self.edge_iteration[e], list(p)]
                          for e, p in enumerate(self.edge_paths)],
                "matchings": [[list(e) for e in M] for M in self.state.matchings],
                "expansion": self.state.expansion.to_json() if self.state.expansion else None}


def _linkage(G: Graph, allowed, A, B, need: int, what: str) -> list[tuple]:
    res = NodeFlow(G, allowed).run(A, B, limit=need)
    if res.value < need:
        raise EmbeddingError(f"{what}: only {res.value} of {need} disjoint paths", res.separator)
    return res.paths


def _crossbar(host: Graph, C: frozenset, starts, B, X, N: int, j: int):
    """N disjoint paths from `starts` to B inside C - X, then one path from
    each of them to a distinct X vertex, internally avoiding all of them."""
    P = _linkage(host, C - set(X), starts, B, N, f"cluster {j} linkage")
    on = {v: k for k, p in enumerate(P) for v in p}
    top = max(host.vertices) + 1
    free = [v for v in C if v not in on]
    edges = []
    for v in free:
        for y in host.neighbors(v):
            if y in on:
                edges.append((top + on[y], v))
            elif y in C and v < y:
                edges.append((v, y))
    aux = Graph(list(free) + [top + k for k in range(len(P))], sorted(set(edges)))
    paths = _linkage(aux, None, [top + k for k in range(len(P))], X, N, f"cluster {j} crossbar")
    Qs = {}
    for q in paths:
        k = q[0] - top
        if len(q) == 1:
            raise EmbeddingError(f"cluster {j}: degenerate crossbar path")
        first = min(v for v in P[k] if host.multiplicity(v, q[1]))
        Qs[k] = (first,) + tuple(q[1:])
    return P, Qs


def embed_expander_in_hairy_pos(h: HairyPoS, N: int | None = None, strategy: str = "spectral",
                                seed: int = 0, cap: int | None = None) -> ExpanderEmbedding:
    """Play the cut-matching game with cluster j and hair S_j serving
    iteration j, and return the resulting expander model."""
    p = h.pos
    host = p.host
    N = p.width if N is None else N
    if N < 2 or N % 2 or N > p.width:
        raise ValueError("N must be even, at least 2 and at most the width")
    cap = default_cap(N) if cap is None else cap
    if p.length < cap:
        raise ValueError(f"length {p.length} is below the iteration cap {cap}")
    rng = random.Random(seed)
    state = CutMatchingState(N, cap, seed)
    R: list = [()] * N
    ends = list(p.A[0][:N])  # ends[u]: where R[u] enters the current cluster
    edge_paths, edge_iter, reps, routes = [], [], [], []
    for j in range(cap):
        P, Qs = _crossbar(host, p.clusters[j], ends, p.B[j], h.X[j], N, j)
        by_start = {q[0]: k for k, q in enumerate(P)}
        k_of = [by_start[ends[u]] for u in range(N)]
        R = [R[u] + P[k_of[u]] for u in range(N)]
        hair = {fam[0]: fam for fam in h.hair_paths[j]}
        Qj = {u: Qs[k_of[u]] + hair[Qs[k_of[u]][-1]][1:] for u in range(N)}
        yj = {u: Qj[u][-1] for u in range(N)}
        Z, Zp = cut_player_partition(state.graph(), strategy, rng.randrange(2 ** 32))
        inner = _linkage(host, h.hairs[j], [yj[u] for u in Z], [yj[u] for u in Zp], N // 2,
                         f"hair {j} routing")
        back = {y: u for u, y in yj.items()}
        matching = []
        for q in inner:
            u, v = back[q[0]], back[q[-1]]
            matching.append((u, v))
            edge_paths.append(Qj[u] + tuple(q[1:]) + tuple(reversed(Qj[v]))[1:])
            edge_iter.append(j)
        state.add((Z, Zp), matching)
        reps.append(yj)
        routes.append(Qj)
        state.expansion = _assess(state)
        if state.certified or j + 1 == cap:
            break
        conn = {q[0]: q for q in p.connectors[j]}
        for u in range(N):
            q = conn[R[u][-1]]
            R[u] = R[u] + q[1:-1]
            ends[u] = q[-1]
    return ExpanderEmbedding(h, state, R, edge_paths, edge_iter, reps, routes)


def validate_embedding(emb: ExpanderEmbedding) -> list[str]:
    """Minor-model check plus confinement of every iteration to its cluster,
    crossbar and hair."""
    bad = []
    rep = validate_minor_model(emb.model())
    if not rep.ok:
        bad.append(f"minor model {rep.clause}: {rep.detail}")
    h = emb.hairy
    on_R = {v for r in emb.R for v in r}
    for e, path in enumerate(emb.edge_paths):
        j = emb.edge_iteration[e]
        allowed = set(h.pos.clusters[j]) | set(h.hairs[j]) | {v for q in h.hair_paths[j] for v in q}
        if not set(path[1:-1]) <= allowed - on_R:
            bad.append(f"edge {e} leaves iteration {j}'s cluster, crossbar and hair")
    G = emb.pattern
    if max((G.degree(v) for v in G.vertices), default=0) > emb.state.iterations:
        bad.append("degree exceeds the iteration count")
    if len(emb.state.matchings) != len(emb.representatives):
        bad.append("matching count differs from the iteration count")
    return bad
