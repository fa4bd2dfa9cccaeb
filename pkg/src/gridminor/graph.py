"""Undirected multigraphs with stable vertex ids, contraction, generators and
minor-model validation."""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

Path = tuple  # a tuple of vertex ids; consecutive entries adjacent


class Graph:
    """Immutable undirected multigraph.

    Vertices are integers. Edges carry integer ids and may be parallel; loops
    are rejected at construction (contractions drop them before building).
    """

    __slots__ = ("_ends", "_inc", "_nbrs", "_vertices")

    def __init__(self, vertices: Iterable[int] = (), edges=()):
        inc: dict[int, list[int]] = {int(v): [] for v in vertices}
        ends: dict[int, tuple[int, int]] = {}
        items = edges.items() if isinstance(edges, dict) else enumerate(edges)
        for eid, (u, v) in items:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            if u not in inc or v not in inc:
                raise ValueError(f"edge {eid} has an endpoint outside the vertex set")
            if eid in ends:
                raise ValueError(f"duplicate edge id {eid}")
            ends[eid] = (u, v) if u < v else (v, u)
            inc[u].append(eid)
            inc[v].append(eid)
        self._ends = ends
        self._inc = inc
        self._nbrs: dict[int, tuple[int, ...]] = {}
        self._vertices = tuple(sorted(inc))

    # basic queries

    @property
    def vertices(self) -> tuple[int, ...]:
        return self._vertices

    @property
    def edges(self) -> dict[int, tuple[int, int]]:
        return dict(self._ends)

    def n(self) -> int:
        return len(self._inc)

    def m(self) -> int:
        return len(self._ends)

    def has_vertex(self, v: int) -> bool:
        return v in self._inc

    def endpoints(self, eid: int) -> tuple[int, int]:
        return self._ends[eid]

    def edge_ids(self) -> list[int]:
        return sorted(self._ends)

    def incident(self, v: int) -> list[int]:
        return list(self._inc[v])

    def degree(self, v: int) -> int:
        return len(self._inc[v])

    def max_degree(self) -> int:
        return max((len(e) for e in self._inc.values()), default=0)

    def neighbors(self, v: int) -> tuple[int, ...]:
        """Distinct neighbours of v in increasing id order."""
        nb = self._nbrs.get(v)
        if nb is None:
            s = set()
            for eid in self._inc[v]:
                a, b = self._ends[eid]
                s.add(b if a == v else a)
            nb = tuple(sorted(s))
            self._nbrs[v] = nb
        return nb

    def multiplicity(self, u: int, v: int) -> int:
        if u not in self._inc:
            return 0
        key = (u, v) if u < v else (v, u)
        return sum(1 for eid in self._inc[u] if self._ends[eid] == key)

    def has_edge(self, u: int, v: int) -> bool:
        if u not in self._inc or v not in self._inc:
            return False
        return v in self.neighbors(u)

    def edges_between(self, u: int, v: int) -> list[int]:
        key = (u, v) if u < v else (v, u)
        return sorted(eid for eid in self._inc.get(u, ()) if self._ends[eid] == key)

    def adjacency(self) -> dict[int, tuple[int, ...]]:
        return {v: self.neighbors(v) for v in self._vertices}

    # derived graphs

    def subgraph(self, keep: Iterable[int]) -> "Graph":
        keep = set(keep)
        edges = {eid: e for eid, e in self._ends.items() if e[0] in keep and e[1] in keep}
        return Graph(sorted(v for v in keep if v in self._inc), edges)

    def remove_vertices(self, drop: Iterable[int]) -> "Graph":
        drop = set(drop)
        return self.subgraph(v for v in self._inc if v not in drop)

    def remove_edges(self, eids: Iterable[int]) -> "Graph":
        drop = set(eids)
        return Graph(self._vertices, {e: uv for e, uv in self._ends.items() if e not in drop})

    def remove_pair(self, u: int, v: int) -> "Graph":
        """Drop every parallel copy of the edge uv."""
        return self.remove_edges(self.edges_between(u, v))

    def add(self, vertices: Iterable[int] = (), edges: Iterable[tuple[int, int]] = ()) -> "Graph":
        ends = dict(self._ends)
        nxt = max(ends, default=-1) + 1
        for uv in edges:
            ends[nxt] = uv
            nxt += 1
        return Graph(list(self._vertices) + [v for v in vertices if v not in self._inc], ends)

    # connectivity

    def component_of(self, v: int, allowed: set | None = None) -> set[int]:
        seen = {v}
        todo = [v]
        while todo:
            x = todo.pop()
            for y in self.neighbors(x):
                if y not in seen and (allowed is None or y in allowed):
                    seen.add(y)
                    todo.append(y)
        return seen

    def components(self, allowed: Iterable[int] | None = None) -> list[set[int]]:
        allowed = set(self._vertices) if allowed is None else set(allowed) & set(self._inc)
        out = []
        left = set(allowed)
        for v in sorted(allowed):
            if v in left:
                comp = self.component_of(v, allowed)
                left -= comp
                out.append(comp)
        return out

    def is_connected(self, vertices: Iterable[int] | None = None) -> bool:
        vs = set(self._vertices) if vertices is None else set(vertices)
        if not vs:
            return True
        if not vs <= set(self._inc):
            return False
        return self.component_of(min(vs), vs) == vs

    def bfs_path(self, sources: Iterable[int], targets: Iterable[int], allowed: set | None = None):
        """Shortest path from any source to any target, lowest ids first."""
        targets = set(targets)
        parent: dict[int, int | None] = {}
        q = deque()
        for s in sorted(set(sources)):
            if allowed is None or s in allowed:
                parent[s] = None
                q.append(s)
        while q:
            x = q.popleft()
            if x in targets:
                path = [x]
                while parent[path[-1]] is not None:
                    path.append(parent[path[-1]])
                return tuple(reversed(path))
            for y in self.neighbors(x):
                if y not in parent and (allowed is None or y in allowed):
                    parent[y] = x
                    q.append(y)
        return None

    def edges_leaving(self, side: set) -> list[int]:
        return sorted(eid for eid, (u, v) in self._ends.items() if (u in side) != (v in side))

    def is_path(self, path: Sequence[int]) -> bool:
        if len(path) == 0 or len(set(path)) != len(path):
            return False
        if any(v not in self._inc for v in path):
            return False
        return all(self.has_edge(path[i], path[i + 1]) for i in range(len(path) - 1))

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self._vertices == other._vertices and self._ends == other._ends

    def __hash__(self):
        return hash((self._vertices, tuple(sorted(self._ends.items()))))

    def __repr__(self):
        return f"Graph(n={self.n()}, m={self.m()})"


# contraction

def quotient(G: Graph, groups: Iterable[Iterable[int]]) -> tuple[Graph, dict[int, int]]:
    """Merge each group into its smallest vertex id.

    Parallel edges are kept, loops dropped. Returns the new graph and the map
    from every old vertex to its new id.
    """
    remap = {v: v for v in G.vertices}
    for grp in groups:
        grp = list(grp)
        if not grp:
            continue
        rep = min(grp)
        for v in grp:
            if v not in remap:
                raise ValueError(f"vertex {v} not in graph")
            remap[v] = rep
    edges = {}
    for eid, (u, v) in G._ends.items():
        a, b = remap[u], remap[v]
        if a != b:
            edges[eid] = (a, b)
    return Graph(sorted(set(remap.values())), edges), remap


def contract_edge(G: Graph, eid: int) -> tuple[Graph, dict[int, int]]:
    if eid not in G._ends:
        raise KeyError(f"no edge with id {eid}")
    return quotient(G, [G._ends[eid]])


def contract_path_to_vertex(G: Graph, path: Sequence[int]) -> tuple[Graph, int]:
    if not G.is_path(path):
        raise ValueError("not a path of the graph")
    H, remap = quotient(G, [path])
    return H, remap[path[0]]


def remap_path(path: Sequence[int], remap: dict[int, int]) -> tuple[int, ...]:
    """Image of a path under a contraction, with consecutive repeats merged.

    If the image revisits a vertex the walk is loop-erased, so the result is
    again a path.
    """
    out: list[int] = []
    pos: dict[int, int] = {}
    for v in path:
        w = remap[v]
        if w in pos:
            cut = pos[w]
            for x in out[cut + 1:]:
                del pos[x]
            del out[cut + 1:]
            continue
        pos[w] = len(out)
        out.append(w)
    return tuple(out)


# path families

@dataclass(frozen=True)
class PathFamily:
    paths: tuple
    mode: str = "node"  # "node", "edge" or "internal"
    avoid: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "paths", tuple(tuple(p) for p in self.paths))

    def __len__(self):
        return len(self.paths)

    def __iter__(self):
        return iter(self.paths)

    def vertices(self) -> set[int]:
        return {v for p in self.paths for v in p}

    def violations(self, G: Graph | None = None) -> list[str]:
        bad = []
        if G is not None:
            for i, p in enumerate(self.paths):
                if not G.is_path(p):
                    bad.append(f"path {i} is not a path of the host")
        if self.mode == "node":
            seen: dict[int, int] = {}
            for i, p in enumerate(self.paths):
                for v in p:
                    if v in seen and seen[v] != i:
                        bad.append(f"paths {seen[v]} and {i} share vertex {v}")
                    seen[v] = i
        elif self.mode == "edge":
            seen_e: dict[tuple, int] = {}
            for i, p in enumerate(self.paths):
                for a, b in zip(p, p[1:]):
                    key = (min(a, b), max(a, b))
                    seen_e[key] = seen_e.get(key, 0) + 1
            if G is not None:
                for key, c in seen_e.items():
                    if c > G.multiplicity(*key):
                        bad.append(f"edge {key} used {c} times")
        elif self.mode == "internal":
            for i, p in enumerate(self.paths):
                inner = set(p[1:-1])
                if inner & self.avoid:
                    bad.append(f"path {i} enters the avoided set internally")
            seen = {}
            for i, p in enumerate(self.paths):
                for v in p[1:-1]:
                    if v in seen and seen[v] != i:
                        bad.append(f"paths {seen[v]} and {i} share internal vertex {v}")
                    seen[v] = i
        else:
            bad.append(f"unknown mode {self.mode}")
        return bad

    def is_valid(self, G: Graph | None = None) -> bool:
        return not self.violations(G)


def node_disjoint(paths: Iterable[Sequence[int]]) -> bool:
    seen = set()
    for p in paths:
        for v in p:
            if v in seen:
                return False
            seen.add(v)
    return True


# minor models

@dataclass
class MinorModel:
    host: Graph
    pattern: Graph
    vertex_map: dict  # pattern vertex -> set of host vertices
    edge_map: dict  # pattern edge id -> host path


@dataclass
class ModelReport:
    ok: bool
    clause: str = ""
    detail: str = ""
    witnesses: list = field(default_factory=list)


def validate_minor_model(m: MinorModel) -> ModelReport:
    """Check the model conditions; the first failure is reported."""
    host, pat = m.host, m.pattern
    owner: dict[int, int] = {}
    for pv in pat.vertices:
        img = m.vertex_map.get(pv)
        if not img:
            return ModelReport(False, "image", f"pattern vertex {pv} has an empty image", [pv])
        for x in img:
            if not host.has_vertex(x):
                return ModelReport(False, "image", f"host has no vertex {x}", [pv, x])
            if x in owner:
                return ModelReport(False, "(i)", f"images of {owner[x]} and {pv} share {x}", [owner[x], pv, x])
            owner[x] = pv
        if not host.is_connected(img):
            return ModelReport(False, "connected", f"image of {pv} is not connected", [pv])
    inner_owner: dict[int, int] = {}
    single_use: dict[tuple, int] = {}
    for eid in pat.edge_ids():
        u, v = pat.endpoints(eid)
        path = m.edge_map.get(eid)
        if path is None:
            return ModelReport(False, "edge", f"pattern edge {eid} has no path", [eid])
        if not host.is_path(path) or len(path) < 2:
            return ModelReport(False, "edge", f"path of pattern edge {eid} is not a host path", [eid])
        ends = {owner.get(path[0]), owner.get(path[-1])}
        if ends != {u, v}:
            return ModelReport(False, "(ii)", f"path of edge {eid} does not join the images of {u} and {v}", [eid])
        if len(path) == 2:
            key = (min(path), max(path))
            single_use[key] = single_use.get(key, 0) + 1
            if single_use[key] > host.multiplicity(*key):
                return ModelReport(False, "(ii)", f"host edge {key} reused by edge {eid}", [eid])
        for x in path[1:-1]:
            if x in owner:
                return ModelReport(False, "(ii)", f"path of edge {eid} passes through image of {owner[x]}", [eid, x])
            if x in inner_owner:
                return ModelReport(False, "(ii)", f"paths of edges {inner_owner[x]} and {eid} share {x}", [inner_owner[x], eid, x])
            inner_owner[x] = eid
    return ModelReport(True)


# generators

def make_grid(g: int) -> Graph:
    """g x g grid; vertex (r, c) has id r*g + c."""
    if g < 1:
        raise ValueError("g must be positive")
    edges = []
    for r in range(g):
        for c in range(g - 1):
            edges.append((r * g + c, r * g + c + 1))
    for r in range(g - 1):
        for c in range(g):
            edges.append((r * g + c, (r + 1) * g + c))
    return Graph(range(g * g), edges)


def make_pendant_grid(kappa: int):
    """(kappa+2)-grid with kappa pendant vertices on the first column.

    Returns (G, A, B, X) where A is the first row minus corners, B the last
    row minus corners and X the pendants, attached to rows 1..kappa of
    column 0.
    """
    if kappa < 1:
        raise ValueError("kappa must be positive")
    s = kappa + 2
    grid = make_grid(s)
    X = [s * s + i for i in range(kappa)]
    G = grid.add(X, [(x, (i + 1) * s) for i, x in enumerate(X)])
    A = [c for c in range(1, s - 1)]
    B = [(s - 1) * s + c for c in range(1, s - 1)]
    return G, A, B, X


def pendant_grid_witnesses(kappa: int):
    """Witness families for make_pendant_grid(kappa).

    P: the columns 1..kappa. Q: from (0, c) down column c to row c, then
    left along row c to column 0 and into the pendant of that row.
    """
    s = kappa + 2
    P = [tuple(r * s + c for r in range(s)) for c in range(1, s - 1)]
    Q = []
    for c in range(1, s - 1):
        down = [r * s + c for r in range(c + 1)]
        left = [c * s + k for k in range(c - 1, -1, -1)]
        Q.append(tuple(down + left + [s * s + c - 1]))
    return P, Q


def random_regular(n: int, d: int, seed: int) -> Graph:
    import networkx as nx

    if n <= d or (n * d) % 2:
        raise ValueError("need n > d and n*d even")
    nxg = nx.random_regular_graph(d, n, seed=seed)
    return Graph(range(n), sorted((min(u, v), max(u, v)) for u, v in nxg.edges()))


def graph_from_paths(paths: Iterable[Sequence[int]], extra_vertices: Iterable[int] = ()) -> Graph:
    """Union of paths as a simple graph (shared edges are merged)."""
    vs = set(extra_vertices)
    es = set()
    for p in paths:
        vs.update(p)
        for a, b in zip(p, p[1:]):
            es.add((min(a, b), max(a, b)))
    return Graph(sorted(vs), sorted(es))


def make_path_bundle(kappa: int, length: int = 5, cross_links: int = 0, seed: int = 0):
    """kappa disjoint A-B paths, each with a private pendant X vertex.

    Optional random rungs between neighbouring paths. Returns
    (G, A, B, X, P, Q) with witness families P (A to B) and Q (A to X).
    """
    if length < 2:
        raise ValueError("length must be at least 2")
    rng = random.Random(seed)
    P = [tuple(i * length + j for j in range(length)) for i in range(kappa)]
    base = kappa * length
    X = [base + i for i in range(kappa)]
    mid = length // 2
    edges = [(p[j], p[j + 1]) for p in P for j in range(length - 1)]
    edges += [(P[i][mid], X[i]) for i in range(kappa)]
    rungs = set()
    for _ in range(cross_links):
        if kappa < 2:
            break
        i = rng.randrange(kappa - 1)
        j = rng.randrange(1, length - 1)
        rungs.add((P[i][j], P[i + 1][j]))
    edges += sorted(rungs)
    G = Graph(range(base + kappa), edges)
    Q = [P[i][: mid + 1] + (X[i],) for i in range(kappa)]
    return G, [p[0] for p in P], [p[-1] for p in P], X, P, Q


def make_regular_host(kappa: int, n: int, seed: int, d: int = 3):
    """Random d-regular core with kappa A, B and X pendants hung off it.

    A and B are new vertices attached to distinct core vertices, X pendants
    hang off further distinct core vertices. Needs n >= 3*kappa.
    """
    if n < 3 * kappa:
        raise ValueError("need n >= 3*kappa")
    core = random_regular(n, d, seed)
    rng = random.Random(seed)
    spots = list(range(n))
    rng.shuffle(spots)
    A = [n + i for i in range(kappa)]
    B = [n + kappa + i for i in range(kappa)]
    X = [n + 2 * kappa + i for i in range(kappa)]
    edges = [(A[i], spots[i]) for i in range(kappa)]
    edges += [(B[i], spots[kappa + i]) for i in range(kappa)]
    edges += [(X[i], spots[2 * kappa + i]) for i in range(kappa)]
    G = core.add(A + B + X, edges)
    return G, A, B, X
