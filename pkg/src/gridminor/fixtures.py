"""Synthetic Path-of-Sets and hairy Path-of-Sets instances."""

from __future__ import annotations

from .graph import Graph
from .pos import HairyPoS, PathOfSets


class _Builder:
    def __init__(self):
        self.n = 0
        self.edges = []

    def new(self, k):
        ids = list(range(self.n, self.n + k))
        self.n += k
        return ids

    def clique(self, vs):
        self.edges += [(u, v) for i, u in enumerate(vs) for v in vs[i + 1:]]

    def grid(self, rows, cols):
        ids = self.new(rows * cols)
        for r in range(rows):
            for c in range(cols):
                v = ids[r * cols + c]
                if c + 1 < cols:
                    self.edges.append((v, v + 1))
                if r + 1 < rows:
                    self.edges.append((v, v + cols))
        return ids

    def link(self, a, b, gap):
        """Path from a to b through gap fresh vertices; returns the path."""
        mid = self.new(gap)
        path = [a] + mid + [b]
        self.edges += list(zip(path, path[1:]))
        return tuple(path)

    def graph(self):
        return Graph(range(self.n), self.edges)


def make_pos_chain(ell: int, w: int, cluster: str = "grid", gap: int = 1) -> PathOfSets:
    """A strong Path-of-Sets system of length ell and width w.

    grid clusters are w x w grids with A the first and B the last column;
    clique clusters are cliques on 2w vertices. Consecutive clusters are
    joined by paths with gap interior vertices.
    """
    if ell < 1 or w < 1:
        raise ValueError("ell and w must be positive")
    bld = _Builder()
    clusters, As, Bs = [], [], []
    for _ in range(ell):
        if cluster == "grid":
            side = max(w, 2)
            ids = bld.grid(side, side)
            A = [ids[r * side] for r in range(w)]
            B = [ids[r * side + side - 1] for r in range(w)]
        elif cluster == "clique":
            ids = bld.new(2 * w)
            bld.clique(ids)
            A, B = ids[:w], ids[w:]
        else:
            raise ValueError(f"unknown cluster kind {cluster}")
        clusters.append(ids)
        As.append(A)
        Bs.append(B)
    connectors = []
    for i in range(ell - 1):
        connectors.append([bld.link(Bs[i][j], As[i + 1][j], gap) for j in range(w)])
    return PathOfSets(bld.graph(), clusters, As, Bs, connectors, "strong")


def make_hairy_pos(ell: int, w: int, gap: int = 1) -> HairyPoS:
    """Hairy Path-of-Sets system with clique clusters and clique hairs.

    C_i is a clique on 3w vertices split into A_i, B_i, X_i; S_i is a clique
    on w vertices, all of which form Y_i.
    """
    bld = _Builder()
    clusters, As, Bs, Xs = [], [], [], []
    for _ in range(ell):
        ids = bld.new(3 * w)
        bld.clique(ids)
        clusters.append(ids)
        As.append(ids[:w])
        Bs.append(ids[w:2 * w])
        Xs.append(ids[2 * w:])
    connectors = []
    for i in range(ell - 1):
        connectors.append([bld.link(Bs[i][j], As[i + 1][j], gap) for j in range(w)])
    hairs, Ys, hair_paths = [], [], []
    for i in range(ell):
        ids = bld.new(w)
        bld.clique(ids)
        hairs.append(ids)
        Ys.append(ids)
        hair_paths.append([bld.link(Xs[i][j], ids[j], gap) for j in range(w)])
    pos = PathOfSets(bld.graph(), clusters, As, Bs, connectors, "strong")
    return HairyPoS(pos, hairs, Xs, Ys, hair_paths)
