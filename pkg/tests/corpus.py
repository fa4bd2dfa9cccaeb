"""Small named graphs shared by the oracle comparisons."""

import random

from gridminor.graph import Graph, make_grid, make_pendant_grid


def _cycle(n):
    return Graph(range(n), [(i, (i + 1) % n) for i in range(n)])


def _petersen():
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph(range(10), outer + spokes + inner)


def _random(n, p, seed, parallel=False):
    rng = random.Random(seed)
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    if parallel and edges:
        edges.append(edges[rng.randrange(len(edges))])
    return Graph(range(n), edges)


def corpus():
    graphs = {
        "path5": Graph(range(5), [(i, i + 1) for i in range(4)]),
        "cycle6": _cycle(6),
        "cycle8": _cycle(8),
        "grid2": make_grid(2),
        "grid3": make_grid(3),
        "k4": Graph(range(4), [(u, v) for u in range(4) for v in range(u + 1, 4)]),
        "k5": Graph(range(5), [(u, v) for u in range(5) for v in range(u + 1, 5)]),
        "k23": Graph(range(5), [(u, v) for u in (0, 1) for v in (2, 3, 4)]),
        "star4": Graph(range(5), [(0, i) for i in range(1, 5)]),
        "bridged_triangles": Graph(range(6), [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)]),
        "wheel6": Graph(range(7), [(0, i) for i in range(1, 7)] + [(i, i % 6 + 1) for i in range(1, 7)]),
        "petersen": _petersen(),
        "pendant_grid1": make_pendant_grid(1)[0],
        "double_edge": Graph(range(3), [(0, 1), (0, 1), (1, 2)]),
    }
    for seed in range(8):
        n = 6 + seed % 5
        graphs[f"random{seed}"] = _random(n, 0.35, seed, parallel=seed % 2 == 1)
    return graphs


def terminal_choices(G, count=6, seed=0):
    """A handful of disjoint (A, B) choices, including all-singleton ones."""
    rng = random.Random(seed)
    vs = list(G.vertices)
    out = [([vs[0]], [vs[-1]])]
    for _ in range(count):
        k = rng.randint(1, max(1, len(vs) // 3))
        pick = rng.sample(vs, 2 * k)
        out.append((sorted(pick[:k]), sorted(pick[k:])))
    return out
