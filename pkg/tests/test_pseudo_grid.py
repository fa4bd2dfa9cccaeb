import math

import pytest
from hypothesis import HealthCheck, assume, given, settings, strategies as st

from gridminor.graph import (
    Graph, graph_from_paths, make_path_bundle, make_pendant_grid, make_regular_host,
    pendant_grid_witnesses,
)
from gridminor.linkage import max_node_disjoint_paths
from gridminor.pseudo_grid import (
    Crossbar, PseudoGrid, WitnessPaths, _reroute, build_pseudo_grid_or_crossbar,
    initial_witnesses, path_edges, select_min_edge_witnesses, validate_crossbar,
    validate_pseudo_grid,
)

from oracles import brute_node_packing


def _pendant(k):
    G, A, B, X = make_pendant_grid(k)
    P, Q = pendant_grid_witnesses(k)
    return G, A, B, X, P, Q


def _dichotomy(G, A, B, X, P, Q, D, rho):
    w = select_min_edge_witnesses(G, A, B, X, P, Q)
    return w, build_pseudo_grid_or_crossbar(G, A, B, X, w, D, rho)


# witness selection

def test_pendant_witnesses_already_minimal():
    G, A, B, X, P, Q = _pendant(8)
    w = select_min_edge_witnesses(G, A, B, X, P, Q)
    assert w.P == [tuple(p) for p in P] and w.Q == [tuple(q) for q in Q]
    # neither reroute step finds anything cheaper
    no_x = set(G.vertices) - set(X)
    newP = _reroute(G, A, B, no_x, path_edges(w.Q))
    newQ = _reroute(G, A, X, set(G.vertices), path_edges(w.P))
    assert len(path_edges(newP) | path_edges(w.Q)) >= w.edge_count()
    assert len(path_edges(newQ) | path_edges(w.P)) >= w.edge_count()


def test_detour_around_one_cell_is_removed():
    k = 4
    s = k + 2
    G, A, B, X, P, Q = _pendant(k)
    last = list(P[-1])
    # replace the edge (k, k)-(k+1, k) by a walk around the cell to its right
    r = k
    i = last.index(r * s + k)
    detour = [r * s + k, r * s + k + 1, (r + 1) * s + k + 1, (r + 1) * s + k]
    bent = last[:i] + detour
    assert G.is_path(bent)
    P2 = list(P[:-1]) + [tuple(bent)]
    before = WitnessPaths(P2, Q).edge_count()
    w = select_min_edge_witnesses(G, A, B, X, P2, Q)
    assert before - w.edge_count() == 2
    assert w.P[-1] == tuple(last)


def test_single_route_is_identity():
    G = Graph(range(5), [(0, 1), (1, 2), (2, 3), (1, 4)])
    w = select_min_edge_witnesses(G, [0], [3], [4], [(0, 1, 2, 3)], [(0, 1, 4)])
    assert w.P == [(0, 1, 2, 3)] and w.Q == [(0, 1, 4)]


def test_invalid_witnesses_rejected():
    G, A, B, X, P, Q = _pendant(3)
    with pytest.raises(ValueError):
        select_min_edge_witnesses(G, A, B, X, P, Q[::-1][:2] + [Q[0]])


def test_initial_witnesses_valid_on_grid():
    G, A, B, X = make_pendant_grid(6)
    w = initial_witnesses(G, A, B, X)
    assert w.violations(G, A, B, X) == []


@settings(max_examples=15, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.integers(0, 10_000), st.integers(2, 5), st.integers(0, 6))
def test_minimisation_never_grows_and_stays_valid(seed, k, rungs):
    G, A, B, X, P, Q = make_path_bundle(k, length=5, cross_links=rungs, seed=seed)
    w = select_min_edge_witnesses(G, A, B, X, P, Q)
    assert w.violations(G, A, B, X) == []
    assert w.edge_count() <= WitnessPaths(P, Q).edge_count()


# dichotomy

def test_pendant_grid_gives_pseudo_grid():
    G, A, B, X, P, Q = _pendant(16)
    _, res = _dichotomy(G, A, B, X, P, Q, D=4, rho=2)
    assert isinstance(res, PseudoGrid)
    assert res.depth == 4 and len(res.tails) == 4
    assert validate_pseudo_grid(res, 2).ok


def test_bundle_gives_crossbar_in_first_round():
    G, A, B, X, P, Q = make_path_bundle(4)
    _, res = _dichotomy(G, A, B, X, P, Q, D=1, rho=2)
    assert isinstance(res, Crossbar) and res.width == 2
    assert validate_crossbar(res).ok


def test_precondition_checked():
    G, A, B, X, P, Q = _pendant(8)
    w = WitnessPaths(P, Q)
    with pytest.raises(ValueError):
        build_pseudo_grid_or_crossbar(G, A, B, X, w, D=3, rho=2)


def _random_instance(seed):
    G, A, B, X = make_regular_host(12, 60, seed)
    try:
        w = initial_witnesses(G, A, B, X)
    except ValueError:
        return None
    return G, A, B, X, w.P, w.Q


@settings(max_examples=10, deadline=None, suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much])
@given(st.integers(0, 10_000))
def test_random_regular_host_dichotomy_validates(seed):
    inst = _random_instance(seed)
    assume(inst is not None)
    _, res = _dichotomy(*inst, D=3, rho=2)
    rep = validate_crossbar(res) if isinstance(res, Crossbar) else validate_pseudo_grid(res, 2)
    assert rep.ok, rep.violations


def _mixed_instance(seed):
    """Pendant grid with a few extra shortcuts, so either branch may fire."""
    import random

    rng = random.Random(seed)
    k = 8
    s = k + 2
    G, A, B, X, P, Q = _pendant(k)
    extra = []
    for _ in range(rng.randrange(0, 6)):
        r = rng.randrange(1, s - 1)
        c = rng.randrange(2, s)
        extra.append((r * s + c, rng.choice(X)))
    return G.add((), extra), A, B, X, P, Q


def test_fifty_seeded_instances_validate():
    kinds = set()
    for seed in range(50):
        G, A, B, X, P, Q = _mixed_instance(seed)
        _, res = _dichotomy(G, A, B, X, P, Q, D=2, rho=2)
        kinds.add(type(res).__name__)
        rep = validate_crossbar(res) if isinstance(res, Crossbar) else validate_pseudo_grid(res, 2)
        assert rep.ok, (seed, rep.violations)
    assert kinds == {"Crossbar", "PseudoGrid"}


def test_crossbar_flow_value_matches_brute_force():
    # round one flows from the contracted paths to X; brute force on the
    # contracted graph agrees with the crossbar width cap
    G, A, B, X, P, Q = make_path_bundle(3)
    from gridminor.graph import quotient

    Hq, remap = quotient(G, P)
    S = sorted({remap[p[0]] for p in P})
    assert brute_node_packing(Hq, S, X) == 3
    assert max_node_disjoint_paths(Hq, S, X).value == 3


# bookkeeping and observations

def test_p2_bookkeeping_on_pendant_grid():
    G, A, B, X, P, Q = _pendant(32)
    _, pg = _dichotomy(G, A, B, X, P, Q, D=8, rho=2)
    assert isinstance(pg, PseudoGrid)
    for i in range(pg.depth):
        assert pg.misses[i] <= pg.not_good[i] + pg.not_final_good <= 2 * pg.rho


def test_tails_avoid_surviving_paths():
    G, A, B, X, P, Q = _pendant(16)
    _, pg = _dichotomy(G, A, B, X, P, Q, D=2, rho=3)
    rest = {v for j in pg.rest for v in pg.witness.P[j]}
    for _, t in pg.tails:
        assert not set(t) & rest


def test_irrelevant_edge_observation():
    G, A, B, X, P, Q = _pendant(16)
    w, pg = _dichotomy(G, A, B, X, P, Q, D=4, rho=2)
    R = [w.P[j] for lay in pg.layers for j in lay]
    layer_sets = [{v for j in lay for v in w.P[j]} for lay in pg.layers]
    Q2 = [t for _, t in pg.tails if all(s & set(t) for s in layer_sets)]
    Hp = graph_from_paths(R + Q2)
    Aq, Bq = [r[0] for r in R], [r[-1] for r in R]
    qedges = path_edges(w.Q)
    N = len(R)
    assert max_node_disjoint_paths(Hp, Aq, Bq).value == N
    checked = 0
    for eid, (u, v) in Hp.edges.items():
        if (min(u, v), max(u, v)) in path_edges(R) and (min(u, v), max(u, v)) not in qedges:
            assert max_node_disjoint_paths(Hp.remove_edges([eid]), Aq, Bq).value <= N - 1
            checked += 1
    assert checked > 0


# validators

def _one_layer():
    G, A, B, X, P, Q = _pendant(4)
    w = WitnessPaths(P, Q)
    return PseudoGrid(G, tuple(A), tuple(B), tuple(X), w, 2, [[0]], [1, 2, 3],
                      [(3, tuple(Q[3][Q[3].index(4 * 6 + 1):]))])


def test_hand_built_pseudo_grid_ok():
    pg = _one_layer()
    rep = validate_pseudo_grid(pg, 2)
    assert rep.ok, rep.violations


def test_tail_touching_survivor_is_p1_violation():
    pg = _one_layer()
    q = pg.witness.Q[3]
    pg.tails = [(3, tuple(q))]  # the whole path starts on a surviving path
    assert "P1" in validate_pseudo_grid(pg, 2).clauses()


def test_layer_size_violation():
    pg = _one_layer()
    pg.layers = [[0, 1]]
    pg.rest = [2, 3]
    assert "layer-size" in validate_pseudo_grid(pg, 1).clauses()


def test_width_one_crossbar_ok_and_double_meet_rejected():
    G = Graph(range(6), [(0, 1), (1, 2), (2, 3), (1, 4), (4, 2), (4, 5)])
    good = Crossbar(G, (0,), (3,), (5,), [(0, 1, 2, 3)], [(1, 4, 5)])
    assert validate_crossbar(good).ok
    bad = Crossbar(G, (0,), (3,), (5,), [(0, 1, 2, 3)], [(1, 2, 4, 5)])
    assert "own" in validate_crossbar(bad).clauses()


def test_foreign_path_meet_rejected():
    G, A, B, X, P, Q = make_path_bundle(2, cross_links=0)
    cb = Crossbar(G, tuple(A), tuple(B), tuple(X), list(P), [Q[0][2:], Q[1][2:]])
    assert validate_crossbar(cb).ok
    G2 = G.add((), [(P[0][2], P[1][3])])
    cb2 = Crossbar(G2, tuple(A), tuple(B), tuple(X), list(P), [(P[0][2], P[1][3], P[1][2], X[1]), Q[1][2:]])
    assert "foreign" in validate_crossbar(cb2).clauses()


def test_tail_count_matches_quarter():
    G, A, B, X, P, Q = _pendant(10)
    _, pg = _dichotomy(G, A, B, X, P, Q, D=2, rho=2)
    assert len(pg.tails) == math.ceil(10 / 4)
