import pytest
from hypothesis import given, settings, strategies as st

from gridminor.graph import (
    Graph, MinorModel, PathFamily, contract_edge, contract_path_to_vertex, graph_from_paths,
    make_grid, make_path_bundle, make_pendant_grid, pendant_grid_witnesses, quotient, remap_path,
    validate_minor_model,
)


def test_grid_sizes():
    assert (make_grid(1).n(), make_grid(1).m()) == (1, 0)
    assert (make_grid(2).n(), make_grid(2).m()) == (4, 4)
    assert (make_grid(5).n(), make_grid(5).m()) == (25, 40)


@given(st.integers(min_value=2, max_value=9))
def test_grid_edge_count_and_inner_degree(g):
    G = make_grid(g)
    assert G.m() == 2 * g * (g - 1)
    for r in range(1, g - 1):
        for c in range(1, g - 1):
            assert G.degree(r * g + c) == 4


def test_pendant_grid_shape():
    G, A, B, X = make_pendant_grid(1)
    assert G.n() == 10 and len(A) == len(B) == len(X) == 1
    G, A, B, X = make_pendant_grid(4)
    assert G.n() == 40
    assert len(A) == len(B) == len(X) == 4
    assert all(G.degree(x) == 1 for x in X)
    assert not set(A) & set(B)


@pytest.mark.parametrize("kappa", [1, 2, 4, 7])
def test_pendant_grid_witnesses_are_disjoint_paths(kappa):
    G, A, B, X = make_pendant_grid(kappa)
    P, Q = pendant_grid_witnesses(kappa)
    assert PathFamily(P).is_valid(G) and PathFamily(Q).is_valid(G)
    assert {p[0] for p in P} == set(A) and {p[-1] for p in P} == set(B)
    assert {q[0] for q in Q} == set(A) and {q[-1] for q in Q} == set(X)
    assert not any(set(p) & set(X) for p in P)


def test_contract_edge_examples():
    tri = Graph(range(3), [(0, 1), (1, 2), (0, 2)])
    H, remap = contract_edge(tri, 0)
    assert H.n() == 2 and H.m() == 2 and H.multiplicity(0, 2) == 2
    path = Graph(range(3), [(0, 1), (1, 2)])
    H, _ = contract_edge(path, 0)
    assert H.n() == 2 and H.m() == 1
    g3 = make_grid(3)
    corner = g3.edges_between(0, 1)[0]
    H, _ = contract_edge(g3, corner)
    assert H.n() == 8 and H.m() == 11
    with pytest.raises(KeyError):
        contract_edge(g3, 999)


def test_contract_corner_edge_keeps_remaining_edges():
    # 12 grid edges minus the contracted one; no parallels arise at a corner
    g3 = make_grid(3)
    H, _ = contract_edge(g3, g3.edges_between(0, 1)[0])
    assert H.m() == 11
    assert all(u != v for u, v in H.edges.values())


def test_contract_path_examples():
    g3 = make_grid(3)
    H, v = contract_path_to_vertex(g3, (4,))
    assert H == g3 and v == 4
    P5 = Graph(range(5), [(i, i + 1) for i in range(4)])
    H, v = contract_path_to_vertex(P5, tuple(range(5)))
    assert H.n() == 1 and H.m() == 0
    H, v = contract_path_to_vertex(g3, (1, 4, 7))
    assert H.n() == 7 and H.degree(v) == 6
    with pytest.raises(ValueError):
        contract_path_to_vertex(g3, (0, 4))


@settings(max_examples=40)
@given(st.integers(min_value=2, max_value=6), st.data())
def test_contract_path_never_loops(g, data):
    G = make_grid(g)
    r = data.draw(st.integers(0, g - 1))
    length = data.draw(st.integers(1, g))
    path = tuple(r * g + c for c in range(length))
    H, v = contract_path_to_vertex(G, path)
    assert H.n() == G.n() - (len(path) - 1)
    assert all(a != b for a, b in H.edges.values())


def test_remap_path_loop_erases():
    assert remap_path((1, 2, 3, 4), {1: 1, 2: 2, 3: 1, 4: 4}) == (1, 4)
    assert remap_path((1, 2, 3), {1: 1, 2: 1, 3: 3}) == (1, 3)


def test_quotient_keeps_parallels():
    G = Graph(range(4), [(0, 2), (1, 2), (2, 3)])
    H, remap = quotient(G, [(0, 1)])
    assert H.multiplicity(0, 2) == 2 and remap[1] == 0


def test_path_family_modes():
    G = make_grid(3)
    assert PathFamily([(0, 1, 2), (3, 4, 5)]).is_valid(G)
    assert not PathFamily([(0, 1, 2), (2, 5)]).is_valid(G)
    assert PathFamily([(0, 1, 2), (2, 5)], mode="edge").is_valid(G)
    assert not PathFamily([(0, 1), (1, 0)], mode="edge").is_valid(G)
    fam = PathFamily([(0, 1, 2), (0, 3, 6)], mode="internal", avoid=frozenset({4}))
    assert fam.is_valid(G)
    assert not PathFamily([(0, 1, 4, 5)], mode="internal", avoid=frozenset({4})).is_valid(G)


def test_graph_rejects_loops_and_dangling():
    with pytest.raises(ValueError):
        Graph([0], [(0, 0)])
    with pytest.raises(ValueError):
        Graph([0], [(0, 1)])


# minor models

def _k3_in_grid():
    host = make_grid(3)
    pattern = Graph(range(3), [(0, 1), (1, 2), (0, 2)])
    vmap = {0: {0}, 1: {2}, 2: {6, 7, 8}}
    emap = {0: (0, 1, 2), 1: (2, 5, 8), 2: (0, 3, 6)}
    return MinorModel(host, pattern, vmap, emap)


def test_minor_model_examples():
    host = make_grid(3)
    single = MinorModel(host, Graph([0]), {0: {0, 1, 4}}, {})
    assert validate_minor_model(single).ok
    assert validate_minor_model(_k3_in_grid()).ok
    overlap = MinorModel(host, Graph([0, 1]), {0: {0, 1}, 1: {1, 2}}, {})
    rep = validate_minor_model(overlap)
    assert not rep.ok and rep.clause == "(i)"


def test_minor_model_detects_shared_interior_and_disconnected_image():
    m = _k3_in_grid()
    m.edge_map[2] = (0, 1, 4, 7)  # runs through vertex 1 of another edge path
    assert validate_minor_model(m).clause == "(ii)"
    m = _k3_in_grid()
    m.vertex_map[2] = {6, 8}
    assert validate_minor_model(m).clause == "connected"


def _occurrence_oracle(m):
    used = {}
    for pv, img in m.vertex_map.items():
        for x in img:
            used[x] = used.get(x, 0) + 1
    for path in m.edge_map.values():
        for x in path[1:-1]:
            used[x] = used.get(x, 0) + 1
    return all(c == 1 for c in used.values())


@settings(max_examples=60)
@given(st.lists(st.integers(0, 8), min_size=2, max_size=2, unique=True), st.integers(0, 8))
def test_minor_model_agrees_with_occurrence_count(blobs, stray):
    host = make_grid(3)
    pattern = Graph(range(2), [(0, 1)])
    a, b = blobs
    path = host.bfs_path([a], [b])
    vmap = {0: {a}, 1: {b}}
    if stray not in path:
        vmap[0] = {a, stray} if host.is_connected({a, stray}) else {a}
    m = MinorModel(host, pattern, vmap, {0: path})
    rep = validate_minor_model(m)
    connected = all(host.is_connected(s) for s in vmap.values())
    assert rep.ok == (_occurrence_oracle(m) and connected)


def test_path_bundle_generator():
    G, A, B, X, P, Q = make_path_bundle(3, length=5)
    assert PathFamily(P).is_valid(G) and PathFamily(Q).is_valid(G)
    assert all(G.degree(x) == 1 for x in X)


def test_graph_from_paths():
    G = graph_from_paths([(0, 1, 2), (2, 3)], extra_vertices=[9])
    assert G.n() == 5 and G.m() == 3
