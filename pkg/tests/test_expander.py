from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from gridminor.expander import (
    EmbeddingError, check_expansion, check_separator_bound, cut_player_partition, default_cap,
    embed_expander_in_hairy_pos, exact_expansion, play_cut_matching, spectral_lower_bound,
    validate_embedding,
)
from gridminor.fixtures import make_hairy_pos
from gridminor.graph import Graph
from gridminor.pos import HairyPoS, PathOfSets

from corpus import corpus
from oracles import brute_expansion


def _clique(vs):
    return [(u, v) for i, u in enumerate(vs) for v in vs[i + 1:]]


def _cycle(n):
    return Graph(range(n), [(i, (i + 1) % n) for i in range(n)])


# expansion

def test_single_edge_expansion():
    res = check_expansion(Graph(range(2), [(0, 1)]))
    assert res.certified and res.alpha == 1


def test_two_triangles_with_bridge():
    G = Graph(range(6), _clique([0, 1, 2]) + _clique([3, 4, 5]) + [(2, 3)])
    res = check_expansion(G)
    assert res.status == "refuted" and res.alpha == Fraction(1, 3)
    assert res.witness in ({0, 1, 2}, {3, 4, 5})


def test_cycle_of_eight():
    a, S = exact_expansion(_cycle(8))
    assert a == Fraction(1, 2) and len(S) == 4
    assert check_expansion(_cycle(8)).certified


def test_exact_agrees_with_gray_code_oracle():
    for name, G in corpus().items():
        if 2 <= G.n() <= 14:
            a, _ = exact_expansion(G)
            assert a == brute_expansion(G), name


def test_spectral_mode_only_bounds():
    G = Graph(range(8), _clique(list(range(8))))
    res = check_expansion(G, "spectral")
    assert res.status == "bound" and not res.certified
    assert 0 < res.alpha <= exact_expansion(G)[0]


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_spectral_bound_is_a_lower_bound(seed):
    st_ = play_cut_matching(10, "random_balanced", "random", cap=3, seed=seed)
    G = st_.graph()
    assert spectral_lower_bound(G) <= float(exact_expansion(G)[0]) + 1e-9


# separators

def test_separator_of_clique():
    rep = check_separator_bound(Graph(range(4), _clique([0, 1, 2, 3])), 3)
    assert rep.ok and rep.bound == Fraction(4, 72)
    assert rep.minimum == 2  # the two remaining vertices fit on one side


def test_separator_of_cycle():
    rep = check_separator_bound(_cycle(8), 2)
    assert rep.ok and rep.bound == Fraction(8, 48) and rep.minimum == 2
    A, B, S = rep.witness
    assert len(A) <= 5 and len(B) <= 5 and len(S) == 2


# cut player

def test_two_vertices_unique_partition():
    Z, Zp = cut_player_partition(Graph(range(2)), "spectral", 4)
    assert {Z, Zp} == {(0,), (1,)}


def test_empty_graph_falls_back_to_random():
    G = Graph(range(8))
    assert cut_player_partition(G, "spectral", 7) == cut_player_partition(G, "random_balanced", 7)


@pytest.mark.parametrize("seed", range(5))
def test_barbell_split_separates_cliques(seed):
    G = Graph(range(10), _clique(list(range(5))) + _clique(list(range(5, 10))) + [(4, 5)])
    Z, Zp = cut_player_partition(G, "spectral", seed)
    assert {Z, Zp} == {tuple(range(5)), tuple(range(5, 10))}
    cut = sum(1 for e in G.edge_ids() if (G.endpoints(e)[0] in Z) != (G.endpoints(e)[1] in Z))
    assert cut == 1


def test_odd_vertex_count_rejected():
    with pytest.raises(ValueError):
        cut_player_partition(Graph(range(3)))


# game

def test_two_vertex_game():
    st_ = play_cut_matching(2)
    assert st_.iterations == 1 and st_.edges == [(0, 1)] and st_.expansion.alpha == 1


def test_random_matcher_certifies_eight():
    st_ = play_cut_matching(8, "spectral", "random", default_cap(8), seed=1)
    assert st_.certified and st_.iterations <= default_cap(8)
    assert check_expansion(st_.graph()).alpha >= Fraction(1, 2)


def test_adversarial_matcher_on_sixteen():
    outcomes = [play_cut_matching(16, "spectral", "adversarial-greedy", seed=s) for s in range(10)]
    for o in outcomes:
        G = o.graph()
        assert max(G.degree(v) for v in G.vertices) <= o.iterations
        assert o.certified or o.iterations == o.cap
    assert sum(o.certified for o in outcomes) >= 9


def test_game_is_deterministic():
    a = play_cut_matching(12, seed=5).to_json()
    b = play_cut_matching(12, seed=5).to_json()
    assert a == b


# embedding

def _two_vertex_hairy():
    # cluster: clique on A={0,1}, B={2,3}, X={4,5}; hair path 6 - 8 - 7
    edges = _clique(list(range(6))) + [(4, 6), (5, 7), (6, 8), (8, 7)]
    G = Graph(range(9), edges)
    pos = PathOfSets(G, [range(6)], [(0, 1)], [(2, 3)], [], "strong")
    return HairyPoS(pos, [{6, 7, 8}], [(4, 5)], [(6, 7)], [[(4, 6), (5, 7)]])


def test_two_vertex_embedding():
    emb = embed_expander_in_hairy_pos(_two_vertex_hairy(), 2, cap=1)
    assert [tuple(sorted(e)) for e in emb.state.edges] == [(0, 1)]
    assert validate_embedding(emb) == []
    path = emb.edge_paths[0]
    assert 8 in path and {6, 7} <= set(path)


def test_four_vertex_embedding_certified():
    h = make_hairy_pos(4, 4)
    emb = embed_expander_in_hairy_pos(h, 4, "spectral", seed=0, cap=4)
    assert validate_embedding(emb) == []
    assert emb.state.certified
    assert check_expansion(emb.pattern).alpha >= Fraction(1, 2)


@pytest.mark.parametrize("seed", range(5))
def test_iterations_stay_in_their_cluster(seed):
    h = make_hairy_pos(default_cap(8), 8)
    emb = embed_expander_in_hairy_pos(h, 8, "spectral", seed)
    for e, path in enumerate(emb.edge_paths):
        j = emb.edge_iteration[e]
        others = set().union(*(h.pos.clusters[i] | h.hairs[i] for i in range(h.length) if i != j))
        assert not set(path) & others
    assert validate_embedding(emb) == []
    js = emb.to_json()
    assert len(js["vertices"]) == 8 and len(js["matchings"]) == emb.state.iterations


def test_short_system_rejected():
    with pytest.raises(ValueError):
        embed_expander_in_hairy_pos(make_hairy_pos(3, 4), 4)


def test_broken_hair_reports_cut():
    h = _two_vertex_hairy()
    G = Graph(range(9), _clique(list(range(6))) + [(4, 6), (5, 7), (6, 8)])
    broken = HairyPoS(PathOfSets(G, h.pos.clusters, h.pos.A, h.pos.B, [], "strong"),
                      h.hairs, h.X, h.Y, h.hair_paths)
    with pytest.raises(EmbeddingError) as info:
        embed_expander_in_hairy_pos(broken, 2, cap=1)
    assert info.value.cut is not None
