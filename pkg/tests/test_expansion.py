import itertools
import math
import random
from fractions import Fraction

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ntexpander.expansion import (chebyshev_identity_audit, geometric_degree,
                                  induced_average_degree, kahale_edge_audit,
                                  kahale_vertex_audit, kahale_walk_bound_audit, moore_audit,
                                  nb_between, nb_counts, nb_matrices, nb_total,
                                  neighbor_profile, peel_degree_one, walk_counts_csv)
from ntexpander.graph import Multigraph, distances_from


def _brute_nb_paths(X, l, start=None, end=None):
    """Enumerate non-backtracking directed-edge sequences by depth-first search."""
    total = 0

    def go(e, depth):
        nonlocal total
        if depth == l:
            if end is None or int(X.dst[e]) in end:
                total += 1
            return
        for f in X.edges_from(int(X.dst[e])):
            if f != X.rev[e]:
                go(int(f), depth + 1)

    for e in range(X.m):
        if start is None or int(X.src[e]) in start:
            go(e, 1)
    return total


def _brute_nb_matrix(X, l):
    A = np.zeros((X.n, X.n), dtype=np.int64)

    def go(first, e, depth):
        if depth == l:
            A[int(X.dst[e]), first] += 1
            return
        for f in X.edges_from(int(X.dst[e])):
            if f != X.rev[e]:
                go(first, int(f), depth + 1)

    for e in range(X.m):
        go(int(X.src[e]), e, 1)
    return A


def _random_graph(n, seed):
    G = nx.gnm_random_graph(n, int(1.6 * n), seed=seed)
    return Multigraph.from_networkx(G)


def test_neighbor_profile_examples():
    X = Multigraph.from_networkx(nx.petersen_graph())
    full = neighbor_profile(X, range(10))
    assert full.histogram == {3: 10}
    one = neighbor_profile(X, [0])
    assert one.histogram == {1: 3} and one.has_unique_neighbor and one.has_odd_neighbor
    with pytest.raises(ValueError):
        neighbor_profile(X, [])
    with pytest.raises(ValueError):
        neighbor_profile(X, [11])


def test_neighbor_profile_counts_multiedges():
    X = Multigraph.from_undirected(3, [(0, 1), (0, 1), (1, 2)])
    prof = neighbor_profile(X, [0])
    assert prof.counts == {1: 2}


def test_main_instance_profile(main_instance):
    prof = neighbor_profile(main_instance.X, main_instance.Y_ids)
    assert prof.histogram == {2: 48}
    assert len(prof.boundary) == 48 == (3 + 1) // 2 * 24
    assert not prof.has_unique_neighbor and not prof.has_odd_neighbor
    assert not set(prof.boundary) & set(main_instance.Y_ids)
    assert induced_average_degree(main_instance.X, main_instance.Y_ids) == (Fraction(0), 0.0)


def test_induced_average_degree():
    X = Multigraph.from_networkx(nx.petersen_graph())
    assert induced_average_degree(X, range(10))[0] == 3
    assert induced_average_degree(X, [0, 1])[0] == 1


def test_nb_examples():
    C4 = Multigraph.from_networkx(nx.cycle_graph(4))
    assert nb_total(C4, 4) == [8, 8, 8, 8]
    K4 = Multigraph.from_networkx(nx.complete_graph(4))
    assert nb_total(K4, 1) == [12]


def test_main_instance_counts(main_instance):
    X = main_instance.X
    assert nb_total(X, 12) == [720 * 4 * 3 ** (l - 1) for l in range(1, 13)]
    Y = main_instance.Y_ids
    assert nb_between(X, Y, 6) == [0, 96, 0, 288, 0, 2016]
    assert nb_between(X, Y, 4) == [_brute_nb_paths(X, l, set(Y), set(Y)) for l in range(1, 5)]
    wc = nb_counts(X, 6, {"Y": Y})
    assert wc.within["Y"] == [0] * 6
    assert wc.M(3) == 720 * 4 * 9
    assert walk_counts_csv(wc).splitlines()[0] == "l,M_X,M_S[Y],M_SX[Y]"


@settings(max_examples=25, deadline=None)
@given(st.integers(5, 14), st.integers(0, 10 ** 6), st.integers(1, 5))
def test_nb_counts_match_enumeration(n, seed, l):
    X = _random_graph(n, seed)
    rng = random.Random(seed)
    S = set(rng.sample(range(n), max(1, n // 3)))
    assert nb_total(X, l)[-1] == _brute_nb_paths(X, l)
    assert nb_between(X, S, l)[-1] == _brute_nb_paths(X, l, S, S)
    wc = nb_counts(X, l, {"S": S})
    for k in range(l):
        assert wc.within["S"][k] <= wc.between["S"][k] <= wc.total[k]


def test_bigint_promotion():
    X = Multigraph.from_networkx(nx.complete_graph(12))
    wc = nb_counts(X, 25)
    assert wc.exact_width == "bigint"
    assert wc.total[-1] == 12 * 11 * 10 ** 24


@pytest.mark.parametrize("l", [1, 2, 3, 4])
def test_nb_matrices_match_enumeration(l):
    X = _random_graph(12, 5)
    assert np.array_equal(nb_matrices(X, l)[-1], _brute_nb_matrix(X, l))


def test_geometric_degree_examples():
    # subdivision of K4: degree-3 and degree-2 vertices, half of the edge sources each
    X = Multigraph.from_networkx(_subdivision(nx.complete_graph(4)))
    assert geometric_degree(X) - 1 == pytest.approx(math.sqrt(2))
    rep = moore_audit(X, 10)
    assert rep.passed and rep.bipartite_holds
    K = Multigraph.from_networkx(nx.complete_graph(5))
    assert geometric_degree(K) == pytest.approx(4)
    with pytest.raises(ValueError):
        geometric_degree(Multigraph.from_networkx(nx.path_graph(3)))


def _subdivision(G):
    H = nx.Graph()
    for u, v in G.edges():
        mid = ("mid", u, v)
        H.add_edge(u, mid)
        H.add_edge(mid, v)
    return H


def test_moore_regular_equality(main_instance):
    rep = moore_audit(main_instance.X, 12)
    assert rep.passed and rep.regular
    assert rep.d_tilde == pytest.approx(4)
    for M, b in zip(rep.observed, rep.bounds):
        assert M == pytest.approx(b, rel=1e-12)


def test_peel_degree_one():
    G = nx.cycle_graph(5)
    G.add_edges_from([(0, 10), (10, 11), (11, 12)])
    sub, ids = peel_degree_one(Multigraph.from_networkx(G))
    assert sub.n == 5 and sub.degrees().min() == 2
    sub, ids = peel_degree_one(Multigraph.from_networkx(nx.path_graph(6)))
    assert sub.n == 0


def test_moore_rejects_degree_one():
    with pytest.raises(ValueError):
        moore_audit(Multigraph.from_networkx(nx.path_graph(4)), 3)


def test_moore_random_graphs():
    for seed in range(100):
        n = 10 + seed
        G = nx.gnm_random_graph(n, 2 * n, seed=seed)
        sub, _ = peel_degree_one(Multigraph.from_networkx(G))
        if sub.m == 0:
            continue
        rep = moore_audit(sub, 10)
        assert rep.passed
        assert rep.d_tilde >= rep.d_bar
        assert (abs(rep.d_tilde - rep.d_bar) < 1e-9) == sub.is_regular()


def test_bipartite_comparison_random():
    rng = random.Random(11)
    for _ in range(30):
        a, b = rng.randint(3, 12), rng.randint(3, 12)
        G = nx.bipartite.random_graph(a, b, 0.5, seed=rng.randrange(10 ** 6))
        sub, _ = peel_degree_one(Multigraph.from_networkx(G))
        if sub.m == 0:
            continue
        rep = moore_audit(sub, 6)
        if rep.bipartite_sides is not None:
            assert rep.bipartite_holds
    for dl, dr in [(2, 3), (3, 4), (2, 5)]:
        G = nx.bipartite.configuration_model([dl] * (dr * 4), [dr] * (dl * 4), seed=1,
                                             create_using=nx.Graph())
        sub, _ = peel_degree_one(Multigraph.from_networkx(G))
        rep = moore_audit(sub, 6)
        assert rep.passed


def test_chebyshev_k4():
    X = Multigraph.from_networkx(nx.complete_graph(4))
    checks = chebyshev_identity_audit(X, l_max=6)
    assert all(c.passed for c in checks)
    names = {c.name for c in checks}
    assert "A^2 = dI + A2" in names and "closed form" in names


def test_chebyshev_main_instance(main_instance):
    checks = chebyshev_identity_audit(main_instance.X, l_max=7, spectral_max_n=200)
    rec = [c for c in checks if c.name.startswith("A A_l")]
    assert [c.l for c in rec] == [2, 3, 4, 5, 6]
    assert all(c.passed for c in checks)
    assert not any(c.name == "closed form" for c in checks)


def test_chebyshev_detects_the_printed_variant():
    # A A_l = (d-1) A + A_(l+1) is false already at l = 3
    X = Multigraph.from_networkx(nx.random_regular_graph(3, 20, seed=2))
    As = nb_matrices(X, 4)
    A = X.adjacency_matrix()
    assert not np.array_equal(A @ As[2], 2 * A + As[3])
    assert np.array_equal(A @ As[2], 2 * As[1] + As[3])


def test_chebyshev_random_regular():
    for seed, (d, n) in enumerate([(3, 20), (4, 30), (5, 40), (3, 200), (6, 50)]):
        X = Multigraph.from_networkx(nx.random_regular_graph(d, n, seed=seed))
        checks = chebyshev_identity_audit(X, l_max=7)
        assert all(c.passed for c in checks), [c for c in checks if not c.passed]


def test_chebyshev_rejects_irregular():
    with pytest.raises(ValueError):
        chebyshev_identity_audit(Multigraph.from_networkx(nx.path_graph(4)))


def test_kahale_walk_bound(main_instance):
    X, Y = main_instance.X, main_instance.Y_ids
    for l in range(1, 7):
        chk = kahale_walk_bound_audit(X, Y, l, certified=True)
        assert chk.passed
    assert kahale_walk_bound_audit(X, Y, 4, certified=True).rhs == pytest.approx(1512)
    assert kahale_walk_bound_audit(X, Y, 4, certified=True).lhs == 288
    with pytest.raises(ValueError):
        kahale_walk_bound_audit(X, Y, 7, certified=True)
    with pytest.raises(ValueError):
        kahale_walk_bound_audit(X, range(720), 1, certified=True)
    with pytest.raises(ValueError):
        kahale_walk_bound_audit(X, Y, 2, certified=False)


def test_kahale_vertex_audit_extremal(main_instance):
    X, Y = main_instance.X, main_instance.Y_ids
    rep = kahale_vertex_audit(X, Y, 3, certified=True)
    assert rep.passed
    assert rep.boundary_size == 48 and rep.ratio == Fraction(2)
    assert (rep.e, rep.m, rep.m_prime) == (96, 48, 0)
    assert rep.d_prime_minus_1 == pytest.approx(math.sqrt(3))
    with pytest.raises(ValueError):
        kahale_vertex_audit(X, Y, 4, certified=True)


def test_kahale_vertex_audit_sparse_sets(main_instance):
    X = main_instance.X
    # two vertices at distance 2 share exactly one neighbor
    dist = distances_from(X, 0)
    far = next(v for v, k in dist.items() if k == 2)
    rep = kahale_vertex_audit(X, [0, far], 2, certified=True)
    assert rep.boundary_size == 7 and rep.m == 1
    rng = random.Random(4)
    for _ in range(10):
        S = rng.sample(range(720), 10)
        try:
            rep = kahale_vertex_audit(X, S, 3, certified=True)
        except ValueError:
            # no vertex with two neighbors in S: every neighbor is unique
            assert len(neighbor_profile(X, S).boundary) == 40
            continue
        assert rep.boundary_size > 2 * 10


def test_kahale_edge_audit(main_instance):
    X, Y = main_instance.X, main_instance.Y_ids
    chk = kahale_edge_audit(X, Y, 4, certified=True)
    assert chk.passed and chk.lhs == 0.0
