import json
import math

import networkx as nx
import numpy as np
import pytest

from ntexpander.graph import Multigraph, is_bipartite
from ntexpander.spectral import (SpectrumError, adjacency_spectrum, eigenfunction_json,
                                 eigenfunction_stats, ramanujan_audit, spectrum_csv,
                                 verify_Af_zero, zero_eigenfunction)

SQRT3 = math.sqrt(3)


def K(n):
    return Multigraph.from_networkx(nx.complete_graph(n))


def C(n):
    return Multigraph.from_networkx(nx.cycle_graph(n))


def test_known_spectra():
    assert np.allclose(adjacency_spectrum(K(4)).eigenvalues, [3, -1, -1, -1])
    rep = adjacency_spectrum(C(4))
    assert np.allclose(rep.eigenvalues, [2, 0, 0, -2])
    assert rep.bipartite and sorted(rep.trivial) == pytest.approx([-2, 2])


def test_cycle8_ramanujan():
    ok, rep = ramanujan_audit(C(8))
    assert ok
    assert rep.ramanujan_bound == 2.0
    want = sorted(2 * math.cos(2 * math.pi * k / 8) for k in range(8))
    assert np.allclose(sorted(rep.eigenvalues), want)
    assert rep.max_nontrivial < 2 - 1e-6


def test_main_x_spectrum(main_instance):
    ok, rep = ramanujan_audit(main_instance.X, tol=1e-9)
    assert ok and rep.method == "dense"
    assert len(rep.eigenvalues) == 720
    assert sorted(rep.trivial) == pytest.approx([-4, 4])
    assert rep.max_nontrivial == pytest.approx(3.28824561, abs=1e-7)
    assert rep.margin > 0.17
    assert all(rep.checks.values())


def test_main_y_spectrum(main_instance):
    ok, rep = ramanujan_audit(main_instance.Y_graph, tol=1e-9)
    assert ok
    assert rep.max_nontrivial == pytest.approx(2.0, abs=1e-9)
    assert rep.ramanujan_bound == pytest.approx(2 * SQRT3)


def test_iterative_agrees_with_dense(main_instance):
    X = main_instance.X
    dense = adjacency_spectrum(X, method="dense")
    it = adjacency_spectrum(X, method="iterative", k=6)
    assert it.method == "iterative"
    assert it.max_nontrivial == pytest.approx(dense.max_nontrivial, abs=1e-7)
    assert it.max_residual < 1e-6


def test_dense_limit_and_errors(main_instance):
    with pytest.raises(SpectrumError):
        adjacency_spectrum(main_instance.X, method="dense", dense_limit=100)
    rep = adjacency_spectrum(main_instance.X, dense_limit=100)
    assert rep.method == "iterative"
    with pytest.raises(ValueError):
        adjacency_spectrum(Multigraph.from_undirected(3, [(0, 1), (1, 2)]))
    with pytest.raises(ValueError):
        adjacency_spectrum(K(4), method="lanczos")


def test_random_regular_trace_identities():
    for seed in range(5):
        G = nx.random_regular_graph(3, 40, seed=seed)
        if not nx.is_connected(G):
            continue
        X = Multigraph.from_networkx(G)
        rep = adjacency_spectrum(X)
        assert abs(rep.eigenvalues.sum()) < 1e-8
        assert abs((rep.eigenvalues ** 2).sum() - X.m) < 1e-8 * X.m
        assert rep.checks["trace"] and rep.checks["trace_sq"]


def test_bipartite_spectrum_symmetric():
    X = Multigraph.from_networkx(nx.hypercube_graph(4))
    rep = adjacency_spectrum(X)
    assert rep.checks["symmetric"]
    assert np.allclose(np.sort(rep.eigenvalues), -np.sort(rep.eigenvalues)[::-1])


def test_zero_eigenfunction(main_instance):
    inst = main_instance
    f = zero_eigenfunction(inst.X, inst.Y_group, inst.Y_graph)
    ok, bad = verify_Af_zero(inst.X, f)
    assert ok and bad is None
    stats = eigenfunction_stats(f)
    assert stats == {"support": 24, "sum": 0, "norm_sq": 24,
                     "sup_over_l2": pytest.approx(24 ** -0.5)}
    assert stats["sup_over_l2"] >= 720 ** -0.25 / 2
    # orthogonal to the constant and the sign vector of X
    sign = 1 - 2 * np.array(is_bipartite(inst.X).coloring)
    assert int(f @ sign) == 0
    assert f[0] == 1
    # eigenvalue 0 in float arithmetic too
    A = inst.X.adjacency_matrix()
    assert not np.any(A @ f)
    # the sign convention does not matter
    assert verify_Af_zero(inst.X, -f)[0]


def test_verify_af_zero_small():
    X = K(4)
    assert verify_Af_zero(X, np.zeros(4, dtype=int)) == (True, None)
    ok, (x, val) = verify_Af_zero(X, np.array([1, 0, 0, 0]))
    assert not ok and x != 0 and val == 1
    with pytest.raises(ValueError):
        verify_Af_zero(X, np.zeros(5, dtype=int))


def test_zero_eigenfunction_rejects_nonbipartite(main_instance):
    inst = main_instance
    with pytest.raises(ValueError):
        zero_eigenfunction(inst.X, inst.Y_group, K(24))


def test_exports(main_instance):
    rep = adjacency_spectrum(main_instance.Y_graph)
    lines = spectrum_csv(rep).splitlines()
    assert lines[0] == "index,eigenvalue" and len(lines) == 25
    js = rep.to_json()
    assert js["n_eigenvalues"] == 24 and js["method"] == "dense"
    f = zero_eigenfunction(main_instance.X, main_instance.Y_group, main_instance.Y_graph)
    data = json.loads(eigenfunction_json(f))
    assert len(data) == 24 and set(data.values()) == {1, -1}
