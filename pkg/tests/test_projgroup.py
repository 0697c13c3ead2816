import itertools
import random

import numpy as np
import pytest
import sympy.combinatorics as comb
from hypothesis import given, settings
from hypothesis import strategies as st

from ntexpander.ff import field_make
from ntexpander.projgroup import (ClosureCapExceeded, element_order, generate_closure,
                                  identity, inverse_pairing, order_statistics, pgl2_order,
                                  pm_inv, pm_make, pm_mul, psl2_order)


def _canon_int(M, p):
    """Scalar-normalize an integer matrix mod p by its first nonzero entry."""
    flat = [int(x) % p for x in np.ravel(M)]
    lead = next(x for x in flat if x)
    inv = pow(lead, -1, p)
    return tuple(x * inv % p for x in flat)


def _all_pgl2(p):
    out = set()
    for a, b, c, d in itertools.product(range(p), repeat=4):
        if (a * d - b * c) % p:
            out.add(_canon_int([[a, b], [c, d]], p))
    return out


def test_pm_make_examples():
    F = field_make(3)
    assert pm_make([[2, 0], [0, 2]], F) == identity(F)
    assert pm_make([[0, 1], [2, 0]], F).to_json() == [0, 1, 2, 0]
    assert pm_make([[2, 1], [1, 1]], F).to_json() == [1, 2, 2, 2]


def test_pm_make_errors():
    F = field_make(3)
    with pytest.raises(ValueError):
        pm_make([[1, 1], [1, 1]], F)
    with pytest.raises(ValueError):
        pm_make([[1, 0], [0]], F)
    with pytest.raises(ValueError):
        pm_make([[1, 0], [0, 1]])


def test_inverse_example():
    F = field_make(3)
    a = pm_make([[0, 1], [2, 0]], F)
    # adjugate [[0, -1], [-2, 0]] = [[0, 2], [1, 0]]
    assert pm_inv(a).to_json() == [0, 1, 2, 0]
    assert pm_mul(a, pm_inv(a)) == identity(F)


@pytest.mark.parametrize("p,k", [(3, 1), (5, 1), (3, 2)])
def test_scalar_invariance(p, k):
    F = field_make(p, k)
    rng = random.Random(p * k)
    for _ in range(20):
        while True:
            M = [[rng.randrange(F.order) for _ in range(2)] for _ in range(2)]
            det = F.sub(F.mul(M[0][0], M[1][1]), F.mul(M[0][1], M[1][0]))
            if det:
                break
        ref = pm_make([[F.element(x) for x in row] for row in M])
        for lam in F.elements():
            if lam:
                scaled = [[F.element(F.mul(lam, x)) for x in row] for row in M]
                assert pm_make(scaled) == ref


def test_random_inverses_f9():
    F = field_make(3, 2)
    rng = random.Random(1)
    n = 0
    while n < 100:
        M = [[rng.randrange(9) for _ in range(2)] for _ in range(2)]
        if F.sub(F.mul(M[0][0], M[1][1]), F.mul(M[0][1], M[1][0])) == 0:
            continue
        a = pm_make([[F.element(x) for x in row] for row in M])
        assert a * a.inverse() == identity(F)
        assert a.inverse() * a == identity(F)
        n += 1


def test_pgl3_inverse():
    F = field_make(5)
    a = pm_make([[1, 2, 0], [0, 1, 3], [4, 0, 2]], F)
    assert a * pm_inv(a) == identity(F, 3)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 4), min_size=12, max_size=12))
def test_multiplication_matches_integer_oracle(xs):
    p = 5
    F = field_make(p)
    A = np.array(xs[:4]).reshape(2, 2)
    B = np.array(xs[4:8]).reshape(2, 2)
    if round(np.linalg.det(A)) % p == 0 or round(np.linalg.det(B)) % p == 0:
        return
    prod = pm_make(A.tolist(), F) * pm_make(B.tolist(), F)
    assert tuple(prod.to_json()) == _canon_int(A @ B, p)


@pytest.mark.parametrize("p", [3, 5, 7])
def test_closure_of_elementary_matrices_is_pgl2(p):
    F = field_make(p)
    gens = [pm_make([[1, 1], [0, 1]], F), pm_make([[1, 0], [1, 1]], F),
            pm_make([[F.primitive_element(), 0], [0, 1]], F)]
    G = generate_closure(gens, cap=10 ** 5)
    brute = _all_pgl2(p)
    assert len(G) == len(brute) == pgl2_order(p)
    assert {tuple(g.to_json()) for g in G.elements} == brute
    # SL2 generators reach only PSL2
    H = generate_closure(gens[:2], cap=10 ** 5)
    assert len(H) == psl2_order(p)


def test_closure_invariants():
    F = field_make(5)
    gens = [pm_make([[1, 1], [0, 1]], F), pm_make([[0, 1], [1, 0]], F)]
    G = generate_closure(gens, cap=1000)
    assert G.elements[0] == identity(F) and G.depth[0] == 0
    for i, row in enumerate(G.left_table):
        for k, j in enumerate(row):
            assert G.elements[j] == gens[k] * G.elements[i]
            assert G.depth[j] <= G.depth[i] + 1
    assert all(G.index[g] == i for i, g in enumerate(G.elements))


def test_trivial_closure_and_cap():
    F = field_make(3)
    G = generate_closure([identity(F)], cap=1)
    assert len(G) == 1
    assert order_statistics(G) == {1: 1}
    with pytest.raises(ClosureCapExceeded):
        generate_closure([pm_make([[1, 1], [0, 1]], F), pm_make([[1, 0], [1, 1]], F)], cap=5)
    with pytest.raises(ValueError):
        generate_closure([], cap=5)


def test_cyclic_order_statistics():
    F = field_make(3)
    G = generate_closure([pm_make([[1, 1], [0, 1]], F)], cap=10)
    assert order_statistics(G) == {1: 1, 3: 2}
    assert element_order(pm_make([[0, 1], [1, 0]], F)) == 2


def test_pgl2_f3_is_s4_fingerprint():
    F = field_make(3)
    G = generate_closure([pm_make([[1, 1], [0, 1]], F), pm_make([[0, 1], [1, 0]], F)], cap=100)
    S4 = comb.SymmetricGroup(4)
    want = {}
    for g in S4.elements:
        want[g.order()] = want.get(g.order(), 0) + 1
    assert order_statistics(G) == dict(sorted(want.items()))


def test_inverse_pairing():
    F = field_make(5)
    a = pm_make([[1, 1], [0, 1]], F)
    b = pm_make([[0, 1], [1, 0]], F)
    assert inverse_pairing([a, a.inverse(), b]) == [1, 0, 2]
    with pytest.raises(ValueError):
        inverse_pairing([a])


def test_group_orders():
    assert pgl2_order(9) == 720
    assert psl2_order(9) == 360
    assert psl2_order(4) == pgl2_order(4) == 60
