"""End-to-end acceptance checks on the q=3, htilde=s+1 instance and generic suites.

Each test prints one ``PASS``/``FAIL`` line; the lines are repeated in the
pytest terminal summary. Run standalone with ``python3 tests/test_acceptance.py``.
"""

import math
import random
import time

import networkx as nx
import numpy as np

from ntexpander import building, expansion, ffpoly, graph, spectral
from ntexpander.ff import field_make
from ntexpander.ffpoly import Polynomial
from ntexpander.morgenstern import build_instance, make_params
from ntexpander.projgroup import order_statistics

RESULTS = []
_CACHE = {}


def report(num, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {num}: {detail}"
    RESULTS.append(line)
    print(line)
    return ok


def instance():
    if "inst" not in _CACHE:
        t0 = time.perf_counter()
        _CACHE["inst"] = build_instance(make_params(3, htilde=[1, 1]))
        _CACHE["build_seconds"] = time.perf_counter() - t0
    return _CACHE["inst"]


def test_criterion_01_construction():
    inst = instance()
    X = inst.X
    bip = graph.is_bipartite(X)
    secs = _CACHE["build_seconds"]
    ok = (X.n == 720 == 9 * (81 - 1) and X.is_regular() and X.degree() == 4
          and len(graph.components(X)) == 1 and bip.classes() == (360, 360)
          and len(inst.Y_group) == 24 and secs < 10)
    assert report(1, ok, f"|X|={X.n}, d={X.degree()}, classes={bip.classes()}, "
                         f"|Y|={len(inst.Y_group)}, build {secs:.2f}s")


def test_criterion_02_girth():
    X = instance().X
    g = graph.girth(X)
    bound = math.ceil(4 / 3 * math.log(720, 3))
    assert report(2, bound == 8 and g >= bound, f"girth={g} >= {bound}")


def test_criterion_03_vertex_expansion():
    inst = instance()
    prof = expansion.neighbor_profile(inst.X, inst.Y_ids)
    avg, _ = expansion.induced_average_degree(inst.X, inst.Y_ids)
    ok = (avg == 0 and prof.histogram == {2: 48} and len(prof.boundary) == 48
          and len(prof.boundary) * 2 == (3 + 1) * 24
          and not prof.has_unique_neighbor and not prof.has_odd_neighbor)
    assert report(3, ok, f"Y independent={avg == 0}, histogram={prof.histogram}, "
                         f"|N(Y)|={len(prof.boundary)}")


def test_criterion_04_ramanujan():
    inst = instance()
    bound = 2 * math.sqrt(3)
    t0 = time.perf_counter()
    okx, rx = spectral.ramanujan_audit(inst.X, tol=1e-9, method="dense")
    secs = time.perf_counter() - t0
    oky, ry = spectral.ramanujan_audit(inst.Y_graph, tol=1e-9, method="dense")
    ok = (okx and oky and rx.method == "dense" and len(rx.eigenvalues) == 720
          and np.allclose(sorted(rx.trivial), [-4, 4]) and rx.max_nontrivial <= bound + 1e-9
          and ry.max_nontrivial <= bound + 1e-9 and secs < 60)
    assert report(4, ok, f"X max|lambda|={rx.max_nontrivial:.8f}, "
                         f"Y max|lambda|={ry.max_nontrivial:.8f}, bound={bound:.8f}, "
                         f"eigensolve {secs:.2f}s")


def test_criterion_05_zero_eigenfunction():
    inst = instance()
    f = spectral.zero_eigenfunction(inst.X, inst.Y_group, inst.Y_graph)
    ok_af, viol = spectral.verify_Af_zero(inst.X, f)
    st = spectral.eigenfunction_stats(f)
    ratio = st["sup_over_l2"]
    ok = (ok_af and st["support"] == 24 and st["sum"] == 0
          and math.isclose(ratio, 24 ** -0.5) and ratio >= 720 ** -0.25 / 2)
    assert report(5, ok, f"Af=0 at all {inst.X.n} vertices={ok_af}, support={st['support']}, "
                         f"sup/L2={ratio:.4f} >= {720 ** -0.25 / 2:.4f}")


def test_criterion_06_subgroup_fingerprint():
    inst = instance()
    hist = order_statistics(inst.Y_group)
    bip = graph.is_bipartite(inst.Y_graph)
    ident_side = bip.coloring[0] if bip.bipartite else None
    side = sum(1 for c in bip.coloring if c == ident_side) if bip.bipartite else None
    ok = (len(inst.Y_group) == 24 and hist == {1: 1, 2: 9, 3: 8, 4: 6}
          and bip.bipartite and side == 12)
    assert report(6, ok, f"|<delta>|={len(inst.Y_group)}, orders={hist}, "
                         f"identity side={side} (order/fingerprint evidence only)")


def _random_test_graphs(count, seed):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        n = rng.randint(20, 300)
        G = nx.gnm_random_graph(n, rng.randint(n, 3 * n), seed=rng.randrange(10 ** 9))
        sub, _ = expansion.peel_degree_one(graph.Multigraph.from_networkx(G))
        if sub.n >= 5 and sub.n <= 300 and sub.degrees().min() >= 2:
            out.append(sub)
    return out


def test_criterion_07_moore_chebyshev():
    X = instance().X
    failures = []
    graphs = [("X", X)] + [(f"G{i}", G) for i, G in enumerate(_random_test_graphs(20, 2024))]
    for name, G in graphs:
        rep = expansion.moore_audit(G, 10)
        if not (all(rep.holds) and rep.d_tilde >= rep.d_bar - 1e-12
                and rep.equality_iff_regular and rep.bipartite_holds is not False):
            failures.append(f"moore {name}")
    regular = [("X", X)]
    for i, (d, n) in enumerate([(3, 50), (4, 100), (5, 150), (3, 200), (6, 120)]):
        regular.append((f"R{i}", graph.Multigraph.from_networkx(
            nx.random_regular_graph(d, n, seed=i))))
    regular.append(("K4", graph.Multigraph.from_networkx(nx.complete_graph(4))))
    n_closed = 0
    for name, G in regular:
        checks = expansion.chebyshev_identity_audit(G, l_max=7, tol=1e-8, spectral_max_n=200)
        n_closed += sum(1 for c in checks if c.name == "closed form")
        failures += [f"{c.name} l={c.l} on {name}" for c in checks if not c.passed]
    ok = not failures and n_closed > 0
    assert report(7, ok, f"Moore on {len(graphs)} graphs, identities l<=6 on {len(regular)} "
                         f"regular graphs ({n_closed} closed-form checks); "
                         f"failures={failures or 'none'}")


def test_criterion_08_kahale():
    inst = instance()
    X, Y = inst.X, inst.Y_ids
    okr, _ = spectral.ramanujan_audit(X)
    lines, ok = [], okr
    ls = [l for l in range(1, 20) if 24 * 3 ** (l / 2) <= 720]
    for l in ls:
        chk = expansion.kahale_walk_bound_audit(X, Y, l, certified=okr)
        ok = ok and chk.passed and chk.rhs == 24 * (l + 3) * 3 ** (l / 2)
        lines.append(f"{int(chk.lhs)}<={chk.rhs:.0f}")
    va = expansion.kahale_vertex_audit(X, Y, 3, certified=okr)
    ok = ok and ls == [1, 2, 3, 4, 5, 6] and va.passed and 2 * va.boundary_size == 4 * 24
    assert report(8, ok, f"M_l(Y,X) l=1..6: {', '.join(lines)}; "
                         f"|N(Y)|={va.boundary_size} = d/2|Y|")


def test_criterion_09_building():
    failures = []
    for q in (2, 3):
        for r in range(1, 6):
            if len(building.build_ball(2, q, r)) != 1 + (q + 1) * (q ** r - 1) // (q - 1):
                failures.append(f"tree q={q} r={r}")
        rr = building.ramified_audit(2, q, 4)
        if not (rr.passed and set(rr.audit.histogram) == {2}):
            failures.append(f"ramified q={q}")
        ur = building.unramified_audit(q, 3)
        if not (ur.passed and set(ur.histogram) == {q + 1}):
            failures.append(f"unramified q={q}")
    alpha = len(building.neighbor_alphabet(3, 2))
    r3 = building.ramified_audit(3, 2, 2)
    if alpha != 14 or not r3.passed:
        failures.append("n=3")
    ok = not failures
    assert report(9, ok, f"tree counts r<=5, ramified exactly-2, unramified degree q+1, "
                         f"n=3 alphabet={alpha} histogram={r3.audit.histogram}; "
                         f"failures={failures or 'none'}")


def test_criterion_10_arithmetic():
    rng = random.Random(10)
    recip = 0
    ok = True
    for q in (3, 5):
        F = field_make(q)
        pool = [g for d in range(1, 5) for g in ffpoly.monic_irreducibles(F, d)]
        for _ in range(100):
            f, g = rng.sample(pool, 2)
            ok = ok and ffpoly.reciprocity_check(f, g)
            recip += 1
    inert_cases = 0
    for q in (3, 5):
        F = field_make(q)
        for d in (1, 2, 3):
            for h in ffpoly.monic_irreducibles(F, d, var="s"):
                ok = ok and ffpoly.inert_test(h) == ffpoly.is_irreducible(
                    ffpoly.pullback_square(h))
                inert_cases += 1
    F3 = field_make(3)
    g = ffpoly.mobius_substitute(Polynomial(F3, [1, 0, 1], var="t"), 1, 0, -1, 2, var="u")
    sym = ffpoly.legendre(Polynomial(F3, [0, 1], var="u"), g)
    cls = ffpoly.classify_graph_type(Polynomial(F3, [1, 1], var="s"))
    ok = ok and g.to_json() == [2, 1, 1] and sym == -1 and cls is ffpoly.GraphType.PGL_BIPARTITE
    assert report(10, ok, f"reciprocity {recip} pairs, inert<->irreducible {inert_cases} cases, "
                          f"g(u)={g}, (u/g)={sym}, type={cls.value}")


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion"):
            try:
                fn()
            except AssertionError:
                pass
