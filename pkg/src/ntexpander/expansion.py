"""Expansion audits: neighbor profiles, non-backtracking walk counts, the irregular
Moore bound, the non-backtracking operator recurrences, and finite-l Kahale bounds.

Walks follow the edge-transfer rule: a path ``e_1, ..., e_l`` of directed edges
is non-backtracking when ``t(e_i) = s(e_{i+1})`` and ``e_{i+1}`` is not the
reverse of ``e_i``. All counts are exact integers; floats only appear in the
bound comparisons.
"""

import csv
import io
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.sparse as sp

from .graph import is_bipartite

INT64_SAFE = 2 ** 62


def _as_vertex_set(X, S):
    S = sorted({int(v) for v in S})
    if S and (S[0] < 0 or S[-1] >= X.n):
        raise ValueError("subset contains vertices outside the graph")
    return S


def _mask(X, S):
    mask = np.zeros(X.n, dtype=bool)
    mask[list(S)] = True
    return mask


# -- neighbor profiles -------------------------------------------------------


@dataclass
class NeighborProfile:
    """How the neighborhood ``N(Y)`` meets ``Y``.

    Attributes:
        subset: sorted vertex ids of ``Y``.
        boundary: sorted vertex ids of ``N(Y)`` (may intersect ``Y``).
        counts: for each vertex of ``N(Y)``, its number of edges into ``Y``.
        histogram: ``{count: number of vertices of N(Y) with that count}``.
    """

    subset: list
    boundary: list
    counts: dict
    histogram: dict

    @property
    def has_unique_neighbor(self):
        return 1 in self.histogram

    @property
    def has_odd_neighbor(self):
        return any(k % 2 for k in self.histogram)

    def to_json(self):
        return {
            "subset_size": len(self.subset),
            "boundary_size": len(self.boundary),
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
            "has_unique_neighbor": self.has_unique_neighbor,
            "has_odd_neighbor": self.has_odd_neighbor,
        }


def neighbor_profile(X, Y):
    """Neighbor profile of a nonempty vertex set ``Y`` (edge multiplicities counted)."""
    Y = _as_vertex_set(X, Y)
    if not Y:
        raise ValueError("Y must be nonempty")
    mask = _mask(X, Y)
    into = mask[X.dst]
    counts = Counter(int(x) for x in X.src[into])
    hist = Counter(counts.values())
    return NeighborProfile(Y, sorted(counts), dict(sorted(counts.items())),
                           dict(sorted(hist.items())))


def induced_average_degree(X, S):
    """``(exact, float)`` average degree of the subgraph induced on ``S``."""
    S = _as_vertex_set(X, S)
    if not S:
        raise ValueError("S must be nonempty")
    mask = _mask(X, S)
    inside = int(np.count_nonzero(mask[X.src] & mask[X.dst]))
    avg = Fraction(inside, len(S))
    return avg, float(avg)


# -- non-backtracking walk counts ----------------------------------------------


def _count_dtype(X, l_max):
    dmax = int(X.degrees().max()) if X.n else 0
    return np.int64 if X.m * max(dmax, 1) ** l_max < INT64_SAFE else object


def _nb_step(X, c):
    """One transfer step: ``new[e'] = sum_{t(e) = s(e')} c[e] - c[rev(e')]``."""
    in_sum = np.zeros(X.n, dtype=c.dtype)
    np.add.at(in_sum, X.dst, c)
    return in_sum[X.src] - c[X.rev]


def nb_edge_vectors(X, l_max, start=None):
    """Yield ``(l, c_l)`` where ``c_l[e]`` counts NB paths of length ``l`` ending with ``e``.

    Only paths whose first edge leaves ``start`` (a vertex mask) are counted
    when ``start`` is given.
    """
    if l_max < 1:
        raise ValueError("l_max must be >= 1")
    dtype = _count_dtype(X, l_max)
    c = np.ones(X.m, dtype=dtype) if start is None else start[X.src].astype(dtype)
    for l in range(1, l_max + 1):
        if l > 1:
            c = _nb_step(X, c)
        yield l, c


@dataclass
class WalkCounts:
    """Non-backtracking path counts for ``l = 1..l_max``.

    Attributes:
        total: ``total[l-1]`` is ``M_l(X)``.
        within: per subset name, ``M_l(S)`` counted in the induced subgraph.
        between: per subset name, ``M_l(S, X)``: paths in ``X`` starting and ending in ``S``.
        exact_width: ``"int64"`` or ``"bigint"``.
    """

    l_max: int
    total: list
    within: dict = field(default_factory=dict)
    between: dict = field(default_factory=dict)
    exact_width: str = "int64"

    def M(self, l):
        return self.total[l - 1]

    def to_json(self):
        return {
            "l_max": self.l_max,
            "M_X": [int(v) for v in self.total],
            "M_S": {k: [int(v) for v in vals] for k, vals in self.within.items()},
            "M_SX": {k: [int(v) for v in vals] for k, vals in self.between.items()},
            "width": self.exact_width,
        }


def nb_total(X, l_max):
    return [int(c.sum()) for _, c in nb_edge_vectors(X, l_max)]


def nb_between(X, S, l_max):
    """``M_l(S, X)`` for ``l = 1..l_max``."""
    mask = _mask(X, _as_vertex_set(X, S))
    end = mask[X.dst]
    return [int(c[end].sum()) for _, c in nb_edge_vectors(X, l_max, start=mask)]


def nb_counts(X, l_max, subsets=None):
    """Exact non-backtracking path counts on ``X`` and on the given subsets.

    Args:
        X: multigraph.
        l_max: longest path length counted (``>= 1``).
        subsets: optional mapping ``name -> vertex ids``.
    """
    subsets = subsets or {}
    wc = WalkCounts(l_max, nb_total(X, l_max),
                    exact_width="int64" if _count_dtype(X, l_max) is np.int64 else "bigint")
    for name, S in subsets.items():
        sub, _ = X.induced(_as_vertex_set(X, S))
        wc.within[name] = nb_total(sub, l_max) if sub.m else [0] * l_max
        wc.between[name] = nb_between(X, S, l_max)
    return wc


def walk_counts_csv(wc):
    buf = io.StringIO()
    names = sorted(wc.within)
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["l", "M_X"] + [f"M_S[{k}]" for k in names] + [f"M_SX[{k}]" for k in names])
    for l in range(1, wc.l_max + 1):
        w.writerow([l, wc.total[l - 1]] + [wc.within[k][l - 1] for k in names]
                   + [wc.between[k][l - 1] for k in names])
    return buf.getvalue()


# -- Moore bound -------------------------------------------------------------------


def peel_degree_one(X):
    """Iteratively delete vertices of degree <= 1; returns ``(subgraph, kept ids)``."""
    alive = np.ones(X.n, dtype=bool)
    while True:
        live_edges = alive[X.src] & alive[X.dst]
        deg = np.bincount(X.src[live_edges], minlength=X.n)
        drop = alive & (deg <= 1)
        if not drop.any():
            break
        alive &= ~drop
    return X.induced(np.flatnonzero(alive).tolist())


def geometric_degree(X):
    """``d~`` with ``d~ - 1 = exp(sum_x d_x log(d_x - 1) / m)`` (edge-weighted geometric mean)."""
    deg = X.degrees()
    if X.m == 0:
        raise ValueError("graph has no edges")
    if np.any(deg == 1):
        raise ValueError("graph has a vertex of degree 1; peel it first")
    d = deg[deg >= 2].astype(float)
    return 1.0 + math.exp(float(np.sum(d * np.log(d - 1.0))) / X.m)


@dataclass
class MooreReport:
    m: int
    d_tilde: float
    d_bar: float
    regular: bool
    observed: list
    bounds: list
    holds: list
    d_tilde_ge_d_bar: bool
    equality_iff_regular: bool
    bipartite_sides: tuple | None = None
    bipartite_rhs: float | None = None
    bipartite_holds: bool | None = None

    @property
    def passed(self):
        ok = all(self.holds) and self.d_tilde_ge_d_bar and self.equality_iff_regular
        return ok and self.bipartite_holds is not False

    def to_json(self):
        return {
            "m": self.m,
            "d_tilde": self.d_tilde,
            "d_bar": self.d_bar,
            "regular": self.regular,
            "observed": [int(v) for v in self.observed],
            "bounds": self.bounds,
            "holds": self.holds,
            "d_tilde_ge_d_bar": self.d_tilde_ge_d_bar,
            "equality_iff_regular": self.equality_iff_regular,
            "bipartite_sides": self.bipartite_sides,
            "bipartite_rhs": self.bipartite_rhs,
            "bipartite_holds": self.bipartite_holds,
            "pass": self.passed,
        }


def moore_audit(X, l_max, rel_tol=1e-9):
    """Check ``M_l(X) >= m (d~ - 1)^(l-1)`` for ``l <= l_max`` plus the degree comparisons.

    Raises:
        ValueError: a vertex of degree 1 is present (use :func:`peel_degree_one`).
    """
    dt = geometric_degree(X)
    dbar = X.m / X.n
    regular = bool(X.is_regular())
    observed = nb_total(X, l_max)
    bounds, holds = [], []
    for l, M in enumerate(observed, start=1):
        # compare in logs; the regular case is an equality
        log_rhs = math.log(X.m) + (l - 1) * math.log(dt - 1)
        bounds.append(math.exp(log_rhs))
        holds.append(M > 0 and math.log(M) >= log_rhs - rel_tol * max(1.0, abs(log_rhs)))
    tol = rel_tol * dt
    rep = MooreReport(
        m=X.m, d_tilde=dt, d_bar=dbar, regular=regular, observed=observed, bounds=bounds,
        holds=holds, d_tilde_ge_d_bar=dt >= dbar - tol,
        equality_iff_regular=(abs(dt - dbar) <= tol) == regular,
    )
    bip = is_bipartite(X)
    if bip.bipartite:
        col = np.asarray(bip.coloring)
        L, R = int(np.count_nonzero(col == 0)), int(np.count_nonzero(col == 1))
        half = X.m / 2
        dl, dr = half / L, half / R
        rhs = math.sqrt(max(0.0, (dl - 1) * (dr - 1)))
        rep.bipartite_sides = (L, R)
        rep.bipartite_rhs = rhs
        rep.bipartite_holds = (dt - 1) >= rhs - rel_tol * max(1.0, rhs)
    return rep


# -- non-backtracking operators A_l ----------------------------------------------


def nb_matrices(X, l_max):
    """``[A_1, ..., A_l_max]`` with ``A_l[x, y]`` = number of NB paths of length l from y to x.

    Computed by edge transfer on ``m x n`` count matrices; exact integers.
    """
    if l_max < 1:
        raise ValueError("l_max must be >= 1")
    dtype = _count_dtype(X, l_max)
    n, m = X.n, X.m
    inc_t = sp.csr_matrix((np.ones(m, dtype=np.int64), (X.dst, np.arange(m))), shape=(n, m))
    E = np.zeros((m, n), dtype=dtype)
    E[np.arange(m), X.src] = 1
    out = []
    for l in range(1, l_max + 1):
        if l > 1:
            in_sum = _into(inc_t, E)
            E = in_sum[X.src] - E[X.rev]
        out.append(_into(inc_t, E))
    return out


def _into(inc_t, E):
    if E.dtype == object:
        rows = np.zeros((inc_t.shape[0], E.shape[1]), dtype=object)
        coo = inc_t.tocoo()
        np.add.at(rows, coo.row, E[coo.col])
        return rows
    return np.asarray(inc_t @ E)


def chebyshev_poly_values(x, l):
    """``(U_l(x), T_l(x))`` by the three-term recurrences (valid for any real ``x``)."""
    x = np.asarray(x, dtype=float)
    u_prev, u = np.ones_like(x), 2 * x
    t_prev, t = np.ones_like(x), x.copy()
    if l == 0:
        return u_prev, t_prev
    for _ in range(l - 1):
        u_prev, u = u, 2 * x * u - u_prev
        t_prev, t = t, 2 * x * t - t_prev
    return u, t


def nb_polynomial(lam, d, l):
    """Eigenvalue of ``A_l`` on an eigenvector of ``A`` with eigenvalue ``lam`` (``l >= 1``)."""
    r = math.sqrt(d - 1)
    U, T = chebyshev_poly_values(np.asarray(lam, dtype=float) / (2 * r), l)
    return r ** l * ((1 - 1 / (d - 1)) * U + 2 * T / (d - 1))


@dataclass
class IdentityCheck:
    name: str
    l: int
    passed: bool
    witness: tuple | None = None
    max_error: float | None = None

    def to_json(self):
        return {"name": self.name, "l": self.l, "pass": self.passed,
                "witness": None if self.witness is None else [int(v) if isinstance(
                    v, (int, np.integer)) else v for v in self.witness],
                "max_error": self.max_error}


def _first_mismatch(P, Q):
    diff = np.argwhere(P != Q)
    if len(diff) == 0:
        return None
    x, y = (int(v) for v in diff[0])
    return (x, y, int(P[x, y]), int(Q[x, y]))


def chebyshev_identity_audit(X, l_max=6, tol=1e-8, spectral_max_n=200):
    """Exact checks of ``A_1 = A``, ``A^2 = dI + A_2``, ``A A_l = (d-1) A_{l-1} + A_{l+1}``.

    The recurrence is checked for ``2 <= l < l_max``. When ``n <= spectral_max_n``
    the Chebyshev closed form is also compared against the counted ``A_l`` for
    ``1 <= l <= l_max``, to ``tol`` times ``max(1, max |A_l|)``.

    Returns:
        list of :class:`IdentityCheck`.
    """
    if not X.is_regular():
        raise ValueError("the recurrences need a regular graph")
    d = X.degree()
    if d < 2:
        raise ValueError("degree must be >= 2")
    As = nb_matrices(X, max(l_max, 2))
    A = X.adjacency_matrix()
    As_sparse = X.sparse_adjacency().astype(np.int64)
    n = X.n
    checks = []
    A1 = As[0]
    checks.append(IdentityCheck("A1 = A", 1, (w := _first_mismatch(A1, A)) is None, w))

    def prod(M):
        if M.dtype == object:
            return A.astype(object) @ M
        return np.asarray(As_sparse @ M)

    lhs = prod(A.astype(As[1].dtype))
    rhs = d * np.eye(n, dtype=As[1].dtype) + As[1]
    checks.append(IdentityCheck("A^2 = dI + A2", 2, (w := _first_mismatch(lhs, rhs)) is None, w))
    for l in range(2, l_max):
        lhs = prod(As[l - 1])
        rhs = (d - 1) * As[l - 2] + As[l]
        w = _first_mismatch(lhs, rhs)
        checks.append(IdentityCheck("A A_l = (d-1) A_(l-1) + A_(l+1)", l, w is None, w))
    if n <= spectral_max_n:
        lam, V = np.linalg.eigh(A.astype(float))
        for l in range(1, l_max + 1):
            P = (V * nb_polynomial(lam, d, l)) @ V.T
            Al = As[l - 1].astype(float)
            scale = max(1.0, float(np.max(np.abs(Al))))
            err = float(np.max(np.abs(P - Al)))
            checks.append(IdentityCheck("closed form", l, err <= tol * scale, None, err))
    return checks


# -- Kahale bounds -------------------------------------------------------------------


@dataclass
class BoundCheck:
    name: str
    lhs: float
    rhs: float
    passed: bool
    slack: float

    def to_json(self):
        return {"name": self.name, "lhs": self.lhs, "rhs": self.rhs, "pass": self.passed,
                "slack": self.slack}


def _check(name, lhs, rhs, tol=1e-9):
    return BoundCheck(name, lhs, rhs, lhs <= rhs + tol * max(1.0, abs(rhs)), rhs - lhs)


def _ensure_ramanujan(X, certified):
    if certified is None:
        from .spectral import ramanujan_audit
        certified, _ = ramanujan_audit(X)
    if not certified:
        raise ValueError("X is not certified Ramanujan")
    if not X.is_regular():
        raise ValueError("X must be regular")
    return X.degree()


def kahale_walk_bound_audit(X, S, l, certified=None):
    """Check ``M_l(S, X) <= |S| (l + 3) (d - 1)^(l/2)``.

    Args:
        certified: result of a prior Ramanujan audit; computed when ``None``.

    Raises:
        ValueError: ``|S| (d-1)^(l/2) > n``, an empty ``S``, or an uncertified ``X``.
    """
    S = _as_vertex_set(X, S)
    if not S or l < 1:
        raise ValueError("need a nonempty S and l >= 1")
    d = _ensure_ramanujan(X, certified)
    if len(S) * (d - 1) ** (l / 2) > X.n:
        raise ValueError(f"precondition |S|(d-1)^(l/2) <= n fails for l={l}")
    M = nb_between(X, S, l)[-1]
    return _check(f"M_{l}(S,X) <= |S|(l+3)(d-1)^(l/2)", float(M),
                  len(S) * (l + 3) * (d - 1) ** (l / 2))


@dataclass
class VertexAuditReport:
    s: int
    l: int
    degree: int
    e: int
    m: int
    m_prime: int
    boundary_size: int
    d_prime_minus_1: float
    histogram: dict
    bounds: list

    @property
    def passed(self):
        return all(b.passed for b in self.bounds)

    @property
    def ratio(self):
        return Fraction(self.boundary_size, self.s)

    def to_json(self):
        return {
            "subset_size": self.s,
            "boundary_size": self.boundary_size,
            "l": self.l,
            "e": self.e,
            "m": self.m,
            "m_prime": self.m_prime,
            "d_prime_minus_1": self.d_prime_minus_1,
            "expansion_ratio": float(self.ratio),
            "half_degree": self.degree / 2,
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
            "bounds": [b.to_json() for b in self.bounds],
            "pass": self.passed,
        }


def kahale_vertex_audit(X, S, l, certified=None):
    """Quantities of the vertex-expansion argument for a set ``S``.

    ``N(S)`` splits into ``M`` (two or more edges into ``S``) and ``M'``
    (exactly one). With ``e`` the number of edges from ``S`` into ``M``,
    ``d' - 1 = sqrt((e/s - 1)(e/m - 1))`` must satisfy
    ``d' - 1 <= (l + 3)^(1/l) sqrt(d - 1)``. A factor ``e/s - 1 < 0`` makes the
    inequality vacuous and ``d' - 1`` is reported as 0.

    Raises:
        ValueError: ``|S| (d-1)^l > n``, ``M`` empty, or an uncertified ``X``.
    """
    S = _as_vertex_set(X, S)
    if not S or l < 1:
        raise ValueError("need a nonempty S and l >= 1")
    d = _ensure_ramanujan(X, certified)
    if len(S) * (d - 1) ** l > X.n:
        raise ValueError(f"precondition |S|(d-1)^l <= n fails for l={l}")
    prof = neighbor_profile(X, S)
    M = [x for x, c in prof.counts.items() if c >= 2]
    m_prime = sum(1 for c in prof.counts.values() if c == 1)
    if not M:
        raise ValueError("degenerate configuration: no vertex has two neighbors in S")
    s = len(S)
    e = sum(prof.counts[x] for x in M)
    dp1 = math.sqrt(max(0.0, (e / s - 1) * (e / len(M) - 1)))
    bounds = [
        _check("d'-1 <= (l+3)^(1/l) sqrt(d-1)", dp1, (l + 3) ** (1 / l) * math.sqrt(d - 1)),
        # bookkeeping identity, exact
        _check("|N(S)| = m + ds - e", float(len(prof.boundary)),
               float(len(M) + d * s - e), tol=0.0),
    ]
    return VertexAuditReport(s=s, l=l, degree=d, e=e, m=len(M), m_prime=m_prime,
                             boundary_size=len(prof.boundary), d_prime_minus_1=dp1,
                             histogram=prof.histogram, bounds=bounds)


def kahale_edge_audit(X, S, l, certified=None):
    """Average induced degree of ``S`` against ``(l+3)^(1/l) sqrt(d-1) + 1``."""
    S = _as_vertex_set(X, S)
    d = _ensure_ramanujan(X, certified)
    if len(S) * (d - 1) ** (l / 2) > X.n:
        raise ValueError(f"precondition |S|(d-1)^(l/2) <= n fails for l={l}")
    _, avg = induced_average_degree(X, S)
    return _check("induced average degree", avg, (l + 3) ** (1 / l) * math.sqrt(d - 1) + 1)


def report_json(obj):
    return json.dumps(obj, indent=2, sort_keys=True)
