"""Finite windows of the Bruhat-Tits building of PGL_n(F_q((t))).

A vertex is a homothety class of F_q[[t]]-lattices in F_q((t))^n. Each class
has a unique basis matrix (columns span the lattice) of the form::

    [[t^m1, f12, ..., f1n],
     [0,    t^m2, ..., f2n],
     ...
     [0,    0,    ..., t^mn]]

with ``m_i >= 0``, ``deg f_ij < m_i`` and no common factor ``t`` in the entries.
:func:`canonicalize` brings any nonsingular polynomial matrix to that form.

Two embeddings of smaller buildings are provided: the ramified one induced by
``F_q((t^2)) -> F_q((t))`` (``s -> t^2``) and the unramified one induced by
``F_q -> F_{q^2}`` on coefficients.
"""

import itertools
import json
from collections import Counter, deque
from dataclasses import dataclass, field

from . import polyarith as pa
from .ff import FieldEmbedding, PrimeField, field_make, prime_power
from .ffpoly import base_field
from .graph import Multigraph, distances_from

MAX_BALL_VERTICES = 250_000


# -- polynomial and series helpers ---------------------------------------------------


def _val(a):
    """t-adic valuation of a coefficient list (``None`` for zero)."""
    return next((i for i, c in enumerate(a) if c), None)


def _series_mul(F, a, b, N):
    out = [0] * N
    for i, x in enumerate(a[:N]):
        if x:
            for j, y in enumerate(b[:N - i]):
                if y:
                    out[i + j] = F.add(out[i + j], F.mul(x, y))
    return out


def _series_inv(F, u, N):
    """Inverse of a unit power series modulo ``t^N``."""
    inv0 = F.inv(u[0])
    out = [0] * N
    out[0] = inv0
    for k in range(1, N):
        acc = 0
        for j in range(1, min(k, len(u) - 1) + 1):
            if u[j] and out[k - j]:
                acc = F.add(acc, F.mul(u[j], out[k - j]))
        out[k] = F.neg(F.mul(acc, inv0))
    return out


def _poly_det(F, M):
    n = len(M)
    det = []
    for perm in itertools.permutations(range(n)):
        term = [1]
        for i, j in enumerate(perm):
            term = pa.mul(F, term, M[i][j])
            if not term:
                break
        if not term:
            continue
        inversions = sum(1 for a, b in itertools.combinations(perm, 2) if a > b)
        det = pa.sub(F, det, term) if inversions % 2 else pa.add(F, det, term)
    return det


def mat_mul(F, A, B):
    n = len(A)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = []
            for k in range(n):
                if A[i][k] and B[k][j]:
                    acc = pa.add(F, acc, pa.mul(F, A[i][k], B[k][j]))
            row.append(acc)
        out.append(row)
    return out


# -- vertices ------------------------------------------------------------------------


def _format_coeff(F, c):
    if isinstance(F, PrimeField):
        return str(c)
    terms = []
    for i, x in reversed(list(enumerate(F.coeffs(c)))):
        if not x:
            continue
        xs = _format_coeff(F.base, x)
        if i == 0:
            terms.append(xs)
        else:
            mono = F.var if i == 1 else f"{F.var}^{i}"
            terms.append(mono if xs == "1" else f"{xs}{mono}")
    return "+".join(terms) if terms else "0"


def format_poly(F, a, var="t"):
    """``t^2+t+1`` style text, highest degree first."""
    if not a:
        return "0"
    terms = []
    for k in range(len(a) - 1, -1, -1):
        c = a[k]
        if not c:
            continue
        cs = _format_coeff(F, c)
        if k == 0:
            terms.append(cs)
            continue
        mono = var if k == 1 else f"{var}^{k}"
        if cs == "1":
            terms.append(mono)
        elif "+" in cs:
            terms.append(f"({cs}){mono}")
        else:
            terms.append(f"{cs}{mono}")
    return "+".join(terms)


class BuildingVertex:
    """Canonical basis matrix of a lattice class; compares and hashes by value.

    Attributes:
        field: coefficient field F_q.
        n: matrix size.
        entries: ``entries[i][j]`` is a tuple of coefficient codes (lowest first).
    """

    __slots__ = ("field", "n", "entries", "_hash")

    def __init__(self, field, entries):
        self.field = field
        self.n = len(entries)
        self.entries = tuple(tuple(tuple(e) for e in row) for row in entries)
        self._hash = hash(self.entries)

    def __eq__(self, other):
        return (isinstance(other, BuildingVertex) and self.entries == other.entries
                and self.field == other.field)

    def __hash__(self):
        return self._hash

    @property
    def exponents(self):
        return tuple(len(self.entries[i][i]) - 1 for i in range(self.n))

    @property
    def color(self):
        """Exponent sum of the diagonal modulo ``n``."""
        return sum(self.exponents) % self.n

    def matrix(self):
        return [[list(e) for e in row] for row in self.entries]

    def is_canonical(self):
        ms = self.exponents
        for i in range(self.n):
            if list(self.entries[i][i]) != [0] * ms[i] + [1]:
                return False
            for j in range(self.n):
                e = self.entries[i][j]
                if j < i and e:
                    return False
                if j > i and len(e) > ms[i]:
                    return False
        return min(_val(e) for row in self.entries for e in row if e) == 0

    def label(self, var="t"):
        rows = ("(" + ",".join(format_poly(self.field, e, var) for e in row) + ")"
                for row in self.entries)
        return "(" + ",".join(rows) + ")"

    def to_json(self):
        return [[list(e) for e in row] for row in self.entries]

    def __repr__(self):
        return f"BuildingVertex{self.label()}"


def standard_vertex(F, n):
    return BuildingVertex(F, [[(1,) if i == j else () for j in range(n)] for i in range(n)])


def canonicalize(F, M):
    """Canonical vertex of the lattice spanned over F_q[[t]] by the columns of ``M``.

    Args:
        F: coefficient field.
        M: square matrix of coefficient lists (lowest degree first).

    Raises:
        ValueError: ``M`` is singular.
    """
    n = len(M)
    if n == 0 or any(len(row) != n for row in M):
        raise ValueError("matrix must be square and nonempty")
    M = [[pa.trim(e) for e in row] for row in M]
    D = _val(_poly_det(F, M))
    if D is None:
        raise ValueError("singular matrix")
    # t^D O^n lies in the lattice, so entries only matter modulo t^(D+1); scaling
    # and clearing lose at most D digits each, hence 3D+2 digits of working precision
    N = 3 * D + 2
    W = [[(list(e[:N]) + [0] * (N - len(e[:N]))) for e in row] for row in M]

    def col_axpy(j, k, coeff):
        # column j -= coeff * column k
        for r in range(n):
            if W[r][k] and any(W[r][k]):
                prod = _series_mul(F, coeff, W[r][k], N)
                W[r][j] = [F.sub(x, y) for x, y in zip(W[r][j], prod)]

    ms = [0] * n
    for i in range(n - 1, -1, -1):
        best, bv = None, None
        for j in range(i + 1):
            v = _val(W[i][j])
            if v is not None and (bv is None or v < bv):
                best, bv = j, v
        if best is None:
            raise ValueError("singular matrix")
        if best != i:
            for r in range(n):
                W[r][best], W[r][i] = W[r][i], W[r][best]
        unit_inv = _series_inv(F, W[i][i][bv:], N)
        for r in range(n):
            W[r][i] = _series_mul(F, W[r][i], unit_inv, N)
        for j in range(i):
            if _val(W[i][j]) is not None:
                coeff = W[i][j][bv:] + [0] * bv
                col_axpy(j, i, coeff)
        ms[i] = bv
    for i in range(n - 1, -1, -1):
        for j in range(i + 1, n):
            high = W[i][j][ms[i]:]
            if any(high):
                col_axpy(j, i, high + [0] * ms[i])
    content = min(ms + [_val(W[i][j][:ms[i]]) for i in range(n) for j in range(i + 1, n)
                        if _val(W[i][j][:ms[i]]) is not None])
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            if j < i:
                row.append(())
            elif j == i:
                row.append((0,) * (ms[i] - content) + (1,))
            else:
                row.append(tuple(pa.trim(W[i][j][content:ms[i]])))
        out.append(row)
    return BuildingVertex(F, out)


# -- neighbors -------------------------------------------------------------------------


def _field_of(q):
    if isinstance(q, int):
        if q < 2 or prime_power(q) is None:
            raise ValueError(f"q={q} is not a prime power")
        return base_field(q)
    return q


def neighbor_alphabet(n, q):
    """The matrices ``A`` with ``A_v A`` ranging over the neighbors of ``v``.

    Diagonal exponents are 0 or 1, ``f_ij`` is a constant allowed only when
    ``m_i = 1`` and ``m_j = 0``, and the identity and ``t I`` are excluded.
    Enumerated in a fixed order (exponent pattern, then entries).
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    F = _field_of(q)
    elems = sorted(F.elements(), key=F.sort_key)
    out = []
    for ms in itertools.product((0, 1), repeat=n):
        if sum(ms) in (0, n):
            continue
        free = [(i, j) for i in range(n) for j in range(i + 1, n) if ms[i] == 1 and ms[j] == 0]
        for vals in itertools.product(elems, repeat=len(free)):
            A = [[() for _ in range(n)] for _ in range(n)]
            for i in range(n):
                A[i][i] = (0,) * ms[i] + (1,)
            for (i, j), c in zip(free, vals):
                A[i][j] = (c,) if c else ()
            out.append(BuildingVertex(F, A))
    return out


def neighbors(v, alphabet=None):
    """Distinct neighbors of ``v`` in alphabet order."""
    if alphabet is None:
        alphabet = neighbor_alphabet(v.n, v.field)
    seen, out = set(), []
    Mv = v.matrix()
    for A in alphabet:
        w = canonicalize(v.field, mat_mul(v.field, Mv, A.matrix()))
        if w not in seen:
            seen.add(w)
            out.append(w)
    return out


# -- balls -------------------------------------------------------------------------------


@dataclass
class Ball:
    """Vertices within ``radius`` of the standard vertex, in BFS order.

    Attributes:
        vertices: BFS order; ``vertices[0]`` is the standard vertex.
        index: vertex -> id.
        dist: distance from the standard vertex.
        adjacency: neighbor ids inside the ball, per vertex.
        graph: the induced :class:`~ntexpander.graph.Multigraph`.
    """

    field: object
    n: int
    radius: int
    vertices: list
    index: dict
    dist: list
    adjacency: list
    graph: Multigraph = field(repr=False)
    var: str = "t"

    def __len__(self):
        return len(self.vertices)

    def __contains__(self, v):
        return v in self.index

    def sphere(self, r):
        return [i for i, d in enumerate(self.dist) if d == r]

    def within(self, r):
        return [i for i, d in enumerate(self.dist) if d <= r]


def build_ball(n, q, radius, max_vertices=MAX_BALL_VERTICES, var="t"):
    """Breadth-first ball of the given radius around the standard vertex.

    Raises:
        ValueError: negative radius, or the ball would exceed ``max_vertices``.
    """
    if radius < 0:
        raise ValueError("radius must be >= 0")
    F = _field_of(q)
    alphabet = neighbor_alphabet(n, F)
    root = standard_vertex(F, n)
    vertices, index, dist = [root], {root: 0}, [0]
    nbr_cache = []
    queue = deque([0])
    while queue:
        i = queue.popleft()
        nb = neighbors(vertices[i], alphabet)
        nbr_cache.append((i, nb))
        if dist[i] == radius:
            continue
        for w in nb:
            if w not in index:
                if len(vertices) >= max_vertices:
                    raise ValueError(f"ball exceeds {max_vertices} vertices; lower the radius")
                index[w] = len(vertices)
                vertices.append(w)
                dist.append(dist[i] + 1)
                queue.append(index[w])
    adjacency = [[] for _ in vertices]
    for i, nb in nbr_cache:
        adjacency[i] = [index[w] for w in nb if w in index]
    for v, d in zip(vertices, dist):
        # entries of radius-r vertices have exponents at most r
        assert max(v.exponents) <= d, f"exponent above radius at {v}"
    pairs = [(i, j) for i, adj in enumerate(adjacency) for j in adj if i < j]
    graph = Multigraph.from_undirected(len(vertices), pairs,
                                       vertex_labels=[v.label(var) for v in vertices])
    return Ball(F, n, radius, vertices, index, dist, adjacency, graph, var)


def tree_ball_size(q, r):
    """Vertices within distance ``r`` of a vertex of the ``(q+1)``-regular tree."""
    return 1 + (q + 1) * (q ** r - 1) // (q - 1)


def ball_distances(ball, source_id):
    return distances_from(ball.graph, source_id)


# -- embeddings ---------------------------------------------------------------------------


def embed_ramified(v):
    """Image of a vertex over ``F_q[s]`` under ``s -> t^2``."""
    F = v.field
    M = [[tuple(x for c in e for x in (c, 0))[:max(0, 2 * len(e) - 1)] for e in row]
         for row in v.entries]
    return canonicalize(F, M)


def unramified_fields(q):
    """``(F_q, F_{q^2}, embedding)`` with the least-root embedding."""
    F = _field_of(q)
    p, r = prime_power(F.order)
    G = field_make(p, 2 * r, var="a" if r == 1 else "b")
    return F, G, FieldEmbedding(F, G)


def embed_unramified(v, target, embedding=None):
    """Coefficient-wise image of ``v`` in the building over the larger field ``target``."""
    emb = embedding or FieldEmbedding(v.field, target)
    M = [[tuple(emb.map_code(c) for c in e) for e in row] for row in v.entries]
    return canonicalize(target, M)


# -- audits ------------------------------------------------------------------------------------


@dataclass
class NeighborAudit:
    """Z-neighbor counts of the vertices adjacent to the interior of ``Z``."""

    checked: int
    histogram: dict
    passed: bool
    exact: bool
    failures: list = field(default_factory=list)
    witness_checked: int = 0
    witness_failures: list = field(default_factory=list)

    def to_json(self):
        return {
            "checked": self.checked,
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
            "mode": "exactly 2" if self.exact else "at least 2",
            "witness_checked": self.witness_checked,
            "witness_failures": len(self.witness_failures),
            "pass": self.passed,
        }


def audit_no_unique_neighbors(ball, Z, interior, exact=True):
    """Every vertex outside ``Z`` adjacent to ``interior`` must see 2 vertices of ``Z``.

    Args:
        ball: ambient ball.
        Z: ids of the embedded set.
        interior: ids of ``Z`` whose neighbors' neighborhoods lie inside ``Z``'s window.
        exact: require exactly 2 rather than at least 2.

    Raises:
        ValueError: a checked vertex lies on the ball boundary.
    """
    Zs = set(Z)
    if any(ball.dist[z] >= ball.radius for z in interior):
        raise ValueError("boundary contamination: interior vertex on the ball boundary")
    targets = sorted({w for z in interior for w in ball.adjacency[z] if w not in Zs})
    hist, failures = Counter(), []
    for w in targets:
        if ball.dist[w] >= ball.radius:
            raise ValueError("boundary contamination: enlarge the radius")
        c = sum(1 for u in ball.adjacency[w] if u in Zs)
        hist[c] += 1
        if (c != 2) if exact else (c < 2):
            failures.append((w, c))
    return NeighborAudit(len(targets), dict(sorted(hist.items())), not failures, exact,
                         failures)


@dataclass
class RamifiedReport:
    ball_G: Ball
    ball_H: Ball
    Z: list
    interior: list
    audit: NeighborAudit
    injective: bool
    distance_doubling: bool

    @property
    def passed(self):
        return self.audit.passed and self.injective and self.distance_doubling

    def to_json(self):
        return {
            "n": self.ball_G.n,
            "q": self.ball_G.field.order,
            "radius": self.ball_G.radius,
            "ball_size": len(self.ball_G),
            "z_size": len(self.Z),
            "interior_size": len(self.interior),
            "injective": self.injective,
            "distance_doubling": self.distance_doubling,
            "audit": self.audit.to_json(),
            "pass": self.passed,
        }


def ramified_audit(n, q, radius, max_vertices=MAX_BALL_VERTICES, exact=True):
    """Embed ``ball_H(radius // 2)`` into ``ball_G(radius)`` and audit its neighbors.

    Also checks the explicit second neighbor: for ``M`` in the interior and
    ``A`` in the alphabet, ``M T(A)`` (``T`` doubles the diagonal exponents) lies
    in ``Z`` and is a neighbor of ``M A`` distinct from ``M``.
    """
    if radius < 2:
        raise ValueError("radius must be >= 2")
    G = build_ball(n, q, radius, max_vertices)
    h = radius // 2
    H = build_ball(n, q, h, max_vertices, var="s")
    images = [embed_ramified(v) for v in H.vertices]
    missing = [v for v in images if v not in G]
    if missing:
        raise AssertionError(f"embedded vertex outside the ball: {missing[0]}")
    Z = [G.index[v] for v in images]
    injective = len(set(Z)) == len(Z)
    interior = [G.index[images[i]] for i in H.within(h - 1)]
    audit = audit_no_unique_neighbors(G, Z, interior, exact=exact)
    # distances from the standard vertex double
    doubling = all(G.dist[z] == 2 * H.dist[i] for i, z in enumerate(Z))
    F = G.field
    alphabet = neighbor_alphabet(n, F)
    Zset = set(Z)
    for z in interior:
        M = G.vertices[z]
        Mm = M.matrix()
        for A in alphabet:
            M1 = canonicalize(F, mat_mul(F, Mm, A.matrix()))
            TA = [[list(e) for e in row] for row in A.entries]
            for i, mi in enumerate(A.exponents):
                TA[i][i] = [0] * (2 * mi) + [1]
            M2 = canonicalize(F, mat_mul(F, Mm, TA))
            audit.witness_checked += 1
            ok = (M2 in G and G.index[M2] in Zset and M2 != M
                  and M2 in neighbors(M1, alphabet))
            if not ok:
                audit.witness_failures.append((z, A.label()))
    audit.passed = audit.passed and not audit.witness_failures
    return RamifiedReport(G, H, Z, interior, audit, injective, doubling)


@dataclass
class UnramifiedReport:
    ball_G: Ball
    ball_H: Ball
    Z: list
    interior: list
    histogram: dict
    expected: int
    injective: bool
    adjacency_preserved: bool
    distance_preserving: bool

    @property
    def passed(self):
        return (set(self.histogram) == {self.expected} and self.injective
                and self.adjacency_preserved and self.distance_preserving)

    def to_json(self):
        return {
            "q": self.ball_H.field.order,
            "radius": self.ball_G.radius,
            "ball_size": len(self.ball_G),
            "z_size": len(self.Z),
            "interior_size": len(self.interior),
            "internal_degree_histogram": {str(k): v for k, v in sorted(self.histogram.items())},
            "expected_internal_degree": self.expected,
            "ambient_degree": self.ball_G.field.order + 1,
            "injective": self.injective,
            "adjacency_preserved": self.adjacency_preserved,
            "distance_preserving": self.distance_preserving,
            "pass": self.passed,
        }


def audit_internal_degree(ball, Z, interior):
    """Histogram of ``|N(z) & Z|`` over interior ``z``; raises on boundary vertices."""
    Zs = set(Z)
    hist = Counter()
    for z in interior:
        if ball.dist[z] >= ball.radius:
            raise ValueError("boundary contamination: enlarge the radius")
        hist[sum(1 for w in ball.adjacency[z] if w in Zs)] += 1
    return dict(sorted(hist.items()))


def unramified_audit(q, radius, max_vertices=MAX_BALL_VERTICES):
    """Embed the tree over F_q into the tree over F_{q^2} and audit internal degrees."""
    if radius < 1:
        raise ValueError("radius must be >= 1")
    F, Gf, emb = unramified_fields(q)
    H = build_ball(2, F, radius, max_vertices)
    G = build_ball(2, Gf, radius, max_vertices)
    images = [embed_unramified(v, Gf, emb) for v in H.vertices]
    missing = [v for v in images if v not in G]
    if missing:
        raise AssertionError(f"embedded vertex outside the ball: {missing[0]}")
    Z = [G.index[v] for v in images]
    injective = len(set(Z)) == len(Z)
    adjacency = all(Z[j] in G.adjacency[Z[i]] for i, adj in enumerate(H.adjacency)
                    for j in adj)
    distances = all(G.dist[z] == H.dist[i] for i, z in enumerate(Z))
    interior = [Z[i] for i in H.within(radius - 1)]
    hist = audit_internal_degree(G, Z, interior)
    return UnramifiedReport(G, H, Z, interior, hist, F.order + 1, injective, adjacency,
                            distances)


# -- export ----------------------------------------------------------------------------------


def ball_to_dot(ball, highlight=(), name="B"):
    """DOT text with matrix labels; highlighted vertices are filled."""
    hl = set(highlight)
    lines = [f"graph {name} {{", "  node [shape=box, fontsize=10];"]
    for i, v in enumerate(ball.vertices):
        style = ', style=filled, fillcolor="lightblue"' if i in hl else ""
        lines.append(f'  {i} [label="{v.label(ball.var)}"{style}];')
    for i, adj in enumerate(ball.adjacency):
        for j in adj:
            if i < j:
                lines.append(f"  {i} -- {j};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def ball_to_json(ball, highlight=()):
    hl = set(highlight)
    return json.dumps({
        "n": ball.n,
        "q": ball.field.order,
        "radius": ball.radius,
        "vertices": [{"id": i, "label": v.label(ball.var), "dist": d, "color": v.color,
                      "in_Z": i in hl, "matrix": v.to_json()}
                     for i, (v, d) in enumerate(zip(ball.vertices, ball.dist))],
        "edges": [[i, j] for i, adj in enumerate(ball.adjacency) for j in adj if i < j],
    }, indent=1, sort_keys=True)
