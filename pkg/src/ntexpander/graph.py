"""Finite multigraphs in the directed-edge formalism, and Cayley graphs.

An undirected multigraph is stored as ``m`` directed edges with arrays
``src``, ``dst`` and an involution ``rev`` such that ``src[rev[e]] ==
dst[e]`` and ``rev[e] != e``. Parallel edges and self-loops are allowed; a
loop contributes two directed edges, reverses of each other. All edge counts
reported by this package (``m`` in summaries, walk counts) refer to directed
edges.
"""

import csv
import io
import json
import math
from collections import Counter, deque
from dataclasses import dataclass

import numpy as np

from .projgroup import inverse_pairing


class Multigraph:
    """Directed-edge multigraph with an edge involution.

    Args:
        n: number of vertices.
        src, dst, rev: integer arrays of length ``m``.
        label: optional per-edge labels (generator indices for Cayley graphs).
        vertex_labels: optional list of strings, used by the exporters.
    """

    def __init__(self, n, src, dst, rev, label=None, vertex_labels=None, check=True):
        self.n = int(n)
        self.src = np.asarray(src, dtype=np.int64)
        self.dst = np.asarray(dst, dtype=np.int64)
        self.rev = np.asarray(rev, dtype=np.int64)
        self.label = None if label is None else np.asarray(label, dtype=np.int64)
        self.vertex_labels = vertex_labels
        if check:
            self._validate()
        order = np.argsort(self.src, kind="stable")
        self.out_edges = order
        self.out_offsets = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(np.bincount(self.src, minlength=self.n), out=self.out_offsets[1:])

    def _validate(self):
        m = len(self.src)
        if not (len(self.dst) == len(self.rev) == m):
            raise ValueError("edge arrays differ in length")
        if m and (self.src.min() < 0 or self.src.max() >= self.n
                  or self.dst.min() < 0 or self.dst.max() >= self.n):
            raise ValueError("edge endpoint out of range")
        idx = np.arange(m)
        if m and (np.any(self.rev[self.rev] != idx) or np.any(self.rev == idx)):
            raise ValueError("rev is not a fixed-point-free involution")
        if m and np.any(self.src[self.rev] != self.dst):
            raise ValueError("s(rev e) != t(e)")

    @classmethod
    def from_undirected(cls, n, pairs, vertex_labels=None):
        """Build from undirected edges ``(u, v)``; each gives a pair of directed edges."""
        src, dst, rev = [], [], []
        for u, v in pairs:
            e = len(src)
            src += [u, v]
            dst += [v, u]
            rev += [e + 1, e]
        return cls(n, src, dst, rev, vertex_labels=vertex_labels)

    @classmethod
    def from_networkx(cls, G):
        nodes = list(G.nodes())
        pos = {v: i for i, v in enumerate(nodes)}
        return cls.from_undirected(len(nodes), [(pos[u], pos[v]) for u, v in G.edges()],
                                   vertex_labels=[str(v) for v in nodes])

    @property
    def m(self):
        """Number of directed edges."""
        return len(self.src)

    def degrees(self):
        return np.bincount(self.src, minlength=self.n)

    def is_regular(self):
        d = self.degrees()
        return self.n == 0 or bool(np.all(d == d[0]))

    def degree(self):
        """Common degree of a regular graph."""
        if not self.is_regular():
            raise ValueError("graph is not regular")
        return int(self.degrees()[0]) if self.n else 0

    def adjacency_lists(self):
        """Per-vertex lists of ``(edge, target)`` as plain ints (cached)."""
        if getattr(self, "_adj", None) is None:
            dst = self.dst.tolist()
            self._adj = [[(e, dst[e]) for e in self.edges_from(v).tolist()]
                         for v in range(self.n)]
        return self._adj

    def rev_list(self):
        if getattr(self, "_rev", None) is None:
            self._rev = self.rev.tolist()
        return self._rev

    def edges_from(self, v):
        return self.out_edges[self.out_offsets[v]:self.out_offsets[v + 1]]

    def neighbors(self, v):
        """Targets of the edges leaving ``v`` (with multiplicity)."""
        return self.dst[self.edges_from(v)]

    def adjacency_matrix(self, dtype=np.int64):
        """Dense ``A`` with ``A[x, y]`` = number of directed edges ``y -> x``."""
        A = np.zeros((self.n, self.n), dtype=dtype)
        np.add.at(A, (self.dst, self.src), 1)
        return A

    def sparse_adjacency(self):
        import scipy.sparse as sp
        data = np.ones(self.m, dtype=np.float64)
        return sp.csr_matrix((data, (self.dst, self.src)), shape=(self.n, self.n))

    def induced(self, vertices):
        """Induced subgraph on ``vertices``; returns ``(subgraph, vertex_ids)``."""
        vertices = np.unique(np.asarray(vertices, dtype=np.int64))
        pos = -np.ones(self.n, dtype=np.int64)
        pos[vertices] = np.arange(len(vertices))
        keep = np.flatnonzero((pos[self.src] >= 0) & (pos[self.dst] >= 0))
        new_id = -np.ones(self.m, dtype=np.int64)
        new_id[keep] = np.arange(len(keep))
        labels = None
        if self.vertex_labels is not None:
            labels = [self.vertex_labels[v] for v in vertices]
        sub = Multigraph(len(vertices), pos[self.src[keep]], pos[self.dst[keep]],
                         new_id[self.rev[keep]],
                         label=None if self.label is None else self.label[keep],
                         vertex_labels=labels, check=False)
        return sub, vertices


class CayleyGraph(Multigraph):
    """Cayley graph ``x -> g x`` of an enumerated group.

    Attributes:
        closure: the :class:`~ntexpander.projgroup.GroupClosure` of the vertex set.
        generators: generator list; edge ``i*d + k`` goes from vertex ``i``
            to ``generators[k] * elements[i]``.
        pairing: ``pairing[k]`` is the index of the inverse generator.
    """

    def __init__(self, closure, generators, pairing, targets):
        n, d = len(closure), len(generators)
        src = np.repeat(np.arange(n, dtype=np.int64), d)
        dst = np.asarray(targets, dtype=np.int64).reshape(-1)
        label = np.tile(np.arange(d, dtype=np.int64), n)
        rev = dst * d + np.asarray(pairing, dtype=np.int64)[label] if d else dst
        super().__init__(n, src, dst, rev, label=label,
                         vertex_labels=[str(g) for g in closure.elements], check=True)
        self.closure = closure
        self.generators = list(generators)
        self.pairing = list(pairing)


def cayley_build(G, gens=None):
    """Cayley graph of the closure ``G`` with respect to ``gens`` (default: its generators).

    Raises:
        ValueError: a generator outside ``G`` or a set not closed under inverses.
    """
    if gens is None:
        gens = G.generators
    gens = list(gens)
    if not gens:
        targets = np.zeros((len(G), 0), dtype=np.int64)
        return CayleyGraph(G, [], [], targets)
    missing = [k for k, g in enumerate(gens) if g not in G]
    if missing:
        raise ValueError(f"generators {missing} are not in the group")
    pairing = inverse_pairing(gens)
    if gens == list(G.generators):
        targets = G.left_table
    else:
        targets = [[G.index[g * x] for g in gens] for x in G.elements]
    return CayleyGraph(G, gens, pairing, targets)


def girth(X):
    """Length of the shortest cycle (loops count 1, parallel edges 2); ``math.inf`` for forests."""
    best = math.inf
    adj = X.adjacency_lists()
    rev = X.rev_list()
    for root in range(X.n):
        dist = {root: 0}
        parent_edge = {root: -1}
        queue = deque([root])
        while queue:
            u = queue.popleft()
            du = dist[u]
            # any cycle found from here has length >= 2*du
            if 2 * du >= best:
                break
            pe = parent_edge[u]
            back = rev[pe] if pe >= 0 else -1
            for e, w in adj[u]:
                if e == back:
                    continue
                dw = dist.get(w)
                if dw is None:
                    dist[w] = du + 1
                    parent_edge[w] = e
                    queue.append(w)
                else:
                    best = min(best, du + dw + 1)
    return best


@dataclass
class Bipartition:
    """Result of a 2-coloring attempt.

    ``coloring`` is a list of 0/1 per vertex when the graph is bipartite;
    otherwise ``None`` and ``odd_cycle`` lists the vertices of an odd closed walk.
    """

    coloring: list | None
    odd_cycle: list | None = None

    @property
    def bipartite(self):
        return self.coloring is not None

    def classes(self):
        if self.coloring is None:
            return None
        c = Counter(self.coloring)
        return c[0], c[1]


def is_bipartite(X):
    adj = X.adjacency_lists()
    color = [-1] * X.n
    parent = [-1] * X.n
    for root in range(X.n):
        if color[root] >= 0:
            continue
        color[root] = 0
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for _, w in adj[u]:
                if color[w] < 0:
                    color[w] = 1 - color[u]
                    parent[w] = u
                    queue.append(w)
                elif color[w] == color[u]:
                    return Bipartition(None, _odd_cycle(parent, u, w))
    return Bipartition(color)


def _odd_cycle(parent, u, w):
    def path(v):
        out = [v]
        while parent[v] >= 0:
            v = parent[v]
            out.append(v)
        return out

    pu, pw = path(u), path(w)
    common = set(pu) & set(pw)
    pu = pu[:next(i for i, v in enumerate(pu) if v in common) + 1]
    pw = pw[:next(i for i, v in enumerate(pw) if v in common)]
    return pu + pw[::-1]


def components(X):
    """Connected components as lists of vertex ids, ordered by smallest member."""
    adj = X.adjacency_lists()
    seen = [False] * X.n
    out = []
    for root in range(X.n):
        if seen[root]:
            continue
        seen[root] = True
        comp, queue = [root], deque([root])
        while queue:
            u = queue.popleft()
            for _, w in adj[u]:
                if not seen[w]:
                    seen[w] = True
                    comp.append(w)
                    queue.append(w)
        out.append(sorted(comp))
    return out


def distances_from(X, root):
    adj = X.adjacency_lists()
    dist = {root: 0}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for _, w in adj[u]:
            if w not in dist:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def neighborhood_fingerprint(X, perm=None):
    """Sorted multiset of (vertex, sorted labeled neighbor list) after relabeling by ``perm``."""
    perm = np.arange(X.n) if perm is None else np.asarray(perm)
    rows = []
    for v in range(X.n):
        es = X.edges_from(v)
        nbrs = sorted(zip((int(x) for x in perm[X.dst[es]]),
                          (int(x) for x in X.label[es]) if X.label is not None else [0] * len(es)))
        rows.append((int(perm[v]), tuple(nbrs)))
    return tuple(sorted(rows))


# -- exports ---------------------------------------------------------------

def to_dot(X, labels=True, name="G"):
    """Undirected DOT text; one line per edge pair."""
    lines = [f"graph {name} {{"]
    if labels and X.vertex_labels is not None:
        for v, lab in enumerate(X.vertex_labels):
            lab = lab.replace('"', '\\"')
            lines.append(f'  {v} [label="{lab}"];')
    for e in range(X.m):
        r = int(X.rev[e])
        if e < r:
            attr = f' [label="{int(X.label[e])}"]' if X.label is not None else ""
            lines.append(f"  {int(X.src[e])} -- {int(X.dst[e])}{attr};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_edge_csv(X):
    """CSV text ``src,dst,label`` with one row per directed edge."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["src", "dst", "label"])
    for e in range(X.m):
        w.writerow([int(X.src[e]), int(X.dst[e]), "" if X.label is None else int(X.label[e])])
    return buf.getvalue()


def summary(X, with_girth=True):
    """JSON-ready summary ``{n, m, degree, girth, bipartite, components}``."""
    bip = is_bipartite(X)
    g = girth(X) if with_girth else None
    return {
        "n": X.n,
        "m": X.m,
        "degree": X.degree() if X.is_regular() else None,
        "girth": (None if g is None else ("inf" if g == math.inf else int(g))),
        "bipartite": bip.bipartite,
        "bipartition_sizes": list(bip.classes()) if bip.bipartite else None,
        "components": len(components(X)),
    }


def summary_json(X, **kw):
    return json.dumps(summary(X, **kw), indent=2, sort_keys=True)
