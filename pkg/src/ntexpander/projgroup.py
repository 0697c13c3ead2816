"""Projective linear groups PGL_n over finite fields.

A :class:`ProjectiveMatrix` stores its entries scaled so that the first
nonzero entry in row-major order is 1. With that normalization two matrices
represent the same element of PGL_n exactly when their stored entries agree,
so elements hash and compare by value.
"""

from collections import Counter, deque
from dataclasses import dataclass, field as dc_field

from .ff import FieldElement, FieldMismatchError


class ClosureCapExceeded(RuntimeError):
    """The generated subgroup grew past the configured cap."""


def _canonical(F, entries):
    lead = next((c for c in entries if c), 0)
    if lead == 0:
        raise ValueError("zero matrix")
    if lead == 1:
        return tuple(entries)
    s = F.inv(lead)
    return tuple(F.mul(c, s) for c in entries)


def _det(F, n, entries):
    rows = [list(entries[i * n:(i + 1) * n]) for i in range(n)]
    det = 1
    for col in range(n):
        pivot = next((r for r in range(col, n) if rows[r][col]), None)
        if pivot is None:
            return 0
        if pivot != col:
            rows[col], rows[pivot] = rows[pivot], rows[col]
            det = F.neg(det)
        pv = rows[col][col]
        det = F.mul(det, pv)
        inv = F.inv(pv)
        for r in range(col + 1, n):
            if rows[r][col]:
                f = F.mul(rows[r][col], inv)
                rows[r] = [F.sub(x, F.mul(f, y)) for x, y in zip(rows[r], rows[col])]
    return det


class ProjectiveMatrix:
    """Element of PGL_n(F) in canonical scalar normalization."""

    __slots__ = ("field", "n", "entries", "_hash")

    def __init__(self, field, n, entries, canonical=False):
        self.field = field
        self.n = n
        self.entries = tuple(entries) if canonical else _canonical(field, entries)
        self._hash = hash((n, self.entries))

    def __eq__(self, other):
        return (isinstance(other, ProjectiveMatrix) and self.entries == other.entries
                and self.n == other.n and self.field == other.field)

    def __hash__(self):
        return self._hash

    def __mul__(self, other):
        return pm_mul(self, other)

    def inverse(self):
        return pm_inv(self)

    def __pow__(self, e):
        if e < 0:
            return pm_inv(self) ** (-e)
        result = identity(self.field, self.n)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def det(self):
        """Determinant of the stored representative (defined up to n-th powers of scalars)."""
        return FieldElement(self.field, _det(self.field, self.n, self.entries))

    def is_identity(self):
        return self == identity(self.field, self.n)

    def rows(self):
        n = self.n
        return [[FieldElement(self.field, c) for c in self.entries[i * n:(i + 1) * n]]
                for i in range(n)]

    def to_json(self):
        return [self.field.to_json(c) for c in self.entries]

    def __str__(self):
        n = self.n
        rows = (", ".join(self.field.format(c) for c in self.entries[i * n:(i + 1) * n])
                for i in range(n))
        return "[" + "; ".join(rows) + "]"

    def __repr__(self):
        return f"ProjectiveMatrix({self})"


def identity(field, n=2):
    return ProjectiveMatrix(field, n, [1 if i == j else 0 for i in range(n) for j in range(n)],
                            canonical=True)


def pm_make(entries, field=None):
    """Canonical PGL element from a square nested list of field elements or ints.

    Raises:
        ValueError: ragged/non-square input or a singular matrix.
    """
    n = len(entries)
    if n == 0 or any(len(row) != n for row in entries):
        raise ValueError("entries must form a nonempty square matrix")
    flat = [x for row in entries for x in row]
    if field is None:
        field = next((x.field for x in flat if isinstance(x, FieldElement)), None)
        if field is None:
            raise ValueError("field must be given when entries are plain integers")
    codes = []
    for x in flat:
        if isinstance(x, FieldElement):
            if x.field != field:
                raise FieldMismatchError(f"{x!r} is not in {field}")
            codes.append(x.code)
        else:
            codes.append(field.from_int(x))
    if _det(field, n, codes) == 0:
        raise ValueError("singular matrix")
    return ProjectiveMatrix(field, n, codes)


def pm_mul(a, b):
    if a.field != b.field:
        raise FieldMismatchError(f"{a.field} vs {b.field}")
    if a.n != b.n:
        raise ValueError("dimension mismatch")
    F, n = a.field, a.n
    x, y = a.entries, b.entries
    if n == 2:
        a0, a1, a2, a3 = x
        b0, b1, b2, b3 = y
        add, mul = F.add, F.mul
        out = (add(mul(a0, b0), mul(a1, b2)), add(mul(a0, b1), mul(a1, b3)),
               add(mul(a2, b0), mul(a3, b2)), add(mul(a2, b1), mul(a3, b3)))
    else:
        out = []
        for i in range(n):
            for j in range(n):
                acc = 0
                for k in range(n):
                    acc = F.add(acc, F.mul(x[i * n + k], y[k * n + j]))
                out.append(acc)
    return ProjectiveMatrix(F, n, out)


def pm_inv(a):
    F, n = a.field, a.n
    if n == 2:
        a0, a1, a2, a3 = a.entries
        return ProjectiveMatrix(F, 2, (a3, F.neg(a1), F.neg(a2), a0))
    # Gauss-Jordan on [A | I]
    rows = [list(a.entries[i * n:(i + 1) * n]) + [1 if i == j else 0 for j in range(n)]
            for i in range(n)]
    for col in range(n):
        pivot = next(r for r in range(col, n) if rows[r][col])
        rows[col], rows[pivot] = rows[pivot], rows[col]
        inv = F.inv(rows[col][col])
        rows[col] = [F.mul(v, inv) for v in rows[col]]
        for r in range(n):
            if r != col and rows[r][col]:
                f = rows[r][col]
                rows[r] = [F.sub(v, F.mul(f, w)) for v, w in zip(rows[r], rows[col])]
    return ProjectiveMatrix(F, n, [v for row in rows for v in row[n:]])


def pgl2_order(q):
    return q * (q * q - 1)


def psl2_order(q):
    return pgl2_order(q) // (2 if q % 2 else 1)


@dataclass
class GroupClosure:
    """Subgroup of PGL_n enumerated by breadth-first search from the identity.

    Attributes:
        elements: elements in discovery order; ``elements[0]`` is the identity.
        generators: the generating list, in the order used for the search.
        index: element -> dense id.
        depth: word length (BFS depth) of each element.
        left_table: ``left_table[i][k]`` is the id of ``generators[k] * elements[i]``.
    """

    elements: list
    generators: list
    index: dict
    depth: list
    left_table: list = dc_field(repr=False)

    def __len__(self):
        return len(self.elements)

    def __contains__(self, g):
        return g in self.index

    def id_of(self, g):
        return self.index[g]

    def to_json(self):
        return {
            "size": len(self.elements),
            "generators": [g.to_json() for g in self.generators],
            "elements": [{"id": i, "depth": d, "matrix": g.to_json()}
                         for i, (g, d) in enumerate(zip(self.elements, self.depth))],
        }


def generate_closure(generators, cap):
    """Enumerate the subgroup generated by ``generators`` (left multiplication BFS).

    Raises:
        ClosureCapExceeded: more than ``cap`` elements would be produced.
        ValueError: empty generator list or mixed fields.
    """
    if not generators:
        raise ValueError("need at least one generator")
    F, n = generators[0].field, generators[0].n
    if any(g.field != F or g.n != n for g in generators):
        raise FieldMismatchError("generators live in different groups")
    if cap < 1:
        raise ValueError("cap must be >= 1")
    e = identity(F, n)
    elements, depth, index = [e], [0], {e: 0}
    left_table = []
    queue = deque([0])
    while queue:
        i = queue.popleft()
        x = elements[i]
        row = []
        for g in generators:
            y = g * x
            j = index.get(y)
            if j is None:
                if len(elements) >= cap:
                    raise ClosureCapExceeded(
                        f"closure exceeded cap={cap}; check the parameters or raise the cap")
                j = len(elements)
                index[y] = j
                elements.append(y)
                depth.append(depth[i] + 1)
                queue.append(j)
            row.append(j)
        left_table.append(row)
    return GroupClosure(elements, list(generators), index, depth, left_table)


def element_order(g, limit=None):
    e = identity(g.field, g.n)
    x, k = g, 1
    while x != e:
        x = x * g
        k += 1
        if limit is not None and k > limit:
            raise RuntimeError("element order exceeds limit")
    return k


def order_statistics(G):
    """Histogram ``{order: count}`` over the elements of a closure."""
    if isinstance(G, GroupClosure):
        elems = G.elements
    else:
        elems = list(G)
    return dict(sorted(Counter(element_order(g) for g in elems).items()))


def inverse_pairing(generators):
    """For each ``k`` the index ``k'`` with ``generators[k'] == generators[k]^-1``.

    Raises:
        ValueError: the set is not closed under inverses.
    """
    pos = {}
    for k, g in enumerate(generators):
        pos.setdefault(g, k)
    pairing = []
    for k, g in enumerate(generators):
        j = pos.get(pm_inv(g))
        if j is None:
            raise ValueError(f"inverse of generator {k} is not in the set")
        pairing.append(j)
    return pairing
