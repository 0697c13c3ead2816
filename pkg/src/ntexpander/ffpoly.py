"""Polynomials over finite fields and the function-field arithmetic around them.

Besides the Euclidean-domain basics this module provides the quadratic
residue symbol modulo an irreducible polynomial, the reciprocity identity
relating ``(f/g)`` and ``(g/f)``, the Möbius change of variables used to pass
between the ``u`` and ``t`` coordinates, and the search for monic irreducible
``htilde(s)`` whose pull-back ``htilde(t^2)`` stays irreducible.
"""

import enum
import re

from . import polyarith as pa
from .ff import FieldElement, FieldMismatchError, field_make, monic_polynomials, prime_power


class Polynomial:
    """Dense polynomial over a finite field, coefficients lowest degree first.

    Attributes:
        field: the coefficient field.
        codes: tuple of coefficient codes without trailing zeros.
        var: variable name used for printing only.
    """

    __slots__ = ("field", "codes", "var")

    def __init__(self, field, coeffs=(), var="x"):
        codes = []
        for c in coeffs:
            if isinstance(c, FieldElement):
                if c.field != field:
                    raise FieldMismatchError(f"coefficient {c!r} not in {field}")
                codes.append(c.code)
            elif isinstance(c, int):
                codes.append(field.from_int(c))
            else:
                codes.append(field.from_json(c))
        self.field = field
        self.codes = tuple(pa.trim(codes))
        self.var = var

    @classmethod
    def _raw(cls, field, codes, var="x"):
        obj = object.__new__(cls)
        obj.field = field
        obj.codes = tuple(pa.trim(codes))
        obj.var = var
        return obj

    @classmethod
    def monomial(cls, field, degree, coeff=1, var="x"):
        return cls(field, [0] * degree + [coeff], var=var)

    @classmethod
    def parse(cls, field, text, var=None):
        """Parse ``"c0+c1*x+c2*x^2"`` (any variable name, terms in any order)."""
        text = text.replace(" ", "").replace("-", "+-")
        coeffs = {}
        for term in filter(None, text.split("+")):
            m = re.fullmatch(r"(-?\d*)\*?([A-Za-z]\w*)?(?:\^(\d+))?", term)
            if not m or (not m.group(1) and not m.group(2)) or m.group(1) == "-" and not m.group(2):
                raise ValueError(f"cannot parse term {term!r}")
            c, name, e = m.groups()
            c = -1 if c == "-" else (1 if c == "" else int(c))
            if name is None:
                if e is not None:
                    raise ValueError(f"cannot parse term {term!r}")
                e = 0
            else:
                var = var or name
                e = 1 if e is None else int(e)
            coeffs[e] = coeffs.get(e, 0) + c
        n = max(coeffs, default=-1) + 1
        return cls(field, [coeffs.get(i, 0) for i in range(n)], var=var or "x")

    @property
    def degree(self):
        return len(self.codes) - 1

    @property
    def lead(self):
        return FieldElement(self.field, self.codes[-1]) if self.codes else self.field.zero

    def coeffs(self):
        return [FieldElement(self.field, c) for c in self.codes]

    def is_monic(self):
        return bool(self.codes) and self.codes[-1] == 1

    def monic(self):
        return self._raw(self.field, pa.monic(self.field, self.codes), self.var)

    def __bool__(self):
        return bool(self.codes)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.field == other.field and self.codes == other.codes
        if isinstance(other, int):
            return self.codes == tuple(pa.trim([self.field.from_int(other)]))
        return NotImplemented

    def __hash__(self):
        return hash((self.field, self.codes))

    def _other(self, other):
        if isinstance(other, Polynomial):
            if other.field != self.field:
                raise FieldMismatchError(f"{self.field} vs {other.field}")
            return list(other.codes)
        if isinstance(other, (int, FieldElement)):
            return list(Polynomial(self.field, [other]).codes)
        return None

    def _wrap(self, codes):
        return self._raw(self.field, codes, self.var)

    def __add__(self, other):
        b = self._other(other)
        return NotImplemented if b is None else self._wrap(pa.add(self.field, list(self.codes), b))

    __radd__ = __add__

    def __sub__(self, other):
        b = self._other(other)
        return NotImplemented if b is None else self._wrap(pa.sub(self.field, list(self.codes), b))

    def __rsub__(self, other):
        b = self._other(other)
        return NotImplemented if b is None else self._wrap(pa.sub(self.field, b, list(self.codes)))

    def __neg__(self):
        return self._wrap(pa.neg(self.field, self.codes))

    def __mul__(self, other):
        b = self._other(other)
        return NotImplemented if b is None else self._wrap(pa.mul(self.field, list(self.codes), b))

    __rmul__ = __mul__

    def __divmod__(self, other):
        b = self._other(other)
        if b is None:
            return NotImplemented
        q, r = pa.divmod_(self.field, list(self.codes), b)
        return self._wrap(q), self._wrap(r)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __pow__(self, e):
        result = self._wrap([1])
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __call__(self, x):
        """Evaluate at a field element, an int, or substitute a polynomial."""
        if isinstance(x, Polynomial):
            return self.compose(x)
        code = x.code if isinstance(x, FieldElement) else self.field.from_int(x)
        return FieldElement(self.field, pa.evaluate(self.field, self.codes, code))

    def compose(self, other):
        acc = self._raw(self.field, [], other.var)
        for c in reversed(self.codes):
            acc = acc * other + self._raw(self.field, [c])
        return acc

    def gcd(self, other):
        return self._wrap(pa.gcd(self.field, list(self.codes), self._other(other)))

    def mod_pow(self, e, modulus):
        return self._wrap(pa.powmod(self.field, list(self.codes), e, list(modulus.codes)))

    def is_irreducible(self):
        return is_irreducible(self)

    def sort_key(self):
        """Degree first, then lexicographic from the constant term."""
        return (self.degree, tuple(self.field.sort_key(c) for c in self.codes))

    def to_json(self):
        return [self.field.to_json(c) for c in self.codes]

    @classmethod
    def from_json(cls, field, obj, var="x"):
        return cls(field, [field.from_json(c) for c in obj], var=var)

    def __str__(self):
        if not self.codes:
            return "0"
        terms = []
        for i, c in enumerate(self.codes):
            s = self.field.format(c)
            if self.field.base is not None:
                s = f"({s})"
            if i == 0:
                terms.append(s)
            elif i == 1:
                terms.append(f"{s}*{self.var}")
            else:
                terms.append(f"{s}*{self.var}^{i}")
        return "+".join(terms)

    def __repr__(self):
        return f"Polynomial({self}, over {self.field!r})"


def _same_field(f, g):
    if f.field != g.field:
        raise FieldMismatchError(f"{f.field} vs {g.field}")


def poly_gcd(f, g):
    _same_field(f, g)
    return f.gcd(g)


def poly_divmod(f, g):
    _same_field(f, g)
    return divmod(f, g)


def mod_pow(f, e, g):
    _same_field(f, g)
    return f.mod_pow(e, g)


def is_irreducible(f):
    """True iff ``f`` (degree >= 1) is irreducible over its coefficient field."""
    if f.degree < 1:
        raise ValueError("constant polynomials are neither irreducible nor reducible")
    return pa.is_irreducible(f.field, list(f.codes))


def monic_irreducibles(field, degree, var="x"):
    """Monic irreducible polynomials of ``degree`` in lexicographic candidate order."""
    for codes in monic_polynomials(field, degree):
        if pa.is_irreducible(field, codes):
            yield Polynomial._raw(field, codes, var)


def legendre(f, g):
    """Quadratic residue symbol ``(f/g)`` for ``g`` monic irreducible, as -1, 0 or +1.

    Computed as ``f^((Q^deg g - 1)/2) mod g`` with ``Q`` the field order.
    """
    _same_field(f, g)
    F = f.field
    if F.p == 2:
        raise ValueError("the residue symbol needs odd characteristic")
    if g.degree < 1 or not g.is_monic() or not is_irreducible(g):
        raise ValueError(f"{g} is not monic irreducible")
    e = (F.order ** g.degree - 1) // 2
    r = f.mod_pow(e, g)
    if not r.codes:
        return 0
    if r.codes == (1,):
        return 1
    if r.codes == (F.neg(1),):
        return -1
    raise AssertionError(f"residue power {r} is not in {{0, 1, -1}} modulo irreducible {g}")


def reciprocity_check(f, g):
    """Check ``(f/g) == (-1)^((Q-1)/2 deg f deg g) (g/f)`` for distinct monic irreducibles."""
    _same_field(f, g)
    if f == g:
        raise ValueError("reciprocity needs distinct polynomials")
    sign = -1 if ((f.field.order - 1) // 2 * f.degree * g.degree) % 2 else 1
    return legendre(f, g) == sign * legendre(g, f)


def mobius_substitute(h, a, b, c, d, var=None):
    """Monic associate of ``(c u + d)^deg h * h((a u + b)/(c u + d))``.

    Args:
        h: nonzero polynomial.
        a, b, c, d: field elements (or ints) with ``ad - bc != 0``.
        var: variable name of the result (default: ``h.var``).

    Raises:
        ValueError: singular substitution or zero ``h``.
    """
    F = h.field
    a, b, c, d = (F(x).code for x in (a, b, c, d))
    if F.sub(F.mul(a, d), F.mul(b, c)) == 0:
        raise ValueError("singular Möbius substitution")
    if not h:
        raise ValueError("cannot substitute into the zero polynomial")
    n = h.degree
    num = [b, a]
    den = [d, c]
    total = []
    num_pow = [1]
    den_pows = [[1]]
    for _ in range(n):
        den_pows.append(pa.mul(F, den_pows[-1], den))
    for i, coeff in enumerate(h.codes):
        if coeff:
            term = pa.scale(F, pa.mul(F, num_pow, den_pows[n - i]), coeff)
            total = pa.add(F, total, term)
        num_pow = pa.mul(F, num_pow, num)
    return Polynomial._raw(F, pa.monic(F, total), var or h.var)


def inert_test(htilde):
    """True iff ``htilde(t^2)`` stays irreducible, i.e. ``(s / htilde) == -1``."""
    if not htilde.is_monic() or not is_irreducible(htilde):
        raise ValueError(f"{htilde} is not monic irreducible")
    s = Polynomial(htilde.field, [0, 1], var=htilde.var)
    return legendre(s, htilde) == -1


def pullback_square(htilde, var="t"):
    """``htilde(t^2)`` as a polynomial in ``t``."""
    codes = [0] * (2 * len(htilde.codes) - 1) if htilde.codes else []
    for i, c in enumerate(htilde.codes):
        codes[2 * i] = c
    return Polynomial._raw(htilde.field, codes, var)


class GraphType(enum.Enum):
    PGL_BIPARTITE = "pgl"
    PSL_NONBIPARTITE = "psl"


def square_class(field, code):
    """Legendre symbol of a field element: +1 square, -1 non-square, 0 zero."""
    if code == 0:
        return 0
    return 1 if field.is_square(code) else -1


def classify_graph_type(htilde):
    """Decide PGL (bipartite) versus PSL from the square classes of ``htilde(0)``, ``htilde(1)``."""
    F = htilde.field
    v0 = square_class(F, htilde(0).code)
    v1 = square_class(F, htilde(1).code)
    if v0 == 0 or v1 == 0:
        raise ValueError(f"{htilde} vanishes at 0 or 1; parameter rejected")
    return GraphType.PGL_BIPARTITE if v0 * v1 == -1 else GraphType.PSL_NONBIPARTITE


def base_field(q):
    """F_q for an odd-or-even prime power ``q`` (lexicographically least modulus)."""
    pp = prime_power(q)
    if pp is None:
        raise ValueError(f"{q} is not a prime power")
    p, r = pp
    return field_make(p, r, var="a")


def search_parameters(q, m, want_type, var="s"):
    """All monic irreducible inert ``htilde`` of degree ``m`` over F_q of the wanted type.

    ``want_type`` is a :class:`GraphType` or its value string (``"pgl"``/``"psl"``).
    Candidates are scanned in lexicographic order; an empty list is a valid answer.
    """
    want_type = GraphType(want_type)
    F = q if not isinstance(q, int) else base_field(q)
    if F.p == 2:
        raise ValueError("q must be odd")
    if m < 1:
        raise ValueError("m must be >= 1")
    found = []
    for h in monic_irreducibles(F, m, var=var):
        if h(0).code == 0 or h(1).code == 0:
            continue
        if inert_test(h) and classify_graph_type(h) is want_type:
            found.append(h)
    return found
