"""Finite fields F_p and F_{p^k} = F_p[t]/(modulus).

Elements are stored as integer *codes*: an element of an extension of degree
``k`` over a base field of order ``r`` with coefficient vector
``(c_0, ..., c_{k-1})`` (lowest degree first) has code
``c_0 + c_1 r + ... + c_{k-1} r^(k-1)``. The coefficient vector is always
fully reduced, so codes are canonical and can be hashed directly. Extensions
may themselves be taken over an extension (a tower), which is how
``F_q[t]/h(t)`` is realized when ``q`` is not prime.

The code-level methods (``add``, ``mul``, ...) are the fast path used by the
rest of the package; :class:`FieldElement` wraps a code for interactive use.
"""

import functools
import itertools

from . import polyarith as pa

# Multiplication switches to exp/log tables at or below this order.
TABLE_LIMIT = 1 << 16


def is_prime(n):
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_power(q):
    """Return ``(p, r)`` with ``q == p**r``, or ``None`` if ``q`` is not a prime power."""
    if q < 2:
        return None
    p = next(d for d in range(2, q + 1) if q % d == 0)
    r = 0
    while q % p == 0:
        q //= p
        r += 1
    return (p, r) if q == 1 else None


def _prime_factors(n):
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


class FieldMismatchError(ValueError):
    """Raised when elements of different fields are combined."""


class FiniteField:
    """Common machinery for prime and extension fields."""

    p: int
    order: int
    var = "t"

    # -- code-level arithmetic shared by both kinds ----------------------

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, e):
        if e < 0:
            a, e = self.inv(a), -e
        result = 1
        while e:
            if e & 1:
                result = self.mul(result, a)
            e >>= 1
            if e:
                a = self.mul(a, a)
        return result

    def from_int(self, n):
        """Image of the integer ``n`` in the prime subfield."""
        return n % self.p

    def elements(self):
        return range(self.order)

    def is_square(self, a):
        if a == 0 or self.p == 2:
            return True
        return self.pow(a, (self.order - 1) // 2) == 1

    def sqrt(self, a):
        """A square root of ``a``; of the two roots, the one with least :meth:`sort_key`."""
        if a == 0:
            return 0
        if self.p == 2:
            # Frobenius is bijective: sqrt(a) = a^(Q/2)
            return self.pow(a, self.order // 2)
        if not self.is_square(a):
            raise ValueError(f"{self.format(a)} is not a square in {self}")
        x = self._tonelli_shanks(a)
        y = self.neg(x)
        return min(x, y, key=self.sort_key)

    def _tonelli_shanks(self, a):
        Q, S = self.order - 1, 0
        while Q % 2 == 0:
            Q //= 2
            S += 1
        z = next(c for c in self.elements() if c and not self.is_square(c))
        M, c = S, self.pow(z, Q)
        t, R = self.pow(a, Q), self.pow(a, (Q + 1) // 2)
        while t != 1:
            i, t2 = 0, t
            while t2 != 1:
                t2 = self.mul(t2, t2)
                i += 1
            b = self.pow(c, 1 << (M - i - 1))
            M, c = i, self.mul(b, b)
            t, R = self.mul(t, c), self.mul(R, b)
        return R

    def multiplicative_order(self, a):
        if a == 0:
            raise ValueError("zero has no multiplicative order")
        n = self.order - 1
        for f in _prime_factors(self.order - 1):
            while n % f == 0 and self.pow(a, n // f) == 1:
                n //= f
        return n

    def primitive_element(self):
        """Least generator of the multiplicative group, in :meth:`sort_key` order."""
        n = self.order - 1
        factors = _prime_factors(n)
        for a in sorted(range(1, self.order), key=self.sort_key):
            if all(self.pow(a, n // f) != 1 for f in factors):
                return a
        raise AssertionError("multiplicative group is not cyclic")

    # -- element wrappers ------------------------------------------------

    def __call__(self, x):
        if isinstance(x, FieldElement):
            if x.field != self:
                raise FieldMismatchError(f"{x!r} does not belong to {self}")
            return x
        if isinstance(x, int):
            return FieldElement(self, self.from_int(x))
        return FieldElement(self, self.from_coeffs(x))

    def element(self, code):
        if not 0 <= code < self.order:
            raise ValueError(f"code {code} out of range for {self}")
        return FieldElement(self, code)

    @property
    def zero(self):
        return FieldElement(self, 0)

    @property
    def one(self):
        return FieldElement(self, 1)

    def __len__(self):
        return self.order

    def __iter__(self):
        return (FieldElement(self, c) for c in self.elements())


class PrimeField(FiniteField):
    """The prime field F_p."""

    def __init__(self, p):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.order = p
        self.degree = 1
        self.base = None

    def __repr__(self):
        return f"GF({self.p})"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))

    @property
    def absolute_degree(self):
        return 1

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return -a % self.p

    def mul(self, a, b):
        return a * b % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, -1, self.p)

    def pow(self, a, e):
        if e < 0:
            return pow(self.inv(a), -e, self.p)
        return pow(a, e, self.p)

    def coeffs(self, a):
        return (a,)

    def from_coeffs(self, seq):
        seq = list(seq)
        if len(seq) > 1 and any(seq[1:]):
            raise ValueError("prime field elements have a single coefficient")
        return int(seq[0]) % self.p if seq else 0

    def sort_key(self, a):
        return a

    def format(self, a):
        return str(a)

    def to_json(self, a):
        return a

    def from_json(self, obj):
        return int(obj) % self.p


class ExtensionField(FiniteField):
    """``base[var]/(modulus)`` for a monic irreducible modulus over ``base``.

    Args:
        base: coefficient field (prime or extension).
        modulus: coefficient codes over ``base``, lowest degree first.
        var: name of the adjoined root, used only for printing.
        check: verify that ``modulus`` is monic and irreducible.
    """

    def __init__(self, base, modulus, var="t", check=True):
        modulus = pa.trim(modulus)
        if len(modulus) < 2:
            raise ValueError("modulus must have degree >= 1")
        if check:
            if modulus[-1] != 1:
                raise ValueError("modulus must be monic")
            if not pa.is_irreducible(base, modulus):
                raise ValueError(f"modulus {modulus} is reducible over {base}")
        self.base = base
        self.modulus = tuple(modulus)
        self.degree = len(modulus) - 1
        self.p = base.p
        self.order = base.order ** self.degree
        self.var = var
        self._r = base.order
        self._exp = None
        self._log = None

    def __repr__(self):
        return f"GF({self.order}; {self.base!r}[{self.var}]/{list(self.modulus)})"

    def __eq__(self, other):
        return (isinstance(other, ExtensionField) and other.base == self.base
                and other.modulus == self.modulus)

    def __hash__(self):
        return hash(("GFext", self.base, self.modulus))

    @property
    def absolute_degree(self):
        return self.degree * self.base.absolute_degree

    def coeffs(self, a):
        out = []
        for _ in range(self.degree):
            a, c = divmod(a, self._r)
            out.append(c)
        return tuple(out)

    def from_coeffs(self, seq):
        seq = [self.base.from_json(c) if not isinstance(c, int) else c for c in seq]
        if len(seq) > self.degree:
            seq = pa.mod(self.base, pa.trim(seq), list(self.modulus))
        code = 0
        for c in reversed(seq):
            if not 0 <= c < self._r:
                raise ValueError(f"coefficient {c} out of range for {self.base}")
            code = code * self._r + c
        return code

    def from_int(self, n):
        return self.base.from_int(n)

    def add(self, a, b):
        B, r = self.base, self._r
        out, scale = 0, 1
        while a or b:
            a, x = divmod(a, r)
            b, y = divmod(b, r)
            out += B.add(x, y) * scale
            scale *= r
        return out

    def sub(self, a, b):
        B, r = self.base, self._r
        out, scale = 0, 1
        while a or b:
            a, x = divmod(a, r)
            b, y = divmod(b, r)
            out += B.sub(x, y) * scale
            scale *= r
        return out

    def neg(self, a):
        return self.sub(0, a)

    def _poly_mul(self, a, b):
        prod = pa.mul(self.base, pa.trim(self.coeffs(a)), pa.trim(self.coeffs(b)))
        return self.from_coeffs(pa.mod(self.base, prod, list(self.modulus)))

    def _tables(self):
        if self._exp is None:
            g = self._find_generator()
            n = self.order - 1
            exp = [0] * n
            log = [0] * self.order
            x = 1
            for i in range(n):
                exp[i] = x
                log[x] = i
                x = self._poly_mul(x, g)
            self._exp, self._log = exp, log
        return self._exp, self._log

    def _find_generator(self):
        n = self.order - 1
        factors = _prime_factors(n)
        for g in range(1, self.order):
            if all(self._slow_pow(g, n // f) != 1 for f in factors):
                return g
        raise AssertionError("no generator found")

    def _slow_pow(self, a, e):
        result = 1
        while e:
            if e & 1:
                result = self._poly_mul(result, a)
            e >>= 1
            if e:
                a = self._poly_mul(a, a)
        return result

    def mul(self, a, b):
        if a == 0 or b == 0:
            return 0
        if self.order <= TABLE_LIMIT:
            exp, log = self._tables()
            return exp[(log[a] + log[b]) % (self.order - 1)]
        return self._poly_mul(a, b)

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        if self.order <= TABLE_LIMIT:
            exp, log = self._tables()
            return exp[-log[a] % (self.order - 1)]
        return self._slow_pow(a, self.order - 2)

    def pow(self, a, e):
        if self.order <= TABLE_LIMIT:
            if a == 0:
                if e < 0:
                    raise ZeroDivisionError("inverse of zero")
                return 1 if e == 0 else 0
            exp, log = self._tables()
            return exp[(log[a] * e) % (self.order - 1)]
        return super().pow(a, e)

    def sort_key(self, a):
        return tuple(self.base.sort_key(c) for c in self.coeffs(a))

    def format(self, a):
        terms = []
        for i, c in enumerate(self.coeffs(a)):
            s = self.base.format(c)
            if isinstance(self.base, ExtensionField) and self.base.degree > 1:
                s = f"({s})"
            if i == 0:
                terms.append(s)
            elif i == 1:
                terms.append(f"{s}{self.var}")
            else:
                terms.append(f"{s}{self.var}^{i}")
        return "+".join(terms)

    def to_json(self, a):
        return [self.base.to_json(c) for c in self.coeffs(a)]

    def from_json(self, obj):
        if isinstance(obj, int):
            return self.from_int(obj)
        return self.from_coeffs([self.base.from_json(c) for c in obj])

    def generator(self):
        """The adjoined root ``var`` (code of the polynomial ``var``)."""
        if self.degree == 1:
            return self.from_coeffs([self.base.neg(self.modulus[0])])
        return self._r


@functools.total_ordering
class FieldElement:
    """An element of a finite field with operator overloading."""

    __slots__ = ("field", "code")

    def __init__(self, field, code):
        self.field = field
        self.code = code

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldMismatchError(f"{self.field} vs {other.field}")
            return other.code
        if isinstance(other, int):
            return self.field.from_int(other)
        return NotImplemented

    def _wrap(self, code):
        return FieldElement(self.field, code)

    def __add__(self, other):
        b = self._coerce(other)
        return NotImplemented if b is NotImplemented else self._wrap(self.field.add(self.code, b))

    __radd__ = __add__

    def __sub__(self, other):
        b = self._coerce(other)
        return NotImplemented if b is NotImplemented else self._wrap(self.field.sub(self.code, b))

    def __rsub__(self, other):
        b = self._coerce(other)
        return NotImplemented if b is NotImplemented else self._wrap(self.field.sub(b, self.code))

    def __mul__(self, other):
        b = self._coerce(other)
        return NotImplemented if b is NotImplemented else self._wrap(self.field.mul(self.code, b))

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = self._coerce(other)
        return NotImplemented if b is NotImplemented else self._wrap(self.field.div(self.code, b))

    def __rtruediv__(self, other):
        b = self._coerce(other)
        return NotImplemented if b is NotImplemented else self._wrap(self.field.div(b, self.code))

    def __neg__(self):
        return self._wrap(self.field.neg(self.code))

    def __pow__(self, e):
        return self._wrap(self.field.pow(self.code, e))

    def inverse(self):
        return self._wrap(self.field.inv(self.code))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.code == other.code
        if isinstance(other, int):
            return self.code == self.field.from_int(other)
        return NotImplemented

    def __lt__(self, other):
        if not isinstance(other, FieldElement) or other.field != self.field:
            return NotImplemented
        return self.field.sort_key(self.code) < self.field.sort_key(other.code)

    def __hash__(self):
        return hash((self.field, self.code))

    def __bool__(self):
        return self.code != 0

    def __int__(self):
        if self.field.base is not None:
            raise TypeError("only prime field elements convert to int")
        return self.code

    def is_square(self):
        return self.field.is_square(self.code)

    def sqrt(self):
        return self._wrap(self.field.sqrt(self.code))

    def coeffs(self):
        return self.field.coeffs(self.code)

    def to_json(self):
        return self.field.to_json(self.code)

    def __repr__(self):
        return f"FieldElement({self.field.format(self.code)} in {self.field!r})"

    def __str__(self):
        return self.field.format(self.code)


def monic_polynomials(F, degree):
    """All monic degree-``degree`` coefficient lists over ``F`` in lexicographic order.

    The order compares the constant term first, then the linear term, and so
    on; field elements compare by ``F.sort_key``.
    """
    ordered = sorted(F.elements(), key=F.sort_key)
    for head in itertools.product(ordered, repeat=degree):
        yield list(head) + [1]


def least_irreducible(F, degree):
    for f in monic_polynomials(F, degree):
        if pa.is_irreducible(F, f):
            return f
    raise AssertionError(f"no irreducible polynomial of degree {degree} over {F}")


def field_make(p, k=1, modulus=None, var="t"):
    """Build F_{p^k}.

    Args:
        p: the characteristic (must be prime).
        k: degree over F_p.
        modulus: optional monic irreducible coefficient list of degree ``k``
            over F_p. When omitted and ``k > 1`` the lexicographically least
            monic irreducible is used.
        var: printing name of the adjoined root.

    Raises:
        ValueError: ``p`` not prime, or a bad modulus.
    """
    Fp = PrimeField(p)
    if modulus is None:
        if k == 1:
            return Fp
        modulus = least_irreducible(Fp, k)
    else:
        modulus = pa.trim([int(c) % p for c in modulus])
        if len(modulus) - 1 != k:
            raise ValueError(f"modulus has degree {len(modulus) - 1}, expected {k}")
    return ExtensionField(Fp, modulus, var=var)


def extension(base, modulus, var="t"):
    """Extension of an arbitrary finite field by a monic irreducible ``modulus``."""
    if hasattr(modulus, "codes"):
        modulus = modulus.codes
    codes = [c.code if isinstance(c, FieldElement) else c for c in modulus]
    return ExtensionField(base, codes, var=var)


class FieldEmbedding:
    """Ring homomorphism ``source -> target`` determined by where the generators go.

    For a prime field source the map is the constant embedding. For an
    extension ``base[x]/(mu)`` the map needs an embedding of ``base`` and an
    image ``y`` of ``x`` with ``mu(y) == 0`` in ``target``; when ``image`` is
    omitted the root of ``mu`` with least sort key is chosen.
    """

    def __init__(self, source, target, image=None, base_embedding=None):
        if source.p != target.p:
            raise ValueError("fields of different characteristic")
        if target.absolute_degree % source.absolute_degree:
            raise ValueError(f"{source} does not embed in {target}")
        self.source = source
        self.target = target
        if isinstance(source, PrimeField):
            self.base_embedding = None
            self.image = None
            return
        if source == target and image is None and base_embedding is None:
            self._identity = True
            self.base_embedding = self.image = None
            return
        self.base_embedding = base_embedding or FieldEmbedding(source.base, target)
        mu = [self.base_embedding.map_code(c) for c in source.modulus]
        if image is None:
            roots = [y for y in target.elements() if pa.evaluate(target, mu, y) == 0]
            if not roots:
                raise ValueError(f"modulus of {source} has no root in {target}")
            image = min(roots, key=target.sort_key)
        elif isinstance(image, FieldElement):
            image = image.code
        if pa.evaluate(target, mu, image) != 0:
            raise ValueError("image is not a root of the source modulus")
        self.image = image

    _identity = False

    def map_code(self, a):
        if self._identity:
            return a
        if isinstance(self.source, PrimeField):
            return self.target.from_int(a)
        coeffs = [self.base_embedding.map_code(c) for c in self.source.coeffs(a)]
        return pa.evaluate(self.target, pa.trim(coeffs), self.image)

    def __call__(self, a):
        if isinstance(a, FieldElement):
            if a.field != self.source:
                raise FieldMismatchError(f"{a!r} is not in {self.source}")
            return FieldElement(self.target, self.map_code(a.code))
        return self.map_code(a)


def embed(a, target, embedding=None):
    """Map the element ``a`` into ``target`` along ``embedding`` (default: canonical choice)."""
    if embedding is None:
        embedding = FieldEmbedding(a.field, target)
    elif embedding.target != target:
        raise ValueError("embedding has a different target field")
    return embedding(a)
