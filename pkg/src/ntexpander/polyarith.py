"""Low-level polynomial arithmetic on coefficient lists.

A polynomial is a list of field-element codes, lowest degree first, with no
trailing zeros (the zero polynomial is ``[]``). Every function takes the
coefficient field ``F`` explicitly; ``F`` only needs the code-level methods
``add``, ``sub``, ``neg``, ``mul`` and ``inv``.

These helpers back both the extension-field multiplication in
:mod:`ntexpander.ff` and the user-facing :class:`ntexpander.ffpoly.Polynomial`.
"""


def trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def add(F, a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] = F.add(out[i], c)
    return trim(out)


def sub(F, a, b):
    out = list(a) + [0] * max(0, len(b) - len(a))
    for i, c in enumerate(b):
        out[i] = F.sub(out[i], c)
    return trim(out)


def neg(F, a):
    return [F.neg(c) for c in a]


def scale(F, a, c):
    if c == 0:
        return []
    return trim([F.mul(x, c) for x in a])


def mul(F, a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            if y:
                out[i + j] = F.add(out[i + j], F.mul(x, y))
    return trim(out)


def divmod_(F, a, b):
    """Euclidean division; returns ``(quotient, remainder)``."""
    if not b:
        raise ZeroDivisionError("division by the zero polynomial")
    r = list(a)
    db = len(b) - 1
    if len(r) - 1 < db:
        return [], trim(r)
    lead_inv = F.inv(b[-1])
    q = [0] * (len(r) - db)
    for k in range(len(r) - 1, db - 1, -1):
        c = r[k]
        if c == 0:
            continue
        c = F.mul(c, lead_inv)
        q[k - db] = c
        for j, y in enumerate(b):
            if y:
                r[k - db + j] = F.sub(r[k - db + j], F.mul(c, y))
    return trim(q), trim(r[:db])


def mod(F, a, b):
    return divmod_(F, a, b)[1]


def monic(F, a):
    if not a:
        return []
    return scale(F, a, F.inv(a[-1]))


def gcd(F, a, b):
    """Monic gcd (``[]`` only when both inputs are zero)."""
    a, b = trim(a), trim(b)
    while b:
        a, b = b, mod(F, a, b)
    return monic(F, a)


def mulmod(F, a, b, m):
    return mod(F, mul(F, a, b), m)


def powmod(F, a, e, m):
    """``a**e mod m`` by square-and-multiply."""
    if e < 0:
        raise ValueError("negative exponent")
    result = mod(F, [1], m)
    base = mod(F, a, m)
    while e:
        if e & 1:
            result = mulmod(F, result, base, m)
        e >>= 1
        if e:
            base = mulmod(F, base, base, m)
    return result


def evaluate(F, a, x):
    acc = 0
    for c in reversed(a):
        acc = F.add(F.mul(acc, x), c)
    return acc


def is_irreducible(F, f):
    """Ben-Or test: ``gcd(x^(Q^i) - x mod f, f) == 1`` for ``i <= deg f / 2``."""
    f = trim(f)
    n = len(f) - 1
    if n < 1:
        raise ValueError("irreducibility is undefined for constants")
    if n == 1:
        return True
    x = [0, 1]
    xp = mod(F, x, f)
    for _ in range(n // 2):
        xp = powmod(F, xp, F.order, f)
        g = gcd(F, sub(F, xp, x), f)
        if len(g) != 1:
            return False
    return True
