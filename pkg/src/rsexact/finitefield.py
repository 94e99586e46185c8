"""Small finite fields F_{p^d} with explicit, hashable elements.

Hand-rolled rather than wrapped from a CAS because the group layers need
things CAS field objects make awkward: deterministic element enumeration,
hashable elements usable as dict keys, discrete logarithms against a fixed
generator, and canonical embeddings F_{p^a} -> F_{p^b} with inverse lookup
for traces and norms.  Fields here are tiny (at most a few thousand
elements), so tables are cheap.

Also defines the two character types the construction needs: multiplicative
characters x -> zeta_{p^d-1}^{t * dlog(x)} and additive characters
x -> zeta_p^{Tr(a x)}; both hand back roots of unity through a scalar
context so the same code drives cyclotomic and residue-field evaluation.
"""

from __future__ import annotations

import itertools

from .cyclo import CycScalars

_DEFAULT_SCAL = CycScalars()


# -- polynomial helpers (tuples low-to-high, coefficients in Z/p) ---------


def _trim(t):
    i = len(t)
    while i and t[i - 1] == 0:
        i -= 1
    return tuple(t[:i])


def _padd(a, b, p):
    n = max(len(a), len(b))
    if not n:
        return ()
    return _trim(
        tuple(
            ((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % p
            for i in range(n)
        )
    )


def _pmul(a, b, p):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def _pdivmod(a, b, p):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(a)
    db = len(b) - 1
    inv_lead = pow(b[-1], -1, p)
    quo = [0] * max(0, len(a) - db)
    while len(_trim(rem)) - 1 >= db and any(rem):
        rem = list(_trim(rem))
        da = len(rem) - 1
        c = rem[-1] * inv_lead % p
        quo[da - db] = c
        for j, y in enumerate(b):
            rem[da - db + j] = (rem[da - db + j] - c * y) % p
    return _trim(quo), _trim(rem)


def _pmod(a, m, p):
    return _pdivmod(a, m, p)[1]


def _pgcd(a, b, p):
    while b:
        a, b = b, _pmod(a, b, p)
    if a:
        inv = pow(a[-1], -1, p)
        a = tuple(c * inv % p for c in a)
    return a


def _frob_power(poly, k, modpoly, p):
    """poly**(p**k) modulo modpoly."""
    out = poly
    for _ in range(k):
        acc = ()
        base = out
        e = p
        while e:
            if e & 1:
                acc = _pmul(acc, base, p) if acc else base
            e >>= 1
            if e:
                base = _pmod(_pmul(base, base, p), modpoly, p)
        out = _pmod(acc, modpoly, p)
    return out


def _prime_divisors(n):
    out = []
    m = n
    d = 2
    while d * d <= m:
        if m % d == 0:
            out.append(d)
            while m % d == 0:
                m //= d
        d += 1
    if m > 1:
        out.append(m)
    return out


def _is_irreducible(f, p):
    d = len(f) - 1
    if d < 1:
        return False
    x = (0, 1)
    # x^(p^d) == x mod f, and x^(p^(d/r)) - x coprime to f for prime r | d
    if _pmod(_padd(_frob_power(x, d, f, p), tuple(-c % p for c in x), p), f, p):
        return False
    for r in _prime_divisors(d):
        h = _padd(_frob_power(x, d // r, f, p), tuple(-c % p for c in x), p)
        if len(_pgcd(h, f, p)) > 1:
            return False
    return True


def _check_prime(p):
    if p < 2 or any(p % d == 0 for d in range(2, int(p**0.5) + 1)):
        raise ValueError(f"{p} is not prime")


class GF:
    """The field with p**degree elements, as F_p[w]/(poly)."""

    def __init__(self, p, degree, poly=None):
        _check_prime(p)
        if degree < 1:
            raise ValueError("degree must be >= 1")
        self.p = p
        self.degree = degree
        self.order = p**degree
        if poly is None:
            poly = self._find_poly(p, degree)
        poly = tuple(c % p for c in poly)
        if len(poly) != degree + 1 or poly[-1] != 1 or not _is_irreducible(poly, p):
            raise ValueError("defining polynomial must be monic irreducible of the right degree")
        self.poly = poly
        self._dlog = None
        self._powers = None
        self._sub_data = {}

    @staticmethod
    def _find_poly(p, degree):
        for tail in itertools.product(range(p), repeat=degree):
            f = tail + (1,)
            if _is_irreducible(f, p):
                return f
        raise AssertionError("no irreducible polynomial found")

    def _key(self):
        return (self.p, self.degree, self.poly)

    def __eq__(self, other):
        return isinstance(other, GF) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"GF({self.p}^{self.degree})"

    def element(self, coeffs):
        c = tuple(coeffs)[: self.degree]
        c = tuple(v % self.p for v in c) + (0,) * (self.degree - len(c))
        return FFElement(self, c)

    def constant(self, n):
        return self.element((n,))

    def zero(self):
        return self.constant(0)

    def one(self):
        return self.constant(1)

    def gen(self):
        """The class of w (only interesting for degree > 1)."""
        return self.element((0, 1))

    def __iter__(self):
        for c in itertools.product(range(self.p), repeat=self.degree):
            yield FFElement(self, c)

    def units(self):
        return (x for x in self if x)

    def generator(self):
        """First unit in enumeration order generating the whole unit group."""
        self._ensure_dlog()
        return self._powers[1] if self.order > 2 else self.one()

    def _ensure_dlog(self):
        if self._dlog is not None:
            return
        n = self.order - 1
        primes = _prime_divisors(n)
        g = None
        for x in self.units():
            if all(x ** (n // r) != self.one() for r in primes) or n == 1:
                g = x
                break
        powers = [self.one()]
        for _ in range(n - 1):
            powers.append(powers[-1] * g)
        self._powers = powers
        self._dlog = {x: i for i, x in enumerate(powers)}

    def dlog(self, x):
        if not x:
            raise ZeroDivisionError("dlog of zero")
        self._ensure_dlog()
        return self._dlog[x]

    def _subfield_data(self, sub: "GF"):
        """(embedding root, image -> subfield element lookup)."""
        key = sub._key()
        data = self._sub_data.get(key)
        if data is not None:
            return data
        if sub.p != self.p or self.degree % sub.degree:
            raise ValueError(f"{sub!r} does not embed into {self!r}")
        root = None
        for x in self:
            acc = self.zero()
            xp = self.one()
            for c in sub.poly:
                if c:
                    acc = acc + self.constant(c) * xp
                xp = xp * x
            if not acc:
                root = x
                break
        images = {}
        for s in sub:
            acc = self.zero()
            rp = self.one()
            for c in s.c:
                if c:
                    acc = acc + self.constant(c) * rp
                rp = rp * root
            images[acc] = s
        self._sub_data[key] = (root, images)
        return self._sub_data[key]


class FFElement:
    """An element of a GF field; immutable and hashable."""

    __slots__ = ("field", "c")

    def __init__(self, field, c):
        self.field = field
        self.c = c

    def _coerce(self, other):
        if isinstance(other, FFElement):
            if other.field._key() != self.field._key():
                raise ValueError("elements of different fields")
            return other
        if isinstance(other, int):
            return self.field.constant(other)
        return None

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self.c == other.c

    def __hash__(self):
        return hash((self.field.p, self.field.poly, self.c))

    def __bool__(self):
        return any(self.c)

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        p = self.field.p
        return FFElement(self.field, tuple((a + b) % p for a, b in zip(self.c, other.c)))

    __radd__ = __add__

    def __neg__(self):
        p = self.field.p
        return FFElement(self.field, tuple(-a % p for a in self.c))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        f = self.field
        if f.degree == 1:
            return FFElement(f, (self.c[0] * other.c[0] % f.p,))
        prod = _pmod(_pmul(_trim(self.c), _trim(other.c), f.p), f.poly, f.p)
        return f.element(prod)

    __rmul__ = __mul__

    def inverse(self):
        if not self:
            raise ZeroDivisionError("inverse of zero field element")
        f = self.field
        if f.degree == 1:
            return FFElement(f, (pow(self.c[0], -1, f.p),))
        # extended Euclid on (self, poly)
        r0, r1 = _trim(self.c), f.poly
        s0, s1 = (1,), ()
        while r1:
            q, r = _pdivmod(r0, r1, f.p)
            r0, r1 = r1, r
            s0, s1 = s1, _padd(s0, tuple(-v % f.p for v in _pmul(q, s1, f.p)), f.p)
        inv_lead = pow(r0[-1], -1, f.p)
        s0 = tuple(v * inv_lead % f.p for v in s0)
        return f.element(_pmod(s0, f.poly, f.p))

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        out = self.field.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def __str__(self):
        if not self:
            return "0"
        parts = []
        for i in range(self.field.degree - 1, -1, -1):
            a = self.c[i]
            if not a:
                continue
            if i == 0:
                parts.append(str(a))
            else:
                head = "" if a == 1 else str(a)
                parts.append(f"{head}w" if i == 1 else f"{head}w^{i}")
        return "+".join(parts)

    def __repr__(self):
        return f"<{self.field!r}: {self}>"


_GF_CACHE: dict = {}


def gf(p, degree=1, poly=None):
    """Cached field constructor; same arguments give the identical object."""
    key = (p, degree, None if poly is None else tuple(poly))
    try:
        return _GF_CACHE[key]
    except KeyError:
        _GF_CACHE[key] = GF(p, degree, poly)
        return _GF_CACHE[key]


def embed_element(x: FFElement, target: GF) -> FFElement:
    """Image of x under the canonical embedding of its field into target."""
    if x.field._key() == target._key():
        return FFElement(target, x.c)
    root, _ = target._subfield_data(x.field)
    acc = target.zero()
    rp = target.one()
    for c in x.c:
        if c:
            acc = acc + target.constant(c) * rp
        rp = rp * root
    return acc


def rel_trace(x: FFElement, sub: GF) -> FFElement:
    """Trace of x down to the subfield, returned as a subfield element."""
    big = x.field
    _, images = big._subfield_data(sub)
    rel = big.degree // sub.degree
    q = sub.order
    acc = big.zero()
    y = x
    for _ in range(rel):
        acc = acc + y
        y = y**q
    return images[acc]


def rel_norm(x: FFElement, sub: GF) -> FFElement:
    big = x.field
    _, images = big._subfield_data(sub)
    rel = big.degree // sub.degree
    q = sub.order
    acc = big.one()
    y = x
    for _ in range(rel):
        acc = acc * y
        y = y**q
    return images[acc]


def abs_trace(x: FFElement) -> int:
    """Absolute trace down to the prime field, as an integer mod p."""
    p = x.field.p
    acc = x.field.zero()
    y = x
    for _ in range(x.field.degree):
        acc = acc + y
        y = y**p
    assert not any(acc.c[1:])
    return acc.c[0]


class MultChar:
    """x -> zeta_M^(t * dlog x) on the units of a field, M = order - 1."""

    __slots__ = ("field", "t")

    def __init__(self, field: GF, t: int):
        self.field = field
        self.t = t % (field.order - 1) if field.order > 2 else 0

    @property
    def modulus(self):
        return self.field.order - 1

    def value(self, x: FFElement, scal=None):
        if not x:
            raise ValueError("multiplicative character evaluated at zero")
        scal = scal or _DEFAULT_SCAL
        m = self.modulus
        if m == 0:
            return scal.one()
        return scal.root_of_unity(m, self.t * self.field.dlog(x) % m)

    __call__ = value

    def inverse(self):
        return MultChar(self.field, -self.t)

    def orbit(self):
        """Exponent orbit of t under the p-power Frobenius."""
        m = self.modulus
        if m == 0:
            return frozenset({0})
        return frozenset(self.t * pow(self.field.p, i, m) % m for i in range(self.field.degree))

    def is_regular(self):
        return len(self.orbit()) == self.field.degree

    def __eq__(self, other):
        if not isinstance(other, MultChar):
            return NotImplemented
        return self.field._key() == other.field._key() and self.t == other.t

    def __hash__(self):
        return hash((self.field._key(), self.t))

    def __repr__(self):
        return f"<MultChar t={self.t} on {self.field!r}>"


class AddChar:
    """x -> zeta_p^Tr(a x) on a field of characteristic p."""

    __slots__ = ("field", "a")

    def __init__(self, field: GF, a=1):
        self.field = field
        self.a = a if isinstance(a, FFElement) else field.constant(a)

    def value(self, x: FFElement, scal=None):
        scal = scal or _DEFAULT_SCAL
        return scal.root_of_unity(self.field.p, abs_trace(self.a * x))

    __call__ = value

    def inverse(self):
        return AddChar(self.field, -self.a)

    def is_trivial(self):
        return not self.a

    def __eq__(self, other):
        if not isinstance(other, AddChar):
            return NotImplemented
        return self.field._key() == other.field._key() and self.a == other.a

    def __repr__(self):
        return f"<AddChar a={self.a} on {self.field!r}>"
