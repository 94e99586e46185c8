"""Exact arithmetic in the cyclotomic fields Q(zeta_N).

A :class:`CycNumber` is a sparse rational linear combination of roots of
unity, stored as ``{exponent mod N: Fraction}``.  Arithmetic never forces a
canonical form; equality and zero tests reduce lazily to the tensor basis
obtained by splitting N into prime powers, which is cheap and needs no
precomputed tables.  Elements with different moduli mix freely: binary
operations embed both into Q(zeta_lcm).  The dense power-basis vector modulo
the N-th cyclotomic polynomial is produced only at serialization boundaries.

The printable grammar is sums of terms ``a/b * zeta(N)^k``; ``parse`` and
``str`` round-trip.
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import gcd, lcm

_PP_CACHE: dict[int, tuple[tuple[int, int, int, int], ...]] = {}
_CRT_CACHE: dict[int, tuple[int, ...]] = {}
_ROWS_CACHE: dict[int, list[list[Fraction]]] = {}

_ZERO = Fraction(0)
_ONE = Fraction(1)


def _prime_powers(n: int):
    """Tuples (p, p**a, phi(p**a), p**(a-1)) for each prime p dividing n."""
    try:
        return _PP_CACHE[n]
    except KeyError:
        pass
    out = []
    m = n
    p = 2
    while m > 1:
        if p * p > m:
            out.append((m, m, m - 1, 1))
            break
        if m % p:
            p += 1
            continue
        pa = 1
        while m % p == 0:
            m //= p
            pa *= p
        out.append((p, pa, pa - pa // p, pa // p))
        p += 1
    _PP_CACHE[n] = tuple(out)
    return _PP_CACHE[n]


def totient(n: int) -> int:
    out = 1
    for _, _, phi_pa, _ in _prime_powers(n):
        out *= phi_pa
    return out


def _crt_mults(n: int):
    """Multipliers M_i with k = sum(e_i * M_i) mod n for residues e_i mod p_i^a_i."""
    try:
        return _CRT_CACHE[n]
    except KeyError:
        pass
    ms = []
    for _, pa, _, _ in _prime_powers(n):
        rest = n // pa
        ms.append(rest * pow(rest, -1, pa) % n)
    _CRT_CACHE[n] = tuple(ms)
    return _CRT_CACHE[n]


def _power_rows(n: int):
    """Row k is the coefficient vector of x**k modulo the n-th cyclotomic polynomial."""
    try:
        return _ROWS_CACHE[n]
    except KeyError:
        pass
    from sympy import Poly, cyclotomic_poly, symbols

    x = symbols("x")
    coeffs = Poly(cyclotomic_poly(n, x), x).all_coeffs()  # leading first, monic
    deg = len(coeffs) - 1
    rep = [Fraction(-int(coeffs[deg - j])) for j in range(deg)]
    rows = [[_ONE if i == j else _ZERO for i in range(deg)] for j in range(deg)]
    for k in range(deg, n):
        prev = rows[k - 1]
        carry = prev[deg - 1]
        row = [_ZERO] * deg
        for j in range(1, deg):
            row[j] = prev[j - 1]
        if carry:
            for j in range(deg):
                row[j] += carry * rep[j]
        rows.append(row)
    _ROWS_CACHE[n] = rows
    return rows


def _coerce(value):
    if isinstance(value, CycNumber):
        return value
    if isinstance(value, (int, Fraction)):
        return CycNumber(1, {0: Fraction(value)})
    return NotImplemented


class CycNumber:
    """An element of Q(zeta_N), immutable."""

    __slots__ = ("_N", "_c", "_canon")

    def __init__(self, modulus: int, coeffs: dict):
        if modulus < 1:
            raise ValueError("modulus must be a positive integer")
        c: dict[int, Fraction] = {}
        for k, v in coeffs.items():
            if not isinstance(v, Fraction):
                v = Fraction(v)
            if v:
                k %= modulus
                w = c.get(k)
                if w is None:
                    c[k] = v
                else:
                    s = w + v
                    if s:
                        c[k] = s
                    else:
                        del c[k]
        self._N = modulus
        self._c = c
        self._canon: dict[int, dict] = {}

    # -- constructors ----------------------------------------------------

    @classmethod
    def zero(cls, modulus: int = 1) -> "CycNumber":
        return cls(modulus, {})

    @classmethod
    def one(cls) -> "CycNumber":
        return cls(1, {0: _ONE})

    @classmethod
    def from_fraction(cls, value) -> "CycNumber":
        return cls(1, {0: Fraction(value)})

    @property
    def modulus(self) -> int:
        return self._N

    def raw_items(self, big: int) -> dict:
        """Raw exponent -> coefficient dict read at conductor big (a multiple
        of this element's modulus).  Any ring morphism sending the primitive
        big-th root to a root of unity of the same order identifies equal
        elements, so consumers may map these terms term by term."""
        if big % self._N:
            raise ValueError(f"{big} is not a multiple of the modulus {self._N}")
        return dict(self._raw_at(big))

    # -- canonicalization ------------------------------------------------

    def _raw_at(self, big: int) -> dict:
        if big == self._N:
            return self._c
        t = big // self._N
        return {(k * t) % big: v for k, v in self._c.items()}

    def _canonical_at(self, big: int) -> dict:
        """Tensor-basis coordinates inside Q(zeta_big); keys are residue tuples."""
        cached = self._canon.get(big)
        if cached is not None:
            return cached
        pps = _prime_powers(big)
        t = big // self._N
        work = [
            ([(k * t) % pa for _, pa, _, _ in pps], v) for k, v in self._c.items()
        ]
        out: dict[tuple, Fraction] = {}
        while work:
            comps, v = work.pop()
            for i, (p, _, phi_pa, step) in enumerate(pps):
                e = comps[i]
                if e >= phi_pa:
                    r = e - phi_pa  # 0 <= r < step
                    for j in range(p - 1):
                        nxt = list(comps)
                        nxt[i] = j * step + r
                        work.append((nxt, -v))
                    break
            else:
                key = tuple(comps)
                w = out.get(key)
                if w is None:
                    out[key] = v
                else:
                    s = w + v
                    if s:
                        out[key] = s
                    else:
                        del out[key]
        self._canon[big] = out
        return out

    def is_zero(self) -> bool:
        return not self._c or not self._canonical_at(self._N)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def is_rational(self) -> bool:
        can = self._canonical_at(self._N)
        if not can:
            return True
        if len(can) == 1:
            ((comps, _),) = can.items()
            return not any(comps)
        return False

    def rational_value(self) -> Fraction:
        can = self._canonical_at(self._N)
        if not can:
            return _ZERO
        if len(can) == 1:
            ((comps, v),) = can.items()
            if not any(comps):
                return v
        raise ValueError("element is not rational")

    def _combined_canonical(self) -> list[tuple[int, Fraction]]:
        """Canonical terms as (exponent mod N, coefficient), sorted."""
        can = self._canonical_at(self._N)
        ms = _crt_mults(self._N)
        out = [
            (sum(e * m for e, m in zip(comps, ms)) % self._N, v)
            for comps, v in can.items()
        ]
        out.sort()
        return out

    def demote(self) -> "CycNumber":
        """Equal element at the smallest modulus N/g visible from the support."""
        items = self._combined_canonical()
        if not items:
            return CycNumber(1, {})
        g = self._N
        for k, _ in items:
            g = gcd(g, k)
        return CycNumber(self._N // g, {k // g: v for k, v in items})

    # -- ring operations -------------------------------------------------

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self._N == other._N and self._c == other._c:
            return True
        big = lcm(self._N, other._N)
        return self._canonical_at(big) == other._canonical_at(big)

    __hash__ = None  # mutable-cache value type; use power_basis() tuples to key

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        big = lcm(self._N, other._N)
        out = dict(self._raw_at(big))
        for k, v in other._raw_at(big).items():
            w = out.get(k)
            if w is None:
                out[k] = v
            else:
                s = w + v
                if s:
                    out[k] = s
                else:
                    del out[k]
        return CycNumber(big, out)

    __radd__ = __add__

    def __neg__(self):
        return CycNumber(self._N, {k: -v for k, v in self._c.items()})

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        big = lcm(self._N, other._N)
        a = self._raw_at(big)
        b = other._raw_at(big)
        if len(a) > len(b):
            a, b = b, a
        out: dict[int, Fraction] = {}
        for k1, v1 in a.items():
            for k2, v2 in b.items():
                k = (k1 + k2) % big
                v = v1 * v2
                w = out.get(k)
                if w is None:
                    out[k] = v
                else:
                    s = w + v
                    if s:
                        out[k] = s
                    else:
                        del out[k]
        return CycNumber(big, out)

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        if len(self._c) == 1:
            ((k, v),) = self._c.items()
            return CycNumber(self._N, {(k * n) % self._N: v**n})
        result = CycNumber.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def conj(self, a: int) -> "CycNumber":
        """Galois conjugate zeta -> zeta**a, for a invertible mod the modulus."""
        if gcd(a, self._N) != 1:
            raise ValueError("conjugation index must be invertible mod N")
        return CycNumber(self._N, {(k * a) % self._N: v for k, v in self._c.items()})

    def inverse(self) -> "CycNumber":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(zeta_N)")
        d = self.demote()
        if len(d._c) == 1:
            ((k, v),) = d._c.items()
            return CycNumber(d._N, {(-k) % d._N: 1 / v})
        prod = CycNumber.one()
        for a in range(2, d._N):
            if gcd(a, d._N) == 1:
                prod = prod * d.conj(a)
        norm = (d * prod).rational_value()  # full Galois norm, always in Q
        return prod * CycNumber.from_fraction(1 / norm)

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    # -- boundary representations ----------------------------------------

    def power_basis(self) -> list[Fraction]:
        """Coefficients on 1, zeta, ..., zeta**(phi(N)-1) modulo Phi_N."""
        rows = _power_rows(self._N)
        deg = len(rows[0])
        vec = [_ZERO] * deg
        for k, v in self._c.items():
            for j, r in enumerate(rows[k]):
                if r:
                    vec[j] += v * r
        return vec

    @classmethod
    def from_power_basis(cls, modulus: int, coords) -> "CycNumber":
        return cls(modulus, {j: Fraction(v) for j, v in enumerate(coords)})

    def to_json(self) -> dict:
        d = self.demote()
        return {"modulus": d._N, "coords": [str(v) for v in d.power_basis()]}

    @classmethod
    def from_json(cls, obj: dict) -> "CycNumber":
        return cls.from_power_basis(int(obj["modulus"]), obj["coords"])

    def __str__(self) -> str:
        d = self.demote()
        terms = d._combined_canonical()
        if not terms:
            return "0"
        parts = []
        for k, v in terms:
            if k == 0:
                body = str(abs(v))
            else:
                z = f"zeta({d._N})" + (f"^{k}" if k != 1 else "")
                body = z if abs(v) == 1 else f"{abs(v)}*{z}"
            if not parts:
                parts.append(body if v > 0 else "-" + body)
            else:
                parts.append(("+ " if v > 0 else "- ") + body)
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"CycNumber.parse({str(self)!r})"

    @classmethod
    def parse(cls, text: str) -> "CycNumber":
        return _Parser(_tokenize(text)).parse()


def cyc_embed_root(modulus: int, k: int) -> CycNumber:
    """The root of unity zeta_modulus**k."""
    return CycNumber(modulus, {k: _ONE})


# -- string grammar -------------------------------------------------------

_TOKEN = re.compile(r"\s*(zeta|\d+/\d+|\d+|[()^*+-])")


def _tokenize(text: str) -> list[str]:
    text = text.strip()
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ValueError(f"bad cyclotomic literal near {text[pos:]!r}")
        out.append(m.group(1))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, tokens: list[str]):
        self.tokens = tokens
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self, expect: str | None = None) -> str:
        tok = self.peek()
        if tok is None or (expect is not None and tok != expect):
            raise ValueError(f"expected {expect or 'token'}, got {tok!r}")
        self.i += 1
        return tok

    def take_number(self) -> str:
        tok = self.take()
        if not re.fullmatch(r"\d+(/\d+)?", tok):
            raise ValueError(f"expected number, got {tok!r}")
        return tok

    def parse(self) -> CycNumber:
        value = self.term()
        while self.peek() in ("+", "-"):
            op = self.take()
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        if self.peek() is not None:
            raise ValueError(f"trailing input at {self.tokens[self.i:]!r}")
        return value

    def term(self) -> CycNumber:
        sign = 1
        while self.peek() in ("+", "-"):
            if self.take() == "-":
                sign = -sign
        value = self.factor()
        while self.peek() == "*":
            self.take()
            value = value * self.factor()
        return value if sign == 1 else -value

    def factor(self) -> CycNumber:
        if self.peek() == "zeta":
            self.take()
            self.take("(")
            n = int(self.take_number())
            self.take(")")
            k = 1
            if self.peek() == "^":
                self.take()
                sign = 1
                if self.peek() == "-":
                    self.take()
                    sign = -1
                k = sign * int(self.take_number())
            return cyc_embed_root(n, k)
        return CycNumber.from_fraction(Fraction(self.take_number()))


def parse_cyc(text: str) -> CycNumber:
    return CycNumber.parse(text)


class CycScalars:
    """Characteristic-zero scalar context: plain cyclotomic numbers."""

    kind = "cyclotomic"
    cache_key = "cyc"

    def one(self) -> CycNumber:
        return CycNumber.one()

    def zero(self) -> CycNumber:
        return CycNumber.zero()

    def from_fraction(self, value) -> CycNumber:
        return CycNumber.from_fraction(value)

    def root_of_unity(self, modulus: int, k: int) -> CycNumber:
        return cyc_embed_root(modulus, k)

    def embed_cyc(self, value: CycNumber) -> CycNumber:
        return value
