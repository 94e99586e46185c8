"""Exact p-adic linear algebra over Q (viewed inside Q_p) and the measure
bookkeeping for GL_n.

Matrices carry Fraction entries; valuations are read off denominators and
numerators, so every decomposition here is exact.  iwasawa_NAK produces
g = n * a * k with n upper unitriangular, a = diag(p^{v_i}) and k in
GL_n(Z_p) by column reduction over the valuation ring; iwasawa_PZK reshapes
that into mirabolic x center x maximal compact.

The volume table fixes the normalizations vol(K^1) = 1 for G and likewise
for P, Z, N and the (P cap K)\\K quotient; these are the measures every
integral in the package is stated against.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .cyclo import CycScalars
from .errors import DepthExceeded, UnsupportedDescriptor
from .matgroups import FiniteMatrix, order_gl

_DEFAULT_SCAL = CycScalars()


def val_p(x, p: int):
    """p-adic valuation of a rational; +infinity for zero."""
    x = Fraction(x)
    if not x:
        return math.inf
    v = 0
    n = x.numerator
    while n % p == 0:
        n //= p
        v += 1
    d = x.denominator
    while d % p == 0:
        d //= p
        v -= 1
    return v


def unit_part(x, p: int) -> Fraction:
    """x / p^{val(x)}, the p-unit part of a nonzero rational."""
    x = Fraction(x)
    v = val_p(x, p)
    return x / Fraction(p) ** v


def int_mod(x, p: int, m: int) -> int:
    """Reduction of a p-integral rational modulo p^m, as an int in [0, p^m)."""
    x = Fraction(x)
    mod = p**m
    if x.denominator % p == 0:
        raise ValueError(f"{x} is not p-integral")
    return x.numerator * pow(x.denominator, -1, mod) % mod


def theta_eval(p: int, x, cap: int, scal=None):
    """The additive character of Q_p that is trivial on pZ_p and sends 1 to zeta_p.

    theta(x) = zeta_{p^{m+1}}^{p^m x mod p^{m+1}} with m = max(0, -val(x));
    raises DepthExceeded when m exceeds the session cap.
    """
    scal = scal or _DEFAULT_SCAL
    x = Fraction(x)
    if not x:
        return scal.one()
    m = max(0, -val_p(x, p))
    if m > cap:
        raise DepthExceeded(f"theta argument needs zeta_{p}^{m + 1} but cap is {cap}")
    k = int_mod(x * p**m, p, m + 1)
    return scal.root_of_unity(p ** (m + 1), k)


class PadicMatrix:
    """Immutable matrix with Fraction entries, n <= 3."""

    __slots__ = ("rows",)

    def __init__(self, rows):
        self.rows = tuple(tuple(Fraction(e) for e in row) for row in rows)

    @classmethod
    def identity(cls, n: int) -> "PadicMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def diagonal(cls, entries) -> "PadicMatrix":
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @property
    def n(self) -> int:
        return len(self.rows)

    def entry(self, i: int, j: int) -> Fraction:
        return self.rows[i][j]

    def __eq__(self, other):
        if not isinstance(other, PadicMatrix):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __mul__(self, other):
        if isinstance(other, PadicMatrix):
            n = self.n
            cols = tuple(zip(*other.rows))
            return PadicMatrix(
                [
                    [sum(self.rows[i][k] * cols[j][k] for k in range(n)) for j in range(n)]
                    for i in range(n)
                ]
            )
        if isinstance(other, (int, Fraction)):
            return PadicMatrix([[e * other for e in row] for row in self.rows])
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * other
        return NotImplemented

    def trace(self) -> Fraction:
        return sum(self.rows[i][i] for i in range(self.n))

    def det(self) -> Fraction:
        r = self.rows
        if self.n == 1:
            return r[0][0]
        if self.n == 2:
            return r[0][0] * r[1][1] - r[0][1] * r[1][0]
        if self.n == 3:
            return (
                r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1])
                - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
                + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0])
            )
        raise ValueError("only n <= 3 supported")

    def inverse(self) -> "PadicMatrix":
        d = self.det()
        if not d:
            raise ZeroDivisionError("singular matrix")
        r = self.rows
        if self.n == 1:
            return PadicMatrix([[1 / d]])
        if self.n == 2:
            return PadicMatrix(
                [[r[1][1] / d, -r[0][1] / d], [-r[1][0] / d, r[0][0] / d]]
            )

        def cof(i, j):
            rows = [r[a] for a in range(3) if a != i]
            cols = [b for b in range(3) if b != j]
            m = rows[0][cols[0]] * rows[1][cols[1]] - rows[0][cols[1]] * rows[1][cols[0]]
            return m if (i + j) % 2 == 0 else -m

        return PadicMatrix([[cof(j, i) / d for j in range(3)] for i in range(3)])

    def is_integral(self, p: int) -> bool:
        return all(e.denominator % p for row in self.rows for e in row)

    def in_K(self, p: int) -> bool:
        return self.is_integral(p) and val_p(self.det(), p) == 0

    def mod_p(self, field) -> FiniteMatrix:
        """Reduction mod p of a p-integral matrix into GL_n(F_p) land."""
        p = field.p
        return FiniteMatrix(
            field, [[int_mod(e, p, 1) for e in row] for row in self.rows]
        )

    def __repr__(self):
        body = "; ".join(",".join(str(e) for e in row) for row in self.rows)
        return f"[{body}]"


def upper_unipotent(entries: dict, n: int) -> PadicMatrix:
    """Unipotent matrix with given strictly-upper entries {(i, j): value}."""
    rows = [[Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]
    for (i, j), v in entries.items():
        if i >= j:
            raise ValueError("entries must be strictly upper")
        rows[i][j] = Fraction(v)
    return PadicMatrix(rows)


def iwasawa_NAK(g: PadicMatrix, p: int):
    """Exact decomposition g = n * a * k, a = diag(p^{v_i}), k in GL_n(Z_p).

    Column reduction over Z_p: in each row (bottom up) the entry of least
    valuation among the still-free columns is moved to the diagonal, the
    other entries are cleared by integral column operations, and the column
    is scaled by the inverse unit.  Returns (n, vals, k).
    """
    nn = g.n
    if not g.det():
        raise ValueError("matrix is singular")
    work = [list(r) for r in g.rows]
    kacc = PadicMatrix.identity(nn)

    def colop(e_mat):
        nonlocal kacc
        for i in range(nn):
            row = work[i]
            new = [sum(row[k] * e_mat.rows[k][j] for k in range(nn)) for j in range(nn)]
            work[i] = new
        kacc = kacc * e_mat

    for i in range(nn - 1, -1, -1):
        vals = [val_p(work[i][j], p) for j in range(i + 1)]
        vmin = min(vals)
        jstar = max(j for j in range(i + 1) if vals[j] == vmin)
        if jstar != i:
            perm = [[1 if (a == b and a not in (i, jstar)) or (a, b) in ((i, jstar), (jstar, i)) else 0 for b in range(nn)] for a in range(nn)]
            colop(PadicMatrix(perm))
        pivot = work[i][i]
        clear = [[Fraction(1 if a == b else 0) for b in range(nn)] for a in range(nn)]
        for j in range(i):
            clear[i][j] = -work[i][j] / pivot
        colop(PadicMatrix(clear))
        u = unit_part(pivot, p)
        scale = [[Fraction(1 if a == b else 0) for b in range(nn)] for a in range(nn)]
        scale[i][i] = 1 / u
        colop(PadicMatrix(scale))

    vals = tuple(int(val_p(work[i][i], p)) for i in range(nn))
    tri = PadicMatrix(work)
    a = PadicMatrix.diagonal([Fraction(p) ** v for v in vals])
    n_mat = tri * a.inverse()
    k = kacc.inverse()
    assert k.in_K(p)
    assert n_mat * a * k == g
    return n_mat, vals, k


def iwasawa_PZK(g: PadicMatrix, p: int):
    """g = p_part * z * k with p_part mirabolic, z = p^l * Id, k in K.

    The central exponent is the last Iwasawa valuation, so the mirabolic
    factor always exists; returns (p_part, l, k).
    """
    n_mat, vals, k = iwasawa_NAK(g, p)
    nn = g.n
    l = vals[-1]
    a_shift = PadicMatrix.diagonal([Fraction(p) ** (v - l) for v in vals])
    p_part = n_mat * a_shift
    return p_part, l, k


# -- lattice chains -------------------------------------------------------


@dataclass(frozen=True)
class LatticeChain:
    """Periodic lattice chain data normalized by a_n(0)=0, a_n(-1)=-1.

    base_offsets[k][i] gives a_i(k) for 0 <= k < period; outside that window
    a_i(k + period) = a_i(k) + 1.  `uniformizer` is the chain uniformizer in
    the working basis (where L_0 = Z_p^n), and `t` the twisting powers
    p^{a_i(0) - a_n(0)} entering the standard whittaker character.
    """

    n: int
    period: int
    base_offsets: tuple
    uniformizer_rows: tuple
    t_exponents: tuple

    def offsets(self, k: int):
        q, r = divmod(k, self.period)
        return tuple(a + q for a in self.base_offsets[r])

    def uniformizer(self) -> PadicMatrix:
        return PadicMatrix(self.uniformizer_rows)


def depth_zero_chain(p: int, n: int) -> LatticeChain:
    return LatticeChain(
        n=n,
        period=1,
        base_offsets=((0,) * n,),
        uniformizer_rows=tuple(
            tuple(Fraction(p if i == j else 0) for j in range(n)) for i in range(n)
        ),
        t_exponents=(0,) * n,
    )


def ramified_chain(p: int) -> LatticeChain:
    # offsets in the defining basis: a_1 = (-1, 0), a_2 = (0, 0) at k = 0, 1;
    # the working basis w_1 = p^{-1} v_1, w_2 = v_2 turns L_0 into Z_p^2 and
    # the uniformizer into [[0, p], [1, 0]] with square p * Id.
    return LatticeChain(
        n=2,
        period=2,
        base_offsets=((-1, 0), (0, 0)),
        uniformizer_rows=((Fraction(0), Fraction(p)), (Fraction(1), Fraction(0))),
        t_exponents=(-1, 0),
    )


# -- measures -------------------------------------------------------------


@dataclass(frozen=True)
class MeasureContext:
    p: int
    n: int


def volume(ctx: MeasureContext, descriptor) -> Fraction:
    """Volume of a named compact piece; level 0 means K, level m >= 1 means K^m.

    Normalizations: vol_G(K^1) = vol_P(P cap K^1) = vol_Z(Z cap K^1) =
    vol_N(N cap K^1) = 1 and the quotient measure on (P cap K)\\K gives each
    level-m cell mass q^{-(m-1)n}.
    """
    q, n = ctx.p, ctx.n
    try:
        group, level = descriptor
    except (TypeError, ValueError):
        raise UnsupportedDescriptor(f"bad descriptor {descriptor!r}")
    if not isinstance(level, int) or level < 0:
        raise UnsupportedDescriptor(f"bad level in {descriptor!r}")
    m = level
    if group == "G":
        return Fraction(order_gl(q, n)) if m == 0 else Fraction(1, q ** ((m - 1) * n * n))
    if group == "P":
        if m == 0:
            return Fraction(order_gl(q, n - 1) * q ** (n - 1))
        return Fraction(1, q ** ((m - 1) * (n * n - n)))
    if group == "Z":
        return Fraction(q - 1) if m == 0 else Fraction(1, q ** (m - 1))
    if group == "N":
        d = n * (n - 1) // 2
        return Fraction(q**d) if m == 0 else Fraction(1, q ** ((m - 1) * d))
    if group == "PK_quot":
        if m == 0:
            raise UnsupportedDescriptor("quotient cells need a positive level")
        return Fraction(1, q ** ((m - 1) * n))
    raise UnsupportedDescriptor(f"unknown group {group!r}")


def ng_cell_volume(q: int, n: int, m: int, v) -> Fraction:
    """Volume of the N\\G cell indexed by (p^v, kbar) at level m.

    dg-bar assigns q^{sum_{i<j}(v_i - v_j)} * q^{-(m-1) n(n+1)/2} to each
    cell of {p^v kbar : kbar in (N cap K)\\K/K^m}.
    """
    shift = sum(v[i] - v[j] for i in range(n) for j in range(i + 1, n))
    base = Fraction(q) ** shift
    return base * Fraction(1, q ** ((m - 1) * n * (n + 1) // 2))


# -- coset cell enumerations ----------------------------------------------


def unimodular_rows(p: int, n: int, m: int):
    """Rows in (Z/p^m)^n with at least one unit entry."""
    mod = p**m
    out = []
    for r in itertools.product(range(mod), repeat=n):
        if any(x % p for x in r):
            out.append(r)
    return out


def pk_cell_reps(p: int, n: int, m: int):
    """Representatives of (P cap K)\\K/K^m: one per unimodular bottom row.

    Returns (row, matrix) pairs; the matrix completes the row with standard
    basis rows, giving det = +- (unit entry).
    """
    out = []
    for r in unimodular_rows(p, n, m):
        j = next(i for i in range(n) if r[i] % p)
        rows = [[1 if k == i else 0 for k in range(n)] for i in range(n) if i != j]
        rows.append(list(r))
        out.append((r, PadicMatrix(rows)))
    return out


def nk_cell_reps(p: int, m: int):
    """Representatives of (N cap K)\\K/K^m for GL_2.

    Two branches by the reduction of the bottom-left entry: c = 0 mod p
    forces d to be a unit and the representative [[a, 0], [c, d]] with a a
    unit; c a unit gives [[0, b], [c, d]] with b a unit and d free.
    """
    mod = p**m
    units = [x for x in range(mod) if x % p]
    out = []
    for a in units:
        for c in range(0, mod, p):
            for d in units:
                out.append(PadicMatrix([[a, 0], [c, d]]))
    for b in units:
        for c in units:
            for d in range(mod):
                out.append(PadicMatrix([[0, b], [c, d]]))
    return out
