"""Cuspidal characters of GL_n(F_q) and their Bessel functions.

A regular character Theta of F_{q^n}^x determines an irreducible cuspidal
character chi_Theta; its values depend only on the eigenvalue pattern of the
argument, so evaluation goes through classify_conjugacy.  The Bessel
function attached to (chi, psi) is the psi-average of chi over the upper
unitriangular subgroup; it is the finite-level Whittaker kernel.

Correctness of the value tables is certified in the test-suite by structural
invariants (irreducibility, vanishing of all Borel-induction pairings,
unipotent-sum vanishing, degree, central character) rather than by the
formulas themselves; at q = 2 the GL_2 character is also pinned against the
sign character of S_3.
"""

from __future__ import annotations

from fractions import Fraction

from .cyclo import CycScalars
from .errors import NotRegular
from .finitefield import AddChar, MultChar, embed_element, gf
from .matgroups import (
    FiniteMatrix,
    classify_conjugacy,
    embed_block,
    enumerate_group,
    enumerate_unitriangular,
    n_coset_reps,
    n_right_coset_canonical,
)

_DEFAULT_SCAL = CycScalars()


class CuspidalCharacter:
    """chi_Theta on GL_n(F_q), for Theta regular on F_{q^n}."""

    __slots__ = ("theta", "n", "base_field", "big_field")

    def __init__(self, theta: MultChar, n: int | None = None):
        d = theta.field.degree
        if n is not None and n != d:
            raise ValueError(f"character lives on a degree-{d} extension, not {n}")
        if d not in (2, 3):
            raise ValueError("only GL_2 and GL_3 are supported")
        if not theta.is_regular():
            raise NotRegular(
                f"t={theta.t} is fixed by a power of Frobenius on F_{theta.field.order}"
            )
        self.theta = theta
        self.n = d
        self.big_field = theta.field
        self.base_field = gf(theta.field.p, 1)

    @property
    def q(self) -> int:
        return self.base_field.order

    def degree_value(self) -> int:
        out = 1
        for i in range(1, self.n):
            out *= self.q**i - 1
        return out

    def _theta_at_base(self, z, scal):
        return self.theta.value(embed_element(z, self.big_field), scal)

    def value(self, g: FiniteMatrix, scal=None):
        scal = scal or _DEFAULT_SCAL
        kind, data = classify_conjugacy(g)
        q = self.q
        if self.n == 2:
            if kind == "central":
                return scal.from_fraction(Fraction(q - 1)) * self._theta_at_base(data, scal)
            if kind == "unipotent":
                return -self._theta_at_base(data, scal)
            if kind == "split":
                return scal.zero()
            total = scal.zero()
            for x in data:
                total = total + self.theta.value(x, scal)
            return -total
        if kind == "central":
            c = Fraction((q - 1) * (q * q - 1))
            return scal.from_fraction(c) * self._theta_at_base(data, scal)
        if kind == "u21":
            return -(scal.from_fraction(Fraction(q - 1)) * self._theta_at_base(data, scal))
        if kind == "u3":
            return self._theta_at_base(data, scal)
        if kind == "elliptic":
            total = scal.zero()
            for x in data:
                total = total + self.theta.value(x, scal)
            return total
        return scal.zero()

    __call__ = value

    def dual(self) -> "CuspidalCharacter":
        return CuspidalCharacter(self.theta.inverse())

    def central_value(self, z, scal=None):
        """The central character omega(z) = Theta(z) for z in F_q^x."""
        scal = scal or _DEFAULT_SCAL
        return self._theta_at_base(z, scal)

    def __repr__(self):
        return f"<CuspidalCharacter n={self.n} q={self.q} t={self.theta.t}>"


def cuspidal_character(theta: MultChar, n: int | None = None) -> CuspidalCharacter:
    return CuspidalCharacter(theta, n)


def psi_of_unipotent(psi: AddChar, u: FiniteMatrix, scal=None):
    """psi applied to the sum of the superdiagonal entries of u."""
    total = u.field.zero()
    for i in range(u.n - 1):
        total = total + u.entry(i, i + 1)
    return psi.value(total, scal)


class BesselFunction:
    """J(g) = |N|^{-1} sum_u psi(u)^{-1} chi(g u), the finite Whittaker kernel."""

    __slots__ = ("chi", "psi", "_memo")

    def __init__(self, chi: CuspidalCharacter, psi: AddChar):
        if psi.field._key() != chi.base_field._key():
            raise ValueError("psi must live on the base field F_q")
        if psi.is_trivial():
            raise ValueError("psi must be nontrivial")
        self.chi = chi
        self.psi = psi
        self._memo = {}

    @property
    def field(self):
        return self.chi.base_field

    @property
    def n(self):
        return self.chi.n

    def value(self, g: FiniteMatrix, scal=None):
        scal = scal or _DEFAULT_SCAL
        key = (scal.cache_key, g.rows)
        cached = self._memo.get(key)
        if cached is not None:
            return cached
        psi_inv = self.psi.inverse()
        units = enumerate_unitriangular(self.field, self.n)
        total = scal.zero()
        for u in units:
            total = total + psi_of_unipotent(psi_inv, u, scal) * self.chi.value(g * u, scal)
        out = scal.from_fraction(Fraction(1, len(units))) * total
        self._memo[key] = out
        return out

    __call__ = value

    def __repr__(self):
        return f"<BesselFunction {self.chi!r}>"


def finite_bessel(chi: CuspidalCharacter, psi: AddChar) -> BesselFunction:
    return BesselFunction(chi, psi)


def mirabolic_convolution(b1: BesselFunction, b2: BesselFunction, g1, g2, scal=None):
    """sum over N\\M of J1(g1 m^{-1}) J2(m g2), M the mirabolic subgroup."""
    scal = scal or _DEFAULT_SCAL
    field = b1.field
    n = b1.n
    total = scal.zero()
    for r in n_coset_reps(field, n - 1):
        m = embed_block(r, n)
        total = total + b1.value(g1 * m.inverse(), scal) * b2.value(m * g2, scal)
    return total


def character_invariants(chi: CuspidalCharacter) -> dict:
    """Exhaustive structural certification of the character table.

    Builds the full value table over GL_n(F_q) once and checks:

    - ``norm_one``: the self inner product is 1, i.e. chi is (plus or minus)
      an irreducible character; combined with positive degree it is a genuine
      irreducible;
    - ``degree``: chi(1) = prod_{i<n} (q^i - 1);
    - ``sum_zero``: chi is orthogonal to the trivial character;
    - ``central_character``: chi(z g) = Theta(z) chi(g) for every central z
      and every g;
    - ``cuspidal_vanishing``: sum of chi over every right coset g N is zero,
      which is exactly the vanishing of the N-coinvariants (cuspidality).

    The GL_3 value table is accepted purely on the strength of this suite.
    """
    F = chi.base_field
    n = chi.n
    G = enumerate_group(F, n)
    val = {g: chi.value(g) for g in G}
    eye = FiniteMatrix.identity(F, n)

    inner = CycScalars().zero()
    for g in G:
        inner = inner + val[g] * val[g.inverse()]
    norm_one = inner == len(G)

    degree_ok = val[eye] == chi.degree_value()

    total = CycScalars().zero()
    for g in G:
        total = total + val[g]
    sum_zero = total.is_zero()

    central_ok = True
    for z in F.units():
        tz = chi.central_value(z)
        for g in G:
            if not val[g * z] == tz * val[g]:
                central_ok = False
                break
        if not central_ok:
            break

    coset_sums: dict = {}
    for g in G:
        key = n_right_coset_canonical(g)
        s = coset_sums.get(key)
        coset_sums[key] = val[g] if s is None else s + val[g]
    n_size = len(enumerate_unitriangular(F, n))
    cuspidal = len(coset_sums) == len(G) // n_size and all(
        v.is_zero() for v in coset_sums.values()
    )

    return {
        "norm_one": norm_one,
        "degree": degree_ok,
        "sum_zero": sum_zero,
        "central_character": central_ok,
        "cuspidal_vanishing": cuspidal,
    }


def bessel_convolution_check(b1: BesselFunction, b2, g1, g2, scal=None) -> bool:
    """Does the mirabolic convolution of J1 and J2 reproduce J1 at g1 g2?

    Used with b2 the Bessel function of the same character; the identity is
    the finite-level analogue of the Whittaker-coefficient reproducing
    formula.
    """
    scal = scal or _DEFAULT_SCAL
    lhs = mirabolic_convolution(b1, b2, g1, g2, scal)
    rhs = b1.value(g1 * g2, scal)
    return lhs == rhs
