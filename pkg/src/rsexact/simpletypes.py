"""Cuspidal type data for GL_n(Q_p) and the explicit Whittaker test vectors.

Two families are implemented:

* depth zero (e = 1, n in {2, 3}): the inducing datum is a regular character
  of F_{q^n}^x; the compact piece is J = GL_n(Z_p), the extended group is
  generated by p * Id over J, and the kernel on J is the finite Bessel
  function of the associated cuspidal character.

* minimally ramified GL_2 (e = 2, p odd): the hereditary order A consists of
  integral matrices with upper-right entry divisible by p, with radical P_A
  and uniformizer w_E = [[0, p], [1, 0]] (w_E^2 = p).  J = o_E^x (1 + P_A)
  is the subgroup of A^x whose diagonal entries agree mod p; the character
  lambda on J is sigma-bar on the residue torus times
  theta(s * tr(w_E^{-1} y)) on 1 + P_A, where the orientation s = +-1 decides
  whether lambda matches psi_t or its inverse on N cap J^1.

Every test vector is supported on N * <w_E> * J and evaluated by the exact
support decomposition g = n * w_E^i * j_0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .cuspchar import BesselFunction, CuspidalCharacter, finite_bessel
from .cyclo import CycNumber, CycScalars
from .errors import (
    EvenResidualCharacteristic,
    FamilyMismatch,
    NondegeneracyFailure,
    NotInJ,
    NotInU,
    WindowExceeded,
)
from .finitefield import AddChar, MultChar, embed_element, gf
from .padic import (
    LatticeChain,
    PadicMatrix,
    depth_zero_chain,
    int_mod,
    iwasawa_NAK,
    ramified_chain,
    theta_eval,
    unit_part,
    upper_unipotent,
    val_p,
)
from .ratfun import EulerFactor, Laurent

_DEFAULT_SCAL = CycScalars()

DEPTH_ZERO = "depth-zero"
RAMIFIED = "ramified"


@dataclass(frozen=True)
class SimpleTypeData:
    """All data of one cuspidal type; build through make_type."""

    family: str
    p: int
    n: int
    e: int
    cap: int
    level: int  # congruence level of the cell decompositions
    chain: LatticeChain
    A: CycNumber
    theta: MultChar | None = None
    chi: CuspidalCharacter | None = field(default=None, compare=False)
    sigma: MultChar | None = None
    orientation: int | None = None

    @property
    def q(self) -> int:
        return self.p

    @property
    def n_over_e(self) -> int:
        return self.n // self.e

    @property
    def vol_J1(self) -> Fraction:
        """Volume of J^1 in the normalization vol(K^1) = 1."""
        return Fraction(self.q) if self.family == RAMIFIED else Fraction(1)

    # -- membership ------------------------------------------------------

    def in_order_units(self, g: PadicMatrix) -> bool:
        """g in A^x (for the ramified order) or GL_n(Z_p) (depth zero)."""
        p = self.p
        if self.family == DEPTH_ZERO:
            return g.in_K(p)
        return (
            g.is_integral(p)
            and val_p(g.entry(0, 1), p) >= 1
            and val_p(g.det(), p) == 0
        )

    def in_J(self, g: PadicMatrix) -> bool:
        if self.family == DEPTH_ZERO:
            return g.in_K(self.p)
        if not self.in_order_units(g):
            return False
        diff = g.entry(0, 0) - g.entry(1, 1)
        return val_p(diff, self.p) >= 1

    def in_J1(self, g: PadicMatrix) -> bool:
        p = self.p
        y = PadicMatrix(
            [
                [g.entry(i, j) - (1 if i == j else 0) for j in range(self.n)]
                for i in range(self.n)
            ]
        )
        if self.family == DEPTH_ZERO:
            return all(val_p(y.entry(i, j), p) >= 1 for i in range(self.n) for j in range(self.n))
        return (
            val_p(y.entry(0, 0), p) >= 1
            and val_p(y.entry(0, 1), p) >= 1
            and val_p(y.entry(1, 0), p) >= 0
            and val_p(y.entry(1, 1), p) >= 1
        )

    # -- characters ------------------------------------------------------

    def beta_trace(self, y: PadicMatrix) -> Fraction:
        """tr(w_E^{-1} y) = y_21 + y_12 / p for the ramified order."""
        return y.entry(1, 0) + y.entry(0, 1) / self.p

    def lam(self, j: PadicMatrix, scal=None):
        """The character lambda of J in the ramified family."""
        if self.family != RAMIFIED:
            raise FamilyMismatch("lambda is only defined for the ramified family")
        scal = scal or _DEFAULT_SCAL
        if not self.in_J(j):
            raise NotInJ(f"{j!r} is not in J")
        p = self.p
        r = int_mod(j.entry(0, 0), p, 1)
        zeta = pow(r, p * p, p**3)  # Teichmueller-style unit lift
        zinv = pow(zeta, -1, p**3)
        h = j * Fraction(zinv)
        y = PadicMatrix(
            [
                [h.entry(i, k) - (1 if i == k else 0) for k in range(2)]
                for i in range(2)
            ]
        )
        arg = Fraction(self.orientation) * self.beta_trace(y)
        return self.sigma.value(gf(p).constant(r), scal) * theta_eval(p, arg, self.cap, scal)

    def kernel(self, j0: PadicMatrix, scal=None, dual: bool = False):
        """Value of the J-kernel at j0 (finite Bessel or lambda)."""
        scal = scal or _DEFAULT_SCAL
        if self.family == DEPTH_ZERO:
            bessel = self._bessel_dual if dual else self._bessel
            return bessel.value(j0.mod_p(gf(self.p)), scal)
        return self.lam(j0, scal)

    @property
    def _bessel(self) -> BesselFunction:
        b = getattr(self, "_bessel_cache", None)
        if b is None:
            b = finite_bessel(self.chi, AddChar(gf(self.p), 1))
            object.__setattr__(self, "_bessel_cache", b)
        return b

    @property
    def _bessel_dual(self) -> BesselFunction:
        b = getattr(self, "_bessel_dual_cache", None)
        if b is None:
            b = finite_bessel(self.chi, AddChar(gf(self.p), 1).inverse())
            object.__setattr__(self, "_bessel_dual_cache", b)
        return b

    def central_unit_value(self, u, scal=None):
        """Central character at a unit u of Z_p."""
        scal = scal or _DEFAULT_SCAL
        r = int_mod(Fraction(u), self.p, 1)
        if self.family == DEPTH_ZERO:
            big = embed_element(gf(self.p).constant(r), gf(self.p, self.n))
            return self.theta.value(big, scal)
        return self.sigma.value(gf(self.p).constant(r), scal)

    def central_uniformizer_value(self):
        """Central character at p, i.e. at w_E^e."""
        return self.A**self.e

    # -- canonical dual parameters --------------------------------------

    def dual_params(self) -> dict:
        if self.family == DEPTH_ZERO:
            mod = self.q**self.n - 1
            return {
                "family": DEPTH_ZERO,
                "p": self.p,
                "n": self.n,
                "theta": (-self.theta.t) % mod,
                "A": self.A.inverse(),
            }
        return {
            "family": RAMIFIED,
            "p": self.p,
            "sigma": (-self.sigma.t) % (self.p - 1),
            "orientation": -self.orientation,
            "A": self.A.inverse(),
        }


def _coerce_A(A) -> CycNumber:
    if A is None:
        return CycNumber.one()
    if isinstance(A, CycNumber):
        a = A
    else:
        a = CycNumber.from_fraction(Fraction(A))
    if a.is_zero():
        raise ValueError("A must be nonzero")
    return a


def make_type(family: str, p: int, *, n: int = 2, theta: int | None = None,
              A=None, sigma: int | None = None, orientation: int = 1,
              scal=None) -> SimpleTypeData:
    """Construct and self-check the data of one cuspidal type.

    depth-zero: `theta` indexes a character of F_{p^n}^x (must be regular,
    else NotRegular).  ramified: `sigma` indexes a character of F_p^x and
    `orientation` in {+1, -1} fixes which of psi_t, psi_t^{-1} the character
    lambda matches on N cap J^1; p must be odd.
    """
    A = _coerce_A(A)
    scal = scal or _DEFAULT_SCAL
    if family == DEPTH_ZERO:
        if n not in (2, 3):
            raise ValueError("depth-zero types support n in {2, 3}")
        if theta is None:
            raise ValueError("depth-zero types need a theta index")
        mult = MultChar(gf(p, n), theta)
        chi = CuspidalCharacter(mult)  # raises NotRegular for bad theta
        return SimpleTypeData(
            family=DEPTH_ZERO,
            p=p,
            n=n,
            e=1,
            cap=1,
            level=1,
            chain=depth_zero_chain(p, n),
            A=A,
            theta=mult,
            chi=chi,
        )
    if family == RAMIFIED:
        if p == 2:
            raise EvenResidualCharacteristic("the ramified family needs p odd")
        if sigma is None:
            raise ValueError("ramified types need a sigma index")
        if orientation not in (1, -1):
            raise NondegeneracyFailure(
                "orientation must be +1 (psi_t side) or -1 (psi_t inverse side)"
            )
        data = SimpleTypeData(
            family=RAMIFIED,
            p=p,
            n=2,
            e=2,
            cap=2,
            level=2,
            chain=ramified_chain(p),
            A=A,
            sigma=MultChar(gf(p), sigma),
            orientation=orientation,
        )
        _check_lambda_multiplicative(data, scal)
        return data
    raise ValueError(f"unknown family {family!r}")


def _check_lambda_multiplicative(data: SimpleTypeData, scal) -> None:
    """lambda restricted to 1 + P_A is a character: check on radical basis pairs."""
    p = data.p
    basis = [
        PadicMatrix([[p, 0], [0, 0]]),
        PadicMatrix([[0, p], [0, 0]]),
        PadicMatrix([[0, 0], [1, 0]]),
        PadicMatrix([[0, 0], [0, p]]),
    ]
    one = PadicMatrix.identity(2)
    def shift(y):
        return PadicMatrix(
            [[one.entry(i, j) + y.entry(i, j) for j in range(2)] for i in range(2)]
        )
    for y in basis:
        for yp in basis:
            a = shift(y)
            b = shift(yp)
            if data.lam(a * b, scal) != data.lam(a, scal) * data.lam(b, scal):
                raise NondegeneracyFailure("lambda fails to be multiplicative on J^1")


# -- the standard whittaker character of N -------------------------------


def psi_t_eval(data: SimpleTypeData, n_mat: PadicMatrix, scal=None, sign: int = 1):
    """psi_t(n) = theta(sum_i p^{t_i - t_{i+1}} n_{i,i+1}), or its inverse."""
    scal = scal or _DEFAULT_SCAL
    t = data.chain.t_exponents
    arg = Fraction(0)
    for i in range(data.n - 1):
        arg += Fraction(data.p) ** (t[i] - t[i + 1]) * n_mat.entry(i, i + 1)
    return theta_eval(data.p, sign * arg, data.cap, scal)


def extended_psi_on_U(data: SimpleTypeData, g: PadicMatrix, scal=None):
    """The character of U = N(F) * J^1 restricting to lambda on J^1; NotInU
    off that set.

    The two restrictions agree on N cap J^1 only for psi_t raised to the
    orientation sign, so the N-part contributes psi_t^{orientation}.  The
    J^1 factor is found by clearing the strictly-upper part of g with exact
    unipotent row operations, then membership is checked strictly.
    """
    scal = scal or _DEFAULT_SCAL
    n = data.n
    h = g
    u = PadicMatrix.identity(n)
    for i in range(n - 2, -1, -1):
        for j in range(n - 1, i, -1):
            piv = h.entry(j, j)
            if val_p(piv, data.p) != 0:
                raise NotInU(f"{g!r} is not in N * J^1")
            x = h.entry(i, j) / piv
            elem = upper_unipotent({(i, j): x}, n)
            u = u * elem
            h = elem.inverse() * h
    if not data.in_J1(h):
        raise NotInU(f"{g!r} is not in N * J^1")
    sign = data.orientation if data.family == RAMIFIED else 1
    value = psi_t_eval(data, u, scal, sign=sign)
    if data.family == RAMIFIED:
        y = PadicMatrix(
            [[h.entry(i, k) - (1 if i == k else 0) for k in range(2)] for i in range(2)]
        )
        value = value * theta_eval(
            data.p, Fraction(data.orientation) * data.beta_trace(y), data.cap, scal
        )
    return value


# -- support decomposition -----------------------------------------------


def support_decompose(data: SimpleTypeData, g: PadicMatrix, window: int | None = None):
    """Write g = n * w_E^i * j_0 with j_0 in J, or return None off the support.

    Exact in both families.  When `window` is given, an N-part entry of
    valuation below -window raises WindowExceeded instead of succeeding.
    """
    p = data.p
    if data.family == DEPTH_ZERO:
        if g.is_integral(p) and val_p(g.det(), p) == 0:
            return 0, PadicMatrix.identity(data.n), g
        n_mat, vals, k = iwasawa_NAK(g, p)
        if any(v != vals[0] for v in vals):
            return None
        _window_gate(n_mat, p, window)
        return vals[0], n_mat, k
    # ramified family: i is the valuation of det g since det w_E = -p
    det = g.det()
    if not det:
        return None
    i = val_p(det, p)
    j, r = divmod(i, 2)
    gp = g * Fraction(1, p) ** j
    if r == 0:
        if not (
            val_p(gp.entry(1, 0), p) >= 0
            and val_p(gp.entry(1, 1), p) == 0
        ):
            return None
        if (int_mod(gp.det(), p, 1) - int_mod(gp.entry(1, 1) ** 2, p, 1)) % p:
            return None
        x = gp.entry(0, 1) / gp.entry(1, 1)
        j0 = upper_unipotent({(0, 1): -x}, 2) * gp
    else:
        if not (
            val_p(gp.entry(1, 0), p) == 0
            and val_p(gp.entry(1, 1), p) >= 1
        ):
            return None
        if (int_mod(gp.det() / p, p, 1) + int_mod(gp.entry(1, 0) ** 2, p, 1)) % p:
            return None
        x = gp.entry(0, 0) / gp.entry(1, 0)
        winv = data.chain.uniformizer().inverse()
        j0 = winv * (upper_unipotent({(0, 1): -x}, 2) * gp)
    if not data.in_J(j0):
        return None
    n_mat = upper_unipotent({(0, 1): x}, 2)
    _window_gate(n_mat, p, window)
    return i, n_mat, j0


def _window_gate(n_mat: PadicMatrix, p: int, window: int | None) -> None:
    if window is None:
        return
    n = n_mat.n
    for i in range(n):
        for j in range(i + 1, n):
            e = n_mat.entry(i, j)
            if e and val_p(e, p) < -window:
                raise WindowExceeded(
                    f"N-part entry {e} has valuation below -{window}"
                )


# -- test vectors --------------------------------------------------------


class WhittakerFunction:
    """Explicit test vector in the psi_t (or psi_t^{-1}) Whittaker model.

    W(n * w_E^i * j_0) = psi_t(n)^{+-1} * A_eff^i * kernel(j_0) on the
    support N <w_E> J and 0 elsewhere.  `dual=True` selects the psi_t^{-1}
    model (finite kernel against the inverse additive character; ramified
    orientation must be -1).  An unramified twist by chi with chi(p) = c
    multiplies A by c^{n/e}.
    """

    def __init__(self, data: SimpleTypeData, *, dual: bool = False,
                 twist=None, scal=None):
        self.data = data
        self.dual = dual
        self.scal = scal or _DEFAULT_SCAL
        if data.family == RAMIFIED:
            want = -1 if dual else 1
            if data.orientation != want:
                raise NondegeneracyFailure(
                    f"the {'psi_t inverse' if dual else 'psi_t'} model needs "
                    f"orientation {want:+d}, type has {data.orientation:+d}"
                )
        self.twist = None if twist is None else _coerce_A(twist)
        self.A_eff = data.A if self.twist is None else data.A * self.twist**data.n_over_e
        self._A_eff_s = self.scal.embed_cyc(self.A_eff)
        self._sign = -1 if dual else 1

    def value(self, g: PadicMatrix, window: int | None = None):
        dec = support_decompose(self.data, g, window)
        if dec is None:
            return self.scal.zero()
        i, n_mat, j0 = dec
        psi = psi_t_eval(self.data, n_mat, self.scal, sign=self._sign)
        return psi * self._A_eff_s**i * self.data.kernel(j0, self.scal, dual=self.dual)


# -- dual pair detection and the Euler factor ----------------------------


def is_dual_pair(t1: SimpleTypeData, t2: SimpleTypeData) -> bool:
    """Whether the second type is an unramified twist of the dual of the first."""
    if t1.family != t2.family or t1.p != t2.p or t1.n != t2.n:
        raise FamilyMismatch(
            f"cannot compare {t1.family} GL_{t1.n}(Q_{t1.p}) test vectors with "
            f"{t2.family} GL_{t2.n}(Q_{t2.p})"
        )
    if t1.family == DEPTH_ZERO:
        mod = t1.q**t1.n - 1
        return any(
            (t2.theta.t + t1.theta.t * pow(t1.q, s, mod)) % mod == 0
            for s in range(t1.n)
        )
    return (t1.sigma.t + t2.sigma.t) % (t1.p - 1) == 0 and t1.orientation == -t2.orientation


def l_factor(t1: SimpleTypeData, t2: SimpleTypeData, twist=None, scal=None) -> EulerFactor:
    """Local Euler factor of the pair: 1/(1 - A_1 A_2_eff X^{n/e}) for a
    dual pair (up to unramified twist), and 1 otherwise."""
    scal = scal or _DEFAULT_SCAL
    if not is_dual_pair(t1, t2):
        return EulerFactor.one(scal)
    a2 = t2.A if twist is None else t2.A * _coerce_A(twist) ** t2.n_over_e
    coeff = scal.embed_cyc(t1.A * a2)
    d = t1.n_over_e
    poly = Laurent(scal, {0: scal.one(), d: scal.zero() - coeff})
    return EulerFactor(poly)
