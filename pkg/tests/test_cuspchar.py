import itertools
import random
from fractions import Fraction

import pytest

from rsexact.cyclo import CycNumber, cyc_embed_root
from rsexact.cuspchar import (
    bessel_convolution_check,
    character_invariants,
    cuspidal_character,
    finite_bessel,
    mirabolic_convolution,
    psi_of_unipotent,
)
from rsexact.errors import NotRegular
from rsexact.finitefield import AddChar, MultChar, gf
from rsexact.matgroups import FiniteMatrix, enumerate_group, enumerate_unitriangular


# ---------------------------------------------------------------------------
# independent oracles
# ---------------------------------------------------------------------------


def _perm_sign(perm):
    seen = set()
    sign = 1
    for a in perm:
        if a in seen:
            continue
        length = 0
        x = a
        while x not in seen:
            seen.add(x)
            x = perm[x]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _s3_sign(g):
    """Sign of g in GL_2(F_2) = S_3 acting on the three nonzero row vectors."""
    F = g.field
    vecs = [v for v in itertools.product(list(F), repeat=2) if any(v)]
    perm = {}
    for v in vecs:
        w = (
            v[0] * g.rows[0][0] + v[1] * g.rows[1][0],
            v[0] * g.rows[0][1] + v[1] * g.rows[1][1],
        )
        perm[v] = w
    return _perm_sign(perm)


def _borel_restriction_pairing(chi, ts):
    """<Res_B chi, theta_ts>_B computed by direct summation over B.

    By Frobenius reciprocity this is the multiplicity of chi in the
    principal series induced from the torus character with exponents ts;
    cuspidality is the vanishing of all of these.
    """
    F = chi.base_field
    n = chi.n
    q = F.order
    pos = [(i, j) for i in range(n) for j in range(n) if i < j]
    total = CycNumber.zero()
    count = 0
    units = list(F.units())
    for diag in itertools.product(units, repeat=n):
        tval = CycNumber.one()
        for t, d in zip(ts, diag):
            if q > 2:
                tval = tval * cyc_embed_root(q - 1, t * F.dlog(d))
        for upper in itertools.product(list(F), repeat=len(pos)):
            rows = [[diag[i] if i == j else F.zero() for j in range(n)] for i in range(n)]
            for (i, j), v in zip(pos, upper):
                rows[i][j] = v
            b = FiniteMatrix(F, rows)
            total = total + chi(b) * tval.conj(-1)
            count += 1
    return total * Fraction(1, count)


# ---------------------------------------------------------------------------
# GL_2(F_2): the cuspidal character is the sign character of S_3
# ---------------------------------------------------------------------------


def test_q2_character_is_s3_sign():
    chi = cuspidal_character(MultChar(gf(2, 2), 1))
    for g in enumerate_group(gf(2), 2):
        assert chi(g) == _s3_sign(g)


def test_q2_bessel_is_s3_sign():
    chi = cuspidal_character(MultChar(gf(2, 2), 1))
    J = finite_bessel(chi, AddChar(gf(2), 1))
    for g in enumerate_group(gf(2), 2):
        assert J(g) == _s3_sign(g)


# ---------------------------------------------------------------------------
# structural certification of the value tables
# ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "q,n,t",
    [(2, 2, 1), (3, 2, 1), (3, 2, 5), (5, 2, 1), (2, 3, 1), (3, 3, 1)],
)
def test_character_invariant_suite(q, n, t):
    chi = cuspidal_character(MultChar(gf(q, n), t))
    results = character_invariants(chi)
    assert results == {k: True for k in results}


@pytest.mark.parametrize(
    "q,n,t", [(2, 2, 1), (3, 2, 1), (3, 2, 2), (2, 3, 1), (3, 3, 1), (3, 3, 2)]
)
def test_cuspidality_against_principal_series(q, n, t):
    chi = cuspidal_character(MultChar(gf(q, n), t))
    for ts in itertools.product(range(q - 1), repeat=n):
        assert _borel_restriction_pairing(chi, ts).is_zero()


def test_distinct_orbits_are_orthogonal():
    F9 = gf(3, 2)
    chi1 = cuspidal_character(MultChar(F9, 1))
    chi2 = cuspidal_character(MultChar(F9, 2))
    G = enumerate_group(gf(3), 2)
    total = CycNumber.zero()
    for g in G:
        total = total + chi1(g) * chi2(g.inverse())
    assert total.is_zero()
    # same orbit: t=3 is the Frobenius translate of t=1
    chi3 = cuspidal_character(MultChar(F9, 3))
    total = CycNumber.zero()
    for g in G:
        total = total + chi1(g) * chi3(g.inverse())
    assert total == len(G)


def test_regularity_gate():
    with pytest.raises(NotRegular):
        cuspidal_character(MultChar(gf(2, 2), 0))
    with pytest.raises(NotRegular):
        cuspidal_character(MultChar(gf(3, 2), 4))
    with pytest.raises(NotRegular):
        cuspidal_character(MultChar(gf(2, 3), 0))


def test_dual_character_is_inverse_composed():
    for q, n in ((2, 2), (3, 2), (2, 3)):
        chi = cuspidal_character(MultChar(gf(q, n), 1))
        chid = chi.dual()
        for g in enumerate_group(gf(q), n):
            assert chid(g) == chi(g.inverse())


def test_degree_values():
    assert cuspidal_character(MultChar(gf(3, 2), 1)).degree_value() == 2
    assert cuspidal_character(MultChar(gf(5, 2), 1)).degree_value() == 4
    assert cuspidal_character(MultChar(gf(3, 3), 1)).degree_value() == 16
    assert cuspidal_character(MultChar(gf(2, 3), 1)).degree_value() == 3


# ---------------------------------------------------------------------------
# Bessel functions
# ---------------------------------------------------------------------------


def test_bessel_at_identity_unrolled():
    # independent unrolled computation of J(1) at q=3:
    # J(1) = (1/3)(chi(1) + zeta3^{-1} chi(u(1)) + zeta3^{-2} chi(u(2)))
    #      = (1/3)(2 - zeta3^2 - zeta3) = 1
    F3 = gf(3)
    chi = cuspidal_character(MultChar(gf(3, 2), 1))
    u1 = FiniteMatrix(F3, [[1, 1], [0, 1]])
    u2 = FiniteMatrix(F3, [[1, 2], [0, 1]])
    eye = FiniteMatrix.identity(F3, 2)
    by_hand = (
        chi(eye)
        + cyc_embed_root(3, -1) * chi(u1)
        + cyc_embed_root(3, -2) * chi(u2)
    ) * Fraction(1, 3)
    assert by_hand == 1
    J = finite_bessel(chi, AddChar(F3, 1))
    assert J(eye) == 1


@pytest.mark.parametrize("q,n", [(2, 2), (3, 2), (5, 2), (2, 3)])
def test_bessel_identity_value(q, n):
    chi = cuspidal_character(MultChar(gf(q, n), 1))
    J = finite_bessel(chi, AddChar(gf(q), 1))
    assert J(FiniteMatrix.identity(gf(q), n)) == 1


def test_bessel_equivariance():
    F3 = gf(3)
    chi = cuspidal_character(MultChar(gf(3, 2), 1))
    psi = AddChar(F3, 1)
    J = finite_bessel(chi, psi)
    G = enumerate_group(F3, 2)
    N = enumerate_unitriangular(F3, 2)
    rng = random.Random(17)
    for _ in range(6):
        g = rng.choice(G)
        for u in N:
            for v in N:
                lhs = J(u * g * v)
                rhs = psi_of_unipotent(psi, u) * psi_of_unipotent(psi, v) * J(g)
                assert lhs == rhs


def test_bessel_equivariance_n3():
    F2 = gf(2)
    chi = cuspidal_character(MultChar(gf(2, 3), 1))
    psi = AddChar(F2, 1)
    J = finite_bessel(chi, psi)
    G = enumerate_group(F2, 3)
    N = enumerate_unitriangular(F2, 3)
    rng = random.Random(18)
    for _ in range(3):
        g = rng.choice(G)
        for u in N:
            assert J(u * g) == psi_of_unipotent(psi, u) * J(g)
            assert J(g * u) == J(g) * psi_of_unipotent(psi, u)


def test_convolution_exhaustive_q2():
    chi = cuspidal_character(MultChar(gf(2, 2), 1))
    J = finite_bessel(chi, AddChar(gf(2), 1))
    G = enumerate_group(gf(2), 2)
    for g1 in G:
        for g2 in G:
            assert bessel_convolution_check(J, J, g1, g2)


def test_convolution_random_q3_q5():
    for q, trials in ((3, 60), (5, 25)):
        chi = cuspidal_character(MultChar(gf(q, 2), 1))
        J = finite_bessel(chi, AddChar(gf(q), 1))
        G = enumerate_group(gf(q), 2)
        rng = random.Random(q)
        for _ in range(trials):
            g1, g2 = rng.choice(G), rng.choice(G)
            assert bessel_convolution_check(J, J, g1, g2)


def test_convolution_n3():
    chi = cuspidal_character(MultChar(gf(2, 3), 1))
    J = finite_bessel(chi, AddChar(gf(2), 1))
    G = enumerate_group(gf(2), 3)
    rng = random.Random(19)
    for _ in range(10):
        g1, g2 = rng.choice(G), rng.choice(G)
        assert bessel_convolution_check(J, J, g1, g2)


def test_dual_kernel_identity():
    # the kernel built from (dual character, inverse psi) is J1 of the inverse
    for q in (2, 3):
        chi = cuspidal_character(MultChar(gf(q, 2), 1))
        psi = AddChar(gf(q), 1)
        J1 = finite_bessel(chi, psi)
        J2 = finite_bessel(chi.dual(), psi.inverse())
        for g in enumerate_group(gf(q), 2):
            assert J2(g) == J1(g.inverse())


def test_unit_sum_of_dual_pair_is_one():
    # sum over a in F_q^x of J1(d(a)k) J2(d(a)k) == 1 for every k in GL_2(F_q)
    # (convolution identity + dual-kernel identity; the depth-zero engine's b_0)
    F3 = gf(3)
    chi = cuspidal_character(MultChar(gf(3, 2), 1))
    psi = AddChar(F3, 1)
    J1 = finite_bessel(chi, psi)
    J2 = finite_bessel(chi.dual(), psi.inverse())
    for k in enumerate_group(F3, 2):
        total = CycNumber.zero()
        for a in F3.units():
            d = FiniteMatrix(F3, [[a, 0], [0, 1]])
            total = total + J1(d * k) * J2(d * k)
        assert total == 1


def test_mirabolic_convolution_matches_direct_sum():
    # for n=2 the coset representatives are the diagonal d(a); unrolled check
    F3 = gf(3)
    chi = cuspidal_character(MultChar(gf(3, 2), 1))
    J = finite_bessel(chi, AddChar(F3, 1))
    G = enumerate_group(F3, 2)
    rng = random.Random(21)
    for _ in range(10):
        g1, g2 = rng.choice(G), rng.choice(G)
        direct = CycNumber.zero()
        for a in F3.units():
            d = FiniteMatrix(F3, [[a, 0], [0, 1]])
            direct = direct + J(g1 * d.inverse()) * J(d * g2)
        assert direct == mirabolic_convolution(J, J, g1, g2)


def test_bessel_requires_matching_nontrivial_psi():
    chi = cuspidal_character(MultChar(gf(3, 2), 1))
    with pytest.raises(ValueError):
        finite_bessel(chi, AddChar(gf(3), 0))
    with pytest.raises(ValueError):
        finite_bessel(chi, AddChar(gf(5), 1))
