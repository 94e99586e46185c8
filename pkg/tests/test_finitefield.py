import random

import pytest

from rsexact.cyclo import CycNumber, cyc_embed_root
from rsexact.finitefield import (
    AddChar,
    MultChar,
    abs_trace,
    embed_element,
    gf,
    rel_norm,
    rel_trace,
)


def test_standard_defining_polynomials():
    assert gf(2, 2).poly == (1, 1, 1)  # x^2+x+1
    assert gf(3, 2).poly == (1, 0, 1)  # x^2+1
    assert gf(2, 3).poly == (1, 0, 1, 1)  # x^3+x^2+1 is the first hit in scan order


def test_rejects_bad_parameters():
    with pytest.raises(ValueError):
        gf(4, 1)
    with pytest.raises(ValueError):
        gf(2, 0)
    with pytest.raises(ValueError):
        gf(2, 2, poly=(1, 0, 1))  # x^2+1 = (x+1)^2 over F_2


def test_enumeration_and_hashing():
    F9 = gf(3, 2)
    elems = list(F9)
    assert len(elems) == 9
    assert len(set(elems)) == 9
    assert sum(1 for _ in F9.units()) == 8


@pytest.mark.parametrize("p,d", [(2, 1), (3, 1), (5, 1), (2, 2), (3, 2), (2, 3), (5, 2)])
def test_field_axioms(p, d):
    F = gf(p, d)
    rng = random.Random(p * 100 + d)
    elems = list(F)
    for _ in range(60):
        a, b, c = (rng.choice(elems) for _ in range(3))
        assert a * (b + c) == a * b + a * c
        assert (a + b) + c == a + (b + c)
        assert a * b == b * a
        assert a + F.zero() == a
        assert a * F.one() == a
    for x in F.units():
        assert x * x.inverse() == F.one()
        assert x ** (F.order - 1) == F.one()


def test_frobenius_is_additive():
    F = gf(3, 2)
    for a in F:
        for b in F:
            assert (a + b) ** 3 == a**3 + b**3


def test_generator_and_dlog():
    F = gf(3, 2)
    g = F.generator()
    seen = set()
    x = F.one()
    for k in range(8):
        assert F.dlog(x) == k
        seen.add(x)
        x = x * g
    assert len(seen) == 8
    with pytest.raises(ZeroDivisionError):
        F.dlog(F.zero())


def test_generator_f5():
    # smallest primitive root mod 5 is 2
    F = gf(5)
    assert F.generator() == F.constant(2)


def test_embedding_is_ring_hom():
    F3 = gf(3)
    F9 = gf(3, 2)
    for a in F3:
        for b in F3:
            assert embed_element(a + b, F9) == embed_element(a, F9) + embed_element(b, F9)
            assert embed_element(a * b, F9) == embed_element(a, F9) * embed_element(b, F9)
    assert embed_element(F3.one(), F9) == F9.one()


def test_trace_and_norm_known_values():
    F2 = gf(2)
    F4 = gf(2, 2)
    w = F4.gen()  # w^2 + w + 1 = 0
    assert abs_trace(w) == 1
    assert abs_trace(F4.one()) == 0
    assert rel_trace(w, F2) == F2.one()
    assert rel_norm(w, F2) == F2.one()  # w * w^2 = w^3 = 1
    F3 = gf(3)
    F9 = gf(3, 2)
    for x in F3:
        y = embed_element(x, F9)
        assert rel_trace(y, F3) == x + x
        assert rel_norm(y, F3) == x * x


def test_trace_surjective_and_balanced():
    # each fiber of Tr: F_9 -> F_3 has size 3
    F3 = gf(3)
    F9 = gf(3, 2)
    from collections import Counter

    counts = Counter(rel_trace(x, F3) for x in F9)
    assert all(v == 3 for v in counts.values())
    assert len(counts) == 3


def test_mult_char_is_multiplicative():
    F9 = gf(3, 2)
    theta = MultChar(F9, 3)
    units = list(F9.units())
    for x in units:
        for y in units:
            assert theta(x * y) == theta(x) * theta(y)
    assert theta(F9.one()) == 1


def test_mult_char_orthogonality():
    F9 = gf(3, 2)
    for t in range(8):
        theta = MultChar(F9, t)
        total = sum((theta(x) for x in F9.units()), CycNumber.zero())
        if t == 0:
            assert total == 8
        else:
            assert total.is_zero()


def test_mult_char_regularity():
    F4 = gf(2, 2)
    assert MultChar(F4, 1).is_regular()
    assert MultChar(F4, 2).is_regular()
    assert not MultChar(F4, 0).is_regular()
    F9 = gf(3, 2)
    regular = [t for t in range(8) if MultChar(F9, t).is_regular()]
    assert regular == [1, 2, 3, 5, 6, 7]
    F8 = gf(2, 3)
    regular8 = [t for t in range(7) if MultChar(F8, t).is_regular()]
    assert regular8 == [1, 2, 3, 4, 5, 6]


def test_mult_char_inverse_and_values():
    F4 = gf(2, 2)
    theta = MultChar(F4, 1)
    g = F4.generator()
    assert theta(g) == cyc_embed_root(3, 1)
    inv = theta.inverse()
    for x in F4.units():
        assert theta(x) * inv(x) == 1


def test_add_char_is_additive():
    F9 = gf(3, 2)
    psi = AddChar(F9, 1)
    for x in F9:
        for y in F9:
            assert psi(x + y) == psi(x) * psi(y)


def test_add_char_values_and_orthogonality():
    F3 = gf(3)
    psi = AddChar(F3, 1)
    assert psi(F3.one()) == cyc_embed_root(3, 1)
    assert psi(F3.constant(2)) == cyc_embed_root(3, 2)
    for a in range(3):
        chi = AddChar(F3, a)
        total = sum((chi(x) for x in F3), CycNumber.zero())
        if a == 0:
            assert total == 3
        else:
            assert total.is_zero()
    psi9 = AddChar(gf(3, 2), 1)
    total = sum((psi9(x) for x in gf(3, 2)), CycNumber.zero())
    assert total.is_zero()


def test_add_char_inverse():
    F5 = gf(5)
    psi = AddChar(F5, 2)
    inv = psi.inverse()
    for x in F5:
        assert psi(x) * inv(x) == 1
    assert AddChar(F5, 0).is_trivial()
    assert not psi.is_trivial()
