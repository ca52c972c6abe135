import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ffmanin.ff import (FieldError, PadicRing, PrecisionError, build_field, embed, factor_int,
                        is_prime, multiplicative_order, quadratic_character, teichmuller)

FIELDS = [(5, 1), (7, 2), (13, 1), (5, 3), (11, 2)]


def test_is_prime_matches_sympy():
    import sympy
    for n in range(-3, 400):
        assert is_prime(n) == bool(sympy.isprime(n))


def test_factor_int():
    for n in (1, 2, 12, 360, 2 ** 10 * 3 ** 5, 999983 * 7):
        f = factor_int(n)
        prod = 1
        for p, e in f.items():
            assert is_prime(p)
            prod *= p ** e
        assert prod == n


def test_multiplicative_order():
    assert multiplicative_order(13, 12) == 1
    assert multiplicative_order(7, 12) == 2
    assert multiplicative_order(2, 7) == 3


@pytest.mark.parametrize("p,k", [(2, 1), (3, 2), (9, 1), (7, 0)])
def test_build_field_rejects(p, k):
    with pytest.raises((FieldError, ValueError)):
        build_field(p, k)


@pytest.mark.parametrize("p,k", FIELDS)
def test_generator_has_full_order(p, k):
    F = build_field(p, k)
    Q = F.order
    g = F.generator
    for ell in factor_int(Q - 1):
        assert F.pow(g, (Q - 1) // ell) != 1
    assert F.pow(g, Q - 1) == 1


@pytest.mark.parametrize("p,k", FIELDS)
def test_vectorised_matches_scalar(p, k):
    F = build_field(p, k)
    rng = np.random.default_rng(0)
    a = rng.integers(0, F.order, 200)
    b = rng.integers(1, F.order, 200)
    mv = F.mul_v(a, b)
    av = F.add_v(a, b)
    iv = F.inv_v(b)
    for x, y, m, s, i in zip(a.tolist(), b.tolist(), mv.tolist(), av.tolist(), iv.tolist()):
        assert F.mul(x, y) == m
        assert F.add(x, y) == s
        assert F.inv(y) == i
        assert F.mul(y, i) == 1


def test_prime_field_is_integers_mod_p():
    F = build_field(13, 1)
    for x in range(13):
        for y in range(13):
            assert F.mul(x, y) == x * y % 13
            assert F.add(x, y) == (x + y) % 13


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(FIELDS), st.integers(0, 10 ** 6), st.integers(0, 10 ** 6), st.integers(0, 10 ** 6))
def test_field_axioms(pk, i, j, k):
    F = build_field(*pk)
    x, y, z = i % F.order, j % F.order, k % F.order
    assert F.mul(x, F.add(y, z)) == F.add(F.mul(x, y), F.mul(x, z))
    assert F.mul(F.mul(x, y), z) == F.mul(x, F.mul(y, z))
    assert F.add(x, F.neg(x)) == 0
    assert F.frobenius(F.add(x, y)) == F.add(F.frobenius(x), F.frobenius(y))


def test_quadratic_character_counts():
    for p, k in FIELDS:
        F = build_field(p, k)
        vals = [quadratic_character(F, x) for x in range(1, F.order)]
        assert vals.count(1) == vals.count(-1) == (F.order - 1) // 2
        assert quadratic_character(F, 0) == 0


@pytest.mark.parametrize("src,dst", [((7, 1), (7, 4)), ((7, 2), (7, 4)), ((13, 1), (13, 5)), ((5, 2), (5, 6))])
def test_embedding_is_a_ring_homomorphism(src, dst):
    S, T = build_field(*src), build_field(*dst)
    f = embed(S, T)
    rng = np.random.default_rng(1)
    for x, y in rng.integers(0, S.order, (50, 2)).tolist():
        assert f(S.mul(x, y)) == T.mul(f(x), f(y))
        assert f(S.add(x, y)) == T.add(f(x), f(y))
        assert f.preimage(f(x)) == x
    assert f(1) == 1


def test_subfield_mask_size():
    T = build_field(7, 4)
    assert int(T.subfield_mask(2).sum()) == 49
    assert int(T.subfield_mask(1).sum()) == 7


@pytest.mark.parametrize("p,k", [(7, 1), (13, 1), (5, 2)])
def test_teichmuller_lift(p, k):
    F = build_field(p, k)
    R = PadicRing(F, 20)
    for x in (1, 2, F.generator, F.order - 1):
        z = teichmuller(F, x, 20, R)
        assert z.residue() == x
        assert z ** (F.order - 1) == R.one()


def test_padic_valuation_and_inverse():
    F = build_field(7, 2)
    R = PadicRing(F, 10)
    a = R.element([3, 5])
    assert a.valuation == 0
    assert a * a.inverse() == R.one()
    b = a * 49
    assert b.valuation == 2
    assert R.zero().valuation == float("inf")
    with pytest.raises(PrecisionError):
        R.zero().v_q(1)
