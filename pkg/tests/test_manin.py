from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ffmanin.curve import WeierstrassCurve, global_reduction
from ffmanin.ff import build_field
from ffmanin.funcfield import parse_character
from ffmanin.jacobi import ulmer_curve
from ffmanin.lfun import EulerData, lfunction
from ffmanin.manin import (ManinBounds, Witness, character_family, degree_bounds, grid_csv,
                           lower_prop45, manin_bounds, ordinary_check, pesenti_szpiro_check,
                           upper_thm13)

F5 = build_field(5, 1)
F7 = build_field(7, 1)
F13 = build_field(13, 1)

CORPUS = [
    (5, "1;0;0;0;-T^4"), (5, "1;0;0;0;-T^6"), (5, "0;0;0;T^2+1;T"), (5, "0;0;0;T+1;T^3"),
    (7, "1;0;0;0;-T^5"), (7, "1;0;0;0;-T^6"), (7, "0;0;0;T^2;T^3+1"), (7, "0;1;0;T;1"),
]


def curve(p, s):
    return WeierstrassCurve.from_string(build_field(p, 1), s)


def test_ulmer_6_over_7_is_exact_zero():
    E = ulmer_curve(F7, 6)
    B = manin_bounds(E)
    assert B.lower == 0 and B.upper == 0
    assert B.exact == 0
    assert B.ordinary


def test_upper_bound_values():
    assert upper_thm13(ulmer_curve(F13, 12)) == 1
    assert upper_thm13(ulmer_curve(F7, 6)) == 0
    assert upper_thm13(ulmer_curve(build_field(5, 2), 6)) == 0


@pytest.mark.parametrize("p,s", CORPUS)
def test_lower_never_exceeds_upper(p, s):
    E = curve(p, s)
    data = EulerData(E)
    bad = [r.place for r in data.reduction.bad()]
    chars = character_family(E.F, 2, [2], avoid=bad, limit=4)
    lower, wit = lower_prop45(E, chars, data=data, skipped=[])
    assert lower <= upper_thm13(E)
    assert wit[0].character == "trivial"


def test_adding_characters_never_lowers_the_bound():
    E = ulmer_curve(F5, 4)
    data = EulerData(E)
    bad = [r.place for r in data.reduction.bad()]
    chars = character_family(F5, 2, [2], avoid=bad, limit=3)
    prev = None
    for i in range(len(chars) + 1):
        lower, _ = lower_prop45(E, chars[:i], data=data)
        if prev is not None:
            assert lower >= prev
        prev = lower


def test_quadratic_twist_witness_pinches():
    # trivial character alone gives 0, a quadratic twist reaches the upper bound
    E = WeierstrassCurve.from_string(F5, "1;0;0;0;-T^9")
    data = EulerData(E)
    bad = [r.place for r in data.reduction.bad()]
    chars = character_family(F5, 2, [2], avoid=bad)
    B = manin_bounds(E, chars, data=data)
    assert B.witnesses[0].contribution == 0
    assert B.lower == B.upper == 1
    assert B.exact == 1


def test_ordinary_forces_exactness():
    for p, s in CORPUS:
        E = curve(p, s)
        L = lfunction(E, "full")
        if ordinary_check(E, L):
            B = manin_bounds(E, L=L)
            assert B.exact == int(upper_thm13(E))


def test_bounds_object_rejects_inverted_interval():
    with pytest.raises(ArithmeticError):
        ManinBounds(Fraction(2), Fraction(1), [])
    B = ManinBounds(Fraction(1), Fraction(1), [Witness("trivial", Fraction(1), Fraction(1), None)])
    assert B.exact == 1
    assert B.to_json()["exact"] == 1


def test_pesenti_szpiro_values():
    r = pesenti_szpiro_check(ulmer_curve(F13, 12))
    assert r.deg_delta == 24 and r.bound == 66 and r.holds
    assert r.conductor_bound_raw == Fraction(9, 2) and r.conductor_bound_integer == 4
    r = pesenti_szpiro_check(ulmer_curve(F7, 6))
    assert r.deg_delta == 12 and r.bound == 30 and r.holds


@pytest.mark.parametrize("p,s", CORPUS)
def test_pesenti_szpiro_on_corpus(p, s):
    assert pesenti_szpiro_check(curve(p, s)).holds


def test_degree_bound_formula():
    r = degree_bounds(2, 0, 1, 5)
    assert r.thm108 == 4_096_000
    assert r.c_tilde_bound == 1
    assert r.thm107 == 256_000
    assert "formula evaluation only" in r.to_json()["note"]
    with pytest.raises(ValueError):
        degree_bounds(6, 0, 1, 5)
    with pytest.raises(ValueError):
        degree_bounds(2, 0, 1, 0)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([2, 3, 4, 5, 7, 9]), st.integers(0, 3), st.integers(1, 3),
       st.integers(1, 8), st.integers(0, 3))
def test_degree_bounds_monotone(q, g, dinf, dm, mu):
    base = degree_bounds(q, g, dinf, dm, mu)
    assert degree_bounds(q, g + 1, dinf, dm, mu).thm108 > base.thm108
    assert degree_bounds(q, g, dinf + 1, dm, mu).thm108 > base.thm108
    assert degree_bounds(q, g, dinf, dm + 1, mu).thm108 > base.thm108
    assert degree_bounds(q, g, dinf, dm, mu + 1).thm107 >= base.thm107
    assert degree_bounds(q, g, dinf, dm + 1, mu).thm107 >= base.thm107


def test_character_family_is_deterministic_and_exact_order():
    a = character_family(F7, 2, [2, 3, 6], limit=30)
    b = character_family(F7, 2, [2, 3, 6], limit=30)
    assert [c.describe() for c in a] == [c.describe() for c in b]
    assert len({c.describe() for c in a}) == len(a)
    degs = [c.conductor_degree for c in a]
    assert degs == sorted(degs)


def test_character_family_avoids_places():
    E = ulmer_curve(F7, 6)
    bad = {r.place for r in global_reduction(E).bad()}
    for chi in character_family(F7, 2, [2], avoid=bad):
        assert not bad & set(chi.conductor_places())


def test_explicit_character_contribution():
    E = ulmer_curve(F5, 4)
    chi = parse_character(F5, "mod=T^2+2;order=2")
    lower, wit = lower_prop45(E, [chi])
    assert len(wit) == 2
    w = wit[1]
    assert w.contribution == E.d * (w.l_q - 1 - w.v_q_epsilon_inverse)


def test_grid_csv():
    text = grid_csv([{"p": 5, "n": 3, "l_q": Fraction(1, 2)}], ["p", "n", "l_q"])
    assert text.splitlines() == ["p,n,l_q", "5,3,1/2"]
