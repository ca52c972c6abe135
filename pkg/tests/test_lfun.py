import os
from fractions import Fraction

import numpy as np
import pytest

from ffmanin.curve import WeierstrassCurve, global_reduction, quadratic_twist, trace_of_frobenius
from ffmanin.cyclo import Cyclo
from ffmanin.ff import build_field
from ffmanin.funcfield import Divisor, Place, parse_character
from ffmanin.jacobi import ulmer_curve
from ffmanin.lfun import (EulerCache, EulerData, FeasibilityError, LFunctionError, expected_degree,
                          fourier_coefficient, g_factor, lfunction, log_derivative_check,
                          twisted_lfunction)
from ffmanin.poly import parse_poly

F5 = build_field(5, 1)
F7 = build_field(7, 1)

# curves over F_5 and F_7 with conductor degree at most 8
SMALL_CURVES = [
    (5, "1;0;0;0;-T^4"), (5, "1;0;0;0;-T^6"), (5, "0;0;0;T^2+1;T"), (5, "0;0;0;T+1;T^3"),
    (5, "0;0;0;T;T^2+1"), (7, "1;0;0;0;-T^5"), (7, "1;0;0;0;-T^6"), (7, "0;0;0;T^2+1;T"),
    (7, "0;0;0;T^2;T^3+1"), (7, "0;1;0;T;1"),
]


def curve(p, s):
    return WeierstrassCurve.from_string(build_field(p, 1), s)


def test_known_polynomials():
    assert lfunction(ulmer_curve(F7, 6), "full").coefficients == [1, -7, -49, 343]
    assert lfunction(ulmer_curve(F5, 4), "full").coefficients == [1, 5, -25, -125]
    assert lfunction(ulmer_curve(F7, 5), "full").coefficients == [1, 0, 0, 0, -2401]


@pytest.mark.parametrize("p,s", SMALL_CURVES)
def test_degree_and_riemann_hypothesis(p, s):
    E = curve(p, s)
    L = lfunction(E, "full")
    assert L.degree == global_reduction(E).deg_conductor - 4
    assert L.coefficients[0] == 1
    if L.degree:
        inv_roots = 1 / np.roots(np.array(L.coefficients[::-1], dtype=float))
        assert np.allclose(np.abs(inv_roots), p, rtol=1e-6)


@pytest.mark.parametrize("p,s", SMALL_CURVES)
def test_full_and_completed_agree(p, s):
    E = curve(p, s)
    data = EulerData(E)
    full = lfunction(E, "full", data=data)
    comp = lfunction(E, "completed", data=data)
    assert full.coefficients == comp.coefficients
    assert comp.sign in (1, -1)
    assert comp.counted_through() >= -(-comp.degree // 2)


def test_functional_equation_symmetry():
    E = ulmer_curve(F7, 6)
    L = lfunction(E, "full")
    b, q, D = L.coefficients, 7, L.degree
    for k in range(D + 1):
        assert b[D - k] == L.sign * q ** (D - 2 * k) * b[k]


@pytest.mark.parametrize("p,s", SMALL_CURVES[:6])
def test_log_derivative_matches_fiber_sums(p, s):
    E = curve(p, s)
    for k in (1, 2):
        assert log_derivative_check(E, k) == 0


def test_log_derivative_detects_perturbation():
    E = ulmer_curve(F7, 6)
    assert log_derivative_check(E, 1, perturb={(1, 2): 1}) != 0


@pytest.mark.parametrize("p,s,mod", [(5, "1;0;0;0;-T^4", "T^2+2"), (5, "1;0;0;0;-T^4", "T^2+T+1"),
                                     (7, "0;1;0;T;1", "T^2+T+3")])
def test_twist_by_quadratic_character_equals_twisted_curve(p, s, mod):
    F = build_field(p, 1)
    E = curve(p, s)
    chi = parse_character(F, f"mod={mod};order=2")
    Lt = twisted_lfunction(E, chi)
    Lq = lfunction(quadratic_twist(E, parse_poly(F, mod)), "full")
    assert [c.as_int() for c in Lt.coefficients] == Lq.coefficients
    assert Lt.degree == expected_degree(EulerData(E), chi)


def test_twist_rejects_conductor_meeting_bad_places():
    E = ulmer_curve(F7, 6)
    chi = parse_character(F7, "mod=T^2+T;order=2;exps=1,1")
    with pytest.raises(LFunctionError):
        twisted_lfunction(E, chi)


def test_full_mode_beyond_tables_is_refused():
    F13 = build_field(13, 1)
    with pytest.raises(FeasibilityError):
        lfunction(ulmer_curve(F13, 12), "full")


def test_cache_round_trip(tmp_path):
    path = str(tmp_path / "traces.cache")
    E = ulmer_curve(F7, 6)
    cache = EulerCache(path, 7, 1)
    cold = lfunction(E, "full", cache=cache)
    cache.save()
    assert os.path.exists(path) and len(cache) > 0
    warm_cache = EulerCache(path, 7, 1)
    assert len(warm_cache) == len(cache)
    warm = lfunction(E, "full", cache=warm_cache)
    assert warm.coefficients == cold.coefficients
    with open(path) as fh:
        assert fh.readline().startswith("# ffmanin-cache p=7 d=1")


def test_cache_rejects_conflicts_and_foreign_headers(tmp_path):
    path = str(tmp_path / "traces.cache")
    cache = EulerCache(path, 7, 1)
    cache.put("fp", "1:1", 1, 3)
    cache.put("fp", "1:1", 1, 3)
    with pytest.raises(ValueError):
        cache.put("fp", "1:1", 1, 4)
    cache.save()
    with pytest.raises(ValueError):
        EulerCache(path, 5, 1)
    with open(path, "a") as fh:
        fh.write("fp,1:1,1,5\n")
    with pytest.raises(ValueError):
        EulerCache(path, 7, 1)


def test_fourier_coefficients():
    E = ulmer_curve(F7, 6)
    assert fourier_coefficient(E, Divisor()) == 1
    x = Place.finite(parse_poly(F7, "T+2"))
    a = trace_of_frobenius(E, x)
    assert fourier_coefficient(E, Divisor({x: 1})) == Fraction(a, 7)
    assert fourier_coefficient(E, Divisor({x: 2})) == Fraction(a * a - 7, 49)
    assert fourier_coefficient(E, Divisor({x: -1})) == 0


def test_g_factor_single_place():
    E = ulmer_curve(F7, 6)
    x = Place.finite(parse_poly(F7, "T+2"))
    a = trace_of_frobenius(E, x)
    g = g_factor(E, None, Divisor({x: 1}))
    assert g == [Cyclo.from_int(1, -1), Cyclo.from_int(1, a), Cyclo.from_int(1, -1)]
    y = Place.finite(parse_poly(F7, "T^2+1"))
    g2 = g_factor(E, None, Divisor({x: 1, y: 1}))
    assert len(g2) == 2 * 3 + 1
    assert g2[0] == Cyclo.from_int(1, 1)
    with pytest.raises(ValueError):
        g_factor(E, None, Divisor({Place.finite(parse_poly(F7, "T")): 1}))


def test_lpolynomial_json_shape():
    L = lfunction(ulmer_curve(F7, 6), "full")
    js = L.to_json()
    assert js["degree"] == 3
    assert js["coefficients"] == ["1", "-7", "-49", "343"]
    assert js["l_q"] == "0"
    assert set(js) >= {"sign", "provenance", "slopes", "cyclotomic_order"}
