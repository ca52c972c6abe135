"""Elliptic curves over F_q(T), p >= 5: invariants, local reduction, Frobenius descent.

Local reduction works on the short model y^2 = x^3 - 27 c4 x - 54 c6, which is
isomorphic to the long model when p >= 5. Kodaira types come from the table of
(v(c4), v(c6), v(Delta)) valuations of a minimal model.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .ff import FieldTable, build_field
from .funcfield import Divisor, Place, extension
from .poly import (DEFAULT_SEED, ParseError, Poly, RatFunc, coeff_pth_root, factor,
                   parse_ratfunc, poly_pth_root, poly_roots, poly_xgcd, squarefree_decomposition)

INF = float("inf")


class SingularCurveError(ValueError):
    pass


class UnsupportedCharacteristicError(ValueError):
    pass


class DescentError(ValueError):
    pass


@dataclass(frozen=True)
class CurveInvariants:
    b2: RatFunc
    b4: RatFunc
    b6: RatFunc
    b8: RatFunc
    c4: RatFunc
    c6: RatFunc
    delta: RatFunc
    j: RatFunc


class WeierstrassCurve:
    """y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 with a_i in F_q(T)."""

    def __init__(self, F: FieldTable, a1, a2, a3, a4, a6):
        if F.p < 5:
            raise UnsupportedCharacteristicError("characteristic 2 and 3 are not supported")
        self.F = F
        self.a = tuple(self._coerce(x) for x in (a1, a2, a3, a4, a6))
        inv = compute_invariants(F, *self.a)
        if inv.delta.is_zero():
            raise SingularCurveError("discriminant vanishes")
        self._inv = inv

    def _coerce(self, x):
        if isinstance(x, RatFunc):
            return x
        if isinstance(x, Poly):
            return RatFunc(x)
        if isinstance(x, str):
            return parse_ratfunc(self.F, x)
        return RatFunc.const(self.F, int(x) % self.F.p)

    @classmethod
    def from_string(cls, F: FieldTable, text: str) -> "WeierstrassCurve":
        parts = text.split(";")
        if len(parts) != 5:
            raise ParseError("curve needs five entries 'a1;a2;a3;a4;a6'")
        return cls(F, *[parse_ratfunc(F, s) if s.strip() else RatFunc.const(F, 0) for s in parts])

    @classmethod
    def short(cls, F, a4, a6):
        return cls(F, 0, 0, 0, a4, a6)

    @classmethod
    def from_c4c6(cls, F, c4: RatFunc, c6: RatFunc):
        return cls(F, 0, 0, 0, c4 * (-27), c6 * (-54))

    @property
    def p(self):
        return self.F.p

    @property
    def d(self):
        return self.F.k

    @property
    def q(self):
        return self.F.order

    def invariants(self) -> CurveInvariants:
        return self._inv

    @property
    def c4(self):
        return self._inv.c4

    @property
    def c6(self):
        return self._inv.c6

    @property
    def discriminant(self):
        return self._inv.delta

    @property
    def j(self):
        return self._inv.j

    def spec_string(self) -> str:
        return ";".join(str(x) for x in self.a)

    def fingerprint(self) -> str:
        text = f"p={self.F.p};d={self.F.k};mod={self.F.modulus};" + self.spec_string()
        return hashlib.sha256(text.encode()).hexdigest()[:16]

    def __repr__(self):
        return f"WeierstrassCurve(F_{self.q}: {self.spec_string()})"


def compute_invariants(F, a1, a2, a3, a4, a6) -> CurveInvariants:
    b2 = a1 * a1 + a2 * 4
    b4 = a4 * 2 + a1 * a3
    b6 = a3 * a3 + a6 * 4
    b8 = a1 * a1 * a6 + a2 * a6 * 4 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    c4 = b2 * b2 - b4 * 24
    c6 = -(b2 * b2 * b2) + b2 * b4 * 36 - b6 * 216
    delta = -(b2 * b2 * b8) - b4 * b4 * b4 * 8 - b6 * b6 * 27 + b2 * b4 * b6 * 9
    j = c4 * c4 * c4 / delta if not delta.is_zero() else RatFunc.const(F, 0)
    return CurveInvariants(b2, b4, b6, b8, c4, c6, delta, j)


def invariants(E: WeierstrassCurve) -> CurveInvariants:
    return E.invariants()


# --- local reduction ---------------------------------------------------------------------

@dataclass(frozen=True)
class LocalReduction:
    place: Place
    kodaira: str
    split: bool | None
    v_c4: float
    v_c6: float
    v_delta: int
    v_delta_min: int
    conductor_exponent: int
    minimalizing_scale: int

    @property
    def is_good(self):
        return self.conductor_exponent == 0

    @property
    def is_multiplicative(self):
        return self.conductor_exponent == 1

    @property
    def is_additive(self):
        return self.conductor_exponent == 2

    @property
    def reduction(self) -> str:
        if self.is_good:
            return "good"
        if self.is_multiplicative:
            return "split" if self.split else "nonsplit"
        return "additive"

    @property
    def bad_trace(self) -> int:
        """Trace of Frobenius on the local factor at a bad place."""
        if self.is_multiplicative:
            return 1 if self.split else -1
        if self.is_additive:
            return 0
        raise ValueError("good place")


_ADDITIVE_BY_VDELTA = {2: "II", 3: "III", 4: "IV", 6: "I0*", 8: "IV*", 9: "III*", 10: "II*"}


def classify(v4, v6, vd) -> tuple[str, int, int]:
    """(kodaira, v_delta_min, scale) from valuations of c4, c6, Delta at one place."""
    s4 = v4 // 4 if v4 != INF else INF
    s6 = v6 // 6 if v6 != INF else INF
    s = int(min(s4, s6))
    v4m = v4 - 4 * s if v4 != INF else INF
    v6m = v6 - 6 * s if v6 != INF else INF
    vdm = vd - 12 * s
    if vdm == 0:
        return "I0", 0, s
    if v4m == 0:
        return f"I{vdm}", vdm, s
    if vdm > 6 and v4m == 2 and v6m == 3:
        return f"I{vdm - 6}*", vdm, s
    if vdm in _ADDITIVE_BY_VDELTA:
        return _ADDITIVE_BY_VDELTA[vdm], vdm, s
    raise ArithmeticError(f"valuations ({v4}, {v6}, {vd}) do not match a tame Kodaira type")


def _local_data(E: WeierstrassCurve, place: Place):
    """(c4, c6, Delta, uniformiser) in the local variable of the place."""
    F = E.F
    inv = E.invariants()
    if place.is_infinity:
        return (inv.c4.at_infinity(), inv.c6.at_infinity(), inv.delta.at_infinity(),
                Poly.T(F))
    return inv.c4, inv.c6, inv.delta, place.poly(F)


def is_square_mod(f: RatFunc, pi: Poly) -> bool:
    """Euler's criterion for the residue of f in F_q[T]/(pi); f must be a unit at pi."""
    F = pi.F
    g, s, _ = poly_xgcd(f.den % pi, pi)
    if not g.is_one():
        raise ZeroDivisionError("pole at the place")
    r = (f.num * s) % pi
    if r.is_zero():
        raise ValueError("residue is zero")
    Q = F.order ** pi.degree
    return r.powmod((Q - 1) // 2, pi).is_one()


def _eval_in(K, emb, f: RatFunc, theta):
    num = 0
    for a in reversed(f.num.c):
        num = K.add(K.mul(num, theta), emb(a))
    den = 0
    for a in reversed(f.den.c):
        den = K.add(K.mul(den, theta), emb(a))
    if den == 0:
        raise ZeroDivisionError("pole at the evaluation point")
    return K.div(num, den)


def local_reduction(E: WeierstrassCurve, x: Place) -> LocalReduction:
    if E.F.p < 5:
        raise UnsupportedCharacteristicError("p < 5")
    c4, c6, dl, pi = _local_data(E, x)
    v4 = c4.valuation_at(pi)
    v6 = c6.valuation_at(pi)
    vd = dl.valuation_at(pi)
    kod, vdm, s = classify(v4, v6, vd)
    multiplicative = kod[0] == "I" and kod[1:].isdigit()
    cond = 0 if vdm == 0 else (1 if multiplicative else 2)
    split = None
    if cond == 1:
        split = is_square_mod(-(c6 * RatFunc(pi) ** (-6 * s)), pi)
    return LocalReduction(x, kod, split, v4, v6, vd, vdm, cond, s)


def reduction_at_infinity(E: WeierstrassCurve) -> LocalReduction:
    return local_reduction(E, Place.infinity())


def minimal_model_at(E: WeierstrassCurve, x: Place):
    """(c4, c6) of a model integral and minimal at x, in the local variable of x."""
    c4, c6, dl, pi = _local_data(E, x)
    _, _, s = classify(c4.valuation_at(pi), c6.valuation_at(pi), dl.valuation_at(pi))
    u = RatFunc(pi)
    return c4 * u ** (-4 * s), c6 * u ** (-6 * s)


def special_places(E: WeierstrassCurve, seed: int = DEFAULT_SEED):
    """Finite places where the given model might fail to be a good integral model."""
    inv = E.invariants()
    polys = [inv.delta.num, inv.delta.den, inv.c4.den, inv.c6.den]
    out = set()
    for f in polys:
        if f.degree >= 1:
            for g, _ in factor(f, seed):
                out.add(Place.finite(g))
    return sorted(out)


@dataclass
class GlobalReduction:
    local: list
    delta_divisor: Divisor
    conductor: Divisor

    @property
    def deg_delta(self):
        return self.delta_divisor.degree

    @property
    def deg_conductor(self):
        return self.conductor.degree

    def bad(self):
        return [r for r in self.local if not r.is_good]

    def at(self, x: Place):
        for r in self.local:
            if r.place == x:
                return r
        return None


def global_reduction(E: WeierstrassCurve, seed: int = DEFAULT_SEED) -> GlobalReduction:
    reds = [local_reduction(E, x) for x in special_places(E, seed)]
    reds.append(reduction_at_infinity(E))
    delta = Divisor({r.place: r.v_delta_min for r in reds})
    cond = Divisor({r.place: r.conductor_exponent for r in reds})
    if delta.degree % 12:
        raise ArithmeticError(f"degree of the minimal discriminant {delta.degree} is not divisible by 12")
    return GlobalReduction(reds, delta, cond)


# --- isotriviality, p-th powers, Frobenius descent ------------------------------------------

def is_isotrivial(E: WeierstrassCurve) -> bool:
    return E.j.is_constant()


def is_pth_power(f: RatFunc) -> bool:
    p = f.F.p
    return all(i % p == 0 for g in (f.num, f.den) for i, a in enumerate(g.c) if a)


def pth_root(f: RatFunc) -> RatFunc:
    if not is_pth_power(f):
        raise DescentError("not a p-th power")
    return RatFunc(poly_pth_root(f.num), poly_pth_root(f.den))


def is_jth_power_of_frobenius(E: WeierstrassCurve) -> bool:
    """True when j(E) lies in F_q(T)^p."""
    return is_pth_power(E.j)


def frobenius_twist_ratfunc(f: RatFunc) -> RatFunc:
    F = f.F
    p = F.p

    def tw(g: Poly):
        c = [0] * (p * g.degree + 1) if g.c else []
        for i, a in enumerate(g.c):
            c[p * i] = F.pow(a, p)
        return Poly(F, c)

    return RatFunc(tw(f.num), tw(f.den))


def frobenius_twist(E: WeierstrassCurve) -> WeierstrassCurve:
    return WeierstrassCurve(E.F, *[frobenius_twist_ratfunc(a) for a in E.a])


def quadratic_twist(E: WeierstrassCurve, d) -> WeierstrassCurve:
    d = E._coerce(d)
    return WeierstrassCurve.from_c4c6(E.F, E.c4 * d * d, E.c6 * d * d * d)


def is_square_ratfunc(f: RatFunc) -> bool:
    if f.is_zero():
        return True
    F = f.F
    g = f.num * f.den
    lead = g.lead
    if F.pow(lead, (F.order - 1) // 2) != 1:
        return False
    return all(e % 2 == 0 for _, e in squarefree_decomposition(g))


def twist_class(E1: WeierstrassCurve, E2: WeierstrassCurve) -> RatFunc:
    """d with E2 isomorphic to the quadratic twist of E1 by d (requires j equal, j != 0, 1728)."""
    if E1.j != E2.j:
        raise ValueError("curves have different j-invariants")
    return (E2.c6 * E1.c4) / (E1.c6 * E2.c4)


def is_isomorphic(E1: WeierstrassCurve, E2: WeierstrassCurve) -> bool:
    if E1.F != E2.F or E1.j != E2.j:
        return False
    j = E1.j
    if j.is_zero() or j == 1728:
        raise ValueError("isomorphism test needs j != 0, 1728")
    return is_square_ratfunc(twist_class(E1, E2))


def j_line_curve(F: FieldTable, lam: RatFunc) -> WeierstrassCurve:
    """y^2 + xy = x^3 - 36/(lam - 1728) x - 1/(lam - 1728), which has j = lam."""
    w = (lam - 1728).inverse()
    return WeierstrassCurve(F, 1, 0, 0, w * (-36), -w)


def frobenius_descent(E: WeierstrassCurve) -> WeierstrassCurve:
    """E' with frobenius_twist(E') isomorphic to E, when j(E) is a p-th power."""
    j = E.j
    if j.is_zero() or j == 1728:
        raise DescentError("descent needs j != 0, 1728")
    if not is_pth_power(j):
        raise DescentError("j is not a p-th power")
    lam = pth_root(j)
    base = j_line_curve(E.F, lam)
    d = twist_class(frobenius_twist(base), E)
    out = quadratic_twist(base, d)
    if not is_isomorphic(frobenius_twist(out), E):
        raise ArithmeticError("descended curve fails the isomorphism check")
    return out


def descend_fully(E: WeierstrassCurve, max_steps: int = 64):
    if is_isotrivial(E):
        raise DescentError("isotrivial curve")
    steps = 0
    while is_jth_power_of_frobenius(E):
        if steps >= max_steps:
            raise DescentError("descent did not terminate")
        E = frobenius_descent(E)
        steps += 1
    return E, steps


# --- traces of Frobenius --------------------------------------------------------------------------

def short_coefficients(c4, c6):
    return c4 * (-27), c6 * (-54)


def trace_direct(K: FieldTable, A: int, B: int) -> int:
    """a = -sum_x chi(x^3 + A x + B) over the field K."""
    x = K.elements()
    x2 = K.mul_v(x, x)
    f = K.add_v(K.mul_v(K.add_v(x2, A), x), B)
    return -int(K.qchar_v(f).sum())


def trace_of_frobenius(E: WeierstrassCurve, x: Place, over_degree: int = 1) -> int:
    """q_x^n + 1 - #E(k_x^(n)) at a place of good reduction, by direct character sum."""
    red = local_reduction(E, x)
    if not red.is_good:
        raise ValueError(f"bad reduction at {x!r}")
    c4, c6 = minimal_model_at(E, x)
    pi = Poly.T(E.F) if x.is_infinity else x.poly(E.F)
    K, emb = extension(E.F, pi.degree * over_degree)
    theta = poly_roots(K, [emb(a) for a in pi.c])[0]
    A = K.mul(K.neg(27 % K.p), _eval_in(K, emb, c4, theta))
    B = K.mul(K.neg(54 % K.p), _eval_in(K, emb, c6, theta))
    return trace_direct(K, A, B)


def count_points_long(K: FieldTable, a) -> int:
    """#E(K) for a long Weierstrass model with coefficients in K, by exhaustive search."""
    a1, a2, a3, a4, a6 = a
    xs = K.elements()
    total = 1
    for y in range(K.order):
        lhs = K.add_v(K.mul_v(K.add_v(K.mul_v(xs, a1), a3), y), K.mul(y, y))
        x2 = K.mul_v(xs, xs)
        rhs = K.add_v(K.add_v(K.add_v(K.mul_v(x2, xs), K.mul_v(x2, a2)), K.mul_v(xs, a4)), a6)
        total += int((lhs == rhs).sum())
    return total
