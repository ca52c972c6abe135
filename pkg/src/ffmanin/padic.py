"""Newton polygons, the slope defect l_q, and evaluation at eps/q for roots of unity eps.

Valuations are normalised by v_q(q) = 1 and kept as exact Fractions.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .ff import (DEFAULT_PRECISION, FieldTable, PadicRing, PadicScalar,
                 PrecisionError, build_field, is_prime, multiplicative_order)


def vp_int(n: int, p: int) -> int | float:
    if n == 0:
        return math.inf
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _coeff_vp(c, p):
    if isinstance(c, PadicScalar):
        return c.valuation
    return vp_int(int(c), p)


def _is_zero(c):
    if isinstance(c, PadicScalar):
        return c.is_zero()
    return c == 0


class ValuedPoly:
    """P(t) = sum b_i t^i with integer or p-adic coefficients, q = p^d."""

    def __init__(self, coeffs, p: int, d: int = 1):
        c = list(coeffs)
        while c and _is_zero(c[-1]):
            c.pop()
        self.coeffs = c
        self.p = p
        self.d = d

    @property
    def q(self):
        return self.p ** self.d

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    def v_q(self, i) -> Fraction | float:
        v = _coeff_vp(self.coeffs[i], self.p)
        return v if v == math.inf else Fraction(v, self.d)

    def rotate(self, zeta):
        """Coefficients b_i * zeta^i, i.e. P(zeta t)."""
        out, z = [], 1
        for b in self.coeffs:
            out.append(b * z)
            z = z * zeta
        return ValuedPoly(out, self.p, self.d)

    def __repr__(self):
        return f"ValuedPoly({self.coeffs}, p={self.p}, d={self.d})"


@dataclass(frozen=True)
class NewtonPolygon:
    segments: tuple  # ((slope, multiplicity), ...) ascending
    prefactor_valuation: Fraction
    t_power: int

    def slopes(self):
        out = []
        for s, m in self.segments:
            out.extend([s] * m)
        return out

    @property
    def degree(self):
        return self.t_power + sum(m for _, m in self.segments)

    def is_symmetric(self, centre=1) -> bool:
        s = sorted(self.slopes())
        return s == sorted(2 * centre - x for x in s)


def newton_polygon(P: ValuedPoly) -> NewtonPolygon:
    if P.is_zero():
        raise ValueError("Newton polygon of the zero polynomial")
    k = next(i for i, b in enumerate(P.coeffs) if not _is_zero(b))
    pts = []
    for i in range(k, P.degree + 1):
        v = P.v_q(i)
        if v != math.inf:
            pts.append((i - k, v))
    v0 = pts[0][1]
    if v0 == math.inf:
        raise PrecisionError("lowest coefficient vanishes to working precision")
    hull = [pts[0]]
    for pt in pts[1:]:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop the middle point if it lies on or above the chord
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    segs = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        s = Fraction(y2 - y1) / (x2 - x1)
        if segs and segs[-1][0] == s:
            segs[-1] = (s, segs[-1][1] + x2 - x1)
        else:
            segs.append((s, x2 - x1))
    return NewtonPolygon(tuple(segs), Fraction(v0), k)


def l_q_of_slopes(slopes) -> Fraction:
    return sum(((1 - Fraction(s)) for s in slopes if s <= 1), Fraction(0))


def l_q(P: ValuedPoly) -> Fraction:
    return l_q_of_slopes(newton_polygon(P).slopes())


def min_valuation_formula(P: ValuedPoly) -> Fraction:
    """v_q(a) - k - l_q(P) for P = a t^k prod(1 - lambda_i t)."""
    NP = newton_polygon(P)
    return NP.prefactor_valuation - NP.t_power - l_q_of_slopes(NP.slopes())


# --- roots of unity in unramified rings ---------------------------------------

def _root_of_unity_residue(F: FieldTable, m: int, seed: int = 1) -> int:
    """An element of exact order m in F (m | |F^*|) without factoring |F^*|."""
    n = F.order - 1
    if n % m:
        raise ValueError("m does not divide the group order")
    if m == 1:
        return 1
    primes = [ell for ell in range(2, m + 1) if m % ell == 0 and is_prime(ell)]
    rng = random.Random(seed)
    while True:
        x = rng.randrange(1, F.order)
        y = F.pow(x, n // m)
        if all(F.pow(y, m // ell) != 1 for ell in primes):
            return y


def lift_root_of_unity(ring: PadicRing, x: int, m: int) -> PadicScalar:
    """Teichmuller lift of x, where x^m = 1 in the residue field and p does not divide m."""
    F = ring.field
    z = ring.element(F.to_vec(x))
    prec = 1
    while prec < ring.N:
        w = z ** (m - 1)
        z = z - (w * z - 1) * (w * m).inverse()
        prec *= 2
    return z


def lift_embedding(src: PadicRing, dst: PadicRing) -> "callable":
    """Ring map src -> dst lifting the residue embedding (Hensel on the modulus)."""
    from .ff import embed
    if src.e == 1:
        return lambda a: dst.from_int(a.coeffs[0])
    e = embed(src.field, dst.field)
    f = src.modulus
    rho = dst.element(dst.field.to_vec(e.root))

    def fval(x):
        acc = dst.zero()
        for c in reversed(f):
            acc = acc * x + c
        return acc

    def dval(x):
        acc = dst.zero()
        for i in range(len(f) - 1, 0, -1):
            acc = acc * x + i * f[i]
        return acc

    prec = 1
    while prec < dst.N:
        rho = rho - fval(rho) * dval(rho).inverse()
        prec *= 2
    powers = [dst.one()]
    for _ in range(1, src.e):
        powers.append(powers[-1] * rho)

    def apply(a: PadicScalar) -> PadicScalar:
        acc = dst.zero()
        for c, pw in zip(a.coeffs, powers):
            if c:
                acc = acc + pw * c
        return acc

    return apply


def eval_at_root_of_unity(P: ValuedPoly, m: int, precision: int = DEFAULT_PRECISION):
    """[(j, v_q(P(zeta_m^j / q)))] over the primitive m-th roots zeta_m^j."""
    p, d = P.p, P.d
    if math.gcd(m, p) != 1:
        raise ValueError("m must be prime to p")
    if P.is_zero():
        raise ValueError("zero polynomial")
    src = None
    for c in P.coeffs:
        if isinstance(c, PadicScalar):
            src = c.ring
            break
    r = multiplicative_order(p, m)
    ext = r if src is None else r * src.e // math.gcd(r, src.e)
    E = build_field(p, ext)
    D = P.degree
    # integral evaluation of q^D P(eps/q) needs at least d*D extra digits
    N = precision + d * D
    limit = N if src is None else min(N, src.N)
    ring = PadicRing(E, N)
    if src is not None:
        conv = lift_embedding(PadicRing(src.field, N), ring)
        coeffs = [conv(_retarget(c, src.field, N)) if isinstance(c, PadicScalar)
                  else ring.from_int(int(c)) for c in P.coeffs]
    else:
        coeffs = [ring.from_int(int(c)) for c in P.coeffs]
    zeta = lift_root_of_unity(ring, _root_of_unity_residue(E, m), m)
    q = p ** d
    out = []
    for j in range(m):
        if math.gcd(j, m) != 1 and m > 1:
            continue
        eps = zeta ** j
        acc = ring.zero()
        for i in range(D, -1, -1):
            acc = acc * eps + coeffs[i] * q ** (D - i)
        v = acc.valuation
        if v == math.inf or v >= limit:
            raise PrecisionError(f"all {limit} tracked digits vanish at m={m}, j={j}")
        out.append((j, Fraction(v, d) - D))
        if m == 1:
            break
    return out


def _retarget(c: PadicScalar, F, N):
    ring = PadicRing(F, N)
    return PadicScalar(ring, tuple(x % ring.mod for x in c.coeffs))


def sampling_orders(p: int, count: int = 10):
    out = [1]
    ell = 2
    while len(out) < count:
        if is_prime(ell) and ell != p:
            out.append(ell)
        ell += 1
    return out


@dataclass
class Lemma42Result:
    formula: Fraction
    observed_min: Fraction | None
    attained: bool
    attained_at: int | None
    samples: list = field(default_factory=list)  # (m, j, valuation)
    exact_zeros: list = field(default_factory=list)  # orders m where P(zeta_m / q) = 0


def _vanishes_exactly(P: ValuedPoly, m: int) -> bool:
    """For integer coefficients: q^D P(z / q) is divisible by the m-th cyclotomic polynomial."""
    from .cyclo import Cyclo
    if any(isinstance(c, PadicScalar) for c in P.coeffs):
        return False
    D = P.degree
    q = P.p ** P.d
    return Cyclo(m, [int(c) * q ** (D - i) for i, c in enumerate(P.coeffs[: D + 1])]).is_zero()


def sample_min_valuation(P: ValuedPoly, max_orders: int = 10,
                         precision: int = DEFAULT_PRECISION, max_precision: int = 256,
                         raise_on_failure: bool = False) -> Lemma42Result:
    """Run the sampling schedule m = 1, 2, 3, 5, ... until the predicted minimum appears."""
    target = min_valuation_formula(P)
    best = None
    samples = []
    zeros = []
    for m in sampling_orders(P.p, max_orders):
        if _vanishes_exactly(P, m):
            zeros.append(m)
            continue
        N = precision
        while True:
            try:
                vals = eval_at_root_of_unity(P, m, N)
                break
            except PrecisionError:
                N *= 2
                if N > max_precision:
                    raise
        for j, v in vals:
            samples.append((m, j, v))
            if v < target:
                raise ArithmeticError(f"valuation {v} below the predicted minimum {target}")
            best = v if best is None else min(best, v)
        if best == target:
            return Lemma42Result(target, best, True, m, samples, zeros)
    if raise_on_failure:
        raise ArithmeticError("minimum not attained within the sampling schedule")
    return Lemma42Result(target, best, False, None, samples, zeros)
