"""Jacobi sums attached to the Fermat-surface quotient behind y^2 + xy = x^3 - T^n.

Characters of (mu_n)^4 with trivial product are vectors a in (Z/n)^4 with sum 0; the
relevant ones are the multiples of a fixed generator with every entry nonzero. Their
p-adic valuations come from Stickelberger's digit-sum formula, and an independent
route sums the characters directly over F_Q as exact cyclotomic integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .curve import WeierstrassCurve, global_reduction
from .cyclo import Cyclo
from .ff import DEFAULT_PRECISION, PrecisionError, build_field, is_prime, teichmuller
from .padic import l_q_of_slopes

# Spans the same subgroup of (Z/n)^4 as (3, -6, 2, 1); with this sign k = 1 is the
# orbit of valuation 0.
GENERATOR = (-3, 6, -2, -1)
DIRECT_SUM_LIMIT = 10 ** 5


class JacobiError(ValueError):
    pass


def digit_sum(k: int, p: int) -> int:
    s = 0
    while k:
        k, r = divmod(k, p)
        s += r
    return s


def stickelberger_valuation(p: int, k: int, m: int) -> Fraction:
    """v_p of the Gauss sum g(omega^-k) over F_{p^m}: s(k) / (p - 1)."""
    if not 1 <= k <= p ** m - 2:
        raise ValueError(f"k = {k} outside [1, p^m - 2]")
    return Fraction(digit_sum(k, p), p - 1)


@dataclass(frozen=True)
class CharVec:
    n: int
    a: tuple

    def __post_init__(self):
        if len(self.a) != 4:
            raise ValueError("character vectors have four entries")
        object.__setattr__(self, "a", tuple(x % self.n for x in self.a))
        if sum(self.a) % self.n:
            raise ValueError(f"{self.a} does not sum to 0 mod {self.n}")

    def scale(self, c: int) -> "CharVec":
        return CharVec(self.n, tuple(c * x for x in self.a))

    @property
    def is_zero(self):
        return not any(self.a)

    @property
    def in_support(self):
        """a = 0 or every entry nonzero."""
        return self.is_zero or all(self.a)


@dataclass(frozen=True)
class OrbitRep:
    k: int
    rep: CharVec
    u: int


def generator_multiple(n: int, k: int) -> CharVec:
    return CharVec(n, tuple(k * g for g in GENERATOR))


def orbit_list(n: int, q: int) -> list:
    """Orbits of multiplication by q on the admissible multiples k * GENERATOR."""
    if math.gcd(n, q) != 1:
        raise JacobiError(f"gcd(n, q) = gcd({n}, {q}) != 1")
    seen = set()
    out = []
    for k in range(n):
        if k in seen:
            continue
        v = generator_multiple(n, k)
        if not v.in_support:
            continue
        orbit = [k]
        j = (k * q) % n
        while j != k:
            orbit.append(j)
            j = (j * q) % n
        seen.update(orbit)
        out.append(OrbitRep(min(orbit), generator_multiple(n, min(orbit)), len(orbit)))
    return sorted(out, key=lambda o: o.k)


def exponents(orbit: OrbitRep, p: int, d: int):
    """k_i with chi_i = omega^(-k_i) on F_Q, Q = q^u, reduced to [0, Q - 2]."""
    Q = p ** (d * orbit.u)
    n = orbit.rep.n
    out = []
    for ai in orbit.rep.a:
        if ((Q - 1) * ai) % n:
            raise JacobiError("character is not defined over F_Q")
        out.append((-(Q - 1) * ai // n) % (Q - 1))
    return out


def jacobi_valuation(orbit: OrbitRep, p: int, d: int) -> Fraction:
    """v_p(J(a)) over F_{q^u} by Stickelberger: sum s(k_i)/(p - 1) - m, m = d u."""
    m = d * orbit.u
    if orbit.rep.is_zero:
        return Fraction(d)  # J(0) = q
    if not orbit.rep.in_support:
        raise JacobiError(f"{orbit.rep.a} has a zero entry")
    return sum((stickelberger_valuation(p, k, m) for k in exponents(orbit, p, d)),
               Fraction(0)) - m


def _char_order(orbit: OrbitRep, Q: int):
    """Common order M of the chi_i and their exponents relative to zeta_M."""
    es = [((Q - 1) * ai // orbit.rep.n) % (Q - 1) for ai in orbit.rep.a]
    g = math.gcd(Q - 1, *es)
    M = (Q - 1) // g
    return M, [e // g for e in es]


def _jacobi_pair(logs, log1m, b1, b2, M) -> Cyclo:
    """sum over x != 0, 1 of zeta_M^(b1 log x + b2 log(1 - x))."""
    idx = (b1 * logs + b2 * log1m) % M
    return Cyclo(M, np.bincount(idx, minlength=M).tolist())


def jacobi_cyclotomic(orbit: OrbitRep, p: int, d: int) -> tuple:
    """J(a) exactly in Z[zeta_M], returned as (value, M)."""
    Q = p ** (d * orbit.u)
    if orbit.rep.is_zero:
        return Cyclo(1, [p ** d]), 1
    if Q > DIRECT_SUM_LIMIT:
        raise JacobiError(f"direct summation over F_{Q} is too large")
    K = build_field(p, d * orbit.u)
    M, b = _char_order(orbit, Q)
    xs = np.arange(2, Q, dtype=np.int64) if K.k == 1 else np.setdiff1d(K.elements(), [0, 1])
    logs = K.log_v(xs)
    log1m = K.log_v(K.sub_v(np.ones_like(xs), xs))
    half = (Q - 1) // 2  # log of -1

    def sign(bi):
        # chi_i(-1) as a power of zeta_M
        return Cyclo.zeta_power(M, bi * half)

    if (b[0] + b[1]) % M == 0:
        return sign(b[0]) * sign(b[2]) * Q, M
    j1 = _jacobi_pair(logs, log1m, b[0], b[1], M)
    j2 = _jacobi_pair(logs, log1m, (b[0] + b[1]) % M, b[2], M)
    return j1 * j2 * sign(b[3]), M


def jacobi_exact(orbit: OrbitRep, p: int, d: int, precision: int = DEFAULT_PRECISION):
    """J(a) as a p-adic number in W(F_Q) via the Teichmuller character."""
    Q = p ** (d * orbit.u)
    K = build_field(p, d * orbit.u)
    value, M = jacobi_cyclotomic(orbit, p, d)
    zeta = teichmuller(K, K.pow(K.generator, (Q - 1) // M), precision)
    out = value.to_padic(zeta)
    if out.is_zero():
        raise PrecisionError("Jacobi sum vanishes to the working precision")
    return out


def inverse_pair_check(p: int, k: int, n: int, d: int = 1) -> bool:
    """J(chi, chi^-1) = -chi(-1) for chi = omega^(k (Q - 1) / n) on F_Q, Q = p^d."""
    Q = p ** d
    if (Q - 1) % n:
        raise JacobiError("n must divide Q - 1")
    K = build_field(p, d)
    M = n // math.gcd(n, k)
    b = (k * ((Q - 1) // n)) // ((Q - 1) // M)
    xs = np.setdiff1d(K.elements(), [0, 1])
    val = _jacobi_pair(K.log_v(xs), K.log_v(K.sub_v(np.ones_like(xs), xs)), b, -b, M)
    return val == -Cyclo.zeta_power(M, b * (Q - 1) // 2)


@dataclass
class JacobiValue:
    orbit: OrbitRep
    valuation: Fraction
    padic: object = None

    @property
    def v_q(self):
        return self.valuation


@dataclass
class H2Data:
    p: int
    d: int
    n: int
    values: list

    @property
    def degree(self):
        return sum(v.orbit.u for v in self.values)

    def slopes(self):
        out = []
        for v in self.values:
            s = v.valuation / (self.d * v.orbit.u)
            out.extend([s] * v.orbit.u)
        return sorted(out)

    def l_q(self):
        return l_q_of_slopes(self.slopes())

    def is_symmetric(self):
        s = self.slopes()
        return s == sorted(2 - x for x in s)

    def rows(self):
        return [{"k": v.orbit.k, "u": v.orbit.u, "a": list(v.orbit.rep.a),
                 "valuation": str(v.valuation / self.d)} for v in self.values]


def h2_polynomial(p: int, d: int, n: int, exact: bool = False,
                  precision: int = DEFAULT_PRECISION) -> H2Data:
    """Orbit data of prod (1 - J(a) t^u(a)) with Stickelberger valuations.

    With exact=True each orbit is also summed directly and the two valuations must agree.
    """
    if not is_prime(p):
        raise JacobiError(f"{p} is not prime")
    q = p ** d
    vals = []
    for orb in orbit_list(n, q):
        v = jacobi_valuation(orb, p, d)
        if not 0 <= v <= 2 * d * orb.u:
            raise ArithmeticError(f"valuation {v} outside the weight-2 range")
        pad = None
        if exact:
            pad = jacobi_exact(orb, p, d, precision)
            if Fraction(pad.valuation) != v:
                raise ArithmeticError(f"orbit k={orb.k}: direct v_p {pad.valuation} != {v}")
        vals.append(JacobiValue(orb, v, pad))
    H = H2Data(p, d, n, vals)
    if not H.is_symmetric():
        raise ArithmeticError("slope multiset is not symmetric about 1")
    return H


def ulmer_curve(F, n: int) -> WeierstrassCurve:
    """y^2 + x y = x^3 - T^n."""
    return WeierstrassCurve.from_string(F, f"1;0;0;0;-T^{n}")


@dataclass
class UlmerReport:
    p: int
    d: int
    n: int
    deg_delta: int
    deg_conductor: int
    h2: H2Data
    upper_bound: Fraction
    lower_bound: Fraction
    manin_exact: int | None
    checks: dict = field(default_factory=dict)

    def to_json(self):
        out = {
            "p": self.p, "d": self.d, "n": self.n,
            "deg_delta": self.deg_delta, "deg_conductor": self.deg_conductor,
            "orbits": [{"k": r["k"], "u": r["u"], "valuation": r["valuation"]}
                       for r in self.h2.rows()],
            "slopes": [str(s) for s in self.h2.slopes()],
            "l_q": str(self.h2.l_q()),
            "upper_bound": str(self.upper_bound),
            "lower_bound": str(self.lower_bound),
            "checks": self.checks,
        }
        if self.manin_exact is not None:
            out["manin_exact"] = self.manin_exact
        return out


def ulmer_report(p: int, d: int, n: int) -> UlmerReport:
    """Reduction data, H^2 slopes and Manin-constant bounds for y^2 + xy = x^3 - T^n."""
    if p < 5 or n % p == 0:
        raise JacobiError("need p >= 5 and p not dividing n")
    F = build_field(p, d)
    E = ulmer_curve(F, n)
    red = global_reduction(E)
    q = p ** d
    H = h2_polynomial(p, d, n)
    upper = d * (Fraction(red.deg_delta, 12) - 1)
    lower = d * H.l_q()
    checks = {
        "deg_delta_is_12_ceil_n_over_6": red.deg_delta == 12 * -(-n // 6),
        "deg_conductor_is_n_plus_1": red.deg_conductor == n + 1,
        "lower_le_upper": lower <= upper,
    }
    if lower > upper:
        raise ArithmeticError(f"lower bound {lower} exceeds upper bound {upper}")
    exact = None
    if (q - 1) % n == 0 and n % 6 == 0 and lower == upper and upper.denominator == 1:
        exact = int(upper)
    return UlmerReport(p, d, n, red.deg_delta, red.deg_conductor, H, upper, lower, exact, checks)
