"""Bounds on the Manin constant m(E) and on modular degrees.

Everything is reported on the m(E) scale: a bound b means p^-b divides the constant
c(E) = p^-m(E). The base curve is P^1, so the genus g is 0 throughout.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .curve import WeierstrassCurve, descend_fully, global_reduction, is_isotrivial
from .ff import DEFAULT_PRECISION, factor_int
from .funcfield import (CharacterError, DirichletCharacter, Place, dirichlet_lfunction,
                        places_of_degree)
from .lfun import EulerData, FeasibilityError, LPolynomial, lfunction, twisted_lfunction

GENUS = 0


@dataclass
class Witness:
    character: str
    contribution: Fraction
    l_q: Fraction
    v_q_epsilon_inverse: Fraction | None


@dataclass
class ManinBounds:
    lower: Fraction
    upper: Fraction
    witnesses: list
    ordinary: bool | None = None
    exact: int | None = None
    scan: str = "restricted scan"
    skipped: list = field(default_factory=list)

    def __post_init__(self):
        if self.lower > self.upper:
            raise ArithmeticError(f"lower bound {self.lower} exceeds upper bound {self.upper}")
        if self.exact is None and self.lower == self.upper and self.upper.denominator == 1:
            self.exact = int(self.upper)

    def to_json(self):
        out = {
            "lower": str(self.lower),
            "upper": str(self.upper),
            "ordinary": self.ordinary,
            "scan": self.scan,
            "skipped": self.skipped,
            "witnesses": [{"character": w.character, "contribution": str(w.contribution),
                           "l_q": str(w.l_q),
                           "v_q_epsilon_inverse": None if w.v_q_epsilon_inverse is None
                           else str(w.v_q_epsilon_inverse)}
                          for w in self.witnesses],
        }
        if self.exact is not None:
            out["exact"] = self.exact
        return out


def upper_thm13(E: WeierstrassCurve) -> Fraction:
    """d (deg Delta / 12 + g - 1)."""
    if is_isotrivial(E):
        raise ValueError("isotrivial curve")
    red = global_reduction(E)
    if red.deg_delta % 12:
        raise ArithmeticError("deg Delta is not divisible by 12")
    return E.d * (Fraction(red.deg_delta, 12) + GENUS - 1)


def epsilon_valuation(chi: DirichletCharacter, precision: int = DEFAULT_PRECISION) -> Fraction:
    """v_q of the leading coefficient of the completed Dirichlet L-function of chi."""
    L = dirichlet_lfunction(chi)
    val = L.epsilon.to_padic(chi.zeta_padic(precision)).valuation
    if val == math.inf:
        raise ArithmeticError("epsilon vanishes to the working precision")
    return Fraction(val, chi.F.k)


def character_contribution(E, chi: DirichletCharacter, data: EulerData | None = None,
                           mode: str = "completed", precision: int = DEFAULT_PRECISION) -> Witness:
    """d (l_q(L(sigma_E x alpha)) + g - 1 - v_q(epsilon(alpha^-1)))."""
    L = twisted_lfunction(E, chi, mode=mode, data=data)
    lq = L.l_q(precision)
    v = epsilon_valuation(chi.inverse(), precision)
    return Witness(chi.describe(), E.d * (lq + GENUS - 1 - v), lq, v)


def lower_prop45(E: WeierstrassCurve, characters=(), L: LPolynomial | None = None,
                 data: EulerData | None = None, mode: str = "completed",
                 precision: int = DEFAULT_PRECISION, skipped: list | None = None):
    """Max over the trivial character and the given ones; returns (bound, witnesses).

    Characters whose twisted L-function is out of reach are appended to `skipped` when a
    list is given, and raise otherwise.
    """
    data = data or EulerData(E)
    L = L or lfunction(E, "completed", data=data)
    lq = L.l_q(precision)
    witnesses = [Witness("trivial", E.d * lq, lq, None)]
    bad = {r.place for r in data.reduction.bad()}
    for chi in characters:
        if any(P in bad for P in chi.conductor_places()):
            raise CharacterError(f"conductor of {chi.describe()} meets the conductor of E")
        try:
            witnesses.append(character_contribution(E, chi, data, mode, precision))
        except FeasibilityError:
            if skipped is None:
                raise
            skipped.append(chi.describe())
    return max(w.contribution for w in witnesses), witnesses


def ordinary_check(E: WeierstrassCurve, L: LPolynomial, precision: int = DEFAULT_PRECISION) -> bool:
    """l_q(L(E, t)) = deg Delta / 12 + g - 1."""
    red = global_reduction(E)
    return L.l_q(precision) == Fraction(red.deg_delta, 12) + GENUS - 1


@dataclass
class PesentiSzpiro:
    descent_steps: int
    deg_delta: int
    deg_conductor: int
    bound: int
    holds: bool
    conductor_bound_raw: Fraction
    conductor_bound_integer: int

    def to_json(self):
        return {"descent_steps": self.descent_steps, "deg_delta": self.deg_delta,
                "deg_conductor": self.deg_conductor, "bound": self.bound, "holds": self.holds}

    def conductor_bound_json(self):
        return {"raw": str(self.conductor_bound_raw), "integer_bound": self.conductor_bound_integer}


def pesenti_szpiro_check(E: WeierstrassCurve) -> PesentiSzpiro:
    """deg Delta <= 6 (deg n + 2g - 2) after full Frobenius descent, and m <= d (deg n / 2 + 2g - 2)."""
    E2, steps = descend_fully(E)
    red = global_reduction(E2)
    bound = 6 * (red.deg_conductor + 2 * GENUS - 2)
    raw = E.d * (Fraction(red.deg_conductor, 2) + 2 * GENUS - 2)
    return PesentiSzpiro(steps, red.deg_delta, red.deg_conductor, bound,
                         red.deg_delta <= bound, raw, math.floor(raw))


@dataclass
class DegreeBoundReport:
    q: int
    g: int
    deg_infinity: int
    deg_m: int
    m_upper_used: int
    thm108_bound: int
    c_tilde_bound: int
    thm107_bound: int

    @property
    def thm108(self):
        return self.thm108_bound

    @property
    def thm107(self):
        return self.thm107_bound

    def to_json(self):
        return {"q": self.q, "g": self.g, "deg_infinity": self.deg_infinity, "deg_m": self.deg_m,
                "m_upper_used": self.m_upper_used, "thm108_bound": self.thm108_bound,
                "c_tilde_bound": self.c_tilde_bound, "thm107_bound": self.thm107_bound,
                "note": "formula evaluation only; no modular parametrisation is constructed"}


def degree_bounds(q: int, g: int, deg_infinity: int, deg_m: int, m_upper: int = 0) -> DegreeBoundReport:
    """Modular-degree bounds for a squarefree level of degree deg_m."""
    fac = factor_int(q)
    if len(fac) != 1:
        raise ValueError(f"{q} is not a prime power")
    if deg_m < 1:
        raise ValueError("deg_m must be positive")
    if g < 0 or deg_infinity < 1 or m_upper < 0:
        raise ValueError("need g >= 0, deg_infinity >= 1, m_upper >= 0")
    p = next(iter(fac))
    thm108 = q ** (18 * g + 4 * deg_infinity + 1) * q ** (2 * deg_m) * deg_m ** 3
    c_tilde = (q ** deg_infinity - 1) * p ** m_upper
    thm107 = c_tilde ** 2 * q ** (14 * g + deg_infinity + 5) * q ** deg_m * deg_m ** 3
    return DegreeBoundReport(q, g, deg_infinity, deg_m, m_upper, thm108, c_tilde, thm107)


def character_family(F, max_cond_deg: int, orders, avoid=(), limit: int | None = None,
                     seed: int | None = None):
    """Tame characters trivial on constants with squarefree conductor of degree <= max_cond_deg.

    Primes in `avoid` are excluded from the conductor. Each character is listed once, at its
    exact order, with z = 0. Enumeration order is deterministic.
    """
    from .poly import DEFAULT_SEED
    seed = DEFAULT_SEED if seed is None else seed
    avoid = set(avoid)
    primes = []
    for e in range(1, max_cond_deg + 1):
        primes.extend(P for P in places_of_degree(F, e) if P not in avoid)
    combos = []
    for size in range(1, max_cond_deg + 1):
        for combo in itertools.combinations(primes, size):
            if sum(P.degree for P in combo) <= max_cond_deg:
                combos.append(combo)
    combos.sort(key=lambda c: (sum(P.degree for P in c), len(c)))
    out = []
    for combo in combos:
        size = len(combo)
        mod = combo[0].poly(F)
        for P in combo[1:]:
            mod = mod * P.poly(F)
        for r in sorted(set(orders)):
            if (F.order - 1) % r:
                continue
            for exps in itertools.product(range(1, r), repeat=size):
                if math.gcd(r, *exps) != 1:
                    continue
                try:
                    chi = DirichletCharacter(F, mod, r, list(exps), 0, seed)
                except CharacterError:
                    continue
                out.append(chi)
                if limit is not None and len(out) >= limit:
                    return out
    return out


def manin_bounds(E: WeierstrassCurve, characters=(), L: LPolynomial | None = None,
                 data: EulerData | None = None, mode: str = "completed",
                 precision: int = DEFAULT_PRECISION) -> ManinBounds:
    data = data or EulerData(E)
    L = L or lfunction(E, "completed", data=data)
    skipped = []
    lower, wit = lower_prop45(E, characters, L, data, mode, precision, skipped)
    upper = upper_thm13(E)
    ordinary = ordinary_check(E, L, precision)
    exact = int(upper) if ordinary and upper.denominator == 1 else None
    return ManinBounds(lower, upper, wit, ordinary, exact, skipped=skipped)


def grid_csv(rows, columns) -> str:
    """CSV text for a list of dict rows."""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: str(v) if isinstance(v, Fraction) else v for k, v in r.items()})
    return buf.getvalue()
