"""Places and divisors of the projective line over F_q, and tame Dirichlet characters.

A character is given by a squarefree monic modulus c = c_1 ... c_s, an order r
dividing q - 1, exponents e_i and an unramified twist z at infinity. Its value
on y in F_q[T]/c_i is zeta_r^(e_i * log N(y)), where N is the norm from the
residue field of c_i down to F_q, logs are taken to the fixed generator of F_q,
and zeta_r is the Teichmuller lift of gamma^((q-1)/r).

Place values follow the geometric-Frobenius normalisation
alpha(x) = chi(u_x)^(-1) * z^(deg x) for x prime to c, and alpha(infinity) = z.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from .cyclo import Cyclo
from .ff import (DEFAULT_PRECISION, FieldTable, PadicRing, build_field, embed,
                 factor_int, teichmuller)
from .poly import DEFAULT_SEED, Poly, factor, poly_roots


# --- places and divisors -----------------------------------------------------------

@dataclass(frozen=True)
class Place:
    degree: int
    coeffs: tuple | None  # monic irreducible, low degree first; None for infinity

    @classmethod
    def finite(cls, poly: Poly) -> "Place":
        if poly.degree < 1 or poly.lead != 1:
            raise ValueError("a finite place needs a monic polynomial of positive degree")
        return cls(poly.degree, poly.c)

    @classmethod
    def infinity(cls) -> "Place":
        return cls(1, None)

    @property
    def is_infinity(self):
        return self.coeffs is None

    def sort_key(self):
        if self.coeffs is None:
            return (1, 0, ())
        return (0, self.degree, self.coeffs[::-1])

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def poly(self, F: FieldTable) -> Poly:
        if self.coeffs is None:
            raise ValueError("infinity has no polynomial")
        return Poly(F, self.coeffs)

    def label(self, F: FieldTable | None = None) -> str:
        if self.coeffs is None:
            return "inf"
        if F is None:
            return "poly" + "_".join(map(str, self.coeffs))
        return str(Poly(F, self.coeffs))

    def __repr__(self):
        return "Place(inf)" if self.coeffs is None else f"Place({list(self.coeffs)})"


class Divisor:
    def __init__(self, mults=None):
        self.mults = {P: int(m) for P, m in (mults or {}).items() if m}

    def __add__(self, other):
        out = dict(self.mults)
        for P, m in other.mults.items():
            out[P] = out.get(P, 0) + m
        return Divisor(out)

    def __sub__(self, other):
        return self + Divisor({P: -m for P, m in other.mults.items()})

    def __eq__(self, other):
        return isinstance(other, Divisor) and self.mults == other.mults

    @property
    def degree(self) -> int:
        return sum(P.degree * m for P, m in self.mults.items())

    def support(self):
        return sorted(self.mults)

    def is_effective(self):
        return all(m >= 0 for m in self.mults.values())

    def __getitem__(self, P):
        return self.mults.get(P, 0)

    def __iter__(self):
        return iter(sorted(self.mults.items()))

    def __repr__(self):
        return "Divisor(" + ", ".join(f"{m}*{P!r}" for P, m in self) + ")"


def necklace_count(q: int, n: int) -> int:
    """Number of monic irreducibles of degree n over F_q."""
    total = 0
    for e in range(1, n + 1):
        if n % e == 0:
            total += _mobius(e) * q ** (n // e)
    return total // n


def _mobius(n):
    f = factor_int(n)
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


@functools.lru_cache(maxsize=16)
def extension(F: FieldTable, e: int):
    """(F_{q^e}, embedding F_q -> F_{q^e})."""
    E = build_field(F.p, F.k * e)
    return E, embed(F, E)


def orbit_representatives(F: FieldTable, e: int) -> np.ndarray:
    """One element of F_{q^e} (smallest log) per Frobenius orbit of exact degree e."""
    E, _ = extension(F, e)
    q = F.order
    if e == 1:
        return np.arange(q, dtype=np.int64)
    n = E.order - 1
    logs = np.arange(n, dtype=np.int64)
    exact = np.ones(n, dtype=bool)
    for ell in factor_int(e):
        sub = q ** (e // ell) - 1
        exact &= (logs * sub) % n != 0
    orbit_min = logs.copy()
    cur = logs.copy()
    for _ in range(e - 1):
        cur = (cur * q) % n
        np.minimum(orbit_min, cur, out=orbit_min)
    reps = logs[exact & (orbit_min == logs)]
    return E.exp[reps]


def minimal_polys(F: FieldTable, e: int, xs: np.ndarray) -> np.ndarray:
    """Coefficients (over F_q, low first) of the minimal polynomials of xs in F_{q^e}."""
    E, emb = extension(F, e)
    q = F.order
    coeffs = np.zeros((len(xs), e + 1), dtype=np.int64)
    coeffs[:, 0] = 1
    conj = np.asarray(xs, dtype=np.int64)
    for i in range(e):
        negc = E.neg_v(conj)
        new = np.zeros_like(coeffs)
        new[:, 1:] = coeffs[:, :-1]
        for j in range(e + 1):
            new[:, j] = E.add_v(new[:, j], E.mul_v(coeffs[:, j], negc))
        coeffs = new
        conj = E.pow_v(conj, q)
    if e == 1:
        return coeffs
    pre = emb.preimage(coeffs)
    if (pre < 0).any():
        raise ArithmeticError("minimal polynomial has coefficients outside F_q")
    return pre


def places_of_degree(F: FieldTable, e: int):
    reps = orbit_representatives(F, e)
    mp = minimal_polys(F, e, reps)
    return [Place(e, tuple(int(x) for x in row)) for row in mp]


def enumerate_places(F: FieldTable, max_degree: int, include_infinity: bool = True):
    if max_degree < 1:
        raise ValueError("max_degree must be at least 1")
    out = []
    for e in range(1, max_degree + 1):
        out.extend(sorted(places_of_degree(F, e)))
    if include_infinity:
        out.append(Place.infinity())
    return out


# --- tame Dirichlet characters --------------------------------------------------------

class CharacterError(ValueError):
    pass


class DirichletCharacter:
    """Tame character of F_q[T] with squarefree conductor c, unramified at infinity."""

    def __init__(self, F: FieldTable, modulus: Poly, order: int, exps, z_exp: int = 0,
                 seed: int = DEFAULT_SEED):
        q = F.order
        if modulus.degree < 1 or modulus.lead != 1:
            raise CharacterError("modulus must be monic of positive degree")
        if (q - 1) % order:
            raise CharacterError(f"order {order} does not divide q - 1 = {q - 1}")
        fac = factor(modulus, seed)
        if any(m > 1 for _, m in fac):
            raise CharacterError("modulus must be squarefree")
        exps = [int(e) for e in exps]
        if len(exps) != len(fac):
            raise CharacterError(f"modulus has {len(fac)} prime factors but {len(exps)} exponents given")
        if any(e % order == 0 for e in exps):
            raise CharacterError("every local component must be nontrivial")
        self.F = F
        self.q = q
        self.modulus = modulus
        self.factors = [g for g, _ in fac]
        self.order = order
        self.exps = [e % order for e in exps]
        self.z_exp = z_exp % (q - 1)
        z_order = (q - 1) // math.gcd(self.z_exp, q - 1)
        self.R = order * z_order // math.gcd(order, z_order)
        self.seed = seed
        self._local = [self._residue_data(g) for g in self.factors]
        if self.chi_exponent(Poly.const(F, F.generator)) != 0:
            raise CharacterError("character is not trivial on the constants")

    def __repr__(self):
        return (f"DirichletCharacter(mod={self.modulus}, order={self.order}, "
                f"exps={self.exps}, z={self.z_exp})")

    def describe(self) -> str:
        return f"mod={self.modulus};order={self.order};exps={','.join(map(str, self.exps))};z={self.z_exp}"

    @property
    def conductor_degree(self) -> int:
        return self.modulus.degree

    def conductor_places(self):
        return [Place.finite(g) for g in self.factors]

    def _residue_data(self, g: Poly):
        K, emb = extension(self.F, g.degree)
        theta = poly_roots(K, [emb(a) for a in g.c], self.seed)[0]
        return K, emb, theta

    @property
    def zeta_scale(self):
        """zeta_r = zeta_R^(R/r)."""
        return self.R // self.order

    @property
    def z_scale(self):
        """z = zeta_R^(z_exp * R / (q-1))."""
        return self.z_exp * self.R // (self.q - 1)

    def _log_norm(self, i: int, u: Poly):
        K, emb, theta = self._local[i]
        y = 0
        for a in reversed(u.c):
            y = K.add(K.mul(y, theta), emb(a))
        if y == 0:
            return None
        nrm = K.pow(y, (K.order - 1) // (self.q - 1))
        return self.F.element_log(emb.preimage(nrm))

    def chi_exponent(self, u: Poly):
        """chi(u) as an exponent of zeta_R, or None when u shares a factor with c."""
        total = 0
        for i, e in enumerate(self.exps):
            ln = self._log_norm(i, u)
            if ln is None:
                return None
            total += e * ln
        return (total * self.zeta_scale) % self.R

    def place_exponent(self, x: Place):
        """alpha(x) as an exponent of zeta_R, or None at ramified places."""
        if x.is_infinity:
            return self.z_scale % self.R
        ce = self.chi_exponent(x.poly(self.F))
        if ce is None:
            return None
        return (-ce + self.z_scale * x.degree) % self.R

    def fiber_exponents(self, e: int, xs: np.ndarray) -> np.ndarray:
        """alpha at the places of exact degree e through the points xs of F_{q^e}.

        Uses reciprocity: N(u_x(theta_i)) = (-1)^(deg c_i * e) N(c_i(t0)). Entries are -1
        at ramified places.
        """
        E, emb = extension(self.F, e)
        q = self.q
        step = (E.order - 1) // (q - 1)
        m0 = int(E.log[emb(self.F.generator)]) // step
        m0_inv = pow(m0, -1, q - 1)
        total = np.zeros(len(xs), dtype=np.int64)
        ramified = np.zeros(len(xs), dtype=bool)
        for g, ex in zip(self.factors, self.exps):
            vals = np.zeros(len(xs), dtype=np.int64)
            for a in reversed(g.c):
                vals = E.add_v(E.mul_v(vals, xs), emb(a))
            ramified |= vals == 0
            lg = E.log[vals]
            ln = (lg % (q - 1)) * m0_inv % (q - 1)
            if (g.degree * e) % 2:
                ln = (ln + (q - 1) // 2) % (q - 1)
            total = total + ex * ln
        chi = (total * self.zeta_scale) % self.R
        out = (-chi + self.z_scale * e) % self.R
        return np.where(ramified, -1, out)

    def inverse(self) -> "DirichletCharacter":
        return DirichletCharacter(self.F, self.modulus, self.order,
                                  [-e for e in self.exps], -self.z_exp, self.seed)

    def zeta_padic(self, precision: int = DEFAULT_PRECISION):
        """p-adic zeta_R = Teichmuller(gamma_q^((q-1)/R))."""
        F = self.F
        return teichmuller(F, F.pow(F.generator, (self.q - 1) // self.R), precision)

    def is_quadratic(self):
        return self.order == 2 and self.z_exp in (0, (self.q - 1) // 2) and self.R <= 2


def character_value(chi: DirichletCharacter, x: Place, precision: int = DEFAULT_PRECISION):
    """alpha(x) as a p-adic root of unity, or 0 at places dividing the conductor."""
    ex = chi.place_exponent(x)
    ring = PadicRing(chi.F, precision)
    if ex is None:
        return ring.zero()
    return chi.zeta_padic(precision) ** ex


def parse_character(F: FieldTable, text: str, seed: int = DEFAULT_SEED) -> DirichletCharacter:
    """Parse "mod=<poly>;order=<r>;exps=<e1,...>;z=<k>"."""
    from .poly import ParseError, parse_poly
    fields = {}
    for part in text.split(";"):
        if not part.strip():
            continue
        if "=" not in part:
            raise ParseError(f"malformed character field {part!r}")
        key, val = part.split("=", 1)
        fields[key.strip()] = val.strip()
    if "mod" not in fields or "order" not in fields:
        raise ParseError("character needs mod= and order=")
    mod = parse_poly(F, fields["mod"]).monic()
    try:
        order = int(fields["order"])
        exps = [int(e) for e in fields.get("exps", "1").split(",") if e.strip()]
        z = int(fields.get("z", "0"))
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    if "exps" not in fields:
        exps = [1] * len(factor(mod, seed))
    return DirichletCharacter(F, mod, order, exps, z, seed)


def monic_polys(F: FieldTable, degree: int):
    q = F.order
    for tail in product(range(q), repeat=degree):
        yield Poly(F, tuple(reversed(tail)) + (1,))


@dataclass
class DirichletL:
    chi: DirichletCharacter
    finite: list  # Cyclo coefficients of sum alpha(m) t^deg m
    completed: list  # after removing the infinity factor

    @property
    def degree(self):
        return len(self.completed) - 1

    @property
    def epsilon(self) -> Cyclo:
        return self.completed[-1]


def dirichlet_lfunction(chi: DirichletCharacter) -> DirichletL:
    """Finite L = sum over monic m prime to c of alpha(m) t^deg m; completed = finite/(1 - z t)."""
    F, R = chi.F, chi.R
    D = chi.conductor_degree
    finite = []
    for n in range(D):
        vec = [0] * R
        for m in monic_polys(F, n):
            ce = chi.chi_exponent(m)
            if ce is not None:
                vec[(-ce + chi.z_scale * n) % R] += 1
        finite.append(Cyclo(R, vec))
    while len(finite) > 1 and finite[-1].is_zero():
        finite.pop()
    z = Cyclo.zeta_power(R, chi.z_scale)
    quot = [finite[0]]
    for k in range(1, len(finite)):
        quot.append(finite[k] + z * quot[-1])
    rem = quot.pop()
    if not rem.is_zero():
        raise CharacterError("finite L is not divisible by (1 - z t); character not trivial on constants")
    return DirichletL(chi, finite, quot)


def gauss_valuation_prediction(chi: DirichletCharacter, inverse: bool = False):
    """Stickelberger estimate of v_q(epsilon): -1 + sum_i v_q(g(chi_i^-1)) over the residue fields."""
    from fractions import Fraction
    from .jacobi import stickelberger_valuation
    p, d = chi.F.p, chi.F.k
    total = Fraction(-1)
    for g, e in zip(chi.factors, chi.exps):
        Q = chi.q ** g.degree
        ee = -e if inverse else e
        k = (ee % chi.order) * (Q - 1) // chi.order
        total += stickelberger_valuation(p, k, d * g.degree) / d
    return total
