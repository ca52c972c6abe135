"""Polynomials and rational functions over a FieldTable, with factorisation.

Coefficients are field-element codes stored low degree first; the zero
polynomial has an empty coefficient tuple.
"""

from __future__ import annotations

import random
import re
from functools import total_ordering

import numpy as np

from .ff import FieldTable

DEFAULT_SEED = 20240611


class ParseError(ValueError):
    pass


@total_ordering
class Poly:
    __slots__ = ("F", "c")

    def __init__(self, F: FieldTable, coeffs=()):
        c = [int(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.F = F
        self.c = tuple(c)

    # --- constructors -------------------------------------------------------
    @classmethod
    def const(cls, F, a):
        return cls(F, (a,))

    @classmethod
    def T(cls, F):
        return cls(F, (0, 1))

    @classmethod
    def monomial(cls, F, n, a=1):
        return cls(F, (0,) * n + (a,))

    # --- basic properties ---------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.c) - 1

    @property
    def lead(self) -> int:
        return self.c[-1] if self.c else 0

    def is_zero(self):
        return not self.c

    def is_one(self):
        return self.c == (1,)

    def coeff(self, i):
        return self.c[i] if 0 <= i < len(self.c) else 0

    def __bool__(self):
        return bool(self.c)

    def __eq__(self, other):
        if isinstance(other, int):
            other = Poly.const(self.F, other % self.F.p)
        return isinstance(other, Poly) and self.c == other.c

    def __lt__(self, other):
        return (self.degree, self.c[::-1]) < (other.degree, other.c[::-1])

    def __hash__(self):
        return hash(self.c)

    def __repr__(self):
        return f"Poly({self})"

    def __str__(self):
        if not self.c:
            return "0"
        terms = []
        for i in range(len(self.c) - 1, -1, -1):
            a = self.c[i]
            if a == 0:
                continue
            cs = _coeff_str(self.F, a)
            if i == 0:
                terms.append(cs)
            else:
                mon = "T" if i == 1 else f"T^{i}"
                terms.append(mon if a == 1 else f"{cs}*{mon}")
        return "+".join(terms)

    # --- arithmetic ---------------------------------------------------------
    def _lift(self, other):
        if isinstance(other, Poly):
            return other
        return Poly.const(self.F, int(other) % self.F.p)

    def __add__(self, other):
        o = self._lift(other)
        F = self.F
        n = max(len(self.c), len(o.c))
        return Poly(F, [F.add(self.coeff(i), o.coeff(i)) for i in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.F, [self.F.neg(a) for a in self.c])

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        if not self.c or not o.c:
            return Poly(self.F)
        F = self.F
        if F.k == 1:
            if min(len(self.c), len(o.c)) * F.p ** 2 < 2 ** 62:
                conv = np.convolve(np.array(self.c, dtype=np.int64), np.array(o.c, dtype=np.int64))
                return Poly(F, (conv % F.p).tolist())
            out = [0] * (len(self.c) + len(o.c) - 1)
            for i, a in enumerate(self.c):
                if a:
                    for j, b in enumerate(o.c):
                        out[i + j] += a * b
            return Poly(F, [x % F.p for x in out])
        out = [0] * (len(self.c) + len(o.c) - 1)
        for i, a in enumerate(self.c):
            if a:
                for j, b in enumerate(o.c):
                    if b:
                        out[i + j] = F.add(out[i + j], F.mul(a, b))
        return Poly(F, out)

    __rmul__ = __mul__

    def scale(self, a):
        return Poly(self.F, [self.F.mul(a, x) for x in self.c])

    def __pow__(self, e):
        result = Poly.const(self.F, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def divmod(self, other):
        if not other.c:
            raise ZeroDivisionError("division by the zero polynomial")
        F = self.F
        r = list(self.c)
        dq = len(r) - len(other.c)
        if dq < 0:
            return Poly(F), self
        q = [0] * (dq + 1)
        inv = F.inv(other.lead)
        m = len(other.c) - 1
        if (F.k == 1 or F.has_tables) and m >= 4:
            rv = np.array(r, dtype=np.int64)
            b = np.array(other.c, dtype=np.int64)
            for i in range(dq, -1, -1):
                a = int(rv[i + m])
                if a == 0:
                    continue
                a = F.mul(a, inv)
                q[i] = a
                rv[i:i + m + 1] = F.sub_v(rv[i:i + m + 1], F.mul_v(b, a))
            return Poly(F, q), Poly(F, rv[:m].tolist())
        for i in range(dq, -1, -1):
            a = r[i + m]
            if a == 0:
                continue
            a = F.mul(a, inv)
            q[i] = a
            for j, b in enumerate(other.c):
                if b:
                    r[i + j] = F.sub(r[i + j], F.mul(a, b))
        return Poly(F, q), Poly(F, r[:m])

    def __floordiv__(self, other):
        return self.divmod(self._lift(other))[0]

    def __mod__(self, other):
        return self.divmod(self._lift(other))[1]

    def monic(self):
        if not self.c or self.lead == 1:
            return self
        return self.scale(self.F.inv(self.lead))

    def derivative(self):
        F = self.F
        return Poly(F, [F.mul(i % F.p, a) for i, a in enumerate(self.c)][1:])

    def __call__(self, x):
        """Evaluate at an element of the coefficient field."""
        F = self.F
        acc = 0
        for a in reversed(self.c):
            acc = F.add(F.mul(acc, x), a)
        return acc

    def compose(self, other):
        acc = Poly(self.F)
        for a in reversed(self.c):
            acc = acc * other + a if a else acc * other
        return acc

    def powmod(self, e, mod):
        result = Poly.const(self.F, 1)
        base = self % mod
        while e:
            if e & 1:
                result = (result * base) % mod
            base = (base * base) % mod
            e >>= 1
        return result

    def valuation_at(self, pi: "Poly") -> int:
        """Exponent of the irreducible pi in self (self must be nonzero)."""
        if not self.c:
            raise ValueError("valuation of zero")
        v, f = 0, self
        while True:
            q, r = f.divmod(pi)
            if r.c:
                return v
            v += 1
            f = q

    def reverse(self, n=None):
        n = self.degree if n is None else n
        c = list(self.c) + [0] * (n + 1 - len(self.c))
        return Poly(self.F, c[::-1])


def _coeff_str(F, a):
    if F.k == 1:
        return str(a)
    if a < F.p:
        return str(a)
    if not F.has_tables:
        return f"<{a}>"
    lg = F.element_log(a)
    return "g" if lg == 1 else f"g^{lg}"


def poly_gcd(a: Poly, b: Poly) -> Poly:
    if a.F.k == 1 and min(len(a.c), len(b.c)) > 8:
        return _gcd_prime_field(a, b)
    while b.c:
        a, b = b, a % b
    return a.monic()


def _trim_arr(v):
    nz = np.flatnonzero(v)
    return v[: nz[-1] + 1] if len(nz) else v[:0]


def _gcd_prime_field(a: Poly, b: Poly) -> Poly:
    """Euclid on int64 coefficient arrays over F_p."""
    p = a.F.p
    x = np.array(a.c, dtype=np.int64)
    y = np.array(b.c, dtype=np.int64)
    while len(y):
        x = x.copy()
        m = len(y) - 1
        inv = pow(int(y[-1]), -1, p)
        for i in range(len(x) - 1 - m, -1, -1):
            c = int(x[i + m]) * inv % p
            if c:
                x[i:i + m + 1] = (x[i:i + m + 1] - c * y) % p
        x, y = y, _trim_arr(x[:m])
    return Poly(a.F, x.tolist()).monic()


def poly_xgcd(a: Poly, b: Poly):
    """Return (g, s, t) with s*a + t*b = g monic."""
    F = a.F
    r0, r1 = a, b
    s0, s1 = Poly.const(F, 1), Poly(F)
    t0, t1 = Poly(F), Poly.const(F, 1)
    while r1.c:
        q, r = r0.divmod(r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    inv = F.inv(r0.lead)
    return r0.scale(inv), s0.scale(inv), t0.scale(inv)


def poly_from_roots(F, roots):
    out = Poly.const(F, 1)
    for r in roots:
        out = out * Poly(F, (F.neg(r), 1))
    return out


# --- p-th roots in characteristic p ----------------------------------------

def coeff_pth_root(F: FieldTable, a: int) -> int:
    return F.pow(a, F.p ** (F.k - 1)) if F.k > 1 else a


def poly_pth_root(f: Poly) -> Poly:
    """g with g^p = f; f must lie in F[T^p]."""
    F, p = f.F, f.F.p
    if any(a for i, a in enumerate(f.c) if i % p):
        raise ValueError("polynomial is not a p-th power")
    return Poly(F, [coeff_pth_root(F, f.c[i]) for i in range(0, len(f.c), p)])


# --- factorisation -----------------------------------------------------------

def squarefree_decomposition(f: Poly):
    """List of (g, e) with f = lead * prod g^e, g squarefree and coprime."""
    F = f.F
    f = f.monic()
    out: dict = {}
    _sqf(f, 1, out)
    return sorted(((g, e) for g, e in out.items()), key=lambda t: (t[1], t[0]))


def _sqf(f, mult, out):
    if f.degree < 1:
        return
    p = f.F.p
    df = f.derivative()
    if not df.c:
        _sqf(poly_pth_root(f), mult * p, out)
        return
    c = poly_gcd(f, df)
    w = f // c
    i = 1
    while w.degree >= 1:
        y = poly_gcd(w, c)
        z = w // y
        if z.degree >= 1:
            out[z.monic()] = out.get(z.monic(), 0) + i * mult
        i += 1
        w, c = y, c // y
    if c.degree >= 1:
        _sqf(poly_pth_root(c), mult * p, out)


def distinct_degree(f: Poly):
    """Split squarefree monic f into products of irreducibles of equal degree."""
    F = f.F
    q = F.order
    out = []
    X = Poly.T(F)
    h = X
    i = 0
    g = f
    while g.degree >= 2 * (i + 1):
        i += 1
        h = h.powmod(q, g)
        d = poly_gcd(g, h - X)
        if d.degree >= 1:
            out.append((d, i))
            g = g // d
            h = h % g
    if g.degree >= 1:
        out.append((g, g.degree))
    return out


def equal_degree(f: Poly, d: int, rng: random.Random):
    """Cantor-Zassenhaus splitting of a product of degree-d irreducibles."""
    if f.degree == d:
        return [f.monic()]
    F = f.F
    q = F.order
    e = (q ** d - 1) // 2
    while True:
        a = Poly(F, [rng.randrange(F.order) for _ in range(f.degree)])
        if a.degree < 1:
            continue
        g = poly_gcd(a, f)
        if 1 <= g.degree < f.degree:
            break
        b = a.powmod(e, f) - 1
        g = poly_gcd(b, f)
        if 1 <= g.degree < f.degree:
            break
    return equal_degree(g, d, rng) + equal_degree(f // g, d, rng)


def factor(f: Poly, seed: int = DEFAULT_SEED):
    """Irreducible factorisation as a sorted list of (monic irreducible, multiplicity)."""
    if not f.c:
        raise ValueError("cannot factor the zero polynomial")
    rng = random.Random(seed)
    out = []
    for g, e in squarefree_decomposition(f):
        for h, d in distinct_degree(g):
            for irr in equal_degree(h, d, rng):
                out.append((irr, e))
    return sorted(out, key=lambda t: t[0])


def is_irreducible(f: Poly) -> bool:
    fs = factor(f)
    return len(fs) == 1 and fs[0][1] == 1


def poly_roots(F: FieldTable, coeffs, seed: int = DEFAULT_SEED):
    """Distinct roots in F of the polynomial with the given coefficients."""
    f = Poly(F, coeffs).monic()
    if f.degree < 1:
        return []
    X = Poly.T(F)
    g = poly_gcd(f, X.powmod(F.order, f) - X)
    if g.degree < 1:
        return []
    lin = equal_degree(g, 1, random.Random(seed))
    return sorted(F.neg(h.c[0]) for h in lin)


# --- rational functions --------------------------------------------------------

class RatFunc:
    """num/den in lowest terms with monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly | None = None, reduce: bool = True):
        F = num.F
        if den is None:
            den = Poly.const(F, 1)
        if not den.c:
            raise ZeroDivisionError("zero denominator")
        if reduce and den.degree > 0 and num.c:
            g = poly_gcd(num, den)
            if g.degree > 0:
                num, den = num // g, den // g
        if not num.c:
            den = Poly.const(F, 1)
        elif den.lead != 1:
            inv = F.inv(den.lead)
            num, den = num.scale(inv), den.scale(inv)
        self.num = num
        self.den = den

    @property
    def F(self):
        return self.num.F

    @classmethod
    def const(cls, F, a):
        return cls(Poly.const(F, a))

    def _lift(self, other):
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, Poly):
            return RatFunc(other)
        return RatFunc(Poly.const(self.F, int(other) % self.F.p))

    def __add__(self, other):
        o = self._lift(other)
        if self.den == o.den:
            return RatFunc(self.num + o.num, self.den)
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den, reduce=False)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        return RatFunc(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self):
        if not self.num.c:
            raise ZeroDivisionError("inverse of zero")
        return RatFunc(self.den, self.num)

    def __truediv__(self, other):
        return self * self._lift(other).inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        return RatFunc(self.num ** e, self.den ** e, reduce=False)

    def __eq__(self, other):
        try:
            o = self._lift(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((self.num, self.den))

    def is_zero(self):
        return not self.num.c

    def is_constant(self):
        return self.num.degree <= 0 and self.den.degree == 0

    def constant_value(self):
        return self.num.coeff(0)

    def __str__(self):
        if self.den.is_one():
            return str(self.num)
        return f"({self.num})/({self.den})"

    def __repr__(self):
        return f"RatFunc({self})"

    def valuation_at(self, pi: Poly) -> int | float:
        if not self.num.c:
            return float("inf")
        return self.num.valuation_at(pi) - self.den.valuation_at(pi)

    def valuation_at_infinity(self) -> int | float:
        if not self.num.c:
            return float("inf")
        return self.den.degree - self.num.degree

    def at_infinity(self) -> "RatFunc":
        """The function f(1/S) written in the variable S."""
        dn, dd = self.num.degree, self.den.degree
        n = max(dn, dd)
        num = self.num.reverse(dn) * Poly.monomial(self.F, n - dn)
        den = self.den.reverse(dd) * Poly.monomial(self.F, n - dd)
        return RatFunc(num, den)

    def __call__(self, x):
        F = self.F
        d = self.den(x)
        if d == 0:
            raise ZeroDivisionError("pole")
        return F.div(self.num(x), d)


# --- vectorised evaluation --------------------------------------------------------

def eval_poly_v(target: FieldTable, coeffs_in_target, xs: np.ndarray) -> np.ndarray:
    """Horner evaluation of a polynomial (coefficients already in target) at many points."""
    acc = np.zeros(len(xs), dtype=np.int64)
    for a in reversed(coeffs_in_target):
        acc = target.add_v(target.mul_v(acc, xs), int(a))
    return acc


# --- parsing ---------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|(T|t|g)|(\*\*|[-+*/^()]))")


def _tokenize(s: str):
    pos, out = 0, []
    s = s.strip()
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character at {pos}: {s[pos:pos + 10]!r}")
        num, name, op = m.groups()
        if num is not None:
            out.append(("num", int(num)))
        elif name is not None:
            out.append(("name", name.upper() if name in "Tt" else name))
        else:
            out.append(("op", "^" if op == "**" else op))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, F, text):
        self.F = F
        self.toks = _tokenize(text)
        self.i = 0
        if not self.toks:
            raise ParseError("empty expression")

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    def parse(self):
        v = self.expr()
        if self.i != len(self.toks):
            raise ParseError(f"trailing input at token {self.i}")
        return v

    def expr(self):
        v = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            w = self.term()
            v = v + w if op == "+" else v - w
        return v

    def term(self):
        v = self.unary()
        while True:
            kind, val = self.peek()
            if (kind, val) in (("op", "*"), ("op", "/")):
                self.take()
                w = self.unary()
                if val == "/":
                    if w.is_zero():
                        raise ParseError("division by zero")
                    v = v / w
                else:
                    v = v * w
            elif kind in ("num", "name") or (kind, val) == ("op", "("):
                v = v * self.power()
            else:
                return v

    def unary(self):
        kind, val = self.peek()
        if (kind, val) == ("op", "-"):
            self.take()
            return -self.unary()
        if (kind, val) == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        v = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            neg = False
            if self.peek() == ("op", "-"):
                self.take()
                neg = True
            kind, e = self.take()
            if kind != "num":
                raise ParseError("exponent must be an integer literal")
            if neg:
                if v.is_zero():
                    raise ParseError("division by zero")
                e = -e
            v = v ** e
        return v

    def atom(self):
        F = self.F
        kind, val = self.take()
        if kind == "num":
            return RatFunc.const(F, val % F.p)
        if kind == "name":
            if val == "T":
                return RatFunc(Poly.T(F))
            return RatFunc.const(F, F.generator)
        if (kind, val) == ("op", "("):
            v = self.expr()
            if self.take() != ("op", ")"):
                raise ParseError("missing closing parenthesis")
            return v
        raise ParseError(f"unexpected token {val!r}")


def parse_ratfunc(F: FieldTable, text: str) -> RatFunc:
    """Parse e.g. "T^3+2*T+1" or "(T+1)/(T^2-3)"; 'g' denotes the generator of F."""
    return _Parser(F, text).parse()


def parse_poly(F: FieldTable, text: str) -> Poly:
    r = parse_ratfunc(F, text)
    if not r.den.is_one():
        raise ParseError("expected a polynomial, got a rational function")
    return r.num
