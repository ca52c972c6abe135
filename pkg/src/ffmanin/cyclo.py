"""Exact cyclotomic integers Z[zeta_R] in the power basis modulo Phi_R."""

from __future__ import annotations

import functools
import math

from .ff import PadicRing, PadicScalar


@functools.lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_n, low degree first."""
    num = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            num = _exact_div(num, list(cyclotomic_poly(d)))
    return tuple(num)


def _exact_div(a, b):
    a = list(a)
    out = [0] * (len(a) - len(b) + 1)
    for i in range(len(out) - 1, -1, -1):
        c = a[i + len(b) - 1] // b[-1]
        out[i] = c
        for j, y in enumerate(b):
            a[i + j] -= c * y
    if any(a):
        raise ArithmeticError("inexact polynomial division")
    return out


class Cyclo:
    """Element sum c_i zeta_R^i with 0 <= i < phi(R)."""

    __slots__ = ("R", "c")

    def __init__(self, R: int, coeffs=()):
        self.R = R
        self.c = _reduce(R, coeffs)

    @classmethod
    def zeta_power(cls, R, j):
        v = [0] * R
        v[j % R] = 1
        return cls(R, v)

    @classmethod
    def from_int(cls, R, n):
        return cls(R, [n])

    @property
    def phi(self):
        return len(cyclotomic_poly(self.R)) - 1

    def _lift(self, other):
        if isinstance(other, Cyclo):
            if other.R != self.R:
                raise ValueError("mismatched cyclotomic orders")
            return other
        return Cyclo(self.R, [int(other)])

    def __add__(self, other):
        o = self._lift(other)
        return Cyclo(self.R, [a + b for a, b in zip(self.c, o.c)])

    __radd__ = __add__

    def __neg__(self):
        return Cyclo(self.R, [-a for a in self.c])

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Cyclo):
            n = int(other)
            return Cyclo(self.R, [a * n for a in self.c])
        o = self._lift(other)
        prod = [0] * (2 * len(self.c))
        for i, a in enumerate(self.c):
            if a:
                for j, b in enumerate(o.c):
                    if b:
                        prod[i + j] += a * b
        return Cyclo(self.R, prod)

    __rmul__ = __mul__

    def __pow__(self, e):
        out = Cyclo.from_int(self.R, 1)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def exact_div(self, n: int) -> "Cyclo":
        if any(a % n for a in self.c):
            raise ArithmeticError(f"{self} is not divisible by {n}")
        return Cyclo(self.R, [a // n for a in self.c])

    def conj(self) -> "Cyclo":
        """Image under zeta -> zeta^-1."""
        v = [0] * self.R
        for i, a in enumerate(self.c):
            v[-i % self.R] += a
        return Cyclo(self.R, v)

    def is_zero(self):
        return not any(self.c)

    def is_rational(self):
        return not any(self.c[1:])

    def as_int(self) -> int:
        if not self.is_rational():
            raise ValueError("not a rational integer")
        return self.c[0]

    def __eq__(self, other):
        try:
            o = self._lift(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.c == o.c

    def __hash__(self):
        return hash((self.R, self.c))

    def __repr__(self):
        if self.is_rational():
            return str(self.c[0])
        terms = [f"{a}*z^{i}" if i else str(a) for i, a in enumerate(self.c) if a]
        return "(" + " + ".join(terms) + f" | z^{self.R}=1)"

    def to_padic(self, zeta: PadicScalar) -> PadicScalar:
        """Evaluate at a p-adic primitive R-th root of unity."""
        ring = zeta.ring
        acc = ring.zero()
        for a in reversed(self.c):
            acc = acc * zeta + a
        return acc

    def to_complex(self):
        import cmath
        z = cmath.exp(2j * math.pi / self.R)
        return sum(a * z ** i for i, a in enumerate(self.c))


def _reduce(R, coeffs):
    phi = cyclotomic_poly(R)
    k = len(phi) - 1
    c = [int(x) for x in coeffs]
    if len(c) <= k:
        return tuple(c + [0] * (k - len(c)))
    for i in range(len(c) - 1, k - 1, -1):
        a = c[i]
        if a:
            for j in range(k):
                c[i - k + j] -= a * phi[j]
            c[i] = 0
    return tuple(c[:k])


def group_ring_to_cyclo(R: int, vec) -> Cyclo:
    """sum vec[j] zeta^j for a length-R integer vector."""
    return Cyclo(R, list(vec))


def padic_zeta(ring: PadicRing, R: int, generator_log_step: int):
    """Teichmuller lift of gamma^(generator_log_step) as a p-adic R-th root of unity."""
    from .ff import teichmuller
    F = ring.field
    return teichmuller(F, F.pow(F.generator, generator_log_step), ring.N, ring=ring)
