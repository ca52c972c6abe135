"""Finite fields F_{p^k} for p >= 5, embeddings, and Teichmuller lifts.

Elements of F_{p^k} are encoded as integers ``c_0 + c_1 p + ... + c_{k-1} p^{k-1}``
where ``c_i`` are the coordinates in the polynomial basis ``1, X, ..., X^{k-1}``
modulo the defining polynomial. The prime field therefore sits inside every
table as the integers ``0..p-1``.
"""

from __future__ import annotations

import functools
import math
from fractions import Fraction

import numpy as np

TABLE_LIMIT = 1 << 22
DEFAULT_PRECISION = 32


class FieldError(ValueError):
    pass


class PrecisionError(ArithmeticError):
    """All tracked p-adic digits vanished; retry with a larger precision."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for s in small:
        if n % s == 0:
            return n == s
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def factor_int(n: int) -> dict[int, int]:
    """Trial-division factorisation; adequate for group orders up to ~1e14."""
    out: dict[int, int] = {}
    for f in (2, 3):
        while n % f == 0:
            out[f] = out.get(f, 0) + 1
            n //= f
    f = 5
    while f * f <= n:
        for g in (f, f + 2):
            while n % g == 0:
                out[g] = out.get(g, 0) + 1
                n //= g
        f += 6
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def multiplicative_order(a: int, m: int) -> int:
    if m == 1:
        return 1
    if math.gcd(a, m) != 1:
        raise ValueError(f"{a} is not a unit modulo {m}")
    order = m
    phi = 1
    for ell, e in factor_int(m).items():
        phi *= (ell - 1) * ell ** (e - 1)
    order = phi
    for ell in factor_int(phi):
        while order % ell == 0 and pow(a, order // ell, m) == 1:
            order //= ell
    return order


# --- dense polynomials over F_p (lists, low degree first) -------------------

def _trim(f):
    while f and f[-1] == 0:
        f.pop()
    return f


def _pmulmod(a, b, mod, p):
    """a*b mod ``mod`` over F_p; ``mod`` is monic."""
    if not a or not b:
        return []
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] += x * y
    k = len(mod) - 1
    for i in range(len(prod) - 1, k - 1, -1):
        c = prod[i] % p
        if c:
            for j in range(k):
                prod[i - k + j] -= c * mod[j]
        prod[i] = 0
    return _trim([c % p for c in prod[:k]])


def _ppowmod(a, e, mod, p):
    result = [1]
    base = list(a)
    while e:
        if e & 1:
            result = _pmulmod(result, base, mod, p)
        base = _pmulmod(base, base, mod, p)
        e >>= 1
    return result


def _pgcd(a, b, p):
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        inv = pow(b[-1], -1, p)
        while len(a) >= len(b):
            c = a[-1] * inv % p
            shift = len(a) - len(b)
            for j, y in enumerate(b):
                a[shift + j] = (a[shift + j] - c * y) % p
            _trim(a)
            if not a:
                break
        a, b = b, a
    return a


def _is_irreducible(f, p) -> bool:
    """Rabin's test for a monic polynomial over F_p."""
    k = len(f) - 1
    x = [0, 1]
    if _ppowmod_iter(x, p, k, f) != x:
        return False
    for ell in factor_int(k):
        h = _ppowmod_iter(x, p, k // ell, f)
        diff = list(h) + [0] * max(0, 2 - len(h))
        diff[1] = (diff[1] - 1) % p
        if len(_pgcd(f, _trim(diff), p)) != 1:
            return False
    return True


def _ppowmod_iter(a, p, times, mod):
    y = list(a)
    for _ in range(times):
        y = _ppowmod(y, p, mod, p)
    return y


@functools.lru_cache(maxsize=None)
def smallest_irreducible(p: int, k: int) -> tuple[int, ...]:
    """Monic irreducible of degree k with the smallest coefficient code."""
    if k == 1:
        return (0, 1)
    for code in range(p ** k):
        coeffs = []
        c = code
        for _ in range(k):
            c, r = divmod(c, p)
            coeffs.append(r)
        if coeffs[0] == 0:
            continue
        f = coeffs + [1]
        if _is_irreducible(f, p):
            return tuple(f)
    raise FieldError(f"no irreducible polynomial of degree {k} over F_{p}")


class FieldTable:
    """The field F_{p^k}; immutable after construction."""

    def __init__(self, p: int, k: int, modulus: tuple[int, ...] | None = None,
                 tables: bool | None = None):
        if not is_prime(p):
            raise FieldError(f"{p} is not prime")
        if k < 1:
            raise FieldError("extension degree must be positive")
        self.p = p
        self.k = k
        self.order = p ** k
        if self.order >= 1 << 62:
            raise FieldError(f"F_{p}^{k} does not fit the 64-bit element encoding")
        self.modulus = tuple(modulus) if modulus else smallest_irreducible(p, k)
        self._powers = np.array([p ** i for i in range(k)], dtype=np.int64)
        if tables is None:
            tables = self.order <= TABLE_LIMIT
        self.has_tables = bool(tables)
        self._generator = None
        self.exp = self.log = None
        if self.has_tables:
            self._build_tables()

    def __repr__(self):
        return f"FieldTable(p={self.p}, k={self.k})"

    def __eq__(self, other):
        return (isinstance(other, FieldTable) and self.p == other.p
                and self.modulus == other.modulus)

    def __hash__(self):
        return hash((self.p, self.modulus))

    # --- encoding ---------------------------------------------------------
    def to_vec(self, a: int) -> list[int]:
        out = []
        for _ in range(self.k):
            a, r = divmod(a, self.p)
            out.append(r)
        return out

    def from_vec(self, v) -> int:
        return sum(int(c) % self.p * self.p ** i for i, c in enumerate(v))

    def _digits(self, a: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        out = np.empty(a.shape + (self.k,), dtype=np.int64)
        x = a.copy()
        for i in range(self.k):
            x, out[..., i] = np.divmod(x, self.p)
        return out

    def _undigits(self, d: np.ndarray) -> np.ndarray:
        return (d % self.p) @ self._powers

    # --- scalar arithmetic --------------------------------------------------
    def add(self, a: int, b: int) -> int:
        if self.k == 1:
            return (a + b) % self.p
        p, out, m = self.p, 0, 1
        while a or b:
            a, x = divmod(a, p)
            b, y = divmod(b, p)
            out += (x + y) % p * m
            m *= p
        return out

    def neg(self, a: int) -> int:
        if self.k == 1:
            return -a % self.p
        p, out, m = self.p, 0, 1
        while a:
            a, x = divmod(a, p)
            out += (-x) % p * m
            m *= p
        return out

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self.k == 1:
            return a * b % self.p
        if self.has_tables:
            return int(self.exp[(self.log[a] + self.log[b]) % (self.order - 1)])
        return self.from_vec(_pmulmod(self.to_vec(a), self.to_vec(b),
                                      list(self.modulus), self.p))

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e == 0:
                return 1
            if e < 0:
                raise ZeroDivisionError("0 has no inverse")
            return 0
        if self.k == 1:
            return pow(a, e, self.p)
        if self.has_tables:
            return int(self.exp[int(self.log[a]) * e % (self.order - 1)])
        e %= self.order - 1
        return self.from_vec(_ppowmod(self.to_vec(a), e, list(self.modulus), self.p))

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return self.pow(a, -1 if self.has_tables or self.k == 1 else self.order - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def frobenius(self, a: int, times: int = 1) -> int:
        return self.pow(a, self.p ** times)

    def element_log(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("log of 0")
        if self.has_tables:
            return int(self.log[a])
        raise FieldError("discrete log requires log tables")

    # --- generator and tables -----------------------------------------------
    @property
    def generator(self) -> int:
        if self._generator is None:
            self._generator = self._find_generator()
        return self._generator

    def _find_generator(self) -> int:
        n = self.order - 1
        primes = list(factor_int(n))
        for g in range(1, self.order):
            if all(self._slow_pow(g, n // ell) != 1 for ell in primes):
                return g
        raise FieldError("no generator")  # unreachable for a field

    def _slow_pow(self, a, e):
        if self.k == 1:
            return pow(a, e, self.p)
        return self.from_vec(_ppowmod(self.to_vec(a), e, list(self.modulus), self.p))

    def _mult_matrix(self, h: int) -> np.ndarray:
        """Matrix over F_p of x -> h*x in the polynomial basis (acting on rows)."""
        mod = list(self.modulus)
        rows = []
        for j in range(self.k):
            basis = [0] * j + [1]
            v = _pmulmod(self.to_vec(h), basis, mod, self.p)
            rows.append(v + [0] * (self.k - len(v)))
        return np.array(rows, dtype=np.int64)

    def _build_tables(self):
        n = self.order - 1
        g = self.generator
        block = max(1, math.isqrt(n))
        first = np.empty((block, self.k), dtype=np.int64)
        mg = self._mult_matrix(g)
        v = np.zeros(self.k, dtype=np.int64)
        v[0] = 1
        for i in range(block):
            first[i] = v
            v = (v @ mg) % self.p
        step = self._mult_matrix(self.from_vec(v))
        chunks = []
        cur = first
        done = 0
        while done < n:
            chunks.append(cur)
            done += block
            cur = (cur @ step) % self.p
        digits = np.concatenate(chunks)[:n]
        exp = digits @ self._powers
        log = np.full(self.order, -1, dtype=np.int64)
        log[exp] = np.arange(n, dtype=np.int64)
        if (log[1:] < 0).any():
            raise FieldError("generator does not have full order")
        self.exp = exp
        self.log = log

    # --- vectorised arithmetic (requires tables) --------------------------
    def add_v(self, a, b):
        if self.k == 1:
            return (np.asarray(a, dtype=np.int64) + b) % self.p
        a, b = np.broadcast_arrays(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
        return self._undigits(self._digits(a) + self._digits(b))

    def neg_v(self, a):
        if self.k == 1:
            return -np.asarray(a, dtype=np.int64) % self.p
        return self._undigits(-self._digits(a))

    def sub_v(self, a, b):
        if self.k == 1:
            return (np.asarray(a, dtype=np.int64) - b) % self.p
        a, b = np.broadcast_arrays(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
        return self._undigits(self._digits(a) - self._digits(b))

    def mul_v(self, a, b):
        a, b = np.broadcast_arrays(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
        if self.k == 1:
            return a * b % self.p
        zero = (a == 0) | (b == 0)
        out = self.exp[(self.log[a] + self.log[b]) % (self.order - 1)]
        return np.where(zero, 0, out)

    def pow_v(self, a, e: int):
        a = np.asarray(a, dtype=np.int64)
        zero = a == 0
        out = self.exp[(self.log[a] * (e % (self.order - 1))) % (self.order - 1)]
        if e == 0:
            return np.ones_like(a)
        if e < 0 and zero.any():
            raise ZeroDivisionError("0 has no inverse")
        return np.where(zero, 0, out)

    def inv_v(self, a):
        a = np.asarray(a, dtype=np.int64)
        if (a == 0).any():
            raise ZeroDivisionError("0 has no inverse")
        return self.exp[(-self.log[a]) % (self.order - 1)]

    def log_v(self, a):
        return self.log[np.asarray(a, dtype=np.int64)]

    def qchar_v(self, a) -> np.ndarray:
        """Quadratic character of every entry: 0, +1 or -1."""
        lg = self.log[np.asarray(a, dtype=np.int64)]
        return np.where(lg < 0, 0, 1 - 2 * (lg & 1)).astype(np.int64)

    def elements(self) -> np.ndarray:
        return np.arange(self.order, dtype=np.int64)

    def subfield_mask(self, j: int) -> np.ndarray:
        """Mask of elements lying in the subfield F_{p^j} (j must divide k)."""
        if self.k % j:
            raise FieldError("subfield degree must divide k")
        lg = self.log
        step = (self.order - 1) // (self.p ** j - 1)
        return (lg < 0) | (lg % step == 0)


@functools.lru_cache(maxsize=32)
def build_field(p: int, k: int) -> FieldTable:
    """Deterministic F_{p^k}: smallest defining polynomial, smallest generator."""
    if not isinstance(p, int) or not is_prime(p):
        raise FieldError(f"{p} is not prime")
    if k < 1:
        raise FieldError("extension degree must be positive")
    if p < 5:
        raise FieldError("characteristic 2 and 3 are not supported")
    return FieldTable(p, k)


def quadratic_character(F: FieldTable, x: int) -> int:
    if x == 0:
        return 0
    r = F.pow(x, (F.order - 1) // 2)
    return 1 if r == 1 else -1


class FieldEmbedding:
    """Ring homomorphism F_{p^k1} -> F_{p^k2} sending X to a chosen root."""

    def __init__(self, source: FieldTable, target: FieldTable, root: int):
        self.source = source
        self.target = target
        self.root = root
        self._root_powers = [1]
        for _ in range(1, source.k):
            self._root_powers.append(target.mul(self._root_powers[-1], root))
        self._table = None
        self._preimage = None
        if source.order <= TABLE_LIMIT and target.has_tables:
            self._table = self._map_array(source.elements())

    def _map_array(self, arr):
        T = self.target
        digits = self.source._digits(arr)
        acc = np.zeros(len(arr), dtype=np.int64)
        for i, rp in enumerate(self._root_powers):
            acc = T.add_v(acc, T.mul_v(digits[:, i], rp))
        return acc

    def __call__(self, a):
        if isinstance(a, np.ndarray):
            if self._table is not None:
                return self._table[a]
            return self._map_array(a)
        if self._table is not None:
            return int(self._table[a])
        T = self.target
        acc = 0
        for c, rp in zip(self.source.to_vec(a), self._root_powers):
            if c:
                acc = T.add(acc, T.mul(c, rp))
        return acc

    @property
    def image_of_generator(self) -> int:
        return self(self.source.generator)

    def preimage(self, b):
        """Inverse on the image; -1 marks elements outside the subfield."""
        if self._preimage is None:
            pre = np.full(self.target.order, -1, dtype=np.int64)
            pre[self._table] = np.arange(self.source.order, dtype=np.int64)
            self._preimage = pre
        if isinstance(b, np.ndarray):
            return self._preimage[b]
        return int(self._preimage[b])


@functools.lru_cache(maxsize=64)
def embed(source: FieldTable, target: FieldTable) -> FieldEmbedding:
    if source.p != target.p or target.k % source.k:
        raise FieldError("source degree must divide target degree")
    if source.k == 1:
        # prime field: constants map to themselves
        return FieldEmbedding(source, target, 0)
    if source == target:
        return FieldEmbedding(source, target, source.p)
    mod = source.modulus
    if target.has_tables:
        step = (target.order - 1) // (source.order - 1)
        cand = target.exp[np.arange(source.order - 1, dtype=np.int64) * step]
        val = np.zeros_like(cand)
        for c in reversed(mod):
            val = target.add_v(target.mul_v(val, cand), c)
        hits = np.nonzero(val == 0)[0]
        if len(hits) == 0:
            raise FieldError("no root of the source modulus in the target field")
        return FieldEmbedding(source, target, int(cand[hits[0]]))
    from .poly import poly_roots
    roots = poly_roots(target, tuple(mod))
    if not roots:
        raise FieldError("no root of the source modulus in the target field")
    return FieldEmbedding(source, target, min(roots))


# --- truncated unramified p-adic rings --------------------------------------

class PadicRing:
    """Z_p[X]/(f~, p^N) where f~ lifts the defining polynomial of F_{p^e}."""

    def __init__(self, field: FieldTable, precision: int = DEFAULT_PRECISION):
        if precision < 1:
            raise ValueError("precision must be at least 1")
        self.field = field
        self.p = field.p
        self.e = field.k
        self.N = precision
        self.mod = self.p ** precision
        self.modulus = field.modulus

    def __repr__(self):
        return f"PadicRing(p={self.p}, e={self.e}, N={self.N})"

    def __eq__(self, other):
        return isinstance(other, PadicRing) and (self.field, self.N) == (other.field, other.N)

    def __hash__(self):
        return hash((self.field, self.N))

    def _reduce(self, prod):
        k, M = self.e, self.mod
        mod = self.modulus
        prod = list(prod)
        for i in range(len(prod) - 1, k - 1, -1):
            c = prod[i]
            if c:
                for j in range(k):
                    prod[i - k + j] -= c * mod[j]
            prod[i] = 0
        out = [c % M for c in prod[:k]]
        out += [0] * (k - len(out))
        return tuple(out)

    def element(self, coeffs) -> "PadicScalar":
        c = [int(x) % self.mod for x in coeffs]
        c += [0] * (self.e - len(c))
        return PadicScalar(self, tuple(c[: self.e]) if len(c) <= self.e else self._reduce(c))

    def from_int(self, n: int) -> "PadicScalar":
        return PadicScalar(self, (n % self.mod,) + (0,) * (self.e - 1))

    def zero(self):
        return self.from_int(0)

    def one(self):
        return self.from_int(1)


class PadicScalar:
    """Element of a truncated unramified ring; valuation is tracked from digits."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: PadicRing, coeffs: tuple[int, ...]):
        self.ring = ring
        self.coeffs = coeffs

    def __repr__(self):
        return f"PadicScalar({list(self.coeffs)} mod {self.ring.p}^{self.ring.N})"

    def _coerce(self, other):
        if isinstance(other, PadicScalar):
            if other.ring != self.ring:
                raise ValueError("elements of different rings")
            return other
        return self.ring.from_int(int(other))

    def __add__(self, other):
        o = self._coerce(other)
        M = self.ring.mod
        return PadicScalar(self.ring, tuple((a + b) % M for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        M = self.ring.mod
        return PadicScalar(self.ring, tuple(-a % M for a in self.coeffs))

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, PadicScalar):
            M = self.ring.mod
            n = int(other)
            return PadicScalar(self.ring, tuple(a * n % M for a in self.coeffs))
        o = self._coerce(other)
        a, b = self.coeffs, o.coeffs
        prod = [0] * (2 * len(a) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] += x * y
        return PadicScalar(self.ring, self.ring._reduce(prod))

    __rmul__ = __mul__

    def __eq__(self, other):
        try:
            return self.coeffs == self._coerce(other).coeffs
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash((self.ring, self.coeffs))

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = self.ring.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    @property
    def valuation(self) -> int | float:
        """v_p of the element; math.inf when every tracked digit vanishes."""
        p = self.ring.p
        best = math.inf
        for c in self.coeffs:
            if c:
                v = 0
                while c % p == 0:
                    c //= p
                    v += 1
                best = min(best, v)
        return best

    def v_q(self, d: int) -> Fraction:
        v = self.valuation
        if v == math.inf:
            raise PrecisionError("element vanishes to the working precision")
        return Fraction(v, d)

    @property
    def unit(self) -> "PadicScalar":
        """The element divided by p^valuation (known to reduced precision)."""
        v = self.valuation
        if v == math.inf:
            raise PrecisionError("element vanishes to the working precision")
        p = self.ring.p
        return PadicScalar(self.ring, tuple(c // p ** v for c in self.coeffs))

    def residue(self) -> int:
        F = self.ring.field
        return F.from_vec([c % F.p for c in self.coeffs])

    def inverse(self) -> "PadicScalar":
        F = self.ring.field
        r = self.residue()
        if r == 0:
            raise ZeroDivisionError("not a unit")
        v = self.ring.element(F.to_vec(F.inv(r)))
        prec = 1
        while prec < self.ring.N:
            v = v * (2 - self * v)
            prec *= 2
        return v


def teichmuller(F: FieldTable, x: int, precision: int = DEFAULT_PRECISION,
                ring: PadicRing | None = None) -> PadicScalar:
    """Root of unity z with z = x mod p, by Newton iteration on z^(Q-1) = 1."""
    if precision < 1:
        raise ValueError("precision must be at least 1")
    if x == 0:
        raise ValueError("0 has no Teichmuller lift")
    R = ring or PadicRing(F, precision)
    z = R.element(F.to_vec(x))
    n = F.order - 1
    prec = 1
    while prec < R.N:
        w = z ** (n - 1)
        zn = w * z
        # z <- z - (z^n - 1) / (n z^(n-1))
        z = z - (zn - 1) * (w * n).inverse()
        prec *= 2
    return z
