"""L-functions of elliptic curves over F_q(T): Euler data, assembly, completion, twists.

Power sums C_k of the reciprocal roots are accumulated place by place in the
group ring Z[Z/R] (R = 1 for the untwisted L-function) and turned into
coefficients with Newton's identities k b_k = sum_{i=1}^{k} C_i b_{k-i}.
"""

from __future__ import annotations

import json
import math
import os
import sys
import tempfile
import threading
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import __version__
from .curve import (WeierstrassCurve, global_reduction, is_isotrivial, minimal_model_at,
                    trace_direct, _eval_in)
from .cyclo import Cyclo
from .ff import DEFAULT_PRECISION, PadicScalar
from .funcfield import (DirichletCharacter, Divisor, Place, extension, minimal_polys,
                        orbit_representatives)
from .padic import ValuedPoly, l_q, newton_polygon
from .poly import Poly, poly_roots
from .pointcount import TraceTable, fiber_traces


class LFunctionError(ArithmeticError):
    pass


class FeasibilityError(LFunctionError):
    """The requested expansion needs fields beyond the table limit."""


# --- persistent trace cache -----------------------------------------------------------

class EulerCache:
    """Line-based store of traces keyed by (curve fingerprint, place, extension degree).

    File layout: a header "# ffmanin-cache p=<p> d=<d> version=<v>" followed by
    lines "fingerprint,place,ext_degree,trace". Conflicting values are rejected.
    """

    def __init__(self, path: str | None, p: int, d: int):
        self.path = path
        self.p = p
        self.d = d
        self._data: dict = {}
        self._dirty = False
        self._lock = threading.Lock()
        if path and os.path.exists(path):
            self._load()

    def header(self):
        return f"# ffmanin-cache p={self.p} d={self.d} version={__version__}"

    def _load(self):
        with open(self.path) as fh:
            lines = fh.read().splitlines()
        if not lines or not lines[0].startswith("# ffmanin-cache"):
            raise ValueError(f"{self.path} is not a trace cache")
        fields = dict(kv.split("=", 1) for kv in lines[0].split()[2:])
        if int(fields["p"]) != self.p or int(fields["d"]) != self.d:
            raise ValueError(f"cache {self.path} belongs to p={fields['p']} d={fields['d']}")
        for ln in lines[1:]:
            if not ln.strip():
                continue
            fp, place, ext, tr = ln.split(",")
            self._put((fp, place, int(ext)), int(tr))

    def _put(self, key, value):
        old = self._data.get(key)
        if old is not None and old != value:
            raise ValueError(f"conflicting cached trace for {key}: {old} != {value}")
        if old is None:
            self._data[key] = value
            self._dirty = True

    def get(self, fp, place, ext):
        return self._data.get((fp, place, ext))

    def put(self, fp, place, ext, value):
        with self._lock:
            self._put((fp, place, ext), int(value))

    def __len__(self):
        return len(self._data)

    def entries(self):
        return sorted(self._data.items())

    def save(self):
        if not self.path or not self._dirty:
            return
        with self._lock:
            directory = os.path.dirname(os.path.abspath(self.path))
            fd, tmp = tempfile.mkstemp(dir=directory, prefix=".cache-")
            with os.fdopen(fd, "w") as fh:
                fh.write(self.header() + "\n")
                for (fp, place, ext), tr in sorted(self._data.items()):
                    fh.write(f"{fp},{place},{ext},{tr}\n")
            os.replace(tmp, self.path)
            self._dirty = False

    def clear(self):
        self._data.clear()
        if self.path and os.path.exists(self.path):
            os.remove(self.path)


def place_key(coeffs) -> str:
    return ":".join(str(int(c)) for c in coeffs)


# --- Euler data -------------------------------------------------------------------------

KIND_GOOD, KIND_MULT, KIND_ADD = 0, 1, 2


@dataclass
class DegreeData:
    """Places of one degree e: representatives in F_{q^e}, reduction kind and trace."""
    e: int
    reps: np.ndarray
    kind: np.ndarray
    trace: np.ndarray
    infinity: bool = False


class EulerData:
    """Per-place Frobenius traces of a curve, computed degree by degree."""

    def __init__(self, E: WeierstrassCurve, cache: EulerCache | None = None,
                 method: str = "auto", progress: int | None = None):
        """progress: report counts over places of at least this degree on stderr."""
        if is_isotrivial(E):
            raise LFunctionError("isotrivial curve")
        self.E = E
        self.F = E.F
        self.q = E.q
        self.cache = cache
        self.method = method
        self.progress = progress
        self.reduction = global_reduction(E)
        self._degrees: dict = {}
        self._inf = None
        self._lock = threading.RLock()

    @property
    def conductor_degree(self):
        return self.reduction.deg_conductor

    def infinity_data(self) -> DegreeData:
        with self._lock:
            return self._infinity_data()

    def _infinity_data(self) -> DegreeData:
        if self._inf is None:
            red = self.reduction.at(Place.infinity())
            if red.is_good:
                c4, c6 = minimal_model_at(self.E, Place.infinity())
                K, emb = extension(self.F, 1)
                A = K.mul(K.neg(27 % K.p), _eval_in(K, emb, c4, 0))
                B = K.mul(K.neg(54 % K.p), _eval_in(K, emb, c6, 0))
                kind, tr = KIND_GOOD, trace_direct(K, A, B)
            else:
                kind = KIND_MULT if red.is_multiplicative else KIND_ADD
                tr = red.bad_trace
            self._inf = DegreeData(1, np.array([-1]), np.array([kind]), np.array([tr]), True)
        return self._inf

    def degree(self, e: int) -> DegreeData:
        with self._lock:
            if e not in self._degrees:
                self._degrees[e] = self._compute_degree(e)
            return self._degrees[e]

    def _compute_degree(self, e: int) -> DegreeData:
        F, E = self.F, self.E
        K, emb = extension(F, e)
        if not K.has_tables:
            raise FeasibilityError(f"places of degree {e} need F_{K.order}, beyond the table limit")
        reps = orbit_representatives(F, e)
        n = len(reps)
        kind = np.zeros(n, dtype=np.int64)
        trace = np.zeros(n, dtype=np.int64)
        special = np.zeros(n, dtype=bool)
        for red in self.reduction.local:
            x = red.place
            if x.is_infinity or x.degree != e:
                continue
            vals = np.zeros(n, dtype=np.int64)
            for a in reversed(x.coeffs):
                vals = K.add_v(K.mul_v(vals, reps), emb(a))
            hit = np.nonzero(vals == 0)[0]
            if len(hit) != 1:
                raise LFunctionError(f"place {x!r} does not match exactly one representative")
            i = hit[0]
            special[i] = True
            if red.is_good:
                c4, c6 = minimal_model_at(E, x)
                A = K.mul(K.neg(27 % K.p), _eval_in(K, emb, c4, int(reps[i])))
                B = K.mul(K.neg(54 % K.p), _eval_in(K, emb, c6, int(reps[i])))
                trace[i] = trace_direct(K, A, B)
            else:
                kind[i] = KIND_MULT if red.is_multiplicative else KIND_ADD
                trace[i] = red.bad_trace
        gen = np.nonzero(~special)[0]
        fp = self.E.fingerprint()
        labels = None
        cached = None
        if self.cache is not None and len(gen):
            labels = [place_key(c) for c in minimal_polys(F, e, reps[gen])]
            got = [self.cache.get(fp, lb, 1) for lb in labels]
            if all(g is not None for g in got):
                cached = np.array(got, dtype=np.int64)
        if cached is not None:
            trace[gen] = cached
        elif len(gen):
            if self.progress is not None and e >= self.progress:
                print(f"[count] degree {e}: {len(gen)} places over F_{K.order}", file=sys.stderr)
            A, B = self._short_coefficients(K, emb, reps[gen])
            trace[gen] = fiber_traces(K, A, B, self.method)
            if self.cache is not None:
                for lb, tr in zip(labels, trace[gen].tolist()):
                    self.cache.put(fp, lb, 1, tr)
        return DegreeData(e, reps, kind, trace)

    def _short_coefficients(self, K, emb, xs):
        inv = self.E.invariants()
        out = []
        for f, scale in ((inv.c4, -27), (inv.c6, -54)):
            num = np.zeros(len(xs), dtype=np.int64)
            for a in reversed(f.num.c):
                num = K.add_v(K.mul_v(num, xs), emb(a))
            den = np.zeros(len(xs), dtype=np.int64)
            for a in reversed(f.den.c):
                den = K.add_v(K.mul_v(den, xs), emb(a))
            val = K.mul_v(num, K.inv_v(den))
            out.append(K.mul_v(val, scale % K.p))
        return out[0], out[1]

    def place_list(self, max_degree: int):
        """[(Place, kind, trace)] for all places of degree <= max_degree (slow; for reports)."""
        out = []
        for e in range(1, max_degree + 1):
            D = self.degree(e)
            polys = minimal_polys(self.F, e, D.reps)
            for c, k, t in zip(polys, D.kind.tolist(), D.trace.tolist()):
                out.append((Place(e, tuple(int(x) for x in c)), k, t))
        I = self.infinity_data()
        out.append((Place.infinity(), int(I.kind[0]), int(I.trace[0])))
        return out


def _power_sum_arrays(kind, trace, qe, mmax, big):
    """p_m for m = 1..mmax for every place (object dtype when values may overflow)."""
    dt = object if big else np.int64
    a = trace.astype(dt)
    good = kind == KIND_GOOD
    mult = kind == KIND_MULT
    out = []
    p_prev2 = np.full(len(a), 2, dtype=dt)
    p_prev = a.copy()
    for m in range(1, mmax + 1):
        if m == 1:
            pm = a.copy()
        else:
            pm = a * p_prev - qe * p_prev2
            p_prev2, p_prev = p_prev, pm
        vals = np.where(good, pm, np.where(mult, a ** m, 0))
        out.append(vals)
    return out


def power_sums(data: EulerData, kmax: int, chi: DirichletCharacter | None = None):
    """C_1..C_kmax as length-R integer vectors (R = 1 when chi is None)."""
    R = 1 if chi is None else chi.R
    q = data.q
    big = q ** kmax >= 2 ** 55
    C = [np.zeros(R, dtype=object) for _ in range(kmax + 1)]
    blocks = [data.degree(e) for e in range(1, kmax + 1)] + [data.infinity_data()]
    for D in blocks:
        e = D.e
        mmax = kmax // e
        if chi is None:
            beta = np.zeros(len(D.reps), dtype=np.int64)
        elif D.infinity:
            beta = np.array([chi.z_scale % R])
        else:
            beta = chi.fiber_exponents(e, D.reps)
        live = beta >= 0
        kind, trace, beta = D.kind[live], D.trace[live], beta[live]
        sums = _power_sum_arrays(kind, trace, q ** e, mmax, big)
        for m in range(1, mmax + 1):
            vals = sums[m - 1]
            if R == 1:
                C[e * m][0] += e * int(vals.sum())
            else:
                idx = (beta * m) % R
                acc = np.zeros(R, dtype=object)
                for r in np.unique(idx):
                    acc[r] += int(vals[idx == r].sum())
                C[e * m] += e * acc
    return C


def newton_identities(C, R: int):
    """b_0..b_K from power sums C_1..C_K (group-ring vectors), exactly."""
    K = len(C) - 1
    if R == 1:
        cs = [int(c[0]) for c in C]
        b = [1]
        for k in range(1, K + 1):
            s = sum(cs[i] * b[k - i] for i in range(1, k + 1))
            if s % k:
                raise LFunctionError(f"Newton identity not integral at k={k}")
            b.append(s // k)
        return b
    cs = [None] + [Cyclo(R, list(c)) for c in C[1:]]
    b = [Cyclo.from_int(R, 1)]
    for k in range(1, K + 1):
        s = Cyclo.from_int(R, 0)
        for i in range(1, k + 1):
            s = s + cs[i] * b[k - i]
        b.append(s.exact_div(k))
    return b


# --- L-polynomial container ---------------------------------------------------------------

@dataclass
class LPolynomial:
    coefficients: list  # ints or Cyclo
    degree: int
    p: int
    d: int
    provenance: list
    sign: int | None = None
    epsilon: object = None
    R: int = 1
    zeta_exp_step: int = 0
    mode: str = "full"
    notes: list = field(default_factory=list)

    @property
    def q(self):
        return self.p ** self.d

    @property
    def twisted(self):
        return self.R > 1

    def valued_poly(self, precision: int = DEFAULT_PRECISION) -> ValuedPoly:
        if not self.twisted:
            return ValuedPoly(self.coefficients, self.p, self.d)
        zeta = self.zeta_padic(precision)
        return ValuedPoly([c.to_padic(zeta) for c in self.coefficients], self.p, self.d)

    def zeta_padic(self, precision: int = DEFAULT_PRECISION) -> PadicScalar:
        from .ff import build_field, teichmuller
        F = build_field(self.p, self.d)
        return teichmuller(F, F.pow(F.generator, self.zeta_exp_step), precision)

    def newton_polygon(self, precision: int = DEFAULT_PRECISION):
        return newton_polygon(self.valued_poly(precision))

    def slopes(self, precision: int = DEFAULT_PRECISION):
        return self.newton_polygon(precision).slopes()

    def l_q(self, precision: int = DEFAULT_PRECISION) -> Fraction:
        return l_q(self.valued_poly(precision))

    def counted_through(self) -> int:
        k = -1
        for i, src in enumerate(self.provenance):
            if src != "counted":
                break
            k = i
        return k

    def to_json(self, precision: int = DEFAULT_PRECISION) -> dict:
        if self.twisted:
            coeffs = [[str(x) for x in c.c] for c in self.coefficients]
        else:
            coeffs = [str(c) for c in self.coefficients]
        slopes = self.slopes(precision)
        return {
            "degree": self.degree,
            "coefficients": coeffs,
            "cyclotomic_order": self.R,
            "sign": self.sign,
            "provenance": self.provenance,
            "slopes": [str(s) for s in slopes],
            "l_q": str(self.l_q(precision)),
        }


def _conj(x):
    return x.conj() if isinstance(x, Cyclo) else x


def cyclo_divide(a: Cyclo, b: Cyclo) -> Cyclo:
    """a / b in Z[zeta_R]; raises if the quotient is not integral."""
    R = a.R
    n = len(a.c)
    cols = []
    for j in range(n):
        cols.append((b * Cyclo.zeta_power(R, j)).c)
    M = [[Fraction(cols[j][i]) for j in range(n)] + [Fraction(a.c[i])] for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("division by zero in Z[zeta]")
        M[col], M[piv] = M[piv], M[col]
        pv = M[col][col]
        M[col] = [x / pv for x in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    sol = [M[i][n] for i in range(n)]
    if any(s.denominator != 1 for s in sol):
        raise LFunctionError("quotient is not a cyclotomic integer")
    return Cyclo(R, [int(s) for s in sol])


def _solve_epsilon(b, delta, q, counted):
    """epsilon from b_{delta-k} = epsilon q^{-2k} conj(b_k) using a counted pair."""
    for k in range(0, delta + 1):
        j = delta - k
        if j > counted or k > counted:
            continue
        bk = _conj(b[k])
        if (bk == 0) if not isinstance(bk, Cyclo) else bk.is_zero():
            continue
        num = b[j] * q ** (2 * k)
        if isinstance(bk, Cyclo):
            return cyclo_divide(num, bk)
        if num % bk:
            raise LFunctionError("epsilon is not integral")
        return num // bk
    return None


def _fill_from_epsilon(b, delta, q, eps):
    full = list(b[: delta + 1]) + [None] * max(0, delta + 1 - len(b))
    prov = ["counted" if i < len(b) else "completed" for i in range(delta + 1)]
    for k in range(delta + 1):
        j = delta - k
        val = eps * _conj(b[k]) if k < len(b) else None
        if val is None:
            continue
        # val = q^{2k} b_{delta-k}
        if isinstance(val, Cyclo):
            val = val.exact_div(q ** (2 * k))
        else:
            if val % q ** (2 * k):
                raise LFunctionError("completed coefficient is not integral")
            val //= q ** (2 * k)
        if j < len(b):
            if full[j] != val:
                raise LFunctionError(f"functional equation violated at t^{j}")
        else:
            full[j] = val
    if any(x is None for x in full):
        raise LFunctionError("too few counted coefficients to complete")
    return full, prov


def _sign_of(eps, q, delta):
    if isinstance(eps, Cyclo):
        if not eps.is_rational():
            return None
        eps = eps.as_int()
    if eps == q ** delta:
        return 1
    if eps == -(q ** delta):
        return -1
    return None


def expected_degree(data: EulerData, chi: DirichletCharacter | None = None) -> int:
    extra = 0 if chi is None else 2 * chi.conductor_degree
    return data.conductor_degree + extra - 4


def _assemble(data: EulerData, chi, mode: str, tail: int, extra_counted: int = 0):
    delta = expected_degree(data, chi)
    if delta < 0:
        raise LFunctionError(f"negative L-degree {delta}: conductor too small")
    if chi is not None:
        bad = {r.place for r in data.reduction.bad()}
        if any(P in bad for P in chi.conductor_places()):
            raise LFunctionError("character conductor meets the curve conductor")
    R = 1 if chi is None else chi.R
    q = data.q
    step = 0 if chi is None else (q - 1) // chi.R
    if mode == "full":
        K = delta + tail
        b = newton_identities(power_sums(data, K, chi), R)
        for k in range(delta + 1, K + 1):
            zero = b[k] == 0 if R == 1 else b[k].is_zero()
            if not zero:
                raise LFunctionError(f"coefficient of t^{k} beyond degree {delta} is nonzero: {b[k]}")
        b = b[: delta + 1]
        eps = b[delta]
        prov = ["counted"] * (delta + 1)
        _fill_from_epsilon(b, delta, q, eps)  # verifies the functional equation
        sign = _sign_of(eps, q, delta) if R == 1 else None
        if R == 1 and sign is None:
            raise LFunctionError("leading coefficient is not +-q^delta")
        return LPolynomial(b, delta, data.F.p, data.F.k, prov, sign, eps, R, step, "full")
    if mode != "completed":
        raise ValueError(f"unknown mode {mode!r}")
    K = (delta + 1) // 2 + extra_counted
    while True:
        K = min(K, delta)
        b = newton_identities(power_sums(data, K, chi), R)
        eps = _solve_epsilon(b, delta, q, K)
        if eps is not None or K == delta:
            break
        K += 1
    if eps is None:
        raise LFunctionError("sign of the functional equation is indeterminable")
    full, prov = _fill_from_epsilon(b, delta, q, eps)
    sign = _sign_of(eps, q, delta) if R == 1 else None
    if R == 1 and sign is None:
        raise LFunctionError(f"functional equation constant {eps} is not +-q^delta")
    return LPolynomial(full, delta, data.F.p, data.F.k, prov, sign, eps, R, step, "completed")


def lfunction(E, mode: str = "completed", cache: EulerCache | None = None,
              data: EulerData | None = None, tail: int = 0, progress: int | None = None) -> LPolynomial:
    """L(E, t) of degree deg(conductor) - 4."""
    data = data or EulerData(E, cache, progress=progress)
    return _assemble(data, None, mode, tail)


def twisted_lfunction(E, chi: DirichletCharacter, mode: str = "full", tail: int = 2,
                      cache: EulerCache | None = None, data: EulerData | None = None,
                      progress: int | None = None) -> LPolynomial:
    """L(sigma_E x alpha, t) for a tame character prime to the conductor."""
    data = data or EulerData(E, cache, progress=progress)
    return _assemble(data, chi, mode, tail)


def epsilon_from_leading(L: LPolynomial, precision: int = DEFAULT_PRECISION):
    """(epsilon, v_q(epsilon)) where epsilon is the leading coefficient."""
    eps = L.coefficients[L.degree]
    return eps, L.valued_poly(precision).v_q(L.degree)


# --- local factors and Fourier coefficients ---------------------------------------------

def euler_factor(E: WeierstrassCurve, x: Place) -> list:
    """Local polynomial in T = t^deg(x): [1, -a, q^deg] at good x, [1, -+1] or [1] at bad x."""
    from .curve import local_reduction, trace_of_frobenius
    red = local_reduction(E, x)
    if red.is_good:
        a = trace_of_frobenius(E, x)
        return [1, -a, E.q ** x.degree]
    if red.is_multiplicative:
        return [1, -red.bad_trace]
    return [1]


def _local_series(factor, n):
    """Coefficients c_0..c_n of 1 / factor(T)."""
    c = [Fraction(1)]
    for m in range(1, n + 1):
        s = Fraction(0)
        for i in range(1, min(m, len(factor) - 1) + 1):
            s -= factor[i] * c[m - i]
        c.append(s)
    return c


def fourier_coefficient(E: WeierstrassCurve, m: Divisor) -> Fraction:
    """Normalised a(m) = prod over x^n || m of c_n q^(-n deg x)."""
    if not m.is_effective():
        return Fraction(0)
    out = Fraction(1)
    for x, n in m:
        if n == 0:
            continue
        c = _local_series(euler_factor(E, x), n)[n]
        out *= c / Fraction(E.q) ** (n * x.degree)
    return out


def g_factor(E: WeierstrassCurve, chi: DirichletCharacter | None, c: Divisor):
    """prod over x in supp(c) minus supp(cond chi) of -1 + a_x alpha(x) t^e - alpha(x)^2 t^2e.

    Coefficients are Cyclo elements of order R (R = 1 without a character).
    """
    from .curve import local_reduction, trace_of_frobenius
    R = 1 if chi is None else chi.R
    cond = set() if chi is None else set(chi.conductor_places())
    bad = {r.place for r in global_reduction(E).bad()}
    out = [Cyclo.from_int(R, 1)]
    for x, mult in c:
        if mult != 1 or x.is_infinity:
            raise ValueError("c must be a squarefree effective divisor of finite places")
        if x in bad:
            raise ValueError("c must be prime to the conductor")
        if x in cond:
            continue
        a = trace_of_frobenius(E, x)
        ex = 0 if chi is None else chi.place_exponent(x)
        al = Cyclo.zeta_power(R, ex)
        e = x.degree
        fac = [Cyclo.from_int(R, 0)] * (2 * e + 1)
        fac[0] = Cyclo.from_int(R, -1)
        fac[e] = al * a
        fac[2 * e] = -(al * al)
        prod = [Cyclo.from_int(R, 0)] * (len(out) + 2 * e)
        for i, u in enumerate(out):
            for j, v in enumerate(fac):
                if not v.is_zero():
                    prod[i + j] = prod[i + j] + u * v
        out = prod
    return out


def log_derivative_check(E: WeierstrassCurve, k: int, data: EulerData | None = None,
                         perturb: dict | None = None) -> int:
    """Sum of fiber traces over P^1(F_{q^k}) plus bad-place terms, minus the Euler-data C_k.

    The fiber side walks every t0 in F_{q^k} independently of the orbit bookkeeping.
    perturb maps (degree, index) -> added trace, for negative tests.
    """
    data = data or EulerData(E)
    if perturb:
        for (e, i), delta in perturb.items():
            D = data.degree(e)
            D.trace = D.trace.copy()
            D.trace[i] += delta
    C = power_sums(data, k)[k][0]
    F = E.F
    K, emb = extension(F, k)
    xs = K.elements()
    total = 0
    red_by_place = {r.place: r for r in data.reduction.local if not r.place.is_infinity}
    special = np.zeros(len(xs), dtype=bool)
    for x, red in red_by_place.items():
        vals = np.zeros(len(xs), dtype=np.int64)
        for a in reversed(x.coeffs):
            vals = K.add_v(K.mul_v(vals, xs), emb(a))
        roots = np.nonzero(vals == 0)[0]
        special[roots] = True
        if len(roots) == 0:
            continue
        # x splits into deg(x) points over F_{q^k} when deg x | k; each sees Frobenius^(k/deg x)
        m = k // x.degree
        if red.is_good:
            c4, c6 = minimal_model_at(E, x)
            for r in roots.tolist():
                A = K.mul(K.neg(27 % K.p), _eval_in(K, emb, c4, r))
                B = K.mul(K.neg(54 % K.p), _eval_in(K, emb, c6, r))
                total += trace_direct(K, A, B)
        else:
            total += len(roots) * red.bad_trace ** m
    gen = np.nonzero(~special)[0]
    A, B = data._short_coefficients(K, emb, xs[gen])
    total += int(fiber_traces(K, A, B, "direct").sum())
    red = data.reduction.at(Place.infinity())
    if red.is_good:
        c4, c6 = minimal_model_at(E, Place.infinity())
        A = K.mul(K.neg(27 % K.p), _eval_in(K, emb, c4, 0))
        B = K.mul(K.neg(54 % K.p), _eval_in(K, emb, c6, 0))
        total += trace_direct(K, A, B)
    else:
        total += red.bad_trace ** k
    return total - C
