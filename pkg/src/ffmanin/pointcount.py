"""Traces of Frobenius for every fiber of y^2 = x^3 + A(t) x + B(t) over one field.

For a fixed A the map B -> -sum_x chi(x^3 + A x + B) is a correlation over the
additive group of F_Q = (Z/p)^K, so one n-dimensional FFT gives it for all B.
Every A != 0 is brought to one of gcd(4, Q-1) quartic class representatives by
the scaling (A, B) -> (A / u^4, B / u^6), which preserves the trace.
"""

from __future__ import annotations

import numpy as np

from .ff import FieldTable

FFT_MIN_FIBERS = 24


class TraceTable:
    """Lazily computed tables S_c(B) = sum_x chi(x^3 + c x + B) for class representatives c."""

    def __init__(self, K: FieldTable):
        if not K.has_tables:
            raise ValueError("bulk point counting needs log tables")
        self.K = K
        n = K.order - 1
        self.g4 = 4 if n % 4 == 0 else 2
        self._tables = {}
        self._chi_hat = None

    def _shape(self):
        return (self.K.p,) * self.K.k

    def _table(self, c: int) -> np.ndarray:
        if c in self._tables:
            return self._tables[c]
        K = self.K
        Q = K.order
        shape = self._shape()
        if self._chi_hat is None:
            chi = K.qchar_v(K.elements()).astype(np.float64)
            self._chi_hat = np.fft.fftn(chi.reshape(shape))
        x = K.elements()
        f = K.mul_v(K.add_v(K.mul_v(x, x), c), x)
        N = np.bincount(f, minlength=Q).astype(np.float64)
        Nrev = N[K.neg_v(K.elements())]
        S = np.fft.ifftn(np.fft.fftn(Nrev.reshape(shape)) * self._chi_hat).real.reshape(Q)
        Si = np.rint(S)
        err = np.abs(S - Si).max()
        if err > 0.25:
            raise ArithmeticError(f"FFT rounding error {err} too large")
        table = Si.astype(np.int64)
        self._tables[c] = table
        return table

    def traces(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        K = self.K
        A = np.asarray(A, dtype=np.int64)
        B = np.asarray(B, dtype=np.int64)
        out = np.empty(len(A), dtype=np.int64)
        zero = A == 0
        if zero.any():
            out[zero] = -self._table(0)[B[zero]]
        nz = ~zero
        if nz.any():
            n = K.order - 1
            g4 = self.g4
            lA = K.log[A[nz]]
            r = lA % g4
            m = n // g4
            inv = pow(4 // g4, -1, m) if m > 1 else 0
            ell = ((lA - r) // g4 * inv) % m
            # u = gamma^ell has u^4 = A / gamma^r
            B6 = K.mul_v(B[nz], K.exp[(-6 * ell) % n])
            res = np.empty(len(lA), dtype=np.int64)
            for rr in np.unique(r):
                sel = r == rr
                c = int(K.exp[rr])
                res[sel] = -self._table(c)[B6[sel]]
            out[nz] = res
        return out


def traces_direct(K: FieldTable, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """One vectorised character sum per fiber."""
    x = K.elements()
    x2 = K.mul_v(x, x)
    out = np.empty(len(A), dtype=np.int64)
    for i, (a, b) in enumerate(zip(np.asarray(A).tolist(), np.asarray(B).tolist())):
        f = K.add_v(K.mul_v(K.add_v(x2, a), x), b)
        out[i] = -int(K.qchar_v(f).sum())
    return out


def fiber_traces(K: FieldTable, A: np.ndarray, B: np.ndarray, method: str = "auto",
                 table: TraceTable | None = None) -> np.ndarray:
    A = np.asarray(A, dtype=np.int64)
    if method == "auto":
        method = "fft" if len(A) >= FFT_MIN_FIBERS and K.has_tables else "direct"
    if method == "fft":
        return (table or TraceTable(K)).traces(A, B)
    if method == "direct":
        return traces_direct(K, A, B)
    raise ValueError(f"unknown method {method!r}")
