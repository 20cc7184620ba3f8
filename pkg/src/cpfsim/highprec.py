"""Optional high-precision evaluation backend (mpmath).

The float64 kernels hit an absolute noise floor around r * eps when r-fold
products of 2^n-dim steps are compared against the exact evolution. The
highest-order scaling claims (lambda^7 one-step errors, alpha^2 tails at
tau = 1e-2) sit below that floor, so the measurement layer can switch to
mpmath matrices. Formula coefficients are rebuilt in working precision to
keep the alpha -> 0 limit exact.
"""

from __future__ import annotations

import mpmath
import numpy as np
from mpmath import mp


def mpc_(x) -> mpmath.mpc:
    """Coerce a python/numpy scalar to mpc without double rounding."""
    if isinstance(x, (mpmath.mpc, mpmath.mpf)):
        return mpmath.mpc(x)
    xc = complex(x)
    return mpmath.mpc(xc.real, xc.imag)


def to_mp(a: np.ndarray) -> mpmath.matrix:
    d0, d1 = a.shape
    m = mpmath.matrix(d0, d1)
    for i in range(d0):
        for j in range(d1):
            v = complex(a[i, j])
            m[i, j] = mpmath.mpc(v.real, v.imag)
    return m


def to_numpy(m: mpmath.matrix) -> np.ndarray:
    return np.array([[complex(m[i, j]) for j in range(m.cols)] for i in range(m.rows)])


def expm(m: mpmath.matrix, z=1) -> mpmath.matrix:
    return mpmath.expm(m * mpc_(z))


def matmul(a: mpmath.matrix, b: mpmath.matrix) -> mpmath.matrix:
    return a * b


def identity(dim: int) -> mpmath.matrix:
    return mp.eye(dim)


def matrix_power(m: mpmath.matrix, r: int) -> mpmath.matrix:
    out = mp.eye(m.rows)
    base = m
    while r:
        if r & 1:
            out = out * base
        base = base * base
        r >>= 1
    return out


def spectral_norm(m: mpmath.matrix, iterations: int = 300) -> mpmath.mpf:
    """Largest singular value by power iteration on M^H M."""
    h = m.H * m
    dim = m.cols
    v = mpmath.matrix([mp.mpf(1) + mp.mpf(i) / dim for i in range(dim)])
    lam = mp.mpf(0)
    tol = mp.mpf(10) ** (-mp.dps + 6)
    for _ in range(iterations):
        w = h * v
        nxt = mp.sqrt(sum(abs(w[i]) ** 2 for i in range(dim)))
        if nxt == 0:
            return mp.mpf(0)
        v = w / nxt
        if abs(nxt - lam) <= tol * nxt:
            lam = nxt
            break
        lam = nxt
    return mp.sqrt(lam)


class working_dps:
    """Context manager bumping mpmath working precision."""

    def __init__(self, dps: int):
        self.dps = dps
        self._saved = None

    def __enter__(self):
        self._saved = mp.dps
        mp.dps = self.dps
        return self

    def __exit__(self, *exc):
        mp.dps = self._saved
        return False
