"""Dense complex linear algebra kernels: matrix exponential, spectral norm,
commutators and nested adjoint actions.

Everything operates on plain ``numpy`` arrays (complex128). A thin
:class:`DenseOperator` wrapper carries the qubit-count bookkeeping and the
Hermiticity tag where callers want it; kernels accept either form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

SVD_CUTOFF_DIM = 512
POWER_ITER_TOL = 1e-12
POWER_ITER_MAX = 10_000


class DimensionError(ValueError):
    """Shape mismatch or non-square input."""


class NumericError(ValueError):
    """Non-finite entries where finite values are required."""


def _as_matrix(m) -> np.ndarray:
    a = np.asarray(getattr(m, "entries", m), dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    return a


@dataclass(frozen=True)
class DenseOperator:
    """A dense 2^n x 2^n complex matrix with its qubit count."""

    entries: np.ndarray
    n_qubits: int

    def __post_init__(self):
        d = self.entries.shape[0]
        if self.entries.shape != (d, d):
            raise DimensionError(f"non-square entries of shape {self.entries.shape}")
        if d != 2**self.n_qubits:
            raise DimensionError(f"dim {d} is not 2**{self.n_qubits}")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def require_hermitian(self, rtol: float = 1e-12) -> "DenseOperator":
        dev = np.linalg.norm(self.entries - self.entries.conj().T, 2)
        scale = max(np.linalg.norm(self.entries, 2), 1.0)
        if dev > rtol * scale:
            raise NumericError(f"matrix is not Hermitian: deviation {dev:.3e}")
        return self


def expm(m, z: complex = 1.0) -> np.ndarray:
    """exp(z*M) by Pade approximation with scaling and squaring.

    Backed by scipy's Al-Mohy/Higham implementation, which picks the squaring
    count from the scaled norm; relative accuracy is well below the 1e-12
    contract for the operator sizes used here.
    """
    a = _as_matrix(m)
    z = complex(z)
    if not np.isfinite(z) or not np.all(np.isfinite(a)):
        raise NumericError("non-finite input to expm")
    return scipy.linalg.expm(z * a)


def spectral_norm(m) -> float:
    """Largest singular value.

    Full SVD up to dim 512, power iteration on M^H M beyond (tolerance 1e-12,
    at most 10 000 iterations).
    """
    a = _as_matrix(m)
    if not np.all(np.isfinite(a)):
        raise NumericError("non-finite entries")
    if a.shape[0] <= SVD_CUTOFF_DIM:
        return float(np.linalg.svd(a, compute_uv=False)[0])
    h = a.conj().T @ a
    rng = np.random.default_rng(0)
    v = rng.standard_normal(a.shape[0]) + 1j * rng.standard_normal(a.shape[0])
    v /= np.linalg.norm(v)
    last = 0.0
    for _ in range(POWER_ITER_MAX):
        w = h @ v
        lam = float(np.linalg.norm(w))
        if lam == 0.0:
            return 0.0
        v = w / lam
        if abs(lam - last) <= POWER_ITER_TOL * lam:
            break
        last = lam
    return float(np.sqrt(lam))


def commutator(a, b) -> np.ndarray:
    a = _as_matrix(a)
    b = _as_matrix(b)
    if a.shape != b.shape:
        raise DimensionError(f"dimension mismatch {a.shape} vs {b.shape}")
    return a @ b - b @ a


def adjoint_power(a, b, j: int) -> np.ndarray:
    """Nested adjoint action ad_A^j(B); j = 0 returns B."""
    if j < 0:
        raise ValueError("j must be nonnegative")
    a = _as_matrix(a)
    m = _as_matrix(b)
    if a.shape != m.shape:
        raise DimensionError(f"dimension mismatch {a.shape} vs {m.shape}")
    for _ in range(j):
        m = a @ m - m @ a
    return m


def matrix_power(m, r: int) -> np.ndarray:
    """M^r by exponentiation-by-squaring (O(log r) multiplies)."""
    if r < 0:
        raise ValueError("r must be nonnegative")
    return np.linalg.matrix_power(_as_matrix(m), r)


def random_hermitian(dim: int, rng: np.random.Generator, norm: float = 1.0,
                     real: bool = False) -> np.ndarray:
    """Random Hermitian matrix rescaled to the requested spectral norm."""
    m = rng.standard_normal((dim, dim))
    if not real:
        m = m + 1j * rng.standard_normal((dim, dim))
    m = (m + m.conj().T) / 2
    return m * (norm / np.linalg.norm(m, 2))
