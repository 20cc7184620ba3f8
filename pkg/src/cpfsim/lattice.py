"""Benchmark lattice Hamiltonians as two-partition specs H = A + alpha*B.

Models: nearest-neighbour Heisenberg chain, transverse-field Ising chain, and
the spinless Hubbard chain (Jordan-Wigner mapped), all with periodic
boundaries. Site 0 is the most significant tensor factor.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .dense import DenseOperator

MAX_SITES = 12

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    # fermionic number operator in the occupation basis
    "N": np.array([[0, 0], [0, 1]], dtype=complex),
}


class PartitionError(ValueError):
    """Requested partition is not defined for these parameters."""


class ResourceError(ValueError):
    """System too large for dense assembly."""


@dataclass(frozen=True)
class OperatorTerm:
    """One weighted term: either a product of single-site factors, or a
    fermionic hop descriptor `hop=j` meaning c_j^dag c_{j+1} + h.c. (mod n)."""

    coefficient: float
    factors: tuple[tuple[int, str], ...] = ()
    hop: int | None = None


@dataclass(frozen=True)
class HamiltonianSpec:
    n: int
    terms_a: tuple[OperatorTerm, ...]
    terms_b: tuple[OperatorTerm, ...]
    alpha: float
    model_tag: str

    def __post_init__(self):
        for term in self.terms_a + self.terms_b:
            for site, label in term.factors:
                if not 0 <= site < self.n:
                    raise ValueError(f"site index {site} outside [0, {self.n})")
                if label not in PAULI:
                    raise ValueError(f"unknown single-site label {label!r}")


def _kron_factors(n: int, factors: dict[int, np.ndarray]) -> np.ndarray:
    out = np.array([[1.0]], dtype=complex)
    for site in range(n):
        out = np.kron(out, factors.get(site, PAULI["I"]))
    return out


def _hop_matrix(n: int, j: int) -> np.ndarray:
    """Jordan-Wigner image of c_j^dag c_{j+1} + h.c. with periodic wraparound.

    Interior hops reduce to (X_j X_{j+1} + Y_j Y_{j+1}) / 2; the wrap hop
    (n-1 -> 0) carries the parity string Z_1 .. Z_{n-2}.
    """
    if j < n - 1:
        return 0.5 * (
            _kron_factors(n, {j: PAULI["X"], j + 1: PAULI["X"]})
            + _kron_factors(n, {j: PAULI["Y"], j + 1: PAULI["Y"]})
        )
    string = {site: PAULI["Z"] for site in range(1, n - 1)}
    return 0.5 * (
        _kron_factors(n, {0: PAULI["X"], **string, n - 1: PAULI["X"]})
        + _kron_factors(n, {0: PAULI["Y"], **string, n - 1: PAULI["Y"]})
    )


def term_matrix(n: int, term: OperatorTerm) -> np.ndarray:
    if term.hop is not None:
        return term.coefficient * _hop_matrix(n, term.hop % n)
    factors = {site: PAULI[label] for site, label in term.factors}
    return term.coefficient * _kron_factors(n, factors)


@lru_cache(maxsize=64)
def _assemble_cached(spec: HamiltonianSpec, which: str) -> np.ndarray:
    dim = 2**spec.n
    out = np.zeros((dim, dim), dtype=complex)
    terms = spec.terms_a if which == "A" else spec.terms_b
    for term in terms:
        out += term_matrix(spec.n, term)
    out.setflags(write=False)
    return out


def assemble(spec: HamiltonianSpec, which: str = "full") -> DenseOperator:
    """Dense 2^n matrix of a partition or the full Hamiltonian A + alpha*B."""
    if spec.n > MAX_SITES:
        raise ResourceError(f"n = {spec.n} exceeds dense limit {MAX_SITES}")
    if which in ("A", "B"):
        entries = _assemble_cached(spec, which)
    elif which == "full":
        entries = _assemble_cached(spec, "A") + spec.alpha * _assemble_cached(spec, "B")
    else:
        raise ValueError(f"which must be 'A', 'B' or 'full', got {which!r}")
    return DenseOperator(entries, spec.n)


def partition_matrices(spec: HamiltonianSpec) -> tuple[np.ndarray, np.ndarray, float]:
    """(A, B, alpha) as plain arrays; the common input to formula evaluation."""
    return (
        _assemble_cached(spec, "A"),
        _assemble_cached(spec, "B"),
        spec.alpha,
    )


@lru_cache(maxsize=64)
def partition_eigh(spec: HamiltonianSpec, which: str):
    """Cached eigendecomposition of a (Hermitian) partition or the full H.

    The lattice partitions are exactly diagonalizable by construction, which
    makes every exponential of them a pair of dense multiplies.
    """
    if which == "full":
        mat = _assemble_cached(spec, "A") + spec.alpha * _assemble_cached(spec, "B")
    else:
        mat = _assemble_cached(spec, which)
    w, v = np.linalg.eigh(mat)
    w.setflags(write=False)
    v.setflags(write=False)
    return w, v


def eig_expm(spec: HamiltonianSpec, which: str, z: complex) -> np.ndarray:
    """expm(z * partition) through the cached eigendecomposition."""
    w, v = partition_eigh(spec, which)
    return (v * np.exp(z * w)) @ v.conj().T


def _bond_terms(n: int, bonds) -> tuple[OperatorTerm, ...]:
    terms = []
    for j in bonds:
        for label in ("X", "Y", "Z"):
            terms.append(
                OperatorTerm(1.0, factors=((j, label), ((j + 1) % n, label)))
            )
    return tuple(terms)


def build_heisenberg(n: int) -> HamiltonianSpec:
    """H = sum_j sigma_j . sigma_{j+1}; A = even bonds, B = odd bonds, alpha = 1.

    The even/odd bond split needs an even site count under periodic boundary.
    """
    if n % 2 != 0 or not 2 <= n <= MAX_SITES:
        raise PartitionError(f"heisenberg needs even n in [2, {MAX_SITES}], got {n}")
    return HamiltonianSpec(
        n=n,
        terms_a=_bond_terms(n, range(0, n, 2)),
        terms_b=_bond_terms(n, range(1, n, 2)),
        alpha=1.0,
        model_tag="heisenberg",
    )


def build_tfim(n: int, J: float = 1.0, h: float = 1.0,
               regime: str = "nonperturbed") -> HamiltonianSpec:
    """Transverse-field Ising chain J sum X_j X_{j+1} + h sum Z_j.

    nonperturbed: A = field, B = coupling, alpha = 1 (couplings as given).
    weak-coupling: A = field at h = 1, B = unit-strength coupling, alpha = J.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    field = tuple(OperatorTerm(1.0, factors=((j, "Z"),)) for j in range(n))
    coupling = tuple(
        OperatorTerm(1.0, factors=((j, "X"), ((j + 1) % n, "X"))) for j in range(n)
    )
    if regime == "nonperturbed":
        field = tuple(OperatorTerm(h, t.factors) for t in field)
        coupling = tuple(OperatorTerm(J, t.factors) for t in coupling)
        return HamiltonianSpec(n, field, coupling, 1.0, "tfim")
    if regime == "weak-coupling":
        return HamiltonianSpec(n, field, coupling, float(J), "tfim-weak")
    raise ValueError(f"unknown TFIM regime {regime!r}")


def build_hubbard_spinless(n: int, t_hop: float = 1.0, U_int: float = 1.0,
                           regime: str = "intermediate") -> HamiltonianSpec:
    """Spinless Hubbard chain: kinetic -t sum (c^dag_j c_{j+1} + h.c.) plus the
    nearest-neighbour density coupling U sum n_j n_{j+1}.

    intermediate: A = potential, B = kinetic, alpha = 1, U = t.
    weak-coupling: A = kinetic (t = 1), B = unit potential, alpha = U.
    weak-hopping: A = potential (U = 1), B = unit kinetic, alpha = t.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if t_hop <= 0 or U_int <= 0:
        raise ValueError("t_hop and U_int must be positive")

    def kinetic(t: float) -> tuple[OperatorTerm, ...]:
        return tuple(OperatorTerm(-t, hop=j) for j in range(n))

    def potential(u: float) -> tuple[OperatorTerm, ...]:
        return tuple(
            OperatorTerm(u, factors=((j, "N"), ((j + 1) % n, "N"))) for j in range(n)
        )

    if regime == "intermediate":
        return HamiltonianSpec(n, potential(U_int), kinetic(t_hop), 1.0, "hubbard")
    if regime == "weak-coupling":
        return HamiltonianSpec(n, kinetic(1.0), potential(1.0), float(U_int),
                               "hubbard-weak-coupling")
    if regime == "weak-hopping":
        return HamiltonianSpec(n, potential(1.0), kinetic(1.0), float(t_hop),
                               "hubbard-weak-hopping")
    raise ValueError(f"unknown Hubbard regime {regime!r}")


def build_model(model: str, regime: str | None, n: int, alpha: float = 1.0) -> HamiltonianSpec:
    """Config-key entry point used by the sweep harness."""
    if model == "heisenberg":
        return build_heisenberg(n)
    if model == "tfim":
        if regime in (None, "nonperturbed"):
            return build_tfim(n, regime="nonperturbed")
        if regime == "weak-coupling":
            return build_tfim(n, J=alpha, regime="weak-coupling")
    if model == "hubbard":
        if regime in (None, "intermediate"):
            return build_hubbard_spinless(n, 1.0, 1.0, "intermediate")
        if regime == "weak-coupling":
            return build_hubbard_spinless(n, 1.0, alpha, "weak-coupling")
        if regime == "weak-hopping":
            return build_hubbard_spinless(n, alpha, 1.0, "weak-hopping")
    raise ValueError(f"unknown model/regime {model!r}/{regime!r}")
