import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cpfsim.dense import (
    DenseOperator,
    DimensionError,
    NumericError,
    adjoint_power,
    commutator,
    expm,
    matrix_power,
    random_hermitian,
    spectral_norm,
)

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]])
Z = np.array([[1, 0], [0, -1]], dtype=complex)


def test_expm_zero_scalar_is_identity(rng):
    m = random_hermitian(8, rng)
    assert np.allclose(expm(m, 0.0), np.eye(8), atol=1e-15)


def test_expm_euler_identity_for_involution():
    out = expm(X, -1j * np.pi / 2)
    assert np.linalg.norm(out - (-1j) * X, 2) <= 1e-12


def test_expm_against_eigendecomposition_oracle(rng):
    m = random_hermitian(8, rng, norm=3.0)
    z = -0.3j
    w, v = np.linalg.eigh(m)
    oracle = (v * np.exp(z * w)) @ v.conj().T
    assert spectral_norm(expm(m, z) - oracle) <= 1e-12 * spectral_norm(oracle)


@given(st.floats(min_value=0.05, max_value=10.0), st.integers(0, 2**31 - 1))
@settings(max_examples=20, deadline=None)
def test_expm_inverse_property(scale, seed):
    # the simulation-relevant case: anti-Hermitian exponents of norm <= 10
    rng = np.random.default_rng(seed)
    m = random_hermitian(6, rng, norm=scale)
    prod = expm(m, 1j) @ expm(m, -1j)
    assert spectral_norm(prod - np.eye(6)) <= 1e-11


def test_expm_inverse_real_exponent_moderate_norm(rng):
    # real exponents stay invertible to 1e-11 while the conditioning
    # e^(2 norm) permits it
    m = random_hermitian(6, rng, norm=2.0)
    prod = expm(m, 1.0) @ expm(m, -1.0)
    assert spectral_norm(prod - np.eye(6)) <= 1e-11


def test_expm_rejects_nonsquare():
    with pytest.raises(DimensionError):
        expm(np.ones((2, 3)), 1.0)


def test_expm_rejects_nonfinite():
    bad = np.array([[np.inf, 0], [0, 1]])
    with pytest.raises(NumericError):
        expm(bad, 1.0)
    with pytest.raises(NumericError):
        expm(np.eye(2), np.nan)


def test_spectral_norm_identity_and_unitary():
    assert spectral_norm(np.eye(4)) == pytest.approx(1.0, abs=1e-14)
    assert spectral_norm(np.kron(X, Z)) == pytest.approx(1.0, abs=1e-12)


def test_spectral_norm_against_gram_oracle(rng):
    m = rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16))
    oracle = float(np.sqrt(np.max(np.linalg.eigvalsh(m.conj().T @ m))))
    assert spectral_norm(m) == pytest.approx(oracle, rel=1e-10)


def test_spectral_norm_power_iteration_branch(rng):
    m = rng.standard_normal((600, 600)) / 10
    assert spectral_norm(m) == pytest.approx(np.linalg.norm(m, 2), rel=1e-8)


@given(st.integers(0, 2**31 - 1))
@settings(max_examples=15, deadline=None)
def test_spectral_norm_submultiplicative(seed):
    rng = np.random.default_rng(seed)
    m = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    n = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    assert spectral_norm(m @ n) <= spectral_norm(m) * spectral_norm(n) + 1e-10


def test_adjoint_power_base_cases(rng):
    a = random_hermitian(4, rng)
    b = random_hermitian(4, rng)
    assert np.array_equal(adjoint_power(a, b, 0), b)
    assert spectral_norm(adjoint_power(a, a, 1)) == 0.0
    assert np.allclose(adjoint_power(X, Y, 1), 2j * Z)


def test_adjoint_power_matches_explicit_triple(rng):
    a = random_hermitian(4, rng)
    b = random_hermitian(4, rng)
    explicit = commutator(a, commutator(a, commutator(a, b)))
    assert np.allclose(adjoint_power(a, b, 3), explicit)


def test_commutator_antisymmetric_exactly(rng):
    a = random_hermitian(4, rng)
    b = random_hermitian(4, rng)
    assert np.array_equal(commutator(a, b), -commutator(b, a))


def test_adjoint_power_dimension_mismatch():
    with pytest.raises(DimensionError):
        adjoint_power(np.eye(2), np.eye(4), 1)


def test_matrix_power_matches_naive(rng):
    m = random_hermitian(5, rng)
    naive = np.eye(5, dtype=complex)
    for _ in range(7):
        naive = naive @ m
    assert np.allclose(matrix_power(m, 7), naive)


def test_dense_operator_wrapper(rng):
    m = random_hermitian(8, rng)
    op = DenseOperator(m, 3)
    assert op.dim == 8
    op.require_hermitian()
    with pytest.raises(DimensionError):
        DenseOperator(m, 4)
    with pytest.raises(NumericError):
        DenseOperator(m + 1e-6 * np.triu(np.ones((8, 8)), 1), 3).require_hermitian()
