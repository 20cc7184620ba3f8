"""Kernel-expansion property checks on random Hermitian pairs: the
corrected-PF1 cubic residual and the word-cancellation projections of the
high-order corrector."""

import numpy as np
import pytest
import scipy.linalg

from cpfsim.correctors import custom_corrector
from cpfsim.dense import random_hermitian, spectral_norm
from cpfsim.fitting import fit_loglog_slope
from cpfsim.formulas import evaluate

from helpers import cpf2_alpha_linear_projections, pf1_corrector_cubic_term


def test_pf1_corrector_residual_slope_and_coefficient(rng):
    # residual of the extended-symplectic corrected PF1 is third order and
    # its cubic coefficient matrix is (1/24)[B,[B,A]]
    a = random_hermitian(8, rng)
    b = random_hermitian(8, rng)
    pts = []
    for lam in np.geomspace(0.01, 0.08, 8):
        prod = custom_corrector("pf1-symp-ext", 1.0, float(lam))
        resid = scipy.linalg.expm(-lam * (a + b)) @ evaluate(prod, (a, b, 1.0)) \
            - np.eye(8)
        pts.append((float(lam), spectral_norm(resid)))
    assert fit_loglog_slope(pts)[0] == pytest.approx(3.0, abs=0.15)


@pytest.mark.parametrize("seed", range(20))
def test_pf1_corrector_cubic_matrix_20_seeds(seed):
    _, _, rel = pf1_corrector_cubic_term(seed)
    assert rel <= 1e-6


@pytest.mark.parametrize("seed", range(20))
def test_cpf2_corrector_removes_alpha_linear_words(seed):
    for k in (1, 2, 3):
        coefs = cpf2_alpha_linear_projections(seed, k=k)
        assert max(abs(v) for v in coefs.values()) <= 1e-8


def test_uncorrected_control_recovers_bernoulli_factor():
    coefs = cpf2_alpha_linear_projections(3, k=1, corrected=False)
    assert coefs[1] == pytest.approx(-1 / 24, rel=1e-6)
