"""Shared measurement helpers for the kernel-expansion checks.

Both the unit tests and the acceptance suite run these; they implement the
kernel-residual fits used to verify the corrector expansions on random
Hermitian pairs.
"""

import numpy as np
import scipy.linalg

from cpfsim.correctors import custom_corrector, cpf2_symplectic
from cpfsim.dense import adjoint_power, random_hermitian
from cpfsim.formulas import evaluate


def pf1_corrector_cubic_term(seed: int, dim: int = 8, lam_grid=None):
    """Fit the lambda^3 coefficient matrix of the corrected-PF1 residual.

    Returns (fitted matrix, reference (1/24)[B,[B,A]], relative deviation).
    The corrector is the extended symplectic one at alpha = 1; the residual
    expm(lam H)^-1 (e^C S1 e^-C) - 1 is fitted entrywise over a lambda grid
    to lam^3 M3 + ... + lam^6 M6 and M3 is compared to the reference.
    """
    rng = np.random.default_rng(seed)
    a = random_hermitian(dim, rng)
    b = random_hermitian(dim, rng)
    lam_grid = np.linspace(0.012, 0.05, 8) if lam_grid is None else lam_grid
    rows = []
    for lam in lam_grid:
        prod = custom_corrector("pf1-symp-ext", 1.0, float(lam))
        approx = evaluate(prod, (a, b, 1.0))
        resid = scipy.linalg.expm(-lam * (a + b)) @ approx - np.eye(dim)
        rows.append(resid.ravel())
    powers = np.array([[lam**p for p in (3, 4, 5, 6)] for lam in lam_grid])
    coef, *_ = np.linalg.lstsq(powers, np.array(rows), rcond=None)
    fitted = coef[0].reshape(dim, dim)
    reference = adjoint_power(b, a, 2) / 24
    rel = np.linalg.norm(fitted - reference, 2) / np.linalg.norm(reference, 2)
    return fitted, reference, rel


def cpf2_alpha_linear_projections(seed: int, k: int, dim: int = 8,
                                  lam_grid=None, corrected: bool = True):
    """Fitted lambda^(2j+1) coefficients of the first-order-in-alpha residual
    of (corrected) PF2, projected on ad_A^(2j)(B), for j = 1..k.

    The first order in alpha is isolated by a complex step; with the
    corrector in place every fitted coefficient must vanish. Without it only
    the leading (j = 1) coefficient is cleanly identified, because the
    lambda^3 term also projects onto the higher words and corrupts their
    fits; the corrected case has no such cross-talk.
    """
    from cpfsim.formulas import pf2

    rng = np.random.default_rng(seed)
    a = random_hermitian(dim, rng, real=True)
    b = random_hermitian(dim, rng, real=True)
    h = 1e-150
    words = {j: adjoint_power(a, b, 2 * j).real for j in range(1, k + 1)}
    out = {}
    for j, w in words.items():
        # higher words need larger steps for signal above the derivative noise
        grid = (np.geomspace(0.015, 0.07, 12) * j if lam_grid is None
                else np.asarray(lam_grid))
        qs = []
        for lam in grid:
            lam = float(lam)
            if corrected:
                prod = cpf2_symplectic(k, 1j * h, lam)
            else:
                prod = pf2(lam)
            approx = evaluate(prod, (a, b, 1j * h))
            exact = scipy.linalg.expm(lam * a + 1j * h * lam * b)
            deriv = np.imag(approx - exact) / h
            qs.append(float(np.sum(w * deriv)) / float(np.sum(w * w)))
        basis = np.array([[lam ** (2 * j + 1 + p) for p in range(4)] for lam in grid])
        coef, *_ = np.linalg.lstsq(basis, np.array(qs), rcond=None)
        out[j] = coef[0]
    return out
