from fractions import Fraction

import numpy as np
import pytest

from cpfsim.dense import expm, spectral_norm
from cpfsim.formulas import (
    GEN_A,
    GEN_B,
    ExpProduct,
    LargeStepWarning,
    Step,
    YoshidaWeights,
    evaluate,
    load_yoshida_weights,
    merge_steps,
    pf1,
    pf2,
    quartic_node,
    suzuki,
    trotterize,
    yoshida,
)
from cpfsim.harness import per_step_error
from cpfsim.fitting import windowed_slope
from cpfsim.lattice import build_tfim, partition_matrices
from cpfsim.correctors import cpf2_symplectic

WEIGHTS6 = "configs/yoshida6a.txt"


def test_pf1_structure_and_identity(heis4):
    p = pf1(0.0)
    assert p.exp_count == 2
    assert np.allclose(evaluate(p, heis4), np.eye(16))
    assert [s.gen for s in pf1(-0.1j).steps] == [GEN_A, GEN_B]


def test_pf1_warns_on_large_step():
    with pytest.warns(LargeStepWarning):
        pf1(1.5)


def test_pf2_time_reversal(heis4):
    lam = -0.31j
    prod = evaluate(pf2(lam), heis4) @ evaluate(pf2(-lam), heis4)
    assert spectral_norm(prod - np.eye(16)) <= 1e-12


def test_pf2_zero_is_identity(heis4):
    assert np.allclose(evaluate(pf2(0.0), heis4), np.eye(16))


def test_one_step_error_slopes(heis4):
    taus = np.geomspace(1e-3, 1e-2, 10)
    for sel, expected in (("pf1", 2), ("pf2", 3), ("pf4", 5)):
        pts = [(t, per_step_error(heis4, sel, t)) for t in taus]
        assert windowed_slope(pts) == pytest.approx(expected, abs=0.25)


def test_suzuki_node_value():
    assert quartic_node(3, 0j) == pytest.approx(0.4144907717943757, abs=1e-15)


def test_suzuki_base_case_is_pf2():
    assert suzuki(2, -0.2j).steps == pf2(-0.2j).steps


def test_suzuki_rejects_odd_order():
    with pytest.raises(ValueError):
        suzuki(3, 0.1)


@pytest.mark.filterwarnings("ignore::cpfsim.formulas.LargeStepWarning")
def test_suzuki_coefficient_sums_exact_rational_bookkeeping():
    # recursion preserves sum(A) = sum(B) = lambda identically in p_k;
    # verified with rational stand-ins for the nodes
    lam = Fraction(1)
    nodes = {2: Fraction(2, 5), 3: Fraction(-3, 7)}
    p = suzuki(6, lam, node_values=nodes)
    a_sum = sum(s.coeff for s in p.steps if s.gen == GEN_A)
    b_sum = sum(s.coeff for s in p.steps if s.gen == GEN_B)
    assert a_sum == lam and b_sum == lam


def test_suzuki_coefficient_sums_float():
    lam = -0.05j
    p = suzuki(6, lam)
    assert sum(s.coeff for s in p.steps if s.gen == GEN_A) == pytest.approx(lam, abs=1e-16)
    assert sum(s.coeff for s in p.steps if s.gen == GEN_B) == pytest.approx(lam, abs=1e-16)


def test_merge_steps_preserves_evaluation(heis4):
    lam = -0.21j
    raw = (Step(GEN_A, lam / 2), Step(GEN_A, lam / 2), Step(GEN_B, lam),
           Step(GEN_B, -lam), Step(GEN_A, lam / 4))
    # cancellation of the B pair cascades into one fused A step
    merged = merge_steps(raw)
    assert merged == (Step(GEN_A, lam * 1.25),)
    d = spectral_norm(
        evaluate(ExpProduct(raw), heis4) - evaluate(ExpProduct(merged), heis4)
    )
    assert d <= 1e-12


def test_yoshida_single_factor_is_pf2():
    w = YoshidaWeights(0, (1.0,))
    assert yoshida(w, -0.2j).steps == pf2(-0.2j).steps


def test_yoshida_weight_invariant_enforced():
    with pytest.raises(ValueError):
        YoshidaWeights(1, (0.5, 0.5))


def test_yoshida_loader_and_order(heis4):
    w = load_yoshida_weights(WEIGHTS6)
    assert w.m == 3
    assert w.w[0] + 2 * sum(w.w[1:]) == pytest.approx(1.0, abs=1e-12)
    # empirical order check before accepting the advertised sixth order
    taus = np.geomspace(0.02, 0.2, 8)
    pts = [(t, per_step_error(heis4, f"ypf:{WEIGHTS6}", t)) for t in taus]
    assert windowed_slope(pts) == pytest.approx(7.0, abs=0.35)


def test_yoshida_time_reversal(heis4):
    w = load_yoshida_weights(WEIGHTS6)
    lam = -0.19j
    prod = evaluate(yoshida(w, lam), heis4) @ evaluate(yoshida(w, -lam), heis4)
    assert spectral_norm(prod - np.eye(16)) <= 1e-12


def test_evaluate_pf1_is_two_exponentials():
    spec = build_tfim(2, J=0.3, regime="weak-coupling")
    a, b, alpha = partition_matrices(spec)
    lam = -0.4j
    direct = expm(a, lam) @ expm(b, lam * alpha)
    assert np.allclose(evaluate(pf1(lam), spec), direct, atol=1e-13)


def test_evaluate_unitary_for_imaginary_lambda(heis4):
    for build in (pf1, pf2, lambda l: suzuki(4, l)):
        u = evaluate(build(-0.23j), heis4)
        assert spectral_norm(u.conj().T @ u - np.eye(16)) <= 1e-11


def test_evaluate_mp_backend_matches_float(heis4):
    import mpmath

    lam = -0.11j
    ref = evaluate(pf2(lam), heis4)
    got = evaluate(pf2(mpmath.mpc(0, -0.11)), heis4, precision=30)
    from cpfsim.highprec import to_numpy

    assert spectral_norm(to_numpy(got) - ref) <= 1e-12


def test_trotterize_power_equals_repeated_product(heis4):
    lam = -0.12j
    p = pf2(lam)
    tp = trotterize(p, 5)
    single = evaluate(p, heis4)
    assert spectral_norm(evaluate(tp, heis4) - np.linalg.matrix_power(single, 5)) <= 1e-11


def test_trotterize_merges_and_telescopes(heis4):
    lam = -0.1j
    # unwrapped PF2: boundary A-halves merge
    tp = trotterize(pf2(lam), 3)
    assert tp.exp_count == 7
    assert tp.exp_count == len(tp.materialized_steps())
    # symplectic wrap: exactly two corrector exponentials regardless of r
    wrapped = cpf2_symplectic(1, 1.0, lam)
    for r in (1, 2, 7, 500):
        tw = trotterize(wrapped, r)
        assert tw.corrector_exp_count == 2
        if r <= 16:
            mat = tw.materialized_steps()
            assert tw.exp_count == len(mat)
            assert sum(1 for s in mat if s.is_corrector()) == 2


def test_trotterize_exp_count_formula_matches_materialization(heis4):
    from cpfsim.correctors import cpf2k_perturbed, corrected_yoshida
    from cpfsim.formulas import load_yoshida_weights

    lam = -0.06j
    candidates = [
        pf1(lam),
        suzuki(4, lam),
        cpf2_symplectic(2, 0.01, lam).as_product(),
        cpf2k_perturbed(4, 0.01, lam).as_product(),
        corrected_yoshida(load_yoshida_weights(WEIGHTS6), 3, 0.01, lam).as_product(),
    ]
    for prod in candidates:
        for r in (1, 2, 3, 9, 16):
            tp = trotterize(prod, r)
            assert tp.exp_count == len(tp.materialized_steps())


def test_trotterize_rejects_bad_r():
    with pytest.raises(ValueError):
        trotterize(pf2(-0.1j), 0)
