"""Corrected product formulas for two-partition lattice Hamiltonians."""

from .compilers import (
    CompiledCorrector,
    build_Y,
    compilation_error,
    compile_Ck,
    compile_single_term,
    compile_recipe,
)
from .correctors import (
    BoundCorrector,
    CommutatorExpr,
    CorrectedFormula,
    corrector_Ck,
    corrected_yoshida,
    cpf2_symplectic,
    cpf2k_nonperturbed,
    cpf2k_perturbed,
    cpf4_constants,
    cpf4_symplectic,
    estimate_leading_coefficient,
    custom_corrector,
    ypf_symplectic,
)
from .dense import (
    DenseOperator,
    adjoint_power,
    commutator,
    expm,
    matrix_power,
    random_hermitian,
    spectral_norm,
)
from .exact import (
    bernoulli_half,
    bernoulli_number,
    solve_single_term_b,
    solve_vandermonde_b,
    vandermonde_inverse,
)
from .fitting import fit_loglog_slope, slope_window, windowed_slope
from .formulas import (
    ExpProduct,
    Step,
    TrotterizedProduct,
    YoshidaWeights,
    evaluate,
    load_yoshida_weights,
    merge_steps,
    pf1,
    pf2,
    suzuki,
    trotterize,
    yoshida,
)
from .harness import (
    SweepConfig,
    SweepResult,
    build_formula,
    per_step_error,
    per_step_triangle_estimate,
    run_preset,
    run_sweep,
    total_error,
)
from .lattice import (
    HamiltonianSpec,
    OperatorTerm,
    assemble,
    build_heisenberg,
    build_hubbard_spinless,
    build_model,
    build_tfim,
)

__version__ = "0.1.0"
