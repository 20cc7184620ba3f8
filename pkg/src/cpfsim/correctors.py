"""Exact corrector expressions and corrected product formulas.

Correctors are linear combinations of nested-adjoint words in the two
partitions, carried symbolically (exact rational structure factor, powers of
lambda and alpha, word) and bound to numeric lambda/alpha only when they
enter a product as exponential steps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np
import scipy.linalg
from mpmath import mp

from .dense import adjoint_power, random_hermitian
from .exact import bernoulli_half
from .formulas import (
    ExpProduct,
    Step,
    YoshidaWeights,
    evaluate,
    merge_steps,
    pf1,
    pf2,
    quartic_node,
    suzuki,
)


class EstimationError(RuntimeError):
    """Numeric coefficient extraction failed (ill-conditioned fit)."""


# ---------------------------------------------------------------------------
# Commutator expressions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CTerm:
    """factor * lambda^lam_power * alpha^alpha_power * ad_outer^depth(inner)."""

    factor: object  # Fraction where the source gives rationals, float otherwise
    lam_power: int
    alpha_power: int
    outer: str
    inner: str
    depth: int


def _ad(outer, m):
    if isinstance(m, mpmath.matrix):
        return outer * m - m * outer
    return outer @ m - m @ outer


def _scalar(x, use_mp: bool):
    if use_mp:
        if isinstance(x, Fraction):
            return mp.mpf(x.numerator) / x.denominator
        return mp.mpf(x) if not isinstance(x, (mpmath.mpf, mpmath.mpc)) else x
    return complex(x) if not isinstance(x, Fraction) else float(x)


@dataclass(frozen=True)
class CommutatorExpr:
    terms: tuple[CTerm, ...]
    label: str = ""

    def exponent(self, a, b, lam, alpha):
        """Numeric matrix sum(factor * lam^p * alpha^q * word(A, B))."""
        use_mp = isinstance(a, mpmath.matrix)
        out = None
        for t in self.terms:
            word = a if t.inner == "A" else b
            outer = a if t.outer == "A" else b
            for _ in range(t.depth):
                word = _ad(outer, word)
            coef = (
                _scalar(t.factor, use_mp)
                * lam**t.lam_power
                * alpha**t.alpha_power
            )
            piece = word * coef if use_mp else coef * word
            out = piece if out is None else out + piece
        return out

    def __add__(self, other: "CommutatorExpr") -> "CommutatorExpr":
        return CommutatorExpr(self.terms + other.terms,
                              label=f"{self.label}+{other.label}")

    def negated(self) -> "CommutatorExpr":
        return CommutatorExpr(
            tuple(
                CTerm(-t.factor, t.lam_power, t.alpha_power, t.outer, t.inner, t.depth)
                for t in self.terms
            ),
            label=f"-({self.label})",
        )


@dataclass(frozen=True)
class BoundCorrector:
    """A corrector expression with its lambda/alpha binding, usable as a
    generator inside an ExpProduct step."""

    expr: CommutatorExpr
    lam: object
    alpha: object

    def exponent(self, a, b):
        return self.expr.exponent(a, b, self.lam, self.alpha)


def word(outer: str, inner: str, depth: int, factor, lam_power: int,
         alpha_power: int) -> CTerm:
    return CTerm(factor, lam_power, alpha_power, outer, inner, depth)


def corrector_Ck(k: int) -> CommutatorExpr:
    """C(k) = alpha * sum_{j<=k} B_2j(1/2)/(2j)! lambda^2j ad_A^(2j-1)(B)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    terms = tuple(
        word("A", "B", 2 * j - 1,
             Fraction(bernoulli_half(2 * j), math.factorial(2 * j)), 2 * j, 1)
        for j in range(1, k + 1)
    )
    return CommutatorExpr(terms, label=f"C({k})")


def _ck_weight_merged(k: int, w_prev: float, w_next: float) -> CommutatorExpr:
    """Combined junction corrector C(k, w_next*lam) - C(k, w_prev*lam)."""
    terms = tuple(
        word("A", "B", 2 * j - 1,
             float(Fraction(bernoulli_half(2 * j), math.factorial(2 * j)))
             * (w_next ** (2 * j) - w_prev ** (2 * j)),
             2 * j, 1)
        for j in range(1, k + 1)
    )
    return CommutatorExpr(terms, label=f"C({k},{w_next})-C({k},{w_prev})")


def _ck_scaled(k: int, w: float) -> CommutatorExpr:
    """C(k, w*lam) with the weight folded into the structure factors."""
    terms = tuple(
        word("A", "B", 2 * j - 1,
             float(Fraction(bernoulli_half(2 * j), math.factorial(2 * j)))
             * w ** (2 * j),
             2 * j, 1)
        for j in range(1, k + 1)
    )
    return CommutatorExpr(terms, label=f"C({k},{w})")


# ---------------------------------------------------------------------------
# Corrected formulas
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CorrectedFormula:
    """A product formula with corrector wraps.

    Symplectic wraps appear with opposite signs left/right, symmetric wraps
    with equal signs, composites nest a symmetric pair inside a symplectic
    one (the symplectic part is outermost so it telescopes across steps).
    """

    left: tuple[Step, ...]
    core: ExpProduct
    right: tuple[Step, ...]
    symmetry: str
    tag: str

    def as_product(self) -> ExpProduct:
        return ExpProduct(
            merge_steps(self.left + self.core.steps + self.right),
            order=self.core.order,
            tag=self.tag,
        )

    @property
    def exp_count(self) -> int:
        return self.as_product().exp_count


def _sandwich(core: ExpProduct, wraps, symmetry: str, tag: str) -> CorrectedFormula:
    """wraps: list of (BoundCorrector, right_sign); applied outermost-first."""
    left, right = (), ()
    for gen, right_sign in wraps:
        left = left + (Step(gen, 1),)
        right = (Step(gen, right_sign),) + right
    return CorrectedFormula(left, core, right, symmetry, tag)


def cpf2_symplectic(k: int, alpha, lam) -> CorrectedFormula:
    """e^C(k) S2(lam) e^-C(k): removes the first-order-in-alpha kernel errors
    through lambda^(2k+1); time-reversal symmetric."""
    gen = BoundCorrector(corrector_Ck(k), lam, alpha)
    return _sandwich(pf2(lam), [(gen, -1)], "symplectic", f"cpf2-symp:{k}")


def cpf4_constants(like=None):
    """(s, c) of the fourth-order symplectic corrector C = c lam^4 ad_A^3(alpha B).

    s = 1/(4 - 4^(1/3)); the quintic kernel prefactor is
    c = 7/5760 (4 s^5 + (1-4s)^5) + 1/72 s(1-2s)(1-3s)(1-4s)(1-5s),
    where 1/72 = (1/6)*(1/12) carries the symmetric-BCH coefficient
    -(1/6)[X,[X,Y]] of the five-factor composition.
    """
    with mp.workdps(60):
        s = 1 / (4 - mp.power(4, mp.mpf(1) / 3))
        c = mp.mpf(7) / 5760 * (4 * s**5 + (1 - 4 * s) ** 5) + mp.mpf(1) / 72 * s * (
            1 - 2 * s
        ) * (1 - 3 * s) * (1 - 4 * s) * (1 - 5 * s)
        if isinstance(like, (mpmath.mpf, mpmath.mpc)):
            return +s, +c
    return float(s), float(c)


def cpf4_symplectic(alpha, lam) -> CorrectedFormula:
    """e^C S4(lam) e^-C with C = c lam^4 ad_A^3(alpha B)."""
    _, c = cpf4_constants(like=lam)
    expr = CommutatorExpr((word("A", "B", 3, c, 4, 1),), label="C4")
    gen = BoundCorrector(expr, lam, alpha)
    return _sandwich(suzuki(4, lam), [(gen, -1)], "symplectic", "cpf4-symp")


def custom_corrector(name: str, alpha, lam, k: int = 1) -> CorrectedFormula:
    """The customized low-order correctors, by row name.

    pf1-symp-basic maps PF1 onto PF2 exactly; pf1-symp-ext adds the
    second-order term; pf1-sym / pf1-com remove successive error orders from
    PF1; pf2-symp(-k) and pf2-com correct PF2; pf4-symp is the fourth-order
    symplectic corrector.
    """
    half_b = CommutatorExpr((word("A", "B", 0, Fraction(1, 2), 1, 1),), "B/2")
    ad_ab = lambda f: CommutatorExpr((word("A", "B", 1, f, 2, 1),), "adA(B)")
    ad_b2a = lambda f: CommutatorExpr((word("B", "A", 2, f, 3, 2),), "adB2(A)")

    if name == "pf1-symp-basic":
        gen = BoundCorrector(half_b, lam, alpha)
        return _sandwich(pf1(lam), [(gen, -1)], "symplectic", name)
    if name == "pf1-symp-ext":
        gen = BoundCorrector(half_b + ad_ab(Fraction(1, 12)), lam, alpha)
        return _sandwich(pf1(lam), [(gen, -1)], "symplectic", name)
    if name == "pf1-sym":
        expr = ad_ab(Fraction(-1, 4)) + ad_b2a(Fraction(-1, 12))
        gen = BoundCorrector(expr, lam, alpha)
        return _sandwich(pf1(lam), [(gen, 1)], "symmetric", name)
    if name == "pf1-com":
        symp = BoundCorrector(ad_ab(Fraction(1, 12)), lam, alpha)
        sym = BoundCorrector(ad_ab(Fraction(-1, 4)) + ad_b2a(Fraction(-1, 12)),
                             lam, alpha)
        return _sandwich(pf1(lam), [(symp, -1), (sym, 1)], "composite", name)
    if name == "pf2-symp":
        return cpf2_symplectic(1, alpha, lam)
    if name == "pf2-symp-k":
        return cpf2_symplectic(k, alpha, lam)
    if name == "pf2-com":
        symp = BoundCorrector(corrector_Ck(1), lam, alpha)
        sym = BoundCorrector(ad_b2a(Fraction(-1, 48)), lam, alpha)
        return _sandwich(pf2(lam), [(symp, -1), (sym, 1)], "composite", name)
    if name == "pf4-symp":
        return cpf4_symplectic(alpha, lam)
    raise ValueError(f"unknown corrector name {name!r}")


def _fivefold_rebuild(build, node, lam):
    """[S(p lam)]^2 S((1-4p) lam) [S(p lam)]^2 where S is rebuilt per scale."""
    unit = node ** 0
    wing = build(node * lam)
    middle = build((unit - 4 * node) * lam)
    return merge_steps(wing + wing + middle + wing + wing)


def _flat_to_corrected(steps, symmetry, tag, order) -> CorrectedFormula:
    nl = 1 if steps and steps[0].is_corrector() else 0
    nr = 1 if steps and steps[-1].is_corrector() else 0
    core = ExpProduct(steps[nl:len(steps) - nr], order=order, tag=f"{tag}-core")
    return CorrectedFormula(steps[:nl], core, steps[-nr:] if nr else (), symmetry, tag)


def cpf2k_perturbed(order: int, alpha, lam, k_corr: int | None = None) -> CorrectedFormula:
    """Suzuki-style recursion over the symplectically corrected PF2 base;
    leading error quadratic in alpha at every order."""
    if order < 2 or order % 2 != 0:
        raise ValueError(f"order must be even and >= 2, got {order}")
    k = order // 2
    k_corr = k if k_corr is None else k_corr

    def rec(level: int, lam_level):
        if level == 1:
            return cpf2_symplectic(k_corr, alpha, lam_level).as_product().steps
        node = quartic_node(2 * level - 1, lam_level)
        return _fivefold_rebuild(lambda l: rec(level - 1, l), node, lam_level)

    steps = rec(k, lam)
    return _flat_to_corrected(steps, "symplectic", f"cpf2k-pert:{k}", str(order))


def cpf2k_nonperturbed(order: int, lam, alpha=1.0) -> CorrectedFormula:
    """Recursion over the composite-corrected PF2 base with nodes
    1/(4 - 4^(1/(2k+1))) chosen to cancel the child's lambda^(2k+1) error;
    approximation error O(|lambda|^(2k+3))."""
    if order < 2 or order % 2 != 0:
        raise ValueError(f"order must be even and >= 2, got {order}")
    k = order // 2

    def rec(level: int, lam_level):
        if level == 1:
            return custom_corrector("pf2-com", alpha, lam_level).as_product().steps
        # child of order 2(level-1) has leading error lambda^(2*level+1)
        node = quartic_node(2 * level + 1, lam_level)
        return _fivefold_rebuild(lambda l: rec(level - 1, l), node, lam_level)

    steps = rec(k, lam)
    return _flat_to_corrected(steps, "composite", f"cpf2k-nonpert:{k}", str(order))


def corrected_yoshida(weights: YoshidaWeights, k_corr: int, alpha, lam) -> CorrectedFormula:
    """Each base factor S2(w lam) wrapped with C(k_corr, w lam); adjacent
    wraps merged so the corrector exponential count is 2m + 2."""
    scales = weights.scales()
    steps: tuple[Step, ...] = ()
    first = BoundCorrector(_ck_scaled(k_corr, scales[0]), lam, alpha)
    steps += (Step(first, 1),)
    for i, w in enumerate(scales):
        steps += pf2(w * lam).steps
        if i + 1 < len(scales):
            junction = BoundCorrector(
                _ck_weight_merged(k_corr, w, scales[i + 1]), lam, alpha
            )
            steps += (Step(junction, 1),)
    last = BoundCorrector(_ck_scaled(k_corr, scales[-1]), lam, alpha)
    steps += (Step(last, -1),)
    return _flat_to_corrected(
        merge_steps(steps), "symplectic", f"cypf(m={weights.m}):{k_corr}", ""
    )


def ypf_symplectic(weights: YoshidaWeights, c: float, degree: int, alpha, lam) -> CorrectedFormula:
    """Single symplectic corrector c lam^(2*degree) ad_A^(2*degree-1)(alpha B)
    around a Yoshida formula; c is typically estimated numerically."""
    from .formulas import yoshida

    expr = CommutatorExpr((word("A", "B", 2 * degree - 1, c, 2 * degree, 1),),
                          label=f"cYPF{2 * degree}")
    gen = BoundCorrector(expr, lam, alpha)
    return _sandwich(yoshida(weights, lam), [(gen, -1)], "symplectic",
                     f"ypf-symp(m={weights.m})")


# ---------------------------------------------------------------------------
# Numeric extraction of leading kernel coefficients
# ---------------------------------------------------------------------------


def estimate_leading_coefficient(
    builder,
    degree: int,
    trials: int = 4,
    dim: int = 8,
    seed: int = 7,
    lam_grid=None,
    fit_degree: int = 4,
) -> float:
    """Coefficient of the leading first-order-in-alpha kernel error
    lam^(2*degree+1) ad_A^(2*degree)(B) of the formula built by
    ``builder(lam, alpha)``.

    The first-order-in-alpha residual is isolated by a complex step in alpha
    (exactly linear, no subtractive cancellation), projected onto the
    nested-adjoint word, and the lambda-polynomial contamination from the
    exponential map is removed by a least-squares fit whose intercept is the
    coefficient. Requires the target order to be the formula's leading error.
    """
    rng = np.random.default_rng(seed)
    if lam_grid is None:
        lam_grid = np.geomspace(0.03, 0.22, 10)
    h = 1e-150
    vand = np.vander(np.asarray(lam_grid, dtype=float), fit_degree + 1,
                     increasing=True)
    if np.linalg.cond(vand) > 1e8:
        raise EstimationError("lambda grid yields an ill-conditioned fit")
    intercepts = []
    for _ in range(trials):
        a = random_hermitian(dim, rng, real=True)
        b = random_hermitian(dim, rng, real=True)
        w_mat = adjoint_power(a, b, 2 * degree).real
        w_norm = float(np.sum(w_mat * w_mat))
        qs = []
        for lam in lam_grid:
            prod = builder(float(lam), 1j * h)
            prod = prod.as_product() if hasattr(prod, "as_product") else prod
            approx = evaluate(prod, (a, b, 1j * h))
            exact = scipy.linalg.expm(lam * a + 1j * h * lam * b)
            deriv = np.imag(approx - exact) / h
            qs.append(float(np.sum(w_mat * deriv)) / w_norm / lam ** (2 * degree + 1))
        coef, *_ = np.linalg.lstsq(vand, np.array(qs), rcond=None)
        intercepts.append(coef[0])
    return float(np.mean(intercepts))
