"""Compile corrector exponentials into products of A/B exponentials.

The building block is Y(a, b) = X(a, b) X(-a, -b) with
X(a, b) = e^(a lam A) e^(b lam B) e^(-a lam A), whose kernel starts at
2ab lam^2 [A,B] + a b^2 lam^3 [B,[A,B]]. Recipes follow the compilation
table; exp(-C) recipes flip the sign of the Y parameter that makes the whole
kernel odd (verified empirically by the sign-flip residual checks).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .correctors import CommutatorExpr, corrector_Ck, word
from .dense import expm as np_expm
from .dense import spectral_norm
from .exact import default_nodes, solve_single_term_b, solve_vandermonde_b
from .fitting import fit_loglog_slope, slope_window
from .formulas import GEN_A, GEN_B, ExpProduct, Step, evaluate, merge_steps
from .lattice import HamiltonianSpec, partition_matrices

RECIPE_ROWS = ("sym-pair", "symp-adab", "sym-adb2a", "symp-b-plus-adab",
               "high-order-Ck")


class DegenerateParametersError(ValueError):
    """Row constraint equations cannot be solved for these parameters."""


def build_Y(a: float, b: float, lam) -> ExpProduct:
    """Y(a, b) as five exponentials (the adjacent -a, -a pair pre-merged)."""
    steps = (
        Step(GEN_A, a * lam),
        Step(GEN_B, b * lam),
        Step(GEN_A, -2 * a * lam),
        Step(GEN_B, -b * lam),
        Step(GEN_A, a * lam),
    )
    return ExpProduct(steps, tag=f"Y({a},{b})")


@dataclass(frozen=True)
class CompiledCorrector:
    """A/B-only product approximating exp(C) for a corrector expression C.

    ``declared_error`` is (lambda power, alpha power) of the leading
    compilation error; ``recipe`` rebuilds the product at a new lambda so
    error curves can be traced.
    """

    product: ExpProduct
    target: CommutatorExpr
    lam: complex
    alpha: float
    declared_error: tuple[int, int]
    recipe: Callable = None
    full_kernel: Callable = None

    @property
    def exp_cost(self) -> int:
        return self.product.exp_count

    def at(self, lam) -> "CompiledCorrector":
        return self.recipe(lam) if self.recipe is not None else self


def _concat(*products: ExpProduct) -> tuple[Step, ...]:
    steps: tuple[Step, ...] = ()
    for p in products:
        steps += p.steps
    # cost bookkeeping fuses only identical adjacent exponentials
    return merge_steps(steps, equal_only=True)


def _compiled(row: str, steps, target, lam, alpha, declared, rebuild,
              sign: int = 1, full_kernel: Callable = None) -> CompiledCorrector:
    if sign == -1:
        target = target.negated()
    return CompiledCorrector(
        ExpProduct(steps, tag=f"compiled:{row}"),
        target, lam, alpha, declared,
        recipe=rebuild, full_kernel=full_kernel,
    )


def compile_recipe(row: str, params: dict, lam, alpha=1.0,
                   sign: int = 1) -> CompiledCorrector:
    """Compile one recipe row; ``sign=-1`` compiles exp(-C).

    Rows and parameters (alpha-stripped constants; B steps pick up alpha at
    evaluation):
      sym-pair:          C = c2 lam^2 ad_A(aB) - c3 lam^3 ad_aB^2(A)
      symp-adab:         C = c2 lam^2 ad_A(aB)
      sym-adb2a:         C = c3 lam^3 ad_aB^2(A)
      symp-b-plus-adab:  C = c1 lam (aB) + c2 lam^2 ad_A(aB)
      high-order-Ck:     C = C(k), delegated to compile_Ck
    """
    if row == "sym-pair":
        c2, c3 = Fraction(params["c2"]), Fraction(params["c3"])
        if c3 == 0 or c2 == 0:
            raise DegenerateParametersError("sym-pair needs nonzero c2 and c3")
        a, b = float(c2 * c2 / (4 * c3)), float(2 * c3 / c2)
        target = CommutatorExpr(
            (word("A", "B", 1, c2, 2, 1), word("B", "A", 2, -c3, 3, 2)), row
        )
        def rebuild(l, _s=sign):
            return compile_recipe(row, params, l, alpha, _s)
        return _compiled(row, build_Y(sign * a, b, lam).steps, target, lam,
                         alpha, (4, 1), rebuild, sign)

    if row == "symp-adab":
        c2 = Fraction(params["c2"])
        if c2 == 0:
            raise DegenerateParametersError("symp-adab needs nonzero c2")
        target = CommutatorExpr((word("A", "B", 1, c2, 2, 1),), row)
        steps = _concat(
            ExpProduct((Step(GEN_B, -lam / 2),)),
            build_Y(sign * float(c2 / 2), 1.0, lam),
            ExpProduct((Step(GEN_B, lam / 2),)),
        )
        def rebuild(l, _s=sign):
            return compile_recipe(row, params, l, alpha, _s)
        return _compiled(row, steps, target, lam, alpha, (4, 1), rebuild, sign)

    if row == "sym-adb2a":
        c3 = Fraction(params["c3"])
        target = CommutatorExpr((word("B", "A", 2, c3, 3, 2),), row)
        a = sign * float(-c3 / 2)
        steps = _concat(build_Y(a, 1.0, lam), build_Y(a, -1.0, lam))
        def rebuild(l, _s=sign):
            return compile_recipe(row, params, l, alpha, _s)
        return _compiled(row, steps, target, lam, alpha, (5, 2), rebuild, sign)

    if row == "symp-b-plus-adab":
        c1, c2 = Fraction(params["c1"]), Fraction(params["c2"])
        target = CommutatorExpr(
            (word("A", "B", 0, c1, 1, 1), word("A", "B", 1, c2, 2, 1)), row
        )
        a, c = float(c2 / 4), float(c1 / 2)
        steps = _concat(
            ExpProduct((Step(GEN_B, sign * c * lam),)),
            build_Y(a, sign * 1.0, lam),
            build_Y(-a, -sign * 1.0, lam),
            ExpProduct((Step(GEN_B, sign * c * lam),)),
        )
        def rebuild(l, _s=sign):
            return compile_recipe(row, params, l, alpha, _s)
        return _compiled(row, steps, target, lam, alpha, (4, 1), rebuild, sign)

    if row == "high-order-Ck":
        return compile_Ck(params["k"], lam, alpha, sign)

    raise ValueError(f"unknown compilation row {row!r}")


def compile_Ck(k: int, lam, alpha=1.0, sign: int = 1) -> CompiledCorrector:
    """Palindromic double product of Y(a_l, b_l) blocks compiling C(k).

    Nodes a_l = l + 1; b_l from the exact linear system. Cost 10k; the
    residual is third order in the small partition, O(alpha^3 |lambda|^3).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    nodes = [float(x) for x in default_nodes(k)]
    bs = [sign * float(x) for x in solve_vandermonde_b(k)]
    blocks = [build_Y(nodes[l], bs[l], lam) for l in reversed(range(k))]
    blocks += [build_Y(-nodes[l], -bs[l], lam) for l in range(k)]
    def rebuild(l, _s=sign):
        return compile_Ck(k, l, alpha, _s)
    def p4(a, b, l, al, _s=sign):
        return first_order_kernel(k, a, b, l, al, _s)
    return _compiled(f"Ck:{k}", _concat(*blocks), corrector_Ck(k), lam, alpha,
                     (3, 3), rebuild, sign, full_kernel=p4)


def compile_single_term(m: int, c, lam, alpha=1.0, num_nodes: int | None = None,
                        sign: int = 1) -> CompiledCorrector:
    """Compile C = c lam^(2m) ad_A^(2m-1)(alpha B).

    ``num_nodes`` >= m widens the linear system with zero right-hand sides,
    pushing the first uncancelled tail term beyond lambda^(2*num_nodes).
    """
    nn = m if num_nodes is None else num_nodes
    if nn < m:
        raise ValueError("num_nodes must be >= m")
    nodes = [float(x) for x in default_nodes(nn)]
    bs = [sign * float(x) for x in solve_single_term_b(nn, c, target=m)]
    blocks = [build_Y(nodes[l], bs[l], lam) for l in reversed(range(nn))]
    blocks += [build_Y(-nodes[l], -bs[l], lam) for l in range(nn)]
    target = CommutatorExpr((word("A", "B", 2 * m - 1, c, 2 * m, 1),),
                            f"single:{m}")
    def rebuild(l, _s=sign):
        return compile_single_term(m, c, l, alpha, num_nodes, _s)
    def p4(a, b, l, al, _s=sign, _nodes=tuple(nodes), _bs=tuple(bs)):
        return first_order_kernel(nn, a, b, l, al, 1, bs=list(_bs), nodes=list(_nodes))
    return _compiled(f"single:{m}", _concat(*blocks), target, lam, alpha,
                     (3, 3), rebuild, sign, full_kernel=p4)


def first_order_kernel(k: int, a, b, lam, alpha, sign: int = 1,
                 bs=None, nodes=None) -> np.ndarray:
    """The full first-order kernel 2 lam sum_l b_l [e^(ad_{a_l lam A}) -
    e^(ad_{-a_l lam A})] (alpha B) realized by the Y-block double product.

    e^(ad_X) Y = e^X Y e^-X, so each bracket is evaluated with two
    exponentials. The truncated corrector C(k) is this kernel's series
    through lambda^(2k); the deviation of the compiled product from this
    kernel is third order in the small partition.
    """
    nodes = [float(x) for x in default_nodes(k)] if nodes is None else nodes
    bs = [float(x) for x in solve_vandermonde_b(k)] if bs is None else bs
    ab = alpha * np.asarray(b)
    out = np.zeros_like(ab)
    for node, bl in zip(nodes, bs):
        ex = np_expm(a, node * lam)
        exi = np_expm(a, -node * lam)
        out = out + sign * bl * (ex @ ab @ exi - exi @ ab @ ex)
    return 2 * lam * out


def compiled_error_at(cc: CompiledCorrector, system, lam,
                      target: str = "expr") -> float:
    """|| expm(corrector) - evaluate(compiled product) || at lambda.

    target="expr" compares against the bound commutator expression;
    target="full-kernel" (Y-double-product recipes only) compares against the full
    first-order kernel, isolating the degree->=3 residual."""
    rebuilt = cc.at(lam)
    if isinstance(system, HamiltonianSpec):
        a, b, alpha = partition_matrices(system)
    else:
        a, b, alpha = system
    if target == "full-kernel":
        if rebuilt.full_kernel is None:
            raise ValueError("full-kernel target only applies to Y-double-product recipes")
        exact = np_expm(rebuilt.full_kernel(a, b, lam, alpha))
    else:
        exact = np_expm(rebuilt.target.exponent(a, b, lam, alpha))
    approx = evaluate(rebuilt.product, (a, b, alpha))
    return spectral_norm(exact - approx)


def compilation_error(cc: CompiledCorrector, system, lam_grid=None):
    """Per-grid-point compilation error plus a fitted log-log slope.

    Defaults to 12 log-spaced points per decade over [1e-3, 1e-1]; points
    within 10x of the float64 noise floor (1e-13 * ||H|| * dim) are dropped
    before fitting.
    """
    if isinstance(system, HamiltonianSpec):
        a, b, alpha = partition_matrices(system)
    else:
        a, b, alpha = system
    if lam_grid is None:
        lam_grid = np.geomspace(1e-3, 1e-1, 25)
    h_norm = spectral_norm(a + alpha * np.asarray(b))
    floor = 10 * 1e-13 * h_norm * a.shape[0]
    table = [(float(abs(l)), compiled_error_at(cc, (a, b, alpha), -1j * float(abs(l))))
             for l in lam_grid]
    kept = slope_window(table, floor=floor, cap=np.inf)
    slope = fit_loglog_slope(kept)[0] if len(kept) >= 4 else float("nan")
    return table, slope


def compiled_alpha_slope(make_cc, spec_builder, lam: float, alphas=None,
                         target: str = "full-kernel") -> float:
    """Slope of the compilation error in the alpha direction at fixed lambda.

    The default target is the full first-order kernel of the Y-block product,
    so the measured residual is the pure degree->=3 (alpha^3) part."""
    alphas = np.geomspace(3e-1, 3e-2, 6) if alphas is None else alphas
    pts = []
    for al in alphas:
        spec = spec_builder(float(al))
        cc = make_cc(-1j * lam, float(al))
        a, b, alpha = partition_matrices(spec)
        pts.append((float(al),
                    compiled_error_at(cc, (a, b, alpha), -1j * lam, target)))
    return fit_loglog_slope(pts)[0]
