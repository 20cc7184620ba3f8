"""Product-formula intermediate representation and the standard builders.

An :class:`ExpProduct` is an ordered sequence of exponential steps. Each step
references a generator -- partition ``"A"``, partition ``"B"``, or an exact
corrector object exposing ``exponent(a, b)`` -- together with a scalar
coefficient z, and evaluates to expm(z * G). B steps pick up the system's
perturbation parameter alpha at evaluation time.

Builders accept a float complex step parameter lam, or an ``mpmath.mpc`` to
evaluate in arbitrary precision; recursion constants (p_k and friends) are
computed in the matching arithmetic so that coefficient identities hold to
working precision.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from fractions import Fraction

import mpmath
import numpy as np

from . import highprec
from .dense import expm as np_expm
from .lattice import HamiltonianSpec, eig_expm, partition_matrices

GEN_A = "A"
GEN_B = "B"


class LargeStepWarning(UserWarning):
    """Step parameter outside the small-|lambda| regime the error bounds assume."""


def _is_mp(x) -> bool:
    return isinstance(x, (mpmath.mpf, mpmath.mpc))




def quartic_node(p: int, lam) -> object:
    """The recursion node 1 / (4 - 4**(1/p)), in arithmetic matching lam."""
    if _is_mp(lam):
        return 1 / (4 - mpmath.power(4, mpmath.mpf(1) / p))
    return 1.0 / (4.0 - 4.0 ** (1.0 / p))


@dataclass(frozen=True)
class Step:
    gen: object  # "A" | "B" | corrector with .exponent(a, b)
    coeff: object  # complex | mpmath.mpc | Fraction (symbolic bookkeeping)

    def is_corrector(self) -> bool:
        return not isinstance(self.gen, str)


def merge_steps(steps, equal_only: bool = False) -> tuple[Step, ...]:
    """Normal form: fuse adjacent same-generator steps.

    Full merging sums coefficients and drops exact zeros (used by the formula
    builders and trotterization). With ``equal_only`` a fusion happens only
    when the coefficients coincide, which is the cost bookkeeping the
    compiled-corrector recipes advertise.
    """
    out: list[Step] = []
    for s in steps:
        if out and out[-1].gen == s.gen:
            if equal_only:
                if out[-1].coeff == s.coeff:
                    out[-1] = Step(s.gen, out[-1].coeff + s.coeff)
                    continue
                out.append(s)
                continue
            merged = Step(s.gen, out[-1].coeff + s.coeff)
            out.pop()
            if merged.coeff != 0:
                out.append(merged)
            # a vanished step can expose a new adjacent pair; loop handles it
            # because subsequent steps compare against the new tail
            continue
        if not equal_only and s.coeff == 0:
            continue
        out.append(s)
    return tuple(out)


@dataclass(frozen=True)
class ExpProduct:
    steps: tuple[Step, ...]
    order: str = ""
    tag: str = ""

    @property
    def exp_count(self) -> int:
        return len(self.steps)

    @property
    def corrector_exp_count(self) -> int:
        return sum(1 for s in self.steps if s.is_corrector())

    def scaled(self, factor) -> "ExpProduct":
        return replace(
            self, steps=tuple(Step(s.gen, s.coeff * factor) for s in self.steps)
        )


def pf1(lam) -> ExpProduct:
    """First-order splitting e^(lam A) e^(lam B)."""
    if abs(lam) >= 1:
        warnings.warn("pf1 called with |lambda| >= 1", LargeStepWarning, stacklevel=2)
    return ExpProduct((Step(GEN_A, lam), Step(GEN_B, lam)), order="1", tag="pf1")


def pf2(lam) -> ExpProduct:
    """Second-order splitting e^(lam A/2) e^(lam B) e^(lam A/2)."""
    if abs(lam) >= 1:
        warnings.warn("pf2 called with |lambda| >= 1", LargeStepWarning, stacklevel=2)
    half = lam / 2
    return ExpProduct(
        (Step(GEN_A, half), Step(GEN_B, lam), Step(GEN_A, half)), order="2", tag="pf2"
    )


def _recurse_fivefold(steps: tuple[Step, ...], node) -> tuple[Step, ...]:
    """[S(p lam)]^2 S((1-4p) lam) [S(p lam)]^2 on step lists, merged."""
    unit = node ** 0  # unit element in the node's arithmetic
    wing = tuple(Step(s.gen, s.coeff * node) for s in steps)
    middle = tuple(Step(s.gen, s.coeff * (unit - 4 * node)) for s in steps)
    return merge_steps(wing + wing + middle + wing + wing)


def suzuki(order: int, lam, node_values: dict[int, object] | None = None) -> ExpProduct:
    """Suzuki product formula of the given even order, built recursively from
    pf2 with p_k = 1/(4 - 4**(1/(2k-1))); adjacent A steps merged.

    ``node_values`` overrides p_k per level (used to check the coefficient
    identities with exact rational stand-ins).
    """
    if order < 2 or order % 2 != 0:
        raise ValueError(f"order must be a positive even integer, got {order}")
    if order == 2:
        return pf2(lam)
    k = order // 2
    inner = suzuki(order - 2, lam, node_values)
    pk = (node_values or {}).get(k, quartic_node(2 * k - 1, lam))
    return ExpProduct(_recurse_fivefold(inner.steps, pk), order=str(order),
                      tag=f"pf{order}")


@dataclass(frozen=True)
class YoshidaWeights:
    """Scalar weights (w_0 .. w_m) of the palindromic second-order composition."""

    m: int
    w: tuple[float, ...]

    def __post_init__(self):
        if len(self.w) != self.m + 1:
            raise ValueError(f"expected {self.m + 1} weights, got {len(self.w)}")
        residual = self.w[0] + 2 * sum(self.w[1:]) - 1.0
        if abs(residual) > 1e-12:
            raise ValueError(
                f"first-order condition w0 + 2*sum(w) = 1 violated by {residual:.3e}"
            )

    def scales(self) -> tuple[float, ...]:
        """Factor scales left to right: w_m ... w_1, w_0, w_1 ... w_m."""
        return tuple(reversed(self.w[1:])) + (self.w[0],) + tuple(self.w[1:])


def load_yoshida_weights(path) -> YoshidaWeights:
    """Weights file: first line m, then one real per line for w_0 .. w_m."""
    with open(path) as fh:
        values = [line.split("#")[0].strip() for line in fh]
    values = [v for v in values if v]
    m = int(values[0])
    w = tuple(float(v) for v in values[1:])
    return YoshidaWeights(m, w)


def yoshida(weights: YoshidaWeights, lam) -> ExpProduct:
    """Palindromic composition of pf2 factors with the given weights."""
    steps: tuple[Step, ...] = ()
    for w in weights.scales():
        steps += pf2(w * lam).steps
    return ExpProduct(merge_steps(steps), order="", tag=f"ypf(m={weights.m})")


@dataclass(frozen=True)
class TrotterizedProduct:
    """r-fold repetition of a single-step product, with structural
    conjugating-corrector cancellation across step boundaries."""

    single: ExpProduct
    r: int
    tag: str = ""

    def materialized_steps(self) -> tuple[Step, ...]:
        return merge_steps(self.single.steps * self.r)

    @staticmethod
    def _chain_count(counter, steps, r: int) -> int:
        one_copy = counter(merge_steps(steps))
        if r == 1:
            return one_copy
        two_copies = counter(merge_steps(steps + steps))
        per_boundary_saving = 2 * one_copy - two_copies
        return r * one_copy - (r - 1) * per_boundary_saving

    @property
    def exp_count(self) -> int:
        return self._chain_count(len, self.single.steps, self.r)

    @property
    def corrector_exp_count(self) -> int:
        return self._chain_count(
            lambda ss: sum(1 for s in ss if s.is_corrector()), self.single.steps, self.r
        )


def trotterize(p, r: int) -> TrotterizedProduct:
    """r-fold repetition; (e^C S e^-C)^r simplifies structurally to e^C S^r e^-C."""
    if r < 1:
        raise ValueError("r must be >= 1")
    prod = p.as_product() if hasattr(p, "as_product") else p
    return TrotterizedProduct(prod, r, tag=prod.tag)


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def _system_matrices(system, precision: int | None):
    if isinstance(system, HamiltonianSpec):
        a, b, alpha = partition_matrices(system)
    else:
        a, b, alpha = system
        a = np.asarray(getattr(a, "entries", a), dtype=complex) if not isinstance(a, mpmath.matrix) else a
        b = np.asarray(getattr(b, "entries", b), dtype=complex) if not isinstance(b, mpmath.matrix) else b
    if precision is not None and not isinstance(a, mpmath.matrix):
        a, b = highprec.to_mp(a), highprec.to_mp(b)
    return a, b, alpha


def evaluate(p, system, precision: int | None = None):
    """Ordered matrix product of expm over each step.

    ``system`` is a HamiltonianSpec or an (A, B, alpha) triple. B steps are
    evaluated with alpha * B; exact corrector generators carry their own
    lambda/alpha binding. With ``precision`` set (decimal digits) the product
    is evaluated in mpmath arithmetic and an mpmath matrix is returned.
    """
    if isinstance(p, TrotterizedProduct):
        base = evaluate(p.single, system, precision)
        if isinstance(base, mpmath.matrix):
            return highprec.matrix_power(base, p.r)
        return np.linalg.matrix_power(base, p.r)
    if hasattr(p, "as_product"):
        p = p.as_product()

    a, b, alpha = _system_matrices(system, precision)
    use_mp = isinstance(a, mpmath.matrix)
    spectral = isinstance(system, HamiltonianSpec) and not use_mp

    def step_matrix(step: Step):
        if step.gen == GEN_A:
            if spectral:
                return eig_expm(system, "A", step.coeff)
            gen_mat, z = a, step.coeff
        elif step.gen == GEN_B:
            if spectral:
                return eig_expm(system, "B", step.coeff * alpha)
            gen_mat, z = b, step.coeff * alpha
        else:
            gen_mat, z = step.gen.exponent(a, b), step.coeff
        if use_mp:
            return highprec.expm(gen_mat, z)
        return np_expm(gen_mat, z)

    cache: dict = {}
    dim = a.rows if use_mp else a.shape[0]
    out = highprec.identity(dim) if use_mp else np.eye(dim, dtype=complex)
    for step in p.steps:
        key = (step.gen, step.coeff)
        try:
            mat = cache.get(key)
        except TypeError:  # unhashable custom generator
            key, mat = None, None
        if mat is None:
            mat = step_matrix(step)
            if key is not None:
                cache[key] = mat
        out = out * mat if use_mp else out @ mat
    return out
