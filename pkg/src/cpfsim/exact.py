"""Exact rational arithmetic: Bernoulli coefficients and the compilation linear system.

All coefficients that feed corrector compilation are kept as `fractions.Fraction`
until exponential-evaluation time, so the tabulated solutions can be checked
bit-exactly.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache


class SingularNodesError(ValueError):
    """Raised when Vandermonde nodes coincide."""


@lru_cache(maxsize=None)
def bernoulli_number(n: int) -> Fraction:
    """Bernoulli number B_n (convention B_1 = -1/2), via the standard recurrence

        sum_{k=0}^{n} C(n+1, k) B_k = 0,  B_0 = 1.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return Fraction(1)
    acc = Fraction(0)
    for k in range(n):
        acc += math.comb(n + 1, k) * bernoulli_number(k)
    return -acc / (n + 1)


def bernoulli_half(j: int) -> Fraction:
    """Bernoulli polynomial value B_j(1/2), exactly.

    Zero for every odd j >= 1; for even j it equals (2^(1-j) - 1) * B_j.
    """
    if j < 0:
        raise ValueError("j must be nonnegative")
    if j == 0:
        return Fraction(1)
    if j % 2 == 1:
        return Fraction(0)
    return (Fraction(2) ** (1 - j) - 1) * bernoulli_number(j)


def vandermonde_matrix(nodes: tuple[Fraction, ...]) -> list[list[Fraction]]:
    """V with rows of increasing powers: V[i][j] = nodes[j] ** i."""
    k = len(nodes)
    return [[nodes[j] ** i for j in range(k)] for i in range(k)]


def vandermonde_inverse(nodes) -> list[list[Fraction]]:
    """Exact inverse of the Vandermonde matrix on the given distinct nodes.

    Row l of the inverse holds the coefficients of the l-th Lagrange basis
    polynomial prod_{m != l} (x - x_m) / (x_l - x_m), hence V^{-1} V = 1
    identically in rational arithmetic.
    """
    nodes = tuple(Fraction(x) for x in nodes)
    k = len(nodes)
    if len(set(nodes)) != k:
        raise SingularNodesError(f"duplicate nodes: {nodes}")
    inv: list[list[Fraction]] = []
    for l in range(k):
        # numerator polynomial prod_{m != l} (x - x_m), low-to-high coefficients
        coeffs = [Fraction(1)]
        for m in range(k):
            if m == l:
                continue
            nxt = [Fraction(0)] * (len(coeffs) + 1)
            for p, cp in enumerate(coeffs):
                nxt[p] += -nodes[m] * cp
                nxt[p + 1] += cp
            coeffs = nxt
        denom = Fraction(1)
        for m in range(k):
            if m != l:
                denom *= nodes[l] - nodes[m]
        inv.append([c / denom for c in coeffs] + [Fraction(0)] * (k - len(coeffs)))
    return inv


def default_nodes(k: int) -> tuple[Fraction, ...]:
    """Compilation nodes a_l = l + 1 for l = 0..k-1."""
    return tuple(Fraction(l + 1) for l in range(k))


def _solve_system(nodes: tuple[Fraction, ...], rhs: list[Fraction]) -> list[Fraction]:
    """Solve A b = rhs exactly where A[j][l] = a_l^(2j+1) = (V(a^2) D)[j][l]."""
    vinv = vandermonde_inverse(tuple(a * a for a in nodes))
    k = len(nodes)
    y = [sum(vinv[i][j] * rhs[j] for j in range(k)) for i in range(k)]
    return [y[l] / nodes[l] for l in range(k)]


def solve_vandermonde_b(k: int, nodes=None) -> list[Fraction]:
    """Exact coefficients b_0..b_{k-1} of the order-k corrector compilation.

    Solves sum_l b_l a_l^(2j-1) = B_{2j}(1/2) / (8j) for j = 1..k with the
    default nodes a_l = l + 1 (overridable for experimentation).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    nodes = default_nodes(k) if nodes is None else tuple(Fraction(a) for a in nodes)
    if len(nodes) != k:
        raise ValueError("need exactly k nodes")
    rhs = [bernoulli_half(2 * j) / (8 * j) for j in range(1, k + 1)]
    return _solve_system(nodes, rhs)


def solve_single_term_b(m: int, c, target: int | None = None, nodes=None) -> list[Fraction]:
    """Coefficients compiling a single nested-adjoint corrector term.

    Solves the same m-node system with right-hand side zero everywhere except
    position `target` (default m), which is set to c * (2*target - 1)! / 4.
    With target < m the extra nodes zero out the tail equations, pushing the
    first uncancelled term beyond lambda^(2m).
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    target = m if target is None else target
    if not 1 <= target <= m:
        raise ValueError("target must lie in 1..m")
    nodes = default_nodes(m) if nodes is None else tuple(Fraction(a) for a in nodes)
    rhs = [Fraction(0)] * m
    rhs[target - 1] = Fraction(c) * math.factorial(2 * target - 1) / 4
    return _solve_system(nodes, rhs)


def format_fraction(x: Fraction) -> str:
    """Render in the table style used throughout, e.g. '-2555/33792' or '1'."""
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"
