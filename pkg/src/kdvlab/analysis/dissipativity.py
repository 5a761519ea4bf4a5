"""Discrete check of the dissipation identity for A = -d^3/dx^3 - d/dx.

For g in the domain of A with g(0) = 0, g'(L) = 0, g''(L) = 0, integration
by parts gives

    int_0^L g A g dx = -g'(0)^2 / 2 - g(L)^2 / 2.

``dissipation_defect(..., corrected=False)`` drops the g(L)^2 term and
therefore tends to -g(L)^2/2, not 0, unless g(L) = 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid

from ..discretization.grid import Grid
from ..discretization.operator import build_operator
from ..discretization.stencils import fd_weights

POLY_DEGREE = 7
EDGE_POINTS = 6


@dataclass(frozen=True)
class CompatiblePolynomial:
    """g(x) = sum_j c_j (x/L)^j, j = 1..degree, with g'(L) = g''(L) = 0."""

    L: float
    coef: np.ndarray  # c_1..c_degree

    def __call__(self, x, m: int = 0) -> np.ndarray:
        z = np.asarray(x, dtype=float) / self.L
        out = np.zeros_like(z)
        for j, c in enumerate(self.coef, start=1):
            if j >= m:
                fall = np.prod(np.arange(j - m + 1, j + 1)) if m else 1.0
                out = out + c * fall * z ** (j - m)
        return out / self.L**m


def random_compatible(rng: np.random.Generator, L: float, degree: int = POLY_DEGREE) -> CompatiblePolynomial:
    """Random polynomial in the CG domain (c_3.. random, c_1, c_2 solved)."""
    free = rng.standard_normal(degree - 2)
    j = np.arange(3, degree + 1)
    # g'(L) L = c1 + 2 c2 + sum j c_j ; g''(L) L^2 = 2 c2 + sum j (j-1) c_j
    s1 = np.sum(j * free)
    s2 = np.sum(j * (j - 1) * free)
    c2 = -s2 / 2
    c1 = -s1 - 2 * c2
    return CompatiblePolynomial(L, np.concatenate([[c1, c2], free]))


def _apply_full(grid: Grid, op, g: np.ndarray) -> np.ndarray:
    """A_h g at every node: operator rows inside, one-sided stencils at the ends."""
    x = grid.nodes
    out = np.empty(grid.n_nodes)
    out[1 : grid.N] = op.full @ g
    for i in (0, grid.N, grid.N + 1):
        lo = min(max(i - EDGE_POINTS // 2, 0), grid.n_nodes - EDGE_POINTS)
        sl = slice(lo, lo + EDGE_POINTS)
        w3 = fd_weights(x[i], x[sl], 3)
        w1 = fd_weights(x[i], x[sl], 1)
        out[i] = -(w3 + w1) @ g[sl]
    return out


def dissipation_defect(g: CompatiblePolynomial, grid: Grid, corrected: bool = True) -> float:
    """Trapezoid value of int g A_h g + g'(0)^2/2 (+ g(L)^2/2 when corrected).

    g'(0) and g(L) come from second-order one-sided differences of the
    nodal samples.
    """
    op = build_operator(grid)
    x, dx = grid.nodes, grid.dx
    gv = g(x)
    ag = _apply_full(grid, op, gv)
    gx0 = fd_weights(0.0, x[:3], 1) @ gv[:3]
    val = trapezoid(gv * ag, dx=dx) + 0.5 * gx0**2
    if corrected:
        val += 0.5 * gv[-1] ** 2
    return float(val)


@dataclass(frozen=True)
class DissipativityStudy:
    levels: tuple
    dx: np.ndarray
    defects: np.ndarray  # (n_functions, n_levels) absolute defects
    orders: np.ndarray  # (n_functions, n_levels - 1)
    limits: np.ndarray  # exact continuous value of the checked expression per function

    @property
    def min_order(self) -> float:
        return float(np.min(self.orders))


def dissipativity_study(L: float, levels, n_functions: int, rng: np.random.Generator,
                        corrected: bool = True) -> DissipativityStudy:
    """Defects of ``n_functions`` random domain functions across grid levels.

    The observed order is computed from |defect| on successive levels, so
    it measures convergence to 0.
    """
    funcs = [random_compatible(rng, L) for _ in range(n_functions)]
    dxs = np.array([Grid(L, n).dx for n in levels])
    D = np.array([[abs(dissipation_defect(f, Grid(L, n), corrected)) for n in levels] for f in funcs])
    with np.errstate(divide="ignore", invalid="ignore"):
        orders = np.log(D[:, :-1] / D[:, 1:]) / np.log(dxs[:-1] / dxs[1:])
    limits = np.array([0.0 if corrected else -0.5 * f(L) ** 2 for f in funcs])
    return DissipativityStudy(tuple(levels), dxs, D, orders, limits)
