"""Manufactured-solution convergence study for the linear and nonlinear solvers.

The exact solution is u_e = exp(-t) sin(pi x / L); the forcing is whatever
makes it solve the forced equation, and the boundary triple is read off u_e.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ..discretization.grid import BcVariant, Grid
from ..discretization.norms import l2_norm
from .signals import BoundarySignal
from .stepping import simulate_linear, simulate_nonlinear

DEFAULT_LEVELS = (64, 128, 256)


def exact_solution(x, t, L: float) -> np.ndarray:
    return np.exp(-t) * np.sin(np.pi * np.asarray(x) / L)


def manufactured_forcing(L: float, nonlinear: bool) -> Callable:
    """f = u_t + u_x + u_xxx (+ u u_x) evaluated on u_e."""
    k = np.pi / L

    def f(x, t):
        e = np.exp(-t)
        s, c = np.sin(k * x), np.cos(k * x)
        out = e * (-s + (k - k**3) * c)
        if nonlinear:
            out = out + e * e * k * s * c
        return out

    return f


def manufactured_boundary(L: float, bc=BcVariant.CG) -> BoundarySignal:
    """Boundary triple of u_e for either variant."""
    k = np.pi / L
    bc = BcVariant.parse(bc)
    if bc is BcVariant.CG:
        # u(0), u_x(L), u_xx(L)
        return BoundarySignal.general(lambda t: np.stack([0 * t, -k * np.exp(-t), 0 * t], -1))
    # u(0), u(L), u_x(L)
    return BoundarySignal.general(lambda t: np.stack([0 * t, 0 * t, -k * np.exp(-t)], -1))


@dataclass(frozen=True)
class MmsResult:
    flow: str
    bc: BcVariant
    levels: tuple
    dx: np.ndarray
    errors: np.ndarray  # L2 error at T_end
    orders: np.ndarray  # pairwise observed orders in dx

    @property
    def min_order(self) -> float:
        return float(np.min(self.orders)) if self.orders.size else float("nan")


def mms_study(flow: str = "linear", bc=BcVariant.CG, L: float = 1.0, T_end: float = 1.0,
              levels: Sequence[int] = DEFAULT_LEVELS, dt_over_dx: float = 1.0) -> MmsResult:
    """Run the manufactured problem on each level with dt proportional to dx.

    Parameters
    ----------
    flow : {"linear", "nonlinear"}
    bc : BcVariant or str
    levels : sequence of int
        Values of N, coarse to fine.
    dt_over_dx : float
        Fixed ratio dt/dx, so the observed order is a joint space-time order.
    """
    bc = BcVariant.parse(bc)
    nonlinear = flow == "nonlinear"
    sim = simulate_nonlinear if nonlinear else simulate_linear
    f = manufactured_forcing(L, nonlinear)
    h = manufactured_boundary(L, bc)
    dxs, errs = [], []
    for N in levels:
        g = Grid(L, int(N))
        dt = dt_over_dx * g.dx
        tr = sim(exact_solution(g.nodes, 0.0, L), h, T_end, g, bc, dt=dt, forcing=f)
        ref = exact_solution(g.nodes, tr.times[-1], L)
        errs.append(l2_norm(tr.states[-1] - ref, g.dx))
        dxs.append(g.dx)
    dxs, errs = np.array(dxs), np.array(errs)
    orders = np.log(errs[:-1] / errs[1:]) / np.log(dxs[:-1] / dxs[1:])
    return MmsResult(flow, bc, tuple(int(n) for n in levels), dxs, errs, orders)
