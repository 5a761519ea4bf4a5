"""Time-stepping output: stored states plus per-step norms, traces and fluxes."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..discretization.grid import BcVariant, Grid
from ..discretization.norms import h1_norm, l2_norm
from ..discretization.stencils import fd_weights

TRACE_NAMES = ("u0", "uL", "ux0", "uxL", "uxx0", "uxxL")


class TraceProbe:
    """Second-order one-sided end values of u, u_x, u_xx on a grid."""

    def __init__(self, grid: Grid):
        dx, n, L = grid.dx, grid.n_nodes, grid.L
        self.dx = dx
        self.left3 = np.arange(3)
        self.left4 = np.arange(4)
        self.right3 = np.arange(n - 3, n)
        self.right4 = np.arange(n - 4, n)
        self.w1l = fd_weights(0.0, self.left3 * dx, 1)
        self.w2l = fd_weights(0.0, self.left4 * dx, 2)
        self.w1r = fd_weights(L, self.right3 * dx, 1)
        self.w2r = fd_weights(L, self.right4 * dx, 2)

    def __call__(self, full: np.ndarray) -> np.ndarray:
        return np.array(
            [
                full[0],
                full[-1],
                self.w1l @ full[self.left3],
                self.w1r @ full[self.right3],
                self.w2l @ full[self.left4],
                self.w2r @ full[self.right4],
            ]
        )


def energy_flux(tr: np.ndarray, cubic: bool) -> float:
    """d/dt ||u||^2 from boundary traces: -[u^2] - (2/3)[u^3] - 2[u u_xx] + [u_x^2].

    [f] = f(L) - f(0).  The cubic term comes from uu_x and is dropped for
    linear flows.
    """
    u0, uL, ux0, uxL, uxx0, uxxL = tr
    val = -(uL**2 - u0**2) - 2.0 * (uL * uxxL - u0 * uxx0) + (uxL**2 - ux0**2)
    if cubic:
        val -= (2.0 / 3.0) * (uL**3 - u0**3)
    return float(val)


def variant_flux(tr: np.ndarray) -> float:
    """Alternative rate expression -u(0)^2/2 + (2/3) u(L)^3, reported only."""
    return float(-0.5 * tr[0] ** 2 + (2.0 / 3.0) * tr[1] ** 3)


@dataclass
class Trajectory:
    grid: Grid
    bc: BcVariant
    dt: float
    flow: str  # linear | varcoef | nonlinear
    times: np.ndarray
    state_indices: np.ndarray
    states: np.ndarray  # full nodal vectors at state_indices
    l2_series: np.ndarray
    h1_series: np.ndarray
    traces: np.ndarray  # (n, 6), columns TRACE_NAMES
    boundary: np.ndarray  # (n, 3)
    energy_flux_series: np.ndarray
    variant_flux_series: np.ndarray
    blown_up: bool = False
    blowup_time: Optional[float] = None
    final_unknowns: Optional[np.ndarray] = field(default=None, repr=False)
    history: Optional[np.ndarray] = field(default=None, repr=False)  # explicit term at last step
    step0: int = 0  # global index of times[0]

    @property
    def state_times(self) -> np.ndarray:
        return self.times[self.state_indices]

    @property
    def n_steps(self) -> int:
        return self.times.size - 1

    def trace(self, name: str) -> np.ndarray:
        return self.traces[:, TRACE_NAMES.index(name)]

    def recompute_l2(self, i: int) -> float:
        return l2_norm(self.states[i], self.grid.dx)

    def recompute_h1(self, i: int) -> float:
        return h1_norm(self.states[i], self.grid.dx)

    def state_at(self, t: float) -> np.ndarray:
        """Stored state at the stored time nearest ``t``."""
        j = int(np.argmin(np.abs(self.state_times - t)))
        return self.states[j]

    def series_table(self) -> tuple[list[str], np.ndarray]:
        """Columns for CSV output, in a fixed order."""
        cols = ["t", "l2", "h1", *TRACE_NAMES, "h1_bc", "h2_bc", "h3_bc", "energy_flux", "variant_flux"]
        data = np.column_stack(
            [
                self.times,
                self.l2_series,
                self.h1_series,
                self.traces,
                self.boundary,
                self.energy_flux_series,
                self.variant_flux_series,
            ]
        )
        return cols, data
