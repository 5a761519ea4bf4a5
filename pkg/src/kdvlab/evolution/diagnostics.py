"""A posteriori checks on trajectories: energy identity and the u_t system."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid

from ..discretization.operator import build_operator
from ..errors import ConfigurationError
from .stepping import unknowns_from
from .trajectory import Trajectory


@dataclass(frozen=True)
class EnergyAudit:
    times: np.ndarray  # step midpoints
    residual: np.ndarray
    variant_residual: np.ndarray
    max_residual: float


def energy_audit(traj: Trajectory) -> EnergyAudit:
    """Per-step residual (||u^{n+1}||^2 - ||u^n||^2)/dt - (F^n + F^{n+1})/2.

    F is the boundary flux recorded with the trajectory.  The same residual
    with the alternative rate expression is returned for reference only.
    """
    E = traj.l2_series**2
    dE = np.diff(E) / traj.dt
    F = traj.energy_flux_series
    V = traj.variant_flux_series
    res = dE - 0.5 * (F[1:] + F[:-1])
    vres = dE - 0.5 * (V[1:] + V[:-1])
    tm = 0.5 * (traj.times[1:] + traj.times[:-1])
    return EnergyAudit(tm, res, vres, float(np.max(np.abs(res))) if res.size else 0.0)


@dataclass(frozen=True)
class TimeDerivativeReport:
    times: np.ndarray  # integer levels 1..n-1, where tp_residual lives
    tp_residual: np.ndarray  # relative L2 residual of v_t + v_x + v_xxx + (u v)_x
    half_times: np.ndarray  # half levels, where recovery_mismatch lives
    recovery_mismatch: np.ndarray  # relative L2 of u_xxx + v + u u_x + u_x
    initial_mismatch: float  # relative L2 of v(., 0) - phi*

    def window_max(self, t_from: float = 0.0) -> tuple[float, float]:
        """Largest (tp, recovery) residuals over times >= ``t_from``."""
        a = self.tp_residual[self.times >= t_from]
        b = self.recovery_mismatch[self.half_times >= t_from]
        return (float(a.max()) if a.size else 0.0, float(b.max()) if b.size else 0.0)


def _rel(num: np.ndarray, den: np.ndarray, dx: float) -> np.ndarray:
    a = np.sqrt(trapezoid(num**2, dx=dx, axis=-1))
    b = np.sqrt(trapezoid(den**2, dx=dx, axis=-1))
    return np.where(b > 0, a / np.where(b > 0, b, 1.0), a)


def verify_time_derivative_system(traj: Trajectory, phi) -> TimeDerivativeReport:
    """Check that v = u_t solves v_t + v_x + v_xxx + (uv)_x = 0.

    v is the centered difference (u^{n+1} - u^n)/dt at the half level
    n + 1/2, where it is paired with (u^n + u^{n+1})/2; v_t is the centered
    difference of consecutive half-level values.  This is the centering of
    the Crank-Nicolson step, so (-1)^n stiff components cancel instead of
    being amplified.  Also reports the mismatch of u_xxx = -v - u u_x - u_x
    and of v(., 0) against phi* = -phi' - phi phi' - phi''' built with the
    same stencils.

    Parameters
    ----------
    traj : Trajectory
        Output of ``simulate_nonlinear`` stored at every step.
    phi : callable or array
        The initial datum used for the run.
    """
    if traj.states.shape[0] < 5:
        raise ConfigurationError("trajectory too short: need at least 5 stored steps")
    if not np.all(np.diff(traj.state_indices) == 1):
        raise ConfigurationError("trajectory must store the state at every step")
    grid = traj.grid
    op = build_operator(grid, traj.bc)
    N, dx, dt = grid.N, grid.dx, traj.dt
    U = traj.states
    A, D = op.full, op.d1_full
    st = traj.state_times

    Uh = 0.5 * (U[1:] + U[:-1])
    Vh = np.diff(U, axis=0) / dt
    lin_u = -(A @ Uh.T).T  # u_x + u_xxx on rows 1..N-1
    ux = (D @ Uh.T).T
    rec = lin_u + Vh[:, 1:N] + Uh[:, 1:N] * ux
    rec_rel = _rel(rec, lin_u - ux, dx)

    Vt = np.diff(Vh, axis=0) / dt
    Vc = 0.5 * (Vh[1:] + Vh[:-1])
    Uc = U[1:-1]
    tp = Vt[:, 1:N] - (A @ Vc.T).T + (D @ (Uc * Vc).T).T
    tp_rel = _rel(tp, Vt[:, 1:N], dx)

    # initial derivative by a second-order one-sided difference
    v0 = (-3 * U[0] + 4 * U[1] - U[2]) / (2 * dt)
    phi_full = op.reconstruct(unknowns_from(phi, grid), traj.boundary[0])
    phi_star = op.full @ phi_full - phi_full[1:N] * (D @ phi_full)
    init = float(_rel(v0[1:N] - phi_star, phi_star, dx))
    return TimeDerivativeReport(st[1:-1], tp_rel, 0.5 * (st[1:] + st[:-1]), rec_rel, init)
