"""Fixed points of the period map u(., 0) -> u(., tau) for periodic boundary forcing."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..discretization.grid import BcVariant, Grid
from ..discretization.norms import l2_norm
from ..errors import ConfigurationError
from .initial import eigenmode
from .signals import BoundarySignal
from .stepping import default_dt, simulate_nonlinear

log = logging.getLogger(__name__)

CONVERGED_DISTANCE = 1e-10
DIVERGENCE_RUN = 5
PERTURBATION_NORM = 0.01
RATE_FLOOR = 1e-11
STARTUP_STEPS = 2
PERTURBATION_MODES = 4


@dataclass
class PeriodMapResult:
    iterates: np.ndarray  # (n+1, N+2) full states u(., n tau), iterates[0] = 0
    distances: np.ndarray  # ||iterate_{n+1} - iterate_n||
    contraction_ratio: float  # fitted geometric ratio (0 when the first distance is already 0)
    fixed_point: Optional[np.ndarray]
    stability_rate: Optional[float]  # fitted exponential return rate of a perturbed cycle
    converged: bool
    diverged: bool
    amplitude: float  # sup of |h| over one period
    tau: float
    dt: float
    periodic_residual: Optional[float] = None  # ||u(., tau) - u(., 0)|| from the fixed point


def _geometric_ratio(d: np.ndarray) -> float:
    d = d[d > 0]
    if d.size == 0:
        return 0.0
    if d.size == 1:
        return float("nan")
    slope = np.polyfit(np.arange(d.size), np.log(d), 1)[0]
    return float(np.exp(slope))


def period_map(h: BoundarySignal, grid: Grid, max_iters: int = 50, bc=BcVariant.CG,
               dt: Optional[float] = None, delta: float = 0.1, return_periods: int = 3,
               seed: int = 0) -> PeriodMapResult:
    """Iterate the nonlinear flow over successive periods starting from u = 0.

    Each period is an independent run started from the previous end state,
    so the map depends on u only.  Two backward-Euler half steps open every
    period because Crank-Nicolson alone leaves the stiff modes undamped.
    The step is adjusted to divide the period exactly.  Convergence is
    declared once a distance falls below 1e-10; five consecutive increases
    mark divergence (reported, not raised).  On convergence the fixed point
    is perturbed by a random mix of the leading discrete eigenmodes with L2
    norm 0.01, so the perturbation meets the homogeneous boundary
    conditions, and the decay of its distance to the periodic cycle over
    ``return_periods`` periods gives the return rate.

    Parameters
    ----------
    h : BoundarySignal
        Periodic boundary data (kind ``periodic`` or ``zero``).
    grid : Grid
    max_iters : int
        Maximum number of periods, at least 10.
    delta : float
        Largest admissible sup of |h| over a period.
    """
    if max_iters < 10:
        raise ConfigurationError(f"max_iters must be at least 10, got {max_iters}")
    if h.kind == "zero":
        tau = 1.0
    elif h.kind == "periodic":
        tau = float(h.tau)
    else:
        raise ConfigurationError(f"period_map needs a periodic boundary signal, got kind {h.kind!r}")
    bc = BcVariant.parse(bc)
    base = float(dt) if dt is not None else default_dt(grid, "nonlinear")
    n_steps = max(int(np.ceil(tau / base - 1e-9)), 1)
    dt = tau / n_steps
    tt = np.linspace(0.0, tau, n_steps + 1)
    h.check(tt)
    amplitude = float(np.max(np.abs(h.at(tt))))
    if amplitude > delta:
        raise ConfigurationError(f"boundary amplitude {amplitude:.3g} exceeds the small-data threshold {delta:.3g}")

    u = np.zeros(grid.n_nodes)
    iterates, dists = [u], []
    converged = diverged = False
    rising = 0
    for n in range(max_iters):
        traj = simulate_nonlinear(u, h, tau, grid, bc, dt=dt, store_every=n_steps, startup_steps=STARTUP_STEPS)
        if traj.blown_up:
            diverged = True
            log.warning("period map blew up in period %d (amplitude %.3g)", n + 1, amplitude)
            break
        new = traj.states[-1]
        d = l2_norm(new - u, grid.dx)
        iterates.append(new)
        dists.append(d)
        u = new
        if d < CONVERGED_DISTANCE:
            converged = True
            break
        rising = rising + 1 if len(dists) > 1 and d > dists[-2] else 0
        if rising >= DIVERGENCE_RUN:
            diverged = True
            log.warning("period map not contracting at amplitude %.3g", amplitude)
            break
    dists = np.asarray(dists)
    ratio = _geometric_ratio(dists)
    result = PeriodMapResult(np.array(iterates), dists, ratio, None, None, converged, diverged, amplitude, tau, dt)
    if not converged:
        return result

    fixed = iterates[-1]
    cycle = simulate_nonlinear(fixed, h, return_periods * tau, grid, bc, dt=dt, store_every=1,
                                startup_steps=STARTUP_STEPS)
    result.fixed_point = fixed
    result.periodic_residual = l2_norm(cycle.states[n_steps] - fixed, grid.dx)
    rng = np.random.default_rng(seed)
    modes = np.array([eigenmode(grid, k, bc) for k in range(1, PERTURBATION_MODES + 1)])
    pert = rng.standard_normal(PERTURBATION_MODES) @ modes
    pert *= PERTURBATION_NORM / l2_norm(pert, grid.dx)
    perturbed = simulate_nonlinear(fixed + pert, h, return_periods * tau, grid, bc, dt=dt,
                                   store_every=1, startup_steps=STARTUP_STEPS)
    gap = np.array([l2_norm(a - b, grid.dx) for a, b in zip(perturbed.states, cycle.states)])
    t = perturbed.state_times
    keep = gap > RATE_FLOOR
    if keep.sum() >= 10:
        result.stability_rate = float(-np.polyfit(t[keep], np.log(gap[keep]), 1)[0])
    return result
