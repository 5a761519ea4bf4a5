"""Crank-Nicolson / Adams-Bashforth IMEX integration of the linear, variable
coefficient and nonlinear initial-boundary value problems.

Every flow is u_t = A_h u + lifting @ h(t) + E(u, t) + f(t) on the unknown
nodes, with E the explicit term: 0 (linear), -D(a u) (variable coefficient)
or -(1/3)[u Du + D(u^2)] (nonlinear, skew-symmetric split).
"""

from __future__ import annotations

import logging
from typing import Callable, Optional

import numpy as np

from ..discretization.banded import BandedLU
from ..discretization.grid import BcVariant, Grid
from ..discretization.norms import h1_norm, l2_norm
from ..discretization.operator import OperatorMatrix, build_operator
from ..errors import ConfigurationError, StepSizeError
from .signals import BoundarySignal
from .trajectory import TraceProbe, Trajectory, energy_flux, variant_flux

log = logging.getLogger(__name__)

BLOWUP_THRESHOLD = 1e6
ADVECTIVE_LIMIT = 0.5
MAX_STORED_STATES = 2001


def default_dt(grid: Grid, flow: str) -> float:
    return grid.dx if flow == "linear" else 0.25 * grid.dx


def unknowns_from(phi, grid: Grid) -> np.ndarray:
    """Initial data as values on the unknown nodes x_1..x_{N-1}."""
    if callable(phi):
        phi = phi(grid.nodes)
    phi = np.asarray(phi, dtype=float)
    if phi.shape == (grid.n_nodes,):
        return phi[1 : grid.N].copy()
    if phi.shape == (grid.N - 1,):
        return phi.copy()
    raise ConfigurationError(f"initial data of shape {phi.shape} does not match grid with N={grid.N}")


def step_linear(state, operator: OperatorMatrix, h, dt: float, lu: Optional[BandedLU] = None,
                forcing=None) -> np.ndarray:
    """One Crank-Nicolson step.

    Parameters
    ----------
    state : ndarray
        Unknowns at t_n.
    operator : OperatorMatrix
        Discrete A_h with its lifting.
    h : pair of (3,) arrays
        Boundary data at t_n and t_{n+1}.
    dt : float
        Step size, > 0.
    lu : BandedLU, optional
        Factorization of I - dt/2 A_h to reuse.
    forcing : pair of arrays, optional
        Interior source at t_n and t_{n+1}.
    """
    if not dt > 0:
        raise ConfigurationError(f"dt must be positive, got {dt!r}")
    if lu is None:
        lu = BandedLU(operator, 1.0, 0.5 * dt)
    h0, h1 = (np.asarray(v, dtype=float) for v in h)
    rhs = state + 0.5 * dt * (operator.matrix @ state) + 0.5 * dt * (operator.lifting @ (h0 + h1))
    if forcing is not None:
        rhs = rhs + 0.5 * dt * (forcing[0] + forcing[1])
    return lu.solve(rhs)


class _Explicit:
    """Explicit term E(u_full, t) restricted to the unknowns."""

    def __init__(self, kind: str, op: OperatorMatrix, coef: Optional[Callable[[float], np.ndarray]] = None):
        self.kind = kind
        self.D = op.d1_full
        self.N = op.grid.N
        self.coef = coef

    def __call__(self, full: np.ndarray, t: float) -> np.ndarray:
        if self.kind == "nonlinear":
            return -(full[1 : self.N] * (self.D @ full) + self.D @ (full * full)) / 3.0
        return -(self.D @ (self.coef(t) * full))


def _integrate(op: OperatorMatrix, u, signal: BoundarySignal, n_steps: int, dt: float, flow: str,
               explicit: Optional[_Explicit], forcing, store_every: Optional[int], startup_steps: int,
               step0: int = 0, history: Optional[np.ndarray] = None) -> Trajectory:
    grid = op.grid
    N = grid.N
    if store_every is None:
        store_every = max(1, int(np.ceil(n_steps / (MAX_STORED_STATES - 1))))
    lu = BandedLU(op, 1.0, 0.5 * dt)
    lu_q = BandedLU(op, 1.0, 0.25 * dt) if explicit is not None else None
    probe = TraceProbe(grid)
    cubic = flow == "nonlinear"

    idx = np.arange(step0, step0 + n_steps + 1)
    times = idx * dt
    H = signal.at(times)
    n_lv = n_steps + 1
    l2 = np.full(n_lv, np.nan)
    h1 = np.full(n_lv, np.nan)
    traces = np.full((n_lv, 6), np.nan)
    flux = np.full(n_lv, np.nan)
    vflux = np.full(n_lv, np.nan)
    stored_idx, stored = [], []

    def f_at(t):
        return 0.0 if forcing is None else forcing(grid.nodes, t)[1:N]

    def record(k, full):
        l2[k] = l2_norm(full, grid.dx)
        h1[k] = h1_norm(full, grid.dx)
        tr = probe(full)
        traces[k] = tr
        flux[k] = energy_flux(tr, cubic)
        vflux[k] = variant_flux(tr)
        if k % store_every == 0 or k == n_steps:
            stored_idx.append(k)
            stored.append(full)

    e_prev = history
    blown, t_blow, last = False, None, n_steps
    for k in range(n_steps):
        n = step0 + k
        t, tn = times[k], times[k + 1]
        full = op.reconstruct(u, H[k])
        record(k, full)
        e_now = explicit(full, t) if explicit is not None else None
        base = u + 0.5 * dt * (op.matrix @ u)
        if n < startup_steps:
            # two backward-Euler half steps damp the grid-scale content of rough data
            th = t + 0.5 * dt
            hh = signal.at(np.array([th]))[0]
            ex = e_now if e_now is not None else 0.0
            u_half = lu.solve(u + 0.5 * dt * (op.lifting @ hh + f_at(th) + ex))
            if explicit is not None:
                ex = explicit(op.reconstruct(u_half, hh), th)
            u = lu.solve(u_half + 0.5 * dt * (op.lifting @ H[k + 1] + f_at(tn) + ex))
        elif explicit is None:
            rhs = base + 0.5 * dt * (op.lifting @ (H[k] + H[k + 1]))
            if forcing is not None:
                rhs = rhs + 0.5 * dt * (f_at(t) + f_at(tn))
            u = lu.solve(rhs)
        else:
            if e_prev is None:
                # explicit midpoint: CN half step for the predictor
                th = t + 0.5 * dt
                hh = signal.at(np.array([th]))[0]
                rq = u + 0.25 * dt * (op.matrix @ u) + 0.25 * dt * (op.lifting @ (H[k] + hh)) + 0.5 * dt * e_now
                if forcing is not None:
                    rq = rq + 0.25 * dt * (f_at(t) + f_at(th))
                u_half = lu_q.solve(rq)
                ex = explicit(op.reconstruct(u_half, hh), th)
            else:
                ex = 1.5 * e_now - 0.5 * e_prev
            rhs = base + 0.5 * dt * (op.lifting @ (H[k] + H[k + 1])) + dt * ex
            if forcing is not None:
                rhs = rhs + 0.5 * dt * (f_at(t) + f_at(tn))
            u = lu.solve(rhs)
        e_prev = e_now
        if not np.all(np.isfinite(u)) or np.max(np.abs(u)) > BLOWUP_THRESHOLD:
            blown, t_blow, last = True, float(tn), k + 1
            log.warning("blow-up guard tripped at t=%g (|u|max > %g)", tn, BLOWUP_THRESHOLD)
            break
    full = op.reconstruct(u, H[last])
    if blown:
        stored_idx.append(last)
        stored.append(full)
        l2[last] = l2_norm(full, grid.dx) if np.all(np.isfinite(full)) else np.inf
    else:
        record(last, full)
    cut = last + 1
    return Trajectory(
        grid=grid,
        bc=op.bc,
        dt=dt,
        flow=flow,
        times=times[:cut],
        state_indices=np.array(stored_idx, dtype=int),
        states=np.array(stored),
        l2_series=l2[:cut],
        h1_series=h1[:cut],
        traces=traces[:cut],
        boundary=H[:cut],
        energy_flux_series=flux[:cut],
        variant_flux_series=vflux[:cut],
        blown_up=blown,
        blowup_time=t_blow,
        final_unknowns=u,
        history=e_prev,
        step0=step0,
    )


def _setup(phi, grid, bc, dt, T_end, flow, resume):
    bc = BcVariant.parse(bc)
    if not T_end > 0:
        raise ConfigurationError(f"T_end must be positive, got {T_end!r}")
    if resume is not None:
        grid, bc, dt = resume.grid, resume.bc, resume.dt
    dt = float(dt) if dt is not None else default_dt(grid, flow)
    if not dt > 0:
        raise ConfigurationError(f"dt must be positive, got {dt!r}")
    n_steps = int(round(T_end / dt))
    if abs(n_steps * dt - T_end) > 1e-9 * T_end:
        n_steps = int(np.ceil(T_end / dt))
    op = build_operator(grid, bc)
    if resume is not None:
        u = resume.final_unknowns.copy()
        step0 = resume.step0 + resume.n_steps
        history = resume.history
    else:
        u = unknowns_from(phi, grid)
        step0, history = 0, None
    return op, u, dt, max(n_steps, 1), step0, history


def simulate_linear(phi, h: Optional[BoundarySignal], T_end: float, grid: Grid, bc=BcVariant.CG,
                    dt: Optional[float] = None, forcing=None, store_every: Optional[int] = None,
                    startup_steps: int = 0, resume: Optional[Trajectory] = None) -> Trajectory:
    """Linear flow u_t + u_x + u_xxx = f with boundary data h (Crank-Nicolson).

    Parameters
    ----------
    phi : callable or ndarray
        Initial data, a function of x or nodal values.
    h : BoundarySignal or None
        Boundary data; None means h = 0.
    T_end : float
        Final time.
    grid, bc : Grid, BcVariant
        Discretization.
    dt : float, optional
        Step, default dx.
    forcing : callable(x, t), optional
        Interior source term.
    store_every : int, optional
        Stride of stored full states (default keeps about 2000).
    startup_steps : int
        Number of initial steps taken as two backward-Euler half steps
        (recommended for rough data, which plain Crank-Nicolson does not damp).
    resume : Trajectory, optional
        Continue from the end of a previous run (grid, bc and dt are taken
        from it).
    """
    h = h or BoundarySignal.zero()
    op, u, dt, n, step0, _ = _setup(phi, grid, bc, dt, T_end, "linear", resume)
    return _integrate(op, u, h, n, dt, "linear", None, forcing, store_every, startup_steps, step0)


def _coefficient(a, grid: Grid, dt: float):
    """Callable t -> a(., t) on all nodes, from a function, array or Trajectory."""
    if callable(a):
        return lambda t: np.asarray(a(grid.nodes, t), dtype=float) * np.ones(grid.n_nodes)
    if isinstance(a, Trajectory):
        if not np.all(np.diff(a.state_indices) == 1) or a.grid.N != grid.N:
            raise ConfigurationError("coefficient trajectory must store every step on the same grid")
        samples, step = a.states, a.dt
    else:
        samples, step = np.asarray(a, dtype=float), dt
        if samples.ndim != 2 or samples.shape[1] != grid.n_nodes:
            raise ConfigurationError("coefficient samples must have shape (n_times, N+2)")

    def at(t):
        s = t / step
        i = int(np.floor(s + 1e-9))
        if i >= samples.shape[0] - 1:
            return samples[-1]
        w = s - i
        return samples[i] if w < 1e-9 else (1 - w) * samples[i] + w * samples[i + 1]

    at.sup = float(np.max(np.abs(samples)))
    return at


def simulate_varcoef(a, phi, h: Optional[BoundarySignal], T_end: float, grid: Grid, bc=BcVariant.CG,
                     dt: Optional[float] = None, forcing=None, store_every: Optional[int] = None,
                     startup_steps: int = 0, resume: Optional[Trajectory] = None,
                     a_sup: Optional[float] = None) -> Trajectory:
    """u_t + (a u)_x + u_x + u_xxx = f, with (a u)_x = D(a u) taken explicitly (AB2).

    ``a`` is a function a(x, t), an array of nodal samples per time step or a
    Trajectory stored at every step.  Raises StepSizeError when
    sup|a| dt / dx exceeds 0.5.
    """
    h = h or BoundarySignal.zero()
    op, u, dt, n, step0, hist = _setup(phi, grid, bc, dt, T_end, "varcoef", resume)
    coef = _coefficient(a, op.grid, dt)
    sup = a_sup if a_sup is not None else getattr(coef, "sup", None)
    if sup is None:
        ts = (step0 + np.arange(n + 1)) * dt
        sup = max(float(np.max(np.abs(coef(t)))) for t in ts[:: max(1, n // 200)])
    ratio = sup * dt / op.grid.dx
    if ratio > ADVECTIVE_LIMIT:
        raise StepSizeError(f"advective ratio sup|a| dt/dx = {ratio:.3f} exceeds {ADVECTIVE_LIMIT}")
    explicit = _Explicit("varcoef", op, coef)
    return _integrate(op, u, h, n, dt, "varcoef", explicit, forcing, store_every, startup_steps, step0, hist)


def simulate_nonlinear(phi, h: Optional[BoundarySignal], T_end: float, grid: Grid, bc=BcVariant.CG,
                       dt: Optional[float] = None, forcing=None, store_every: Optional[int] = None,
                       startup_steps: int = 0, resume: Optional[Trajectory] = None) -> Trajectory:
    """KdV u_t + u_x + u_xxx + u u_x = f with boundary data h.

    IMEX: Crank-Nicolson on A_h, Adams-Bashforth 2 on the skew-symmetric
    split (1/3)[u Du + D(u^2)] (explicit midpoint for the first step).  The
    run stops with ``blown_up=True`` once sup|u| exceeds 1e6.
    """
    h = h or BoundarySignal.zero()
    op, u, dt, n, step0, hist = _setup(phi, grid, bc, dt, T_end, "nonlinear", resume)
    explicit = _Explicit("nonlinear", op)
    return _integrate(op, u, h, n, dt, "nonlinear", explicit, forcing, store_every, startup_steps, step0, hist)
