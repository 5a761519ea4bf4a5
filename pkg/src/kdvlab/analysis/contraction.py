"""Time-slicing audit: fit ||y_{n+1}|| <= r ||y_n|| + c2 ||y_n||^2 + c3 ||h||_B,n."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats
from scipy.optimize import nnls

from ..discretization.norms import boundary_b_norm, l2_norm
from ..errors import ConfigurationError

COEF_NAMES = ("r", "c2", "c3")
CONFIDENCE = 0.95
# slices below this fraction of the largest norm sit at the roundoff floor of
# the time stepper and carry no information about the recursion
RELATIVE_FLOOR = 1e-8


@dataclass(frozen=True)
class ContractionReport:
    T: float
    slice_times: np.ndarray
    y_norms: np.ndarray  # ||y_n||, n = 0..m
    b_norms: np.ndarray  # boundary B-norm on slice n
    r: float
    c2: float
    c3: float
    ci_low: np.ndarray  # per coefficient, nan where not estimable
    ci_high: np.ndarray
    active: tuple  # coefficients actually fitted (zero columns dropped)
    contracting: bool  # fitted r < 1
    margin: float  # 1 - r
    residual_max: float  # max relative misfit over slices
    n_used: int = 0  # equations retained above the relative floor

    def c2_contains_zero(self) -> bool:
        lo, hi = self.ci_low[1], self.ci_high[1]
        return bool(self.c2 == 0 or (np.isfinite(lo) and lo <= 0 <= hi))


def _slice_indices(traj, T: float) -> np.ndarray:
    st = traj.state_times
    t0 = st[0]
    m = int(np.floor((st[-1] - t0) / T + 1e-9))
    if m < 3:
        raise ConfigurationError(f"trajectory span {st[-1] - t0:g} holds fewer than 3 slices of length {T:g}")
    targets = t0 + T * np.arange(m + 1)
    idx = np.abs(st[None, :] - targets[:, None]).argmin(axis=1)
    gap = np.diff(st).max() if st.size > 1 else 0.0
    if np.any(np.abs(st[idx] - targets) > 0.5 * gap + 1e-12) or np.any(np.diff(idx) <= 0):
        raise ConfigurationError(f"stored states are too sparse for slices of length {T:g}")
    return idx


def contraction_audit(trajectory, T: float) -> ContractionReport:
    """Fit the slice recursion by nonnegative weighted least squares.

    y_n is the stored state nearest t_0 + nT (the realised slice times are
    reported).  Each equation is divided by
    ||y_{n+1}|| so every slice counts alike while the norms decay over many
    orders of magnitude.  Columns that vanish identically are dropped and
    their coefficient reported as 0.  Equations whose norms fall below
    ``RELATIVE_FLOOR`` times the largest norm are excluded.  Confidence intervals (95%, Student
    t) come from the linearised fit on the free coefficients.

    Parameters
    ----------
    trajectory : Trajectory
    T : float
        Slice length; the run must span at least 3 slices.
    """
    if not T > 0:
        raise ConfigurationError("slice length T must be positive")
    idx = _slice_indices(trajectory, T)
    grid = trajectory.grid
    y = np.array([l2_norm(trajectory.states[i], grid.dx) for i in idx])
    k = trajectory.state_indices[idx]  # step numbers local to the run
    bn = np.array([boundary_b_norm(trajectory.boundary[k[j]: k[j + 1] + 1], trajectory.dt)
                   for j in range(idx.size - 1)])
    X = np.column_stack([y[:-1], y[:-1] ** 2, bn])
    rhs = y[1:]
    live = np.minimum(y[:-1], rhs) >= RELATIVE_FLOOR * y.max() if y.max() > 0 else np.ones(rhs.size, bool)
    if live.sum() >= 2:
        X, rhs = X[live], rhs[live]
    m = rhs.size
    coef = np.zeros(3)
    lo = np.full(3, np.nan)
    hi = np.full(3, np.nan)
    keep = np.array([np.any(X[:, j] > 0) for j in range(3)])
    if not np.any(rhs > 0) or not keep.any():
        return ContractionReport(T, trajectory.state_times[idx], y, bn, 0.0, 0.0, 0.0, lo, hi, (), True, 1.0, 0.0, 0)
    w = 1.0 / np.where(rhs > 0, rhs, 1.0)
    Xa = X[:, keep] * w[:, None]
    ba = rhs * w
    scale = np.linalg.norm(Xa, axis=0)
    sol, _ = nnls(Xa / scale, ba)
    sol = sol / scale
    coef[keep] = sol
    resid = ba - Xa @ sol
    p = int(keep.sum())
    free = np.flatnonzero(keep)[sol > 0]
    dof = m - free.size
    if free.size and dof > 0:
        Xf = X[:, free] * w[:, None]
        s2 = float(resid @ resid) / dof
        cov = s2 * np.linalg.pinv(Xf.T @ Xf)
        half = stats.t.ppf(0.5 + CONFIDENCE / 2, dof) * np.sqrt(np.maximum(np.diag(cov), 0.0))
        lo[free], hi[free] = coef[free] - half, coef[free] + half
    # coefficients pinned at zero by the constraint: interval degenerates to {0} side
    pinned = np.flatnonzero(keep)[sol == 0]
    lo[pinned], hi[pinned] = 0.0, 0.0
    active = tuple(COEF_NAMES[j] for j in np.flatnonzero(keep))
    r = float(coef[0])
    misfit = float(np.max(np.abs(resid))) if p else 0.0
    return ContractionReport(T, trajectory.state_times[idx], y, bn, r, float(coef[1]), float(coef[2]),
                             lo, hi, active, r < 1, 1.0 - r, misfit, int(m))
