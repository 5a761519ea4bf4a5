"""Spatial norms, fractional boundary norms and sliding-window Y/B norms."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid
from scipy.ndimage import maximum_filter1d
from scipy.special import zeta

B_NORM_SAMPLE_CAP = 256


def l2_norm(u, dx: float) -> float:
    """Trapezoidal L2(0, L) norm of nodal values (including both end nodes)."""
    u = np.asarray(u)
    return float(np.sqrt(trapezoid(np.abs(u) ** 2, dx=dx)))


def h1_norm(u, dx: float) -> float:
    """H1 norm with second-order centered (one-sided at the ends) u_x."""
    u = np.asarray(u)
    ux = np.gradient(u, dx, edge_order=2)
    return float(np.sqrt(trapezoid(np.abs(u) ** 2 + np.abs(ux) ** 2, dx=dx)))


def gagliardo_seminorm(h, theta: float, dt: float, periodic: bool = False) -> float:
    """Gagliardo seminorm [h]_theta of a uniformly sampled signal.

    Evaluates sqrt of the double integral of |h(t)-h(s)|^2 / |t-s|^(1+2 theta)
    by the product trapezoid rule, leaving out the diagonal band |t-s| < dt
    where the integrand is singular.

    Parameters
    ----------
    h : array_like
        Samples h(t_0), ..., h(t_{n-1}) with spacing ``dt``; n >= 16.
    theta : float
        Fractional order in (0, 1).
    dt : float
        Sample spacing.
    periodic : bool
        If True the samples are one period (no repeated end point) and the
        kernel is summed over all periodic images, i.e. the seminorm is taken
        for the periodic extension s in R against t in one period.
    """
    h = np.asarray(h, dtype=float)
    if h.ndim != 1 or h.size < 16:
        raise ValueError("gagliardo_seminorm needs at least 16 samples")
    if not 0.0 < theta < 1.0:
        raise ValueError(f"theta must lie in (0, 1), got {theta!r}")
    n = h.size
    p = 1.0 + 2.0 * theta
    diff2 = (h[:, None] - h[None, :]) ** 2
    k = np.arange(n)
    if periodic:
        period = n * dt
        z = ((k[:, None] - k[None, :]) % n) / n
        with np.errstate(divide="ignore", invalid="ignore"):
            kern = (zeta(p, z) + zeta(p, 1.0 - z)) / period**p
        np.fill_diagonal(kern, 0.0)
        w = np.full(n, dt)
    else:
        gap = np.abs(k[:, None] - k[None, :]).astype(float) * dt
        with np.errstate(divide="ignore"):
            kern = np.where(gap > 0, gap ** (-p), 0.0)
        w = np.full(n, dt)
        w[0] = w[-1] = 0.5 * dt
    total = np.einsum("i,ij,j->", w, diff2 * kern, w)
    return float(np.sqrt(max(total, 0.0)))


def _subsample(x, cap: int):
    n = len(x)
    step = max(1, int(np.ceil((n - 1) / (cap - 1)))) if n > cap else 1
    return x[::step], step


def boundary_b_norm(samples, dt: float, cap: int = B_NORM_SAMPLE_CAP) -> float:
    """Surrogate B-norm of boundary data over one window.

    H^{1/3} (L2 plus Gagliardo seminorm) for h1, L2 for h2 and an L2 upper
    surrogate for the negative-order h3 component.
    """
    samples = np.asarray(samples, dtype=float)
    if len(samples) < 2:
        return 0.0
    l2sq = trapezoid(samples**2, dx=dt, axis=0)
    h1s, step = _subsample(samples[:, 0], cap)
    semi = gagliardo_seminorm(h1s, 1.0 / 3.0, dt * step) if h1s.size >= 16 else 0.0
    return float(np.sqrt(l2sq[0] + semi**2 + l2sq[1] + l2sq[2]))


@dataclass(frozen=True)
class NormReport:
    t_start: float
    T: float
    sup_l2: float
    int_h1: float
    y_norm: float
    boundary_b_norm: float
    surrogate: bool = True


def y_norm_windows(trajectory, T: float, stride: int = 1, b_cap: int = B_NORM_SAMPLE_CAP) -> list[NormReport]:
    """Y-norm (sup L2 + time-integrated H1) and B-norm on sliding windows.

    ``trajectory`` needs ``times``, ``l2_series``, ``h1_series`` and
    ``boundary`` (per-step (h1, h2, h3) samples).  One report per
    ``stride``-th stored step whose window [t, t+T] fits in the run.
    """
    t = np.asarray(trajectory.times, dtype=float)
    if t.size < 2:
        raise ValueError("trajectory has fewer than two time levels")
    dt = t[1] - t[0]
    k = int(round(T / dt))
    if k < 1 or k > t.size - 1:
        raise ValueError(f"trajectory duration {t[-1] - t[0]:g} shorter than window T={T:g}")
    l2 = np.asarray(trajectory.l2_series, dtype=float)
    h1sq = np.asarray(trajectory.h1_series, dtype=float) ** 2
    bd = np.asarray(trajectory.boundary, dtype=float)
    # running max over [i, i+k]
    w = k + 1
    sup = maximum_filter1d(l2, size=w, origin=-(w // 2), mode="nearest")
    cum = cumulative_trapezoid(h1sq, t, initial=0.0)
    reports = []
    for s in range(0, t.size - k, stride):
        ih1 = float(np.sqrt(max(cum[s + k] - cum[s], 0.0)))
        sl = float(sup[s])
        reports.append(
            NormReport(
                t_start=float(t[s]),
                T=k * dt,
                sup_l2=sl,
                int_h1=ih1,
                y_norm=sl + ih1,
                boundary_b_norm=boundary_b_norm(bd[s : s + k + 1], dt, b_cap),
            )
        )
    return reports
