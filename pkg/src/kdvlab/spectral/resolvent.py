"""Resolvent R(lam, A) = (lam I - A)^{-1}: kernel quadrature and norm profiles."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson, trapezoid

from ..discretization.banded import BandedLU
from ..discretization.grid import BcVariant, Grid
from ..discretization.operator import build_operator
from .green import GreenKernel

log = logging.getLogger(__name__)

POWER_TOL = 1e-6
POWER_MAXITER = 500


def resolvent_apply(f, lam: complex, L: float) -> np.ndarray:
    """w(y) = int_0^L G(y, xi; lam) f(xi) dxi at the sample points of f.

    ``f`` holds samples on the uniform grid linspace(0, L, n).  Each integral
    is split at xi = y (where G'' jumps) and both halves use composite
    Simpson.
    """
    f = np.asarray(f)
    n = f.size
    if n < 3:
        raise ValueError("need at least 3 samples of f")
    x = np.linspace(0.0, L, n)
    if not np.any(f):
        return np.zeros(n, dtype=complex)
    K = GreenKernel(lam, L).matrix(x, x)
    integrand = K * f[None, :]
    w = np.empty(n, dtype=complex)
    for i in range(n):
        left = simpson(integrand[i, : i + 1], x=x[: i + 1]) if i >= 1 else 0.0
        right = simpson(integrand[i, i:], x=x[i:]) if i <= n - 2 else 0.0
        w[i] = left + right
    return w


def hilbert_schmidt_norm(lam: complex, L: float, n: int = 513) -> float:
    """sqrt of the 2D trapezoid quadrature of |G(y, xi)|^2 over [0, L]^2."""
    x = np.linspace(0.0, L, n)
    K = GreenKernel(lam, L).matrix(x, x)
    inner = trapezoid(np.abs(K) ** 2, x=x, axis=1)
    return float(np.sqrt(trapezoid(inner, x=x)))


def _power_norm(matvec, rmatvec, n, rng, tol=POWER_TOL, maxiter=POWER_MAXITER):
    """Largest singular value by power iteration on R^H R; None if stagnated."""
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    v /= np.linalg.norm(v)
    est = 0.0
    for _ in range(maxiter):
        w = rmatvec(matvec(v))
        nw = np.linalg.norm(w)
        if nw == 0:
            return 0.0
        new = np.sqrt(nw)
        v = w / nw
        if est > 0 and abs(new - est) <= tol * new:
            return new
        est = new
    return None


def kernel_resolvent_norm(lam: complex, L: float, x: np.ndarray, rng: np.random.Generator):
    """Norm of the Nystrom-discretised resolvent on nodes ``x``.

    The matrix is W^{1/2} K W^{1/2} with K[i, k] = G(x_i, x_k) and trapezoid
    weights W, whose spectral norm approximates the L2 operator norm of
    R(lam, A).  Returns (norm, used_svd).
    """
    wt = np.full(x.size, x[1] - x[0])
    wt[0] = wt[-1] = 0.5 * (x[1] - x[0])
    r = np.sqrt(wt)
    S = r[:, None] * GreenKernel(lam, L).matrix(x, x) * r[None, :]
    val = _power_norm(lambda v: S @ v, lambda v: S.conj().T @ v, x.size, rng)
    if val is None:
        log.warning("power iteration stagnated at lam=%s; using dense SVD", lam)
        return float(np.linalg.svd(S, compute_uv=False)[0]), True
    return float(val), False


def discrete_resolvent_norm(lu: BandedLU, rng: np.random.Generator):
    """Norm of the finite-difference resolvent (sigma I - A_h)^{-1}.

    Two banded solves per iteration.  Returns (norm, used_svd).
    """
    n = lu.op.size
    val = _power_norm(lu.solve, lambda v: lu.solve(v, trans="C"), n, rng)
    if val is None:
        log.warning("power iteration stagnated at sigma=%s; using dense SVD", lu.sigma)
        dense = lu.sigma * np.eye(n) - lu.scale * lu.op.dense()
        return float(np.linalg.svd(np.linalg.inv(dense), compute_uv=False)[0]), True
    return float(val), False


@dataclass(frozen=True)
class ResolventProfile:
    omegas: np.ndarray
    norms: np.ndarray
    hs_norms: np.ndarray
    fitted_slope: float
    fit_window: tuple[float, float]
    svd_fallback: np.ndarray
    N: int
    fd_norms: np.ndarray | None = None
    fd_slope: float | None = None


def fit_loglog_slope(omegas, norms, window=None) -> float:
    omegas = np.asarray(omegas, dtype=float)
    norms = np.asarray(norms, dtype=float)
    lo, hi = window if window is not None else (omegas[0], omegas[-1])
    sel = (omegas >= lo) & (omegas <= hi)
    if sel.sum() < 2:
        raise ValueError("fit window contains fewer than two frequencies")
    return float(np.polyfit(np.log(omegas[sel]), np.log(norms[sel]), 1)[0])


def resolvent_norm_profile(L: float, omegas, N: int = 256, fit_window=None, hs_points: int | None = None,
                           seed: int = 0, include_fd: bool = True) -> ResolventProfile:
    """Norm of R(i omega, A) along the imaginary axis.

    Parameters
    ----------
    L : float
        Interval length.
    omegas : array_like
        Positive, strictly increasing frequencies.
    N : int
        Grid size: the resolvent is discretised on the N+2 nodes of Grid(L, N).
    fit_window : (float, float), optional
        Frequency range of the log-log slope fit; defaults to all of ``omegas``.
    hs_points : int, optional
        Quadrature points per direction for the Hilbert-Schmidt value.
    include_fd : bool
        Also report the norm of the finite-difference resolvent
        (sigma I - A_h)^{-1}.  That matrix carries a grid-scale parasitic
        branch of the centered third-difference stencil and overestimates
        the continuous norm by a roughly N-independent factor, so it is
        reported for comparison only.

    Returns
    -------
    ResolventProfile
        Operator-norm estimates, Hilbert-Schmidt values from the Green's
        function and the fitted slope of log(norm) against log(omega).
    """
    omegas = np.asarray(omegas, dtype=float)
    if omegas.ndim != 1 or omegas.size == 0:
        raise ValueError("omegas must be a non-empty 1-D list")
    if np.any(omegas <= 0) or np.any(np.diff(omegas) <= 0):
        raise ValueError("omegas must be positive and strictly increasing")
    grid = Grid(L, N)
    op = build_operator(grid, BcVariant.CG) if include_fd else None
    rng = np.random.default_rng(seed)
    hs_points = hs_points or 2 * N + 1
    norms = np.empty(omegas.size)
    hs = np.empty(omegas.size)
    fd = np.empty(omegas.size) if include_fd else None
    fallback = np.zeros(omegas.size, dtype=bool)
    for i, w in enumerate(omegas):
        norms[i], fallback[i] = kernel_resolvent_norm(1j * w, L, grid.nodes, rng)
        hs[i] = hilbert_schmidt_norm(1j * w, L, hs_points)
        if include_fd:
            fd[i], _ = discrete_resolvent_norm(BandedLU(op, 1j * w, 1.0), rng)
    if not np.all(np.isfinite(norms)):
        raise FloatingPointError("non-finite resolvent norm")
    window = tuple(fit_window) if fit_window is not None else (float(omegas[0]), float(omegas[-1]))
    slope = fit_loglog_slope(omegas, norms, window)
    fd_slope = fit_loglog_slope(omegas, fd, window) if include_fd else None
    return ResolventProfile(omegas, norms, hs, slope, window, fallback, N, fd, fd_slope)
