"""Eigenvalues of A as zeros of the characteristic determinant."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..errors import ContourError
from .contour import Box, count_zeros, locate_zero_boxes
from .determinant import char_det_array, char_function

log = logging.getLogger(__name__)

LOW_MODE_BOX = Box(-200.0, 0.0, -100.0, 100.0)
WINDING_HALF_WIDTH = 1e-3


@dataclass(frozen=True)
class EigenvalueRecord:
    index: int
    lam: complex
    residual: float
    relative_residual: float
    seed: complex
    asymptotic_prediction: float
    relative_deviation: float
    winding: int
    suspect: bool
    iterations: int


def asymptotic_seed(k: int, L: float) -> float:
    """Newton seed for the k-th eigenvalue (k = 1, 2, ...).

    The k-th zero sits next to the real root mu = (2k-1) pi / (sqrt(3) L) of
    exp(i sqrt(3) mu L) = -1, mapped through lam = -(mu**3 + mu).
    """
    mu = (2 * k - 1) * np.pi / (np.sqrt(3.0) * L)
    return -(mu**3 + mu)


def leading_asymptotic(k, L: float):
    """Leading term -8 pi^3 k^3 / (3 sqrt(3) L^3) of the eigenvalue law."""
    k = np.asarray(k, dtype=float)
    return -(8.0 * np.pi**3 * k**3) / (3.0 * np.sqrt(3.0) * L**3)


def newton_polish(L: float, z0: complex, max_iter: int = 100, tol: float = 1e-14):
    """Newton iteration on Delta/V with a central-difference derivative.

    Returns ``(z, converged, iterations)``.
    """
    z = complex(z0)
    for it in range(1, max_iter + 1):
        h = 1e-6 * max(1.0, abs(z))
        v, ls = char_function(np.array([z, z + h, z - h]), L)
        if v[0] == 0:
            return z, True, it
        num = v[1] * np.exp(ls[1] - ls[0]) - v[2] * np.exp(ls[2] - ls[0])
        if num == 0 or not np.isfinite(num):
            return z, False, it
        step = 2.0 * h * v[0] / num
        z = z - step
        if not np.isfinite(z):
            return z, False, it
        if abs(step) <= tol * max(1.0, abs(z)):
            return z, True, it
    return z, False, max_iter


def _relative_residual(L: float, lam: complex):
    v, ls, _ = char_det_array(np.array(lam), L)
    theta = np.linspace(0.0, 2 * np.pi, 32, endpoint=False)
    vc, lc, _ = char_det_array(lam + np.exp(1j * theta), L)
    log_here = np.log(abs(v)) + ls if v != 0 else -np.inf
    with np.errstate(divide="ignore"):
        log_scale = np.max(np.log(np.abs(vc)) + lc)
    return float(np.exp(log_here)), float(np.exp(log_here - log_scale))


def _winding_at(L: float, lam: complex) -> int:
    w = WINDING_HALF_WIDTH
    box = Box(lam.real - w, lam.real + w, lam.imag - w, lam.imag + w)
    try:
        return count_zeros(L, box)
    except ContourError:
        return -1


def _is_new(z: complex, found: list[complex]) -> bool:
    tol = max(1e-6, 1e-9 * abs(z))
    return all(abs(z - f) > tol for f in found)


def find_eigenvalues(L: float, K: int, low_box: Box = LOW_MODE_BOX) -> list[EigenvalueRecord]:
    """The K eigenvalues of A closest to the imaginary axis.

    Low modes are bracketed by argument-principle subdivision of ``low_box``;
    higher modes are reached by Newton from the asymptotic seeds.  Every
    polished root is checked with a winding count on a small square.
    """
    if not L > 0:
        raise ValueError(f"L must be positive, got {L!r}")
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K!r}")

    seeds: list[complex] = []
    for b in locate_zero_boxes(L, low_box, min_diameter=1.0):
        seeds.append(b.center)
    seeds.extend(complex(asymptotic_seed(k, L)) for k in range(1, K + 3))

    roots: list[complex] = []
    origin: list[tuple[complex, int]] = []
    for seed in seeds:
        z, ok, iters = newton_polish(L, seed)
        if not ok:
            log.warning("Newton did not converge from seed %s (L=%g); dropped", seed, L)
            continue
        candidates = [z]
        if abs(z.imag) > 1e-8 * max(1.0, abs(z)):
            candidates.append(z.conjugate())
        for c in candidates:
            if abs(c.imag) <= 1e-10 * max(1.0, abs(c)):
                c = complex(c.real, 0.0)
            if _is_new(c, roots):
                roots.append(c)
                origin.append((seed, iters))

    order = sorted(range(len(roots)), key=lambda i: (-roots[i].real, -roots[i].imag))
    records = []
    for k, i in enumerate(order[:K], start=1):
        lam = roots[i]
        seed, iters = origin[i]
        res, rel = _relative_residual(L, lam)
        pred = float(leading_asymptotic(k, L))
        wind = _winding_at(L, lam)
        if wind != 1:
            log.warning("eigenvalue %s has winding %d; flagged suspect", lam, wind)
        records.append(
            EigenvalueRecord(
                index=k,
                lam=lam,
                residual=res,
                relative_residual=rel,
                seed=seed,
                asymptotic_prediction=pred,
                relative_deviation=abs(lam - pred) / abs(pred),
                winding=wind,
                suspect=wind != 1,
                iterations=iters,
            )
        )
    if len(records) < K:
        log.warning("only %d of %d eigenvalues located for L=%g", len(records), K, L)
    return records
