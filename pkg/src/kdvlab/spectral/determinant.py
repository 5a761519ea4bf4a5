"""Characteristic determinant of A g = -g''' - g' with g(0)=g'(L)=g''(L)=0.

``Delta(lam)`` is the determinant of the 3x3 boundary matrix built from the
exponential solutions exp(s_j x).  It is antisymmetric in the root labels, so
with a fixed ordering it flips sign wherever two roots exchange order.  The
*normalised* determinant ``Delta / V`` (V the Vandermonde product of the roots)
is symmetric in the roots and therefore an entire function of lam; it is the
one used for Newton iteration and winding numbers.

All values are returned in scaled form ``scaled * exp(log_scale)`` with a real
``log_scale``, so |lam| up to 1e6 never overflows and zeros are unaffected.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cubic import DEGENERATE_DISCRIMINANT, discriminant, roots_array


@dataclass(frozen=True)
class CharDet:
    lam: complex
    L: float
    scaled: complex
    log_scale: float
    degenerate: bool
    normalized: bool

    @property
    def value(self) -> complex:
        """Unscaled value; may overflow to inf for very large |lam| L."""
        with np.errstate(over="ignore"):
            return complex(self.scaled * np.exp(self.log_scale))

    @property
    def log_abs(self) -> float:
        a = abs(self.scaled)
        return -np.inf if a == 0.0 else float(np.log(a) + self.log_scale)


def _pair_exponents(s: np.ndarray, L: float):
    e23 = (s[..., 1] + s[..., 2]) * L
    e13 = (s[..., 0] + s[..., 2]) * L
    e12 = (s[..., 0] + s[..., 1]) * L
    log_scale = np.maximum(np.maximum(e23.real, e13.real), e12.real)
    return e23, e13, e12, log_scale


def _delta_scaled(s: np.ndarray, L: float):
    s1, s2, s3 = s[..., 0], s[..., 1], s[..., 2]
    e23, e13, e12, log_scale = _pair_exponents(s, L)
    val = (
        np.exp(e23 - log_scale) * s2 * s3 * (s3 - s2)
        + np.exp(e13 - log_scale) * s3 * s1 * (s1 - s3)
        + np.exp(e12 - log_scale) * s1 * s2 * (s2 - s1)
    )
    return val, log_scale


def _vandermonde(s: np.ndarray) -> np.ndarray:
    s1, s2, s3 = s[..., 0], s[..., 1], s[..., 2]
    return (s2 - s1) * (s3 - s1) * (s3 - s2)


def _confluent_scaled(s: np.ndarray, L: float, log_scale: np.ndarray) -> np.ndarray:
    """Delta/V in the limit of a double root, via confluent divided differences."""
    out = np.empty(s.shape[:-1], dtype=complex)
    flat_s = s.reshape(-1, 3)
    flat_ls = np.broadcast_to(log_scale, out.shape).reshape(-1)
    flat_out = out.reshape(-1)
    for n, (row, ls) in enumerate(zip(flat_s, flat_ls)):
        d = [abs(row[0] - row[1]), abs(row[0] - row[2]), abs(row[1] - row[2])]
        i, j = [(0, 1), (0, 2), (1, 2)][int(np.argmin(d))]
        sigma = 0.5 * (row[i] + row[j])
        tau = -2.0 * sigma
        w = np.exp(sigma * L - ls)
        wt = np.exp(tau * L - ls)
        g, gp, gt = sigma * w, (1.0 + sigma * L) * w, tau * wt
        k, kp, kt = sigma**2 * w, (2.0 * sigma + sigma**2 * L) * w, tau**2 * wt
        g_st = (gt - g) / (tau - sigma)
        k_st = (kt - k) / (tau - sigma)
        g_sst = (g_st - gp) / (tau - sigma)
        k_sst = (k_st - kp) / (tau - sigma)
        # scaled by exp(-ls) once per factor; restore a single exp(-ls)
        flat_out[n] = (gp * k_sst - g_sst * kp) * np.exp(ls)
    return out


def char_det_array(lam, L: float, normalized: bool = False):
    """Vectorised characteristic determinant.

    Returns ``(scaled, log_scale, degenerate)`` arrays with the shape of ``lam``.
    """
    lam = np.asarray(lam, dtype=complex)
    s = roots_array(lam)
    val, log_scale = _delta_scaled(s, L)
    degenerate = np.abs(discriminant(lam)) < DEGENERATE_DISCRIMINANT
    if normalized:
        V = _vandermonde(s)
        with np.errstate(divide="ignore", invalid="ignore"):
            val = val / np.where(degenerate, 1.0, V)
        if np.any(degenerate):
            conf = _confluent_scaled(s[degenerate], L, log_scale[degenerate])
            val = np.array(val)
            val[degenerate] = conf
    elif np.any(degenerate):
        # Delta = V * (Delta/V); V is (nearly) zero here, so is Delta
        conf = _confluent_scaled(s[degenerate], L, log_scale[degenerate])
        val = np.array(val)
        val[degenerate] = _vandermonde(s[degenerate]) * conf
    return val, log_scale, degenerate


def char_det(lam: complex, L: float, normalized: bool = False) -> CharDet:
    """Characteristic determinant Delta(lam) for the interval (0, L).

    Parameters
    ----------
    lam : complex
        Spectral parameter.
    L : float
        Interval length, must be positive.
    normalized : bool
        If True return Delta divided by the Vandermonde product of the roots,
        which is independent of root ordering and analytic in ``lam``.
    """
    if not L > 0:
        raise ValueError(f"L must be positive, got {L!r}")
    val, ls, deg = char_det_array(np.array(complex(lam)), float(L), normalized)
    return CharDet(
        lam=complex(lam),
        L=float(L),
        scaled=complex(val),
        log_scale=float(ls),
        degenerate=bool(deg),
        normalized=normalized,
    )


def char_function(lam, L: float):
    """Scaled normalised determinant (entire in lam); shorthand used by the
    root finders.  Returns ``(scaled, log_scale)``."""
    val, ls, _ = char_det_array(lam, L, normalized=True)
    return val, ls
