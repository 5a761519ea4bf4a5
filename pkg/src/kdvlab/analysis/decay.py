"""Exponential decay fits of norm series."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import DecayFitError

FIT_FLOOR = 1e-12
MIN_POINTS = 10


@dataclass(frozen=True)
class DecayFit:
    rate: float  # -slope of log(norm); negative means growth
    amplitude: float
    r_squared: float
    window: tuple[float, float]
    floor: float
    n_points: int


def _as_series(series, norms=None) -> tuple[np.ndarray, np.ndarray]:
    if norms is not None:
        return np.asarray(series, dtype=float).ravel(), np.asarray(norms, dtype=float).ravel()
    if hasattr(series, "times") and hasattr(series, "l2_series"):
        return np.asarray(series.times, dtype=float), np.asarray(series.l2_series, dtype=float)
    arr = np.asarray(series, dtype=float)
    if arr.ndim == 2 and arr.shape[1] == 2:
        return arr[:, 0], arr[:, 1]
    if arr.ndim == 2 and arr.shape[0] == 2:
        return arr[0], arr[1]
    raise DecayFitError(f"cannot read a (t, norm) series from an array of shape {arr.shape}")


def fit_decay(series, norms=None, window: Optional[tuple[float, float]] = None,
              floor: float = FIT_FLOOR) -> DecayFit:
    """Fit norm(t) ~ C exp(-rate t) by least squares on log(norm).

    Parameters
    ----------
    series : array of (t, norm) pairs, a Trajectory, or the times when
        ``norms`` is given separately.
    window : (t_start, t_end), optional
        Closed time window; the whole series when omitted.
    floor : float
        Samples at or below this value are dropped as rounding-dominated.

    Returns
    -------
    DecayFit

    Examples
    --------
    >>> t = np.linspace(0, 5, 50)
    >>> round(fit_decay(t, 3 * np.exp(-2 * t)).rate, 12)
    2.0
    """
    t, y = _as_series(series, norms)
    if t.shape != y.shape:
        raise DecayFitError("times and norms differ in length")
    if window is None:
        window = (float(t.min()), float(t.max())) if t.size else (0.0, 0.0)
    lo, hi = float(window[0]), float(window[1])
    if t.size and (lo < t.min() - 1e-12 or hi > t.max() + 1e-12):
        raise DecayFitError(f"window [{lo:g}, {hi:g}] leaves the series span [{t.min():g}, {t.max():g}]")
    sel = (t >= lo) & (t <= hi) & np.isfinite(y) & (y > floor)
    n = int(sel.sum())
    if n == 0:
        raise DecayFitError("no samples above the fit floor in the window")
    if n < MIN_POINTS:
        raise DecayFitError(f"only {n} samples above the fit floor; need {MIN_POINTS}")
    ts, ly = t[sel], np.log(y[sel])
    slope, icpt = np.polyfit(ts, ly, 1)
    resid = ly - (slope * ts + icpt)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    ss_res = float(np.sum(resid**2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return DecayFit(float(-slope), float(np.exp(icpt)), float(min(max(r2, 0.0), 1.0)), (lo, hi), floor, n)
