"""Worst-case recursion y_{n+1} = A y_n + F(y_n) with ||A|| <= gamma and
||F(y)|| <= beta ||y||^2 + b_n, compared against closed-form bounds.

Indexing: entry n of every sequence refers to y_{n+1}, n = 0..n_max-1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from ..errors import ConfigurationError

VARIANTS = ("uniform_b", "geometric_b")
OVERFLOW = 1e300


@dataclass(frozen=True)
class IterationConfig:
    """gamma, beta, y0 and the forcing sequence b_n.

    ``uniform_b``: b is a scalar (b_n = b) or a sequence of length >= n_max.
    ``geometric_b``: b_0 = b0 (defaults to c) and b_{n+1} = delta^n c.
    """

    gamma: float
    beta: float
    y0: float
    b: Union[float, Sequence[float]] = 0.0
    variant: str = "uniform_b"
    delta: Optional[float] = None
    c: Optional[float] = None
    b0: Optional[float] = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ConfigurationError(f"unknown iteration variant {self.variant!r}; expected one of {VARIANTS}")
        if self.gamma < 0 or self.beta < 0 or self.y0 < 0:
            raise ConfigurationError("gamma, beta and y0 must be nonnegative")
        if self.variant == "geometric_b":
            if self.delta is None or self.c is None or self.delta < 0 or self.c < 0:
                raise ConfigurationError("geometric_b needs nonnegative delta and c")
            if self.b0 is not None and self.b0 < 0:
                raise ConfigurationError("b0 must be nonnegative")
        elif np.any(np.asarray(self.b, dtype=float) < 0):
            raise ConfigurationError("b_n must be nonnegative")

    def sequence(self, n_max: int) -> np.ndarray:
        """b_0..b_{n_max-1}."""
        if self.variant == "geometric_b":
            b = np.empty(n_max)
            b[0] = self.c if self.b0 is None else self.b0
            b[1:] = self.delta ** np.arange(n_max - 1) * self.c
            return b
        arr = np.asarray(self.b, dtype=float)
        if arr.ndim == 0:
            return np.full(n_max, float(arr))
        if arr.size < n_max:
            raise ConfigurationError(f"b has {arr.size} terms but n_max={n_max}")
        return arr[:n_max].copy()


@dataclass(frozen=True)
class IterationTrace:
    worst_case: np.ndarray  # B_{n+1}
    bound_i: np.ndarray  # gamma^{n+1} y0 + b*/(1-gamma)
    bound_ii: Optional[np.ndarray]  # gamma^{n+1} y0 + n r^n c*  (geometric_b only)
    hypothesis_ok: bool  # the stated bounds are guaranteed (see literal_hypothesis)
    bound_i_effective: Optional[np.ndarray]  # nu^{n+1} y0 + b*/(1-nu), nu = gamma + beta M
    bound_ii_corrected: Optional[np.ndarray]  # nu^{n+1} y0 + nu^n b_0 + n rho^{n-1} c*
    effective_ok: bool  # the invariant level M exists and nu < 1
    nu: Optional[float]
    level: Optional[float]  # M

    def holds(self, which: str = "i") -> bool:
        ref = {"i": self.bound_i, "ii": self.bound_ii, "i_eff": self.bound_i_effective,
               "ii_corr": self.bound_ii_corrected}[which]
        if ref is None:
            return False
        tol = 1e-12 * np.maximum(1.0, np.abs(ref))
        return bool(np.all(self.worst_case <= ref + tol))


def worst_case_sequence(gamma: float, beta: float, y0: float, b: np.ndarray) -> np.ndarray:
    """B_{n+1} = gamma B_n + beta B_n^2 + b_n from B_0 = y0 (inf once it overflows)."""
    out = np.empty(b.size)
    B = float(y0)
    for n in range(b.size):
        if B < OVERFLOW:
            with np.errstate(over="ignore"):
                B = float(np.float64(gamma) * B + np.float64(beta) * B * B + b[n])
        out[n] = B if B < OVERFLOW else np.inf
    return out


def invariant_level(gamma: float, beta: float, y0: float, b_star: float) -> Optional[float]:
    """Smallest M >= y0 with y0 + b*/(1 - gamma - beta M) <= M, None if none exists."""
    if beta == 0:
        return y0 + b_star / (1 - gamma) if gamma < 1 else None
    p = 1 - gamma + beta * y0
    disc = p * p - 4 * beta * (y0 * (1 - gamma) + b_star)
    if disc < 0:
        return None
    M = (p - np.sqrt(disc)) / (2 * beta)
    if gamma + beta * M >= 1:
        return None
    return float(M)


def literal_hypothesis(cfg: IterationConfig) -> bool:
    """Where the stated bounds are guaranteed for the worst-case recursion.

    (i) needs 0 < gamma < 1 and either beta = 0 or no forcing and y0 = 0.
    (ii) as stated is short by one power of r, so it is guaranteed only
    when the forcing vanishes identically.
    """
    if not 0 < cfg.gamma < 1:
        return False
    if cfg.variant == "geometric_b":
        b0 = cfg.c if cfg.b0 is None else cfg.b0
        return cfg.c == 0 and b0 == 0 and (cfg.beta == 0 or cfg.y0 == 0)
    b = np.asarray(cfg.b, dtype=float)
    return cfg.beta == 0 or (cfg.y0 == 0 and np.all(b == 0))


def iteration_check(config: IterationConfig, n_max: int) -> IterationTrace:
    """Worst-case sequence and the bounds (i), (ii) plus their corrected forms.

    Parameters
    ----------
    config : IterationConfig
    n_max : int
        Number of computed terms, at least 1.

    Returns
    -------
    IterationTrace
        ``hypothesis_ok`` flags the region where the stated bounds are
        guaranteed; ``effective_ok`` flags whether the corrected bounds,
        which replace gamma by nu = gamma + beta M, apply.
    """
    if n_max < 1:
        raise ConfigurationError("n_max must be at least 1")
    g, beta, y0 = float(config.gamma), float(config.beta), float(config.y0)
    b = config.sequence(n_max)
    wc = worst_case_sequence(g, beta, y0, b)
    n = np.arange(n_max)
    b_star = float(b.max())
    with np.errstate(divide="ignore", invalid="ignore"):
        bound_i = g ** (n + 1) * y0 + (b_star / (1 - g) if g < 1 else np.inf)
    bound_ii = None
    if config.variant == "geometric_b":
        r = max(g, float(config.delta))
        bound_ii = g ** (n + 1) * y0 + n * r**n * config.c

    M = invariant_level(g, beta, y0, b_star) if g < 1 else None
    eff_i = eff_ii = nu = None
    if M is not None:
        nu = g + beta * M
        eff_i = nu ** (n + 1) * y0 + b_star / (1 - nu)
        if config.variant == "geometric_b":
            rho = max(nu, float(config.delta))
            b0 = b[0]
            tail = np.where(n >= 1, n * rho ** np.maximum(n - 1, 0) * config.c, 0.0)
            eff_ii = nu ** (n + 1) * y0 + nu**n * b0 + tail
    return IterationTrace(wc, bound_i, bound_ii, literal_hypothesis(config), eff_i, eff_ii,
                          M is not None, nu, M)
