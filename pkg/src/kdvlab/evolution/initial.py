"""Named initial-condition families, each scaled to a prescribed L2 norm."""

from __future__ import annotations

import numpy as np

from ..discretization.grid import BcVariant, Grid
from ..discretization.norms import l2_norm
from ..discretization.operator import build_operator
from ..errors import ConfigurationError

FAMILIES = ("eigenmode", "sine", "random_smooth", "random_rough", "bump", "zero")


def _normalize(v: np.ndarray, grid: Grid, amplitude: float) -> np.ndarray:
    n = l2_norm(v, grid.dx)
    if n == 0:
        return v
    return v * (amplitude / n)


def eigenmode(grid: Grid, k: int = 1, bc=BcVariant.CG) -> np.ndarray:
    """Real part of the k-th discrete eigenvector of A_h (ordered by |lambda|)."""
    op = build_operator(grid, bc)
    vals, vecs = np.linalg.eig(op.dense())
    order = np.argsort(np.abs(vals))
    v = vecs[:, order[k - 1]]
    v = v * np.exp(-1j * np.angle(v[np.argmax(np.abs(v))]))
    full = op.reconstruct(v.real)
    return full


def sine(grid: Grid, m: int = 1) -> np.ndarray:
    return np.sin(m * np.pi * grid.nodes / grid.L)


def random_smooth(grid: Grid, rng: np.random.Generator, cutoff: int = 8) -> np.ndarray:
    """Random sine series with amplitudes ~ 1/k^2 up to mode ``cutoff``."""
    k = np.arange(1, cutoff + 1)
    a = rng.standard_normal(cutoff) / k**2
    return np.sin(np.outer(grid.nodes / grid.L, k) * np.pi) @ a


def random_rough(grid: Grid, rng: np.random.Generator) -> np.ndarray:
    """Independent +-1 nodal values (zero at x=0)."""
    v = rng.choice([-1.0, 1.0], size=grid.n_nodes)
    v[0] = 0.0
    return v


def bump(grid: Grid, center: float = 0.5, width: float = 0.3) -> np.ndarray:
    """C-infinity bump supported in (center - width, center + width) * L."""
    z = (grid.nodes / grid.L - center) / width
    out = np.zeros_like(z)
    inside = np.abs(z) < 1
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - z[inside] ** 2))
    return out


def make_initial(family: str, grid: Grid, amplitude: float = 1.0, rng=None, bc=BcVariant.CG, **params) -> np.ndarray:
    """Nodal values of a named family with L2 norm ``amplitude``."""
    if family == "zero":
        return np.zeros(grid.n_nodes)
    if family == "eigenmode":
        v = eigenmode(grid, int(params.get("k", 1)), bc)
    elif family == "sine":
        v = sine(grid, int(params.get("m", 1)))
    elif family == "random_smooth":
        rng = rng if rng is not None else np.random.default_rng(params.get("seed", 0))
        v = random_smooth(grid, rng, int(params.get("cutoff", 8)))
    elif family == "random_rough":
        rng = rng if rng is not None else np.random.default_rng(params.get("seed", 0))
        v = random_rough(grid, rng)
    elif family == "bump":
        v = bump(grid, float(params.get("center", 0.5)), float(params.get("width", 0.3)))
    else:
        raise ConfigurationError(f"unknown initial-condition family {family!r}; expected one of {FAMILIES}")
    return _normalize(v, grid, float(amplitude))
