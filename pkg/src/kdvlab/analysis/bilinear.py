"""Empirical constant of the bilinear estimate ||(uv)_x||_{L1 L2} <= C ||u||_Y ||v||_Y."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import trapezoid

from ..errors import ConfigurationError, ZeroDenominatorError


def _window(traj, T: float):
    st = traj.state_times
    if st[-1] - st[0] < T - 1e-12:
        raise ConfigurationError(f"trajectory span {st[-1] - st[0]:g} shorter than T={T:g}")
    sel = st <= st[0] + T + 1e-12
    if sel.sum() < 2:
        raise ConfigurationError("need at least two stored states inside the window")
    return st[sel], traj.states[sel]


def _y_norm(t: np.ndarray, U: np.ndarray, dx: float) -> float:
    l2 = np.sqrt(trapezoid(U**2, dx=dx, axis=1))
    ux = np.gradient(U, dx, axis=1, edge_order=2)
    h1sq = l2**2 + trapezoid(ux**2, dx=dx, axis=1)
    return float(l2.max() + np.sqrt(trapezoid(h1sq, t)))


def bilinear_ratio(u, v, T: float) -> float:
    """||(uv)_x||_{L1(0,T;L2)} / (||u||_Y ||v||_Y) from the stored states.

    Y is sup_t ||.|| plus the L2-in-time H1 norm.  The ratio is 0 when
    exactly one of u, v vanishes; both vanishing raises
    ZeroDenominatorError.
    """
    if u.grid != v.grid:
        raise ConfigurationError("u and v live on different grids")
    tu, U = _window(u, T)
    tv, V = _window(v, T)
    if tu.shape != tv.shape or np.max(np.abs(tu - tv)) > 1e-12:
        raise ConfigurationError("u and v are stored at different times")
    dx = u.grid.dx
    yu, yv = _y_norm(tu, U, dx), _y_norm(tv, V, dx)
    if yu == 0 and yv == 0:
        raise ZeroDenominatorError("both trajectories vanish identically")
    if yu == 0 or yv == 0:
        return 0.0
    w = np.gradient(U * V, dx, axis=1, edge_order=2)
    num = trapezoid(np.sqrt(trapezoid(w**2, dx=dx, axis=1)), tu)
    return float(num / (yu * yv))


@dataclass
class BilinearCorpus:
    """Running maximum of the ratio over a corpus of trajectory pairs."""

    T: float
    ratios: list = field(default_factory=list)

    def add(self, u, v) -> float:
        r = bilinear_ratio(u, v, self.T)
        self.ratios.append(r)
        return r

    @property
    def constant(self) -> float:
        return max(self.ratios) if self.ratios else 0.0


def bilinear_measure(u, v, T: float, corpus: BilinearCorpus | None = None) -> float:
    """Measured ratio for one pair; also folded into ``corpus`` when given."""
    if corpus is not None:
        if abs(corpus.T - T) > 1e-12:
            raise ConfigurationError("corpus window differs from T")
        return corpus.add(u, v)
    return bilinear_ratio(u, v, T)
