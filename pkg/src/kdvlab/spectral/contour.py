"""Argument-principle zero counting for the characteristic function."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..errors import ContourError
from .determinant import char_function

_SPLIT = 0.5 + 0.0173205  # off-centre splits keep new edges off symmetry lines


@dataclass(frozen=True)
class Box:
    re_lo: float
    re_hi: float
    im_lo: float
    im_hi: float

    @property
    def center(self) -> complex:
        return complex(0.5 * (self.re_lo + self.re_hi), 0.5 * (self.im_lo + self.im_hi))

    @property
    def diameter(self) -> float:
        return float(np.hypot(self.re_hi - self.re_lo, self.im_hi - self.im_lo))

    def contains(self, z: complex) -> bool:
        return self.re_lo < z.real < self.re_hi and self.im_lo < z.imag < self.im_hi

    def quarters(self) -> list["Box"]:
        rm = self.re_lo + _SPLIT * (self.re_hi - self.re_lo)
        im = self.im_lo + _SPLIT * (self.im_hi - self.im_lo)
        return [
            Box(self.re_lo, rm, self.im_lo, im),
            Box(rm, self.re_hi, self.im_lo, im),
            Box(self.re_lo, rm, im, self.im_hi),
            Box(rm, self.re_hi, im, self.im_hi),
        ]


def _path(box: Box, t: np.ndarray) -> np.ndarray:
    """Counter-clockwise boundary parametrised by t in [0, 4]."""
    a = complex(box.re_lo, box.im_lo)
    b = complex(box.re_hi, box.im_lo)
    c = complex(box.re_hi, box.im_hi)
    d = complex(box.re_lo, box.im_hi)
    corners = np.array([a, b, c, d, a])
    k = np.minimum(np.floor(t).astype(int), 3)
    frac = t - k
    return corners[k] + frac * (corners[k + 1] - corners[k])


def winding_number(
    func: Callable[[np.ndarray], np.ndarray],
    box: Box,
    n_init: int = 64,
    max_step: float = np.pi / 4,
    max_points: int = 400_000,
) -> int:
    """Winding number of ``func`` around the boundary of ``box``.

    ``func`` maps an array of points to (possibly rescaled) function values;
    any positive real rescaling is allowed since only phases are used.  Each
    edge starts with at least ``n_init`` samples and a spacing of at most one
    eighth of the shorter side (so elongated boxes do not alias a full phase
    turn between samples); segments are then bisected until every phase
    increment is below ``max_step``.
    """
    w, hgt = box.re_hi - box.re_lo, box.im_hi - box.im_lo
    spacing = min(w, hgt) / 8.0
    cap = max(n_init, max_points // 8)
    per_edge = [min(cap, max(n_init, int(np.ceil(side / spacing)))) for side in (w, hgt, w, hgt)]
    t = np.concatenate([np.linspace(j, j + 1.0, n, endpoint=False) for j, n in enumerate(per_edge)] + [[4.0]])
    v = func(_path(box, t))
    while True:
        if np.any(v == 0) or not np.all(np.isfinite(v)):
            raise ContourError(f"characteristic function vanishes or overflows on {box}")
        dphi = np.angle(v[1:] / v[:-1])
        bad = np.abs(dphi) > max_step
        if not bad.any():
            break
        if t.size > max_points:
            raise ContourError(f"phase refinement did not settle on {box}")
        mids = 0.5 * (t[:-1][bad] + t[1:][bad])
        vm = func(_path(box, mids))
        t_new = np.concatenate([t, mids])
        v_new = np.concatenate([v, vm])
        order = np.argsort(t_new, kind="stable")
        t, v = t_new[order], v_new[order]
    total = dphi.sum() / (2.0 * np.pi)
    n = int(np.rint(total))
    if abs(total - n) > 1e-6:
        raise ContourError(f"non-integer winding {total:.6f} on {box}")
    return n


def count_zeros(L: float, box: Box, **kw) -> int:
    """Number of eigenvalues of A (zeros of Delta/V) inside ``box``."""
    return winding_number(lambda z: char_function(z, L)[0], box, **kw)


def locate_zero_boxes(L: float, box: Box, min_diameter: float, max_depth: int = 40) -> list[Box]:
    """Subdivide ``box`` until each piece holds one zero and is small."""
    found: list[Box] = []
    stack = [(box, count_zeros(L, box), 0)]
    while stack:
        b, n, depth = stack.pop()
        if n == 0:
            continue
        if (n == 1 and b.diameter <= min_diameter) or depth >= max_depth:
            found.append(b)
            continue
        for q in b.quarters():
            stack.append((q, count_zeros(L, q), depth + 1))
    return found
