"""Finite-difference weights on arbitrary node sets."""

from __future__ import annotations

from math import factorial

import numpy as np


def fd_weights(x0: float, xs, m: int) -> np.ndarray:
    """Weights w with sum(w * f(xs)) ~ f^(m)(x0), exact for degree < len(xs).

    Solves the moment (Vandermonde) system; node sets here have at most five
    points so conditioning is not an issue.
    """
    xs = np.asarray(xs, dtype=float)
    n = xs.size
    if m >= n:
        raise ValueError(f"need more than {m} nodes for derivative order {m}")
    h = np.max(np.abs(xs - x0)) or 1.0
    V = np.vander((xs - x0) / h, n, increasing=True).T
    b = np.zeros(n)
    b[m] = factorial(m)
    return np.linalg.solve(V, b) / h**m
