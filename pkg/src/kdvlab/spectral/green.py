"""Green's function of lam*w + w''' + w' = f, w(0)=w'(L)=w''(L)=0.

Two evaluations are provided.  ``green_coefficients`` is the closed-form
Cramer solution: G = sum c_j e^{s_j(y-xi)} + H(y-xi) sum c^_j e^{s_j(y-xi)}.
It is exact but overflows once |Re s_j| L is large.  ``GreenKernel`` writes
the same function as a decaying free-space part plus homogeneous solutions
anchored at the end where they are bounded, so every exponential it forms
has modulus at most one; it is the one used for quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import NearEigenvalueError
from .cubic import DEGENERATE_DISCRIMINANT, discriminant, roots_array
from .determinant import char_det

DEGENERATE_OFFSET = 1e-5
COND_LIMIT = 1e13


def _c_hat(s: np.ndarray) -> np.ndarray:
    """Jump coefficients 1 / p'(s_j), p(s) = s^3 + s + lam."""
    s1, s2, s3 = s
    return np.array(
        [
            1.0 / ((s2 - s1) * (s3 - s1)),
            1.0 / ((s1 - s2) * (s3 - s2)),
            1.0 / ((s1 - s3) * (s2 - s3)),
        ]
    )


@dataclass(frozen=True)
class GreenCoefficients:
    lam: complex
    xi: float
    s: np.ndarray
    c_hat: np.ndarray
    c: np.ndarray
    delta: complex
    delta_j: np.ndarray
    d2: complex
    d3: complex

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        z = y[..., None] - self.xi
        e = np.exp(self.s * z)
        jump = np.where(z[..., 0] > 0, (self.c_hat * e).sum(-1), 0.0)
        return (self.c * e).sum(-1) + jump


def green_coefficients(lam: complex, xi: float, L: float) -> GreenCoefficients:
    """Closed-form coefficients c_j = e^{s_j xi} Delta_j / Delta.

    The boundary rows are G(0)=0, G'(L)=0, G''(L)=0 for the unknowns
    C_j = c_j e^{-s_j xi}; Delta_j replaces column j by (0, d2, d3).
    """
    lam = complex(lam)
    s = roots_array(np.array(lam))
    ch = _c_hat(s)
    eL = np.exp(s * L)
    M = np.array([np.ones(3), s * eL, s**2 * eL])
    d2 = -np.sum(ch * s * np.exp(s * (L - xi)))
    d3 = -np.sum(ch * s**2 * np.exp(s * (L - xi)))
    rhs = np.array([0.0, d2, d3])
    delta = np.linalg.det(M)
    delta_j = np.empty(3, dtype=complex)
    for j in range(3):
        Mj = M.copy()
        Mj[:, j] = rhs
        delta_j[j] = np.linalg.det(Mj)
    c = np.exp(s * xi) * delta_j / delta
    return GreenCoefficients(lam, float(xi), s, ch, c, complex(delta), delta_j, complex(d2), complex(d3))


class GreenKernel:
    """Overflow-free evaluation of G(y, xi; lam) for one lam and length L.

    Parameters
    ----------
    lam : complex
        Spectral parameter, away from the eigenvalues of A.
    L : float
        Interval length.

    Raises
    ------
    NearEigenvalueError
        If the boundary system is numerically singular; carries |Delta(lam)|.
    """

    def __init__(self, lam: complex, L: float):
        lam = complex(lam)
        if not L > 0:
            raise ValueError(f"L must be positive, got {L!r}")
        self.lam, self.L = lam, float(L)
        if abs(complex(discriminant(lam))) < DEGENERATE_DISCRIMINANT:
            # G is analytic in lam here; average the two neighbours
            self._parts = [GreenKernel(lam + DEGENERATE_OFFSET, L), GreenKernel(lam - DEGENERATE_OFFSET, L)]
            return
        self._parts = None
        s = roots_array(np.array(lam))
        self.s = s
        self.c_hat = _c_hat(s)
        self.grow = s.real > 0  # anchored at L, decay to the left
        # homogeneous basis phi_j(y) = exp(s_j (y - anchor_j))
        self.anchor = np.where(self.grow, self.L, 0.0)
        M = np.array(
            [
                self._phi(0.0, 0),
                self._phi(self.L, 1),
                self._phi(self.L, 2),
            ]
        )
        self._row_scale = 1.0 / np.abs(M).max(axis=1)
        Ms = M * self._row_scale[:, None]
        if np.linalg.cond(Ms) > COND_LIMIT:
            raise NearEigenvalueError(lam, abs(char_det(lam, L).value))
        self._Minv = np.linalg.inv(Ms)

    def _phi(self, y, m: int):
        """m-th derivative of the homogeneous basis at positions y."""
        y = np.asarray(y, dtype=float)
        return self.s**m * np.exp(self.s * (y[..., None] - self.anchor))

    def _free(self, z, m: int, at_source_right: bool = False):
        """m-th derivative of the decaying free-space kernel G0(z).

        G0(z) = sum_{Re s<=0} c^ e^{sz} for z > 0 and -sum_{Re s>0} c^ e^{sz}
        for z <= 0.  ``at_source_right`` takes z = 0 from the right.
        """
        z = np.asarray(z, dtype=float)
        right = (z > 0) | (at_source_right & (z == 0))
        zz = z[..., None]
        r = right[..., None]
        coef = self.c_hat * self.s**m
        # zero the exponent of every term not taken so nothing overflows
        e_r = np.exp(self.s * np.where(r & ~self.grow, zz, 0.0)) * ~self.grow
        e_l = np.exp(self.s * np.where(~r & self.grow, zz, 0.0)) * self.grow
        return np.where(right, (coef * e_r).sum(-1), -(coef * e_l).sum(-1))

    def coefficients(self, xi) -> np.ndarray:
        """Homogeneous coefficients a_j(xi), shape xi.shape + (3,)."""
        xi = np.asarray(xi, dtype=float)
        rhs = -np.stack(
            [
                self._free(-xi, 0),
                self._free(self.L - xi, 1, at_source_right=True),
                self._free(self.L - xi, 2, at_source_right=True),
            ],
            axis=-1,
        )
        return (rhs * self._row_scale) @ self._Minv.T

    def __call__(self, y, xi, m: int = 0):
        """G (or its m-th y-derivative) with broadcasting over y and xi."""
        if self._parts is not None:
            return 0.5 * (self._parts[0](y, xi, m) + self._parts[1](y, xi, m))
        y, xi = np.broadcast_arrays(np.asarray(y, dtype=float), np.asarray(xi, dtype=float))
        a = self.coefficients(xi)
        return self._free(y - xi, m) + (a * self._phi(y, m)).sum(-1)

    def matrix(self, y, xi, m: int = 0) -> np.ndarray:
        """Kernel matrix K[i, k] = G^(m)(y_i, xi_k)."""
        y = np.asarray(y, dtype=float)
        xi = np.asarray(xi, dtype=float)
        return self(y[:, None], xi[None, :], m)


def green_eval(y, xi, lam: complex, L: float, m: int = 0):
    """G(y, xi; lam) for y, xi in [0, L], with H(0) = 0 on the diagonal.

    Examples
    --------
    >>> bool(abs(green_eval(0.0, 0.4, 1 + 1j, 1.0)) < 1e-14)
    True
    """
    y = np.asarray(y, dtype=float)
    xi = np.asarray(xi, dtype=float)
    if np.any((y < 0) | (y > L)) or np.any((xi < 0) | (xi > L)):
        raise ValueError("y and xi must lie in [0, L]")
    return GreenKernel(lam, L)(y, xi, m)
