"""Banded LU for shifted operators sigma*I - scale*A_h (LAPACK gbtrf/gbtrs)."""

from __future__ import annotations

import numpy as np
from scipy.linalg import get_lapack_funcs
from scipy.sparse.linalg import norm as sp_norm

from ..errors import SingularShiftError
from .operator import OperatorMatrix


class BandedLU:
    """Factorization of sigma*I - scale*A_h, reusable for many right-hand sides.

    The factors are never modified after construction, so one instance can be
    shared between threads doing repeated solves.
    """

    def __init__(self, op: OperatorMatrix, sigma=1.0, scale=1.0):
        self.op = op
        self.sigma = sigma
        self.scale = scale
        ab = op.banded(sigma, scale)
        self.dtype = ab.dtype
        kl, ku = op.lower, op.upper
        gbtrf, gbtrs = get_lapack_funcs(("gbtrf", "gbtrs"), (ab,))
        lu, piv, info = gbtrf(ab, kl, ku)
        if info > 0:
            raise SingularShiftError(sigma, f"zero pivot in column {info}")
        if info < 0:
            raise ValueError(f"illegal argument {-info} to gbtrf")
        self._lu, self._piv, self._gbtrs = lu, piv, gbtrs
        self._kl, self._ku = kl, ku

    def solve(self, rhs, trans: str = "N") -> np.ndarray:
        """Solve (sigma I - scale A_h) x = rhs; ``trans='C'`` uses the adjoint."""
        rhs = np.asarray(rhs)
        b = np.array(rhs, dtype=np.result_type(rhs, self.dtype), copy=True)
        if b.dtype != self.dtype:
            # complex rhs against a real factorization: solve parts separately
            return self.solve(b.real, trans) + 1j * self.solve(b.imag, trans)
        code = {"N": 0, "T": 1, "C": 2}[trans]
        x, info = self._gbtrs(self._lu, self._kl, self._ku, b, self._piv, trans=code)
        if info != 0:
            raise SingularShiftError(self.sigma, f"gbtrs info={info}")
        return x

    def matvec(self, x) -> np.ndarray:
        return self.sigma * x - self.scale * self.op.apply(x)


def banded_solve(op: OperatorMatrix, sigma, rhs, check: bool = True) -> np.ndarray:
    """Solve (sigma I - A_h) x = rhs by banded LU.

    Raises SingularShiftError naming ``sigma`` on a zero pivot or when the
    normwise backward error ||Mx - b|| / (||M|| ||x|| + ||b||) exceeds 1e-10.
    """
    lu = BandedLU(op, sigma, 1.0)
    x = lu.solve(rhs)
    if check:
        rhs = np.asarray(rhs)
        nb = np.linalg.norm(rhs)
        if nb > 0:
            nm = abs(sigma) + sp_norm(op.matrix, 1)
            res = np.linalg.norm(lu.matvec(x) - rhs) / (nm * np.linalg.norm(x) + nb)
            if not res <= 1e-10:
                raise SingularShiftError(sigma, f"relative residual {res:.2e}")
    return x
