"""Finite-difference matrix for A = -d^3/dx^3 - d/dx with boundary closures.

The unknowns are the nodal values at x_1..x_{N-1}.  The three remaining
nodes x_0, x_N, x_{N+1} are determined by the boundary rows (one-sided
second-order differences), which are eliminated exactly.  The result is the
affine map u -> A_h u + lifting @ (h1, h2, h3) on the unknowns.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ..errors import ConfigurationError
from .grid import BcVariant, Grid
from .stencils import fd_weights

MIN_STENCIL_N = 8


def _interior_rows(grid: Grid):
    """Rows of D3 and D1 at nodes 1..N-1, acting on all N+2 nodal values."""
    n, dx = grid.n_nodes, grid.dx
    offs3 = np.arange(-2, 3)
    w3c = fd_weights(0.0, offs3 * dx, 3)
    w1c = fd_weights(0.0, np.array([-1, 0, 1]) * dx, 1)
    rows3, cols3, vals3 = [], [], []
    rows1, cols1, vals1 = [], [], []
    for r, i in enumerate(range(1, grid.N)):
        if i == 1:
            idx = np.arange(0, 5)
            w = fd_weights(i * dx, idx * dx, 3)
        elif i + 2 > n - 1:
            idx = np.arange(i - 3, i + 2)
            w = fd_weights(i * dx, idx * dx, 3)
        else:
            idx, w = i + offs3, w3c
        rows3.extend([r] * idx.size)
        cols3.extend(idx)
        vals3.extend(w)
        rows1.extend([r] * 3)
        cols1.extend([i - 1, i, i + 1])
        vals1.extend(w1c)
    shape = (grid.N - 1, n)
    D3 = sp.csr_matrix((vals3, (rows3, cols3)), shape=shape)
    D1 = sp.csr_matrix((vals1, (rows1, cols1)), shape=shape)
    return D3, D1


def boundary_rows(grid: Grid, bc: BcVariant) -> np.ndarray:
    """3 x (N+2) matrix C with C @ u_full = (h1, h2, h3)."""
    n, dx, L = grid.n_nodes, grid.dx, grid.L
    C = np.zeros((3, n))
    C[0, 0] = 1.0
    i3 = np.arange(n - 3, n)
    i4 = np.arange(n - 4, n)
    if bc is BcVariant.CG:
        C[1, i3] = fd_weights(L, i3 * dx, 1)
        C[2, i4] = fd_weights(L, i4 * dx, 2)
    else:
        C[1, n - 1] = 1.0
        C[2, i3] = fd_weights(L, i3 * dx, 1)
    return C


@dataclass(frozen=True)
class OperatorMatrix:
    grid: Grid
    bc: BcVariant
    matrix: sp.csr_matrix  # reduced A_h on the unknowns
    lifting: np.ndarray  # (N-1, 3)
    full: sp.csr_matrix  # -D3 - D1 on all nodes, rows 1..N-1
    d1_full: sp.csr_matrix  # centered first difference, rows 1..N-1
    constraints: np.ndarray  # (3, N+2)
    elim: np.ndarray  # (3, N-1): boundary nodes = Q h - elim u
    elim_h: np.ndarray  # (3, 3) = Q
    lower: int
    upper: int

    @property
    def size(self) -> int:
        return self.grid.N - 1

    def apply(self, u, h=None) -> np.ndarray:
        out = self.matrix @ u
        if h is not None:
            out = out + self.lifting @ np.asarray(h)
        return out

    def reconstruct(self, u, h=None) -> np.ndarray:
        """Full nodal vector (length N+2) from the unknowns and boundary data."""
        u = np.asarray(u)
        full = np.empty(self.grid.n_nodes, dtype=np.result_type(u, float))
        full[1 : self.grid.N] = u
        ub = -(self.elim @ u)
        if h is not None:
            ub = ub + self.elim_h @ np.asarray(h)
        full[self.grid.boundary] = ub
        return full

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def banded(self, sigma=1.0, scale=1.0) -> np.ndarray:
        """LAPACK gbtrf storage of sigma*I - scale*A_h (with kl extra rows)."""
        n, kl, ku = self.size, self.lower, self.upper
        dtype = np.result_type(sigma, scale, float)
        ab = np.zeros((2 * kl + ku + 1, n), dtype=dtype)
        M = (-scale * self.matrix).tocoo()
        ab[kl + ku + M.row - M.col, M.col] = M.data
        ab[kl + ku, :] += sigma
        return ab


def build_operator(grid: Grid, bc=BcVariant.CG) -> OperatorMatrix:
    """Assemble A_h, its boundary elimination and the lifting vectors.

    Parameters
    ----------
    grid : Grid
        Uniform grid with N interior nodes.
    bc : BcVariant or str
        ``CG`` or ``Dirichlet``; see BcVariant for the rows each imposes.

    Returns
    -------
    OperatorMatrix
        ``apply(u, h)`` evaluates A_h u + lifting @ h on the unknowns.
    """
    bc = BcVariant.parse(bc)
    if grid.N < MIN_STENCIL_N:
        raise ConfigurationError(f"N={grid.N} is below the stencil minimum {MIN_STENCIL_N}")
    D3, D1 = _interior_rows(grid)
    A = (-D3 - D1).tocsc()
    C = boundary_rows(grid, bc)
    B, E = grid.boundary, grid.evolving
    Q = np.linalg.inv(C[:, B])
    P = Q @ C[:, E]
    A_B = A[:, B]
    reduced = (A[:, E] - A_B @ sp.csr_matrix(P)).tocsr()
    reduced.eliminate_zeros()
    lifting = A_B.toarray() @ Q
    coo = reduced.tocoo()
    diff = coo.row - coo.col
    return OperatorMatrix(
        grid=grid,
        bc=bc,
        matrix=reduced,
        lifting=lifting,
        full=A.tocsr(),
        d1_full=D1,
        constraints=C,
        elim=P,
        elim_h=Q,
        lower=int(max(diff.max(), 0)),
        upper=int(max(-diff.min(), 0)),
    )
