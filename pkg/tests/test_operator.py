from __future__ import annotations

import numpy as np
import pytest

from kdvlab.discretization.banded import BandedLU, banded_solve
from kdvlab.discretization.grid import MIN_NODES, BcVariant, Grid
from kdvlab.discretization.operator import build_operator
from kdvlab.discretization.stencils import fd_weights
from kdvlab.errors import ConfigurationError, SingularShiftError
from kdvlab.spectral.eigen import find_eigenvalues
from kdvlab.spectral.resolvent import resolvent_apply


def test_grid_layout():
    g = Grid(2.0, 31)
    assert g.n_nodes == 33
    assert g.dx == pytest.approx(2.0 / 32)
    assert g.nodes[0] == 0 and g.nodes[-1] == 2.0
    assert list(g.boundary) == [0, 31, 32]
    assert list(g.evolving) == list(range(1, 31))


@pytest.mark.parametrize("N", [4, MIN_NODES - 1])
def test_grid_rejects_small_n(N):
    with pytest.raises(ConfigurationError, match="N"):
        Grid(1.0, N)


def test_bc_variant_parse():
    assert BcVariant.parse("cg") is BcVariant.CG
    assert BcVariant.parse("dirichlet") is BcVariant.DIRICHLET
    with pytest.raises(ConfigurationError):
        BcVariant.parse("neumann")


def test_fd_weights_reproduce_monomials():
    xs = np.array([0.0, 0.1, 0.25, 0.4, 0.7])
    for m in range(4):
        w = fd_weights(0.3, xs, m)
        for p in range(len(xs)):
            exact = 0.0 if p < m else np.prod(np.arange(p, p - m, -1)) * 0.3 ** (p - m)
            assert w @ xs**p == pytest.approx(exact, abs=1e-9)


@pytest.mark.parametrize("bc", list(BcVariant))
def test_third_difference_exact_on_cubics(bc):
    grid = Grid(1.0, 64)
    op = build_operator(grid, bc)
    x, L = grid.nodes, grid.L
    p = x**3 - 3 * L * x**2
    D1p = op.d1_full @ p
    D3p = -(op.full @ p) - D1p
    assert np.max(np.abs(D3p - 6.0)) <= 1e-10 * grid.dx**-3
    # the reduced operator with discrete boundary data reproduces the full stencil
    h = op.constraints @ p
    np.testing.assert_allclose(op.apply(p[1 : grid.N], h), op.full @ p, rtol=0, atol=1e-6)
    np.testing.assert_allclose(op.reconstruct(p[1 : grid.N], h), p, rtol=0, atol=1e-12)


def test_first_difference_exact_on_quadratics():
    grid = Grid(1.0, 64)
    op = build_operator(grid)
    x = grid.nodes
    q = 2 * x**2 - x + 3
    np.testing.assert_allclose(op.d1_full @ q, (4 * x - 1)[1 : grid.N], rtol=0, atol=1e-10)


def test_interior_residual_against_continuous_operator_on_quadratic():
    grid = Grid(1.0, 64)
    op = build_operator(grid)
    x = grid.nodes
    p = x**2 - 2 * x
    h = op.constraints @ p
    target = -(2 * x - 2)[1 : grid.N]
    assert np.max(np.abs(op.apply(p[1 : grid.N], h) - target)) <= 1e-10 * grid.dx**-3


def test_boundary_rows_impose_conditions():
    grid = Grid(1.0, 200)
    op = build_operator(grid)
    u = np.sin(np.pi * grid.nodes[1 : grid.N])
    h = np.array([0.3, -0.2, 0.5])
    full = op.reconstruct(u, h)
    np.testing.assert_allclose(op.constraints @ full, h, atol=1e-9)
    opd = build_operator(grid, BcVariant.DIRICHLET)
    full = opd.reconstruct(u, h)
    assert full[0] == pytest.approx(0.3) and full[-1] == pytest.approx(-0.2)


def test_dense_eigenvalues_match_continuous_spectrum():
    grid = Grid(1.0, 256)
    ev = np.linalg.eigvals(build_operator(grid).dense())
    for rec in find_eigenvalues(1.0, 5):
        nearest = ev[np.argmin(np.abs(ev - rec.lam))]
        assert abs(nearest - rec.lam) / abs(rec.lam) <= 0.02, rec.index


def test_dense_eigenvalues_converge_under_refinement():
    lam5 = find_eigenvalues(1.0, 5)[4].lam
    errs = []
    for N in (256, 512, 1024):
        ev = np.linalg.eigvals(build_operator(Grid(1.0, N)).dense())
        errs.append(np.min(np.abs(ev - lam5)) / abs(lam5))
    assert errs[0] > errs[1] > errs[2]
    assert errs[-1] <= 0.002


def test_discrete_spectrum_in_left_half_plane():
    ev = np.linalg.eigvals(build_operator(Grid(1.0, 128)).dense())
    assert ev.real.max() < 0


def test_banded_zero_rhs():
    op = build_operator(Grid(1.0, 64))
    assert np.all(banded_solve(op, 2.0, np.zeros(op.size)) == 0)


def test_banded_large_shift():
    grid = Grid(1.0, 128)
    op = build_operator(grid)
    x = grid.nodes[1 : grid.N]
    rhs = x**3 * (1 - x) ** 3  # satisfies g(0)=g'(L)=g''(L)=0
    x_sol = banded_solve(op, 1e6, rhs)
    assert np.linalg.norm(x_sol - rhs / 1e6) <= 1e-3 * np.linalg.norm(rhs / 1e6)


def test_banded_matches_dense_solve(rng):
    op = build_operator(Grid(1.0, 64))
    rhs = rng.normal(size=op.size)
    for sigma in (1.0, 3 - 7j):
        x = banded_solve(op, sigma, rhs)
        ref = np.linalg.solve(sigma * np.eye(op.size) - op.dense(), rhs)
        np.testing.assert_allclose(x, ref, rtol=1e-9, atol=1e-12 * np.max(np.abs(ref)))


def test_banded_matches_resolvent_apply():
    grid = Grid(1.0, 512)
    op = build_operator(grid)
    f = np.sin(np.pi * grid.nodes)
    u = banded_solve(op, 1 + 1j, f[1 : grid.N])
    w = resolvent_apply(f, 1 + 1j, 1.0)[1 : grid.N]
    assert np.linalg.norm(u - w) <= 1e-3 * np.linalg.norm(w)


def test_banded_lu_reuse_and_adjoint(rng):
    op = build_operator(Grid(1.0, 64))
    lu = BandedLU(op, 2 + 1j, 0.5)
    M = (2 + 1j) * np.eye(op.size) - 0.5 * op.dense()
    b = rng.normal(size=op.size)
    np.testing.assert_allclose(M @ lu.solve(b), b, atol=1e-9)
    np.testing.assert_allclose(M.conj().T @ lu.solve(b, trans="C"), b, atol=1e-9)


def test_singular_shift_raises():
    op = build_operator(Grid(1.0, 32))
    with pytest.raises(SingularShiftError, match="pivot"):
        BandedLU(op, 0.0, 0.0)
