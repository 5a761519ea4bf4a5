from __future__ import annotations

import numpy as np
import pytest

from kdvlab.discretization.grid import BcVariant, Grid
from kdvlab.discretization.operator import build_operator
from kdvlab.evolution.manufactured import exact_solution, manufactured_boundary, manufactured_forcing, mms_study


@pytest.mark.parametrize("bc", list(BcVariant))
def test_exact_solution_satisfies_boundary_data(bc):
    grid = Grid(1.0, 400)
    op = build_operator(grid, bc)
    h = manufactured_boundary(1.0, bc)
    for t in (0.0, 0.3, 1.0):
        u = exact_solution(grid.nodes, t, 1.0)
        np.testing.assert_allclose(op.constraints @ u, h.at(t), atol=1e-3)


@pytest.mark.parametrize("nonlinear", [False, True])
def test_forcing_is_the_residual_of_the_exact_solution(nonlinear):
    L, t = 1.0, 0.4
    x = np.linspace(0.1, 0.9, 9)
    e = 1e-3
    u = lambda xx, tt: exact_solution(xx, tt, L)  # noqa: E731
    ut = (u(x, t + e) - u(x, t - e)) / (2 * e)
    ux = (u(x + e, t) - u(x - e, t)) / (2 * e)
    uxxx = (u(x + 2 * e, t) - 2 * u(x + e, t) + 2 * u(x - e, t) - u(x - 2 * e, t)) / (2 * e**3)
    lhs = ut + ux + uxxx + (u(x, t) * ux if nonlinear else 0)
    np.testing.assert_allclose(manufactured_forcing(L, nonlinear)(x, t), lhs, atol=1e-4)


@pytest.mark.parametrize("flow", ["linear", "nonlinear"])
@pytest.mark.parametrize("bc", list(BcVariant))
def test_mms_second_order(flow, bc):
    res = mms_study(flow, bc)
    assert res.min_order >= 1.8
    assert np.all(np.diff(res.errors) < 0)
