from __future__ import annotations

import numpy as np
import pytest

from kdvlab.analysis.dissipativity import dissipation_defect, dissipativity_study, random_compatible
from kdvlab.discretization.grid import Grid


def test_compatible_polynomial_satisfies_domain(rng):
    g = random_compatible(rng, 1.0)
    assert abs(g(0.0, 0)) < 1e-12
    assert abs(g(1.0, 1)) < 1e-12
    assert abs(g(1.0, 2)) < 1e-12


def test_corrected_identity_converges_second_order():
    st = dissipativity_study(1.0, (64, 128, 256, 512), 20, np.random.default_rng(5), corrected=True)
    assert st.min_order >= 1.8


def test_literal_defect_tends_to_boundary_term():
    rng = np.random.default_rng(5)
    g = random_compatible(rng, 1.0)
    lit = dissipation_defect(g, Grid(1.0, 512), corrected=False)
    assert lit == pytest.approx(-0.5 * g(1.0, 0) ** 2, rel=1e-3, abs=1e-6)
