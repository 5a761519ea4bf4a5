from __future__ import annotations

import numpy as np
import pytest

from kdvlab.spectral.contour import Box, count_zeros, winding_number
from kdvlab.spectral.eigen import find_eigenvalues, leading_asymptotic


@pytest.fixture(scope="module")
def records_L1():
    return find_eigenvalues(1.0, 30)


def test_first_eigenvalue_L1(records_L1):
    assert records_L1[0].lam.real == pytest.approx(-6.68021, abs=1e-4)
    assert abs(records_L1[0].lam.imag) < 1e-8


def test_all_eigenvalues_in_left_half_plane(records_L1):
    assert all(r.lam.real < 0 for r in records_L1[:20])
    assert not any(r.suspect for r in records_L1[:20])


def test_records_are_ordered_and_distinct(records_L1):
    mods = [abs(r.lam) for r in records_L1]
    assert mods == sorted(mods)
    assert [r.index for r in records_L1] == list(range(1, 31))
    assert all(r.winding == 1 for r in records_L1)


def test_cubic_law_at_L_pi():
    recs = find_eigenvalues(np.pi, 20)
    dev = np.array([r.relative_deviation for r in recs])
    assert dev[9] <= 0.15
    assert np.all(np.diff(dev[9:]) < 0)
    ratio = np.array([r.lam.real for r in recs]) / leading_asymptotic(np.arange(1, 21), np.pi)
    assert abs(ratio[-1] - 1.0) < abs(ratio[9] - 1.0)


def test_contour_count_matches_records(records_L1):
    box = Box(-1e6, -1e-3, -1e3, 1e3)
    inside = sum(box.contains(r.lam) for r in records_L1)
    assert inside < len(records_L1)  # found beyond the box, so the box is exhausted
    assert count_zeros(1.0, box) == inside


def test_winding_number_of_known_polynomial():
    box = Box(-1.0, 1.0, -1.0, 1.0)
    assert winding_number(lambda z: (z - 0.3) * (z + 0.2j) * (z - 5), box) == 2
