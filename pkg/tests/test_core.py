from __future__ import annotations

import numpy as np
import pytest

from wfx.core import GridFunction, MeasureSpace, SpaceError, Weight, integrate


def test_default_mass_is_cell_volume():
    sp = MeasureSpace((4, 8), 0.25)
    assert sp.dim == 2 and sp.shape == (4, 8) and sp.size == 32
    assert np.allclose(sp.mu, 0.0625)
    assert sp.is_lebesgue
    assert sp.total_mass == pytest.approx(2.0)


@pytest.mark.parametrize("n", [(3,), (6,), (4, 5)])
def test_rejects_non_power_of_two(n):
    with pytest.raises(SpaceError):
        MeasureSpace(n, 1.0)


def test_rejects_bad_masses():
    with pytest.raises(SpaceError):
        MeasureSpace((4,), 1.0, [1, -1, 1, 1])
    with pytest.raises(SpaceError):
        MeasureSpace((4,), 1.0, [0, 0, 0, 0])
    with pytest.raises(SpaceError):
        MeasureSpace((4,), 0.0)


def test_zero_mass_cells_allowed():
    sp = MeasureSpace((4,), 1.0, [1, 0, 2, 0])
    assert sp.total_mass == 3.0 and not sp.is_lebesgue


def test_roundtrip_dict():
    sp = MeasureSpace((8,), 0.5, np.arange(1, 9, dtype=float))
    assert MeasureSpace.from_dict(sp.to_dict()).same_as(sp)
    leb = MeasureSpace((2, 4), 1.0)
    assert leb.to_dict()["mu"] == "lebesgue"
    assert MeasureSpace.from_dict(leb.to_dict()).same_as(leb)
    with pytest.raises(SpaceError):
        MeasureSpace.from_dict({"dim": 2, "n": [4]})


def test_grid_function_checks():
    sp = MeasureSpace((4,), 1.0)
    with pytest.raises(SpaceError):
        GridFunction([1, 2, 3], sp)
    with pytest.raises(SpaceError):
        GridFunction([1, np.nan, 3, 4], sp)
    with pytest.raises(SpaceError):
        Weight([1, 0, 1, 1], sp)
    f = GridFunction([1 + 1j, 2, 3, 4], sp)
    assert f.to_dict() == {"values": [1, 2, 3, 4], "imag": [1, 0, 0, 0]}


def test_integrate():
    sp = MeasureSpace((4,), 1.0, [1, 0, 2, 1])
    assert integrate([1, 5, 1, 1], sp) == pytest.approx(4.0)
