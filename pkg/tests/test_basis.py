from __future__ import annotations

import numpy as np
import pytest

from wfx import oracle
from wfx.basis import BasisCapError, custom_basis, enumerate_basis
from wfx.core import MeasureSpace

from conftest import SMALL_SHAPES


def _box_set(B):
    out = set()
    for i in range(sum(len(s) for s in B.sums(np.ones(B.space.shape)))):
        lo, hi = B.box(i)
        out.add((tuple(int(a) for a in lo), tuple(int(b) for b in hi)))
    return out


@pytest.mark.parametrize("shape", SMALL_SHAPES)
@pytest.mark.parametrize("kind", ["dyadic", "cubes", "rectangles", "intervals"])
def test_elements_match_enumeration(shape, kind):
    sp = MeasureSpace(shape, 1.0)
    if kind == "intervals" and len(shape) == 2:
        with pytest.raises(ValueError):
            enumerate_basis(sp, kind)
        return
    B = enumerate_basis(sp, kind)
    assert _box_set(B) == set(oracle.boxes(sp, kind))


def test_interval_count():
    B = enumerate_basis(MeasureSpace((16,), 1.0), "intervals")
    assert len(_box_set(B)) == 16 * 17 // 2


def test_rectangle_cap():
    with pytest.raises(BasisCapError):
        enumerate_basis(MeasureSpace((256, 256), 1.0), "rectangles")


def test_custom_basis():
    sp = MeasureSpace((8,), 1.0)
    B = custom_basis(sp, [((0,), (8,))])
    assert _box_set(B) == {((0,), (8,))}
    with pytest.raises(ValueError):
        custom_basis(sp, [((3,), (2,))])
    with pytest.raises(ValueError):
        custom_basis(sp, [])
