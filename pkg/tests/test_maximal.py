from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from wfx import oracle
from wfx.basis import enumerate_basis
from wfx.core import MeasureSpace
from wfx.maximal import centered_maximal, dual_maximal, iterate_maximal, maximal, orlicz_maximal
from wfx.young import Power

from conftest import SMALL_SHAPES, random_space


@pytest.mark.parametrize("shape", SMALL_SHAPES)
@pytest.mark.parametrize("kind", ["dyadic", "cubes", "rectangles"])
@pytest.mark.parametrize("zeros", [False, True])
def test_maximal_matches_oracle(rng, shape, kind, zeros):
    sp = random_space(rng, shape, zeros)
    f = rng.normal(size=shape)
    B = enumerate_basis(sp, kind)
    assert np.allclose(maximal(f, B).values, oracle.maximal(f, sp, kind), rtol=1e-12)


def test_dual_and_iterate(rng):
    sp = random_space(rng, (16,))
    B = enumerate_basis(sp, "intervals")
    f, v = rng.random(16), rng.uniform(0.5, 2, 16)
    assert np.allclose(dual_maximal(f, B, v).values, oracle.maximal(f * v, sp, "intervals") / v)
    assert np.allclose(iterate_maximal(f, B, 2).values, maximal(maximal(f, B), B).values)
    assert np.array_equal(iterate_maximal(f, B, 0).values, f)


def test_orlicz_maximal_power1_is_maximal(rng):
    sp = MeasureSpace((16,), 1.0 / 16)
    B = enumerate_basis(sp, "intervals")
    f = rng.random(16) + 0.1
    assert np.allclose(orlicz_maximal(f, B, Power(1.0)).values, maximal(f, B).values, rtol=1e-8)
    assert np.all(orlicz_maximal(f, B, Power(2.0)).values >= maximal(f, B).values * (1 - 1e-9))


def test_centered_below_uncentered(rng):
    sp = MeasureSpace((32,), 1.0)
    f = rng.random(32)
    B = enumerate_basis(sp, "intervals")
    assert np.all(centered_maximal(f, sp).values <= maximal(f, B).values + 1e-12)


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, 16, elements=st.floats(-10, 10)), st.floats(0.1, 10))
def test_properties(f, c):
    sp = MeasureSpace((16,), 1.0)
    B = enumerate_basis(sp, "intervals")
    Mf = maximal(f, B).values
    assert np.all(Mf >= np.abs(f) - 1e-9 * (1 + np.abs(f)))
    assert np.allclose(maximal(c * f, B).values, c * Mf, rtol=1e-9, atol=1e-12)
    assert Mf.max() <= np.abs(f).max() * (1 + 1e-12) + 1e-300


def test_indicator_examples():
    sp = MeasureSpace((8,), 1.0)
    e0 = np.eye(8)[0]
    assert np.allclose(maximal(e0, enumerate_basis(sp, "intervals")).values, 1 / np.arange(1, 9))
    dy = 2.0 ** -np.ceil(np.log2(np.arange(1, 9)))
    assert np.allclose(maximal(e0, enumerate_basis(sp, "dyadic")).values, dy)
    sp4 = MeasureSpace((4,), 1.0)
    B4 = enumerate_basis(sp4, "intervals")
    assert np.allclose(dual_maximal(np.eye(4)[0], B4, np.ones(4)).values, [1, 1 / 2, 1 / 3, 1 / 4])
    assert np.allclose(iterate_maximal(np.eye(4)[0], B4, 2).values,
                       maximal([1, 1 / 2, 1 / 3, 1 / 4], B4).values)


def test_centered_single_atom():
    mu = np.zeros(8)
    mu[3] = 1.0
    sp = MeasureSpace((8,), 1.0, mu)
    M = centered_maximal(np.eye(8)[3], sp).values
    assert M[3] == 1.0 and np.all((M == 1.0) | (M == 0.0))
