from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from wfx import oracle
from wfx.basis import enumerate_basis
from wfx.core import MeasureSpace
from wfx.muckenhoupt import (a1_constant, ainf_constant, ap_constant, apq_constant, bmo_norm, conj,
                             make_power_weight, make_random_a1ish, rh_constant, rhinf_constant)

from conftest import SMALL_SHAPES, random_space


@pytest.mark.parametrize("shape", SMALL_SHAPES)
@pytest.mark.parametrize("kind", ["dyadic", "cubes", "rectangles"])
def test_constants_match_oracle(rng, shape, kind):
    sp = random_space(rng, shape, zeros=True)
    B = enumerate_basis(sp, kind)
    w = np.exp(rng.normal(size=shape))
    b = rng.normal(size=shape)
    for p in (1.5, 2.0, 3.0):
        assert ap_constant(w, B, p).value == pytest.approx(oracle.ap(w, sp, kind, p), rel=1e-10)
    assert a1_constant(w, B).value == pytest.approx(oracle.a1(w, sp, kind), rel=1e-10)
    assert rh_constant(w, B, 2.0).value == pytest.approx(oracle.rh(w, sp, kind, 2.0), rel=1e-10)
    assert apq_constant(w, B, 2.0, 3.0).value == pytest.approx(oracle.apq(w, sp, kind, 2.0, 3.0), rel=1e-10)
    assert bmo_norm(b, B).value == pytest.approx(oracle.bmo(b, sp, kind), rel=1e-10)


def test_constant_weight_spec_example():
    sp = MeasureSpace((16,), 1.0 / 16)
    B = enumerate_basis(sp, "intervals")
    ones = np.ones(16)
    for r in (ap_constant(ones, B, 2.0), a1_constant(ones, B), rh_constant(ones, B, 2.0),
              rhinf_constant(ones, B), apq_constant(ones, B, 2.0, 3.0)):
        assert r.value == pytest.approx(1.0, rel=1e-12)
    A = ainf_constant(ones, B)
    assert A.value == pytest.approx(1.0) and A.p == pytest.approx(64.0)


def test_argmax_box_attains(rng):
    sp = MeasureSpace((16,), 1.0)
    B = enumerate_basis(sp, "intervals")
    w = np.exp(rng.normal(size=16))
    r = ap_constant(w, B, 2.0)
    (lo,), (hi,) = r.argmax_box
    seg = w[lo:hi]
    assert seg.mean() * np.mean(1 / seg) == pytest.approx(r.value, rel=1e-12)


def test_conj():
    assert conj(2.0) == 2.0 and conj(1.0) == np.inf and conj(np.inf) == 1.0
    assert conj(3.0) == pytest.approx(1.5)


def test_power_weights():
    sp = MeasureSpace((256,), 1.0 / 256)
    B = enumerate_basis(sp, "intervals")
    # |x|^a is A_2 iff -1 < a < 1; constants grow as a approaches the ends
    c = [ap_constant(make_power_weight(sp, a), B, 2.0).value for a in (0.2, 0.6, 0.9)]
    assert c[0] < c[1] < c[2]
    # |x|^{-1/2} is A_1
    assert a1_constant(make_power_weight(sp, -0.5, [0.3719]), B).value < 10


def test_random_a1ish_is_a1():
    sp = MeasureSpace((128,), 1.0)
    B = enumerate_basis(sp, "intervals")
    w = make_random_a1ish(sp, 3, B)
    assert a1_constant(w, B).value < 1 / (1 - 0.9) * 4


@settings(max_examples=30, deadline=None)
@given(arrays(np.float64, 16, elements=st.floats(-3, 3)), st.floats(1.2, 5.0))
def test_ap_properties(logw, p):
    sp = MeasureSpace((16,), 1.0)
    B = enumerate_basis(sp, "intervals")
    w = np.exp(logw)
    A = ap_constant(w, B, p).value
    assert A >= 1 - 1e-12
    # dual identity [w]_{A_p} = [w^{1-p'}]_{A_p'}^{p-1}
    D = ap_constant(w ** (1 - conj(p)), B, conj(p)).value ** (p - 1)
    assert A == pytest.approx(D, rel=1e-9)
    # monotone in p
    assert ap_constant(w, B, p + 1).value <= A * (1 + 1e-9)
    assert a1_constant(w, B).value >= A * (1 - 1e-9)
    # scale invariance
    assert ap_constant(3.7 * w, B, p).value == pytest.approx(A, rel=1e-9)
