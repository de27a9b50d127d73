from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from wfx import oracle
from wfx.core import MeasureSpace
from wfx.spaces import (SpecError, associate_norm, associate_spec, boyd_indices, constant_field,
                        distribution, distribution_of_step, holder_factor, lorentz, lp, norm, orlicz,
                        rearrangement, spec_from_dict, varexp, witness)
from wfx.young import PLog, Power

from conftest import SMALL_SHAPES, random_space


@pytest.mark.parametrize("shape", SMALL_SHAPES)
def test_norms_match_oracle(rng, shape):
    sp = random_space(rng, shape, zeros=True)
    f = rng.normal(size=shape)
    u, v = rng.uniform(0.5, 2, shape), rng.uniform(0.5, 2, shape)
    for p in (1.0, 1.5, 3.0):
        assert norm(f, lp(sp, p, u=u, v=v)) == pytest.approx(oracle.lp_norm(f, sp, p, u, v), rel=1e-12)
    for p, q in ((2.0, 1.0), (3.0, 1.5), (1.5, 4.0)):
        assert norm(f, lorentz(sp, p, q, u=u, v=v)) == pytest.approx(
            oracle.lorentz_norm(f, sp, p, q, u, v), rel=1e-10)
    phi = PLog(2.0, 1.0)
    assert norm(f, orlicz(sp, phi, u=u, v=v)) == pytest.approx(oracle.orlicz_norm(f, sp, phi, u, v), rel=1e-9)
    pf = rng.uniform(1.2, 3.0, shape)
    assert norm(f, varexp(sp, pf, u=u, v=v)) == pytest.approx(oracle.varexp_norm(f, sp, pf, u, v), rel=1e-9)


def test_lorentz_pp_is_lp(rng):
    sp = random_space(rng, (16,))
    f = rng.normal(size=16)
    assert norm(f, lorentz(sp, 2.5, 2.5)) == pytest.approx(norm(f, lp(sp, 2.5)), rel=1e-12)


def test_power_scale(rng):
    sp = random_space(rng, (16,))
    f = rng.normal(size=16)
    # || |f|^r ||_{L^2}^{1/r} = ||f||_{L^{2r}}
    assert norm(f, lp(sp, 2.0, r=1.5)) == pytest.approx(norm(f, lp(sp, 3.0)), rel=1e-12)


def test_rearrangement_and_distribution():
    sp = MeasureSpace((4,), 1.0, [1, 2, 0, 1])
    f = [3.0, 1.0, 5.0, 3.0]   # the 5 sits on a null cell
    fs = rearrangement(f, sp)
    assert fs(0.5) == 3.0 and fs(2.5) == 1.0 and fs(4.5) == 0.0
    d = distribution(f, sp)
    assert d(0.0) == 4.0 and d(1.0) == 2.0 and d(3.0) == 0.0
    assert distribution_of_step(fs).equals(d)


def test_associate_and_holder(rng):
    sp = random_space(rng, (16,))
    f, g = rng.random(16), rng.random(16)
    u = rng.uniform(0.5, 2, 16)
    for spec in (lp(sp, 3.0, u=u), lorentz(sp, 3.0, 1.5, u=u), orlicz(sp, PLog(2.0), u=u)):
        lhs = float(np.sum(f * g * sp.mu))
        assert lhs <= holder_factor(spec) * norm(f, spec) * associate_norm(g, spec) * (1 + 1e-6)
    assert associate_spec(lp(sp, 3.0)).p == pytest.approx(1.5)
    pf = constant_field(sp, [1.5, 3.0])
    assert holder_factor(varexp(sp, pf)) == pytest.approx(1 / 1.5 + 1 - 1 / 3.0)


def test_witness(rng):
    sp = random_space(rng, (16,))
    f = rng.random(16) + 0.1
    for spec in (lp(sp, 2.0), lorentz(sp, 3.0, 1.5), orlicz(sp, PLog(2.0)), varexp(sp, constant_field(sp, [1.5, 3.0]))):
        h, ratio = witness(f, spec)
        assert associate_norm(h, spec) <= 1 + 1e-9
        assert ratio <= 2.0


def test_boyd_and_spec_json(rng):
    sp = MeasureSpace((8,), 1.0)
    assert boyd_indices(lp(sp, 3.0)) == (3.0, 3.0, True)
    assert boyd_indices(varexp(sp, constant_field(sp, [1.5, 2.5])))[2] is False
    s = spec_from_dict({"family": "orlicz", "phi": {"family": "power", "p": 2}, "v": [1.0] * 8}, sp)
    f = rng.random(8)
    assert norm(f, s) == pytest.approx(norm(f, lp(sp, 2.0)), rel=1e-9)
    with pytest.raises(SpecError):
        spec_from_dict({"family": "lp", "p": 2, "u": "u.json"}, sp)
    with pytest.raises(SpecError):
        lorentz(sp, np.inf, 1.0)
    with pytest.raises(SpecError):
        lp(sp, 2.0, v=np.zeros(8))


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, 16, elements=st.floats(-5, 5)), arrays(np.float64, 16, elements=st.floats(-5, 5)),
       st.floats(1.0, 4.0), st.floats(0.1, 10.0))
def test_norm_axioms(f, g, p, c):
    sp = MeasureSpace((16,), 1.0 / 16)
    for spec in (lp(sp, p), orlicz(sp, Power(p)), lorentz(sp, 2.0, 1.0)):
        nf, ng = norm(f, spec), norm(g, spec)
        assert norm(c * f, spec) == pytest.approx(c * nf, rel=1e-9, abs=1e-300)
        assert norm(f + g, spec) <= (nf + ng) * (1 + 1e-9) + 1e-300
