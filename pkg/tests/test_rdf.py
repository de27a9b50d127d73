from __future__ import annotations

import numpy as np
import pytest

from wfx.basis import enumerate_basis
from wfx.core import MeasureSpace
from wfx.maximal import maximal
from wfx.muckenhoupt import a1_constant, ap_constant
from wfx.rdf import (ConstantError, RdfConfig, build_a1_weight, build_ap_weight, build_limited_range_weight,
                     build_modular_weight, estimate_maximal_norm, limited_range_exponents, positive_majorant,
                     rdf_majorant)
from wfx.spaces import lp, lorentz, norm
from wfx.young import PLog


@pytest.fixture(scope="module")
def setup():
    sp = MeasureSpace((64,), 1.0 / 64)
    return sp, enumerate_basis(sp, "intervals")


def test_majorant_properties(setup, rng):
    sp, B = setup
    h = rng.random(64) + 0.01
    N = estimate_maximal_norm(lp(sp, 2.0), B).value
    R = rdf_majorant(h, B, N, 40)
    assert np.all(R.values >= h)
    assert norm(R, lp(sp, 2.0)) <= 2 * norm(h, lp(sp, 2.0)) * (1 + 1e-9)
    assert a1_constant(R, B).value <= 2 * N * (1 + 2.0 ** -38)
    assert np.all(maximal(R, B).values <= 2 * N * R.values * (1 + R.tail + 1e-12))


def test_majorant_rejects_small_N(setup):
    sp, B = setup
    with pytest.raises(ConstantError):
        rdf_majorant(np.ones(64), B, 0.5)
    with pytest.raises(ConstantError):
        RdfConfig(N1=0.9)


def test_norm_estimate_brackets(setup):
    sp, B = setup
    est = estimate_maximal_norm(lp(sp, 2.0), B)
    assert 1.0 <= est.lower <= est.value
    assert est.value <= 8.0


def test_positive_majorant(setup, rng):
    sp, B = setup
    h = rng.random(64) * (rng.random(64) < 0.3)
    spec = lp(sp, 2.0)
    ht = positive_majorant(h, spec, 1.0, "norm").values
    assert np.all(ht > 0) and np.all(ht >= h)
    assert norm(ht - h, spec) <= 1.0 + 1e-9


@pytest.mark.parametrize("p0", [1.0, 1.5, 2.0, 3.0])
def test_ap_weight_checks(setup, rng, p0):
    sp, B = setup
    f, g = rng.normal(size=64), rng.random(64) + 0.1
    spec = lorentz(sp, 2.5, 1.5)
    if p0 == 1.0:
        w, rep = build_a1_weight(f, g, spec, B, RdfConfig(K=40))
    else:
        w, rep = build_ap_weight(f, g, spec, B, p0, RdfConfig(K=40))
        assert rep["ap_constant"] == pytest.approx(ap_constant(w, B, p0).value)
    assert all(rep["checks"].values()), rep["checks"]
    assert np.all(w.values > 0)


def test_zero_input_is_substituted(setup):
    sp, B = setup
    w, rep = build_ap_weight(np.zeros(64), np.ones(64), lp(sp, 2.0), B, 2.0)
    assert rep["substituted"]["f"] and all(rep["checks"].values())


@pytest.mark.parametrize("theta", [1.0, 0.5])
def test_modular_weight(setup, rng, theta):
    sp, B = setup
    f, g = rng.random(64) + 0.05, rng.random(64) + 0.05
    w, rep = build_modular_weight(f, g, PLog(2.0), B, 2.0, theta)
    assert all(rep["checks"].values()), rep["checks"]


def test_limited_range(setup, rng):
    sp, B = setup
    f, g = rng.random(64) + 0.05, rng.random(64) + 0.05
    w, rep = build_limited_range_weight(f, g, lp(sp, 2.0), B, 1.0, 4.0)
    assert all(rep["checks"].values()), rep["checks"]
    assert 1.0 < rep["pstar"] < 4.0
    with pytest.raises(ValueError):
        build_limited_range_weight(f, g, lp(sp, 5.0), B, 1.0, 4.0)


def test_limited_range_exponents_identities():
    ex = limited_range_exponents(2.0, 2.0, 4.0)
    d = ex.to_dict()
    assert d["pstar"] > 1 and ex.s > 0 and ex.alpha1 > 0 and ex.alpha2 > 0
