from __future__ import annotations

import numpy as np
import pytest

from wfx import harness as H
from wfx.basis import enumerate_basis
from wfx.core import MeasureSpace
from wfx.rdf import RdfConfig
from wfx.spaces import lorentz, lp, orlicz
from wfx.young import PLog


@pytest.fixture(scope="module")
def setup():
    sp = MeasureSpace((128,), 1.0 / 128)
    return sp, enumerate_basis(sp, "intervals")


def test_psi_table():
    T = H.PsiTable.fit([3.0, 1.0, 2.0], [0.5, 2.0, 1.5])
    assert T(0.5) == 1.0 and T(1.0) == 2.0 and T(2.5) == 2.0 and T(3.0) == 2.0
    assert np.all(np.diff(T.psi) >= 0) and np.all(T.psi >= 1)
    assert T.extrapolated(3.5) and not T.extrapolated(2.0)
    with pytest.raises(H.FamilyError):
        H.PsiTable.fit([1.0], [np.inf])


def test_input_battery_deterministic(setup):
    sp, _ = setup
    a = H.input_battery(sp, seed=4)
    b = H.input_battery(sp, seed=4)
    assert all(np.array_equal(x, y) for x, y in zip(a, b))
    z = H.input_battery(sp, seed=4, mean_zero=True)
    assert all(abs(np.sum(x * sp.mu)) <= 1e-10 * np.sum(np.abs(x) * sp.mu) for x in z)


def test_families(setup):
    sp, B = setup
    for tag in H.FAMILY_TAGS:
        if tag == "custom":
            fam = H.make_family(tag, B, pairs=[(np.ones(128), np.ones(128))])
        else:
            fam = H.make_family(tag, B, count=4)
        assert fam.tag == tag and len(fam.pairs) >= 1
        for f, g in fam.pairs:
            assert np.all(np.isfinite(f)) and np.all(np.isfinite(g))
    with pytest.raises(ValueError):
        H.make_family("nope", B)


def test_identity_family_bfs_passes(setup):
    sp, B = setup
    fam = H.make_family("identity", B, count=4)
    rep = H.verify_bfs_extrapolation(fam, lp(sp, 3.0), B, 2.0, RdfConfig(K=30))
    assert rep.verdict == "PASS"
    assert max(rep.ratios) <= rep.bound_constant * rep.tolerance["factor"]
    d = rep.to_dict()
    assert d["mode"] == "bfs" and len(rep.rows()) == len(rep.ratios)


def test_hilbert_bfs_lorentz(setup):
    sp, B = setup
    fam = H.make_family("hilbert", B, count=6)
    rep = H.verify_bfs_extrapolation(fam, lorentz(sp, 3.0, 1.5), B, 2.0)
    assert rep.verdict == "PASS"


def test_inconclusive_on_bad_constant(setup):
    sp, B = setup
    fam = H.make_family("identity", B, count=4)
    rep = H.verify_bfs_extrapolation(fam, lp(sp, 3.0), B, 2.0, RdfConfig(N1=1e9, N2=1e9))
    assert rep.verdict == "INCONCLUSIVE"


def test_modular_and_limited(setup):
    sp, B = setup
    fam = H.make_family("hilbert", B, count=4)
    rep = H.verify_modular_extrapolation(fam, PLog(2.0), B, 2.0)
    assert rep.verdict == "PASS"
    rep = H.verify_limited_range(fam, lp(sp, 2.0), B, 1.0, 4.0)
    assert rep.verdict == "PASS"


def test_thread_env_preserves_order(setup, monkeypatch):
    sp, B = setup
    fam = H.make_family("identity", B, count=4)
    monkeypatch.setenv("WFX_THREADS", "1")
    a = H.verify_bfs_extrapolation(fam, lp(sp, 3.0), B, 2.0).ratios
    monkeypatch.setenv("WFX_THREADS", "4")
    b = H.verify_bfs_extrapolation(fam, lp(sp, 3.0), B, 2.0).ratios
    assert np.array_equal(a, b)
