from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from wfx.basis import enumerate_basis
from wfx.core import MeasureSpace
from wfx.maximal import maximal
from wfx.operators import (ConeSpec, calderon_commutator, commutator, hilbert, nontangential_maximal,
                           order_m_measure, poisson_extend, sandwich_constant, solve_dirichlet,
                           solve_dirichlet_modular, square_function, square_t_grid)
from wfx.spaces import lp
from wfx.young import PLog


def _hilbert_direct(f, h):
    n = len(f)
    x = (np.arange(n) + 0.5) * h
    out = np.zeros(n, dtype=np.result_type(f, float))
    for i in range(n):
        for j in range(n):
            if i != j:
                out[i] += f[j] * h / (np.pi * (x[i] - x[j]))
    return out


def test_hilbert_matches_direct_sum(rng):
    sp = MeasureSpace((32,), 0.25)
    f = rng.normal(size=32) + 1j * rng.normal(size=32)
    assert np.allclose(hilbert(f, sp).values, _hilbert_direct(f, 0.25), rtol=1e-10, atol=1e-12)


def test_hilbert_antisymmetry(rng):
    sp = MeasureSpace((64,), 1.0)
    f, g = rng.normal(size=64), rng.normal(size=64)
    assert np.dot(hilbert(f, sp).values, g) == pytest.approx(-np.dot(f, hilbert(g, sp).values), abs=1e-10)


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_commutator_direct_vs_expand(rng, k):
    sp = MeasureSpace((64,), 1.0 / 64)
    f, b = rng.normal(size=64), np.log(np.abs(sp.centers() - 0.37))
    d = commutator("hilbert", b, k, f, sp, "direct").values
    e = commutator("hilbert", b, k, f, sp, "expand").values
    assert np.allclose(d, e, rtol=1e-8, atol=1e-8 * np.abs(d).max())
    with pytest.raises(ValueError):
        commutator("riesz", b, k, f, sp)


def test_commutator_constant_symbol_vanishes(rng):
    sp = MeasureSpace((32,), 1.0)
    f = rng.normal(size=32)
    assert np.allclose(commutator("hilbert", np.full(32, 2.0), 1, f, sp).values, 0.0)


def test_calderon_identity(rng):
    sp = MeasureSpace((128,), 1.0 / 128)
    x = sp.centers()
    r = calderon_commutator(np.abs(x - 0.5), rng.normal(size=128), sp)
    assert r.residual < 1e-10
    # linear F: the commutator kernel vanishes identically
    lin = calderon_commutator(3 * x + 1, rng.normal(size=128), sp)
    assert np.allclose(lin.commutator.values, 0.0, atol=1e-9)


def test_poisson_extension(rng):
    sp = MeasureSpace((64,), 1.0 / 64)
    f = rng.normal(size=64)
    cone = ConeSpec(1.0)
    u = poisson_extend(f, cone.levels(sp), sp)
    assert u.t[0] == 0 and np.array_equal(u.values[0], f)
    assert np.all(u.values <= f.max() + 1e-12) and np.all(u.values >= f.min() - 1e-12)
    const = poisson_extend(np.full(64, 2.5), cone.levels(sp), sp)
    assert np.allclose(const.values, 2.5)
    N = nontangential_maximal(u, cone).values
    B = enumerate_basis(sp, "intervals")
    assert np.all(N >= np.abs(f))
    assert np.all(N <= sandwich_constant(1.0) * maximal(f, B).values * (1 + 1e-12))


def test_cone_validation():
    with pytest.raises(ValueError):
        ConeSpec(0.0)
    with pytest.raises(ValueError):
        ConeSpec(1.0, [0.2, 0.1])


def test_dirichlet_certificates(rng):
    sp = MeasureSpace((128,), 1.0 / 128)
    B = enumerate_basis(sp, "intervals")
    f = rng.normal(size=128)
    _, cert = solve_dirichlet(f, lp(sp, 2.0), ConeSpec(1.0), B)
    assert cert.verdict == "PASS" and cert.sandwich == sandwich_constant(1.0)
    _, cert = solve_dirichlet_modular(f, PLog(2.0), ConeSpec(1.0), B)
    assert cert.verdict == "PASS" and cert.sandwich == sandwich_constant(1.0)
    _, cert = solve_dirichlet(f, lp(sp, 2.0), ConeSpec(1.0), B, N1=np.inf)
    assert cert.verdict == "INCONCLUSIVE"


def test_order_m_measure_gaps():
    sp = order_m_measure(256, 0.125, 0.7)
    assert np.any(sp.mu == 0) and np.all(np.isfinite(sp.mu))
    assert not np.any(order_m_measure(256, 0.125, 1.0, gaps=False).mu == 0)


def test_square_function():
    t = square_t_grid(0.05)
    assert t[0] == pytest.approx(0.05) and t[-1] == pytest.approx(20.0)
    sp = MeasureSpace((256,), 0.125)
    f = np.zeros(256)
    f[100:104], f[104:108] = 1.0, -1.0
    g = square_function(f, sp, 0.05).values
    assert np.all(np.isfinite(g)) and g.max() > 0
    assert np.allclose(square_function(2 * f, sp, 0.05).values, 2 * g)
    with pytest.raises(ValueError):
        square_t_grid(1.5)


@settings(max_examples=25, deadline=None)
@given(arrays(np.float64, 32, elements=st.floats(-5, 5)), st.floats(-3, 3))
def test_hilbert_linear(f, c):
    sp = MeasureSpace((32,), 1.0)
    g = np.roll(f, 3)
    lhs = hilbert(c * f + g, sp).values
    rhs = c * hilbert(f, sp).values + hilbert(g, sp).values
    assert np.allclose(lhs, rhs, atol=1e-9 * (1 + np.abs(f).max()))
