from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wfx.muckenhoupt import conj
from wfx.young import MinMax, PLog, Power, Rescaled, Tabulated, exp_young, make_young, modular


T = np.geomspace(1e-4, 1e4, 81)


@pytest.mark.parametrize("phi", [Power(2.0), Power(3.0), PLog(2.0, 1.0), MinMax(1.5, 3.0, "max"),
                                 MinMax(1.5, 3.0, "min"), PLog(1.5, 2.0)])
def test_young_inequality_and_inverse_product(phi):
    bar = phi.complementary()
    s = np.geomspace(1e-3, 1e3, 41)
    S, Tt = np.meshgrid(s, s)
    # the tabulated complement carries its own interpolation error bound
    tol = 1e-6 + 2 * getattr(bar, "error", 0.0)
    assert np.all(S * Tt <= (phi(S) + bar(Tt)) * (1 + tol))
    r = phi.inverse(T) * bar.inverse(T) / T
    assert np.all(r >= 1 - tol) and np.all(r <= 2 * (1 + tol))


@pytest.mark.parametrize("p", [1.5, 2.0, 4.0])
def test_power_complementary_closed_form(p):
    bar = Power(p).complementary()
    q = conj(p)
    # Legendre transform of t^p is c t^{p'} with c = (p - 1) p^{-p'}
    c = (p - 1) * p ** (-q)
    assert np.allclose(bar(T), c * T ** q, rtol=1e-6)


def test_indices():
    assert Power(2.5).dilation_indices() == (2.5, 2.5)
    i, I = PLog(2.0, 1.0).dilation_indices()
    assert i == pytest.approx(2.0, abs=0.05) and I == pytest.approx(2.0, abs=0.05)
    i, I = MinMax(1.5, 3.0).dilation_indices()
    assert i == pytest.approx(1.5, abs=0.05) and I == pytest.approx(3.0, abs=0.05)
    assert exp_young().dilation_indices()[1] == np.inf


def test_delta2():
    assert Power(2.0).delta2_constant() == pytest.approx(4.0, rel=1e-6)
    assert np.isfinite(PLog(2.0).delta2_constant())
    assert exp_young().delta2_constant() == np.inf


def test_rescaled_and_tabulated():
    phi = Rescaled(Power(2.0), 1.5)
    assert np.allclose(phi(T), T ** 3.0, rtol=1e-10)
    tab = Tabulated(T, T ** 2)
    assert np.allclose(tab(T[5:-5] * 1.01), (T[5:-5] * 1.01) ** 2, rtol=1e-8)
    with pytest.raises(ValueError):
        Tabulated([1, 2, 3], [3, 2, 1])


def test_make_young_roundtrip():
    for d in ({"family": "power", "p": 2.0}, {"family": "plog", "p": 2.0, "alpha": 1.0},
              {"family": "minmax", "p": 1.5, "q": 3.0, "mode": "max"}):
        phi = make_young(d)
        assert make_young(phi.to_dict()).to_dict() == phi.to_dict()
    with pytest.raises(ValueError):
        make_young({"family": "nope"})


def test_modular_weighted():
    from wfx.core import MeasureSpace
    sp = MeasureSpace((4,), 0.5)
    assert modular([1, 2, 0, 1], Power(2.0), [1, 1, 1, 2], sp) == pytest.approx(0.5 * (1 + 4 + 0 + 2))


@settings(max_examples=40, deadline=None)
@given(st.floats(1.1, 6.0), st.floats(0.0, 3.0), st.floats(-8, 8))
def test_plog_convex_increasing_inverse(p, alpha, lt):
    phi = PLog(p, alpha)
    t = float(np.exp(lt))
    assert phi.inverse(phi(t)) == pytest.approx(t, rel=1e-9)
    assert phi.deriv(t) * t >= phi(t) * (1 - 1e-9)   # convexity with Phi(0) = 0
