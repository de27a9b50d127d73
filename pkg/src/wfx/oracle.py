"""Naive enumeration reference implementations for small grids.

Everything here loops over boxes and cells in plain Python and evaluates
the defining formulas directly.  Intended for n <= 16 per axis; the fast
code paths are checked against these.
"""
from __future__ import annotations

import itertools

import numpy as np
from scipy.optimize import brentq

from .core import MeasureSpace


def boxes(space: MeasureSpace, kind: str) -> list:
    """All boxes (lo, hi) of a basis kind, by direct enumeration."""
    shape = space.shape
    if kind == "dyadic":
        out = []
        s = 1
        while s <= min(shape):
            for lo in itertools.product(*[range(0, n - s + 1, s) for n in shape]):
                out.append((lo, tuple(a + s for a in lo)))
            s *= 2
        return out
    if space.dim == 1 or kind == "rectangles":
        ivs = [[(a, b) for a in range(n) for b in range(a + 1, n + 1)] for n in shape]
        return [(tuple(a for a, _ in c), tuple(b for _, b in c)) for c in itertools.product(*ivs)]
    if kind == "cubes":
        out = []
        for s in range(1, min(shape) + 1):
            for lo in itertools.product(*[range(n - s + 1) for n in shape]):
                out.append((lo, tuple(a + s for a in lo)))
        return out
    raise ValueError(kind)


def _cells(lo, hi):
    return list(itertools.product(*[range(a, b) for a, b in zip(lo, hi)]))


def _avg(f, mu, lo, hi):
    num = den = 0.0
    for c in _cells(lo, hi):
        num += f[c] * mu[c]
        den += mu[c]
    return (num / den) if den > 0 else None


def _power_avg(w, mu, lo, hi, e):
    num = den = 0.0
    for c in _cells(lo, hi):
        if mu[c] > 0:
            num += w[c] ** e * mu[c]
            den += mu[c]
    return (num / den) if den > 0 else None


def ap(w, space, kind, p):
    pc = p / (p - 1.0)
    best = -np.inf
    for lo, hi in boxes(space, kind):
        a = _power_avg(w, space.mu, lo, hi, 1.0)
        if a is None:
            continue
        b = _power_avg(w, space.mu, lo, hi, 1.0 - pc)
        best = max(best, a * b ** (p - 1.0))
    return best


def a1(w, space, kind):
    M = maximal(w, space, kind)
    return float(np.max(M / w))


def rh(w, space, kind, s):
    best = -np.inf
    for lo, hi in boxes(space, kind):
        a = _power_avg(w, space.mu, lo, hi, s)
        if a is None:
            continue
        best = max(best, a ** (1.0 / s) / _power_avg(w, space.mu, lo, hi, 1.0))
    return best


def apq(w, space, kind, p, q):
    pc = p / (p - 1.0)
    best = -np.inf
    for lo, hi in boxes(space, kind):
        a = _power_avg(w, space.mu, lo, hi, q)
        if a is None:
            continue
        best = max(best, a * _power_avg(w, space.mu, lo, hi, -pc) ** (q / pc))
    return best


def bmo(b, space, kind):
    best = -np.inf
    for lo, hi in boxes(space, kind):
        m = _avg(b, space.mu, lo, hi)
        if m is None:
            continue
        best = max(best, _avg(np.abs(b - m), space.mu, lo, hi))
    return best


def maximal(f, space, kind):
    out = np.full(space.shape, -np.inf)
    fa = np.abs(f)
    for lo, hi in boxes(space, kind):
        a = _avg(fa, space.mu, lo, hi)
        if a is None:
            continue
        for c in _cells(lo, hi):
            out[c] = max(out[c], a)
    return out


# -- norms -----------------------------------------------------------------


def _mag_mass(f, space, u=None, v=None):
    F = np.abs(np.asarray(f, dtype=float)) * (1.0 if u is None else u)
    nu = space.mu * (1.0 if v is None else v)
    F, nu = F.ravel(), np.broadcast_to(nu, space.shape).ravel()
    keep = nu > 0
    return F[keep], nu[keep]


def lp_norm(f, space, p, u=None, v=None):
    F, nu = _mag_mass(f, space, u, v)
    return float(sum(x ** p * m for x, m in zip(F, nu)) ** (1.0 / p))


def lorentz_norm(f, space, p, q, u=None, v=None):
    """(int_0^inf (t^{1/p} f*(t))^q dt/t)^{1/q}, f* the decreasing rearrangement."""
    F, nu = _mag_mass(f, space, u, v)
    order = sorted(range(len(F)), key=lambda i: -F[i])
    total, t = 0.0, 0.0
    for i in order:
        if F[i] == 0:
            break
        t1 = t + nu[i]
        # int_t^{t1} s^{q/p - 1} ds
        total += F[i] ** q * (p / q) * (t1 ** (q / p) - t ** (q / p))
        t = t1
    return float(total ** (1.0 / q))


def _lux(modular_of):
    lo, hi = 1e-300, 1.0
    while modular_of(hi) > 1:
        hi *= 2.0
    lo = hi
    while modular_of(lo) <= 1 and lo > 1e-250:
        lo /= 2.0
    return brentq(lambda lam: modular_of(lam) - 1.0, lo, hi, xtol=1e-300, rtol=1e-15, maxiter=1000)


def orlicz_norm(f, space, phi, u=None, v=None):
    """Luxemburg norm inf{lam : sum Phi(|f u|/lam) v mu <= 1} with Phi a plain callable."""
    F, nu = _mag_mass(f, space, u, v)
    F, nu = F[F > 0], nu[F > 0]
    if F.size == 0:
        return 0.0
    return _lux(lambda lam: float(sum(phi(x / lam) * m for x, m in zip(F, nu))))


def varexp_norm(f, space, pfield, u=None, v=None):
    F = np.abs(np.asarray(f, dtype=float)) * (1.0 if u is None else u)
    nu = space.mu * (1.0 if v is None else v)
    pf = np.broadcast_to(pfield, space.shape)
    terms = [(F[c], nu[c], pf[c]) for c in np.ndindex(space.shape) if nu[c] > 0 and F[c] > 0]
    if not terms:
        return 0.0
    return _lux(lambda lam: float(sum((x / lam) ** e * m for x, m, e in terms)))


__all__ = ["boxes", "ap", "a1", "rh", "apq", "bmo", "maximal", "lp_norm", "lorentz_norm",
           "orlicz_norm", "varexp_norm"]
