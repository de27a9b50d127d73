"""Maximal operators over a basis: M_B, the weighted dual, iterates, the
centred maximal function and Orlicz maximal functions."""
from __future__ import annotations

import numpy as np

from .basis import Basis
from .core import GridFunction, MeasureSpace, values_of


def _wrap(vals: np.ndarray, space: MeasureSpace) -> GridFunction:
    return GridFunction(vals, space)


def maximal_values(f, basis: Basis) -> np.ndarray:
    """Array version of :func:`maximal`."""
    fv = np.abs(values_of(f, basis.space))
    out = basis.scatter_max(basis.averages(fv))
    return np.where(np.isfinite(out), out, 0.0)


def maximal(f, basis: Basis) -> GridFunction:
    """M_B f(x) = max over elements B containing x of the mu-average of |f| on B."""
    return _wrap(maximal_values(f, basis), basis.space)


def dual_maximal(f, basis: Basis, v) -> GridFunction:
    """M'_{B,v} f = M_B(f v) / v."""
    vv = values_of(v, basis.space)
    return _wrap(maximal_values(values_of(f, basis.space) * vv, basis) / vv, basis.space)


def iterate_maximal(f, basis: Basis, k: int) -> GridFunction:
    """k-fold composition of M_B; k = 0 is the identity."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    x = values_of(f, basis.space)
    if k == 0:
        return _wrap(np.array(x, copy=True), basis.space)
    for _ in range(k):
        x = maximal_values(x, basis)
    return _wrap(x, basis.space)


def centered_maximal(f, space: MeasureSpace) -> GridFunction:
    """Supremum of mu-averages of |f| over cubes centred at each cell.

    The cube of radius k around a cell spans the cells at distance at most k
    (per axis).  Only cubes lying inside the grid are used and cubes of zero
    mass are skipped.
    """
    fv = np.abs(values_of(f, space)).astype(float)
    mu = space.mu
    fm = fv * mu
    n = space.shape
    out = np.where(mu > 0, fv, 0.0)
    if space.dim == 1:
        cs_f = np.concatenate([[0.0], np.cumsum(fm)])
        cs_m = np.concatenate([[0.0], np.cumsum(mu)])
        idx = np.arange(n[0])
        for k in range(1, (n[0] - 1) // 2 + 1):
            c = idx[k:n[0] - k]
            num = cs_f[c + k + 1] - cs_f[c - k]
            den = cs_m[c + k + 1] - cs_m[c - k]
            ok = den > 0
            avg = np.where(ok, num / np.where(ok, den, 1.0), 0.0)
            out[c] = np.maximum(out[c], avg)
        return _wrap(out, space)
    from numpy.lib.stride_tricks import sliding_window_view

    for k in range(1, min(n) // 2 + 1):
        s = 2 * k + 1
        if s > min(n):
            break
        num = sliding_window_view(fm, (s, s)).sum(axis=(-2, -1))
        den = sliding_window_view(mu, (s, s)).sum(axis=(-2, -1))
        ok = den > 0
        avg = np.where(ok, num / np.where(ok, den, 1.0), 0.0)
        sub = out[k:n[0] - k, k:n[1] - k]
        np.maximum(sub, avg, out=sub)
    return _wrap(out, space)


def _element_luxemburg(F: np.ndarray, Wt: np.ndarray, phi, tol: float) -> np.ndarray:
    """Normalised Luxemburg norms for rows of F with per-row probability weights Wt.

    Solves sum_j Wt_j Phi(F_j / lam) = 1 by bisection in log(lam), bracketed by
    Jensen: mean(F)/Phi^{-1}(1) <= lam <= max(F)/Phi^{-1}(1).
    """
    c = float(phi.inverse(1.0))
    lo = (Wt * F).sum(axis=1) / c
    hi = F.max(axis=1) / c
    out = np.zeros(F.shape[0])
    pos = hi > 0
    if not np.any(pos):
        return out
    F, Wt, lo, hi = F[pos], Wt[pos], lo[pos], hi[pos]
    lo = np.maximum(lo, hi * 1e-300)
    llo, lhi = np.log(lo), np.log(hi)
    for _ in range(200):
        mid = 0.5 * (llo + lhi)
        lam = np.exp(mid)
        val = (Wt * phi(F / lam[:, None])).sum(axis=1)
        big = val > 1.0
        llo = np.where(big, mid, llo)
        lhi = np.where(big, lhi, mid)
        if np.all(np.exp(lhi) - np.exp(llo) <= tol):
            break
    out[pos] = np.exp(lhi)
    return out


def orlicz_maximal(f, basis: Basis, phi) -> GridFunction:
    """Supremum over containing elements of the normalised Luxemburg norm.

    ``||f||_{Phi,B} = inf{lam > 0 : avg_B Phi(|f|/lam) <= 1}``.  Powers use the
    closed form; t -> t gives the plain average.
    """
    space = basis.space
    fv = np.abs(values_of(f, space)).astype(float)
    fmax = float(fv.max()) if fv.size else 0.0
    if fmax == 0.0:
        return _wrap(np.zeros(space.shape), space)
    if getattr(phi, "family", None) == "power":
        p = phi.p
        avg = basis.averages(fv ** p)
        vals = [a ** (1.0 / p) for a in avg]
        out = basis.scatter_max(vals)
        return _wrap(np.where(np.isfinite(out), out, 0.0), space)
    mu = space.mu.ravel()
    ff = fv.ravel() / fmax
    tol = 1e-12
    vals = np.full(len(basis), np.nan)
    for off, ids in basis.cell_chunks():
        m = mu[ids]
        tot = m.sum(axis=1)
        ok = tot > 0
        if not np.any(ok):
            continue
        Wt = m[ok] / tot[ok, None]
        res = _element_luxemburg(ff[ids[ok]], Wt, phi, tol)
        seg = np.full(ids.shape[0], np.nan)
        seg[ok] = res
        vals[off:off + ids.shape[0]] = seg
    per_group = [vals[a:b] for a, b in zip(basis.offsets[:-1], basis.offsets[1:])]
    out = basis.scatter_max(per_group) * fmax
    return _wrap(np.where(np.isfinite(out), out, 0.0), space)
