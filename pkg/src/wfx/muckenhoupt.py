"""Muckenhoupt, reverse Hoelder and A_{p,q} constants, BMO norms and test weights.

Every constant is an exact maximum over the finite basis.  Powers of the
weight are formed in log space with a max-shift so that very negative
exponents do not overflow.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import Basis, enumerate_basis
from .core import MeasureSpace, Weight, values_of
from .maximal import maximal_values


@dataclass(frozen=True)
class ConstantResult:
    value: float
    argmax_box: tuple
    p: float | None = None

    def __float__(self):
        return self.value

    def to_dict(self) -> dict:
        lo, hi = self.argmax_box
        d = {"value": self.value, "argmax_box": [list(map(int, lo)), list(map(int, hi))]}
        if self.p is not None:
            d["p"] = self.p
        return d


def conj(p: float) -> float:
    """Hoelder conjugate p' (1' = inf, inf' = 1)."""
    if p == 1:
        return np.inf
    if np.isinf(p):
        return 1.0
    return p / (p - 1.0)


def _log_weight(w, basis: Basis) -> np.ndarray:
    lw = np.log(np.asarray(values_of(w, basis.space), dtype=float))
    if not np.all(np.isfinite(lw)):
        raise ValueError("weights must be finite and strictly positive")
    return lw


def log_power_averages(logw: np.ndarray, basis: Basis, e: float) -> list:
    """log of the mu-average of w**e over each element (nan on zero-mass elements)."""
    z = e * logw
    m = float(z.max())
    avgs = basis.averages(np.exp(z - m))
    with np.errstate(divide="ignore", invalid="ignore"):
        return [np.log(a) + m for a in avgs]


def _result(basis: Basis, vals: list, log: bool = True) -> ConstantResult:
    best, arg = basis.argmax(vals)
    if arg < 0:
        raise ValueError("basis has no element of positive mass")
    return ConstantResult(float(np.exp(best)) if log else best, basis.box(arg))


def ap_constant(w, basis: Basis, p: float) -> ConstantResult:
    """[w]_{A_p} = max_B (avg_B w)(avg_B w^{1-p'})^{p-1}."""
    if not p > 1:
        raise ValueError("p must exceed 1")
    lw = _log_weight(w, basis)
    if np.isinf(p):
        raise ValueError("p must be finite")
    pc = conj(p)
    a = log_power_averages(lw, basis, 1.0)
    b = log_power_averages(lw, basis, 1.0 - pc)
    return _result(basis, [x + (p - 1.0) * y for x, y in zip(a, b)])


def a1_constant(w, basis: Basis) -> ConstantResult:
    """[w]_{A_1} = max over cells of M_B w / w."""
    wv = np.asarray(values_of(w, basis.space), dtype=float)
    ratio = maximal_values(wv, basis) / wv
    cell = np.unravel_index(int(np.argmax(ratio)), wv.shape)
    return ConstantResult(float(ratio[cell]), _best_containing(basis, basis.averages(wv), cell, "max"))


def _best_containing(basis: Basis, vals: list, cell, mode: str) -> tuple:
    flat = basis.flat(vals)
    ids = basis.containing(cell)
    v = np.where(np.isnan(flat[ids]), -np.inf if mode == "max" else np.inf, flat[ids])
    j = ids[int(np.argmax(v) if mode == "max" else np.argmin(v))]
    return basis.box(int(j))


def rh_constant(w, basis: Basis, s: float) -> ConstantResult:
    """[w]_{RH_s} = max_B (avg_B w^s)^{1/s} / avg_B w."""
    if not s > 1:
        raise ValueError("s must exceed 1")
    lw = _log_weight(w, basis)
    a = log_power_averages(lw, basis, s)
    b = log_power_averages(lw, basis, 1.0)
    return _result(basis, [x / s - y for x, y in zip(a, b)])


def rhinf_constant(w, basis: Basis) -> ConstantResult:
    """[w]_{RH_inf} = max_B (max_B w) / avg_B w."""
    wv = np.asarray(values_of(w, basis.space), dtype=float)
    avgs = basis.averages(wv)
    neg = [np.where(np.isnan(a), np.nan, -a) for a in avgs]
    min_avg = -basis.scatter_max(neg)
    with np.errstate(divide="ignore"):
        ratio = np.where(basis.space.mu > 0, wv / min_avg, 0.0)
    cell = np.unravel_index(int(np.argmax(ratio)), wv.shape)
    return ConstantResult(float(ratio[cell]), _best_containing(basis, avgs, cell, "min"))


def apq_constant(w, basis: Basis, p: float, q: float) -> ConstantResult:
    """[w]_{A_{p,q}} = max_B (avg_B w^q)(avg_B w^{-p'})^{q/p'}, 1 < p <= inf, q >= 1."""
    if not (p > 1 and q >= 1):
        raise ValueError("need p > 1 and q >= 1")
    lw = _log_weight(w, basis)
    pc = conj(p)
    a = log_power_averages(lw, basis, q)
    b = log_power_averages(lw, basis, -pc)
    return _result(basis, [x + (q / pc) * y for x, y in zip(a, b)])


def bmo_norm(b, basis: Basis) -> ConstantResult:
    """sup_B avg_B |b - b_B| (mean oscillation with respect to mu)."""
    bv = np.asarray(values_of(b, basis.space))
    if np.iscomplexobj(bv):
        raise ValueError("BMO needs a real function")
    bv = bv.astype(float).ravel()
    mu = basis.space.mu.ravel()
    vals = np.full(len(basis), np.nan)
    for off, ids in basis.cell_chunks():
        m = mu[ids]
        tot = m.sum(axis=1)
        ok = tot > 0
        B = bv[ids[ok]]
        W = m[ok]
        mean = (B * W).sum(axis=1) / tot[ok]
        osc = (np.abs(B - mean[:, None]) * W).sum(axis=1) / tot[ok]
        seg = np.full(ids.shape[0], np.nan)
        seg[ok] = osc
        vals[off:off + ids.shape[0]] = seg
    per_group = [vals[a:c] for a, c in zip(basis.offsets[:-1], basis.offsets[1:])]
    return _result(basis, per_group, log=False)


def ainf_constant(w, basis: Basis, p_max: float = 64.0, tol: float = 1e-6) -> ConstantResult:
    """inf over p in (1, p_max] of [w]_{A_p}, returned with the minimiser p*.

    A log-spaced scan over p - 1 is refined by golden-section search around
    the best scan point.  Ties are resolved towards the largest p, so a
    constant weight reports p* = p_max.
    """
    if not p_max > 1:
        raise ValueError("p_max must exceed 1")
    lw = _log_weight(w, basis)
    a = log_power_averages(lw, basis, 1.0)
    cache = {}

    def logA(p):
        if p not in cache:
            b = log_power_averages(lw, basis, 1.0 - conj(p))
            cache[p] = basis.argmax([x + (p - 1.0) * y for x, y in zip(a, b)])
        return cache[p][0]

    grid = 1.0 + np.geomspace(1e-3, p_max - 1.0, 40)
    vals = np.array([logA(p) for p in grid])
    i = len(grid) - 1 - int(np.argmin(vals[::-1]))
    lo = grid[max(i - 1, 0)] if i > 0 else 1.0 + 1e-6
    hi = grid[min(i + 1, len(grid) - 1)]
    g = (np.sqrt(5.0) - 1.0) / 2.0
    x1, x2 = hi - g * (hi - lo), lo + g * (hi - lo)
    while hi - lo > tol:
        if logA(x1) < logA(x2):
            hi, x2 = x2, x1
            x1 = hi - g * (hi - lo)
        else:
            lo, x1 = x1, x2
            x2 = lo + g * (hi - lo)
    best_p = min(cache, key=lambda p: (cache[p][0], -p))
    val, arg = cache[best_p]
    return ConstantResult(float(np.exp(val)), basis.box(arg), float(best_p))


def make_power_weight(space: MeasureSpace, a: float, center=None) -> Weight:
    """|x - center|^a at cell centres (default centre: the origin, a grid corner)."""
    if center is None:
        center = np.zeros(space.dim)
    center = np.atleast_1d(np.asarray(center, dtype=float))
    grids = np.meshgrid(*[space.centers(i) for i in range(space.dim)], indexing="ij")
    r2 = sum((g - c) ** 2 for g, c in zip(grids, center))
    if np.any(r2 == 0) and a < 0:
        raise ValueError("power weight centre coincides with a cell centre")
    return Weight(r2 ** (a / 2.0), space)


def make_random_a1ish(space: MeasureSpace, seed: int, basis: Basis | None = None,
                      delta: float | None = None) -> Weight:
    """(M_B g)^delta for a random sparse nonnegative g; deterministic in ``seed``."""
    rng = np.random.default_rng(seed)
    if basis is None:
        basis = enumerate_basis(space, "intervals" if space.dim == 1 else "cubes")
    if delta is None:
        delta = float(rng.uniform(0.2, 0.9))
    g = rng.exponential(size=space.shape) ** 3
    g *= rng.random(space.shape) < 0.1
    g.flat[int(rng.integers(space.size))] += 1.0
    mg = maximal_values(g, basis)
    return Weight(mg ** delta, space)
