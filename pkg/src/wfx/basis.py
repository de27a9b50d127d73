"""Finite bases of cell boxes with vectorised sums and basis-indexed suprema.

A basis is stored as a list of *groups*.  Every group knows how to

* compute the sum of an array over each of its elements (``sums``),
* scatter per-element values back to cells by taking the maximum over all
  elements containing each cell (``scatter_max``),
* describe its elements as half-open boxes (``box``) and as explicit cell
  lists (``cell_chunks``) for per-element nonlinear work.

Elements are globally numbered by concatenating the groups in order.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.ndimage import maximum_filter1d

from .core import MeasureSpace, values_of

RECTANGLE_CAP = 20_000_000
KINDS = ("dyadic", "intervals", "cubes", "rectangles")


class BasisCapError(RuntimeError):
    """The requested basis (or per-element work) exceeds the size cap."""


@dataclass(frozen=True)
class BasisElement:
    lo: tuple
    hi: tuple
    mass: float

    @property
    def cells(self) -> tuple:
        return tuple(slice(a, b) for a, b in zip(self.lo, self.hi))


def _sliding_max_back(V: np.ndarray, s: int, n: int, axis: int) -> np.ndarray:
    """out[c] = max(V[c-s+1 .. c]) along ``axis`` (out-of-range entries are -inf)."""
    if s == 1:
        return V
    pad = [(0, 0)] * V.ndim
    pad[axis] = (s - 1, s - 1)
    P = np.pad(V, pad, constant_values=-np.inf)
    M = maximum_filter1d(P, size=s, axis=axis, mode="constant", cval=-np.inf)
    sl = [slice(None)] * V.ndim
    sl[axis] = slice(s // 2, s // 2 + n)
    return M[tuple(sl)]


def _window_sums(x: np.ndarray, s: int, axis: int) -> np.ndarray:
    if s == 1:
        return x
    return sliding_window_view(x, s, axis=axis).sum(axis=-1)


class _IntervalTable:
    """All intervals of a 1-D axis of length n, ordered by length then start.

    Works on a batch: arrays of shape (..., n).
    """

    def __init__(self, n: int):
        self.n = n
        k, a = np.indices((n, n))
        valid = a + k < n
        self.valid = valid
        self.k = k[valid]
        self.a = a[valid]
        self.count = n * (n + 1) // 2
        self.hank_idx = np.where(valid, a + k, 0)

    def sums(self, x: np.ndarray) -> np.ndarray:
        H = x[..., self.hank_idx] * self.valid
        S = np.cumsum(H, axis=-2)
        return S[..., self.valid]

    def scatter(self, V: np.ndarray) -> np.ndarray:
        n = self.n
        G = np.full(V.shape[:-1] + (n, n), -np.inf)
        G[..., self.a, self.a + self.k] = V
        T = np.flip(np.maximum.accumulate(np.flip(G, -1), axis=-1), -1)
        T = np.maximum.accumulate(T, axis=-2)
        return np.diagonal(T, axis1=-2, axis2=-1)


class _Group:
    count: int

    def sums(self, x):  # pragma: no cover - interface
        raise NotImplementedError

    def scatter_max(self, v):  # pragma: no cover - interface
        raise NotImplementedError

    def box(self, j):  # pragma: no cover - interface
        raise NotImplementedError

    def cell_chunks(self, shape):
        """Yield (offset, flat cell indices of shape (m, L)) covering the group."""
        raise NotImplementedError


class _Intervals1D(_Group):
    def __init__(self, n):
        self.t = _IntervalTable(n)
        self.count = self.t.count
        self.n = n

    def sums(self, x):
        return self.t.sums(x)

    def scatter_max(self, v):
        return self.t.scatter(v)

    def box(self, j):
        k, a = int(self.t.k[j]), int(self.t.a[j])
        return (a,), (a + k + 1,)

    def lo_hi(self):
        return self.t.a[:, None], (self.t.a + self.t.k + 1)[:, None]

    def cell_chunks(self, shape):
        off = 0
        for L in range(1, self.n + 1):
            m = self.n - L + 1
            yield off, np.arange(m)[:, None] + np.arange(L)[None, :]
            off += m


class _DyadicLevel(_Group):
    def __init__(self, shape, s):
        self.shape = shape
        self.s = s
        self.grid = tuple(k // s for k in shape)
        self.count = int(np.prod(self.grid))

    def sums(self, x):
        s = self.s
        if len(self.shape) == 1:
            return x.reshape(-1, s).sum(1)
        n0, n1 = self.shape
        return x.reshape(n0 // s, s, n1 // s, s).sum(axis=(1, 3)).ravel()

    def scatter_max(self, v):
        v = v.reshape(self.grid)
        for ax in range(v.ndim):
            v = np.repeat(v, self.s, axis=ax)
        return v

    def box(self, j):
        idx = np.unravel_index(j, self.grid)
        lo = tuple(int(i) * self.s for i in idx)
        return lo, tuple(a + self.s for a in lo)

    def lo_hi(self):
        lo = np.stack([i.ravel() * self.s for i in np.indices(self.grid)], axis=1)
        return lo, lo + self.s

    def cell_chunks(self, shape):
        s = self.s
        if len(shape) == 1:
            yield 0, np.arange(shape[0]).reshape(-1, s)
            return
        n0, n1 = shape
        ids = np.arange(n0 * n1).reshape(n0 // s, s, n1 // s, s)
        yield 0, ids.transpose(0, 2, 1, 3).reshape(-1, s * s)


class _Cubes2D(_Group):
    def __init__(self, shape, s):
        self.shape = shape
        self.s = s
        self.grid = (shape[0] - s + 1, shape[1] - s + 1)
        self.count = self.grid[0] * self.grid[1]

    def sums(self, x):
        s = self.s
        return _window_sums(_window_sums(x, s, 0), s, 1).ravel()

    def scatter_max(self, v):
        s = self.s
        V = v.reshape(self.grid)
        V = _sliding_max_back(V, s, self.shape[0], 0)
        return _sliding_max_back(V, s, self.shape[1], 1)

    def box(self, j):
        a, b = np.unravel_index(j, self.grid)
        return (int(a), int(b)), (int(a) + self.s, int(b) + self.s)

    def lo_hi(self):
        lo = np.stack([i.ravel() for i in np.indices(self.grid)], axis=1)
        return lo, lo + self.s

    def cell_chunks(self, shape):
        s = self.s
        ids = np.arange(shape[0] * shape[1]).reshape(shape)
        win = sliding_window_view(ids, (s, s))
        yield 0, win.reshape(-1, s * s)


class _RectRows2D(_Group):
    """Rectangles of height s1 (all widths), ordered by (row, width, column)."""

    def __init__(self, shape, s1, table):
        self.shape = shape
        self.s1 = s1
        self.m = shape[0] - s1 + 1
        self.t = table
        self.count = self.m * table.count

    def sums(self, x):
        R = _window_sums(x, self.s1, 0)
        return self.t.sums(R).ravel()

    def scatter_max(self, v):
        Y = self.t.scatter(v.reshape(self.m, self.t.count))
        return _sliding_max_back(Y, self.s1, self.shape[0], 0)

    def box(self, j):
        a, r = divmod(int(j), self.t.count)
        k, b = int(self.t.k[r]), int(self.t.a[r])
        return (a, b), (a + self.s1, b + k + 1)

    def lo_hi(self):
        a = np.repeat(np.arange(self.m), self.t.count)
        b = np.tile(self.t.a, self.m)
        k = np.tile(self.t.k, self.m)
        lo = np.stack([a, b], axis=1)
        return lo, np.stack([a + self.s1, b + k + 1], axis=1)

    def cell_chunks(self, shape):
        n1 = shape[1]
        off = 0
        for a in range(self.m):
            rows = np.arange(a, a + self.s1)
            for L in range(1, n1 + 1):
                starts = np.arange(n1 - L + 1)
                cols = starts[:, None] + np.arange(L)[None, :]
                ids = rows[None, :, None] * n1 + cols[:, None, :]
                yield off, ids.reshape(len(starts), -1)
                off += len(starts)


class _Explicit(_Group):
    def __init__(self, shape, boxes):
        self.shape = shape
        self.boxes = [(tuple(lo), tuple(hi)) for lo, hi in boxes]
        self.count = len(self.boxes)

    def _sl(self, j):
        lo, hi = self.boxes[j]
        return tuple(slice(a, b) for a, b in zip(lo, hi))

    def sums(self, x):
        return np.array([x[self._sl(j)].sum() for j in range(self.count)])

    def scatter_max(self, v):
        out = np.full(self.shape, -np.inf)
        for j in range(self.count):
            sl = self._sl(j)
            out[sl] = np.maximum(out[sl], v[j])
        return out

    def box(self, j):
        return self.boxes[j]

    def lo_hi(self):
        return (np.array([b[0] for b in self.boxes]), np.array([b[1] for b in self.boxes]))

    def cell_chunks(self, shape):
        ids = np.arange(int(np.prod(shape))).reshape(shape)
        for j in range(self.count):
            yield j, ids[self._sl(j)].reshape(1, -1)


class Basis:
    """A finite family of boxes of cells over ``space``."""

    def __init__(self, space: MeasureSpace, kind: str, groups: list):
        self.space = space
        self.kind = kind
        self.groups = groups
        self.offsets = np.cumsum([0] + [g.count for g in groups])
        self._mass = None

    def __len__(self) -> int:
        return int(self.offsets[-1])

    def __repr__(self):
        return f"Basis(kind={self.kind!r}, n={self.space.n}, elements={len(self)})"

    # -- sums and averages -------------------------------------------------
    def sums(self, x) -> list:
        x = values_of(x, self.space).astype(float, copy=False)
        return [g.sums(x) for g in self.groups]

    @property
    def masses(self) -> list:
        if self._mass is None:
            self._mass = self.sums(self.space.mu)
        return self._mass

    def averages(self, f, w=None) -> list:
        """Per-element ``int_B f w dmu / int_B w dmu``; nan where the mass vanishes."""
        fv = values_of(f, self.space)
        mu = self.space.mu
        if w is None:
            num, den = self.sums(fv * mu), self.masses
        else:
            wm = values_of(w, self.space) * mu
            num, den = self.sums(fv * wm), self.sums(wm)
        out = []
        for a, b in zip(num, den):
            with np.errstate(invalid="ignore", divide="ignore"):
                out.append(np.where(b > 0, a / np.where(b > 0, b, 1.0), np.nan))
        return out

    def scatter_max(self, vals: list) -> np.ndarray:
        """Per-cell maximum of element values over the elements containing the cell."""
        out = np.full(self.space.shape, -np.inf)
        for g, v in zip(self.groups, vals):
            v = np.where(np.isnan(v), -np.inf, v)
            np.maximum(out, g.scatter_max(v), out=out)
        return out

    # -- elements ----------------------------------------------------------
    def _locate(self, i: int):
        if not 0 <= i < len(self):
            raise IndexError("element index out of range")
        gi = int(np.searchsorted(self.offsets, i, side="right") - 1)
        return self.groups[gi], i - int(self.offsets[gi])

    def box(self, i: int) -> tuple:
        g, j = self._locate(int(i))
        return g.box(j)

    def element(self, i: int) -> BasisElement:
        lo, hi = self.box(i)
        sl = tuple(slice(a, b) for a, b in zip(lo, hi))
        return BasisElement(lo, hi, float(self.space.mu[sl].sum()))

    def elements(self) -> list:
        return [self.element(i) for i in range(len(self))]

    def containing(self, cell) -> np.ndarray:
        """Global indices of the elements containing ``cell`` (computed on demand)."""
        cell = np.atleast_1d(np.asarray(cell))
        out = []
        for g, off in zip(self.groups, self.offsets):
            lo, hi = g.lo_hi()
            hit = np.all((lo <= cell) & (cell < hi), axis=1)
            out.append(int(off) + np.nonzero(hit)[0])
        return np.concatenate(out)

    def cell_chunks(self, max_work: float = 5e8):
        """Yield (global offset, flat cell-index matrix) over all elements."""
        work = self.total_cells()
        if work > max_work:
            raise BasisCapError(f"per-element work {work:.3g} exceeds cap {max_work:.3g}")
        for g, off in zip(self.groups, self.offsets):
            for o, ids in g.cell_chunks(self.space.shape):
                yield int(off) + o, ids

    def total_cells(self) -> float:
        """Sum of element sizes (cells), i.e. the cost of per-element passes."""
        return float(sum(np.sum(s) for s in self.sums(np.ones(self.space.shape))))

    def argmax(self, vals: list) -> tuple:
        """(max value, global index) over per-group element values, ignoring nan."""
        best, arg = -np.inf, -1
        for off, v in zip(self.offsets, vals):
            if v.size == 0:
                continue
            vv = np.where(np.isnan(v), -np.inf, v)
            j = int(np.argmax(vv))
            if vv[j] > best:
                best, arg = float(vv[j]), int(off) + j
        return best, arg

    def flat(self, vals: list) -> np.ndarray:
        return np.concatenate(vals) if vals else np.empty(0)


def enumerate_basis(space: MeasureSpace, kind: str) -> Basis:
    """Build the basis ``kind`` (dyadic, intervals, cubes, rectangles) over ``space``.

    In one dimension cubes and rectangles coincide with intervals.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown basis kind {kind!r}; expected one of {KINDS}")
    shape = space.shape
    if kind == "dyadic":
        smax = min(shape)
        groups = []
        s = 1
        while s <= smax:
            groups.append(_DyadicLevel(shape, s))
            s *= 2
        return Basis(space, kind, groups)
    if space.dim == 1:
        return Basis(space, kind, [_Intervals1D(shape[0])])
    if kind == "intervals":
        raise ValueError("the intervals basis is one-dimensional; use cubes or rectangles")
    if kind == "cubes":
        groups = [_Cubes2D(shape, s) for s in range(1, min(shape) + 1)]
        return Basis(space, kind, groups)
    n0, n1 = shape
    count = (n0 * (n0 + 1) // 2) * (n1 * (n1 + 1) // 2)
    if count > RECTANGLE_CAP:
        raise BasisCapError(f"rectangle basis has {count} elements, cap is {RECTANGLE_CAP}")
    table = _IntervalTable(n1)
    return Basis(space, kind, [_RectRows2D(shape, s1, table) for s1 in range(1, n0 + 1)])


def custom_basis(space: MeasureSpace, boxes) -> Basis:
    """Basis made of explicit half-open boxes ``[(lo, hi), ...]``; one box is allowed."""
    boxes = list(boxes)
    if not boxes:
        raise ValueError("a basis needs at least one element")
    for lo, hi in boxes:
        if len(lo) != space.dim or any(not (0 <= a < b <= n) for a, b, n in zip(lo, hi, space.shape)):
            raise ValueError(f"invalid box {(lo, hi)}")
    return Basis(space, "custom", [_Explicit(space.shape, boxes)])


def average(f, element: BasisElement, space: MeasureSpace, w=None) -> float:
    """``int_B f w dmu / int_B w dmu`` for a single element."""
    fv = values_of(f, space)
    sl = element.cells
    mu = space.mu[sl]
    if w is None:
        den = mu.sum()
        num = (fv[sl] * mu).sum()
    else:
        wm = values_of(w, space)[sl] * mu
        den = wm.sum()
        num = (fv[sl] * wm).sum()
    if den <= 0:
        raise ValueError("element has zero mass")
    return float(num / den)
