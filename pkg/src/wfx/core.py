"""Finite uniform grids with per-cell masses, grid functions and integration."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np


class SpaceError(ValueError):
    """Inconsistent spaces or malformed space data."""


def _is_pow2(k: int) -> bool:
    return k >= 1 and (k & (k - 1)) == 0


@dataclass(frozen=True, eq=False)
class MeasureSpace:
    """Uniform grid of cells in dimension 1 or 2 with cell masses ``mu``.

    ``mu`` has shape ``n`` and defaults to the cell volume ``h**dim``.
    Individual cells may carry zero mass as long as the total is positive.
    """

    n: tuple
    h: float = 1.0
    mu: np.ndarray = field(default=None)

    def __post_init__(self):
        n = tuple(int(k) for k in np.atleast_1d(self.n))
        if len(n) not in (1, 2):
            raise SpaceError("dim must be 1 or 2")
        if not all(_is_pow2(k) for k in n):
            raise SpaceError(f"cell counts must be powers of two, got {n}")
        if not (np.isfinite(self.h) and self.h > 0):
            raise SpaceError("cell width must be positive")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "h", float(self.h))
        if self.mu is None:
            mu = np.full(n, self.h ** len(n))
        else:
            mu = np.asarray(self.mu, dtype=float).reshape(n)
        if not np.all(np.isfinite(mu)) or np.any(mu < 0):
            raise SpaceError("cell masses must be finite and nonnegative")
        if mu.sum() <= 0:
            raise SpaceError("total mass must be positive")
        mu = mu.copy()
        mu.setflags(write=False)
        object.__setattr__(self, "mu", mu)

    @property
    def dim(self) -> int:
        return len(self.n)

    @property
    def shape(self) -> tuple:
        return self.n

    @property
    def size(self) -> int:
        return int(np.prod(self.n))

    @property
    def total_mass(self) -> float:
        return float(self.mu.sum())

    @property
    def is_lebesgue(self) -> bool:
        return bool(np.all(self.mu == self.h ** self.dim))

    def centers(self, axis: int = 0) -> np.ndarray:
        """Cell centres ``(i + 1/2) h`` along ``axis``."""
        return (np.arange(self.n[axis]) + 0.5) * self.h

    def ones(self) -> "GridFunction":
        return GridFunction(np.ones(self.n), self)

    def same_as(self, other: "MeasureSpace") -> bool:
        return self is other or (
            self.n == other.n and self.h == other.h and np.array_equal(self.mu, other.mu)
        )

    def to_dict(self) -> dict:
        mu = "lebesgue" if self.is_lebesgue else self.mu.ravel().tolist()
        return {"dim": self.dim, "n": list(self.n), "h": self.h, "mu": mu}

    @classmethod
    def from_dict(cls, d: dict) -> "MeasureSpace":
        try:
            n = tuple(d["n"])
            h = float(d.get("h", 1.0))
        except (KeyError, TypeError) as exc:
            raise SpaceError(f"bad space descriptor: {exc}") from None
        if "dim" in d and int(d["dim"]) != len(n):
            raise SpaceError("dim does not match length of n")
        mu = d.get("mu", "lebesgue")
        if isinstance(mu, str):
            if mu != "lebesgue":
                raise SpaceError(f"unknown measure {mu!r}")
            mu = None
        return cls(n, h, mu)


class GridFunction:
    """Per-cell values on a :class:`MeasureSpace` (real or complex)."""

    __array_priority__ = 10

    def __init__(self, values, space: MeasureSpace):
        vals = np.asarray(values)
        if vals.dtype.kind not in "fc":
            vals = vals.astype(float)
        if vals.size != space.size:
            raise SpaceError(f"expected {space.size} values, got {vals.size}")
        vals = vals.reshape(space.shape)
        if not np.all(np.isfinite(vals)):
            raise SpaceError("grid function values must be finite")
        self.values = vals
        self.space = space

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    def __len__(self):
        return self.values.size

    def __repr__(self):
        return f"{type(self).__name__}(shape={self.values.shape})"

    def to_dict(self) -> dict:
        v = self.values.ravel()
        if np.iscomplexobj(v):
            return {"values": v.real.tolist(), "imag": v.imag.tolist()}
        return {"values": v.tolist()}


class Weight(GridFunction):
    """Strictly positive real grid function."""

    def __init__(self, values, space: MeasureSpace):
        super().__init__(values, space)
        if np.iscomplexobj(self.values) or np.any(self.values <= 0):
            raise SpaceError("weights must be real and strictly positive")


def values_of(f, space: MeasureSpace | None = None) -> np.ndarray:
    """Return the value array of ``f`` shaped like ``space`` (no copy when possible)."""
    if isinstance(f, GridFunction):
        if space is not None and not f.space.same_as(space):
            raise SpaceError("grid functions live on different spaces")
        return f.values
    a = np.asarray(f)
    if space is not None:
        if a.ndim == 0:
            return np.full(space.shape, a.item())
        if a.size != space.size:
            raise SpaceError(f"expected {space.size} values, got {a.size}")
        a = a.reshape(space.shape)
    return a


def _weight_values(w, space: MeasureSpace) -> np.ndarray:
    if w is None:
        return 1.0
    return values_of(w, space)


def integrate(f, space: MeasureSpace, w=None) -> float:
    """``sum(f * w * mu)``; the modulus is taken for complex input."""
    fv = values_of(f, space)
    if np.iscomplexobj(fv):
        fv = np.abs(fv)
    return float(np.sum(fv * _weight_values(w, space) * space.mu))


def restrict_mass(E: Iterable, space: MeasureSpace, w=None) -> float:
    """``w``-mass of the cell set ``E`` (flat or multi-indices)."""
    idx = np.asarray(list(E) if not isinstance(E, np.ndarray) else E)
    if idx.size == 0:
        raise SpaceError("empty cell set")
    if idx.ndim == 1:
        if np.any(idx < 0) or np.any(idx >= space.size):
            raise IndexError("cell index out of range")
        flat = idx.astype(int)
    else:
        idx = idx.reshape(-1, space.dim)
        if np.any(idx < 0) or np.any(idx >= np.array(space.shape)):
            raise IndexError("cell index out of range")
        flat = np.ravel_multi_index(idx.T, space.shape)
    wv = np.broadcast_to(_weight_values(w, space), space.shape).ravel()
    return float(np.sum(wv[flat] * space.mu.ravel()[flat]))


def load_json(path: str) -> object:
    with open(path) as fh:
        return json.load(fh)


def grid_function_from_dict(d: dict, space: MeasureSpace, weight: bool = False) -> GridFunction:
    vals = np.asarray(d["values"], dtype=float)
    if "imag" in d:
        vals = vals + 1j * np.asarray(d["imag"], dtype=float)
    return (Weight if weight else GridFunction)(vals, space)
