"""Weighted inequalities and extrapolation on discretized measure spaces."""
from __future__ import annotations

from .core import GridFunction, MeasureSpace, SpaceError, Weight
from .basis import enumerate_basis
from .spaces import SpaceSpec, lorentz, lp, norm, orlicz, varexp

__version__ = "0.1.0"

__all__ = ["GridFunction", "MeasureSpace", "SpaceError", "Weight", "enumerate_basis", "SpaceSpec",
           "lorentz", "lp", "norm", "orlicz", "varexp", "__version__"]
