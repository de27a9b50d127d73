"""Young functions, complementary functions, dilation indices, Delta_2 and modulars.

Every family is evaluated in log space: ``logphi(lt)`` returns ``log Phi(e^lt)``
and ``logdphi(lt)`` returns ``log Phi'(e^lt)``.  This keeps very steep
functions (and their complements for exponents near 1) representable.
"""
from __future__ import annotations

import warnings

import numpy as np

from .core import values_of

INDEX_CAP = 50.0
T_MIN, T_MAX = 1e-8, 1e8
N_KNOTS = 4096
_LB = 800.0  # log-space bisection bracket


class BracketError(RuntimeError):
    """The complementary-function supremum is not attained inside the bracket."""


def _bisect_log(fun, target, lo=-_LB, hi=_LB, iters=120):
    """Vectorised bisection of an increasing function of log t for ``fun(x) = target``."""
    target = np.asarray(target, dtype=float)
    lo = np.full(target.shape, lo, dtype=float)
    hi = np.full(target.shape, hi, dtype=float)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        up = fun(mid) < target
        lo = np.where(up, mid, lo)
        hi = np.where(up, hi, mid)
    return 0.5 * (lo + hi)


class YoungFunction:
    """Base class; subclasses implement ``logphi`` and ``logdphi``."""

    family = "abstract"

    # -- evaluation ------------------------------------------------------
    def logphi(self, lt):
        raise NotImplementedError

    def logdphi(self, lt):
        raise NotImplementedError

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore", over="ignore"):
            out = np.where(t > 0, np.exp(self.logphi(np.log(np.where(t > 0, t, 1.0)))), 0.0)
        return out if out.ndim else float(out)

    def deriv(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore", over="ignore"):
            out = np.where(t > 0, np.exp(self.logdphi(np.log(np.where(t > 0, t, 1.0)))), 0.0)
        return out if out.ndim else float(out)

    def inverse(self, y):
        """Phi^{-1}(y) for y >= 0 (log-space bisection unless overridden)."""
        y = np.asarray(y, dtype=float)
        pos = y > 0
        ly = np.log(np.where(pos, y, 1.0))
        lt = _bisect_log(self.logphi, ly)
        out = np.where(pos, np.exp(lt), 0.0)
        return out if out.ndim else float(out)

    # -- derived objects -------------------------------------------------
    def complementary(self) -> "YoungFunction":
        if getattr(self, "_conj", None) is None:
            self._conj = _legendre(self)
        return self._conj

    def rescale(self, r: float) -> "YoungFunction":
        """Phi_r(t) = Phi(t^r); cached so repeated rescalings share tabulations."""
        cache = self.__dict__.setdefault("_rescaled", {})
        if r not in cache:
            cache[r] = Rescaled(self, r)
        return cache[r]

    def h_phi(self, t):
        """h_Phi(t) = sup_s Phi(s t)/Phi(s), with s and s t restricted to the knot range."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.empty(t.shape)
        for i, ti in enumerate(t):
            out[i] = np.exp(self._log_h(np.log(ti)))
        return out if out.size > 1 else float(out[0])

    def _log_h(self, lt, npts=1601):
        a, b = np.log(T_MIN), np.log(T_MAX)
        lo, hi = max(a, a - lt), min(b, b - lt)
        if lo > hi:
            raise ValueError("dilation outside the tabulated range")
        ls = np.linspace(lo, hi, npts)
        return float(np.max(self.logphi(ls + lt) - self.logphi(ls)))

    def numeric_indices(self) -> tuple:
        """Asymptotic exponents of h_Phi at small and large dilations.

        log h_Phi is fitted by a log t + b log|log t| + c, so log-type
        factors (t^p log(e+t)^alpha and their complements) do not bias the
        exponent a.
        """
        def slope(ts):
            lt = np.log(ts)
            lh = np.array([self._log_h(x) for x in lt])
            if np.polyfit(lt, lh, 1)[0] > INDEX_CAP:
                return np.inf
            A = np.column_stack([lt, np.log(np.abs(lt)), np.ones_like(lt)])
            return float(np.linalg.lstsq(A, lh, rcond=None)[0][0])

        i = slope(np.geomspace(1e-6, 1e-3, 13))
        I = slope(np.geomspace(1e3, 1e6, 13))
        return (i if i <= INDEX_CAP else np.inf, I if I <= INDEX_CAP else np.inf)

    def dilation_indices(self) -> tuple:
        return self.numeric_indices()

    def delta2_constant(self) -> float:
        """sup_t Phi(2t)/Phi(t) on the knot range; inf when Delta_2 fails."""
        lt = np.linspace(np.log(T_MIN), np.log(T_MAX / 2), 8001)
        lr = float(np.max(self.logphi(lt + np.log(2.0)) - self.logphi(lt)))
        if lr / np.log(2.0) > INDEX_CAP or self.dilation_indices()[1] == np.inf:
            return np.inf
        return float(np.exp(lr))

    def is_convex(self, npts: int = 2001) -> bool:
        """Numerical check that Phi' is nondecreasing on the knot range."""
        lt = np.linspace(np.log(T_MIN), np.log(T_MAX), npts)
        d = self.logdphi(lt)
        return bool(np.all(np.diff(d) >= -1e-9))

    def to_dict(self) -> dict:
        raise NotImplementedError

    def __repr__(self):
        return f"YoungFunction({self.to_dict()})"


class Power(YoungFunction):
    family = "power"

    def __init__(self, p: float):
        if not p >= 1:
            raise ValueError("power Young function needs p >= 1")
        self.p = float(p)

    def logphi(self, lt):
        return self.p * np.asarray(lt)

    def logdphi(self, lt):
        return np.log(self.p) + (self.p - 1.0) * np.asarray(lt)

    def inverse(self, y):
        y = np.asarray(y, dtype=float)
        out = np.where(y > 0, np.abs(y) ** (1.0 / self.p), 0.0)
        return out if out.ndim else float(out)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(over="ignore"):
            out = np.abs(t) ** self.p
        return out if out.ndim else float(out)

    def dilation_indices(self):
        return (self.p, self.p)

    def complementary(self):
        if self.p == 1:
            raise BracketError("t has no finite complementary function")
        return super().complementary()

    def to_dict(self):
        return {"family": "power", "p": self.p}


class PLog(YoungFunction):
    """t^p log(e + t)^alpha."""

    family = "plog"

    def __init__(self, p: float, alpha: float = 1.0):
        if not p >= 1:
            raise ValueError("plog needs p >= 1")
        self.p, self.alpha = float(p), float(alpha)

    def logphi(self, lt):
        lt = np.asarray(lt, dtype=float)
        with np.errstate(over="ignore"):
            L = np.logaddexp(1.0, lt)  # log(e + t)
        return self.p * lt + self.alpha * np.log(L)

    def logdphi(self, lt):
        lt = np.asarray(lt, dtype=float)
        L = np.logaddexp(1.0, lt)
        t_over = np.exp(lt - L)  # t / (e + t)
        return self.logphi(lt) - lt + np.log(self.p + self.alpha * t_over / L)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.abs(t) ** self.p * np.log(np.e + np.abs(t)) ** self.alpha
        return out if out.ndim else float(out)

    def dilation_indices(self):
        return (self.p, self.p)

    def to_dict(self):
        return {"family": "plog", "p": self.p, "alpha": self.alpha}


class MinMax(YoungFunction):
    """mode 'max': max(t^p, t^q).  mode 'min': the convex function whose
    derivative is min(t^{p-1}, t^{q-1}), i.e. the convex minorant behaving like
    t^q/q near 0 and t^p/p at infinity (p < q)."""

    family = "minmax"

    def __init__(self, p: float, q: float, mode: str = "max"):
        p, q = sorted((float(p), float(q)))
        if p < 1:
            raise ValueError("minmax needs exponents >= 1")
        if mode not in ("min", "max"):
            raise ValueError("mode must be 'min' or 'max'")
        self.p, self.q, self.mode = p, q, mode

    def logphi(self, lt):
        lt = np.asarray(lt, dtype=float)
        p, q = self.p, self.q
        if self.mode == "max":
            return np.where(lt < 0, p * lt, q * lt)
        with np.errstate(over="ignore", invalid="ignore"):
            small = q * lt - np.log(q)
            big = np.log(1.0 / q - 1.0 / p + np.exp(np.minimum(p * lt, 700.0)) / p)
            big = np.where(p * lt > 700.0, p * lt - np.log(p), big)
        return np.where(lt <= 0, small, big)

    def logdphi(self, lt):
        lt = np.asarray(lt, dtype=float)
        p, q = self.p, self.q
        if self.mode == "max":
            return np.where(lt < 0, np.log(p) + (p - 1) * lt, np.log(q) + (q - 1) * lt)
        return np.where(lt <= 0, (q - 1) * lt, (p - 1) * lt)

    def dilation_indices(self):
        return (self.p, self.q)

    def to_dict(self):
        return {"family": "minmax", "p": self.p, "q": self.q, "mode": self.mode}


class Tabulated(YoungFunction):
    """Log-log linear interpolation through positive knots; end slopes extrapolate."""

    family = "tabulated"

    def __init__(self, t, phi=None, logvals=None, error: float = 0.0, source=None):
        t = np.asarray(t, dtype=float)
        if logvals is None:
            phi = np.asarray(phi, dtype=float)
            if np.any(phi <= 0) or np.any(t <= 0):
                raise ValueError("tabulated knots and values must be positive")
            logvals = np.log(phi)
        lx, ly = np.log(t), np.asarray(logvals, dtype=float)
        order = np.argsort(lx)
        lx, ly = lx[order], ly[order]
        if np.any(np.diff(lx) <= 0) or np.any(np.diff(ly) <= 0):
            raise ValueError("tabulated Young function must be strictly increasing")
        self.lx, self.ly = lx, ly
        self.slopes = np.diff(ly) / np.diff(lx)
        self.error = float(error)
        self.source = source

    def _seg(self, lt):
        return np.clip(np.searchsorted(self.lx, lt, side="right") - 1, 0, len(self.slopes) - 1)

    def logphi(self, lt):
        lt = np.asarray(lt, dtype=float)
        j = self._seg(lt)
        return self.ly[j] + self.slopes[j] * (lt - self.lx[j])

    def logdphi(self, lt):
        lt = np.asarray(lt, dtype=float)
        j = self._seg(lt)
        return np.log(self.slopes[j]) + self.logphi(lt) - lt

    def to_dict(self):
        return {"family": "tabulated", "t": np.exp(self.lx).tolist(), "phi": np.exp(self.ly).tolist()}


class Rescaled(YoungFunction):
    """Phi_r(t) = Phi(t^r)."""

    family = "rescaled"

    def __init__(self, base: YoungFunction, r: float):
        if not r > 0:
            raise ValueError("rescaling exponent must be positive")
        self.base, self.r = base, float(r)

    def logphi(self, lt):
        return self.base.logphi(self.r * np.asarray(lt))

    def logdphi(self, lt):
        lt = np.asarray(lt)
        return np.log(self.r) + (self.r - 1.0) * lt + self.base.logdphi(self.r * lt)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return self.base(np.abs(t) ** self.r)

    def inverse(self, y):
        return np.asarray(self.base.inverse(y)) ** (1.0 / self.r)

    def dilation_indices(self):
        i, I = self.base.dilation_indices()
        return (self.r * i, self.r * I)

    def to_dict(self):
        return {"family": "rescaled", "r": self.r, "base": self.base.to_dict()}


def _legendre(phi: YoungFunction) -> Tabulated:
    """Tabulate Phi-bar(t) = sup_s (s t - Phi(s)) on log-spaced knots.

    The maximiser s* solves Phi'(s*) = t (Phi' is nondecreasing); we locate it
    by bisection in log s and evaluate t s* - Phi(s*) in log form.
    """
    lt = np.linspace(np.log(T_MIN), np.log(T_MAX), N_KNOTS)
    ls = _bisect_log(phi.logdphi, lt)
    with np.errstate(divide="ignore", over="ignore"):
        lval = ls + lt + np.log1p(-np.minimum(np.exp(phi.logphi(ls) - ls - lt), 1.0))
    # knots whose maximiser leaves the bracket are dropped: at the top the
    # supremum is not attained (Phi-bar explodes), at the bottom Phi-bar vanishes
    ok = np.isfinite(lval) & (ls > -_LB + 1.0) & (ls < _LB - 1.0)
    if ok.sum() < 2 or lt[ok][-1] - lt[ok][0] < np.log(100.0):
        raise BracketError("complementary supremum not attained on a usable knot range")
    lt, lval = lt[ok], lval[ok]
    keep = np.concatenate([[True], np.diff(lval) > 0])
    lt, lval = lt[keep], lval[keep]
    # interpolation error estimate at knot midpoints against a direct evaluation
    mid = 0.5 * (lt[:-1] + lt[1:])
    smid = _bisect_log(phi.logdphi, mid)
    with np.errstate(divide="ignore", over="ignore"):
        exact = smid + mid + np.log1p(-np.minimum(np.exp(phi.logphi(smid) - smid - mid), 1.0))
    tab = Tabulated(np.exp(lt), logvals=lval)
    with np.errstate(invalid="ignore"):
        err = np.nanmax(np.abs(np.expm1(tab.logphi(mid) - exact))) if mid.size else 0.0
    tab.error = float(err) if np.isfinite(err) else 0.0
    tab.source = phi
    return tab


def complementary(phi: YoungFunction) -> YoungFunction:
    return phi.complementary()


def h_phi(phi: YoungFunction, t):
    return phi.h_phi(t)


def dilation_indices(phi: YoungFunction) -> tuple:
    return phi.dilation_indices()


def delta2_constant(phi: YoungFunction) -> float:
    return phi.delta2_constant()


def modular(f, phi: YoungFunction, w=None, space=None) -> float:
    """rho_w^Phi(f) = sum Phi(|f|) w mu; +inf (with a warning) on overflow."""
    if space is None:
        space = getattr(f, "space", None)
    fv = np.abs(np.asarray(values_of(f, space)))
    mu = 1.0 if space is None else space.mu
    wv = 1.0 if w is None else np.asarray(values_of(w, space))
    with np.errstate(over="ignore"):
        val = float(np.sum(phi(fv) * wv * mu))
    if not np.isfinite(val):
        warnings.warn("modular overflowed; returning +inf", RuntimeWarning, stacklevel=2)
        return np.inf
    return val


def exp_young(t_max: float = 700.0) -> Tabulated:
    """Tabulated e^t - 1 (a standard non-Delta_2 example)."""
    t = np.geomspace(T_MIN, t_max, 2048)
    return Tabulated(t, np.expm1(t))


def make_young(d: dict) -> YoungFunction:
    """Build a Young function from its JSON descriptor."""
    fam = d.get("family")
    if fam == "power":
        return Power(d["p"])
    if fam == "plog":
        return PLog(d["p"], d.get("alpha", 1.0))
    if fam == "minmax":
        return MinMax(d["p"], d["q"], d.get("mode", "max"))
    if fam == "tabulated":
        return Tabulated(d["t"], d["phi"])
    if fam == "exp":
        return exp_young()
    if fam == "rescaled":
        return Rescaled(make_young(d["base"]), d["r"])
    raise ValueError(f"unknown Young family {fam!r}")
