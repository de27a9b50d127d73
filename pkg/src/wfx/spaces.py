"""Function-space norms ||f u||_{X_v} over (cells, v dmu) for Lebesgue, Lorentz,
Orlicz and variable-exponent families, with rearrangements, associate norms
and the power scale X^r."""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq, minimize_scalar
from scipy.special import logsumexp

from .core import MeasureSpace, values_of
from .muckenhoupt import conj
from .young import YoungFunction, make_young

FAMILIES = ("lp", "lorentz", "orlicz", "varexp")


class SpecError(ValueError):
    """Invalid space parameters."""


@dataclass(frozen=True, eq=False)
class SpaceSpec:
    """Descriptor of ``X_v`` with multiplier ``u`` and power scale ``r``.

    The norm of ``f`` is ``|| |f u|^r ||_X^{1/r}`` taken over the measure
    ``v dmu``.  ``v`` and ``u`` default to 1.  Orlicz specs use the
    Luxemburg norm unless ``amemiya`` is set, in which case the Orlicz norm
    ``inf_k (1 + rho(k f))/k`` is used (the Koethe dual of Luxemburg).
    """

    space: MeasureSpace
    family: str
    p: float | None = None
    q: float | None = None
    phi: YoungFunction | None = None
    pfield: np.ndarray | None = None
    v: np.ndarray | None = None
    u: np.ndarray | None = None
    r: float = 1.0
    amemiya: bool = False

    def __post_init__(self):
        fam = self.family
        if fam not in FAMILIES:
            raise SpecError(f"unknown family {fam!r}")
        for name in ("v", "u"):
            a = getattr(self, name)
            if a is not None:
                a = np.asarray(values_of(a, self.space), dtype=float)
                if np.any(~np.isfinite(a)) or np.any(a <= 0):
                    raise SpecError(f"{name} must be finite and strictly positive")
                object.__setattr__(self, name, a)
        if not self.r > 0:
            raise SpecError("power-scale exponent r must be positive")
        if fam == "lp" and not (self.p is not None and self.p > 0):
            raise SpecError("lp needs p > 0")
        if fam == "lorentz":
            if self.p is None or self.q is None or not (0 < self.p < np.inf and self.q > 0):
                raise SpecError("lorentz needs 0 < p < inf and q > 0")
        if fam == "orlicz" and self.phi is None:
            raise SpecError("orlicz needs a Young function")
        if fam == "varexp":
            if self.pfield is None:
                raise SpecError("varexp needs an exponent field")
            pf = np.asarray(values_of(self.pfield, self.space), dtype=float)
            if np.any(~np.isfinite(pf)) or np.any(pf <= 0):
                raise SpecError("variable exponent must be finite and positive")
            object.__setattr__(self, "pfield", pf)

    # -- convenience ------------------------------------------------------
    @property
    def vv(self) -> np.ndarray:
        return np.ones(self.space.shape) if self.v is None else self.v

    @property
    def uu(self) -> np.ndarray:
        return np.ones(self.space.shape) if self.u is None else self.u

    @property
    def nu(self) -> np.ndarray:
        """Cell masses of the base measure v dmu."""
        return self.vv * self.space.mu

    def with_(self, **kw) -> "SpaceSpec":
        return replace(self, **kw)

    def flatten(self) -> "SpaceSpec":
        """Equivalent spec with r = 1 (exact for all four families)."""
        r = self.r
        if r == 1 or self.amemiya:
            return self
        fam = self.family
        if fam == "lp":
            return replace(self, p=self.p * r, r=1.0)
        if fam == "lorentz":
            return replace(self, p=self.p * r, q=self.q * r, r=1.0)
        if fam == "orlicz":
            return replace(self, phi=self.phi.rescale(r), r=1.0)
        return replace(self, pfield=self.pfield * r, r=1.0)

    def is_banach(self) -> bool:
        s = self.flatten()
        if s.family == "lp":
            return s.p >= 1
        if s.family == "lorentz":
            return s.p > 1 and 1 <= s.q <= s.p
        if s.family == "varexp":
            return bool(s.pfield.min() >= 1)
        return s.phi.is_convex()

    def to_dict(self) -> dict:
        d = {"family": self.family, "r": self.r}
        if self.family in ("lp", "lorentz"):
            d["p"] = self.p
        if self.family == "lorentz":
            d["q"] = self.q
        if self.family == "orlicz":
            d["phi"] = self.phi.to_dict()
            if self.amemiya:
                d["norm"] = "amemiya"
        if self.family == "varexp":
            d["pfield"] = self.pfield.ravel().tolist()
        return d

    def __repr__(self):
        return f"SpaceSpec({self.to_dict()})"


def spec_from_dict(d: dict, space: MeasureSpace, load=None) -> SpaceSpec:
    """Build a spec from JSON; ``load`` resolves string entries for v, u, pfield."""
    def arr(x):
        if x is None:
            return None
        if isinstance(x, str):
            if load is None:
                raise SpecError(f"cannot resolve {x!r}")
            x = load(x)
        if isinstance(x, dict):
            x = x["values"]
        return np.asarray(x, dtype=float)

    fam = d.get("family")
    phi = make_young(d["phi"]) if "phi" in d else None
    return SpaceSpec(space, fam, p=d.get("p"), q=d.get("q"), phi=phi,
                     pfield=arr(d.get("pfield")), v=arr(d.get("v")), u=arr(d.get("u")),
                     r=float(d.get("r", 1.0)), amemiya=d.get("norm") == "amemiya")


# ---------------------------------------------------------------------------
# rearrangements


@dataclass(frozen=True)
class StepFunction:
    """Right-continuous step function: value ``y[k]`` on ``[x[k], x[k+1])``,
    ``y[-1]`` on ``[x[-1], inf)``."""

    x: np.ndarray
    y: np.ndarray

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        k = np.searchsorted(self.x, t, side="right") - 1
        out = np.where(k >= 0, self.y[np.clip(k, 0, None)], np.nan)
        return out if out.ndim else float(out)

    def equals(self, other: "StepFunction", rtol: float = 0.0) -> bool:
        a, b = self.simplified(), other.simplified()
        return (a.x.shape == b.x.shape and np.allclose(a.x, b.x, rtol=rtol, atol=0)
                and np.allclose(a.y, b.y, rtol=rtol, atol=0))

    def simplified(self) -> "StepFunction":
        keep = np.concatenate([[True], np.diff(self.y) != 0])
        return StepFunction(self.x[keep], self.y[keep])


def _mag_and_mass(f, spec_or_space, v=None):
    if isinstance(spec_or_space, SpaceSpec):
        space = spec_or_space.space
        F = np.abs(values_of(f, space)) * spec_or_space.uu
        nu = spec_or_space.nu
    else:
        space = spec_or_space
        F = np.abs(values_of(f, space))
        nu = space.mu * (1.0 if v is None else values_of(v, space))
    F, nu = F.ravel(), np.broadcast_to(nu, space.shape).ravel()
    if not np.all(np.isfinite(F)):
        raise SpecError("non-finite function values")
    keep = nu > 0
    return F[keep], nu[keep]


def _sorted_steps(F, nu):
    order = np.argsort(-F, kind="stable")
    a, m = F[order], nu[order]
    # merge equal values
    vals, start = np.unique(-a, return_index=True)
    a = -vals
    m = np.add.reduceat(m, start)
    return a, m


def _distribution_from(a, m) -> StepFunction:
    """Distribution of a function taking distinct values ``a`` (descending) on masses ``m``."""
    b, mb = a[::-1], m[::-1]
    S = np.cumsum(mb[::-1])[::-1]          # S[j] = mass of {|f| >= b_j}
    xs, ys = b, np.concatenate([S[1:], [0.0]])
    if xs[0] > 0:
        xs, ys = np.concatenate([[0.0], xs]), np.concatenate([[S[0]], ys])
    return StepFunction(xs, ys)


def distribution(f, space: MeasureSpace, v=None) -> StepFunction:
    """lambda -> nu({|f| > lambda}) for nu = v dmu."""
    return _distribution_from(*_sorted_steps(*_mag_and_mass(f, space, v)))


def rearrangement(f, space: MeasureSpace, v=None) -> StepFunction:
    """Decreasing rearrangement t -> f*(t) with respect to nu = v dmu."""
    a, m = _sorted_steps(*_mag_and_mass(f, space, v))
    xs = np.concatenate([[0.0], np.cumsum(m)])
    ys = np.concatenate([a, [0.0]])
    if a[-1] == 0:
        xs, ys = xs[:-1], ys[:-1]
    return StepFunction(xs, ys)


def distribution_of_step(g: StepFunction) -> StepFunction:
    """Distribution function of a decreasing step function on ([0, inf), dt)."""
    g = g.simplified()
    if g.y[-1] != 0:
        raise ValueError("step function must vanish eventually")
    a = g.y[:-1]
    m = np.diff(g.x)
    if a.size == 0:
        return StepFunction(np.array([0.0]), np.array([0.0]))
    return _distribution_from(a, m)


# ---------------------------------------------------------------------------
# norms


def _luxemburg(logterm, logF, lognu, rtol=1e-13):
    """Solve sum nu * Psi(F/lam) = 1 for lam, Psi given in log form
    ``logterm(logF - loglam)``; returns lam."""
    def g(ll):
        return logsumexp(logterm(logF - ll) + lognu)

    lo = hi = float(logF.max())
    while g(lo) < 0:
        lo -= 2.0
    while g(hi) > 0:
        hi += 2.0
    ll = brentq(g, lo, hi, xtol=1e-15, rtol=rtol / 4, maxiter=500)
    return float(np.exp(ll))


def norm(f, spec: SpaceSpec) -> float:
    """||f u||_{X_v} (with the power scale applied)."""
    s = spec.flatten()
    F, nu = _mag_and_mass(f, s)
    pos = F > 0
    if not np.any(pos):
        return 0.0
    if s.amemiya:
        return _amemiya(s.phi, F[pos] ** s.r, nu[pos]) ** (1.0 / s.r)
    fam = s.family
    if fam == "lp":
        if np.isinf(s.p):
            return float(F.max())
        m = F.max()
        return float(m * np.sum((F / m) ** s.p * nu) ** (1.0 / s.p))
    if fam == "lorentz":
        return _lorentz(F, nu, s.p, s.q)
    logF, lognu = np.log(F[pos]), np.log(nu[pos])
    if fam == "orlicz":
        return _luxemburg(s.phi.logphi, logF, lognu)
    pf = np.broadcast_to(s.pfield, s.space.shape).ravel()[s.nu.ravel() > 0][pos]
    return _luxemburg(lambda lt: pf * lt, logF, lognu)


def _amemiya(phi, F, nu):
    """Orlicz norm inf_k (1 + sum nu Phi(k F)) / k, minimised over log k."""
    logF, lognu = np.log(F), np.log(nu)
    y0 = -np.log(_luxemburg(phi.logphi, logF, lognu))

    def obj(y):
        return np.logaddexp(0.0, logsumexp(phi.logphi(y + logF) + lognu)) - y

    # log(1 + rho(e^y F)) - y is convex in y when log Phi(e^x) is convex
    res = minimize_scalar(obj, bracket=(y0 - 1.0, y0 + 1.0), method="brent", tol=1e-10)
    return float(np.exp(res.fun))


def _lorentz(F, nu, p, q):
    a, m = _sorted_steps(F, nu)
    m = m[a > 0]
    a = a[a > 0]
    T = np.cumsum(m)
    scale = a[0]
    a = a / scale
    if np.isinf(q):
        return float(scale * np.max(a * T ** (1.0 / p)))
    e = q / p
    Tprev = np.concatenate([[0.0], T[:-1]])
    inc = T ** e - Tprev ** e
    return float(scale * (np.sum(a ** q * inc) * p / q) ** (1.0 / q))


# ---------------------------------------------------------------------------
# associate spaces and Boyd indices


def associate_spec(spec: SpaceSpec) -> SpaceSpec:
    """Analytic associate family over the same v with multiplier u^{-1}."""
    s = spec.flatten()
    if not s.is_banach():
        raise SpecError("associate space needs a Banach function space")
    uinv = None if s.u is None else 1.0 / s.u
    if s.family == "lp":
        return replace(s, p=conj(s.p), u=uinv)
    if s.family == "lorentz":
        return replace(s, p=conj(s.p), q=conj(s.q), u=uinv)
    if s.family == "orlicz":
        if s.amemiya:
            raise SpecError("associate of an Orlicz-normed space is not tabulated")
        return replace(s, phi=s.phi.complementary(), u=uinv, amemiya=True)
    return replace(s, pfield=s.pfield / (s.pfield - 1.0), u=uinv)


def holder_factor(spec: SpaceSpec) -> float:
    """Constant c with int |f g| v dmu <= c ||f u||_X ||g u^{-1}||_{X'} for the analytic X'."""
    s = spec.flatten()
    if s.family in ("lp", "lorentz", "orlicz"):
        return 1.0
    pm, pp = float(s.pfield.min()), float(s.pfield.max())
    return 1.0 / pm + 1.0 - 1.0 / pp


def associate_norm(g, spec: SpaceSpec) -> float:
    """||g u^{-1}||_{X'_v} in the analytic associate family.

    For Orlicz spaces this is the Orlicz norm built on the complementary
    function, the exact associate of the Luxemburg norm.  Variable exponents
    use the Luxemburg norm of p', which is only equivalent (see
    :func:`holder_factor`).
    """
    return norm(g, associate_spec(spec))


def boyd_indices(spec: SpaceSpec) -> tuple:
    """(p_X, q_X, rearrangement_invariant) from the analytic table."""
    s = spec.flatten()
    if s.family in ("lp", "lorentz"):
        return (s.p, s.p, True)
    if s.family == "orlicz":
        i, I = s.phi.dilation_indices()
        return (i, I, True)
    return (float(s.pfield.min()), float(s.pfield.max()), False)


def witness(f, spec: SpaceSpec, trials: int = 64, seed: int = 0) -> tuple:
    """Nonnegative h with ||h u^{-1}||_{X'} <= 1 and ||f u|| <= 2 int f h v dmu.

    Returns (h, achieved ratio ||f u|| / int f h v dmu).  lp uses the exact
    maximiser; other families try structured candidates and keep the best.
    """
    s = spec.flatten()
    space = s.space
    F = np.abs(values_of(f, space)) * s.uu
    nf = norm(f, s)
    if nf == 0:
        raise SpecError("witness needs a nonzero function")
    nu = s.nu
    G = F / nf
    cands = []
    if s.family == "lp":
        if np.isinf(s.p):
            c = np.zeros(space.shape)
            c.flat[int(np.argmax(np.where(nu > 0, F, -1)))] = 1.0
            cands.append(c)
        else:
            cands.append(G ** (s.p - 1.0))
    elif s.family == "orlicz":
        # Phi'(f/||f||) is the exact maximiser against the Orlicz norm
        cands.append(s.phi.deriv(G))
    elif s.family == "varexp":
        cands.append(G ** (s.pfield - 1.0))
        cands += [G ** a for a in (0.5, 1.0, 2.0)]
    else:
        cands += [G ** a for a in (s.p - 1.0, 0.5, 1.0, 2.0, s.q - 1.0 if np.isfinite(s.q) else 4.0)]
        # the rearrangement of the extremal for L^{p,q}: (t^{1/p} f*)^{q-1} t^{1/p-1}
        if np.isfinite(s.q):
            order = np.argsort(-(G * (nu > 0)).ravel(), kind="stable")
            T = np.cumsum(nu.ravel()[order])
            x = np.empty(space.size)
            x[order] = (T ** (1.0 / s.p) * G.ravel()[order]) ** (s.q - 1.0) * T ** (1.0 / s.p - 1.0)
            cands.append(x.reshape(space.shape) * (G > 0))
    rng = np.random.default_rng(seed)
    if s.family in ("lp", "orlicz"):
        trials = 0  # the first candidate is the exact maximiser
    for _ in range(max(0, trials - len(cands))):
        cands.append(G ** rng.uniform(0.2, 3.0) * (1.0 + 0.1 * rng.random(space.shape)))
    best, best_ratio = None, np.inf
    u = s.uu
    for c in cands:
        c = np.where(np.isfinite(c), c, 0.0) * (G > 0)
        h = c * u  # so that h u^{-1} = c
        nh = associate_norm(h, s)
        if nh <= 0:
            continue
        h = h / nh
        pair = float(np.sum(F / u * h * nu))
        if pair <= 0:
            continue
        ratio = nf / pair
        if ratio < best_ratio:
            best, best_ratio = h, ratio
    return best, best_ratio


def constant_field(space: MeasureSpace, values, block: int | None = None) -> np.ndarray:
    """Piecewise-constant exponent field repeating ``values`` over equal blocks."""
    values = np.asarray(values, dtype=float)
    n = space.size
    block = block or max(1, n // len(values))
    idx = (np.arange(n) // block) % len(values)
    return values[idx].reshape(space.shape)


def lp(space, p, **kw) -> SpaceSpec:
    return SpaceSpec(space, "lp", p=p, **kw)


def lorentz(space, p, q, **kw) -> SpaceSpec:
    return SpaceSpec(space, "lorentz", p=p, q=q, **kw)


def orlicz(space, phi, **kw) -> SpaceSpec:
    return SpaceSpec(space, "orlicz", phi=phi, **kw)


def varexp(space, pfield, **kw) -> SpaceSpec:
    return SpaceSpec(space, "varexp", pfield=pfield, **kw)


__all__ = [
    "SpaceSpec", "StepFunction", "norm", "associate_norm", "associate_spec", "holder_factor",
    "boyd_indices", "distribution", "distribution_of_step", "rearrangement", "witness", "spec_from_dict",
    "lp", "lorentz", "orlicz", "varexp", "constant_field",
]
