"""End-to-end checks of the extrapolation inequalities on operator-generated pairs.

A pair family supplies (f, g) = (|T phi|, |phi|) for a deterministic battery
of inputs phi.  The weighted L^{p0} hypothesis is calibrated on a fixed
weight battery into a nondecreasing table Psi, the bound constant is read
off the table, and the conclusion is evaluated pair by pair.
"""
from __future__ import annotations

import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import operators as ops
from .basis import Basis
from .core import MeasureSpace, values_of
from .maximal import maximal_values
from .muckenhoupt import a1_constant, ap_constant, conj, make_power_weight, make_random_a1ish, rh_constant
from .rdf import (N_CAP, RdfConfig, build_a1_weight, build_ap_weight, build_limited_range_weight,
                  build_modular_weight, estimate_maximal_norm, estimate_modular_constant)
from .spaces import SpaceSpec, boyd_indices, holder_factor, lp, norm
from .young import YoungFunction, modular

BATTERY_VERSION = "wfx-battery/1"
N_POWER, N_RDF, N_RANDOM = 12, 8, 8
BISECTION_TOL = 1e-12

PASS, FAIL, INCONCLUSIVE = "PASS", "FAIL", "INCONCLUSIVE"


class FamilyError(ValueError):
    """A pair family produced unusable pairs (infinite or undefined ratios)."""


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("WFX_THREADS", "1")))
    except ValueError:
        return 1


def _pmap(fn, items):
    items = list(items)
    k = _threads()
    if k == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=k) as ex:
        return list(ex.map(fn, items))


# ---------------------------------------------------------------------------
# inputs and pair families


def input_battery(space: MeasureSpace, seed: int = 0, count: int = 16, mean_zero: bool = False,
                  radius: tuple | None = None) -> list:
    """Indicators, smooth bumps, seeded random data and oscillatory bumps,
    all supported away from the grid edge.

    ``radius`` is the (min, max) support radius in length units (default
    2% to 12% of the grid length).  ``mean_zero`` removes the mu-integral of
    each input with a disjoint compensating block placed at the nearest
    offset that carries mass; inputs without such a block are dropped.
    """
    rng = np.random.default_rng(seed)
    L = space.n[0] * space.h
    rmin, rmax = (0.02 * L, 0.12 * L) if radius is None else radius
    grids = np.meshgrid(*[space.centers(i) for i in range(space.dim)], indexing="ij")
    mu = space.mu
    out = []
    kinds = ("indicator", "bump", "random", "oscillatory")
    for i in range(count):
        kind = kinds[i % 4]
        c = [rng.uniform(0.3, 0.7) * space.n[a] * space.h for a in range(space.dim)]
        r = rng.uniform(rmin, rmax)
        d2 = sum((g - ci) ** 2 for g, ci in zip(grids, c))
        if kind == "indicator":
            x = (d2 < r * r).astype(float)
        elif kind == "bump":
            x = np.clip(1.0 - d2 / (r * r), 0.0, None) ** 2
        elif kind == "random":
            x = rng.exponential(size=space.shape) * (d2 < (2 * r) ** 2) * (rng.random(space.shape) < 0.5)
        else:
            x = np.exp(-d2 / (r * r)) * np.cos(grids[0] * rng.uniform(2.0, 8.0) * np.pi / r)
        if mean_zero:
            x = _compensate(x, grids, c, r, mu)
            if x is None:
                continue
        if not np.any(np.abs(x) * mu > 0):
            continue
        out.append(x)
    return out


def _compensate(x, grids, c, r, mu):
    m = float(np.sum(x * mu))
    for k in range(2, 9):
        for sgn in (1.0, -1.0):
            shift = [c[0] + sgn * k * r] + list(c[1:])
            comp = (sum((g - si) ** 2 for g, si in zip(grids, shift)) < r * r).astype(float)
            if np.any(comp * (x != 0)):
                continue
            cm = float(np.sum(comp * mu))
            if cm > 0:
                return x - comp * (m / cm)
    return None


@dataclass
class PairFamily:
    """Extrapolation pairs (f, g), both nonnegative, with their generating inputs."""

    tag: str
    space: MeasureSpace
    pairs: list
    params: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.pairs)

    def scaled(self, c: float) -> "PairFamily":
        return PairFamily(self.tag, self.space, [(c * f, c * g) for f, g in self.pairs], dict(self.params))

    def powered(self, p: float) -> "PairFamily":
        return PairFamily(f"{self.tag}^{p}", self.space, [(f ** p, g ** p) for f, g in self.pairs],
                          dict(self.params, power=p))

    def batches(self, size: int = 8) -> list:
        return [self.pairs[i:i + size] for i in range(0, len(self.pairs) - size + 1, size)] or [self.pairs]


FAMILY_TAGS = ("hilbert", "maximal-pair", "commutator", "calderon", "sqfn", "poisson", "ainf",
               "identity", "custom")


def make_family(tag: str, basis: Basis, seed: int = 0, count: int = 16, **params) -> PairFamily:
    """Build a pair family on ``basis.space``.

    ``hilbert``: (|H phi|, |phi|); ``maximal-pair``: (M phi, |phi|);
    ``commutator``: (|C_b^k phi|, |phi|) with ``b`` (default log|x - c|) and ``k``;
    ``calderon``: (|C_F^1 phi|, |phi|) with a Lipschitz profile ``F``;
    ``sqfn``: (g_{t0} phi, |phi|) on inputs with vanishing integral;
    ``poisson``: (N_kappa u, |phi|); ``ainf``: (|H phi|, M phi);
    ``identity``: (|phi|, |phi|); ``custom``: ``pairs=[(f, g), ...]``.
    """
    space = basis.space
    if tag == "custom":
        pairs = [(np.abs(np.asarray(values_of(f, space), dtype=float)),
                  np.abs(np.asarray(values_of(g, space), dtype=float))) for f, g in params.pop("pairs")]
        return PairFamily(tag, space, pairs, params)
    if tag not in FAMILY_TAGS:
        raise ValueError(f"unknown family {tag!r}")
    if tag == "sqfn":
        params.setdefault("radius", (2 * space.h, 8 * space.h))
        phis = input_battery(space, seed, count, mean_zero=True, radius=tuple(params["radius"]))
    else:
        phis = input_battery(space, seed, count)
    x = space.centers()
    if tag == "identity":
        pairs = [(np.abs(p), np.abs(p)) for p in phis]
    elif tag == "maximal-pair":
        pairs = [(maximal_values(p, basis), np.abs(p)) for p in phis]
    elif tag == "hilbert":
        pairs = [(np.abs(ops.hilbert(p, space).values), np.abs(p)) for p in phis]
    elif tag == "ainf":
        pairs = [(np.abs(ops.hilbert(p, space).values), maximal_values(p, basis)) for p in phis]
    elif tag == "commutator":
        k = int(params.setdefault("k", 1))
        b = params.get("b")
        if b is None:
            c = 0.37 * space.n[0] * space.h
            b = np.log(np.abs(x - c))
        b = np.asarray(b, dtype=float)
        pairs = [(np.abs(ops.commutator("hilbert", b, k, p, space).values), np.abs(p)) for p in phis]
    elif tag == "calderon":
        F = params.get("F")
        if F is None:
            c = 0.5 * space.n[0] * space.h
            F = np.abs(x - c)
        F = np.asarray(F, dtype=float)
        pairs = [(np.abs(ops.calderon_commutator(F, p, space).first.values), np.abs(p)) for p in phis]
    elif tag == "sqfn":
        t0 = float(params.setdefault("t0", 0.05))
        m = float(params.setdefault("m", 1.0))
        pairs = [(ops.square_function(p, space, t0, m).values, np.abs(p)) for p in phis]
    else:  # poisson
        kappa = float(params.setdefault("kappa", 1.0))
        cone = ops.ConeSpec(kappa)
        pairs = [(ops.nontangential_maximal(ops.poisson_extend(p, cone.levels(space), space), cone).values,
                  np.abs(p)) for p in phis]
    return PairFamily(tag, space, pairs, params)


# ---------------------------------------------------------------------------
# Psi tables


@dataclass
class PsiTable:
    """Nondecreasing table: Psi(a) = max(1, largest ratio observed at class constant <= a)."""

    a: np.ndarray
    psi: np.ndarray

    @classmethod
    def fit(cls, consts, ratios) -> "PsiTable":
        consts = np.asarray(consts, dtype=float)
        ratios = np.asarray(ratios, dtype=float)
        if not np.all(np.isfinite(ratios)) or not np.all(np.isfinite(consts)):
            raise FamilyError("pair family produced an infinite or undefined ratio")
        order = np.argsort(consts, kind="stable")
        a = consts[order]
        psi = np.maximum.accumulate(np.maximum(ratios[order], 1.0))
        return cls(a, psi)

    def __call__(self, x: float) -> float:
        k = int(np.searchsorted(self.a, x, side="right")) - 1
        return 1.0 if k < 0 else float(self.psi[k])

    def extrapolated(self, x: float) -> bool:
        return bool(self.a.size == 0 or x > self.a[-1])

    def to_dict(self) -> dict:
        return {"a": self.a.tolist(), "psi": self.psi.tolist()}


def _lp_w(f, w, p, space) -> float:
    return float(np.sum(np.abs(f) ** p * w * space.mu) ** (1.0 / p))


def pair_ratio(pairs, w, p, space) -> float:
    """max over pairs of ||f||_{L^p(w)} / ||g||_{L^p(w)} (pairs with g = 0 must have f = 0)."""
    best = 0.0
    for f, g in pairs:
        nf, ng = _lp_w(f, w, p, space), _lp_w(g, w, p, space)
        if ng == 0:
            if nf > 0:
                return np.inf
            continue
        best = max(best, nf / ng)
    return best


@dataclass
class WeightBattery:
    """Named weights with their class constant."""

    names: list
    weights: list
    constants: list
    kind: str
    version: str = BATTERY_VERSION

    def __len__(self):
        return len(self.weights)

    def to_dict(self) -> dict:
        return {"version": self.version, "kind": self.kind, "names": self.names,
                "constants": [float(c) for c in self.constants]}


def _class_constant(kind: str, basis: Basis, p: float, extra=None):
    if kind == "A1":
        return lambda w: a1_constant(w, basis).value
    if kind == "Ap":
        return lambda w: ap_constant(w, basis, p).value
    if kind == "JN":
        a2, tau = extra
        return lambda w: ap_constant(w ** a2, basis, tau).value
    raise ValueError(kind)


def power_exponents(lo: float, hi: float, k: int = 6) -> np.ndarray:
    """k exponents strictly inside (lo, hi), including 0 when it lies inside."""
    e = np.linspace(lo, hi, k + 2)[1:-1]
    if lo < 0 < hi and not np.any(e == 0):
        e[int(np.argmin(np.abs(e)))] = 0.0
    return e


def weight_battery(basis: Basis, p0: float, family: PairFamily | None = None, spec: SpaceSpec | None = None,
                   seed: int = 0, kind: str | None = None, rdf_builder=None, exponent_range=None,
                   cfg: RdfConfig | None = None, extra=None) -> WeightBattery:
    """The versioned 28-weight battery: 12 power weights, 8 RdF-constructed
    weights (the extremal weights of the construction, built from pairs of
    ``family``) and 8 random products w1 w2^{1-p0} of A_1-type weights.

    ``kind`` selects the class constant: ``Ap`` (default for p0 > 1), ``A1``
    (p0 = 1) or ``JN`` (the combined constant [w^a2]_{A_tau} of the limited range).
    """
    space = basis.space
    kind = kind or ("A1" if p0 == 1 else "Ap")
    L = space.n[0] * space.h
    if exponent_range is None:
        exponent_range = (-1.0 * space.dim, 0.0) if kind == "A1" else (-1.0 * space.dim, space.dim * (p0 - 1))
    names, ws = [], []
    for c in (0.0, 0.3719 * L):
        for a in power_exponents(*exponent_range, k=N_POWER // 2):
            names.append(f"power(a={a:.4g},c={c:.4g})")
            ws.append(make_power_weight(space, float(a), [c] * space.dim).values)
    if family is not None and N_RDF:
        build = rdf_builder or _default_rdf_builder(basis, p0, spec, cfg)
        pairs = family.pairs
        for j in range(N_RDF):
            f, g = pairs[j % len(pairs)]
            w = build(f, g)
            names.append(f"rdf({family.tag}#{j % len(pairs)})")
            ws.append(w)
    for j in range(N_RANDOM):
        w1 = make_random_a1ish(space, seed * 1000 + 2 * j, basis).values
        if kind == "A1" or p0 == 1:
            w = w1
        else:
            w2 = make_random_a1ish(space, seed * 1000 + 2 * j + 1, basis).values
            w = w1 * w2 ** (1.0 - p0) if kind == "Ap" else w1 ** 0.5
        names.append(f"random-product(seed={seed * 1000 + 2 * j})")
        ws.append(w)
    const = _class_constant(kind, basis, p0, extra)
    constants = _pmap(const, ws)
    return WeightBattery(names, ws, constants, kind)


def _default_rdf_builder(basis, p0, spec, cfg):
    space = basis.space
    target = spec if spec is not None and spec.is_banach() else lp(space, max(p0, 1.0))
    cfg = cfg or RdfConfig()
    if cfg.N2 is None or (p0 > 1 and cfg.N1 is None):
        N1 = estimate_maximal_norm(target, basis, "primal", cfg.trials, cfg.seed, depth=cfg.depth).value
        N2 = estimate_maximal_norm(target, basis, "dual", cfg.trials, cfg.seed, depth=cfg.depth).value
        cfg = RdfConfig(K=cfg.K, N1=N1, N2=N2, trials=cfg.trials, depth=cfg.depth, seed=cfg.seed)

    def build(f, g):
        if p0 == 1:
            return build_a1_weight(f, g, target, basis, cfg)[0].values
        return build_ap_weight(f, g, target, basis, p0, cfg)[0].values
    return build


def calibrate_psi(family: PairFamily, basis: Basis, p0: float, battery: WeightBattery) -> PsiTable:
    """Isotonic majorant of the observed ratio ||f||_{L^{p0}(w)}/||g||_{L^{p0}(w)}
    against the class constant of each battery weight."""
    space = basis.space
    ratios = _pmap(lambda w: pair_ratio(family.pairs, w, p0, space), battery.weights)
    return PsiTable.fit(battery.constants, ratios)


# ---------------------------------------------------------------------------
# reports


@dataclass
class ExtrapolationReport:
    mode: str
    family: str
    p0: float
    ratios: list
    psi: PsiTable
    psi_argument: float
    psi_value: float
    bound_constant: float
    tolerance: dict
    verdict: str
    worst: dict
    hypotheses: dict = field(default_factory=dict)
    vector: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "mode": self.mode, "family": self.family, "p0": self.p0,
            "verdict": self.verdict, "bound_constant": self.bound_constant,
            "psi_argument": self.psi_argument, "psi_value": self.psi_value,
            "psi_extrapolated": self.psi.extrapolated(self.psi_argument) if self.psi is not None else None,
            "psi_table": self.psi.to_dict() if self.psi is not None else None,
            "tolerance": self.tolerance, "worst": self.worst, "hypotheses": self.hypotheses,
            "ratios": [float(r) for r in self.ratios], "vector": self.vector, "extra": self.extra,
        }

    def rows(self) -> list:
        """CSV rows: one per pair."""
        C = self.bound_constant
        return [{"index": i, "ratio": float(r), "constant": C, "ok": bool(r <= C * self.tolerance["factor"])}
                for i, r in enumerate(self.ratios)]


def _tolerance(cfg: RdfConfig, assoc: float = 1.0) -> dict:
    trunc = cfg.tol_K
    return {"truncation": trunc, "bisection": BISECTION_TOL, "associate": assoc,
            "factor": assoc * (1.0 + trunc + BISECTION_TOL)}


def _hyp_ok(*Ns) -> bool:
    return all(np.isfinite(N) and N <= N_CAP for N in Ns)


def _inconclusive(mode, family, p0, hyp, cfg) -> ExtrapolationReport:
    return ExtrapolationReport(mode, family.tag, p0, [], None, float("nan"), float("nan"), float("nan"),
                               _tolerance(cfg), INCONCLUSIVE, {}, hyp)


def _norm_ratio(f, g, spec) -> float:
    ng = norm(g, spec)
    nf = norm(f, spec)
    if ng == 0:
        return 0.0 if nf == 0 else np.inf
    return nf / ng


def _evaluate(ratios, C, tol) -> tuple:
    ratios = np.asarray(ratios, dtype=float)
    ok = bool(np.all(ratios <= C * tol["factor"]))
    i = int(np.argmax(ratios)) if ratios.size else -1
    worst = {"index": i, "ratio": float(ratios[i]) if i >= 0 else None,
             "slack": float(C / ratios[i]) if i >= 0 and ratios[i] > 0 else None}
    return ok, worst


def _maximal_hypotheses(spec, basis, cfg, need_primal=True) -> dict:
    hyp = {}
    for key, mode, given, need in (("N1", "primal", cfg.N1, need_primal), ("N2", "dual", cfg.N2, True)):
        if not need:
            continue
        if given is not None:
            hyp[key], hyp[key + "_source"] = float(given), "given"
        else:
            e = estimate_maximal_norm(spec, basis, mode, cfg.trials, cfg.seed, depth=cfg.depth)
            hyp[key], hyp[key + "_source"] = e.value, e._asdict()
    return hyp


def _bfs_core(family, spec, basis, p0, cfg, hyp, battery=None, mode="bfs"):
    """Calibrate at p0 and evaluate the scalar conclusion for every pair."""
    N1, N2 = hyp.get("N1", 1.0), hyp["N2"]
    if p0 > 1:
        arg = 2.0 ** p0 * N1 ** (p0 - 1) * N2
        pre = 2.0 ** (3 + 2 / conj(p0))
    else:
        arg, pre = 2.0 * N2, 8.0
    if battery is None:
        bcfg = RdfConfig(K=cfg.K, N1=hyp.get("N1") if p0 > 1 else None, N2=N2, trials=cfg.trials,
                         depth=cfg.depth, seed=cfg.seed)
        battery = weight_battery(basis, p0, family, spec if spec.is_banach() else None, cfg.seed, cfg=bcfg)
    psi = calibrate_psi(family, basis, p0, battery)
    C0 = pre * psi(arg)
    return psi, arg, C0, battery


def verify_bfs_extrapolation(family: PairFamily, spec: SpaceSpec, basis: Basis, p0: float,
                             cfg: RdfConfig | None = None, batch: int = 8) -> ExtrapolationReport:
    """||f u||_{X_v} <= C0 ||g u||_{X_v} with C0 = 2^{3+2/p0'} Psi(2^{p0} N1^{p0-1} N2)
    (p0 > 1) or 8 Psi(2 N2) (p0 = 1), plus the l^{p0}-valued version on
    batches of ``batch`` pairs."""
    cfg = cfg or RdfConfig()
    hyp = _maximal_hypotheses(spec, basis, cfg, need_primal=p0 > 1)
    if not _hyp_ok(*(hyp[k] for k in ("N1", "N2") if k in hyp)):
        return _inconclusive("bfs", family, p0, hyp, cfg)
    psi, arg, C0, battery = _bfs_core(family, spec, basis, p0, cfg, hyp)
    tol = _tolerance(cfg, holder_factor(spec))
    ratios = [_norm_ratio(f, g, spec) for f, g in family.pairs]
    ok, worst = _evaluate(ratios, C0, tol)
    vec = []
    for B in family.batches(batch):
        F = sum(f ** p0 for f, _ in B) ** (1 / p0)
        G = sum(g ** p0 for _, g in B) ** (1 / p0)
        vec.append(_norm_ratio(F, G, spec))
    vok, vworst = _evaluate(vec, C0, tol)
    verdict = PASS if ok and vok else FAIL
    return ExtrapolationReport("bfs", family.tag, p0, ratios, psi, arg, psi(arg), C0, tol, verdict, worst,
                               hyp, {"q": p0, "ratios": vec, "worst": vworst, "ok": vok},
                               {"spec": spec.to_dict(), "battery": battery.to_dict()})


def verify_vector_valued(family: PairFamily, spec: SpaceSpec, basis: Basis, p0: float, q: float,
                         cfg: RdfConfig | None = None, batch: int = 8) -> ExtrapolationReport:
    """l^q-valued conclusion.  q = p0 is the direct route; otherwise Psi is
    recalibrated at q (the scalar L^q(w) bound sums to the l^q-valued one)
    and the aggregated pairs are extrapolated from q.  Results for q != p0
    rely on the grid basis behaving as a Muckenhoupt basis and are labelled
    conditional."""
    cfg = cfg or RdfConfig()
    if q == p0:
        rep = verify_bfs_extrapolation(family, spec, basis, p0, cfg, batch)
        rep.extra["route"] = "direct"
        return rep
    agg = []
    for B in family.batches(batch):
        agg.append((sum(f ** q for f, _ in B) ** (1 / q), sum(g ** q for _, g in B) ** (1 / q)))
    hyp = _maximal_hypotheses(spec, basis, cfg, need_primal=q > 1)
    if not _hyp_ok(*(hyp[k] for k in ("N1", "N2") if k in hyp)):
        return _inconclusive("vector", family, q, hyp, cfg)
    psi, arg, C0, battery = _bfs_core(family, spec, basis, q, cfg, hyp)
    tol = _tolerance(cfg, holder_factor(spec))
    ratios = [_norm_ratio(F, G, spec) for F, G in agg]
    ok, worst = _evaluate(ratios, C0, tol)
    return ExtrapolationReport("vector", family.tag, p0, ratios, psi, arg, psi(arg), C0, tol,
                               PASS if ok else FAIL, worst, hyp, {"q": q, "batches": len(agg)},
                               {"route": "recalibrated", "conditional": "Muckenhoupt-basis clause",
                                "spec": spec.to_dict()})


def _a1_battery(family, basis, spec, cfg, N2, seed):
    target = spec if spec.is_banach() else lp(basis.space, 1.0)
    bcfg = RdfConfig(K=cfg.K, N2=N2, trials=cfg.trials, depth=cfg.depth, seed=cfg.seed)
    return weight_battery(basis, 1.0, family, target, seed, kind="A1",
                          rdf_builder=lambda f, g: build_a1_weight(f, g, target, basis, bcfg)[0].values)


def verify_ainf_extrapolation(family: PairFamily, spec: SpaceSpec, basis: Basis, p: float,
                              cfg: RdfConfig | None = None, q: float = 2.0,
                              batch: int = 8) -> ExtrapolationReport:
    """||f^p u||_{X_v} <= C ||g^p u||_{X_v} with C = 8 Psi_p(2N).

    Psi_p is calibrated on the pairs (f^p, g^p) in L^1(w) over A_1 weights,
    N is the dual maximal constant.  For p < 1 the norms go through the
    power scale X^p.  The l^q-valued version aggregates batches first.
    """
    cfg = cfg or RdfConfig()
    hyp = _maximal_hypotheses(spec, basis, cfg, need_primal=False)
    if not _hyp_ok(hyp["N2"]):
        return _inconclusive("ainf", family, p, hyp, cfg)
    N = hyp["N2"]
    fam_p = family.powered(p)
    battery = _a1_battery(family, basis, spec, cfg, N, cfg.seed)
    psi = calibrate_psi(fam_p, basis, 1.0, battery)
    C = 8.0 * psi(2.0 * N)
    tol = _tolerance(cfg, holder_factor(spec))
    sp_r = spec.with_(u=spec.uu ** (1.0 / p), r=p)

    def lhs(h):
        # ||h^p u||_X = ||h u^{1/p}||_{X^p}^p
        return norm(h, sp_r) ** p

    ratios = []
    for f, g in family.pairs:
        ng = lhs(g)
        ratios.append(lhs(f) / ng if ng > 0 else (0.0 if lhs(f) == 0 else np.inf))
    ok, worst = _evaluate(ratios, C, tol)
    agg = [(sum(f ** q for f, _ in B) ** (1 / q), sum(g ** q for _, g in B) ** (1 / q))
           for B in family.batches(batch)]
    agg_fam = PairFamily(family.tag + f"-l{q}", family.space, agg)
    psi_v = calibrate_psi(agg_fam.powered(p), basis, 1.0, battery)
    Cv = 8.0 * psi_v(2.0 * N)
    vratios = [lhs(F) / lhs(G) for F, G in agg]
    vok, vworst = _evaluate(vratios, Cv, tol)
    direct = [abs(lhs(f) - norm(f ** p, spec)) / max(norm(f ** p, spec), 1e-300) for f, _ in family.pairs[:3]]
    return ExtrapolationReport("ainf", family.tag, p, ratios, psi, 2.0 * N, psi(2.0 * N), C, tol,
                               PASS if ok and vok else FAIL, worst, hyp,
                               {"q": q, "ratios": vratios, "constant": Cv, "worst": vworst, "ok": vok},
                               {"power_scale_consistency": max(direct) if direct else 0.0,
                                "battery": battery.to_dict(), "spec": spec.to_dict()})


def _modular_constant(phi: YoungFunction, C0: float) -> tuple:
    CPhi = phi.delta2_constant()
    if not np.isfinite(CPhi):
        raise ValueError("modular extrapolation needs a Delta_2 Young function")
    I = phi.dilation_indices()[1]
    return CPhi * max(C0, C0 ** (2.0 * I)), CPhi, I


def _rho(phi, h, u, v, space):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return modular(h * u, phi, v, space)


def verify_modular_extrapolation(family: PairFamily, phi: YoungFunction, basis: Basis, p0: float,
                                 u=None, v=None, cfg: RdfConfig | None = None,
                                 batch: int = 8) -> ExtrapolationReport:
    """rho_v^Phi(f u) <= C1 rho_v^Phi(g u), C1 = C_Phi max{C0, C0^{2 I_Phi}} with
    C0 = 2^{3+2/p0'} Psi(2^{p0} N1^{p0-1} N2) (8 Psi(2 N2) for p0 = 1); N1, N2
    are the modular constants of M and M' estimated on a battery."""
    cfg = cfg or RdfConfig()
    space = basis.space
    uu = np.ones(space.shape) if u is None else np.asarray(values_of(u, space), dtype=float)
    vv = np.ones(space.shape) if v is None else np.asarray(values_of(v, space), dtype=float)
    if not np.isfinite(phi.delta2_constant()):
        raise ValueError("modular extrapolation needs a Delta_2 Young function")
    hyp = {}
    if p0 > 1:
        hyp["N1"] = cfg.N1 or estimate_modular_constant(phi, basis, uu, vv, "primal", seed=cfg.seed).value
    hyp["N2"] = cfg.N2 or estimate_modular_constant(phi, basis, uu, vv, "dual", seed=cfg.seed).value
    if not _hyp_ok(*hyp.values()):
        return _inconclusive("modular", family, p0, hyp, cfg)
    N1, N2 = hyp.get("N1", 1.0), hyp["N2"]
    if p0 > 1:
        arg, pre = 2.0 ** p0 * N1 ** (p0 - 1) * N2, 2.0 ** (3 + 2 / conj(p0))
    else:
        arg, pre = 2.0 * N2, 8.0
    bcfg = RdfConfig(K=cfg.K, N1=hyp.get("N1"), N2=N2, trials=cfg.trials, depth=cfg.depth, seed=cfg.seed)

    def build(f, g):
        return build_modular_weight(f, g, phi, basis, p0, 1.0, uu, vv, bcfg)[0].values

    battery = weight_battery(basis, p0, family, None, cfg.seed, rdf_builder=build)
    psi = calibrate_psi(family, basis, p0, battery)
    C0 = pre * psi(arg)
    C1, CPhi, I = _modular_constant(phi, C0)
    tol = _tolerance(cfg)
    ratios = []
    for f, g in family.pairs:
        rg = _rho(phi, g, uu, vv, space)
        rf = _rho(phi, f, uu, vv, space)
        ratios.append(rf / rg if rg > 0 else (0.0 if rf == 0 else np.inf))
    ok, worst = _evaluate(ratios, C1, tol)
    vec = []
    for B in family.batches(batch):
        F = sum(f ** p0 for f, _ in B) ** (1 / p0)
        G = sum(g ** p0 for _, g in B) ** (1 / p0)
        vec.append(_rho(phi, F, uu, vv, space) / _rho(phi, G, uu, vv, space))
    vok, vworst = _evaluate(vec, C1, tol)
    return ExtrapolationReport("modular", family.tag, p0, ratios, psi, arg, psi(arg), C1, tol,
                               PASS if ok and vok else FAIL, worst, hyp,
                               {"ratios": vec, "worst": vworst, "ok": vok},
                               {"C0": C0, "C_Phi": CPhi, "I_Phi": I, "phi": phi.to_dict(),
                                "battery": battery.to_dict()})


def verify_modular_ainf(family: PairFamily, phi: YoungFunction, basis: Basis, p: float, u=None, v=None,
                        cfg: RdfConfig | None = None) -> ExtrapolationReport:
    """rho(f^p u) <= C1 rho(g^p u) with C1 = C_Phi max{C0, C0^{2 I_Phi}}, C0 = 8 Psi_p(2N),
    Psi_p calibrated on (f^p, g^p) in L^1(w) over A_1 weights and N the dual
    modular constant."""
    cfg = cfg or RdfConfig()
    space = basis.space
    uu = np.ones(space.shape) if u is None else np.asarray(values_of(u, space), dtype=float)
    vv = np.ones(space.shape) if v is None else np.asarray(values_of(v, space), dtype=float)
    if not np.isfinite(phi.delta2_constant()):
        raise ValueError("modular extrapolation needs a Delta_2 Young function")
    N = cfg.N2 or estimate_modular_constant(phi, basis, uu, vv, "dual", seed=cfg.seed).value
    hyp = {"N2": N}
    if not _hyp_ok(N):
        return _inconclusive("modular-ainf", family, p, hyp, cfg)
    battery = weight_battery(basis, 1.0, family, None, cfg.seed, kind="A1",
                             rdf_builder=lambda f, g: build_a1_weight(
                                 f, g, lp(space, 1.0, u=uu, v=vv), basis,
                                 RdfConfig(K=cfg.K, N2=N, seed=cfg.seed))[0].values)
    psi = calibrate_psi(family.powered(p), basis, 1.0, battery)
    C0 = 8.0 * psi(2.0 * N)
    C1, CPhi, I = _modular_constant(phi, C0)
    tol = _tolerance(cfg)
    ratios = []
    for f, g in family.pairs:
        rg = _rho(phi, g ** p, uu, vv, space)
        rf = _rho(phi, f ** p, uu, vv, space)
        ratios.append(rf / rg if rg > 0 else (0.0 if rf == 0 else np.inf))
    ok, worst = _evaluate(ratios, C1, tol)
    return ExtrapolationReport("modular-ainf", family.tag, p, ratios, psi, 2.0 * N, psi(2.0 * N), C1, tol,
                               PASS if ok else FAIL, worst, hyp, {},
                               {"C0": C0, "C_Phi": CPhi, "I_Phi": I, "phi": phi.to_dict()})


def upuq_constants(u, basis: Basis, pX: float, qX: float, pminus: float, pplus: float) -> dict:
    """Constants of u^{r} in A_{r/p_-} and RH_{(p_+/r)'} at r = p_X and r = q_X."""
    out = {}
    uu = np.asarray(values_of(u, basis.space), dtype=float)
    for name, r in (("pX", pX), ("qX", qX)):
        w = uu ** r
        a = r / pminus
        A = a1_constant(w, basis).value if a == 1 else ap_constant(w, basis, a).value
        s = conj(pplus / r) if np.isfinite(pplus) else 1.0
        RH = rh_constant(w, basis, s).value if s > 1 else 1.0
        out[name] = {"r": r, "A": A, "RH": RH, "RH_exponent": s}
    return out


def verify_limited_range(family: PairFamily, X: SpaceSpec, basis: Basis, pminus: float, pplus: float,
                         pstar: float | None = None, cfg: RdfConfig | None = None) -> ExtrapolationReport:
    """||f u||_X <= C ||g u||_X for a rearrangement-invariant X over mu.

    Psi is calibrated at p_* on weights classified by [w^{alpha2}]_{A_tau}
    (the combined A_{p_*/p_-} cap RH_{(p_+/p_*)'} constant); for every pair the
    limited-range weight supplies C = C_f Psi(2^tau N1^{tau-1} N2) C_g.
    """
    cfg = cfg or RdfConfig()
    space = basis.space
    u = X.uu
    pX, qX, _ = boyd_indices(X)
    hyp = {"upuq": upuq_constants(u, basis, pX, qX, pminus, pplus)}
    # exponents and the iteration constants from one probe construction
    f0, g0 = family.pairs[0]
    _, probe = build_limited_range_weight(f0, g0, X, basis, pminus, pplus, pstar, cfg)
    ex = probe["exponents"]
    hyp.update({"N1": probe["N1"], "N2": probe["N2"]})
    if not _hyp_ok(probe["N1"], probe["N2"]):
        return _inconclusive("limited", family, probe["pstar"], hyp, cfg)
    run_cfg = RdfConfig(K=cfg.K, N1=probe["N1"], N2=probe["N2"], trials=cfg.trials, depth=cfg.depth,
                        seed=cfg.seed)
    pst = probe["pstar"]
    a2, tau = ex["alpha2"], ex["tau"]
    s_rh = a2
    lo = -1.0 / s_rh if s_rh > 1 else -1.0
    hi = pst / pminus - 1.0
    battery = weight_battery(
        basis, pst, family, None, cfg.seed, kind="JN", exponent_range=(lo * space.dim, hi * space.dim),
        rdf_builder=lambda f, g: build_limited_range_weight(f, g, X, basis, pminus, pplus, pstar, run_cfg)[0].values,
        extra=(a2, tau))
    psi = calibrate_psi(family, basis, pst, battery)
    arg = probe["paper_bound"]
    tol = _tolerance(cfg)
    ratios, consts, checks = [], [], []
    for f, g in family.pairs:
        _, rep = build_limited_range_weight(f, g, X, basis, pminus, pplus, pstar, run_cfg)
        C = rep["embeddings"]["f"]["constant"] * psi(arg) * rep["embeddings"]["g"]["constant"]
        consts.append(C)
        checks.append(all(rep["checks"].values()))
        ng = norm(g, X)
        ratios.append(norm(f, X) / ng if ng > 0 else 0.0)
    C = float(min(consts))
    ok, worst = _evaluate(ratios, C, tol)
    verdict = PASS if ok and all(checks) else FAIL
    return ExtrapolationReport("limited", family.tag, pst, ratios, psi, arg, psi(arg), C, tol, verdict, worst,
                               hyp, {}, {"exponents": ex, "pminus": pminus, "pplus": pplus,
                                         "construction_checks": all(checks), "spec": X.to_dict(),
                                         "battery": battery.to_dict()})


__all__ = [
    "PairFamily", "make_family", "input_battery", "PsiTable", "WeightBattery", "weight_battery",
    "calibrate_psi", "pair_ratio", "ExtrapolationReport", "verify_bfs_extrapolation",
    "verify_vector_valued", "verify_ainf_extrapolation", "verify_modular_extrapolation",
    "verify_modular_ainf", "verify_limited_range", "upuq_constants", "FamilyError",
    "PASS", "FAIL", "INCONCLUSIVE", "BATTERY_VERSION",
]
