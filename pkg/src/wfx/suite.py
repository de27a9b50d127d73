"""The ``paper-core`` acceptance battery.

Each check returns a :class:`CheckResult` with the measured worst case, the
tolerance it was held to and its wall time against the time budget.
Sizes, seeds and tolerances are fixed here so that reruns are identical.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import harness as H
from . import operators as ops
from . import oracle
from .basis import enumerate_basis
from .core import MeasureSpace
from .muckenhoupt import (a1_constant, ap_constant, apq_constant, bmo_norm, conj, make_power_weight,
                          make_random_a1ish, rh_constant)
from .rdf import (RdfConfig, build_ap_weight, build_a1_weight, build_modular_weight, estimate_maximal_norm,
                  estimate_modular_constant, rdf_majorant)
from .spaces import constant_field, lorentz, lp, norm, orlicz, varexp
from .young import MinMax, PLog, Power, modular

SUITE_VERSION = "paper-core/1"


@dataclass
class CheckResult:
    name: str
    ok: bool
    seconds: float
    budget: float | None
    detail: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.ok and (self.budget is None or self.seconds <= self.budget)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        lim = f" (limit {self.budget:.0f}s)" if self.budget is not None else ""
        extra = "" if self.ok else " [check failed]"
        if self.ok and not self.passed:
            extra = " [over time budget]"
        return f"{tag} {self.name}: {self.seconds:.1f}s{lim}{extra}"

    def to_dict(self) -> dict:
        return {"name": self.name, "ok": self.ok, "passed": self.passed, "seconds": self.seconds,
                "budget": self.budget, "detail": self.detail}


def _timed(name, budget, fn):
    t = time.perf_counter()
    ok, detail = fn()
    return CheckResult(name, bool(ok), time.perf_counter() - t, budget, detail)


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def _space(n, h=None):
    return MeasureSpace((n,), 1.0 / n if h is None else h)


def _random_weight(space, rng):
    """exp of a scaled random walk: a generic weight with moderate A_p constants."""
    steps = rng.normal(size=space.shape) * rng.uniform(0.05, 0.3)
    return np.exp(np.cumsum(steps) - np.mean(np.cumsum(steps)))


# ---------------------------------------------------------------------------
# 1. exact identities


def check_dual_identity(n=256, count=100, seed=0, rtol=1e-10):
    sp = _space(n)
    B = enumerate_basis(sp, "intervals")
    rng = np.random.default_rng(seed)
    worst = 0.0
    for k in range(count):
        w = _random_weight(sp, rng)
        p = (1.5, 2.0, 3.0, 4.0)[k % 4]
        lhs = ap_constant(w ** (1 - conj(p)), B, conj(p)).value
        rhs = ap_constant(w, B, p).value ** (1 / (p - 1))
        worst = max(worst, _rel(lhs, rhs))
    return worst <= rtol, {"worst_rel": worst, "rtol": rtol}


def check_apq_identities(n=256, count=100, seed=1, rtol=1e-10):
    sp = _space(n)
    B = enumerate_basis(sp, "intervals")
    rng = np.random.default_rng(seed)
    worst = 0.0
    for k in range(count):
        w = _random_weight(sp, rng)
        p, q = ((2.0, 3.0), (1.5, 2.0), (3.0, 4.0), (2.0, 2.0))[k % 4]
        pc = conj(p)
        A = apq_constant(w, B, p, q).value
        e1 = _rel(ap_constant(w ** q, B, 1 + q / pc).value, A)
        e2 = _rel(apq_constant(1.0 / w, B, conj(q), pc).value, A ** (pc / q))
        worst = max(worst, e1, e2)
    return worst <= rtol, {"worst_rel": worst, "rtol": rtol}


def check_product_bound(n=256, count=100, seed=2):
    sp = _space(n)
    B = enumerate_basis(sp, "intervals")
    bad, worst = 0, 0.0
    for k in range(count):
        p = (1.5, 2.0, 3.0, 4.0)[k % 4]
        w1 = make_random_a1ish(sp, seed * 10000 + 2 * k, B).values
        w2 = make_random_a1ish(sp, seed * 10000 + 2 * k + 1, B).values
        lhs = ap_constant(w1 * w2 ** (1 - p), B, p).value
        rhs = a1_constant(w1, B).value * a1_constant(w2, B).value ** (p - 1)
        worst = max(worst, lhs / rhs)
        bad += lhs > rhs * (1 + 1e-12)
    return bad == 0, {"violations": bad, "worst_ratio": worst}


# ---------------------------------------------------------------------------
# 2. Rubio de Francia bounds


def rdf_specs(space):
    x = space.centers()
    pf = constant_field(space, [1.5, 2.5, 3.0, 2.0])
    return {
        "lp(2)": lp(space, 2.0),
        "lorentz(2,1)": lorentz(space, 2.0, 1.0),
        "orlicz(t^2 log(e+t))": orlicz(space, PLog(2.0, 1.0)),
        "varexp": varexp(space, pf),
    }


def _positive_battery(space, seed, count):
    rng = np.random.default_rng(seed)
    out = []
    x = space.centers()
    L = space.n[0] * space.h
    for k in range(count):
        kind = k % 3
        if kind == 0:
            h = np.exp(rng.normal(size=space.shape) * 1.5)
        elif kind == 1:
            c, r = rng.uniform(0.2, 0.8) * L, rng.uniform(0.01, 0.1) * L
            h = 1e-3 + (np.abs(x - c) < r)
        else:
            h = np.abs(x - rng.uniform(0, L)) ** rng.uniform(-0.6, 0.6) + 1e-6
        out.append(h)
    return out


def check_rdf_bounds(n=256, K=40, p0s=(1.5, 2.0, 3.0), per_p0=4, seed=3):
    sp = _space(n)
    B = enumerate_basis(sp, "intervals")
    specs = rdf_specs(sp)
    tail_tol = 2.0 ** (-(K - 2))
    viol = {"pointwise": 0, "a1": 0, "norm": 0}
    worst = {"a1_over_2N": 0.0, "norm_ratio": 0.0}
    for j, p0 in enumerate(p0s):
        hs = _positive_battery(sp, seed * 100 + j, per_p0)
        for name, spec in specs.items():
            N1 = estimate_maximal_norm(spec, B, "primal", 24, seed, extras=hs, depth=6, extra_depth=12).value
            for h in hs:
                R = rdf_majorant(h, B, N1, K)
                Rh = R.values
                viol["pointwise"] += bool(np.any(h > Rh))
                a1v = a1_constant(Rh, B).value
                worst["a1_over_2N"] = max(worst["a1_over_2N"], a1v / (2 * N1))
                viol["a1"] += a1v > 2 * N1 * (1 + tail_tol)
                nh = norm(h, spec)
                ratio = norm(Rh, spec) / nh
                worst["norm_ratio"] = max(worst["norm_ratio"], ratio)
                viol["norm"] += norm(Rh, spec) > 2 * nh + R.tail * norm(np.ones(sp.shape), spec)
    return sum(viol.values()) == 0, {"violations": viol, "worst": worst, "a1_tolerance": tail_tol}


# ---------------------------------------------------------------------------
# 3. weight constructions


def check_constructions(n=256, triples=50, modular_per_theta=6, seed=4):
    sp = _space(n)
    B = enumerate_basis(sp, "intervals")
    specs = list(rdf_specs(sp).items())
    Ns = {}
    for name, spec in specs:
        Ns[name] = (estimate_maximal_norm(spec, B, "primal", 24, seed, depth=6).value,
                    estimate_maximal_norm(spec, B, "dual", 24, seed, depth=6).value)
    fam = H.input_battery(sp, seed, count=2 * triples)
    failed = []
    for k in range(triples):
        name, spec = specs[k % len(specs)]
        p0 = (1.5, 2.0, 3.0)[k % 3]
        f, g = np.abs(fam[2 * k]), np.abs(fam[2 * k + 1])
        cfg = RdfConfig(N1=Ns[name][0], N2=Ns[name][1], seed=seed)
        _, rep = build_ap_weight(f, g, spec, B, p0, cfg)
        if not all(rep["checks"].values()):
            failed.append({"k": k, "spec": name, "p0": p0, "checks": rep["checks"]})
    u = make_power_weight(sp, 0.2, [0.3719]).values
    v = make_power_weight(sp, -0.3, [0.6123]).values
    mod_failed, mod_count = [], 0
    for phi in (Power(2.0), PLog(2.0, 1.0)):
        N1 = estimate_modular_constant(phi, B, u, v, "primal", seed=seed).value
        N2 = estimate_modular_constant(phi, B, u, v, "dual", seed=seed).value
        cfg = RdfConfig(N1=N1, N2=N2, seed=seed)
        for theta in (1.0, 0.5):
            for k in range(modular_per_theta):
                f, g = np.abs(fam[2 * k]), np.abs(fam[2 * k + 1])
                _, rep = build_modular_weight(f, g, phi, B, 2.0, theta, u, v, cfg)
                mod_count += 1
                if not all(rep["checks"].values()):
                    mod_failed.append({"phi": phi.to_dict(), "theta": theta, "k": k, "checks": rep["checks"]})
    return not failed and not mod_failed, {"triples": triples, "failed": failed, "modular_runs": mod_count,
                                           "modular_failed": mod_failed}


# ---------------------------------------------------------------------------
# 4-6. end-to-end extrapolation


def _e2e_space(n=512):
    sp = MeasureSpace((n,), 1.0 / n)
    return sp, enumerate_basis(sp, "intervals")


def bfs_target_specs(sp):
    # u^3 v is a product of power weights with exponents 0.45 and -0.2, inside (-1, 2)
    u = make_power_weight(sp, 0.15, [0.3719]).values
    v = make_power_weight(sp, -0.2, [0.6123]).values
    pf = constant_field(sp, [1.5, 2.25, 3.0, 2.0])
    return {
        "lorentz(3,1.5)": lorentz(sp, 3.0, 1.5, u=u, v=v),
        "varexp[1.5,3]": varexp(sp, pf),
        "orlicz(t^2 log(e+t))": orlicz(sp, PLog(2.0, 1.0)),
    }


def check_bfs_end_to_end(n=512, p0=2.0, seed=0):
    sp, B = _e2e_space(n)
    fam = H.make_family("hilbert", B, seed=seed, count=16)
    out, ok = {}, True
    for name, spec in bfs_target_specs(sp).items():
        rep = H.verify_bfs_extrapolation(fam, spec, B, p0, RdfConfig(seed=seed))
        out[name] = {"verdict": rep.verdict, "C0": rep.bound_constant, "worst": rep.worst,
                     "vector_worst": rep.vector.get("worst"), "psi_argument": rep.psi_argument,
                     "psi_extrapolated": rep.psi.extrapolated(rep.psi_argument) if rep.psi else None}
        ok &= rep.verdict == H.PASS
    return ok, out


def check_modular_end_to_end(n=512, p0=2.0, seed=0):
    sp, B = _e2e_space(n)
    fam = H.make_family("hilbert", B, seed=seed, count=16)
    u = make_power_weight(sp, 0.2, [0.3719]).values
    v = make_power_weight(sp, -0.3, [0.6123]).values
    out, ok = {}, True
    for phi in (Power(2.0), PLog(2.0, 1.0)):
        rep = H.verify_modular_extrapolation(fam, phi, B, p0, u, v, RdfConfig(seed=seed))
        out[str(phi.to_dict())] = {"verdict": rep.verdict, "C1": rep.bound_constant, "worst": rep.worst}
        ok &= rep.verdict == H.PASS
    return ok, out


def check_ainf_end_to_end(n=512, seed=0):
    sp, B = _e2e_space(n)
    fam = H.make_family("ainf", B, seed=seed, count=16)
    spec = lp(sp, 3.0, u=make_power_weight(sp, 0.2, [0.3719]).values)
    out, ok = {}, True
    N2 = estimate_maximal_norm(spec, B, "dual", 24, seed, depth=6).value
    for p in (0.5, 1.0, 2.0):
        rep = H.verify_ainf_extrapolation(fam, spec, B, p, RdfConfig(N2=N2, seed=seed), q=2.0)
        out[str(p)] = {"verdict": rep.verdict, "C": rep.bound_constant, "worst": rep.worst,
                       "vector": {"constant": rep.vector.get("constant"), "worst": rep.vector.get("worst")}}
        ok &= rep.verdict == H.PASS
    return ok, out


# ---------------------------------------------------------------------------
# 7. Young machinery


def young_catalogue():
    return {
        "t^1.5": Power(1.5), "t^2": Power(2.0), "t^3": Power(3.0),
        "t^2 log(e+t)": PLog(2.0, 1.0), "t^1.5 log(e+t)^2": PLog(1.5, 2.0),
        "max(t^2,t^3)": MinMax(2.0, 3.0, "max"), "min(t^2,t^3)": MinMax(2.0, 3.0, "min"),
    }


def check_young(points=200, index_tol=0.05, rtol=1e-6):
    t = np.geomspace(1e-6, 1e6, points)
    out, ok = {}, True
    for name, phi in young_catalogue().items():
        bar = phi.complementary()
        prod = phi.inverse(t) * bar.inverse(t) / t
        budget = rtol + 2 * getattr(bar, "error", 0.0)
        lo_ok = bool(np.all(prod >= 1 - budget))
        hi_ok = bool(np.all(prod <= 2 * (1 + budget)))
        i, I = phi.numeric_indices()
        ib, Ib = bar.numeric_indices()
        dual_ok = abs(conj(I) - ib) <= index_tol
        entry = {"min": float(prod.min()), "max": float(prod.max()), "budget": budget,
                 "indices": (i, I), "bar_indices": (ib, Ib), "dual_ok": bool(dual_ok)}
        if isinstance(phi, Power):
            entry["power_ok"] = bool(abs(i - phi.p) <= index_tol and abs(I - phi.p) <= index_tol)
            ok &= entry["power_ok"]
        ok &= lo_ok and hi_ok and dual_ok
        out[name] = entry
    return ok, out


# ---------------------------------------------------------------------------
# 8. Dirichlet problem


def check_dirichlet(n=512, count=20, kappa=1.0, seed=0):
    sp = MeasureSpace((n,), 1.0 / n)
    B = enumerate_basis(sp, "intervals")
    cone = ops.ConeSpec(kappa)
    spec = lp(sp, 2.0)
    N1 = estimate_maximal_norm(spec, B, "primal", 24, seed, depth=6).value
    data = H.input_battery(sp, seed, count)
    bad = []
    worst_upper = 0.0
    for k, f in enumerate(data):
        _, cert = ops.solve_dirichlet(f, spec, cone, B, N1)
        worst_upper = max(worst_upper, cert.upper_lhs / (cert.upper_rhs / cert.sandwich / cert.N1))
        if cert.verdict != "PASS":
            bad.append(k)
    field_ = ops.poisson_extend(np.ones(sp.shape), cone.levels(sp), sp)
    conservation = float(np.max(np.abs(field_.values - 1.0)))
    phi = PLog(2.0, 1.0)
    mod_bad = []
    N1m = estimate_modular_constant(phi, B, None, None, "primal", seed=seed).value
    for k, f in enumerate(data[:5]):
        _, cert = ops.solve_dirichlet_modular(f, phi, cone, B, N1=N1m)
        if cert.verdict != "PASS":
            mod_bad.append(k)
    ok = not bad and not mod_bad and conservation <= 4 * np.finfo(float).eps
    return ok, {"failed": bad, "modular_failed": mod_bad, "conservation_error": conservation,
                "worst_N_over_f": worst_upper, "sandwich": ops.sandwich_constant(kappa), "N1": N1}


# ---------------------------------------------------------------------------
# 9. square function


def check_square_function(n=512, h=0.125, t0s=(0.1, 0.05, 0.025), ps=(2.0, 3.0), m=0.7, rel=0.10, seed=0):
    out, ok = {}, True
    for label, sp in (("lebesgue", MeasureSpace((n,), h)),
                      (f"order-{m}", ops.order_m_measure(n, h, m))):
        B = enumerate_basis(sp, "intervals")
        data = H.input_battery(sp, seed, 16, mean_zero=True, radius=(2 * h, 8 * h))
        G = {t0: [ops.square_function(f, sp, t0, 1.0 if label == "lebesgue" else m).values for f in data]
             for t0 in t0s}
        worst = 0.0
        for p in ps:
            bat = H.weight_battery(B, p, None, seed=seed)
            for w in bat.weights:
                for j, f in enumerate(data):
                    nf = float(np.sum(np.abs(f) ** p * w * sp.mu)) ** (1 / p)
                    if nf == 0:
                        continue
                    r = [float(np.sum(G[t0][j] ** p * w * sp.mu)) ** (1 / p) / nf for t0 in t0s]
                    worst = max(worst, max(r) / min(r) - 1.0)
        out[label] = {"worst_spread": worst, "limit": rel, "weights": len(bat)}
        ok &= worst <= rel
    return ok, out


# ---------------------------------------------------------------------------
# 10. oracle equivalence


def oracle_grids():
    g = [((n,), k) for n in (1, 2, 4, 8, 16) for k in ("dyadic", "intervals")]
    for a in (1, 2, 4, 8, 16):
        for b in (1, 2, 4, 8, 16):
            for k in ("dyadic", "cubes", "rectangles"):
                if k == "rectangles" and a * b > 64:
                    continue
                g.append(((a, b), k))
    return g


def check_oracle(rtol=1e-10, seed=5):
    rng = np.random.default_rng(seed)
    worst, where = 0.0, None
    phi = PLog(2.0, 1.0)
    for shape, kind in oracle_grids():
        mu = rng.uniform(0.25, 2.0, shape)
        if mu.size > 2:
            mu.flat[int(rng.integers(mu.size))] = 0.0
        sp = MeasureSpace(shape, float(rng.uniform(0.1, 1.0)), mu)
        B = enumerate_basis(sp, kind)
        w = np.exp(rng.normal(size=shape))
        b = rng.normal(size=shape)
        pairs = {
            "ap": (ap_constant(w, B, 2.5).value, oracle.ap(w, sp, kind, 2.5)),
            "a1": (a1_constant(w, B).value, oracle.a1(w, sp, kind)),
            "rh": (rh_constant(w, B, 3.0).value, oracle.rh(w, sp, kind, 3.0)),
            "apq": (apq_constant(w, B, 2.0, 3.0).value, oracle.apq(w, sp, kind, 2.0, 3.0)),
            "bmo": (bmo_norm(b, B).value, oracle.bmo(b, sp, kind)),
        }
        if kind in ("dyadic", "intervals") or len(shape) == 2 and kind == "cubes":
            f = rng.normal(size=shape)
            u, v = np.exp(rng.normal(size=shape)), np.exp(rng.normal(size=shape))
            pf = rng.uniform(1.2, 3.0, shape)
            pairs.update({
                "lp": (norm(f, lp(sp, 1.7, u=u, v=v)), oracle.lp_norm(f, sp, 1.7, u, v)),
                "lorentz": (norm(f, lorentz(sp, 2.0, 1.5, u=u, v=v)), oracle.lorentz_norm(f, sp, 2.0, 1.5, u, v)),
                "orlicz": (norm(f, orlicz(sp, phi, u=u, v=v)),
                           oracle.orlicz_norm(f, sp, lambda t: t * t * np.log(np.e + t), u, v)),
                "varexp": (norm(f, varexp(sp, pf, u=u, v=v)), oracle.varexp_norm(f, sp, pf, u, v)),
            })
        for key, (a, c) in pairs.items():
            if a == c:
                continue
            e = _rel(a, c)
            if e > worst:
                worst, where = e, {"shape": shape, "kind": kind, "quantity": key}
    return worst <= rtol, {"worst_rel": worst, "at": where, "grids": len(oracle_grids()), "rtol": rtol}


# ---------------------------------------------------------------------------


CHECKS = [
    ("1a dual A_p identity", 5.0, check_dual_identity),
    ("1b A_pq identities", 5.0, check_apq_identities),
    ("1c A_p product bound", 5.0, check_product_bound),
    ("2 Rubio de Francia bounds", None, check_rdf_bounds),
    ("3 weight constructions", 60.0, check_constructions),
    ("4 BFS extrapolation end-to-end", 300.0, check_bfs_end_to_end),
    ("5 modular extrapolation end-to-end", 300.0, check_modular_end_to_end),
    ("6 A_infinity extrapolation", None, check_ainf_end_to_end),
    ("7 Young machinery", None, check_young),
    ("8 Dirichlet certificate", None, check_dirichlet),
    ("9 square function stability", None, check_square_function),
    ("10 brute-force oracle equivalence", None, check_oracle),
]


def run_suite(preset: str = "paper-core", only=None, progress=None) -> list:
    if preset != "paper-core":
        raise ValueError(f"unknown preset {preset!r}")
    results = []
    for name, budget, fn in CHECKS:
        if only is not None and not any(name.startswith(o) for o in only):
            continue
        res = _timed(name, budget, fn)
        results.append(res)
        if progress is not None:
            progress(res)
    return results


__all__ = ["CheckResult", "CHECKS", "run_suite", "SUITE_VERSION"] + [n for n in dir() if n.startswith("check_")]
