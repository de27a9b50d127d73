"""``wfx`` command-line interface.

Exit codes: 0 success or PASS, 1 FAIL, 2 INCONCLUSIVE, 3 usage error.
Reports are JSON objects carrying ``{"schema": "wfx/1"}``; they go to
stdout unless ``--out``/``--report`` names a file.  Output files are
written only after the computation succeeded.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile

import numpy as np

SCHEMA = "wfx/1"
EXIT = {"PASS": 0, "FAIL": 1, "INCONCLUSIVE": 2}
USAGE = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog.removeprefix('wfx').strip() or 'usage'}: {message}")

    def exit(self, status=0, message=None):
        if message:
            sys.stderr.write(message)
        if status:
            raise UsageError(message or "")
        raise SystemExit(0)


# ---------------------------------------------------------------------------
# input helpers


def _read_json(path: str):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def _resolve(ref, base_dir):
    """JSON value or path (relative to the referring file) to its loaded content."""
    if isinstance(ref, str):
        p = ref if os.path.isabs(ref) else os.path.join(base_dir, ref)
        return _read_json(p)
    return ref


def _space_from(doc, base_dir, fallback_n=None, grid=None):
    from .core import MeasureSpace, SpaceError

    desc = None
    if isinstance(doc, dict) and "space" in doc:
        desc = _resolve(doc["space"], base_dir)
    elif grid is not None:
        desc = _read_json(grid)
    try:
        if desc is not None:
            if isinstance(desc.get("mu"), str) and desc["mu"] not in ("lebesgue",):
                desc = dict(desc, mu=_resolve(desc["mu"], base_dir))
            if isinstance(desc.get("mu"), dict):
                desc = dict(desc, mu=desc["mu"]["values"])
            return MeasureSpace.from_dict(desc)
        if fallback_n is None:
            raise UsageError("no grid given: add a \"space\" entry or pass --grid")
        return MeasureSpace((fallback_n,), 1.0)
    except SpaceError as exc:
        raise UsageError(str(exc)) from None


def _values(doc, path):
    if isinstance(doc, dict) and "values" in doc:
        vals = np.asarray(doc["values"], dtype=float)
        if "imag" in doc:
            vals = vals + 1j * np.asarray(doc["imag"], dtype=float)
        return vals
    if isinstance(doc, list):
        return np.asarray(doc, dtype=float)
    raise UsageError(f"{path}: expected a grid function {{\"values\": [...]}}")


class Inputs:
    """Loads grid functions and specs against one shared grid."""

    def __init__(self, grid: str | None = None):
        self.grid = grid
        self.space = None

    def function(self, path: str, weight: bool = False):
        from .core import GridFunction, SpaceError, Weight

        doc = _read_json(path)
        vals = _values(doc, path)
        if self.space is None:
            self.space = _space_from(doc, os.path.dirname(path), vals.size, self.grid)
        try:
            return (Weight if weight else GridFunction)(vals, self.space)
        except (SpaceError, ValueError) as exc:
            raise UsageError(f"{path}: {exc}") from None

    def spec(self, path: str):
        from .spaces import SpecError, spec_from_dict

        doc = _read_json(path)
        if not isinstance(doc, dict):
            raise UsageError(f"{path}: expected a space specification object")
        base = os.path.dirname(path)
        if self.space is None:
            self.space = _space_from(doc, base, None, self.grid)

        def load(ref):
            return _values(_resolve(ref, base), ref)

        try:
            return spec_from_dict(doc, self.space, load=load)
        except (SpecError, ValueError, KeyError) as exc:
            raise UsageError(f"{path}: {exc}") from None

    def young(self, path: str):
        from .young import make_young

        doc = _read_json(path)
        try:
            return make_young(doc)
        except (ValueError, KeyError, TypeError) as exc:
            raise UsageError(f"{path}: {exc}") from None

    def basis(self, kind: str):
        from .basis import enumerate_basis

        try:
            return enumerate_basis(self.space, kind)
        except ValueError as exc:
            raise UsageError(str(exc)) from None


# ---------------------------------------------------------------------------
# output helpers


def _clean(x):
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return x


def report(payload: dict) -> dict:
    out = {"schema": SCHEMA}
    out.update(payload)
    return _clean(out)


def _dumps(obj) -> str:
    return json.dumps(obj, separators=(",", ":"), allow_nan=False)


def _check_out(path: str | None):
    if path is None:
        return
    d = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(d):
        raise UsageError(f"output directory does not exist: {d}")
    if os.path.isdir(path):
        raise UsageError(f"output path is a directory: {path}")


def _write_atomic(path: str, text: str):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".wfx-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_text(rows: list) -> str:
    buf = io.StringIO()
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0].keys()), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: _clean(v) for k, v in r.items()})
    return buf.getvalue()


def _grid_rows(values) -> list:
    v = np.asarray(values)
    return [{"index": i, "value": float(x)} for i, x in enumerate(v.ravel())]


class Output:
    def __init__(self, json_path=None, csv_path=None):
        _check_out(json_path)
        _check_out(csv_path)
        self.json_path, self.csv_path = json_path, csv_path

    def emit(self, payload: dict, rows: list | None = None):
        text = _dumps(report(payload))
        if self.json_path:
            _write_atomic(self.json_path, text + "\n")
        else:
            sys.stdout.write(text + "\n")
        if self.csv_path:
            _write_atomic(self.csv_path, _csv_text(rows or []))


# ---------------------------------------------------------------------------
# subcommands


def _add_common(p, out_flag="--out"):
    p.add_argument("--grid", help="space descriptor JSON used when inputs do not carry one")
    p.add_argument(out_flag, dest="out", help="write the JSON report here instead of stdout")
    p.add_argument("--csv", help="also write a CSV table")
    p.add_argument("--seed", type=int, default=0)


def cmd_space(a):
    from .core import MeasureSpace, SpaceError
    from .operators import order_m_measure

    out = Output(a.out, a.csv)
    if a.grid:
        sp = _space_from(None, ".", None, a.grid)
    else:
        if a.n is None:
            raise UsageError("space: give --grid or --n")
        try:
            if a.order_m is not None:
                if len(a.n) != 1:
                    raise UsageError("space: --order-m needs a 1-D grid")
                sp = order_m_measure(a.n[0], a.h, a.order_m, gaps=not a.no_gaps)
            else:
                sp = MeasureSpace(tuple(a.n), a.h)
        except SpaceError as exc:
            raise UsageError(str(exc)) from None
    d = sp.to_dict()
    d.update({"total_mass": sp.total_mass, "lebesgue": sp.is_lebesgue,
              "zero_mass_cells": int(np.sum(sp.mu == 0))})
    out.emit({"command": "space", "space": d}, _grid_rows(sp.mu))
    return 0


def cmd_maximal(a):
    from .maximal import dual_maximal, iterate_maximal, maximal, orlicz_maximal

    out = Output(a.out, a.csv)
    I = Inputs(a.grid)
    f = I.function(a.inp)
    B = I.basis(a.basis)
    if a.dual:
        v = I.function(a.dual, weight=True)
        res = dual_maximal(f, B, v)
    elif a.orlicz:
        res = orlicz_maximal(f, B, I.young(a.orlicz))
    else:
        res = iterate_maximal(f, B, a.iterate) if a.iterate != 1 else maximal(f, B)
    out.emit({"command": "maximal", "basis": a.basis, "values": res.values.ravel()}, _grid_rows(res.values))
    return 0


def cmd_constant(a):
    from . import muckenhoupt as mk

    out = Output(a.out, a.csv)
    I = Inputs(a.grid)
    w = I.function(a.weight, weight=(a.cmd != "bmo"))
    B = I.basis(a.basis)
    try:
        if a.cmd == "ap":
            r = mk.a1_constant(w, B) if a.p == 1 else mk.ap_constant(w, B, a.p)
        elif a.cmd == "a1":
            r = mk.a1_constant(w, B)
        elif a.cmd == "ainf":
            r = mk.ainf_constant(w, B)
        elif a.cmd == "rh":
            r = mk.rhinf_constant(w, B) if math.isinf(a.s) else mk.rh_constant(w, B, a.s)
        elif a.cmd == "apq":
            if a.q is None:
                raise UsageError("apq needs --q")
            r = mk.apq_constant(w, B, a.p, a.q)
        else:
            r = mk.bmo_norm(w, B)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    payload = {"value": r.value, "argmax_box": [list(r.argmax_box[0]), list(r.argmax_box[1])]}
    if getattr(r, "p", None) is not None:
        payload["p"] = r.p
    out.emit(payload, [dict(payload, argmax_box=str(payload["argmax_box"]))])
    return 0


def cmd_norm(a):
    from .spaces import associate_norm, holder_factor, norm

    out = Output(a.out, a.csv)
    I = Inputs(a.grid)
    spec = I.spec(a.space)
    f = I.function(a.inp)
    val = associate_norm(f, spec) if a.associate else norm(f, spec)
    payload = {"command": "norm", "value": val, "spec": spec.to_dict(), "associate": a.associate,
               "holder_factor": holder_factor(spec) if a.associate else None}
    out.emit(payload, [{"value": val}])
    return 0


def cmd_young(a):
    from .muckenhoupt import conj

    out = Output(a.out, a.csv)
    phi = Inputs().young(a.phi)
    bar = phi.complementary()
    t = np.geomspace(a.tmin, a.tmax, a.points)
    prod = phi.inverse(t) * bar.inverse(t) / t
    i, I_ = phi.dilation_indices()
    ib, Ib = bar.dilation_indices()
    payload = {"command": "young", "phi": phi.to_dict(), "indices": [i, I_], "complementary_indices": [ib, Ib],
               "delta2_constant": phi.delta2_constant(),
               "young_product": {"min": float(prod.min()), "max": float(prod.max())},
               "index_duality_gap": abs(conj(I_) - ib) if np.isfinite(I_) else None}
    rows = [{"t": float(x), "phi": float(phi(x)), "phi_bar": float(bar(x)), "product_ratio": float(r)}
            for x, r in zip(t, prod)]
    out.emit(payload, rows)
    return 0


def _cfg(a, **kw):
    from .rdf import RdfConfig

    return RdfConfig(K=a.K, N1=getattr(a, "N1", None), N2=getattr(a, "N2", None), seed=a.seed, **kw)


def cmd_rdf(a):
    from .rdf import (ConstantError, build_a1_weight, build_ap_weight, build_limited_range_weight,
                      build_modular_weight, estimate_maximal_norm, positive_majorant, rdf_majorant)
    from .muckenhoupt import a1_constant
    from .spaces import SpecError

    out = Output(a.out, a.csv)
    I = Inputs(a.grid)
    spec = I.spec(a.space) if a.space else None
    try:
        if a.action == "majorize":
            if not a.inp:
                raise UsageError("rdf majorize needs --in")
            h = I.function(a.inp)
            if spec is None:
                raise UsageError("rdf majorize needs --space")
            B = I.basis(a.basis)
            N1 = a.N1 or estimate_maximal_norm(spec, B, "primal", seed=a.seed).value
            ht = positive_majorant(np.abs(h.values), spec, 1.0, "norm").values
            R = rdf_majorant(ht, B, N1, a.K)
            from .spaces import norm
            payload = {"weight": R.values.ravel(), "N1": N1, "a1_constant": a1_constant(R, B).value,
                       "paper_bound": 2 * N1, "norm_ratio": norm(R, spec) / norm(ht, spec), "tail": R.tail}
            out.emit(dict(command="rdf majorize", **payload), _grid_rows(R.values))
            return 0
        if not (a.f and a.g):
            raise UsageError(f"rdf {a.action} needs --f and --g")
        f, g = I.function(a.f), I.function(a.g)
        if spec is None and a.action != "weight-modular":
            raise UsageError(f"rdf {a.action} needs --space")
        if spec is None:
            I.space = f.space
        B = I.basis(a.basis)
        if a.action == "weight":
            if a.p0 == 1:
                w, rep = build_a1_weight(f, g, spec, B, _cfg(a))
            else:
                w, rep = build_ap_weight(f, g, spec, B, a.p0, _cfg(a))
        elif a.action == "weight-modular":
            if not a.phi:
                raise UsageError("rdf weight-modular needs --phi")
            phi = I.young(a.phi)
            u = spec.uu if spec is not None else None
            v = spec.vv if spec is not None else None
            w, rep = build_modular_weight(f, g, phi, B, a.p0, a.theta, u, v, _cfg(a))
        else:
            if a.pminus is None or a.pplus is None:
                raise UsageError("rdf weight-limited needs --pminus and --pplus")
            w, rep = build_limited_range_weight(f, g, spec, B, a.pminus, a.pplus, a.pstar, _cfg(a))
    except (ConstantError, SpecError) as exc:
        raise UsageError(str(exc)) from None
    ok = all(rep["checks"].values())
    payload = {"command": f"rdf {a.action}", "weight": w.values.ravel(), "verdict": "PASS" if ok else "FAIL"}
    payload.update(rep)
    out.emit(payload, _grid_rows(w.values))
    return EXIT[payload["verdict"]]


def cmd_extrapolate(a):
    from . import harness as H
    from .rdf import RdfConfig

    out = Output(a.out, a.csv)
    I = Inputs(a.grid)
    spec = I.spec(a.space)
    B = I.basis(a.basis)
    params = {}
    if a.family == "commutator":
        params["k"] = a.k
        if a.b:
            params["b"] = I.function(a.b).values
    if a.family == "calderon" and a.F:
        params["F"] = I.function(a.F).values
    if a.family == "sqfn":
        params["t0"] = a.t0
    if a.family == "poisson":
        params["kappa"] = a.kappa
    if a.family == "custom":
        if not a.pairs:
            raise UsageError("custom family needs --pairs")
        doc = _read_json(a.pairs)
        try:
            params["pairs"] = [(np.asarray(p["f"]["values"] if isinstance(p["f"], dict) else p["f"], dtype=float),
                                np.asarray(p["g"]["values"] if isinstance(p["g"], dict) else p["g"], dtype=float))
                               for p in doc["pairs"]]
        except (KeyError, TypeError) as exc:
            raise UsageError(f"{a.pairs}: bad pairs file ({exc})") from None
    try:
        fam = H.make_family(a.family, B, seed=a.seed, count=a.count, **params)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    cfg = RdfConfig(K=a.K, seed=a.seed)
    try:
        if a.mode == "bfs":
            rep = (H.verify_vector_valued(fam, spec, B, a.p0, a.q, cfg) if a.q and a.q != a.p0
                   else H.verify_bfs_extrapolation(fam, spec, B, a.p0, cfg))
        elif a.mode == "ainf":
            rep = H.verify_ainf_extrapolation(fam, spec, B, a.p, cfg, q=a.q or 2.0)
        elif a.mode == "modular":
            if spec.family != "orlicz":
                raise UsageError("modular mode needs an orlicz space specification")
            rep = H.verify_modular_extrapolation(fam, spec.phi, B, a.p0, spec.u, spec.v, cfg)
        else:
            if a.pminus is None or a.pplus is None:
                raise UsageError("limited mode needs --pminus and --pplus")
            rep = H.verify_limited_range(fam, spec, B, a.pminus, a.pplus, a.pstar, cfg)
    except H.FamilyError as exc:
        raise UsageError(str(exc)) from None
    payload = {"command": "extrapolate", "verdict": rep.verdict}
    payload.update(rep.to_dict())
    out.emit(payload, rep.rows() if rep.psi is not None else [])
    return EXIT[rep.verdict]


def cmd_dirichlet(a):
    from . import operators as ops

    out = Output(a.out, a.csv)
    I = Inputs(a.grid)
    f = I.function(a.data)
    spec = I.spec(a.space) if a.space else None
    B = I.basis(a.basis)
    try:
        cone = ops.ConeSpec(a.kappa)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if a.phi:
        phi = I.young(a.phi)
        field_, cert = ops.solve_dirichlet_modular(
            f, phi, cone, B, spec.u if spec else None, spec.v if spec else None, a.N1)
    else:
        if spec is None:
            raise UsageError("dirichlet needs --space (or --phi for the modular estimate)")
        field_, cert = ops.solve_dirichlet(f, spec, cone, B, a.N1)
    Nu = ops.nontangential_maximal(field_, cone).values
    payload = {"command": "dirichlet", "verdict": cert.verdict, "kappa": a.kappa,
               "certificate": cert.to_dict(), "t_levels": field_.t, "nontangential": Nu}
    if a.field:
        payload["field"] = field_.values
    out.emit(payload, [dict(cert.to_dict())])
    return EXIT[cert.verdict]


def cmd_op(a):
    from . import operators as ops

    out = Output(a.out, a.csv)
    I = Inputs(a.grid)
    f = I.function(a.inp)
    sp = I.space
    try:
        extra = {}
        if a.which == "hilbert":
            res = ops.hilbert(f, sp).values
        elif a.which == "commutator":
            if not a.b:
                raise UsageError("op commutator needs --b")
            res = ops.commutator("hilbert", I.function(a.b).values, a.k, f, sp, a.method).values
        elif a.which == "calderon":
            if not a.F:
                raise UsageError("op calderon needs --F")
            r = ops.calderon_commutator(I.function(a.F).values, f, sp)
            res = r.commutator.values
            extra = {"first": r.first.values.ravel(), "residual": r.residual}
        elif a.which == "sqfn":
            res = ops.square_function(f, sp, a.t0, a.m).values
        else:
            cone = ops.ConeSpec(a.kappa)
            res = ops.nontangential_maximal(ops.poisson_extend(f, cone.levels(sp), sp), cone).values
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    vals = np.asarray(res)
    payload = {"command": f"op {a.which}", "values": vals.real.ravel()}
    if np.iscomplexobj(vals):
        payload["imag"] = vals.imag.ravel()
    payload.update(extra)
    out.emit(payload, _grid_rows(vals.real))
    return 0


def cmd_suite(a):
    from .suite import SUITE_VERSION, run_suite

    out = Output(a.out, a.csv)
    try:
        results = run_suite(a.preset, a.only, progress=lambda r: print(r.line(), file=sys.stderr, flush=True))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    ok = all(r.passed for r in results)
    payload = {"command": "suite", "preset": a.preset, "version": SUITE_VERSION,
               "verdict": "PASS" if ok else "FAIL", "checks": [r.to_dict() for r in results]}
    rows = [{"name": r.name, "passed": r.passed, "seconds": round(r.seconds, 3), "budget": r.budget}
            for r in results]
    out.emit(payload, rows)
    return EXIT[payload["verdict"]]


# ---------------------------------------------------------------------------


BASES = ("dyadic", "intervals", "cubes", "rectangles")


def build_parser() -> argparse.ArgumentParser:
    from .harness import FAMILY_TAGS

    P = _Parser(prog="wfx", description="Weighted extrapolation toolkit on discretized measure spaces.")
    sub = P.add_subparsers(dest="cmd", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("space", help="describe a grid measure space")
    _add_common(p)
    p.add_argument("--n", type=int, nargs="+")
    p.add_argument("--h", type=float, default=1.0)
    p.add_argument("--order-m", type=float, dest="order_m", help="order-m measure |x - c|^(m-1) with gaps")
    p.add_argument("--no-gaps", action="store_true")
    p.set_defaults(fn=cmd_space)

    p = sub.add_parser("maximal", help="maximal function over a basis")
    _add_common(p)
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--basis", choices=BASES, default="intervals")
    p.add_argument("--dual", help="weight v for M'_v f = M(f v)/v")
    p.add_argument("--iterate", type=int, default=1)
    p.add_argument("--orlicz", help="Young function JSON for the Orlicz maximal function")
    p.set_defaults(fn=cmd_maximal)

    for name in ("ap", "a1", "ainf", "rh", "apq", "bmo"):
        p = sub.add_parser(name, help=f"{name} constant of a weight")
        _add_common(p)
        p.add_argument("--weight", required=True)
        p.add_argument("--basis", choices=BASES, default="intervals")
        p.add_argument("--p", type=float, default=2.0)
        p.add_argument("--q", type=float)
        p.add_argument("--s", type=float, default=2.0)
        p.set_defaults(fn=cmd_constant)

    p = sub.add_parser("norm", help="norm in a weighted function space")
    _add_common(p)
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--space", required=True, help="space specification JSON")
    p.add_argument("--associate", action="store_true", help="norm in the associate space")
    p.set_defaults(fn=cmd_norm)

    p = sub.add_parser("young", help="Young function diagnostics")
    _add_common(p)
    p.add_argument("--phi", required=True)
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--tmin", type=float, default=1e-6)
    p.add_argument("--tmax", type=float, default=1e6)
    p.set_defaults(fn=cmd_young)

    p = sub.add_parser("rdf", help="Rubio de Francia majorants and weight constructions")
    _add_common(p)
    p.add_argument("action", choices=("majorize", "weight", "weight-modular", "weight-limited"))
    p.add_argument("--in", dest="inp")
    p.add_argument("--f")
    p.add_argument("--g")
    p.add_argument("--space")
    p.add_argument("--basis", choices=BASES, default="intervals")
    p.add_argument("--p0", type=float, default=2.0)
    p.add_argument("--K", type=int, default=40)
    p.add_argument("--N1", type=float)
    p.add_argument("--N2", type=float)
    p.add_argument("--phi")
    p.add_argument("--theta", type=float, default=1.0)
    p.add_argument("--pminus", type=float)
    p.add_argument("--pplus", type=float)
    p.add_argument("--pstar", type=float)
    p.set_defaults(fn=cmd_rdf)

    p = sub.add_parser("extrapolate", help="end-to-end extrapolation check on an operator family")
    _add_common(p, "--report")
    p.add_argument("--family", required=True, choices=FAMILY_TAGS)
    p.add_argument("--space", required=True)
    p.add_argument("--mode", choices=("bfs", "ainf", "modular", "limited"), default="bfs")
    p.add_argument("--basis", choices=BASES, default="intervals")
    p.add_argument("--p0", type=float, default=2.0)
    p.add_argument("--p", type=float, default=1.0, help="exponent of the A_infinity conclusion")
    p.add_argument("--q", type=float, help="exponent of the vector-valued conclusion")
    p.add_argument("--pminus", type=float)
    p.add_argument("--pplus", type=float)
    p.add_argument("--pstar", type=float)
    p.add_argument("--K", type=int, default=40)
    p.add_argument("--count", type=int, default=16)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--b")
    p.add_argument("--F")
    p.add_argument("--t0", type=float, default=0.05)
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--pairs", help="JSON {\"pairs\": [{\"f\": ..., \"g\": ...}, ...]} for --family custom")
    p.set_defaults(fn=cmd_extrapolate)

    p = sub.add_parser("dirichlet", help="Poisson extension with the nontangential certificate")
    _add_common(p, "--report")
    p.add_argument("--data", required=True)
    p.add_argument("--space")
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--basis", choices=BASES, default="intervals")
    p.add_argument("--N1", type=float)
    p.add_argument("--phi", help="Young function JSON for the modular certificate")
    p.add_argument("--field", action="store_true", help="include the full extension in the report")
    p.set_defaults(fn=cmd_dirichlet)

    p = sub.add_parser("op", help="apply an operator")
    _add_common(p)
    p.add_argument("which", choices=("hilbert", "commutator", "calderon", "sqfn", "poisson"))
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--b")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--method", choices=("direct", "expand"), default="direct")
    p.add_argument("--F")
    p.add_argument("--t0", type=float, default=0.05)
    p.add_argument("--m", type=float, default=1.0)
    p.add_argument("--kappa", type=float, default=1.0)
    p.set_defaults(fn=cmd_op)

    p = sub.add_parser("suite", help="run the acceptance battery")
    _add_common(p)
    p.add_argument("--preset", default="paper-core")
    p.add_argument("--only", nargs="+", help="run only checks whose names start with these prefixes")
    p.set_defaults(fn=cmd_suite)
    return P


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return int(args.fn(args))
    except UsageError as exc:
        msg = str(exc).strip()
        if msg:
            sys.stderr.write(f"wfx: {msg}\n")
        return USAGE


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
