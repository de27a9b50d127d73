from __future__ import annotations

import json
import os
import subprocess
import sys

import numpy as np
import pytest

from wfx.cli import run

N = 64
SPACE = {"dim": 1, "n": [N], "h": 1.0 / N, "mu": "lebesgue"}


@pytest.fixture
def files(tmp_path):
    x = (np.arange(N) + 0.5) / N

    def put(name, obj):
        p = tmp_path / name
        p.write_text(json.dumps(obj))
        return str(p)

    return {
        "dir": tmp_path,
        "ones": put("ones.json", {"values": [1.0] * N}),
        "f": put("f.json", {"space": SPACE, "values": np.cos(7 * x).tolist()}),
        "g": put("g.json", {"values": (1 + np.sin(3 * x) ** 2).tolist()}),
        "spec": put("spec.json", {"space": SPACE, "family": "lp", "p": 2.0}),
        "lor": put("lor.json", {"space": SPACE, "family": "lorentz", "p": 3.0, "q": 1.5, "u": "u.json"}),
        "u": put("u.json", {"values": (np.abs(x - 0.3719) ** 0.15).tolist()}),
        "orl": put("orl.json", {"space": SPACE, "family": "orlicz", "phi": {"family": "plog", "p": 2, "alpha": 1}}),
        "phi": put("phi.json", {"family": "plog", "p": 2, "alpha": 1}),
    }


def _json(capsys):
    return json.loads(capsys.readouterr().out)


def test_ap_of_ones_is_one(files, capsys):
    assert run(["ap", "--weight", files["ones"], "--basis", "intervals", "--p", "2"]) == 0
    out = _json(capsys)
    assert out["schema"] == "wfx/1" and out["value"] == pytest.approx(1.0)
    assert list(out)[0] == "schema" and len(out["argmax_box"]) == 2


@pytest.mark.parametrize("cmd", [["a1"], ["rh", "--s", "inf"], ["apq", "--q", "3"], ["ainf"]])
def test_constants(files, capsys, cmd):
    assert run(cmd + ["--weight", files["ones"]]) == 0
    assert _json(capsys)["value"] == pytest.approx(1.0)


def test_malformed_json_reports_position(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"values": [1, 2,\n 3,, ]}')
    assert run(["ap", "--weight", str(bad)]) == 3
    assert f"{bad}:2:4" in capsys.readouterr().err


def test_unknown_flag_writes_nothing(files, capsys):
    out = files["dir"] / "r.json"
    assert run(["extrapolate", "--family", "hilbert", "--space", files["spec"], "--report", str(out),
                "--bogus"]) == 3
    assert not out.exists()
    assert run(["extrapolate", "--family", "hilbert", "--space", files["spec"],
                "--report", str(files["dir"] / "missing" / "r.json")]) == 3
    assert run([]) == 3
    assert run(["ap", "--weight", str(files["dir"] / "nope.json")]) == 3


def test_usage_errors_from_inputs(files, tmp_path):
    # 5 values cannot form a power-of-two grid
    p = tmp_path / "odd.json"
    p.write_text(json.dumps({"values": [1, 2, 3, 4, 5]}))
    assert run(["ap", "--weight", str(p)]) == 3
    z = tmp_path / "z.json"
    z.write_text(json.dumps({"values": [1, 0, 1, 1]}))
    assert run(["ap", "--weight", str(z)]) == 3


def test_maximal_and_ops(files, capsys):
    assert run(["maximal", "--in", files["f"], "--basis", "dyadic"]) == 0
    assert len(_json(capsys)["values"]) == N
    for op in (["hilbert"], ["sqfn"], ["poisson"], ["commutator", "--b", files["g"]],
               ["calderon", "--F", files["g"]]):
        assert run(["op"] + op + ["--in", files["f"]]) == 0
        assert len(_json(capsys)["values"]) == N


def test_norm_young_space(files, capsys):
    assert run(["norm", "--in", files["f"], "--space", files["lor"]]) == 0
    assert _json(capsys)["value"] > 0
    assert run(["young", "--phi", files["phi"], "--points", "5"]) == 0
    assert _json(capsys)["delta2_constant"] > 1
    assert run(["space", "--n", "16", "--h", "0.5"]) == 0
    assert _json(capsys)["space"]["total_mass"] == pytest.approx(8.0)


def test_rdf_weight_report(files, capsys):
    assert run(["rdf", "weight", "--f", files["f"], "--g", files["g"], "--space", files["spec"],
                "--p0", "2", "--K", "40"]) == 0
    out = _json(capsys)
    for key in ("weight", "ap_constant", "paper_bound", "embeddings"):
        assert key in out
    assert out["ap_constant"] <= out["paper_bound"] * (1 + 1e-9)


def test_extrapolate_report_and_csv(files):
    rep, tab = files["dir"] / "r.json", files["dir"] / "r.csv"
    code = run(["extrapolate", "--family", "hilbert", "--space", files["spec"], "--p0", "2", "--mode", "bfs",
                "--report", str(rep), "--csv", str(tab)])
    out = json.loads(rep.read_text())
    assert code == 0 and out["verdict"] == "PASS" and out["schema"] == "wfx/1"
    lines = tab.read_text().splitlines()
    assert lines[0] == "index,ratio,constant,ok" and len(lines) == 1 + len(out["ratios"])
    assert [p.name for p in files["dir"].iterdir() if p.name.startswith(".wfx-")] == []


def test_extrapolate_modes(files):
    rep = files["dir"] / "m.json"
    assert run(["extrapolate", "--family", "hilbert", "--space", files["orl"], "--mode", "modular",
                "--report", str(rep)]) == 0
    assert run(["extrapolate", "--family", "hilbert", "--space", files["spec"], "--mode", "modular",
                "--report", str(rep)]) == 3
    assert run(["extrapolate", "--family", "hilbert", "--space", files["spec"], "--mode", "limited",
                "--pminus", "1", "--pplus", "4", "--report", str(rep)]) == 0


def test_dirichlet(files):
    rep = files["dir"] / "d.json"
    assert run(["dirichlet", "--data", files["f"], "--kappa", "1.0", "--space", files["spec"],
                "--report", str(rep)]) == 0
    out = json.loads(rep.read_text())
    assert out["certificate"]["sandwich"] == pytest.approx(8.0)


def test_inf_is_sanitised(files, capsys):
    assert run(["young", "--phi", files["phi"], "--points", "3"]) == 0
    text = capsys.readouterr().out
    assert "Infinity" not in text and "NaN" not in text


def test_entry_point(files):
    env = dict(os.environ, WFX_THREADS="2")
    r = subprocess.run([sys.executable, "-m", "wfx.cli", "ap", "--weight", files["ones"]],
                       capture_output=True, text=True, env=env)
    assert r.returncode == 0 and json.loads(r.stdout)["value"] == pytest.approx(1.0)


def test_reruns_are_byte_identical(files):
    a, b = files["dir"] / "a.json", files["dir"] / "b.json"
    for out in (a, b):
        assert run(["extrapolate", "--family", "commutator", "--space", files["spec"], "--report", str(out),
                    "--seed", "7"]) == 0
    assert a.read_bytes() == b.read_bytes()
