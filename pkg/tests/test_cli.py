import io
import json
import os
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from idealcore.cli import EXIT_CONFIG, EXIT_OK, EXIT_UNBOUNDED, run
from idealcore.sequence import export_csv, generate

GOLDEN = Path(__file__).parent / "golden"
UPDATE = os.environ.get("UPDATE_GOLDEN") == "1"

GOLDEN_CASES = {
    "limits_spike_fin": ["limits", "--seq", "sparse_spike", "--ideal", "fin", "--N", "10000"],
    "core_alt_fin_support": ["core", "--seq", "alt_decay", "--ideal", "fin", "--N", "1000"],
    "core_triangle_all": ["core", "--seq", "cycle([(0,0),(1,0),(0,1)])", "--ideal", "fin", "--N", "2000", "--method", "all"],
    "clusters_alt_z": ["clusters", "--seq", "alt(noise=0.3, seed=1)", "--ideal", "z", "--N", "2000"],
    "euler_alt_half": ["euler", "--seq", "alt", "--r", "0.5", "--N", "2000"],
    "double_rows_e": ["double", "--seq", "double_alt_rows", "--mode", "e", "--M", "64"],
}


def invoke(argv, environ=None):
    out, err = io.StringIO(), io.StringIO()
    code = run(argv, environ={} if environ is None else environ, stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


@pytest.mark.parametrize("name", sorted(GOLDEN_CASES))
def test_golden(name):
    code, out, err = invoke(GOLDEN_CASES[name])
    assert code == EXIT_OK, err
    path = GOLDEN / f"{name}.json"
    if UPDATE:
        GOLDEN.mkdir(exist_ok=True)
        path.write_text(out)
    assert out == path.read_text()


def test_byte_identical_reruns():
    argv = GOLDEN_CASES["core_triangle_all"]
    assert invoke(argv)[1] == invoke(argv)[1]


def test_spike_limits_example():
    code, out, _ = invoke(["limits", "--seq", "sparse_spike", "--ideal", "fin", "--N", "10000"])
    d = json.loads(out)
    assert code == 0 and d["ilimsup"] == 1.0 and d["iliminf"] == 0.0 and d["N"] == 10000


def test_core_all_example():
    code, out, _ = invoke(["core", "--seq", "alt", "--ideal", "fin", "--N", "10000", "--method", "all"])
    d = json.loads(out)
    assert code == 0
    assert set(d["constructions"]) == {"support", "cluster", "balls"}
    diam = [c["diameter"] for c in d["constructions"].values()]
    tol = d["params"]["tol_equiv"]
    assert max(diam) - min(diam) <= tol
    assert d["cross_check"]["agree"]


def test_unbounded_exit_code():
    code, out, err = invoke(["core", "--seq", "alt_linear", "--ideal", "density(0.05)"])
    assert code == EXIT_UNBOUNDED and out == ""
    assert err.count("\n") == 1 and "not I-bounded" in err


def test_bound_none_skips_check():
    code, out, _ = invoke(["limits", "--seq", "alt_linear", "--ideal", "z", "--N", "100", "--bound", "none"])
    assert code == 0 and json.loads(out)["params"]["bound"] is None


@pytest.mark.parametrize(
    "argv",
    [
        ["limits", "--seq", "alt", "--ideal", "fin", "--N", "8"],
        ["limits", "--seq", "alt", "--ideal", "fin", "--delta", "0"],
        ["limits", "--seq", "alt", "--ideal", "fin", "--tol", "-1"],
        ["limits", "--seq", "alt", "--ideal", "fin", "--delta", "abc"],
        ["limits", "--seq", "alt", "--ideal", "nonsense"],
        ["limits", "--seq", "nonsense", "--ideal", "fin"],
        ["limits", "--seq", "alt"],
        ["limits", "--seq", "cycle([(0,0),(1,1)])", "--ideal", "fin"],
        ["core", "--seq", "alt", "--ideal", "fin", "--method", "magic"],
        ["euler", "--seq", "alt", "--r", "9"],
        ["double", "--seq", "alt", "--mode", "e"],
        ["verify", "--item", "no_such_item"],
        ["frobnicate"],
        ["limits", "--seq", "missing.csv", "--ideal", "fin"],
    ],
)
def test_config_errors(argv):
    code, out, err = invoke(argv)
    assert code == EXIT_CONFIG
    assert out == ""


def test_env_override_and_precedence():
    code, out, _ = invoke(["limits", "--seq", "alt", "--ideal", "fin", "--N", "100"], {"IDEALCORE_DELTA": "0.05"})
    assert json.loads(out)["params"]["delta"] == 0.05
    code, out, _ = invoke(["limits", "--seq", "alt", "--ideal", "fin", "--N", "100", "--delta", "0.2"], {"IDEALCORE_DELTA": "0.05"})
    assert json.loads(out)["params"]["delta"] == 0.2
    code, _, err = invoke(["limits", "--seq", "alt", "--ideal", "fin"], {"IDEALCORE_DELTAA": "0.05"})
    assert code == EXIT_CONFIG and "IDEALCORE_DELTAA" in err


def test_config_file(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"delta": 0.02, "scale": 500}))
    code, out, _ = invoke(["limits", "--seq", "alt", "--ideal", "fin", "--config", str(cfg)])
    p = json.loads(out)["params"]
    assert code == 0 and p["delta"] == 0.02 and p["scale"] == 500
    cfg.write_text(json.dumps({"delta": 0.02, "colour": "blue"}))
    code, _, err = invoke(["limits", "--seq", "alt", "--ideal", "fin", "--config", str(cfg)])
    assert code == EXIT_CONFIG and "colour" in err


def test_params_echo_every_setting():
    _, out, _ = invoke(["core", "--seq", "alt", "--ideal", "fin", "--N", "100"])
    p = json.loads(out)["params"]
    for key in ("delta", "eps_final", "tol", "tol_equiv", "bound", "directions", "centers", "scale", "seq", "ideal", "method", "format"):
        assert key in p


def test_csv_output_and_out_file(tmp_path):
    target = tmp_path / "c.csv"
    code, out, _ = invoke(["clusters", "--seq", "alt", "--ideal", "fin", "--N", "1000", "--format", "csv", "--out", str(target)])
    assert code == 0 and out == ""
    rows = target.read_text().splitlines()
    assert rows[0] == "x1,radius"
    pts = np.array([float(r.split(",")[0]) for r in rows[1:]])
    assert np.all(np.abs(np.abs(pts) - 1) <= 0.01)


def test_csv_sequence_input(tmp_path):
    p = export_csv(generate("alt_decay", 400), tmp_path / "x.csv")
    code, out, _ = invoke(["limits", "--seq", str(p), "--ideal", "fin"])
    d = json.loads(out)
    assert code == 0 and d["N"] == 400 and d["params"]["source"] == str(p)
    code, _, err = invoke(["limits", "--seq", str(p), "--ideal", "fin", "--N", "300"])
    assert code == EXIT_CONFIG


def test_verify_item():
    code, out, _ = invoke(["verify", "--item", "alt_fin"])
    d = json.loads(out)
    assert code == 0 and d["pass"]
    assert set(d["checks"]) == {"support_vs_cluster_hull", "ball_probe_agreement", "clusters_inside_cores", "small_set_perturbation"}


def test_console_entry_point_process():
    proc = subprocess.run(
        [sys.executable, "-m", "idealcore", "core", "--seq", "alt_linear", "--ideal", "density(0.05)"],
        capture_output=True,
        text=True,
        env={k: v for k, v in os.environ.items() if not k.startswith("IDEALCORE_")},
    )
    assert proc.returncode == EXIT_UNBOUNDED
    assert proc.stderr.startswith("idealcore: unbounded sequence")
