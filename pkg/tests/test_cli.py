import csv
import hashlib
import json

import numpy as np
import pytest

from anatomy.cli import main


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], [[float(v) for v in row] for row in rows[1:]]


def run(args):
    return main(args)


def test_trajectory_schema_and_physics(tmp_path):
    out = tmp_path / "run"
    code = run([
        "trajectory", "--gamma-tau", "0.075", "--theta-over-pi", "0.93",
        "--n-bins", "800", "--out-dir", str(out),
    ])
    assert code == 0
    header, rows = read_csv(out / "trajectory.csv")
    assert header == [
        "t", "rho_gg", "rho_ee", "re_rho_ge", "im_rho_ge",
        "sigma_wv_g", "sigma_wv_e", "J_g", "J_e", "cum_dN_g", "cum_dN_e",
    ]
    assert len(rows) == 801
    data = np.array(rows)
    dt = 1.0 / 800
    # unconditional running balance against the excited population
    col = dict(zip(header, data.T))
    p_g, p_e = 1 - col["rho_ee"][-1], col["rho_ee"][-1]
    balance = p_g * col["cum_dN_g"] + p_e * col["cum_dN_e"] + col["rho_ee"]
    assert np.abs(balance).max() <= 10 * dt
    assert col["cum_dN_g"][-1] < -1.0  # anomalous at the default working point
    assert (out / "trajectory.svg").exists()
    manifest = json.loads((out / "manifest.json").read_text())
    assert "trajectory.csv" in manifest["outputs"]


def test_sweep_schema_conservation_determinism(tmp_path):
    args = [
        "sweep", "--points", "6", "--n-bins", "500",
        "--gamma-tau", "0.075", "--theta-over-pi", "0.93",
    ]
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        assert run(args + ["--out-dir", str(out)]) == 0
        outs.append(out)
    header, rows = read_csv(outs[0] / "sweep.csv")
    assert header[:9] == [
        "theta_over_pi", "P_g", "P_e", "dN_g", "dN_e",
        "dN_g_omega0", "dN_e_omega0", "neg_g", "neg_e",
    ]
    assert len(rows) == 6
    dt = 1.0 / 500
    for row in rows:
        rec = dict(zip(header, row))
        lhs = rec["P_g"] * rec["dN_g"] + rec["P_e"] * rec["dN_e"]
        assert abs(lhs + rec["P_e"]) <= 10 * dt
        assert rec["neg_e"] <= 1e-3
    # byte-identical reruns
    for name in ("sweep.csv",):
        b0 = (outs[0] / name).read_bytes()
        b1 = (outs[1] / name).read_bytes()
        assert b0 == b1
    manifest = json.loads((outs[0] / "manifest.json").read_text())
    digest = hashlib.sha256((outs[0] / "sweep.csv").read_bytes()).hexdigest()
    assert manifest["outputs"]["sweep.csv"] == digest


def test_sweep_truncation_columns(tmp_path):
    out = tmp_path / "t"
    assert run([
        "sweep", "--points", "4", "--n-bins", "400", "--compare-truncation",
        "--out-dir", str(out),
    ]) == 0
    header, rows = read_csv(out / "sweep.csv")
    assert header[9:] == ["dN_trunc1_g", "dN_trunc1_e", "dN_trunc2_g", "dN_trunc2_e"]
    assert len(rows) == 4


def test_wigner_outputs(tmp_path):
    out = tmp_path / "w"
    assert run([
        "wigner", "--gamma-tau", "0.075", "--theta-over-pi", "0.93",
        "--n-bins", "800", "--grid-step", "0.04", "--out-dir", str(out),
    ]) == 0
    _, rows_g = read_csv(out / "wigner_g.csv")
    _, rows_e = read_csv(out / "wigner_e.csv")
    w_g = np.array(rows_g)[:, 2]
    w_e = np.array(rows_e)[:, 2]
    assert w_g.min() < -1e-3  # negative cells for the ground readout
    assert w_e.min() >= -1e-6
    assert (out / "wigner_g.svg").exists() and (out / "wigner_e.svg").exists()


def test_husimi_slice_outputs(tmp_path):
    out = tmp_path / "h"
    assert run([
        "husimi-slice", "--n-bins", "600", "--bin", "300",
        "--route", "wavefunction", "--out-dir", str(out),
    ]) == 0
    header, rows = read_csv(out / "husimi_g_bin300_wavefunction.csv")
    assert header == ["re_s", "im_s", "Q"]
    sidecar = json.loads((out / "husimi_g_bin300_wavefunction.json").read_text())
    assert sidecar["bin"] == 300 and sidecar["route"] == "wavefunction"
    assert abs(sidecar["riemann_norm"] - 1.0) <= 1e-4


def test_validate_quick(tmp_path):
    out = tmp_path / "v"
    code = run(["validate", "--quick", "--n-bins", "2000", "--out-dir", str(out)])
    assert code == 0
    report = json.loads((out / "validation.json").read_text())
    assert report["all_pass"] is True
    assert all(c["pass"] for c in report["checks"])


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as err:
        main(["sweep", "--bogus-flag"])
    assert err.value.code == 2


def test_unwritable_out_dir(tmp_path):
    blocker = tmp_path / "occupied.txt"
    blocker.write_text("not a directory")
    code = run(["trajectory", "--n-bins", "300", "--out-dir", str(blocker / "sub")])
    assert code == 2


def test_degenerate_postselection_is_physics_failure(tmp_path):
    code = run([
        "trajectory", "--theta-over-pi", "0", "--n-bins", "300",
        "--out-dir", str(tmp_path / "d"),
    ])
    assert code == 1


def test_config_file_and_overrides(tmp_path):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text(
        "# reference point\n"
        "gamma_tau = 0.075\n"
        "theta_over_pi = 0.5\n"
        "n_bins = 400\n"
    )
    out = tmp_path / "c"
    assert run([
        "trajectory", "--config", str(cfg_file),
        "--theta-over-pi", "0.93", "--out-dir", str(out),
    ]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config"]["theta_over_pi"] == pytest.approx(0.93)  # flag wins
    assert manifest["config"]["n_bins"] == 400  # file value survives
    assert str(cfg_file) in manifest["input_hashes"]


def test_env_out_dir_fallback(tmp_path, monkeypatch):
    target = tmp_path / "from_env"
    monkeypatch.setenv("ANATOMY_OUT_DIR", str(target))
    assert run(["trajectory", "--n-bins", "300"]) == 0
    assert (target / "trajectory.csv").exists()


def test_jobs_assembly_is_order_stable(tmp_path):
    base = ["sweep", "--points", "5", "--n-bins", "400"]
    blobs = []
    for jobs, name in (("1", "j1"), ("3", "j3")):
        out = tmp_path / name
        assert run(base + ["--jobs", jobs, "--out-dir", str(out)]) == 0
        blobs.append((out / "sweep.csv").read_bytes())
    assert blobs[0] == blobs[1]


def test_bad_config_key_is_usage_error(tmp_path):
    cfg_file = tmp_path / "bad.cfg"
    cfg_file.write_text("gamma_tau = 0.075\nnot_a_key = 3\n")
    code = run(["sweep", "--config", str(cfg_file), "--out-dir", str(tmp_path / "x")])
    assert code == 2
