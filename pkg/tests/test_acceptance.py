"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines and the measured margins.
"""

import json
import math

import numpy as np
import pytest

from anatomy import (
    GateConfig,
    SingleModeState,
    compute_trajectory,
    emission_probabilities,
    husimi_effect_route,
    husimi_wavefunction_route,
    oracle_extract,
    oracle_propagate,
    reduced_mode_state,
    run_sweep,
    wigner_eval,
)
from anatomy.cli import main
from tests.test_collision import extrapolated_delta_n, rabi_delta_n

GAMMA_TAU = 0.075
THETA_REF = 0.93
N_BINS = 4000
SWEEP_POINTS = 64


def report(number, name, ok, detail):
    print(f"ACCEPTANCE {number} ({name}): {'PASS' if ok else 'FAIL'}  {detail}")
    return ok


@pytest.fixture(scope="module")
def cfg():
    return GateConfig.from_dimensionless(GAMMA_TAU, THETA_REF, n_bins=N_BINS)


@pytest.fixture(scope="module")
def sweep(cfg):
    return run_sweep(cfg, compare_truncation=True)


@pytest.fixture(scope="module")
def oracle800():
    ocfg = GateConfig.from_dimensionless(GAMMA_TAU, THETA_REF, n_bins=800)
    return ocfg, oracle_propagate(ocfg)


def test_criterion_1_anomalous_weak_value(cfg, sweep):
    slack = 10.0 * cfg.dt
    dn_e = np.array([row.delta_n["e"] for row in sweep])
    dn_g = np.array([row.delta_n["g"] for row in sweep])
    thetas = np.array([row.theta for row in sweep])
    in_band = bool(np.all(dn_e >= -1.0 - slack) and np.all(dn_e <= slack))
    anomalous = np.where(dn_g < -1.0)[0]
    contiguous = anomalous.size > 0 and bool(np.all(np.diff(anomalous) == 1))
    window = thetas[anomalous] / math.pi if anomalous.size else []
    contains_ref = anomalous.size > 0 and window[0] <= THETA_REF <= window[-1]
    ok = in_band and contiguous and contains_ref
    detail = (
        f"dN_e in [{dn_e.min():.4f}, {dn_e.max():.4f}]; "
        f"anomalous window theta/pi = [{window[0]:.3f}, {window[-1]:.3f}]"
    )
    assert report(1, "anomalous weak value", ok, detail)


def test_criterion_2_conservation(cfg, sweep):
    slack = 10.0 * cfg.dt
    errs = [
        abs(r.P["g"] * r.delta_n["g"] + r.P["e"] * r.delta_n["e"] + r.P["e"])
        for r in sweep
    ]
    ok = max(errs) <= slack
    assert report(2, "conservation identity", ok, f"max |err| = {max(errs):.2e} <= {slack:.2e}")


def test_criterion_3_zero_decay_closed_forms():
    worst = 0.0
    for theta_over_pi in (0.25, 0.5, 0.75, 0.9):
        theta = theta_over_pi * math.pi
        for eps in ("g", "e"):
            value = extrapolated_delta_n(1e-6, theta_over_pi, eps)
            worst = max(worst, abs(value - rabi_delta_n(theta, eps)))
    ok = worst <= 1e-3
    assert report(3, "zero-decay closed forms", ok, f"max |err| = {worst:.2e} <= 1e-3")


def test_criterion_4_truncation_study(sweep):
    dev2 = max(
        abs(r.delta_n_trunc2[eps] - r.delta_n[eps]) for r in sweep for eps in ("g", "e")
    )
    above = [
        abs(r.delta_n_trunc1["g"] - r.delta_n["g"])
        for r in sweep
        if r.theta > 0.8 * math.pi
    ]
    ok = dev2 <= 0.05 and max(above) > 0.05
    detail = f"two-photon max dev = {dev2:.4f} <= 0.05; one-photon dev beyond 0.8 pi reaches {max(above):.3f}"
    assert report(4, "truncation study", ok, detail)


def test_criterion_5_monochromatic_check(sweep):
    devs = {
        eps: max(abs(r.delta_n_mode[eps] - r.delta_n[eps]) for r in sweep)
        for eps in ("g", "e")
    }
    ok = max(devs.values()) <= 0.05
    detail = f"max |dN(mode) - dN| = g: {devs['g']:.4f}, e: {devs['e']:.4f} (tol 0.05)"
    assert report(5, "monochromatic check", ok, detail), (
        "The flat carrier-mode reduction genuinely departs from the full-field "
        "excitation change for the ground readout at large gate angles; see the "
        "emission-shape analysis in the validation notes."
    )


def test_criterion_6_negativity_correspondence(sweep):
    neg_e_max = max(r.neg["e"] for r in sweep)
    anomalous = {i for i, r in enumerate(sweep) if r.delta_n["g"] < -1.0}
    negative = {i for i, r in enumerate(sweep) if r.neg["g"] > 1e-4}
    lo_gap = abs(min(anomalous) - min(negative)) if anomalous and negative else 99
    hi_gap = abs(max(anomalous) - max(negative)) if anomalous and negative else 99
    ok = neg_e_max <= 1e-3 and lo_gap <= 1 and hi_gap <= 1
    detail = (
        f"max N(W_e) = {neg_e_max:.2e}; window-edge offsets (grid points): "
        f"low {lo_gap}, high {hi_gap} (tol 1)"
    )
    assert report(6, "negativity correspondence", ok, detail), (
        "Negativity of the carrier-mode state turns on continuously at the "
        "anomaly onset but crosses the 1e-4 threshold only deeper into the "
        "window, and persists at theta = pi where the anomaly has closed."
    )


def test_criterion_7_fock_one_negativity():
    state = SingleModeState(
        matrix=np.diag([0.0, 1.0, 0.0]).astype(complex),
        f1_bar=0.0, f2_bar=0.0, f0=0.0, alpha=0.0, outcome="g", P=1.0,
    )
    grid = wigner_eval(state)
    expected = 4.0 * math.exp(-0.5) - 2.0
    err = abs(grid.negativity - expected)
    ok = err <= 1e-4
    assert report(7, "single-photon negativity", ok, f"|err| = {err:.2e} <= 1e-4")


def test_criterion_8_oracle_equivalence(oracle800):
    ocfg, state = oracle800
    tol = max(10.0 * ocfg.dt, 2e-3)
    amps = emission_probabilities(ocfg)
    upper = np.triu_indices(ocfg.n_bins, k=1)
    worst = {"P": 0.0, "amps": 0.0, "dN": 0.0, "mode": 0.0}
    for eps in ("g", "e"):
        summary = oracle_extract(state, eps)
        worst["P"] = max(worst["P"], abs(summary.P - amps.P[eps]))
        worst["amps"] = max(
            worst["amps"],
            abs(summary.f0_sample - amps.f0[eps]),
            float(np.abs(summary.f1_samples - amps.f1[eps]).max()),
            float(np.abs(summary.f2_samples[upper] - amps.f2_wedge(eps)[upper]).max()),
        )
        worst["dN"] = max(
            worst["dN"],
            abs(summary.delta_n - extrapolated_delta_n(GAMMA_TAU, THETA_REF, eps)),
        )
        reference = reduced_mode_state(amps, ocfg, eps).matrix
        worst["mode"] = max(worst["mode"], float(np.abs(summary.mode_matrix - reference).max()))

    # discretization error halves when the oracle grid doubles
    errors = {}
    for n_bins in (400, 800):
        cfg_n = ocfg.with_updates(n_bins=n_bins)
        st = state if n_bins == 800 else oracle_propagate(cfg_n)
        amps_n = emission_probabilities(cfg_n)
        errors[n_bins] = max(
            float(np.abs(oracle_extract(st, eps).f1_samples - amps_n.f1[eps]).max())
            for eps in ("g", "e")
        )
    halving = errors[400] / errors[800]

    ok = max(worst.values()) <= tol and halving >= 1.8
    detail = (
        f"max errs P={worst['P']:.1e} amps={worst['amps']:.1e} dN={worst['dN']:.1e} "
        f"mode={worst['mode']:.1e} (tol {tol:.1e}); halving ratio {halving:.2f}"
    )
    assert report(8, "oracle equivalence suite", ok, detail)


def test_criterion_9_dual_route_husimi(cfg):
    traj = compute_trajectory(cfg)
    amps = emission_probabilities(cfg)
    tol = 10.0 * cfg.dt**1.5
    bins = (0, cfg.n_bins // 4, cfg.n_bins // 2, 3 * cfg.n_bins // 4, cfg.n_bins - 1)
    worst_diff = worst_norm = 0.0
    for n in bins:
        for eps in ("g", "e"):
            eff = husimi_effect_route(traj, cfg, eps, n)
            wav = husimi_wavefunction_route(amps, cfg, eps, n)
            worst_diff = max(worst_diff, float(np.abs(eff.values - wav.values).max()))
            worst_norm = max(worst_norm, abs(eff.norm() - 1.0), abs(wav.norm() - 1.0))
    ok = worst_diff <= tol and worst_norm <= 1e-4
    detail = f"max route diff = {worst_diff:.2e} <= {tol:.2e}; norm dev {worst_norm:.1e}"
    assert report(9, "dual-route Husimi", ok, detail)


def test_criterion_10_validate_run(tmp_path):
    out = tmp_path / "validate"
    code = main([
        "validate", "--oracle-bins", "400",
        "--gamma-tau", str(GAMMA_TAU), "--theta-over-pi", str(THETA_REF),
        "--out-dir", str(out),
    ])
    report_data = json.loads((out / "validation.json").read_text())
    failed = [c["name"] for c in report_data["checks"] if not c["pass"]]
    ok = code == 0 and report_data["all_pass"]
    assert report(10, "validation suite green", ok, f"exit={code}, failed={failed or 'none'}")
