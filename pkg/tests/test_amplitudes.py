import math

import numpy as np
import pytest

from anatomy import (
    ConfigError,
    GateConfig,
    emission_probabilities,
    one_photon_amplitude,
    two_photon_amplitude,
    vacuum_amplitude,
)


def test_initial_state_amplitudes():
    cfg = GateConfig.from_dimensionless(0.075, 0.93)
    assert vacuum_amplitude("g", 0.0, cfg) == pytest.approx(1.0)
    assert vacuum_amplitude("e", 0.0, cfg) == pytest.approx(0.0)


@pytest.mark.parametrize("theta_over_pi", [0.3, 0.5, 0.93])
def test_classical_map_at_zero_decay(theta_over_pi):
    cfg = GateConfig.from_dimensionless(0.0, theta_over_pi)
    theta = theta_over_pi * math.pi
    assert vacuum_amplitude("g", cfg.tau, cfg) == pytest.approx(math.cos(theta / 2), abs=1e-14)
    assert vacuum_amplitude("e", cfg.tau, cfg) == pytest.approx(math.sin(theta / 2), abs=1e-14)
    ts = np.linspace(0.05, cfg.tau, 7)
    assert np.all(one_photon_amplitude("g", cfg.tau, ts, cfg) == 0.0)
    assert two_photon_amplitude("e", cfg.tau, 0.2, 0.7, cfg) == 0.0


def test_one_photon_vanishes_at_start():
    cfg = GateConfig.from_dimensionless(0.075, 0.93)
    assert one_photon_amplitude("e", cfg.tau, 0.0, cfg) == pytest.approx(0.0)


def test_two_photon_rejects_unordered_times():
    cfg = GateConfig.from_dimensionless(0.075, 0.93)
    with pytest.raises(ValueError):
        two_photon_amplitude("g", cfg.tau, 0.7, 0.2, cfg)
    with pytest.raises(ValueError):
        two_photon_amplitude("g", cfg.tau, 0.5, 0.5, cfg)


def test_continuity_through_damping_branch_point():
    # drive right at the over/underdamped boundary omega = gamma / 2; the
    # second difference isolates any branch jump from the smooth slope
    gamma = 1.0
    for eps in ("g", "e"):
        below = GateConfig(gamma=gamma, tau=1.0, theta=0.5 * gamma * (1 - 1e-6))
        above = GateConfig(gamma=gamma, tau=1.0, theta=0.5 * gamma * (1 + 1e-6))
        at = GateConfig(gamma=gamma, tau=1.0, theta=0.5 * gamma)
        vals = [vacuum_amplitude(eps, 0.8, c) for c in (below, at, above)]
        assert abs(vals[0] + vals[2] - 2 * vals[1]) < 1e-8
        assert abs(vals[2] - vals[0]) < 1e-6  # slope-dominated, no jump
        assert all(math.isfinite(v) for v in vals)


def test_probabilities_zero_decay():
    cfg = GateConfig.from_dimensionless(0.0, 0.7, n_bins=1000)
    amps = emission_probabilities(cfg)
    assert amps.P["e"] == pytest.approx(math.sin(0.35 * math.pi) ** 2, abs=1e-12)
    assert amps.pj["e"][1] == 0.0 and amps.pj["e"][2] == 0.0


def test_probabilities_zero_drive():
    cfg = GateConfig.from_dimensionless(0.075, 0.0, n_bins=500)
    amps = emission_probabilities(cfg)
    assert amps.P["g"] == pytest.approx(1.0, abs=1e-12)
    assert amps.pj["g"][1] == pytest.approx(0.0, abs=1e-15)
    assert amps.pj["g"][2] == pytest.approx(0.0, abs=1e-15)
    assert amps.P["e"] == pytest.approx(0.0, abs=1e-15)


def test_readout_normalization_reference(ref_amps):
    assert abs(ref_amps.P["g"] + ref_amps.P["e"] - 1.0) <= 1e-3


def test_quadrature_convergence(ref_cfg, ref_amps):
    fine = emission_probabilities(ref_cfg.with_updates(n_bins=2 * ref_cfg.n_bins))
    for eps in ("g", "e"):
        assert np.abs(fine.pj[eps] - ref_amps.pj[eps]).max() <= 1e-6


def test_sampled_arrays_match_pointwise(ref_cfg, ref_amps):
    mids = ref_cfg.bin_midpoints()
    for eps in ("g", "e"):
        direct = one_photon_amplitude(eps, ref_cfg.tau, mids[::97], ref_cfg)
        assert np.allclose(ref_amps.f1[eps][::97], direct, atol=1e-13)


def test_two_photon_wedge_matches_closed_form():
    cfg = GateConfig.from_dimensionless(0.075, 0.93, n_bins=60)
    amps = emission_probabilities(cfg)
    wedge = amps.f2_wedge("g")
    mids = cfg.bin_midpoints()
    for i, j in [(0, 1), (3, 40), (20, 59), (10, 11)]:
        assert wedge[i, j] == pytest.approx(
            two_photon_amplitude("g", cfg.tau, mids[i], mids[j], cfg), abs=1e-13
        )
    assert np.all(wedge[np.tril_indices(60)] == 0.0)


def test_config_invariants():
    with pytest.raises(ConfigError):
        GateConfig(gamma=-0.1, tau=1.0, theta=1.0)
    with pytest.raises(ConfigError):
        GateConfig(gamma=0.1, tau=1.0, theta=1.0, n_bins=1)
    with pytest.raises(ConfigError):
        GateConfig(gamma=0.1, tau=1.0, theta=1.0, photon_cap=3)
    cfg = GateConfig.from_dimensionless(0.075, 0.93)
    assert cfg.omega * cfg.tau == pytest.approx(cfg.theta)
    assert cfg.alpha**2 == pytest.approx(cfg.theta**2 / (4 * cfg.gamma * cfg.tau))
    assert GateConfig.from_dimensionless(0.0, 0.5).alpha == math.inf
