import pytest

from anatomy import GateConfig, compute_trajectory, emission_probabilities, oracle_propagate

# reference operating point used throughout: gamma*tau = 3/40, theta = 0.93 pi
GAMMA_TAU = 0.075
THETA_OVER_PI = 0.93


@pytest.fixture(scope="session")
def ref_cfg():
    return GateConfig.from_dimensionless(GAMMA_TAU, THETA_OVER_PI, n_bins=2000)


@pytest.fixture(scope="session")
def ref_traj(ref_cfg):
    return compute_trajectory(ref_cfg)


@pytest.fixture(scope="session")
def ref_amps(ref_cfg):
    return emission_probabilities(ref_cfg)


@pytest.fixture(scope="session")
def oracle_cfg():
    return GateConfig.from_dimensionless(GAMMA_TAU, THETA_OVER_PI, n_bins=400)


@pytest.fixture(scope="session")
def oracle_state(oracle_cfg):
    return oracle_propagate(oracle_cfg)
