"""Energetics of a resonant single-qubit gate driven through a waveguide.

Conditional (post-selected) field observables of the gate: weak values of
the emitter dipole and of the output intensity, conditional Husimi and
Wigner quasi-probability functions, Wigner negativity, and a brute-force
collision-model oracle validating every closed form.
"""

__version__ = "0.1.0"

from .config import GateConfig, ConfigError, build_config, load_config_file
from .amplitudes import (
    WaveAmplitudes,
    emission_probabilities,
    one_photon_amplitude,
    two_photon_amplitude,
    vacuum_amplitude,
)
from .collision import (
    UnlikelyPostselectionError,
    WeakTrajectory,
    backward_propagate,
    collision_kraus,
    compute_trajectory,
    cumulative_delta_n,
    delta_n_exact,
    forward_propagate,
    weak_output_mean,
    weak_sigma,
)
from .husimi import (
    GridTruncationError,
    HusimiSlice,
    delta_n_truncated,
    husimi_effect_route,
    husimi_wavefunction_route,
    intensity_weak_value,
    moment,
    reconstruct_delta_n,
)
from .wigner import (
    SingleModeState,
    WignerGrid,
    delta_n_from_grid,
    delta_n_single_mode,
    mode_overlaps,
    negativity,
    reduced_mode_state,
    wigner_eval,
    wigner_kernel_eval,
)
from .oracle import (
    CapOverflowError,
    OracleSummary,
    SectorState,
    oracle_extract,
    oracle_propagate,
    oracle_weak_values,
)
from .sweep import default_theta_grid, run_sweep, sweep_table
from .validate import run_validation

__all__ = [
    "GateConfig", "ConfigError", "build_config", "load_config_file",
    "WaveAmplitudes", "emission_probabilities", "vacuum_amplitude",
    "one_photon_amplitude", "two_photon_amplitude",
    "UnlikelyPostselectionError", "WeakTrajectory", "collision_kraus",
    "forward_propagate", "backward_propagate", "compute_trajectory",
    "weak_sigma", "weak_output_mean", "delta_n_exact", "cumulative_delta_n",
    "GridTruncationError", "HusimiSlice", "husimi_effect_route",
    "husimi_wavefunction_route", "moment", "intensity_weak_value",
    "reconstruct_delta_n", "delta_n_truncated",
    "SingleModeState", "WignerGrid", "mode_overlaps", "reduced_mode_state",
    "wigner_eval", "wigner_kernel_eval", "negativity", "delta_n_single_mode",
    "delta_n_from_grid",
    "CapOverflowError", "OracleSummary", "SectorState", "oracle_propagate",
    "oracle_extract", "oracle_weak_values",
    "default_theta_grid", "run_sweep", "sweep_table", "run_validation",
]
