"""Parameters and unit conventions for the driven-emitter gate simulations.

The physical setup is a two-level emitter in a one-dimensional waveguide,
driven on resonance by a square coherent pulse of duration ``tau`` and pulse
area ``theta = omega * tau``.  Everything downstream (collision propagation,
closed-form amplitudes, phase-space grids, the brute-force oracle) reads its
parameters from a single immutable :class:`GateConfig`.

Conventions fixed here once and for all:

* rotating frame at the drive frequency, so all amplitudes are real;
* the field is quantized over the pulse window, which makes the carrier
  mode's coherent amplitude ``alpha = (theta / 2) / sqrt(gamma * tau)``;
* ``n_bins`` sets both the collision step and the time-quadrature grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

OUTCOMES = ("g", "e")

# keys accepted in flat key=value config files, with their parsers
_FILE_KEYS = {
    "gamma_tau": float,
    "theta_over_pi": float,
    "n_bins": int,
    "photon_cap": int,
    "grid_half_width": float,
    "grid_step": float,
}


class ConfigError(ValueError):
    """Raised for invalid or inconsistent gate parameters."""


@dataclass(frozen=True)
class GateConfig:
    """Immutable bundle of physical and numerical gate parameters.

    Attributes:
        gamma: emitter decay rate (1/time), >= 0.
        tau: pulse duration (time), > 0.
        theta: pulse area ``omega * tau`` (radians), >= 0.
        n_bins: number of collision time bins; also the quadrature grid size.
        photon_cap: emitted-photon truncation of the analytic expansions,
            1 or 2.
        grid_half_width: optional override of the phase-space grid half width
            (defaults are chosen per consumer).
        grid_step: optional override of the phase-space grid step.
    """

    gamma: float
    tau: float
    theta: float
    n_bins: int = 4000
    photon_cap: int = 2
    grid_half_width: float | None = None
    grid_step: float | None = None

    def __post_init__(self):
        if not self.gamma >= 0.0:
            raise ConfigError(f"gamma must be >= 0, got {self.gamma}")
        if not self.tau > 0.0:
            raise ConfigError(f"tau must be > 0, got {self.tau}")
        if not self.theta >= 0.0:
            raise ConfigError(f"theta must be >= 0, got {self.theta}")
        if self.n_bins < 2:
            raise ConfigError(f"n_bins must be >= 2, got {self.n_bins}")
        if self.photon_cap not in (1, 2):
            raise ConfigError(f"photon_cap must be 1 or 2, got {self.photon_cap}")
        if self.grid_step is not None and not self.grid_step > 0.0:
            raise ConfigError("grid_step must be > 0")
        if self.grid_half_width is not None and not self.grid_half_width > 0.0:
            raise ConfigError("grid_half_width must be > 0")

    @classmethod
    def from_dimensionless(
        cls,
        gamma_tau: float,
        theta_over_pi: float,
        *,
        tau: float = 1.0,
        **kwargs,
    ) -> "GateConfig":
        """Build a config from the dimensionless knobs gamma*tau and theta/pi."""
        return cls(
            gamma=gamma_tau / tau,
            tau=tau,
            theta=theta_over_pi * math.pi,
            **kwargs,
        )

    # -- derived quantities -------------------------------------------------

    @property
    def omega(self) -> float:
        """Rabi frequency of the resonant drive (1/time)."""
        return self.theta / self.tau

    @property
    def dt(self) -> float:
        """Collision time step."""
        return self.tau / self.n_bins

    @property
    def gamma_tau(self) -> float:
        return self.gamma * self.tau

    @property
    def theta_over_pi(self) -> float:
        return self.theta / math.pi

    @property
    def alpha(self) -> float:
        """Coherent amplitude of the carrier mode under the pulse-window
        quantization.

        Diverges as gamma -> 0 at fixed theta; the limit is returned as
        ``inf`` so that fluorescence-free identities still hold.  Operations
        that need a finite amplitude must check ``gamma > 0`` themselves.
        """
        if self.gamma == 0.0:
            return math.inf
        return (self.theta / 2.0) / math.sqrt(self.gamma * self.tau)

    @property
    def alpha_bin(self) -> float:
        """Per-bin coherent amplitude alpha * sqrt(dt / tau)."""
        return self.alpha * math.sqrt(self.dt / self.tau)

    def bin_times(self) -> np.ndarray:
        """Collision grid t_0 .. t_N (length n_bins + 1)."""
        return np.linspace(0.0, self.tau, self.n_bins + 1)

    def bin_midpoints(self) -> np.ndarray:
        """Midpoints of the collision bins (length n_bins)."""
        return (np.arange(self.n_bins) + 0.5) * self.dt

    def with_updates(self, **kwargs) -> "GateConfig":
        return replace(self, **kwargs)


def parse_config_text(text: str) -> dict:
    """Parse flat ``key = value`` text into a dict of typed values.

    Blank lines and ``#`` comments are ignored.  Unknown keys are an error so
    that typos do not silently fall back to defaults.
    """
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line:
            key, _, val = line.partition("=")
        else:
            parts = line.split(None, 1)
            if len(parts) != 2:
                raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
            key, val = parts
        key = key.strip()
        if key not in _FILE_KEYS:
            raise ConfigError(f"line {lineno}: unknown config key {key!r}")
        try:
            values[key] = _FILE_KEYS[key](val.strip())
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {val.strip()!r}") from exc
    return values


def load_config_file(path: str | Path) -> dict:
    """Read a flat key=value config file."""
    return parse_config_text(Path(path).read_text(encoding="utf-8"))


def build_config(file_values: dict | None = None, overrides: dict | None = None) -> GateConfig:
    """Merge config-file values with per-run overrides into a GateConfig.

    Overrides (typically CLI flags) win over file values, which win over the
    defaults: gamma_tau = 3/40, theta_over_pi = 0.93, n_bins = 4000,
    photon_cap = 2.
    """
    merged = {"gamma_tau": 3.0 / 40.0, "theta_over_pi": 0.93}
    for source in (file_values or {}), (overrides or {}):
        merged.update({k: v for k, v in source.items() if v is not None})
    gamma_tau = merged.pop("gamma_tau")
    theta_over_pi = merged.pop("theta_over_pi")
    return GateConfig.from_dimensionless(gamma_tau, theta_over_pi, **merged)
