"""Conditional Husimi function of one time-bin mode, by two routes.

Route one evaluates the closed form obtained from the forward states and
backward effects: a Gaussian around the per-bin coherent amplitude with a
quadratic correction weighted by the conditional emission weight and a
linear correction weighted by the conditional dipole.  Route two builds the
same function from the truncated output-field wavefunction, with explicit
sums over the partner bins of the two-photon component.  Their pointwise
agreement is one of the package's strongest consistency checks.

Moments come in two flavours: the analytic ones (Gaussian moment identities
applied to the polynomial prefactor, used in production) and plain Riemann
sums over the grid (kept as the internal oracle).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .amplitudes import WaveAmplitudes
from .collision import WeakTrajectory
from .config import GateConfig

DEFAULT_HALF_WIDTH = 5.0
DEFAULT_STEP = 0.05

#: relative boundary mass above which a grid is considered too narrow
BOUNDARY_TOL = 1e-8


class GridTruncationError(ValueError):
    """Raised when a phase-space grid visibly cuts off the distribution."""


def phase_grid(half_width: float, step: float) -> np.ndarray:
    """Cell-centered square grid of complex offsets around zero."""
    m = int(round(2.0 * half_width / step))
    coords = -half_width + (np.arange(m) + 0.5) * step
    return coords[None, :] + 1j * coords[:, None]


def _grid_params(cfg: GateConfig, half_width, step):
    hw = half_width if half_width is not None else (cfg.grid_half_width or DEFAULT_HALF_WIDTH)
    hs = step if step is not None else (cfg.grid_step or DEFAULT_STEP)
    return hw, hs


@dataclass(frozen=True)
class HusimiSlice:
    """Husimi function of one bin mode on a square grid.

    ``offsets`` are grid points relative to the bin's coherent amplitude
    ``alpha_n`` (which is infinite in the zero-decay limit, hence the split
    representation).  ``quad_coeff`` and ``lin_coeff`` are the polynomial
    coefficients of the evaluated closed form; they make moments available
    without touching the grid.
    """

    n: int
    alpha_n: float
    offsets: np.ndarray
    step: float
    half_width: float
    values: np.ndarray
    route: str
    dt: float
    quad_coeff: float
    lin_coeff: complex

    def points(self) -> np.ndarray:
        """Absolute grid coordinates; requires a finite center."""
        if not math.isfinite(self.alpha_n):
            raise ValueError("grid center is infinite (zero-decay limit)")
        return self.alpha_n + self.offsets

    def norm(self) -> float:
        """Riemann-sum normalization of the stored values."""
        return float(np.sum(self.values)) * self.step**2

    def mean_analytic(self) -> complex:
        """First moment from the Gaussian identities (exact for the form)."""
        return self.alpha_n - np.conj(self.lin_coeff)

    def intensity_analytic(self) -> float:
        """Photon-flux moment of the slice, scaled to units 1/time."""
        value = (
            abs(self.alpha_n) ** 2
            + self.quad_coeff
            - 2.0 * np.real(self.alpha_n * self.lin_coeff)
        )
        return value / self.dt


def _assemble(cfg, n, alpha_n, quad_coeff, lin_coeff, route, half_width, step) -> HusimiSlice:
    hw, hs = _grid_params(cfg, half_width, step)
    offsets = phase_grid(hw, hs)
    radius_sq = np.abs(offsets) ** 2
    envelope = np.exp(-radius_sq) / np.pi
    values = envelope * (
        1.0
        + quad_coeff * (radius_sq - 1.0)
        - 2.0 * np.real(offsets * lin_coeff)
    )
    return HusimiSlice(
        n=n, alpha_n=alpha_n, offsets=offsets, step=hs, half_width=hw,
        values=values, route=route, dt=cfg.dt,
        quad_coeff=float(quad_coeff), lin_coeff=complex(lin_coeff),
    )


def husimi_effect_route(
    traj: WeakTrajectory,
    cfg: GateConfig,
    outcome: str,
    n: int,
    *,
    half_width: float | None = None,
    step: float | None = None,
) -> HusimiSlice:
    """Conditional Husimi function from the state/effect pairing at bin n."""
    traj.require_outcome(outcome)
    quad = cfg.gamma * cfg.dt * traj.J[outcome][n]
    lin = math.sqrt(cfg.gamma * cfg.dt) * traj.sigma_wv[outcome][n]
    return _assemble(cfg, n, cfg.alpha_bin, quad, lin, "effect", half_width, step)


def husimi_wavefunction_route(
    amps: WaveAmplitudes,
    cfg: GateConfig,
    outcome: str,
    n: int,
    *,
    half_width: float | None = None,
    step: float | None = None,
) -> HusimiSlice:
    """Conditional Husimi function from the truncated field wavefunction.

    The quadratic coefficient collects the one-photon intensity of bin n and
    the two-photon intensity against every partner bin; the linear one pairs
    the vacuum with one emission and one emission with two.
    """
    if cfg.photon_cap < 2:
        raise ValueError("wavefunction route requires photon_cap = 2")
    P = amps.P[outcome]
    flux = amps.f1[outcome][n] ** 2 * cfg.dt + cfg.dt * amps.ordered_pairs_flux(outcome)[n]
    overlap = amps.f1[outcome][n] * amps.f0[outcome] + amps.chain_overlap(outcome)[n]
    quad = flux / P
    lin = math.sqrt(cfg.dt) * overlap / P
    return _assemble(cfg, n, cfg.alpha_bin, quad, lin, "wavefunction", half_width, step)


def _check_boundary(slice_: HusimiSlice) -> None:
    vals = np.abs(slice_.values)
    peak = float(vals.max())
    if peak == 0.0:
        return
    edge = max(
        float(vals[0].max()), float(vals[-1].max()),
        float(vals[:, 0].max()), float(vals[:, -1].max()),
    )
    if edge / peak > BOUNDARY_TOL:
        raise GridTruncationError(
            f"boundary holds {edge / peak:.2e} of the peak; widen the grid"
        )


def moment(slice_: HusimiSlice, m_order: int, l_order: int) -> complex:
    """Riemann-sum moment  integral conj(s)^m s^l Q(s) d^2s  over the grid."""
    _check_boundary(slice_)
    pts = slice_.points()
    integrand = np.conj(pts) ** m_order * pts**l_order * slice_.values
    return complex(np.sum(integrand) * slice_.step**2)


def intensity_weak_value(slice_: HusimiSlice, cfg: GateConfig) -> float:
    """Conditional output photon flux at the slice's bin (units 1/time).

    Production path: analytic moments of the closed form.  The Riemann
    counterpart is ``(moment(s,1,1) - moment(s,0,0)) / dt``.
    """
    return slice_.intensity_analytic()


def reconstruct_delta_n(traj: WeakTrajectory, cfg: GateConfig, outcome: str) -> float:
    """Excitation change rebuilt from per-bin intensities minus the input.

    Uses the analytic per-bin intensities (no grids); the input intensity is
    subtracted bin by bin at its discrete per-bin value.
    """
    traj.require_outcome(outcome)
    if cfg.gamma == 0.0:
        return 0.0  # output flux equals the input flux bin by bin
    quad = cfg.gamma * cfg.dt * traj.J[outcome][:-1]
    lin = math.sqrt(cfg.gamma * cfg.dt) * np.real(traj.sigma_wv[outcome][:-1])
    alpha_n = cfg.alpha_bin
    flux_minus_input = (quad - 2.0 * alpha_n * lin) / cfg.dt
    return float(np.sum(flux_minus_input) * cfg.dt)


def delta_n_truncated(amps: WaveAmplitudes, cfg: GateConfig, outcome: str) -> float:
    """Excitation change from the truncated wavefunction.

    Emitted-photon number plus the interference between the drive and the
    emission amplitudes, with the drive amplitude folded in through the Rabi
    frequency so the zero-decay limit stays finite.  With photon_cap = 1 all
    two-photon terms are dropped (including their share of the readout
    probability), which is what makes the truncation study meaningful.
    """
    if cfg.gamma == 0.0:
        return 0.0  # no fluorescence: nothing emitted, nothing interferes
    p0, p1, p2 = amps.pj[outcome]
    dt = cfg.dt
    tail = amps.tail[outcome]
    head = amps.f0e_mid

    # drive amplitude enters only through omega = 2 * alpha * sqrt(gamma/tau)
    first_overlap = dt * float(np.sum(tail * head))
    interference = -cfg.omega * amps.f0[outcome] * first_overlap

    if cfg.photon_cap >= 2:
        chain_total = dt * float(np.sum(amps.chain_overlap(outcome)))
        interference -= (cfg.omega / math.sqrt(cfg.gamma)) * chain_total
        number = p1 + 2.0 * p2
        P = p0 + p1 + p2
    else:
        number = p1
        P = p0 + p1
    return (number + interference) / P
