"""Reduced state of the carrier mode and its conditional Wigner function.

The carrier (flat-top) mode of the pulse window carries the coherent drive
plus whatever fluorescence lands at its frequency.  Tracing out every other
mode leaves a 3x3 matrix in the displaced Fock basis, built from the overlap
of the emission amplitudes with the flat mode.  The Wigner function is then
a Gaussian envelope times a quadratic-in-|mu|^2 polynomial (Laguerre terms
from the Fock diagonals, linear and quadratic cross terms from the
coherences).

Two independent evaluation paths: the closed form below (production), and a
generic displacement-parity transform of the same matrix built by matrix
exponentials (test oracle).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .amplitudes import WaveAmplitudes, _lower_conv
from .config import GateConfig
from .husimi import GridTruncationError, phase_grid

DEFAULT_HALF_WIDTH = 3.5
DEFAULT_STEP = 0.02

#: negativity above this is reported as genuinely nonzero
NEGATIVITY_FLOOR = 1e-4

_SQRT2 = math.sqrt(2.0)


def mode_overlaps(amps: WaveAmplitudes, cfg: GateConfig, outcome: str) -> tuple[float, float]:
    """Overlap of the one- and two-photon amplitudes with the flat mode.

    Both are plain window averages under the pulse-window quantization: the
    one-photon overlap carries units of a pure number times the mode weight,
    the two-photon one an extra window average over the ordered wedge.
    """
    dt = cfg.dt
    f1_bar = float(np.sum(amps.f1[outcome])) * dt / math.sqrt(cfg.tau)
    if cfg.photon_cap >= 2:
        conv = _lower_conv(amps.f0e_mid, amps.f0e_grid)
        f2_bar = cfg.gamma * dt**2 / cfg.tau * float(np.sum(amps.tail[outcome] * conv))
    else:
        f2_bar = 0.0
    return f1_bar, f2_bar


@dataclass(frozen=True)
class SingleModeState:
    """Conditional reduced state of the carrier mode (displaced frame).

    ``matrix`` is the 3x3 Fock-basis matrix; ``f1_bar``/``f2_bar`` the mode
    overlaps it was built from, ``f0`` the vacuum amplitude, ``alpha`` the
    coherent offset of the mode, ``P`` the readout probability.
    """

    matrix: np.ndarray
    f1_bar: float
    f2_bar: float
    f0: float
    alpha: float
    outcome: str
    P: float


def reduced_mode_state(amps: WaveAmplitudes, cfg: GateConfig, outcome: str) -> SingleModeState:
    """Trace the truncated field state down to the carrier mode.

    Off-mode photon weight is folded into the vacuum entry, which makes the
    trace exactly one by construction.  Two-photon configurations with one
    off-mode photon are dropped (their coherences are the 'unlikely pair at
    different frequencies' terms); the matrix stays positive because the
    dropped weight is nonnegative by the Cauchy-Schwarz inequality.
    """
    if cfg.photon_cap < 2:
        raise ValueError("reduced mode state requires photon_cap = 2")
    f1_bar, f2_bar = mode_overlaps(amps, cfg, outcome)
    f0 = amps.f0[outcome]
    P = amps.P[outcome]
    mat = np.array([
        [P - f1_bar**2 - 2.0 * f2_bar**2, -f1_bar * f0, _SQRT2 * f2_bar * f0],
        [-f1_bar * f0, f1_bar**2, -_SQRT2 * f2_bar * f1_bar],
        [_SQRT2 * f2_bar * f0, -_SQRT2 * f2_bar * f1_bar, 2.0 * f2_bar**2],
    ]) / P
    eigvals = np.linalg.eigvalsh(mat)
    if eigvals.min() < -1e-6:
        raise ValueError(
            f"truncation-inconsistent mode state: eigenvalue {eigvals.min():.3e}"
        )
    return SingleModeState(
        matrix=mat, f1_bar=f1_bar, f2_bar=f2_bar, f0=f0,
        alpha=cfg.alpha, outcome=outcome, P=P,
    )


@dataclass(frozen=True)
class WignerGrid:
    """Wigner function values on a square grid centered at the mode offset."""

    alpha: float
    offsets: np.ndarray
    step: float
    half_width: float
    values: np.ndarray
    negativity: float
    boundary_ok: bool

    def points(self) -> np.ndarray:
        return self.alpha + self.offsets

    def norm(self) -> float:
        return float(np.sum(self.values)) * self.step**2


def _closed_form(state: SingleModeState, beta: np.ndarray) -> np.ndarray:
    """Wigner values at displaced-frame coordinates ``beta``.

    Gaussian envelope times a polynomial in beta: Laguerre terms from the
    Fock diagonals, linear/quadratic terms from the coherences.
    """
    z = state.matrix
    beta = np.asarray(beta, dtype=complex)
    x = 4.0 * np.abs(beta) ** 2
    lag1 = 1.0 - x
    lag2 = 1.0 - 2.0 * x + 0.5 * x**2
    poly = (
        np.real(z[0, 0]) - np.real(z[1, 1]) * lag1 + np.real(z[2, 2]) * lag2
        + 2.0 * np.real(2.0 * beta * z[0, 1])
        + 2.0 * np.real(2.0 * _SQRT2 * beta**2 * z[0, 2])
        - 2.0 * np.real(_SQRT2 * beta * (2.0 - x) * z[1, 2])
    )
    return (2.0 / np.pi) * np.exp(-x / 2.0) * poly


def wigner_eval(
    state: SingleModeState,
    *,
    half_width: float = DEFAULT_HALF_WIDTH,
    step: float = DEFAULT_STEP,
) -> WignerGrid:
    """Evaluate the conditional Wigner function on a cell-centered grid."""
    if not math.isfinite(state.alpha):
        raise ValueError("mode amplitude undefined under the pulse-window convention")
    offsets = phase_grid(half_width, step)
    values = _closed_form(state, offsets)
    vals = np.abs(values)
    peak = float(vals.max())
    edge = max(
        float(vals[0].max()), float(vals[-1].max()),
        float(vals[:, 0].max()), float(vals[:, -1].max()),
    )
    boundary_ok = peak == 0.0 or edge / peak <= 1e-8
    raw = float(np.sum(np.abs(values)) * step**2) - 1.0
    return WignerGrid(
        alpha=state.alpha, offsets=offsets, step=step, half_width=half_width,
        values=values, negativity=max(0.0, raw), boundary_ok=boundary_ok,
    )


def negativity(grid: WignerGrid) -> float:
    """Integrated absolute value minus one, floored at zero."""
    raw = float(np.sum(np.abs(grid.values)) * grid.step**2) - 1.0
    return max(0.0, raw)


def delta_n_single_mode(state: SingleModeState, cfg: GateConfig) -> float:
    """Conditional excitation change of the carrier mode, from the matrix.

    Displaced-frame photon number plus the interference of the coherent
    offset with the mode coherences.
    """
    if cfg.gamma == 0.0:
        raise ValueError("mode amplitude undefined under the pulse-window convention")
    a, b, f0 = state.f1_bar, state.f2_bar, state.f0
    number = a**2 + 4.0 * b**2
    interference = -2.0 * state.alpha * (a * f0 + 2.0 * b * a)
    return (number + interference) / state.P


def delta_n_from_grid(grid: WignerGrid) -> float:
    """Excitation change from the Wigner moment integral (test path)."""
    if not grid.boundary_ok:
        raise GridTruncationError("Wigner grid truncates the distribution")
    pts = grid.points()
    moment = float(np.sum((np.abs(pts) ** 2 - 0.5) * grid.values)) * grid.step**2
    return moment - grid.alpha**2


def wigner_kernel_eval(state: SingleModeState, beta_points: np.ndarray, *, n_max: int = 100) -> np.ndarray:
    """Displacement-parity evaluation of the Wigner function (test oracle).

    W(alpha + beta) = (2/pi) Tr[ D(-beta) rho D(beta) parity ], evaluated by
    exponentiating the displacement generator on a large Fock space.
    Independent of the closed form above.
    """
    beta_points = np.asarray(beta_points, dtype=complex)
    flat = beta_points.ravel()
    create = np.diag(np.sqrt(np.arange(1, n_max)), k=-1)
    parity = (-1.0) ** np.arange(n_max)
    embedded = np.zeros((n_max, n_max), dtype=complex)
    embedded[:3, :3] = state.matrix
    out = np.empty(flat.shape, dtype=float)
    for i, beta in enumerate(flat):
        gen = beta * create - np.conj(beta) * create.T
        # skew-Hermitian generator: exponentiate through its Hermitian form
        evals, vecs = np.linalg.eigh(1j * gen)
        disp = (vecs * np.exp(-1j * evals)) @ vecs.conj().T
        rotated = disp.conj().T @ embedded @ disp
        out[i] = (2.0 / np.pi) * float(np.real(np.sum(np.diagonal(rotated) * parity)))
    return out.reshape(beta_points.shape)
