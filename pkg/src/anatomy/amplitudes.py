"""Closed-form wavefunction amplitudes of the driven emitter's output field.

In the frame displaced by the coherent drive, the input field is vacuum and
the only photons are fluorescence.  Conditioned on the qubit ending in
``g`` or ``e``, the joint state truncates (for ``gamma << omega``) to a
vacuum amplitude, a one-photon wavepacket and a time-ordered two-photon
wavepacket, all real in the rotating frame:

    vacuum_amplitude(eps, t)               no-emission amplitude at time t
    one_photon_amplitude(eps, tau, t)      emission at t, readout eps at tau
    two_photon_amplitude(eps, tau, t1, t2) ordered emissions t1 < t2

The one- and two-photon functions factor into products of vacuum amplitudes,
which is what makes every integral here a 1-D convolution.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.signal import fftconvolve

from .config import OUTCOMES, GateConfig

# Below this, sin(x)/x switches to its series to avoid 0/0 at the
# overdamped/underdamped boundary omega = gamma/2.
_SMALL_PHASE = 1e-6


def _check_outcome(outcome: str) -> str:
    if outcome not in OUTCOMES:
        raise ValueError(f"outcome must be 'g' or 'e', got {outcome!r}")
    return outcome


def _half_rabi(cfg: GateConfig) -> complex:
    """Detuned half-oscillation rate; imaginary below omega = gamma/2."""
    return np.sqrt(complex(cfg.omega**2 - cfg.gamma**2 / 4.0))


def _sin_over(x):
    """sin(x)/x, analytic through x = 0 and along the imaginary axis."""
    x = np.asarray(x)
    small = np.abs(x) < _SMALL_PHASE
    safe = np.where(small, 1.0, x)
    out = np.where(small, 1.0 - x * x / 6.0, np.sin(safe) / safe)
    return out


def vacuum_amplitude(outcome: str, t, cfg: GateConfig):
    """No-emission amplitude for the qubit driven from |g>, read out later.

    Starting from |g>, the amplitude of finding the qubit in ``outcome``
    after driving for time ``t`` without any photon emission.  Continues
    analytically through the critically damped point and stays real.
    """
    _check_outcome(outcome)
    t = np.asarray(t, dtype=float)
    hr = _half_rabi(cfg)
    phase = hr * t / 2.0
    envelope = np.exp(-cfg.gamma * t / 4.0)
    if outcome == "g":
        # cos term plus the decay-induced sin correction
        val = np.cos(phase) + (cfg.gamma * t / 4.0) * _sin_over(phase)
    else:
        val = (cfg.omega * t / 2.0) * _sin_over(phase)
    out = envelope * np.real(val)
    return out if out.ndim else float(out)


def one_photon_amplitude(outcome: str, tau: float, t, cfg: GateConfig):
    """Amplitude density (time^-1/2) for one emission at time ``t``.

    Product form: emitter excursion to ``t``, jump, vacuum evolution of the
    remaining window toward the readout ``outcome``.
    """
    _check_outcome(outcome)
    t = np.asarray(t, dtype=float)
    out = (
        np.sqrt(cfg.gamma)
        * vacuum_amplitude(outcome, tau - t, cfg)
        * vacuum_amplitude("e", t, cfg)
    )
    return out if np.ndim(out) else float(out)


def two_photon_amplitude(outcome: str, tau: float, t1, t2, cfg: GateConfig):
    """Amplitude density (time^-1) for ordered emissions at t1 < t2.

    Only the time-ordered wedge is defined; callers that need the
    symmetrized combination sum the two orderings themselves.
    """
    _check_outcome(outcome)
    t1 = np.asarray(t1, dtype=float)
    t2 = np.asarray(t2, dtype=float)
    if np.any(t2 <= t1):
        raise ValueError("two_photon_amplitude requires t1 < t2 (ordered wedge)")
    out = (
        cfg.gamma
        * vacuum_amplitude(outcome, tau - t2, cfg)
        * vacuum_amplitude("e", t2 - t1, cfg)
        * vacuum_amplitude("e", t1, cfg)
    )
    return out if np.ndim(out) else float(out)


@dataclass(frozen=True)
class WaveAmplitudes:
    """Sampled output-field amplitudes and emission probabilities.

    All samples live on the midpoints of the collision grid, so that the
    midpoint quadrature used throughout coincides with the collision step.

    Attributes:
        cfg: parameters the samples were built from.
        f0: vacuum amplitude at the readout time, per outcome.
        f1: one-photon amplitude sampled at bin midpoints, per outcome.
        pj: emission probabilities (p0, p1, p2), unnormalized, per outcome.
        P: readout probabilities (sum of pj up to the photon cap).
        f0e_mid: emitter excursion amplitude at bin midpoints.
        f0e_grid: the same at integer multiples of dt (inter-emission lags).
        tail: per-outcome vacuum amplitude of the remaining window,
            sampled at bin midpoints.
    """

    cfg: GateConfig
    f0: dict
    f1: dict
    pj: dict
    P: dict
    f0e_mid: np.ndarray = field(repr=False)
    f0e_grid: np.ndarray = field(repr=False)
    tail: dict = field(repr=False)

    @property
    def times(self) -> np.ndarray:
        return self.cfg.bin_midpoints()

    def f2_wedge(self, outcome: str) -> np.ndarray:
        """Dense (n_bins, n_bins) two-photon wedge, zero on and below the
        diagonal.  Built on demand; large for fine grids."""
        _check_outcome(outcome)
        n = self.cfg.n_bins
        lag = np.abs(np.arange(n)[None, :] - np.arange(n)[:, None])
        mat = self.cfg.gamma * self.f0e_mid[:, None] * self.f0e_grid[lag] * self.tail[outcome][None, :]
        return np.triu(mat, k=1)

    def ordered_pairs_flux(self, outcome: str) -> np.ndarray:
        """Per-bin two-photon intensity: dt * sum over the partner bin of the
        squared ordered two-photon amplitude (both orderings)."""
        _check_outcome(outcome)
        dt = self.cfg.dt
        g2 = self.cfg.gamma**2
        tail2 = self.tail[outcome] ** 2
        head2 = self.f0e_mid**2
        link2 = self.f0e_grid**2
        later = g2 * head2 * _upper_corr(tail2, link2)
        earlier = g2 * tail2 * _lower_conv(head2, link2)
        return dt * (later + earlier)

    def chain_overlap(self, outcome: str) -> np.ndarray:
        """Per-bin overlap between the one- and two-photon sectors:
        dt * sum over the partner bin of f2(ordered) * f1(partner)."""
        _check_outcome(outcome)
        dt = self.cfg.dt
        g = self.cfg.gamma
        f1 = self.f1[outcome]
        tail = self.tail[outcome]
        later = g * self.f0e_mid * _upper_corr(tail * f1, self.f0e_grid)
        earlier = g * tail * _lower_conv(self.f0e_mid * f1, self.f0e_grid)
        return dt * (later + earlier)


def _lower_conv(values: np.ndarray, link: np.ndarray) -> np.ndarray:
    """out[n] = sum_{k>=1} link[k] * values[n-k]   (link[0] is zero)."""
    return fftconvolve(values, link)[: values.size]


def _upper_corr(values: np.ndarray, link: np.ndarray) -> np.ndarray:
    """out[n] = sum_{k>=1} link[k] * values[n+k]   (link[0] is zero)."""
    n = values.size
    return fftconvolve(values[::-1], link)[:n][::-1]


def emission_probabilities(cfg: GateConfig) -> WaveAmplitudes:
    """Sample the amplitudes on the collision grid and integrate them.

    Probabilities use midpoint quadrature over the ordered time simplex;
    the two-photon integral reduces to a 1-D convolution because the
    amplitude factors over the emission chain.
    """
    mids = cfg.bin_midpoints()
    grid = np.arange(cfg.n_bins) * cfg.dt
    head = vacuum_amplitude("e", mids, cfg)
    link = vacuum_amplitude("e", grid, cfg)  # link[0] = 0: kills the diagonal
    dt = cfg.dt

    f0, f1, pj, P, tails = {}, {}, {}, {}, {}
    for eps in OUTCOMES:
        tail = vacuum_amplitude(eps, cfg.tau - mids, cfg)
        amp1 = np.sqrt(cfg.gamma) * tail * head
        p0 = vacuum_amplitude(eps, cfg.tau, cfg) ** 2
        p1 = dt * float(np.sum(amp1**2))
        if cfg.photon_cap >= 2:
            p2 = cfg.gamma**2 * dt**2 * float(np.sum(tail**2 * _lower_conv(head**2, link**2)))
        else:
            p2 = 0.0
        f0[eps] = vacuum_amplitude(eps, cfg.tau, cfg)
        f1[eps] = amp1
        pj[eps] = np.array([p0, p1, p2])
        P[eps] = p0 + p1 + p2
        tails[eps] = tail

    return WaveAmplitudes(
        cfg=cfg, f0=f0, f1=f1, pj=pj, P=P,
        f0e_mid=head, f0e_grid=link, tail=tails,
    )
