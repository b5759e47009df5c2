"""Fading, power allocation, phase-error models, and noise calibration.

The N transmit channels see independent negative-exponential intensity
fading (strong-turbulence regime): alpha_i = |h_i|^2 ~ Exp(mean
fading_mean). The transmitter, knowing the gains, splits unit total power
proportionally to the intensities, beta_i = alpha_i / sum_j alpha_j.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateChannelError, ParameterError
from .geometry import DetectorArray, cell_energy

_PHASE_KINDS = ("none", "gaussian", "uniform")


@dataclass(frozen=True)
class PhaseModel:
    """Residual carrier-phase error at each transmitter.

    kind: 'none' (perfect sync), 'gaussian' (zero-mean, std sigma_phi
    radians), or 'uniform' (uniform on (-pi, pi], no synchronization).
    """

    kind: str = "none"
    sigma_phi: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in _PHASE_KINDS:
            raise ParameterError(
                f"phase model must be one of {_PHASE_KINDS}, got {self.kind!r}"
            )
        if self.kind == "gaussian" and self.sigma_phi < 0.0:
            raise ParameterError(f"sigma_phi must be >= 0, got {self.sigma_phi}")


@dataclass(frozen=True)
class ChannelDraw:
    """One realization of the transmit channels.

    magnitudes: |h_i| (square roots of the fading intensities)
    betas: power fractions, nonnegative, summing to 1
    phases: residual phase errors in radians
    """

    magnitudes: np.ndarray
    betas: np.ndarray
    phases: np.ndarray

    @property
    def n_beams(self) -> int:
        return self.magnitudes.shape[0]


def sample_fading(n: int, mean: float, rng: np.random.Generator) -> np.ndarray:
    """Draw n independent exponential fading intensities alpha_i = |h_i|^2."""
    if n < 1:
        raise ParameterError(f"need at least one channel, got {n}")
    if mean <= 0.0:
        raise ParameterError(f"fading mean must be positive, got {mean}")
    return rng.exponential(mean, size=n)


def allocate_power(intensities: np.ndarray) -> np.ndarray:
    """Power fractions beta_i = alpha_i / sum_j alpha_j for unit total power."""
    a = np.asarray(intensities, dtype=float)
    if np.any(a < 0.0):
        raise ParameterError("fading intensities must be nonnegative")
    total = a.sum()
    if total <= 0.0:
        raise DegenerateChannelError("all channel gains vanish; no power split exists")
    return a / total


def sample_phase_errors(
    n: int, model: PhaseModel, rng: np.random.Generator
) -> np.ndarray:
    if n < 1:
        raise ParameterError(f"need at least one channel, got {n}")
    if model.kind == "none":
        return np.zeros(n)
    if model.kind == "gaussian":
        return rng.normal(0.0, model.sigma_phi, size=n)
    return rng.uniform(-np.pi, np.pi, size=n)


def draw_channel(
    n: int,
    fading_mean: float,
    phase_model: PhaseModel,
    rng: np.random.Generator,
) -> ChannelDraw:
    """Sample one complete channel state: fading, power split, phases."""
    alpha = sample_fading(n, fading_mean, rng)
    return ChannelDraw(
        magnitudes=np.sqrt(alpha),
        betas=allocate_power(alpha),
        phases=sample_phase_errors(n, phase_model, rng),
    )


def noise_sigma_from_snr(snr_db: float, reference_energy: float) -> float:
    """Total-array noise scale sigma with SNR(dB) amplitude-referenced to
    the captured energy: sigma = reference_energy / 10^(snr_db/20)."""
    if reference_energy <= 0.0:
        raise ParameterError(
            f"reference energy must be positive, got {reference_energy}"
        )
    return reference_energy / 10.0 ** (snr_db / 20.0)


def reference_energy(
    array: DetectorArray,
    radius: float,
    peak_intensity: float = 1.0,
    gamma: float = 1.0,
) -> float:
    """Energy a single centered beam deposits on the whole array, scaled by
    the tracking-channel power split gamma. Serves as the SNR reference."""
    if not 0.0 < gamma <= 1.0:
        raise ParameterError(f"gamma must lie in (0, 1], got {gamma}")
    total = sum(
        cell_energy(cell, (0.0, 0.0), radius, peak_intensity) for cell in array.cells
    )
    return gamma * total


def mean_square_coherent_gain(n: int, fading_mean: float) -> float:
    """E[h_tilde_i^2] for the normalized gains h_tilde_i = alpha_i/sqrt(sum alpha).

    For iid exponential alpha the sum S and the proportions D = alpha/S are
    independent (Gamma/Dirichlet decomposition) with E[D_i^2] = 2/(n(n+1)),
    so E[alpha_i^2/S] = E[S] E[D_i^2] = 2*fading_mean/(n+1).
    """
    if n < 1:
        raise ParameterError(f"need at least one channel, got {n}")
    if fading_mean <= 0.0:
        raise ParameterError(f"fading mean must be positive, got {fading_mean}")
    return 2.0 * fading_mean / (n + 1.0)
