"""Beam-tracking error model: Gauss-Markov wander, escape statistics.

The tracked beam center follows the first-order autoregression

    X_n = Phi X_{n-1} + W_n,   W_n ~ N(0, sigma_W^2 I_2)

with a perfect re-center every n_0 steps. A beam whose center stays inside
the coherence region (a disc of radius rho_c around the array center)
behaves as if perfectly centered; a beam that wanders outside it loses
coherence with the aligned group and contributes its energy where it lands.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import binom

from .errors import NonStationaryTrackerError, ParameterError


def _as_transition(phi: float | np.ndarray) -> np.ndarray:
    m = np.atleast_2d(np.asarray(phi, dtype=float))
    if m.shape == (1, 1):
        m = m[0, 0] * np.eye(2)
    if m.shape != (2, 2):
        raise ParameterError(f"transition must be scalar or 2x2, got shape {m.shape}")
    return m


@dataclass(frozen=True)
class TrackerParams:
    """Gauss-Markov tracker parameters.

    phi may be a scalar a (isotropic a*I_2) or a full 2x2 transition matrix;
    the closed-form steady state only exists for the scalar case.
    """

    phi: np.ndarray
    sigma_w: float
    sigma_0: float = 0.0
    n_0: int = 1000

    def __init__(
        self,
        phi: float | np.ndarray,
        sigma_w: float,
        sigma_0: float = 0.0,
        n_0: int = 1000,
    ) -> None:
        if sigma_w < 0.0 or sigma_0 < 0.0:
            raise ParameterError("noise scales must be nonnegative")
        if n_0 < 1:
            raise ParameterError(f"reset period must be >= 1, got {n_0}")
        object.__setattr__(self, "phi", _as_transition(phi))
        object.__setattr__(self, "sigma_w", float(sigma_w))
        object.__setattr__(self, "sigma_0", float(sigma_0))
        object.__setattr__(self, "n_0", int(n_0))


@dataclass(frozen=True)
class TrackerState:
    position: np.ndarray
    time: int = 0


def step(
    state: TrackerState,
    params: TrackerParams,
    rng: np.random.Generator,
    estimate_perfect: bool = True,
) -> TrackerState:
    """Advance the tracker one step.

    At times that are multiples of n_0 the estimator re-centers the beam
    perfectly (the autoregressive memory is cancelled and only the fresh
    innovation W_n remains); otherwise the plain recursion applies.
    """
    n = state.time + 1
    w = rng.normal(0.0, params.sigma_w, size=2)
    if estimate_perfect and n % params.n_0 == 0:
        pos = w
    else:
        pos = params.phi @ state.position + w
    return TrackerState(position=pos, time=n)


def covariance_at(n: int, params: TrackerParams) -> np.ndarray:
    """Covariance of X_n without resets:
    sigma_0^2 Phi^n (Phi^n)^T + sigma_W^2 sum_{l=1..n} Phi^(n-l) (Phi^(n-l))^T,
    evaluated by the equivalent recursion C_k = Phi C_{k-1} Phi^T + sigma_W^2 I.
    """
    if n < 0:
        raise ParameterError(f"time index must be >= 0, got {n}")
    cov = params.sigma_0**2 * np.eye(2)
    q = params.sigma_w**2 * np.eye(2)
    for _ in range(n):
        cov = params.phi @ cov @ params.phi.T + q
    return cov


def steady_state_sigma(a: float, sigma_w: float) -> float:
    """Per-axis steady-state std sigma_x = sigma_W / sqrt(1 - a^2)."""
    if abs(a) >= 1.0:
        raise NonStationaryTrackerError(
            f"|a| must be < 1 for a steady state, got a={a}"
        )
    if sigma_w < 0.0:
        raise ParameterError(f"sigma_w must be >= 0, got {sigma_w}")
    return sigma_w / np.sqrt(1.0 - a * a)


def escape_probability(rho_c: float, sigma_x: float) -> float:
    """P(beam center leaves the coherence disc) = exp(-rho_c^2 / (2 sigma_x^2)).

    The steady-state center is isotropic Gaussian, so its radius is Rayleigh
    and the tail probability is exact. sigma_x = 0 pins the beam at the
    origin: probability 0 for any positive radius, 1 for a degenerate disc.
    """
    if rho_c < 0.0:
        raise ParameterError(f"coherence radius must be >= 0, got {rho_c}")
    if sigma_x < 0.0:
        raise ParameterError(f"sigma_x must be >= 0, got {sigma_x}")
    if sigma_x == 0.0:
        return 0.0 if rho_c > 0.0 else 1.0
    return float(np.exp(-(rho_c**2) / (2.0 * sigma_x**2)))


def n0_pmf(n_beams: int, p_escape: float) -> np.ndarray:
    """Binomial(N, p) pmf over the number of escaped beams, indices 0..N."""
    if n_beams < 1:
        raise ParameterError(f"need at least one beam, got {n_beams}")
    if not 0.0 <= p_escape <= 1.0:
        raise ParameterError(f"escape probability must be in [0, 1], got {p_escape}")
    return binom.pmf(np.arange(n_beams + 1), n_beams, p_escape)


@dataclass(frozen=True)
class AlignmentState:
    """Partition of the beams into an aligned set and an escaped set.

    Aligned beams are treated as perfectly centered (within the coherence
    region the interference pattern is position-independent); escaped beams
    keep their drawn centers.
    """

    aligned: np.ndarray = field(repr=False)
    escaped: np.ndarray = field(repr=False)
    positions: np.ndarray = field(repr=False)

    @property
    def n_escaped(self) -> int:
        return self.escaped.shape[0]


def alignment_from_positions(positions: np.ndarray, rho_c: float) -> AlignmentState:
    """Classify drawn beam centers against the coherence disc of radius rho_c."""
    pos = np.asarray(positions, dtype=float)
    if pos.ndim != 2 or pos.shape[1] != 2:
        raise ParameterError(f"positions must be (N, 2), got shape {pos.shape}")
    if rho_c < 0.0:
        raise ParameterError(f"coherence radius must be >= 0, got {rho_c}")
    r2 = pos[:, 0] ** 2 + pos[:, 1] ** 2
    escaped_mask = r2 > rho_c**2
    idx = np.arange(pos.shape[0])
    return AlignmentState(
        aligned=idx[~escaped_mask], escaped=idx[escaped_mask], positions=pos
    )


def sample_alignment(
    n_beams: int, rho_c: float, sigma_x: float, rng: np.random.Generator
) -> AlignmentState:
    """Draw each beam's steady-state center N(0, sigma_x^2 I_2) and classify it."""
    if n_beams < 1:
        raise ParameterError(f"need at least one beam, got {n_beams}")
    if sigma_x < 0.0:
        raise ParameterError(f"sigma_x must be >= 0, got {sigma_x}")
    positions = rng.normal(0.0, sigma_x, size=(n_beams, 2))
    return alignment_from_positions(positions, rho_c)
