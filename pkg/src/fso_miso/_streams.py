"""Counter-based random streams with per-trial addressing.

Every Monte Carlo quantity is produced from a Philox stream keyed by
(master seed, role). Trial t owns a fixed-width block of the stream: the
per-trial draw budget is padded to a whole number of counter ticks (Philox
emits 4 doubles per tick), so a worker can jump straight to trial t with
`advance(t * ticks_per_trial)`. Draws therefore depend only on
(seed, role, trial index), never on chunking or worker count.

Uniforms are mapped through explicit inverse transforms (ndtri, log1p)
rather than Generator's stateful distribution methods, so the number of
doubles consumed per trial is a compile-time constant of the scenario.
"""

from __future__ import annotations

import enum

import numpy as np
from numpy.random import Generator, Philox
from scipy.special import ndtri

_DOUBLES_PER_TICK = 4
_MIN_UNIFORM = 2.0**-64  # ndtri(0) is -inf; clamp keeps transforms finite


class Role(enum.IntEnum):
    """Stream identifiers; each role is an independent Philox key."""

    FADING = 1
    PHASE = 2
    POINTING = 3
    GAIN = 4
    ORACLE_NOISE = 5
    TIE_BREAK = 6


class TrialStream:
    """Addressable uniform blocks: trial t -> draws_per_trial doubles."""

    def __init__(self, seed: int, role: Role, draws_per_trial: int) -> None:
        if draws_per_trial < 0:
            raise ValueError("draws_per_trial must be >= 0")
        self._key = (int(seed), int(role))
        self._draws = int(draws_per_trial)
        ticks, rem = divmod(self._draws, _DOUBLES_PER_TICK)
        self._ticks_per_trial = ticks + (1 if rem else 0)

    def uniforms(self, start_trial: int, n_trials: int) -> np.ndarray:
        """Uniform[0,1) block of shape (n_trials, draws_per_trial)."""
        if self._draws == 0 or n_trials == 0:
            return np.empty((n_trials, self._draws))
        bg = Philox(key=self._key)
        bg.advance(start_trial * self._ticks_per_trial)
        pad = self._ticks_per_trial * _DOUBLES_PER_TICK
        u = Generator(bg).random((n_trials, pad))
        return u[:, : self._draws]


def uniform_to_normal(u: np.ndarray) -> np.ndarray:
    """Standard normals via the inverse CDF (fixed consumption: 1 draw each)."""
    return ndtri(np.maximum(u, _MIN_UNIFORM))


def uniform_to_exponential(u: np.ndarray, mean: float) -> np.ndarray:
    """Exponential(mean) via inversion; log1p keeps small u accurate."""
    return -mean * np.log1p(-u)


def uniform_to_symmetric(u: np.ndarray, half_width: float) -> np.ndarray:
    """Uniform on (-half_width, half_width]."""
    return (2.0 * u - 1.0) * half_width
