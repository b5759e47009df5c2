"""Monte Carlo estimation of unconditional PPM error rates.

Scenarios
---------
MultiArray              N beams, one centered beam per separate M-cell array
SingleNoAlignment       N non-coherent beams on one array
SinglePerfect           N coherently combined beams, perfect sync/tracking
SinglePhaseError        coherent combining with residual phase errors
SinglePointingError     coherent combining with tracking escapes
SingleFull              phase errors and tracking escapes together
AsymptoticUniformPhase  large-N limit: exponential coherent intensity gain

Per trial the engine draws the channel state, evaluates the conditional
error probability in closed form (the per-trial kernel), and averages.
Randomness is addressed by (seed, role, trial), so estimates are
bit-for-bit reproducible for any worker count: trial t always consumes the
same block of the same Philox stream, per-trial values land in a
preallocated array by trial index, and the final reduction is a single
pairwise-summation mean over that array.
"""

from __future__ import annotations

import enum
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import sqrt

import numpy as np
from scipy.special import ndtri

from . import _backend
from ._streams import (
    Role,
    TrialStream,
    uniform_to_exponential,
    uniform_to_normal,
    uniform_to_symmetric,
)
from .channel import (
    ChannelDraw,
    PhaseModel,
    mean_square_coherent_gain,
    noise_sigma_from_snr,
    reference_energy,
)
from .detection import Combiner, PpmConfig, hermitian_quadratic_sum, pe_from_argument
from .errors import ParameterError
from .geometry import (
    BeamProfile,
    cell_energies_grid,
    cell_energy,
    energy_matrix,
    make_array,
)

CHUNK_TRIALS = 4096

# lens-offset pool (cycles/mm) used when a config does not list offsets;
# configs with more than five beams must provide their own
DEFAULT_OFFSET_POOL = (0.0, 4.0, -4.0, -8.0, 11.0)


class Scenario(enum.Enum):
    MULTI_ARRAY = "MultiArray"
    SINGLE_NO_ALIGNMENT = "SingleNoAlignment"
    SINGLE_PERFECT = "SinglePerfect"
    SINGLE_PHASE_ERROR = "SinglePhaseError"
    SINGLE_POINTING_ERROR = "SinglePointingError"
    SINGLE_FULL = "SingleFull"
    ASYMPTOTIC_UNIFORM_PHASE = "AsymptoticUniformPhase"


_COHERENT_SINGLE = (
    Scenario.SINGLE_PERFECT,
    Scenario.SINGLE_PHASE_ERROR,
    Scenario.SINGLE_POINTING_ERROR,
    Scenario.SINGLE_FULL,
)
_POINTING = (Scenario.SINGLE_POINTING_ERROR, Scenario.SINGLE_FULL)
_PHASED = (Scenario.SINGLE_PHASE_ERROR, Scenario.SINGLE_FULL)


@dataclass(frozen=True)
class ScenarioConfig:
    """Complete description of one simulated operating point.

    sigma is derived, not configured: the SNR references the whole-array
    captured energy of one centered beam (gamma included), and the per-cell
    noise std is that total scale divided by sqrt(M). noise_reference_radius
    optionally pins the SNR reference to a different beam radius than the
    simulated one (the optimizer uses this so candidate radii share one
    noise level).
    """

    scenario: Scenario
    combiner: Combiner
    n_beams: int
    side: float
    rows: int
    cols: int
    radius: float
    snr_db: float
    trials: int
    seed: int
    peak_intensity: float = 1.0
    gamma: float = 1.0
    fading_mean: float = 0.5
    phase_model: PhaseModel = field(default_factory=PhaseModel)
    sigma_x: float = 0.0
    rho_c: float | None = None
    sigma_h_sq: float | None = None
    ppm: PpmConfig = field(default_factory=PpmConfig)
    offsets_u: tuple[float, ...] | None = None
    offsets_v: tuple[float, ...] | None = None
    noise_reference_radius: float | None = None
    fixed_channel: ChannelDraw | None = None

    def __post_init__(self) -> None:
        if isinstance(self.scenario, str):
            object.__setattr__(self, "scenario", Scenario(self.scenario))
        if isinstance(self.combiner, str):
            object.__setattr__(self, "combiner", Combiner(self.combiner.upper()))
        if self.n_beams < 1:
            raise ParameterError(f"n_beams must be >= 1, got {self.n_beams}")
        if self.trials < 1:
            raise ParameterError(f"trials must be >= 1, got {self.trials}")
        if not 0 <= self.seed < 2**64:
            raise ParameterError("seed must fit in an unsigned 64-bit integer")
        if self.radius <= 0.0:
            raise ParameterError(f"radius must be positive, got {self.radius}")
        if self.fading_mean <= 0.0:
            raise ParameterError(
                f"fading_mean must be positive, got {self.fading_mean}"
            )
        if self.sigma_x < 0.0:
            raise ParameterError(f"sigma_x must be >= 0, got {self.sigma_x}")
        if self.rho_c is not None and self.rho_c < 0.0:
            raise ParameterError(f"rho_c must be >= 0, got {self.rho_c}")
        if self.sigma_h_sq is not None and self.sigma_h_sq <= 0.0:
            raise ParameterError(f"sigma_h_sq must be positive, got {self.sigma_h_sq}")
        for name in ("offsets_u", "offsets_v"):
            v = getattr(self, name)
            if v is not None:
                object.__setattr__(self, name, tuple(float(x) for x in v))
                if len(getattr(self, name)) != self.n_beams:
                    raise ParameterError(
                        f"{name} must list one value per beam "
                        f"({self.n_beams}), got {len(getattr(self, name))}"
                    )

    @property
    def m_cells(self) -> int:
        return self.rows * self.cols


def resolve_offsets(config: ScenarioConfig) -> tuple[np.ndarray, np.ndarray]:
    """Lens offsets (u, v) actually used for the config's beams."""
    if config.offsets_u is None:
        if config.n_beams > len(DEFAULT_OFFSET_POOL):
            raise ParameterError(
                f"the default offset pool covers up to "
                f"{len(DEFAULT_OFFSET_POOL)} beams; provide offsets_u for "
                f"n_beams={config.n_beams}"
            )
        u = np.array(DEFAULT_OFFSET_POOL[: config.n_beams])
    else:
        u = np.array(config.offsets_u)
    v = np.zeros_like(u) if config.offsets_v is None else np.array(config.offsets_v)
    return u, v


@dataclass(frozen=True)
class SimResult:
    """Monte Carlo estimate with its sampling uncertainty."""

    estimate: float
    std_error: float
    trials: int
    seed: int
    wall_time_s: float


def confidence_interval(result: SimResult, level: float = 0.95) -> tuple[float, float]:
    """Normal-approximation CI for the estimate, clipped to [0, 1]."""
    if not 0.0 < level < 1.0:
        raise ParameterError(f"confidence level must be in (0, 1), got {level}")
    z = float(ndtri(0.5 + level / 2.0))
    half = z * result.std_error
    return (max(0.0, result.estimate - half), min(1.0, result.estimate + half))


class _Context:
    """Geometry/noise quantities shared by every trial of one config."""

    def __init__(self, config: ScenarioConfig) -> None:
        self.config = config
        self.array = make_array(config.side, config.rows, config.cols)
        self.bounds = self.array.cell_bounds()
        self.rho_c = config.radius if config.rho_c is None else config.rho_c

        # centered-beam per-cell energies, bare and tracking-split scaled
        self.central = np.array(
            [
                cell_energy(c, (0.0, 0.0), config.radius, config.peak_intensity)
                for c in self.array.cells
            ]
        )
        self.single_central = config.gamma * self.central

        ref_radius = (
            config.radius
            if config.noise_reference_radius is None
            else config.noise_reference_radius
        )
        e_ref = reference_energy(
            self.array, ref_radius, config.peak_intensity, config.gamma
        )
        self.e_ref = e_ref
        self.sigma_cell = noise_sigma_from_snr(config.snr_db, e_ref) / sqrt(
            self.array.m_cells
        )

        self.tensor = None
        if config.scenario in _COHERENT_SINGLE:
            self.offsets_u, self.offsets_v = resolve_offsets(config)
            beams = [
                BeamProfile(
                    radius=config.radius,
                    peak_intensity=config.peak_intensity,
                    offset_u=u,
                    offset_v=v,
                )
                for u, v in zip(self.offsets_u, self.offsets_v)
            ]
            self.tensor = np.ascontiguousarray(
                energy_matrix(self.array, beams, config.gamma)
            )

        sig = (
            config.sigma_h_sq
            if config.sigma_h_sq is not None
            else mean_square_coherent_gain(config.n_beams, config.fading_mean)
        )
        self.mean_gain = config.n_beams * sig

    # --- per-chunk channel state ------------------------------------

    def fading_block(self, start: int, count: int) -> tuple[np.ndarray, np.ndarray]:
        """(alpha, beta) blocks, each (count, N)."""
        cfg = self.config
        n = cfg.n_beams
        if cfg.fixed_channel is not None:
            alpha = np.broadcast_to(cfg.fixed_channel.magnitudes**2, (count, n))
            beta = np.broadcast_to(cfg.fixed_channel.betas, (count, n))
            return alpha, beta
        u = TrialStream(cfg.seed, Role.FADING, n).uniforms(start, count)
        alpha = uniform_to_exponential(u, cfg.fading_mean)
        totals = alpha.sum(axis=1, keepdims=True)
        # a zero total has probability zero; guard the division anyway
        safe = np.where(totals > 0.0, totals, 1.0)
        beta = np.where(totals > 0.0, alpha / safe, 1.0 / n)
        return alpha, beta

    def phase_block(self, start: int, count: int) -> np.ndarray:
        cfg = self.config
        n = cfg.n_beams
        if cfg.fixed_channel is not None:
            return np.broadcast_to(cfg.fixed_channel.phases, (count, n))
        model = cfg.phase_model
        if model.kind == "none":
            return np.zeros((count, n))
        u = TrialStream(cfg.seed, Role.PHASE, n).uniforms(start, count)
        if model.kind == "gaussian":
            return model.sigma_phi * uniform_to_normal(u)
        return uniform_to_symmetric(u, np.pi)

    def pointing_block(self, start: int, count: int) -> np.ndarray:
        """Beam-center positions, (count, N, 2)."""
        cfg = self.config
        u = TrialStream(cfg.seed, Role.POINTING, 2 * cfg.n_beams).uniforms(
            start, count
        )
        z = uniform_to_normal(u) * cfg.sigma_x
        return z.reshape(count, cfg.n_beams, 2)

    def gain_block(self, start: int, count: int) -> np.ndarray:
        u = TrialStream(self.config.seed, Role.GAIN, 1).uniforms(start, count)
        return uniform_to_exponential(u[:, 0], self.mean_gain)


def _chunk_pe(ctx: _Context, start: int, count: int) -> np.ndarray:
    """Conditional Pe for trials [start, start+count)."""
    cfg = ctx.config
    scenario = cfg.scenario
    sigma = ctx.sigma_cell
    order = cfg.ppm.order
    mrc = cfg.combiner is Combiner.MRC

    if scenario is Scenario.ASYMPTOTIC_UNIFORM_PHASE:
        w = ctx.gain_block(start, count)
        e = ctx.single_central
        if mrc:
            k = sqrt(float(np.sum(e * e)) / (2.0 * sigma**2))
        else:
            k = float(np.sum(e)) / sqrt(2.0 * sigma**2 * e.size)
        return pe_from_argument(w * k, order)

    alpha, beta = ctx.fading_block(start, count)
    gains = alpha * beta  # |h_i|^2 beta_i

    if scenario in (Scenario.MULTI_ARRAY, Scenario.SINGLE_NO_ALIGNMENT):
        e = ctx.central if scenario is Scenario.MULTI_ARRAY else ctx.single_central
        if mrc:
            arg = np.sqrt(
                (gains * gains).sum(axis=1) * float(np.sum(e * e)) / (2.0 * sigma**2)
            )
        else:
            n_meas = e.size if scenario is Scenario.SINGLE_NO_ALIGNMENT else (
                cfg.n_beams * e.size
            )
            arg = gains.sum(axis=1) * float(np.sum(e)) / sqrt(
                2.0 * sigma**2 * n_meas
            )
        return pe_from_argument(arg, order)

    # coherent single-array scenarios -> quadratic-form kernel
    phases = (
        ctx.phase_block(start, count)
        if scenario in _PHASED
        else np.zeros((count, cfg.n_beams))
    )
    coeff = np.sqrt(gains) * np.exp(1j * phases)
    additive = np.zeros((count, ctx.array.m_cells))

    if scenario in _POINTING:
        positions = ctx.pointing_block(start, count)
        r2 = positions[:, :, 0] ** 2 + positions[:, :, 1] ** 2
        escaped = r2 > ctx.rho_c**2
        if escaped.any():
            t_idx, b_idx = np.nonzero(escaped)
            energies = cell_energies_grid(
                ctx.bounds,
                positions[t_idx, b_idx],
                cfg.radius,
                cfg.peak_intensity,
            )
            np.add.at(
                additive,
                t_idx,
                cfg.gamma * energies * gains[t_idx, b_idx][:, None],
            )
            coeff = np.where(escaped, 0.0, coeff)

    return _backend.quad_form_pe_batch(
        ctx.tensor,
        np.ascontiguousarray(coeff, dtype=complex),
        additive,
        sigma,
        order,
        mrc,
    )


def _run_chunks(trials: int, workers: int, fn) -> np.ndarray:
    out = np.empty(trials)
    jobs = [
        (start, min(CHUNK_TRIALS, trials - start))
        for start in range(0, trials, CHUNK_TRIALS)
    ]

    def run(job: tuple[int, int]) -> None:
        start, count = job
        out[start : start + count] = fn(start, count)

    if workers <= 1:
        for job in jobs:
            run(job)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, jobs))
    return out


def _summarize(values: np.ndarray, seed: int, t0: float) -> SimResult:
    estimate = float(np.mean(values))
    if values.size > 1:
        std_error = float(np.std(values, ddof=1) / sqrt(values.size))
    else:
        std_error = 0.0
    return SimResult(
        estimate=estimate,
        std_error=std_error,
        trials=int(values.size),
        seed=seed,
        wall_time_s=time.perf_counter() - t0,
    )


def unconditional_pe(config: ScenarioConfig, workers: int = 1) -> SimResult:
    """Estimate the unconditional symbol error probability for one config.

    Bit-for-bit deterministic in (config, package version): the worker
    count changes wall time only.
    """
    t0 = time.perf_counter()
    ctx = _Context(config)
    values = _run_chunks(config.trials, workers, lambda s, c: _chunk_pe(ctx, s, c))
    return _summarize(values, config.seed, t0)


_ORACLE_SCENARIOS = (
    Scenario.MULTI_ARRAY,
    Scenario.SINGLE_NO_ALIGNMENT,
    Scenario.SINGLE_PERFECT,
    Scenario.SINGLE_PHASE_ERROR,
)


def _oracle_measurement(ctx: _Context, draw: ChannelDraw) -> tuple[np.ndarray, np.ndarray]:
    """(means, weights) of the combiner's measurement vector for a fixed
    channel draw: means are per-measurement signal contributions, weights
    are the combiner taps (matched for MRC, all-ones for EGC)."""
    cfg = ctx.config
    gains = draw.magnitudes**2 * draw.betas
    scenario = cfg.scenario
    if scenario is Scenario.MULTI_ARRAY:
        means = np.outer(gains, ctx.central).ravel()
    elif scenario is Scenario.SINGLE_NO_ALIGNMENT:
        if cfg.combiner is Combiner.MRC:
            # the no-alignment MRC is the N-array receiver: N*M measurements
            means = np.outer(gains, ctx.single_central).ravel()
        else:
            means = gains.sum() * ctx.single_central
    else:
        phases = (
            draw.phases
            if scenario is Scenario.SINGLE_PHASE_ERROR
            else np.zeros(cfg.n_beams)
        )
        means = hermitian_quadratic_sum(
            ctx.tensor, draw.magnitudes, draw.betas, phases
        )
    if cfg.combiner is Combiner.MRC:
        weights = means.astype(float, copy=True)
    else:
        weights = np.ones_like(means)
    return means, weights


def symbol_level_oracle(
    config: ScenarioConfig, draw: ChannelDraw, workers: int = 1
) -> SimResult:
    """Brute-force PPM symbol simulation at a fixed channel draw.

    Simulates every slot's combiner output with fresh per-cell noise, picks
    the argmax (uniform tie-break), and counts wrong decisions. The signal
    occupies slot 0 without loss of generality. This is the independent
    check route for the closed-form conditional Pe; it shares no formula
    with the closed forms beyond the physical measurement model.
    """
    if config.scenario not in _ORACLE_SCENARIOS:
        raise ParameterError(
            "the symbol-level oracle runs on conditionally fixed scenarios "
            f"{[s.value for s in _ORACLE_SCENARIOS]}, not {config.scenario.value}"
        )
    if draw.n_beams != config.n_beams:
        raise ParameterError(
            f"channel draw has {draw.n_beams} beams, config expects {config.n_beams}"
        )
    t0 = time.perf_counter()
    ctx = _Context(config)
    means, weights = _oracle_measurement(ctx, draw)
    signal_term = float(means @ weights)
    order = config.ppm.order
    n_meas = means.size
    noise_stream = TrialStream(config.seed, Role.ORACLE_NOISE, order * n_meas)
    tie_stream = TrialStream(config.seed, Role.TIE_BREAK, 1)

    def chunk(start: int, count: int) -> np.ndarray:
        normals = uniform_to_normal(noise_stream.uniforms(start, count)).reshape(
            count, order, n_meas
        )
        ties = np.ascontiguousarray(tie_stream.uniforms(start, count)[:, 0])
        errs = _backend.oracle_errors_batch(
            weights,
            signal_term,
            ctx.sigma_cell,
            np.ascontiguousarray(normals),
            ties,
        )
        return errs.astype(float)

    values = _run_chunks(config.trials, workers, chunk)
    return _summarize(values, config.seed, t0)
