"""Free-space optical MISO link simulator.

Models a multi-beam transmitter whose beams land on pixelated detector
arrays: Gaussian beam energy capture per cell, coherent superposition
through lens-position frequency offsets, exponential intensity fading with
gain-proportional power allocation, residual phase errors, Gauss-Markov
beam wander with escape statistics, and PPM maximum-likelihood detection
under MRC or EGC combining. A deterministic counter-based Monte Carlo
engine estimates unconditional error rates; a real-coded genetic algorithm
searches for the error-minimizing beam radius.
"""

from ._backend import available_backends, backend_name
from .channel import (
    ChannelDraw,
    PhaseModel,
    allocate_power,
    draw_channel,
    mean_square_coherent_gain,
    noise_sigma_from_snr,
    reference_energy,
    sample_fading,
    sample_phase_errors,
)
from .detection import (
    Combiner,
    PpmConfig,
    hermitian_quadratic_sum,
    pe_asymptotic,
    pe_from_argument,
    pe_multi_array,
    pe_single_full,
    pe_single_no_alignment,
    pe_single_perfect,
    pe_single_phase,
    pe_single_pointing,
    q_function,
    sample_intensity_gain,
)
from .errors import (
    ConfigError,
    DegenerateChannelError,
    FsoMisoError,
    GeometryError,
    InconsistentInputError,
    NonStationaryTrackerError,
    ObjectiveEvaluationError,
    ParameterError,
)
from .geometry import (
    BeamProfile,
    Cell,
    DetectorArray,
    cell_energies_grid,
    cell_energy,
    cross_energy,
    energy_matrix,
    lens_frequency,
    make_array,
)
from .optimizer import GaConfig, GaResult, objective_from_config, optimize_beam_radius
from .pointing import (
    AlignmentState,
    TrackerParams,
    TrackerState,
    alignment_from_positions,
    covariance_at,
    escape_probability,
    n0_pmf,
    sample_alignment,
    steady_state_sigma,
    step,
)
from .simulation import (
    Scenario,
    ScenarioConfig,
    SimResult,
    confidence_interval,
    resolve_offsets,
    symbol_level_oracle,
    unconditional_pe,
)
from .sweeps import SweepRow, SweepSpec, apply_sweep_value, run_sweep
from .validation import conditional_pe, run_all

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
