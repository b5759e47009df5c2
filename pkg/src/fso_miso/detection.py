"""Conditional PPM error probabilities for MRC and EGC combining.

Every routine here returns the probability that a maximum-likelihood PPM
detector picks a wrong slot, conditioned on the channel state passed in.
The common structure: the combiner output for the signal slot minus a
non-signal slot is Gaussian, so

    Pe = 1 - Q(-arg)^(order - 1),   Q(x) = P(N(0,1) > x),

with `arg` the deflection of the combiner statistic. For order 2 this is
exact; for larger orders it is the standard independent-slot approximation.
`sigma` is always the per-cell noise standard deviation.

Signal-statistic conventions:

  multi-array         s_im = |h_i|^2 beta_i x_i^(m), one term per (beam, cell)
  single, coherent    b_m = sum_il X[m,i,l] c_i conj(c_l), c_i = |h_i| sqrt(beta_i) e^(j phi_i)
  single, pointing    X_m = b_m(aligned beams) + sum_escaped |h_j|^2 beta_j e_jm

MRC weights the statistic vector by itself (arg = sqrt(sum s^2 / 2 sigma^2));
EGC adds the measurements unweighted (arg = sum s / sqrt(2 sigma^2 C) with C
the number of summed measurements). Because both combiners consume the same
nonnegative statistic vector in each scenario except the no-alignment one,
Cauchy-Schwarz gives Pe(MRC) <= Pe(EGC) there. The no-alignment scenario is
the documented exception: its MRC is the N-array-equivalent receiver while
its EGC sums the M physical cells once, and for diffuse beams the EGC can
win. See tests for the pinned counterexample.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .errors import InconsistentInputError, ParameterError
from .pointing import escape_probability, n0_pmf


class Combiner(enum.Enum):
    MRC = "MRC"
    EGC = "EGC"


@dataclass(frozen=True)
class PpmConfig:
    """Pulse-position modulation with `order` slots (a power of two >= 2)."""

    order: int = 8

    def __post_init__(self) -> None:
        m = self.order
        if m < 2 or (m & (m - 1)) != 0:
            raise ParameterError(f"PPM order must be a power of two >= 2, got {m}")

    @property
    def bits_per_symbol(self) -> int:
        return int(self.order).bit_length() - 1


def q_function(x):
    """Gaussian tail probability Q(x) = P(N(0,1) > x), vectorized."""
    return ndtr(np.negative(x))


def pe_from_argument(arg, order: int):
    """Map the deflection argument to Pe = 1 - Q(-arg)^(order-1)."""
    if order < 2:
        raise ParameterError(f"PPM order must be >= 2, got {order}")
    return 1.0 - ndtr(arg) ** (order - 1)


def _combiner_value(combiner: Combiner) -> Combiner:
    if isinstance(combiner, str):
        return Combiner(combiner.upper())
    return combiner


def _check_sigma(sigma: float) -> None:
    if sigma <= 0.0:
        raise ParameterError(f"noise sigma must be positive, got {sigma}")


def _deflection(values: np.ndarray, sigma: float, mrc: bool, n_meas: int) -> float:
    # Combiner deflection over nonnegative signal means. With a single
    # measurement MRC and EGC coincide; route both through one expression so
    # the equality is exact rather than equal-up-to-rounding.
    flat = np.asarray(values, dtype=float).ravel()
    if flat.size == 1 and n_meas == 1:
        return float(flat[0] / np.sqrt(2.0 * sigma**2))
    if mrc:
        return float(np.sqrt(np.sum(flat * flat) / (2.0 * sigma**2)))
    return float(np.sum(flat) / np.sqrt(2.0 * sigma**2 * n_meas))


def coefficient_vector(
    magnitudes: np.ndarray, betas: np.ndarray, phases: np.ndarray
) -> np.ndarray:
    """Complex per-beam weights c_i = |h_i| sqrt(beta_i) exp(j phi_i)."""
    mags = np.asarray(magnitudes, dtype=float)
    b = np.asarray(betas, dtype=float)
    if np.any(mags < 0.0) or np.any(b < 0.0):
        raise ParameterError("magnitudes and power fractions must be nonnegative")
    return mags * np.sqrt(b) * np.exp(1j * np.asarray(phases, dtype=float))


def hermitian_quadratic_sum(
    tensor: np.ndarray,
    magnitudes: np.ndarray,
    betas: np.ndarray,
    phases: np.ndarray,
) -> np.ndarray:
    """Per-cell coherent signal energies b_m = sum_{i,l} X[m,i,l] c_i conj(c_l)
    with c from coefficient_vector.

    Each X_m must be Hermitian (it is a Gram matrix of modulated beam
    profiles, so this holds by construction for energy_matrix output); the
    result is then real up to rounding. Both properties are enforced and
    violations raise InconsistentInputError.
    """
    x = np.asarray(tensor, dtype=complex)
    if x.ndim != 3 or x.shape[1] != x.shape[2]:
        raise InconsistentInputError(
            f"tensor must be (M, N, N), got shape {x.shape}"
        )
    scale = np.max(np.abs(x)) if x.size else 0.0
    if not np.allclose(x, np.conj(np.swapaxes(x, 1, 2)), rtol=0.0, atol=1e-9 * (1.0 + scale)):
        raise InconsistentInputError("energy tensor is not Hermitian per cell")
    c = coefficient_vector(magnitudes, betas, phases)
    b = np.einsum("mij,i,j->m", x, c, np.conj(c))
    if np.any(np.abs(b.imag) > 1e-9 * (1.0 + np.abs(b.real))):
        raise InconsistentInputError(
            "quadratic form has a non-negligible imaginary part"
        )
    return b.real


def _beam_cell_terms(energies: np.ndarray, magnitudes: np.ndarray, betas: np.ndarray):
    # s_im = |h_i|^2 beta_i x_i^(m); energies may be (M,) shared or (N, M)
    mags = np.asarray(magnitudes, dtype=float)
    b = np.asarray(betas, dtype=float)
    e = np.asarray(energies, dtype=float)
    gains = (mags**2) * b
    if e.ndim == 1:
        return gains[:, None] * e[None, :]
    if e.ndim == 2 and e.shape[0] == gains.shape[0]:
        return gains[:, None] * e
    raise ParameterError(
        f"energies must be (M,) or (N, M); got shape {e.shape} for N={gains.shape[0]}"
    )


def pe_multi_array(
    combiner: Combiner,
    energies: np.ndarray,
    magnitudes: np.ndarray,
    betas: np.ndarray,
    sigma: float,
    order: int,
) -> float:
    """Pe with N separate detector arrays, one centered beam per array.

    `energies` holds the centered-beam per-cell energies x^(m), either one
    shared (M,) vector or per-beam (N, M). MRC combines all N*M measurements
    with matched weights; EGC adds them unweighted (noise grows as N*M).
    """
    _check_sigma(sigma)
    s = _beam_cell_terms(energies, magnitudes, betas)
    mrc = _combiner_value(combiner) is Combiner.MRC
    arg = _deflection(s, sigma, mrc, s.size)
    return float(pe_from_argument(arg, order))


def pe_single_no_alignment(
    combiner: Combiner,
    energies: np.ndarray,
    magnitudes: np.ndarray,
    betas: np.ndarray,
    sigma: float,
    order: int,
) -> float:
    """Pe for one array receiving N mutually non-coherent (non-overlapping)
    beams.

    MRC is exactly the N-array receiver of pe_multi_array; EGC sums the M
    physical cells once, so its noise term carries M rather than N*M.
    """
    _check_sigma(sigma)
    comb = _combiner_value(combiner)
    if comb is Combiner.MRC:
        return pe_multi_array(Combiner.MRC, energies, magnitudes, betas, sigma, order)
    s = _beam_cell_terms(energies, magnitudes, betas)
    arg = _deflection(s, sigma, False, s.shape[1])
    return float(pe_from_argument(arg, order))


def _pe_single_coherent_cells(
    combiner: Combiner, cell_signals: np.ndarray, sigma: float, order: int
) -> float:
    # generic single-array formulas on per-cell signal means X_m
    mrc = _combiner_value(combiner) is Combiner.MRC
    arg = _deflection(cell_signals, sigma, mrc, cell_signals.shape[0])
    return float(pe_from_argument(arg, order))


def pe_single_phase(
    combiner: Combiner,
    tensor: np.ndarray,
    magnitudes: np.ndarray,
    betas: np.ndarray,
    phases: np.ndarray,
    sigma: float,
    order: int,
) -> float:
    """Pe for one array with all beams aligned but carrying residual phase
    errors; tensor is the energy_matrix output (gamma included)."""
    _check_sigma(sigma)
    b = hermitian_quadratic_sum(tensor, magnitudes, betas, phases)
    return _pe_single_coherent_cells(combiner, b, sigma, order)


def pe_single_perfect(
    combiner: Combiner,
    tensor: np.ndarray,
    magnitudes: np.ndarray,
    betas: np.ndarray,
    sigma: float,
    order: int,
) -> float:
    """Perfect-synchronization special case of pe_single_phase."""
    zeros = np.zeros(np.asarray(magnitudes).shape[0])
    return pe_single_phase(combiner, tensor, magnitudes, betas, zeros, sigma, order)


def pe_single_full(
    combiner: Combiner,
    tensor: np.ndarray,
    magnitudes: np.ndarray,
    betas: np.ndarray,
    phases: np.ndarray,
    escaped_energies: np.ndarray,
    rho_c: float,
    sigma_x: float,
    sigma: float,
    order: int,
) -> float:
    """Pe with both phase errors and tracking escapes, averaged over the
    Binomial(N, p_escape) count of escaped beams.

    For each escaped count n0 the last n0 beams are taken as escaped (the
    beams are exchangeable, so the choice is a convention): they drop out of
    the coherent quadratic form and instead add |h_j|^2 beta_j * e_jm to
    each cell total, where e_jm = escaped_energies[j, m] is the (gamma
    scaled) energy beam j deposits on cell m from where it escaped to.
    """
    _check_sigma(sigma)
    mags = np.asarray(magnitudes, dtype=float)
    n = mags.shape[0]
    esc = np.asarray(escaped_energies, dtype=float)
    if esc.shape[0] != n:
        raise ParameterError(
            f"escaped_energies must have one row per beam, got shape {esc.shape}"
        )
    esc_terms = _beam_cell_terms(esc, mags, betas)
    weights = n0_pmf(n, escape_probability(rho_c, sigma_x))
    total = 0.0
    for n0, w in enumerate(weights):
        if w == 0.0:
            continue
        keep = np.ones(n)
        if n0 > 0:
            keep[n - n0 :] = 0.0
        b = hermitian_quadratic_sum(tensor, mags * keep, betas, phases)
        cell_signals = b + esc_terms[n - n0 :].sum(axis=0)
        total += w * _pe_single_coherent_cells(combiner, cell_signals, sigma, order)
    return float(total)


def pe_single_pointing(
    combiner: Combiner,
    tensor: np.ndarray,
    magnitudes: np.ndarray,
    betas: np.ndarray,
    escaped_energies: np.ndarray,
    rho_c: float,
    sigma_x: float,
    sigma: float,
    order: int,
) -> float:
    """Tracking escapes without phase errors: pe_single_full at zero phase."""
    zeros = np.zeros(np.asarray(magnitudes).shape[0])
    return pe_single_full(
        combiner,
        tensor,
        magnitudes,
        betas,
        zeros,
        escaped_energies,
        rho_c,
        sigma_x,
        sigma,
        order,
    )


def pe_asymptotic(
    combiner: Combiner,
    intensity_gain: float,
    energies: np.ndarray,
    sigma: float,
    order: int,
) -> float:
    """Large-N limit: the coherent sum collapses to one scalar intensity
    gain W multiplying the centered-beam cell energies x^(m)."""
    _check_sigma(sigma)
    if intensity_gain < 0.0:
        raise ParameterError(f"intensity gain must be >= 0, got {intensity_gain}")
    e = np.asarray(energies, dtype=float)
    mrc = _combiner_value(combiner) is Combiner.MRC
    arg = _deflection(intensity_gain * e, sigma, mrc, e.size)
    return float(pe_from_argument(arg, order))


def sample_intensity_gain(
    n_beams: int, sigma_h_sq: float, rng: np.random.Generator
) -> float:
    """Draw the limiting coherent intensity gain W ~ Exp(mean N sigma_h^2).

    W = X^2 + Y^2 where X, Y are the quadrature sums of N unit-phasor
    contributions; for large N they are iid centered Gaussians and W is
    exponential with mean N sigma_h^2.
    """
    if n_beams < 1:
        raise ParameterError(f"need at least one beam, got {n_beams}")
    if sigma_h_sq <= 0.0:
        raise ParameterError(f"sigma_h^2 must be positive, got {sigma_h_sq}")
    return float(rng.exponential(n_beams * sigma_h_sq))
