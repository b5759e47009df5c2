"""Pure-NumPy implementations of the per-trial hot kernels.

Selected when the compiled extension is unavailable (or forced via
FSO_MISO_BACKEND=python). Signatures and semantics match fso_miso._kernels
exactly; the compiled module is only a faster evaluation of the same
arithmetic.
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtr

BACKEND_NAME = "python"


def quad_form_pe_batch(
    tensor: np.ndarray,
    coeff: np.ndarray,
    additive: np.ndarray,
    sigma: float,
    order: int,
    mrc: bool,
) -> np.ndarray:
    """Per-trial Pe from coherent cell statistics.

    tensor: (M, N, N) Hermitian cross-energy tensor
    coeff: (T, N) complex per-beam weights (escaped beams zeroed)
    additive: (T, M) incoherent per-cell additions (escaped-beam energy)

    Cell signal X_tm = Re(sum_il tensor[m,i,l] c_ti conj(c_tl)) + additive,
    then arg = sqrt(sum_m X^2 / (2 sigma^2)) for MRC or
    sum_m X / sqrt(2 sigma^2 M) for EGC, and Pe = 1 - ndtr(arg)^(order-1).
    """
    b = np.einsum("mij,ti,tj->tm", tensor, coeff, coeff.conj(), optimize=True).real
    b = b + additive
    if mrc:
        arg = np.sqrt(np.einsum("tm,tm->t", b, b) / (2.0 * sigma**2))
    else:
        arg = b.sum(axis=1) / np.sqrt(2.0 * sigma**2 * b.shape[1])
    return 1.0 - ndtr(arg) ** (order - 1)


def oracle_errors_batch(
    weights: np.ndarray,
    signal_term: float,
    sigma: float,
    noise: np.ndarray,
    tie_u: np.ndarray,
) -> np.ndarray:
    """Symbol decisions for the brute-force PPM oracle.

    noise: (T, K, C) standard normals, one per (trial, slot, measurement).
    Slot statistic = sigma * noise @ weights, plus signal_term in slot 0.
    The detector picks the argmax slot, breaking exact ties uniformly with
    the trial's dedicated uniform draw; an error is any pick != slot 0.
    """
    stats = sigma * (noise @ weights)
    stats[:, 0] += signal_term
    top = stats.max(axis=1)
    is_top = stats == top[:, None]
    n_ties = is_top.sum(axis=1)
    return (~is_top[:, 0]) | ((n_ties > 1) & (tie_u >= 1.0 / n_ties))
