"""Detector-array geometry and Gaussian-beam energy integrals.

Lengths are millimeters and lens offsets are spatial frequencies in
cycles/mm throughout. A beam centered at (x0, y0) with radius rho and peak
intensity lam deposits the intensity profile

    lam / rho^2 * exp(-((x - x0)^2 + (y - y0)^2) / (2 rho^2))

on the detector plane; integrating it over the whole plane gives
2*pi*lam. Cross terms between two beams whose lenses sit at different
offsets pick up a complex modulation exp(-j 2 pi (du*x + dv*y)).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.special import erf

from .errors import GeometryError, ParameterError

_SQRT2 = np.sqrt(2.0)
_SEG_NORM = np.sqrt(np.pi / 2.0)


@dataclass(frozen=True)
class Cell:
    """One rectangular detector cell, [x_lo, x_hi] x [y_lo, y_hi]."""

    index: int
    x_lo: float
    x_hi: float
    y_lo: float
    y_hi: float


@dataclass(frozen=True)
class DetectorArray:
    """A square detector of side `side` tiled into rows x cols equal cells.

    Cells are indexed row-major: cell (r, c) has index r*cols + c, with x
    ascending by column and y ascending by row.
    """

    side: float
    rows: int
    cols: int
    cells: tuple[Cell, ...]

    @property
    def m_cells(self) -> int:
        return self.rows * self.cols

    def cell_bounds(self) -> np.ndarray:
        """Cell bounds as an (M, 4) array of [x_lo, x_hi, y_lo, y_hi] rows."""
        return np.array(
            [[c.x_lo, c.x_hi, c.y_lo, c.y_hi] for c in self.cells], dtype=float
        )


@dataclass(frozen=True)
class BeamProfile:
    """Gaussian beam parameters plus the lens-position frequency offset."""

    radius: float
    peak_intensity: float = 1.0
    offset_u: float = 0.0
    offset_v: float = 0.0

    def __post_init__(self) -> None:
        if self.radius <= 0.0:
            raise ParameterError(f"beam radius must be positive, got {self.radius}")
        if self.peak_intensity <= 0.0:
            raise ParameterError(
                f"peak intensity must be positive, got {self.peak_intensity}"
            )


def make_array(side: float, rows: int, cols: int) -> DetectorArray:
    """Build a square detector array of the given side tiled rows x cols.

    The cells partition [-side/2, side/2]^2 exactly; cell edges are computed
    from a single linspace per axis so adjacent cells share their boundary
    values bit-for-bit.
    """
    if side <= 0.0 or not np.isfinite(side):
        raise GeometryError(f"array side must be positive and finite, got {side}")
    if rows < 1 or cols < 1:
        raise GeometryError(f"grid must be at least 1x1, got {rows}x{cols}")
    xs = np.linspace(-side / 2.0, side / 2.0, cols + 1)
    ys = np.linspace(-side / 2.0, side / 2.0, rows + 1)
    cells = tuple(
        Cell(r * cols + c, xs[c], xs[c + 1], ys[r], ys[r + 1])
        for r in range(rows)
        for c in range(cols)
    )
    return DetectorArray(float(side), int(rows), int(cols), cells)


def lens_frequency(offset_mm: float, wavelength_mm: float, focal_mm: float) -> float:
    """Spatial frequency (cycles/mm) of a lens displaced offset_mm from the axis.

    A lens at transverse position u' behind a focusing element of focal
    length f0 illuminated at wavelength lam produces the plane-wave
    frequency u = u' / (lam * f0).
    """
    if wavelength_mm <= 0.0 or focal_mm <= 0.0:
        raise ParameterError(
            f"wavelength and focal length must be positive, got "
            f"{wavelength_mm} and {focal_mm}"
        )
    return offset_mm / (wavelength_mm * focal_mm)


def _gauss_segment(a: float, b: float, center: float, rho: float) -> float:
    # integral of (1/rho) exp(-(x-center)^2 / (2 rho^2)) over [a, b]
    s = _SQRT2 * rho
    return _SEG_NORM * (erf((b - center) / s) - erf((a - center) / s))


@lru_cache(maxsize=65536)
def _modulated_segment(a: float, b: float, w: float, rho: float) -> complex:
    # integral of (1/rho) exp(-x^2/(2 rho^2)) exp(-j 2 pi w x) over [a, b].
    # w = 0 reduces to the erf closed form; otherwise each part goes through
    # adaptive Gauss-Kronrod quadrature at 1e-12 absolute tolerance.
    if w == 0.0:
        return complex(_gauss_segment(a, b, 0.0, rho))
    inv2r2 = 1.0 / (2.0 * rho * rho)
    tpw = 2.0 * np.pi * w

    def re_part(x: float) -> float:
        return np.exp(-x * x * inv2r2) * np.cos(tpw * x) / rho

    def im_part(x: float) -> float:
        return -np.exp(-x * x * inv2r2) * np.sin(tpw * x) / rho

    re, _ = quad(re_part, a, b, epsabs=1e-12, epsrel=1e-12, limit=200)
    im, _ = quad(im_part, a, b, epsabs=1e-12, epsrel=1e-12, limit=200)
    return complex(re, im)


def cell_energy(
    cell: Cell,
    center: tuple[float, float],
    radius: float,
    peak_intensity: float = 1.0,
) -> float:
    """Energy a beam centered at `center` deposits on one detector cell.

    The 2-D Gaussian integral separates into two 1-D segments evaluated in
    closed form via erf. Over the whole plane the result tends to
    2*pi*peak_intensity.
    """
    if radius <= 0.0:
        raise ParameterError(f"beam radius must be positive, got {radius}")
    return float(
        peak_intensity
        * _gauss_segment(cell.x_lo, cell.x_hi, center[0], radius)
        * _gauss_segment(cell.y_lo, cell.y_hi, center[1], radius)
    )


def cell_energies_grid(
    bounds: np.ndarray,
    centers: np.ndarray,
    radius: float,
    peak_intensity: float = 1.0,
) -> np.ndarray:
    """Vectorized `cell_energy` over K beam centers and M cells.

    `bounds` is (M, 4) as produced by DetectorArray.cell_bounds and
    `centers` is (K, 2); returns a (K, M) energy table. Used by the Monte
    Carlo engine for escaped-beam energies, so it must agree with
    cell_energy exactly (same erf expression).
    """
    s = _SQRT2 * radius
    cx = centers[:, 0][:, None]
    cy = centers[:, 1][:, None]
    ex = erf((bounds[None, :, 1] - cx) / s) - erf((bounds[None, :, 0] - cx) / s)
    ey = erf((bounds[None, :, 3] - cy) / s) - erf((bounds[None, :, 2] - cy) / s)
    return peak_intensity * (_SEG_NORM * ex) * (_SEG_NORM * ey)


def cross_energy(
    cell: Cell,
    delta_u: float,
    delta_v: float,
    radius: float,
    peak_intensity: float = 1.0,
    gamma: float = 1.0,
) -> complex:
    """Cross-energy of two co-centered beams whose lens offsets differ by
    (delta_u, delta_v) cycles/mm, integrated over one cell.

    This is the cell integral of the common Gaussian envelope modulated by
    exp(-j 2 pi (delta_u x + delta_v y)); it is gamma-scaled by the
    tracking-channel power split. The integral separates per axis; each
    modulated axis factor is evaluated by adaptive quadrature (see
    _modulated_segment). Conjugate symmetry cross_energy(du, dv) =
    conj(cross_energy(-du, -dv)) holds exactly because the envelope is real.
    """
    if radius <= 0.0:
        raise ParameterError(f"beam radius must be positive, got {radius}")
    if not 0.0 < gamma <= 1.0:
        raise ParameterError(f"gamma must lie in (0, 1], got {gamma}")
    fx = _modulated_segment(cell.x_lo, cell.x_hi, float(delta_u), radius)
    fy = _modulated_segment(cell.y_lo, cell.y_hi, float(delta_v), radius)
    return complex(gamma * peak_intensity * fx * fy)


def energy_matrix(
    array: DetectorArray,
    beams: list[BeamProfile] | tuple[BeamProfile, ...],
    gamma: float = 1.0,
) -> np.ndarray:
    """Per-cell cross-energy tensor X with X[m, i, l] = cross-energy of
    beams i and l on cell m.

    All beams must share radius and peak intensity (they are copies of one
    transmit aperture looking through different lens positions). Each cell's
    matrix is Hermitian positive semidefinite by construction: entries for
    i >= l are computed and the strict upper triangle is mirrored by
    conjugation, which is exact because negating (du, dv) conjugates the
    modulated segments.
    """
    if not beams:
        raise ParameterError("at least one beam is required")
    rho = beams[0].radius
    lam = beams[0].peak_intensity
    for b in beams[1:]:
        if b.radius != rho or b.peak_intensity != lam:
            raise ParameterError("beams must share radius and peak intensity")
    if not 0.0 < gamma <= 1.0:
        raise ParameterError(f"gamma must lie in (0, 1], got {gamma}")

    n = len(beams)
    us = [b.offset_u for b in beams]
    vs = [b.offset_v for b in beams]
    out = np.empty((array.m_cells, n, n), dtype=complex)
    scale = gamma * lam
    for m, cell in enumerate(array.cells):
        for i in range(n):
            for l in range(i + 1):
                fx = _modulated_segment(cell.x_lo, cell.x_hi, us[i] - us[l], rho)
                fy = _modulated_segment(cell.y_lo, cell.y_hi, vs[i] - vs[l], rho)
                val = scale * fx * fy
                out[m, i, l] = val
                out[m, l, i] = val.conjugate()
    return out
