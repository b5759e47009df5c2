# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled per-trial kernels: coherent quadratic-form Pe and PPM oracle
decisions. Same contracts as fso_miso._kernels_fallback."""

import numpy as np

cimport numpy as cnp
from libc.math cimport erf, erfc, fabs, pow, sqrt

cnp.import_array()

BACKEND_NAME = "compiled"

cdef double _SQRT1_2 = 0.70710678118654752440


cdef inline double _ndtr(double x) nogil:
    # standard normal CDF via erf/erfc, split for tail accuracy
    cdef double t = x * _SQRT1_2
    cdef double z = fabs(t)
    cdef double y
    if z < _SQRT1_2:
        y = 0.5 + 0.5 * erf(t)
    else:
        y = 0.5 * erfc(z)
        if t > 0:
            y = 1.0 - y
    return y


def quad_form_pe_batch(
    const double complex[:, :, ::1] tensor,
    const double complex[:, ::1] coeff,
    const double[:, ::1] additive,
    double sigma,
    int order,
    bint mrc,
):
    cdef Py_ssize_t n_trials = coeff.shape[0]
    cdef Py_ssize_t n_beams = coeff.shape[1]
    cdef Py_ssize_t m_cells = tensor.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n_trials)
    cdef double[::1] out_v = out
    cdef Py_ssize_t t, m, i, l
    cdef double complex acc, ci
    cdef double x, ssum, lsum, arg, q
    cdef double two_s2 = 2.0 * sigma * sigma
    cdef double egc_den = sqrt(two_s2 * m_cells)

    with nogil:
        for t in range(n_trials):
            ssum = 0.0
            lsum = 0.0
            for m in range(m_cells):
                acc = 0
                for i in range(n_beams):
                    ci = coeff[t, i]
                    for l in range(n_beams):
                        acc = acc + tensor[m, i, l] * ci * coeff[t, l].conjugate()
                x = acc.real + additive[t, m]
                ssum += x * x
                lsum += x
            if mrc:
                arg = sqrt(ssum / two_s2)
            else:
                arg = lsum / egc_den
            q = _ndtr(arg)
            out_v[t] = 1.0 - pow(q, order - 1)
    return out


def oracle_errors_batch(
    const double[::1] weights,
    double signal_term,
    double sigma,
    const double[:, :, ::1] noise,
    const double[::1] tie_u,
):
    cdef Py_ssize_t n_trials = noise.shape[0]
    cdef Py_ssize_t n_slots = noise.shape[1]
    cdef Py_ssize_t n_meas = noise.shape[2]
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] out = np.empty(n_trials, dtype=np.uint8)
    cdef cnp.uint8_t[::1] out_v = out
    cdef Py_ssize_t t, k, c
    cdef double acc, top, s0
    cdef int n_ties
    cdef bint err

    with nogil:
        for t in range(n_trials):
            top = 0.0
            s0 = 0.0
            n_ties = 0
            for k in range(n_slots):
                acc = 0.0
                for c in range(n_meas):
                    acc += noise[t, k, c] * weights[c]
                acc *= sigma
                if k == 0:
                    acc += signal_term
                    s0 = acc
                    top = acc
                    n_ties = 1
                elif acc > top:
                    top = acc
                    n_ties = 1
                elif acc == top:
                    n_ties += 1
            if s0 != top:
                err = True
            elif n_ties > 1:
                err = tie_u[t] >= 1.0 / n_ties
            else:
                err = False
            out_v[t] = err
    return out.view(bool)
