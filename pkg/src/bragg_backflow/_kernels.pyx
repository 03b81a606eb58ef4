# cython: language_level=3
"""Compiled inner loops for the split-step propagator and the imaging blur.

Every function here has a numpy twin in ``_fallback.py`` with an identical
signature; ``kernels.py`` picks one at import time.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin, exp, sqrt, ceil

cnp.import_array()


def potential_phase(double complex[::1] psi, const double[::1] v, double g, double half_dt):
    """In place: psi *= exp(-i (v + g|psi|^2) half_dt)."""
    cdef Py_ssize_t i, n = psi.shape[0]
    cdef double re, im, ang, c, s
    for i in range(n):
        re = psi[i].real
        im = psi[i].imag
        ang = (v[i] + g * (re * re + im * im)) * half_dt
        c = cos(ang)
        s = sin(ang)
        psi[i] = (re * c + im * s) + 1j * (im * c - re * s)


def potential_decay(double complex[::1] psi, const double[::1] v, double g, double half_dt):
    """In place: psi *= exp(-(v + g|psi|^2) half_dt)  (imaginary time)."""
    cdef Py_ssize_t i, n = psi.shape[0]
    cdef double re, im, f
    for i in range(n):
        re = psi[i].real
        im = psi[i].imag
        f = exp(-(v[i] + g * (re * re + im * im)) * half_dt)
        psi[i] = (re * f) + 1j * (im * f)


def probability_current(const double complex[::1] psi, const double complex[::1] dpsi):
    """Im(conj(psi) * dpsi), pointwise."""
    cdef Py_ssize_t i, n = psi.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    for i in range(n):
        o[i] = psi[i].real * dpsi[i].imag - psi[i].imag * dpsi[i].real
    return out


def gaussian_blur(const double[::1] values, double dx, double sigma, double truncate=8.0):
    """Convolve with a unit-sum Gaussian of std ``sigma``; zero outside the grid."""
    cdef Py_ssize_t n = values.shape[0]
    out = np.zeros(n, dtype=np.float64)
    cdef double[::1] o = out
    if sigma <= 0.0:
        o[:] = values
        return out
    cdef Py_ssize_t half = <Py_ssize_t>ceil(truncate * sigma / dx)
    cdef Py_ssize_t i, m
    w_arr = np.empty(half + 1, dtype=np.float64)
    cdef double[::1] w = w_arr
    cdef double total, r
    for m in range(half + 1):
        r = m * dx / sigma
        w[m] = exp(-0.5 * r * r)
    total = w[0]
    for m in range(1, half + 1):
        total += 2.0 * w[m]
    for m in range(half + 1):
        w[m] /= total
    # symmetric kernel, accumulated one offset at a time: each pass is a
    # branch-free axpy over the grid, which the compiler vectorises
    for i in range(n):
        o[i] = w[0] * values[i]
    for m in range(1, half + 1 if half < n else n):
        r = w[m]
        for i in range(m, n):
            o[i] += r * values[i - m]
        for i in range(n - m):
            o[i] += r * values[i + m]
    return out
