# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops; signatures mirror :mod:`dualwave._kernels_py`."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sin, cos, atan2

cnp.import_array()

# exact cos/sin reseed interval for the rotation recurrence
DEF RESEED = 256


def regulated_dft(const double complex[::1] samples, double x0, double dx,
                  const double[::1] weight, const double[::1] omega):
    cdef Py_ssize_t n = samples.shape[0], m = omega.shape[0]
    cdef Py_ssize_t i, j
    cdef double w, c, s, cr, ci, tr, ti, accr, acci, vr, vi, arg
    out = np.empty(m, dtype=np.complex128)
    cdef double complex[::1] res = out
    if weight.shape[0] != n:
        raise ValueError("weight and samples differ in length")
    with nogil:
        for i in range(m):
            w = omega[i]
            c = cos(w * dx)
            s = -sin(w * dx)
            accr = 0.0
            acci = 0.0
            cr = 1.0
            ci = 0.0
            for j in range(n):
                if j % RESEED == 0:
                    arg = -w * (x0 + j * dx)
                    cr = cos(arg)
                    ci = sin(arg)
                vr = samples[j].real * weight[j]
                vi = samples[j].imag * weight[j]
                accr = accr + (vr * cr - vi * ci)
                acci = acci + (vr * ci + vi * cr)
                tr = cr * c - ci * s
                ti = cr * s + ci * c
                cr = tr
                ci = ti
            res[i] = (accr + 1j * acci) * dx
    return out


def phase_increments(const double complex[::1] samples):
    cdef Py_ssize_t n = samples.shape[0], j
    cdef double ar, ai, br, bi
    out = np.empty(max(n - 1, 0), dtype=np.float64)
    cdef double[::1] res = out
    for j in range(n - 1):
        ar = samples[j + 1].real
        ai = samples[j + 1].imag
        br = samples[j].real
        bi = -samples[j].imag
        res[j] = atan2(ar * bi + ai * br, ar * br - ai * bi)
    return out


def accumulate_abs2(double[::1] acc, const double complex[::1] samples):
    cdef Py_ssize_t n = samples.shape[0], j
    cdef double re, im
    if acc.shape[0] != n:
        raise ValueError("accumulator and samples differ in length")
    for j in range(n):
        re = samples[j].real
        im = samples[j].imag
        acc[j] += re * re + im * im
