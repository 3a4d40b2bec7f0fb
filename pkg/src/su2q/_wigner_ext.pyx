# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled evaluation of SU(2) matrix elements.

Consumes the term table built by ``su2q._wigner_py.term_table``; the loop
over nodes runs without the GIL so callers may split node ranges across
threads.
"""
import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free

cnp.import_array()


cdef void _fill(const double[:, ::1] quats, Py_ssize_t start, Py_ssize_t stop,
                int two_l, const Py_ssize_t[::1] flat, const double[::1] coef,
                const int[:, ::1] expo, double complex[:, ::1] out) noexcept nogil:
    cdef Py_ssize_t node, t, p
    cdef Py_ssize_t n_terms = coef.shape[0]
    cdef int width = two_l + 1
    cdef double complex z[4]
    cdef double complex *pw = <double complex *> malloc(4 * width * sizeof(double complex))
    cdef double complex acc
    if pw == NULL:
        return
    for node in range(start, stop):
        z[0] = quats[node, 0] + 1j * quats[node, 3]
        z[1] = quats[node, 1] + 1j * quats[node, 2]
        z[2] = -quats[node, 1] + 1j * quats[node, 2]
        z[3] = quats[node, 0] - 1j * quats[node, 3]
        for p in range(4):
            pw[p * width] = 1.0
            for t in range(1, width):
                pw[p * width + t] = pw[p * width + t - 1] * z[p]
        for t in range(n_terms):
            acc = coef[t] * pw[expo[t, 0]] * pw[width + expo[t, 1]]
            acc = acc * pw[2 * width + expo[t, 2]] * pw[3 * width + expo[t, 3]]
            out[node, flat[t]] = out[node, flat[t]] + acc
    free(pw)


def wigner_range(const double[:, ::1] quats, Py_ssize_t start, Py_ssize_t stop, int two_l,
                 const Py_ssize_t[::1] flat, const double[::1] coef,
                 const int[:, ::1] expo, double complex[:, ::1] out):
    """Accumulate matrix elements for nodes ``start:stop`` into ``out``."""
    with nogil:
        _fill(quats, start, stop, two_l, flat, coef, expo, out)
