# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled scatter kernels for assembling site-local terms into dense many-body matrices.

Sites are ordered with site 0 most significant.  Each kernel walks the global
rows once, so writes stay inside one contiguous row of ``H``, and skips zero
local amplitudes; a term costs O(D * d_i * d_j) instead of the O(D^2) of an
explicit Kronecker product.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef Py_ssize_t _stride(const long long[::1] dims, Py_ssize_t site):
    cdef Py_ssize_t k, st = 1
    for k in range(site + 1, dims.shape[0]):
        st *= dims[k]
    return st


def accumulate_one(double complex[:, ::1] H, const long long[::1] dims, Py_ssize_t site,
                   const double complex[:, ::1] A, double complex coeff):
    cdef Py_ssize_t D = H.shape[0]
    cdef Py_ssize_t d = dims[site]
    cdef Py_ssize_t st = _stride(dims, site)
    cdef Py_ssize_t row, p, q, base
    cdef double complex amp
    for row in range(D):
        p = (row // st) % d
        base = row - p * st
        for q in range(d):
            amp = A[p, q]
            if amp.real != 0.0 or amp.imag != 0.0:
                H[row, base + q * st] += coeff * amp


def accumulate_two(double complex[:, ::1] H, const long long[::1] dims,
                   Py_ssize_t i, const double complex[:, ::1] A,
                   Py_ssize_t j, const double complex[:, ::1] B, double complex coeff):
    if i == j:
        raise ValueError("two-site term needs distinct sites; multiply same-site factors first")
    cdef Py_ssize_t D = H.shape[0]
    cdef Py_ssize_t di = dims[i], dj = dims[j]
    cdef Py_ssize_t si = _stride(dims, i), sj = _stride(dims, j)
    cdef Py_ssize_t row, p, r, q, t, base, off
    cdef double complex a, b
    for row in range(D):
        p = (row // si) % di
        r = (row // sj) % dj
        base = row - p * si - r * sj
        for q in range(di):
            a = A[p, q]
            if a.real == 0.0 and a.imag == 0.0:
                continue
            a = a * coeff
            off = base + q * si
            for t in range(dj):
                b = B[r, t]
                if b.real != 0.0 or b.imag != 0.0:
                    H[row, off + t * sj] += a * b
