# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled fiber root solver: simultaneous (Aberth-Ehrlich) iteration.

Same contract as the numpy fallback: rows of lower coefficients of monic
polynomials in, canonically sorted root rows out.  Simple roots converge
cubically; clustered roots fall back on the iteration cap and are left to
the Newton polish plus the caller's residual check.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

cdef extern from "complex.h":
    double cabs(double complex) nogil
    double complex cexp(double complex) nogil


cdef inline void _eval_pdp(double complex* c, int n, double complex z,
                           double complex* p_out, double complex* dp_out) nogil:
    cdef double complex p = 1.0
    cdef double complex dp = 0.0
    cdef int k
    for k in range(n - 1, -1, -1):
        dp = dp * z + p
        p = p * z + c[k]
    p_out[0] = p
    dp_out[0] = dp


cdef int _aberth_one(double complex* c, int n, double complex* z) nogil:
    """Iterate one fiber in place; returns the sweep count used."""
    cdef int it, j, k
    cdef double complex p, dp, w, s, delta
    cdef double radius = 1.0
    cdef double worst, tol
    for k in range(n):
        if cabs(c[k]) > radius:
            radius = cabs(c[k])
    radius = 1.0 + radius
    for j in range(n):
        z[j] = radius * cexp(1j * (6.283185307179586 * j / n + 0.4))
    for it in range(100):
        worst = 0.0
        for j in range(n):
            _eval_pdp(c, n, z[j], &p, &dp)
            if dp == 0:
                dp = 1e-300
            w = p / dp
            s = 0.0
            for k in range(n):
                if k != j and z[j] != z[k]:
                    s = s + 1.0 / (z[j] - z[k])
            delta = w / (1.0 - w * s)
            z[j] = z[j] - delta
            if cabs(delta) > worst * (1.0 + cabs(z[j])):
                worst = cabs(delta) / (1.0 + cabs(z[j]))
        if worst < 1e-14:
            return it + 1
    return 100


cdef void _newton_polish(double complex* c, int n, double complex* z) nogil:
    cdef int sweep, j
    cdef double complex p, dp, step
    for sweep in range(3):
        for j in range(n):
            _eval_pdp(c, n, z[j], &p, &dp)
            if cabs(dp) > 1e-300:
                step = p / dp
                if cabs(step) < 0.5 * (1.0 + cabs(z[j])):
                    z[j] = z[j] - step


cdef void _sort_lex(double complex* z, int n) nogil:
    cdef int i, j
    cdef double complex key
    for i in range(1, n):
        key = z[i]
        j = i - 1
        while j >= 0 and (z[j].real > key.real or
                          (z[j].real == key.real and z[j].imag > key.imag)):
            z[j + 1] = z[j]
            j -= 1
        z[j + 1] = key


def solve_fibers(coeffs):
    """Batched root solve; see the numpy fallback for the contract."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] cs = np.ascontiguousarray(
        coeffs, dtype=np.complex128)
    cdef Py_ssize_t m = cs.shape[0]
    cdef int n = <int> cs.shape[1]
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] out = np.empty((m, n),
                                                              dtype=np.complex128)
    if n == 0:
        return out
    cdef Py_ssize_t s
    if n == 1:
        for s in range(m):
            out[s, 0] = -cs[s, 0]
        return out
    with nogil:
        for s in range(m):
            _aberth_one(&cs[s, 0], n, &out[s, 0])
            _newton_polish(&cs[s, 0], n, &out[s, 0])
            _sort_lex(&out[s, 0], n)
    return out


def residuals(coeffs, roots):
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] cs = np.ascontiguousarray(
        coeffs, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] zs = np.ascontiguousarray(
        roots, dtype=np.complex128)
    cdef Py_ssize_t m = cs.shape[0]
    cdef int n = <int> cs.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((m, n))
    cdef Py_ssize_t s
    cdef int j
    cdef double complex p, dp
    with nogil:
        for s in range(m):
            for j in range(n):
                _eval_pdp(&cs[s, 0], n, zs[s, j], &p, &dp)
                out[s, j] = cabs(p)
    return out
