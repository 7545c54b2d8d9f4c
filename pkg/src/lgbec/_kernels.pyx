# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops.

Mirrors :mod:`lgbec._pykernels` function for function; the two must agree
to rounding (see tests/test_kernels.py).
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport pow, fabs

cnp.import_array()


def bose_head(double s, double z, Py_ssize_t m):
    """Partial sum of z**i / i**s for i = 1 .. m."""
    cdef double acc = 0.0, zi = 1.0
    cdef Py_ssize_t i
    for i in range(1, m + 1):
        zi *= z
        acc += zi / pow(<double>i, s)
    return acc


def bose_direct(double s, double z, double rtol, Py_ssize_t max_terms):
    """Sum z**i / i**s until a term drops below rtol times the running sum.

    Returns (sum, number_of_terms).  Only meant for z well below 1.
    """
    cdef double acc = 0.0, zi = 1.0, term
    cdef Py_ssize_t i
    for i in range(1, max_terms + 1):
        zi *= z
        term = zi / pow(<double>i, s)
        acc += term
        if term <= rtol * acc:
            return acc, i
    return acc, max_terms


def bose_direct_array(double s, cnp.ndarray[cnp.float64_t, ndim=1] z,
                      double rtol, Py_ssize_t max_terms):
    cdef Py_ssize_t n = z.shape[0], k, i
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n)
    cdef double acc, zi, term, zk
    for k in range(n):
        zk = z[k]
        acc = 0.0
        zi = 1.0
        for i in range(1, max_terms + 1):
            zi *= zk
            term = zi / pow(<double>i, s)
            acc += term
            if term <= rtol * acc:
                break
        out[k] = acc
    return out


def growth_series(double log_term, double phi, double x, double rtol,
                  Py_ssize_t max_terms):
    """sum_{p>=1} (L + sum_{q<=p} phi**q / q)**2 * x**p, adaptively truncated.

    Returns (sum, number_of_terms); number_of_terms == max_terms means the
    stopping rule never fired.
    """
    cdef double bracket = log_term, phiq = 1.0, xp = 1.0
    cdef double acc = log_term * log_term, term
    cdef Py_ssize_t p
    for p in range(1, max_terms + 1):
        phiq *= phi
        bracket += phiq / p
        xp *= x
        term = bracket * bracket * xp
        acc += term
        if term <= rtol * acc:
            return acc, p
    return acc, max_terms


def growth_series_fixed(double log_term, double phi, double x, Py_ssize_t n):
    """Same series with exactly n terms, no stopping rule."""
    cdef double bracket = log_term, phiq = 1.0, xp = 1.0
    cdef double acc = log_term * log_term
    cdef Py_ssize_t p
    for p in range(1, n + 1):
        phiq *= phi
        bracket += phiq / p
        xp *= x
        acc += bracket * bracket * xp
    return acc


def apply_hamiltonian(cnp.ndarray[cnp.float64_t, ndim=2] psi,
                      cnp.ndarray[cnp.float64_t, ndim=2] w,
                      cnp.ndarray[cnp.float64_t, ndim=2] kr,
                      cnp.ndarray[cnp.float64_t, ndim=2] kz,
                      cnp.ndarray[cnp.float64_t, ndim=2] out):
    """out = (K_r (x) 1 + 1 (x) K_z + w) psi on the (rho, z) grid.

    Rows are rho cells, columns z cells.  kr[i, k] is the coupling of row i
    to row i + k - 3 (7-band storage), likewise kz for columns; entries that
    point outside the grid are ignored.
    """
    cdef Py_ssize_t nr = psi.shape[0], nz = psi.shape[1], i, j, k, ii, jj
    cdef double acc
    for i in range(nr):
        for j in range(nz):
            acc = w[i, j] * psi[i, j]
            for k in range(7):
                ii = i + k - 3
                if 0 <= ii < nr:
                    acc += kr[i, k] * psi[ii, j]
                jj = j + k - 3
                if 0 <= jj < nz:
                    acc += kz[j, k] * psi[i, jj]
            out[i, j] = acc
    return out
