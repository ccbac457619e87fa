# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the sequential hot loops.

Must stay bit-identical to cidlab._kernels_py: same op order, same
int64 -> float64 conversions.
"""

import numpy as np


def polya_paths(long long w, long long r, d, u):
    """Urn recursion for a batch of paths; see _kernels_py.polya_paths."""
    cdef double[:, ::1] uu = u
    cdef long long[:, ::1] dd = d
    cdef Py_ssize_t R = uu.shape[0]
    cdef Py_ssize_t n = uu.shape[1]

    x_arr = np.empty((R, n), dtype=np.float64)
    num_arr = np.empty((R, n + 1), dtype=np.int64)
    den_arr = np.empty((R, n + 1), dtype=np.int64)
    cdef double[:, ::1] x = x_arr
    cdef long long[:, ::1] num = num_arr
    cdef long long[:, ::1] den = den_arr

    cdef Py_ssize_t i, k
    cdef long long cnum, cden, dk
    cdef double p
    for i in range(R):
        cnum = w
        cden = w + r
        num[i, 0] = cnum
        den[i, 0] = cden
        for k in range(n):
            p = <double> cnum / <double> cden
            dk = dd[i, k]
            if uu[i, k] < p:
                x[i, k] = 1.0
                cnum = cnum + dk
            else:
                x[i, k] = 0.0
            cden = cden + dk
            num[i, k + 1] = cnum
            den[i, k + 1] = cden
    return x_arr, num_arr, den_arr
