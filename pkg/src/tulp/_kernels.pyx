# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels: sparse mat-vecs, the fused PDHG step, and the
clipped-ray scan used by the normalized-gap bisection.

Accumulation order is fixed (CSR order for A@x, CSC order for A.T@y) and
must match tulp._kernels_py exactly so both backends round identically.
"""

import numpy as np

cimport numpy as cnp


def csr_matvec(cnp.int64_t[::1] indptr, cnp.int64_t[::1] indices,
               double[::1] data, double[::1] x):
    cdef Py_ssize_t m = indptr.shape[0] - 1
    out_arr = np.zeros(m, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t r, k
    cdef double acc
    for r in range(m):
        acc = 0.0
        for k in range(indptr[r], indptr[r + 1]):
            acc = acc + data[k] * x[indices[k]]
        out[r] = acc
    return out_arr


def csc_rmatvec(cnp.int64_t[::1] cindptr, cnp.int64_t[::1] crows,
                double[::1] cdata, double[::1] y):
    cdef Py_ssize_t n = cindptr.shape[0] - 1
    out_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t c, k
    cdef double acc
    for c in range(n):
        acc = 0.0
        for k in range(cindptr[c], cindptr[c + 1]):
            acc = acc + cdata[k] * y[crows[k]]
        out[c] = acc
    return out_arr


def pdhg_step(cnp.int64_t[::1] indptr, cnp.int64_t[::1] indices, double[::1] data,
              cnp.int64_t[::1] cindptr, cnp.int64_t[::1] crows, double[::1] cdata,
              double[::1] b, double[::1] c, double[::1] x, double[::1] y,
              double eta):
    """x+ = max(x - eta*(c - A.T y), 0); y+ = y + eta*(b - A(2x+ - x))."""
    cdef Py_ssize_t m = indptr.shape[0] - 1
    cdef Py_ssize_t n = cindptr.shape[0] - 1
    x_new_arr = np.empty(n, dtype=np.float64)
    y_new_arr = np.empty(m, dtype=np.float64)
    w_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] x_new = x_new_arr
    cdef double[::1] y_new = y_new_arr
    cdef double[::1] w = w_arr
    cdef Py_ssize_t i, r, k
    cdef double acc, v

    for i in range(n):
        acc = 0.0
        for k in range(cindptr[i], cindptr[i + 1]):
            acc = acc + cdata[k] * y[crows[k]]
        v = x[i] - eta * (c[i] - acc)
        x_new[i] = v if v > 0.0 else 0.0
        w[i] = 2.0 * x_new[i] - x[i]

    for r in range(m):
        acc = 0.0
        for k in range(indptr[r], indptr[r + 1]):
            acc = acc + data[k] * w[indices[k]]
        y_new[r] = y[r] + eta * (b[r] - acc)

    return x_new_arr, y_new_arr


def ray_scan(double[::1] x, double[::1] gx, double gy_sq, double lam):
    """Radius^2 and gap value of the clipped ray point at parameter lam."""
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t i
    cdef double rsq = 0.0
    cdef double val = 0.0
    cdef double xh, d
    for i in range(n):
        xh = x[i] + lam * gx[i]
        xh = xh if xh > 0.0 else 0.0
        d = xh - x[i]
        rsq += d * d
        val += gx[i] * d
    return rsq + lam * lam * gy_sq, val + lam * gy_sq
