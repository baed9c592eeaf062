"""Pure NumPy fallback for the compiled kernels.

np.bincount accumulates sequentially over its input, so feeding it entries
in CSR (resp. CSC) order reproduces the compiled loops addition for
addition; mat-vec results are bitwise identical across backends.  The
dot-product reductions in ray_scan use BLAS and may differ from the
compiled loop in the last couple of ulps.
"""

import numpy as np


def csr_matvec(indptr, indices, data, x):
    n_rows = indptr.shape[0] - 1
    rows = np.repeat(np.arange(n_rows), np.diff(indptr))
    return np.bincount(rows, weights=data * x[indices], minlength=n_rows)


def csc_rmatvec(cindptr, crows, cdata, y):
    n_cols = cindptr.shape[0] - 1
    cols = np.repeat(np.arange(n_cols), np.diff(cindptr))
    return np.bincount(cols, weights=cdata * y[crows], minlength=n_cols)


def pdhg_step(indptr, indices, data, cindptr, crows, cdata, b, c, x, y, eta):
    """x+ = max(x - eta*(c - A.T y), 0); y+ = y + eta*(b - A(2x+ - x))."""
    aty = csc_rmatvec(cindptr, crows, cdata, y)
    x_new = np.maximum(x - eta * (c - aty), 0.0)
    w = 2.0 * x_new - x
    aw = csr_matvec(indptr, indices, data, w)
    y_new = y + eta * (b - aw)
    return x_new, y_new


def ray_scan(x, gx, gy_sq, lam):
    """Radius^2 and gap value of the clipped ray point at parameter lam."""
    moved = np.maximum(x + lam * gx, 0.0) - x
    rsq = float(moved @ moved) + lam * lam * gy_sq
    val = float(gx @ moved) + lam * gy_sq
    return rsq, val
