# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled solver kernel: projected subgradient descent on a pointwise
maximum of affine functions over a box or probability simplex.

Mirrors `_kernels_py` operation for operation; the engine module selects
whichever imports.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt

COMPILED = True

BOX = 0
SIMPLEX = 1


cdef void _project_box(double[::1] lo, double[::1] hi, double[::1] x) noexcept nogil:
    cdef Py_ssize_t i, n = x.shape[0]
    for i in range(n):
        if x[i] < lo[i]:
            x[i] = lo[i]
        elif x[i] > hi[i]:
            x[i] = hi[i]


cdef void _project_simplex(double[::1] x, double[::1] work) noexcept nogil:
    # descending insertion sort into work, then threshold shift
    cdef Py_ssize_t i, j, n = x.shape[0]
    cdef double key, css, tau
    cdef Py_ssize_t rho = 0
    for i in range(n):
        key = x[i]
        j = i
        while j > 0 and work[j - 1] < key:
            work[j] = work[j - 1]
            j -= 1
        work[j] = key
    css = 0.0
    tau = 0.0
    for i in range(n):
        css += work[i]
        if work[i] + (1.0 - css) / (i + 1) > 0.0:
            rho = i
            tau = (1.0 - css) / (i + 1)
        # recompute tau at the last qualifying index
    css = 0.0
    for i in range(rho + 1):
        css += work[i]
    tau = (1.0 - css) / (rho + 1)
    for i in range(n):
        x[i] = x[i] + tau
        if x[i] < 0.0:
            x[i] = 0.0


def pgd_max_affine(double[:, ::1] coefs, double[::1] consts, int kind,
                   double[::1] lo, double[::1] hi, x0, int iters,
                   double eta, bint inverse_sqrt, int step_offset=0,
                   trace=None):
    """See the pure twin for the contract."""
    cdef Py_ssize_t m = coefs.shape[0]
    cdef Py_ssize_t d = coefs.shape[1]
    cdef cnp.ndarray[double, ndim=1] x_arr = np.array(x0, dtype=np.float64, copy=True)
    cdef cnp.ndarray[double, ndim=1] xb_arr = np.empty(d, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] work_arr = np.empty(d, dtype=np.float64)
    cdef double[::1] x = x_arr
    cdef double[::1] x_best = xb_arr
    cdef double[::1] work = work_arr
    cdef double[::1] tr
    cdef bint have_trace = trace is not None
    if have_trace:
        tr = trace
    cdef Py_ssize_t i, j, k, ibest
    cdef double v, t, t_best, step

    with nogil:
        if kind == 0:
            _project_box(lo, hi, x)
        else:
            _project_simplex(x, work)
        # value and achieving piece at the current point
        ibest = 0
        t = -1e308
        for i in range(m):
            v = consts[i]
            for j in range(d):
                v += coefs[i, j] * x[j]
            if v > t:
                t = v
                ibest = i
        t_best = t
        for j in range(d):
            x_best[j] = x[j]
        if have_trace:
            tr[0] = t
        for k in range(1, iters + 1):
            if inverse_sqrt:
                step = eta / sqrt(<double> (step_offset + k))
            else:
                step = eta
            for j in range(d):
                x[j] = x[j] - step * coefs[ibest, j]
            if kind == 0:
                _project_box(lo, hi, x)
            else:
                _project_simplex(x, work)
            ibest = 0
            t = -1e308
            for i in range(m):
                v = consts[i]
                for j in range(d):
                    v += coefs[i, j] * x[j]
                if v > t:
                    t = v
                    ibest = i
            if t < t_best:
                t_best = t
                for j in range(d):
                    x_best[j] = x[j]
            if have_trace:
                tr[k] = t

    return xb_arr.copy(), float(t_best), x_arr, float(t)
