# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled sensitivity sweep and per-pair decay fits.

Summation orders match ``_fallback`` exactly: neighbor sums run in ascending
neighbor order starting from zero and the node itself is added last; column
normalizers are sequential sums over ascending node index.
"""

import numpy as np
cimport numpy as cnp
from libc.float cimport DBL_EPSILON
from libc.math cimport fabs, log, NAN
from libc.stdlib cimport malloc, free

cnp.import_array()

ctypedef cnp.int64_t idx_t


cdef inline void _step(const idx_t[::1] indptr, const idx_t[::1] indices,
                       double* x, double* y, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t u, jj
    cdef double acc, s
    for u in range(n):
        acc = 0.0
        for jj in range(indptr[u], indptr[u + 1]):
            acc = acc + x[indices[jj]]
        y[u] = acc + x[u]
    s = 0.0
    for u in range(n):
        s = s + y[u]
    for u in range(n):
        x[u] = y[u] / s


def normalized_columns(const idx_t[::1] indptr, const idx_t[::1] indices,
                       Py_ssize_t v, Py_ssize_t start, Py_ssize_t end):
    """Columns of the row-normalized walk matrix for target ``v``, layers start..end."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t layer, u
    out = np.zeros((end - start + 1, n), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef double* x = <double*> malloc(n * sizeof(double))
    cdef double* y = <double*> malloc(n * sizeof(double))
    if x == NULL or y == NULL:
        free(x)
        free(y)
        raise MemoryError()
    try:
        with nogil:
            for u in range(n):
                x[u] = 0.0
            x[v] = 1.0
            for layer in range(end + 1):
                if layer > 0:
                    _step(indptr, indices, x, y, n)
                if layer >= start:
                    for u in range(n):
                        o[layer - start, u] = x[u]
    finally:
        free(x)
        free(y)
    return out


def decay_rows(const idx_t[::1] indptr, const idx_t[::1] indices,
               const idx_t[::1] targets, Py_ssize_t start, Py_ssize_t end,
               double[:, ::1] k_out, double[:, ::1] n0_out):
    """Fill ``k_out[i, u]`` and ``n0_out[i, u]`` for target ``targets[i]``.

    Pairs whose series contains a non-positive value get NaN. Slopes within
    the rounding bound of the sweep (see ``decay.decay_matrix``) are set to 0.
    """
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t p = end - start + 1
    cdef Py_ssize_t t, u, layer, i, v
    cdef double lbar, sxx, ybar, sxy, d, slope, s1, base, maxabs, tol
    cdef Py_ssize_t dmax = 0
    cdef double* x = <double*> malloc(n * sizeof(double))
    cdef double* y = <double*> malloc(n * sizeof(double))
    cdef double* logs = <double*> malloc(p * n * sizeof(double))
    cdef char* bad = <char*> malloc(n * sizeof(char))
    if x == NULL or y == NULL or logs == NULL or bad == NULL:
        free(x)
        free(y)
        free(logs)
        free(bad)
        raise MemoryError()
    try:
        with nogil:
            lbar = 0.0
            for i in range(p):
                lbar = lbar + <double>(start + i)
            lbar = lbar / p
            sxx = 0.0
            s1 = 0.0
            for i in range(p):
                d = <double>(start + i) - lbar
                sxx = sxx + d * d
                s1 = s1 + fabs(d)
            for u in range(n):
                if indptr[u + 1] - indptr[u] > dmax:
                    dmax = indptr[u + 1] - indptr[u]
            base = <double>end * <double>(dmax + 2) * DBL_EPSILON
            for t in range(targets.shape[0]):
                v = targets[t]
                for u in range(n):
                    x[u] = 0.0
                    bad[u] = 0
                x[v] = 1.0
                for layer in range(end + 1):
                    if layer > 0:
                        _step(indptr, indices, x, y, n)
                    if layer >= start:
                        i = layer - start
                        for u in range(n):
                            if x[u] > 0.0:
                                logs[i * n + u] = log(x[u])
                            else:
                                logs[i * n + u] = 0.0
                                bad[u] = 1
                for u in range(n):
                    if bad[u]:
                        k_out[t, u] = NAN
                        n0_out[t, u] = NAN
                        continue
                    ybar = 0.0
                    maxabs = 0.0
                    for i in range(p):
                        ybar = ybar + logs[i * n + u]
                        if fabs(logs[i * n + u]) > maxabs:
                            maxabs = fabs(logs[i * n + u])
                    ybar = ybar / p
                    sxy = 0.0
                    for i in range(p):
                        sxy = sxy + (<double>(start + i) - lbar) * (logs[i * n + u] - ybar)
                    slope = sxy / sxx
                    tol = (base + DBL_EPSILON * maxabs) * s1 / sxx
                    if fabs(slope) <= tol:
                        slope = 0.0
                    k_out[t, u] = 0.0 - slope
                    n0_out[t, u] = ybar - slope * lbar
    finally:
        free(x)
        free(y)
        free(logs)
        free(bad)
