"""Numpy implementation of the compiled kernels in ``_kernels.pyx``.

Same signatures, same summation orders. Targets are processed in blocks so the
matrix power sweep runs as dense column operations.
"""

from __future__ import annotations

import math

import numpy as np

_BLOCK = 256


def _libm_log(a: np.ndarray) -> np.ndarray:
    # np.log may use SIMD code that differs from libm in the last bit
    return np.fromiter(map(math.log, a.ravel().tolist()), np.float64, a.size).reshape(a.shape)


def _neighbor_sums(indptr: np.ndarray, indices: np.ndarray, x: np.ndarray) -> np.ndarray:
    # add the k-th neighbor of every node in round k: sequential per node, vectorized across nodes
    out = np.zeros_like(x)
    deg = indptr[1:] - indptr[:-1]
    for k in range(int(deg.max(initial=0))):
        rows = np.flatnonzero(deg > k)
        out[rows] += x[indices[indptr[rows] + k]]
    return out


def _step(indptr: np.ndarray, indices: np.ndarray, x: np.ndarray) -> np.ndarray:
    y = _neighbor_sums(indptr, indices, x) + x
    s = np.cumsum(y, axis=0)[-1]
    return y / s


def normalized_columns(indptr, indices, v, start, end) -> np.ndarray:
    indptr = np.asarray(indptr, dtype=np.int64)
    indices = np.asarray(indices, dtype=np.int64)
    n = indptr.shape[0] - 1
    out = np.zeros((end - start + 1, n))
    x = np.zeros(n)
    x[v] = 1.0
    for layer in range(end + 1):
        if layer > 0:
            x = _step(indptr, indices, x)
        if layer >= start:
            out[layer - start] = x
    return out


def decay_rows(indptr, indices, targets, start, end, k_out, n0_out) -> None:
    indptr = np.asarray(indptr, dtype=np.int64)
    indices = np.asarray(indices, dtype=np.int64)
    targets = np.asarray(targets, dtype=np.int64)
    n = indptr.shape[0] - 1
    p = end - start + 1
    layers = np.arange(start, end + 1, dtype=np.float64)
    lbar = 0.0
    for ell in layers:
        lbar += ell
    lbar /= p
    sxx = 0.0
    s1 = 0.0
    for ell in layers:
        sxx += (ell - lbar) * (ell - lbar)
        s1 += abs(ell - lbar)
    deg = indptr[1:] - indptr[:-1]
    eps = np.finfo(np.float64).eps
    base = float(end) * float(int(deg.max(initial=0)) + 2) * eps

    for b0 in range(0, targets.shape[0], _BLOCK):
        block = targets[b0 : b0 + _BLOCK]
        # column j of x is the working vector for target block[j]
        x = np.zeros((n, block.shape[0]))
        x[block, np.arange(block.shape[0])] = 1.0
        logs = np.empty((p, n, block.shape[0]))
        bad = np.zeros((n, block.shape[0]), dtype=bool)
        for layer in range(end + 1):
            if layer > 0:
                x = _step(indptr, indices, x)
            if layer >= start:
                pos = x > 0.0
                bad |= ~pos
                logs[layer - start] = np.where(pos, _libm_log(np.where(pos, x, 1.0)), 0.0)
        ybar = np.zeros((n, block.shape[0]))
        maxabs = np.zeros((n, block.shape[0]))
        for i in range(p):
            ybar += logs[i]
            maxabs = np.maximum(maxabs, np.abs(logs[i]))
        ybar /= p
        sxy = np.zeros_like(ybar)
        for i in range(p):
            sxy += (layers[i] - lbar) * (logs[i] - ybar)
        slope = sxy / sxx
        tol = (base + eps * maxabs) * s1 / sxx
        slope = np.where(np.abs(slope) <= tol, 0.0, slope)
        k = 0.0 - slope
        n0 = ybar - slope * lbar
        k[bad] = np.nan
        n0[bad] = np.nan
        k_out[b0 : b0 + block.shape[0]] = k.T
        n0_out[b0 : b0 + block.shape[0]] = n0.T
