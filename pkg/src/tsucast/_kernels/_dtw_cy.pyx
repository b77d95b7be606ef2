# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Tight-loop dynamic time warping kernels.

Same contract as the array-sweep fallback module: |.| local cost, the
three-step pattern, no path-length normalization. Each pair runs a
two-row DP with the GIL released.
"""

import numpy as np

cdef double INF = float("inf")


cdef inline double _cell(double cost, double up, double left, double diag) noexcept nogil:
    cdef double best = up
    if left < best:
        best = left
    if diag < best:
        best = diag
    return cost + best


def dtw_batch(A, B):
    """DTW distance of each row pair.

    Parameters
    ----------
    A : (P, n) float64 array
    B : (P, m) float64 array

    Returns
    -------
    (P,) float64 ndarray
    """
    A = np.ascontiguousarray(A, dtype=np.float64)
    B = np.ascontiguousarray(B, dtype=np.float64)
    cdef const double[:, ::1] a = A
    cdef const double[:, ::1] b = B
    cdef Py_ssize_t P = a.shape[0]
    cdef Py_ssize_t n = a.shape[1]
    cdef Py_ssize_t m = b.shape[1]
    out_arr = np.empty(P, dtype=np.float64)
    cdef double[::1] out = out_arr
    scratch = np.empty((2, m + 1), dtype=np.float64)
    cdef double[:, ::1] d = scratch
    cdef Py_ssize_t p, i, j, cur, prv
    cdef double ai, c
    with nogil:
        for p in range(P):
            d[0, 0] = 0.0
            for j in range(1, m + 1):
                d[0, j] = INF
            cur = 0
            for i in range(1, n + 1):
                prv = cur
                cur = 1 - cur
                d[cur, 0] = INF
                ai = a[p, i - 1]
                for j in range(1, m + 1):
                    c = ai - b[p, j - 1]
                    if c < 0.0:
                        c = -c
                    d[cur, j] = _cell(c, d[prv, j], d[cur, j - 1], d[prv, j - 1])
            out[p] = d[cur, m]
    return out_arr


def dtw_prefix_batch(A, B, prefixes):
    """DTW of every prefix pair (a[:p], b[:p]) from one DP pass per pair.

    Cell (p, p) of the full table equals the final cell of the length-p
    subproblem, so prefix distances fall out of the rows as they finish.

    Parameters
    ----------
    A, B : (P, n) float64 arrays (equal lengths)
    prefixes : sorted 1-D int array, each in [1, n]

    Returns
    -------
    (P, W) float64 ndarray
    """
    A = np.ascontiguousarray(A, dtype=np.float64)
    B = np.ascontiguousarray(B, dtype=np.float64)
    pf_arr = np.ascontiguousarray(prefixes, dtype=np.int64)
    cdef const double[:, ::1] a = A
    cdef const double[:, ::1] b = B
    cdef const long long[::1] pf = pf_arr
    cdef Py_ssize_t P = a.shape[0]
    cdef Py_ssize_t n = a.shape[1]
    cdef Py_ssize_t W = pf.shape[0]
    out_arr = np.empty((P, W), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    scratch = np.empty((2, n + 1), dtype=np.float64)
    cdef double[:, ::1] d = scratch
    cdef Py_ssize_t p, i, j, cur, prv, slot
    cdef double ai, c
    with nogil:
        for p in range(P):
            d[0, 0] = 0.0
            for j in range(1, n + 1):
                d[0, j] = INF
            cur = 0
            slot = 0
            for i in range(1, n + 1):
                prv = cur
                cur = 1 - cur
                d[cur, 0] = INF
                ai = a[p, i - 1]
                for j in range(1, n + 1):
                    c = ai - b[p, j - 1]
                    if c < 0.0:
                        c = -c
                    d[cur, j] = _cell(c, d[prv, j], d[cur, j - 1], d[prv, j - 1])
                while slot < W and pf[slot] == i:
                    out[p, slot] = d[cur, i]
                    slot = slot + 1
    return out_arr


def dtw_banded(a, b, band):
    """Sakoe-Chiba banded DTW of one pair (band widened to cover |n - m|)."""
    a_arr = np.ascontiguousarray(a, dtype=np.float64)
    b_arr = np.ascontiguousarray(b, dtype=np.float64)
    cdef const double[::1] x = a_arr
    cdef const double[::1] y = b_arr
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t m = y.shape[0]
    cdef Py_ssize_t w = int(band)
    if m - n > w:
        w = m - n
    if n - m > w:
        w = n - m
    table = np.full((n + 1, m + 1), INF)
    cdef double[:, ::1] d = table
    cdef Py_ssize_t i, j, jlo, jhi
    cdef double ai, c
    with nogil:
        d[0, 0] = 0.0
        for i in range(1, n + 1):
            jlo = i - w
            if jlo < 1:
                jlo = 1
            jhi = i + w
            if jhi > m:
                jhi = m
            ai = x[i - 1]
            for j in range(jlo, jhi + 1):
                c = ai - y[j - 1]
                if c < 0.0:
                    c = -c
                d[i, j] = _cell(c, d[i - 1, j], d[i, j - 1], d[i - 1, j - 1])
    return float(d[n, m])
