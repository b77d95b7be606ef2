"""Vectorized dynamic-programming kernels for dynamic time warping.

The batch kernels sweep anti-diagonals of the DP table so every pair in
the batch advances in lockstep under plain array arithmetic. Three
rotating buffers hold the last three anti-diagonals; buffer slots outside
a diagonal's valid cell range are never consulted except where they must
read as infinity, and those slots are provably never written (the valid
range only moves forward), so no per-iteration clearing is needed. The
lone exception is the origin cell, which is retired right after the first
interior diagonal consumes it.
"""

import numpy as np

INF = np.inf


def _diag_sweep(A, B, record=None):
    """Shared wavefront loop.

    A, B are (P, n) and (P, m) batches. When ``record`` is given it must
    be (sorted_prefixes, out) with out of shape (P, len(prefixes)); cell
    (p, p) of each pair is captured as diagonal 2p completes (square
    batches only). Returns the (P,) final distances.
    """
    P, n = A.shape
    m = B.shape[1]
    buf = np.full((3, P, n + 1), INF)
    buf[0, :, 0] = 0.0
    if record is not None:
        prefixes, out = record
        next_slot = 0
    for k in range(2, n + m + 1):
        lo = max(1, k - m)
        hi = min(n, k - 1)
        cur = buf[k % 3]
        prev = buf[(k - 1) % 3]
        prev2 = buf[(k - 2) % 3]
        cost = np.abs(A[:, lo - 1:hi] - B[:, k - hi - 1:k - lo][:, ::-1])
        best = np.minimum(prev[:, lo - 1:hi], prev[:, lo:hi + 1])
        np.minimum(best, prev2[:, lo - 1:hi], out=best)
        cur[:, lo:hi + 1] = cost + best
        if k == 2:
            buf[0, :, 0] = INF
        if record is not None and k % 2 == 0:
            p = k // 2
            while next_slot < len(prefixes) and prefixes[next_slot] == p:
                out[:, next_slot] = cur[:, p]
                next_slot += 1
    return buf[(n + m) % 3][:, n].copy()


def dtw_batch(A, B):
    """DTW distance of each row pair, |.| local cost, unconstrained.

    Parameters
    ----------
    A : (P, n) float64 ndarray
    B : (P, m) float64 ndarray

    Returns
    -------
    (P,) float64 ndarray
    """
    A = np.ascontiguousarray(A, dtype=np.float64)
    B = np.ascontiguousarray(B, dtype=np.float64)
    return _diag_sweep(A, B)


def dtw_prefix_batch(A, B, prefixes):
    """DTW of every prefix pair (a[:p], b[:p]) in one sweep per batch.

    Valid because cell (p, p) of the full table is exactly the final cell
    of the length-p subproblem: DP cells only ever look up and left.

    Parameters
    ----------
    A, B : (P, n) float64 ndarrays (equal lengths)
    prefixes : sorted 1-D int array, each in [1, n]

    Returns
    -------
    (P, W) float64 ndarray, column w = DTW(a[:prefixes[w]], b[:prefixes[w]])
    """
    A = np.ascontiguousarray(A, dtype=np.float64)
    B = np.ascontiguousarray(B, dtype=np.float64)
    prefixes = np.asarray(prefixes, dtype=np.int64)
    out = np.empty((A.shape[0], prefixes.size))
    _diag_sweep(A, B, record=(prefixes, out))
    return out


def dtw_banded(a, b, band):
    """Sakoe-Chiba banded DTW of one pair, full-table DP.

    The band is widened to |n - m| when necessary so the end cell stays
    reachable; the result is an upper bound on the exact distance.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    n, m = a.size, b.size
    w = max(int(band), abs(n - m))
    D = np.full((n + 1, m + 1), INF)
    D[0, 0] = 0.0
    for i in range(1, n + 1):
        ai = a[i - 1]
        for j in range(max(1, i - w), min(m, i + w) + 1):
            D[i, j] = abs(ai - b[j - 1]) + min(
                D[i - 1, j], D[i, j - 1], D[i - 1, j - 1]
            )
    return float(D[n, m])
