"""Dynamic time warping distances and the nearest-scenario benchmark.

Distances use the textbook formulation: |.| local cost, steps down/right/
diagonal, no slope weights, no path-length normalization. The scenario
search aggregates per-gauge distances (sum by default) and breaks ties by
the lowest scenario id.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DatabaseInconsistencyError, DegenerateInputError

AGGREGATES = ("sum", "mean")


@dataclass(frozen=True)
class DtwResult:
    """Distance plus, when requested, the optimal warping path.

    The path is a tuple of 1-indexed (i, j) pairs from (1, 1) to (n, m).
    """

    distance: float
    path: tuple = None


def _as_series(x, name):
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1 or arr.size < 1:
        raise DegenerateInputError(f"{name} must be a nonempty 1-D series")
    return arr


def _dtw_with_path(a, b):
    """Full-table DP with backpointers; only used when a path is wanted."""
    n, m = a.size, b.size
    D = np.full((n + 1, m + 1), np.inf)
    D[0, 0] = 0.0
    for i in range(1, n + 1):
        costs = np.abs(a[i - 1] - b)
        for j in range(1, m + 1):
            D[i, j] = costs[j - 1] + min(
                D[i - 1, j], D[i, j - 1], D[i - 1, j - 1]
            )
    path = [(n, m)]
    i, j = n, m
    while (i, j) != (1, 1):
        if i == 1:
            j -= 1
        elif j == 1:
            i -= 1
        else:
            step = np.argmin([D[i - 1, j - 1], D[i - 1, j], D[i, j - 1]])
            if step == 0:
                i, j = i - 1, j - 1
            elif step == 1:
                i -= 1
            else:
                j -= 1
        path.append((i, j))
    path.reverse()
    return float(D[n, m]), tuple(path)


def dtw_distance(a, b, band=None, keep_path=False):
    """DTW distance between two series.

    Parameters
    ----------
    a, b : 1-D array_like, nonempty
    band : int, optional
        Sakoe-Chiba half-width; constrained distances are >= the exact one.
    keep_path : bool
        Also recover one optimal warping path (exact mode only).

    Returns
    -------
    DtwResult
    """
    a = _as_series(a, "a")
    b = _as_series(b, "b")
    if band is not None:
        if band < 0:
            raise DegenerateInputError("band width must be nonnegative")
        if keep_path:
            raise DegenerateInputError(
                "path recovery is only supported for exact distances"
            )
        return DtwResult(distance=_kernels.dtw_banded(a, b, int(band)))
    if keep_path:
        distance, path = _dtw_with_path(a, b)
        return DtwResult(distance=distance, path=path)
    d = _kernels.dtw_batch(a[None, :], b[None, :])
    return DtwResult(distance=float(d[0]))


def _window_steps(window, n_steps):
    steps = window.step_count
    if steps < 1:
        raise DegenerateInputError("observation window shorter than one step")
    if steps > n_steps:
        raise DatabaseInconsistencyError(
            "observation window runs past the stored waveforms"
        )
    return steps


def _aggregate(per_gauge, how, axis=-1):
    if how == "sum":
        return per_gauge.sum(axis=axis)
    if how == "mean":
        return per_gauge.mean(axis=axis)
    raise DegenerateInputError(f"unknown aggregation: {how!r}")


def multi_gauge_dtw(waves_a, waves_b, window, band=None, aggregate="sum"):
    """Aggregate per-gauge DTW over the observation window.

    waves_a and waves_b are (N_g, N_t) blocks; only the first
    ``window.step_count`` samples of each gauge enter the distance.
    """
    waves_a = np.asarray(waves_a, dtype=np.float64)
    waves_b = np.asarray(waves_b, dtype=np.float64)
    if waves_a.ndim != 2 or waves_b.ndim != 2:
        raise DatabaseInconsistencyError("waveform blocks must be 2-D")
    if waves_a.shape[0] != waves_b.shape[0]:
        raise DatabaseInconsistencyError(
            f"gauge counts differ: {waves_a.shape[0]} vs {waves_b.shape[0]}"
        )
    steps = _window_steps(window, min(waves_a.shape[1], waves_b.shape[1]))
    a = waves_a[:, :steps]
    b = waves_b[:, :steps]
    if band is not None:
        per_gauge = np.array(
            [_kernels.dtw_banded(a[g], b[g], int(band))
             for g in range(a.shape[0])]
        )
    else:
        per_gauge = _kernels.dtw_batch(a, b)
    return float(_aggregate(per_gauge, aggregate))


def scenario_dtw_table(db, observed, step_counts, band=None, aggregate="sum"):
    """Aggregated DTW of one observation against every scenario, for every
    window length, shape (N_s, W).

    All window columns come from a single DP pass per (scenario, gauge)
    pair: the pass runs to the longest window and reads prefix cells on
    the way. step_counts must be sorted ascending.
    """
    observed = np.asarray(observed, dtype=np.float64)
    tensor = db.waveform_tensor()
    n_s, n_g, n_t = tensor.shape
    if observed.shape[0] != n_g:
        raise DatabaseInconsistencyError(
            "observation gauge count does not match the database"
        )
    steps = np.asarray(step_counts, dtype=np.int64)
    if steps.size < 1 or (np.diff(steps) <= 0).any():
        raise DegenerateInputError("step counts must be strictly increasing")
    if steps[0] < 1 or steps[-1] > min(n_t, observed.shape[1]):
        raise DegenerateInputError("step counts outside the stored horizon")
    longest = int(steps[-1])

    if band is not None:
        table = np.empty((n_s, len(steps), n_g))
        for w, p in enumerate(steps):
            for s in range(n_s):
                for g in range(n_g):
                    table[s, w, g] = _kernels.dtw_banded(
                        observed[g, :p], tensor[s, g, :p], int(band)
                    )
        per_gauge = table.transpose(0, 2, 1)
    else:
        A = np.broadcast_to(
            observed[None, :, :longest], (n_s, n_g, longest)
        ).reshape(n_s * n_g, longest)
        B = tensor[:, :, :longest].reshape(n_s * n_g, longest)
        per_gauge = _kernels.dtw_prefix_batch(A, B, steps).reshape(
            n_s, n_g, len(steps)
        )
    return _aggregate(per_gauge, aggregate, axis=1)


def shortest_dtw_scenario(db, observed, window, band=None, aggregate="sum"):
    """Scenario id with the smallest aggregated DTW distance.

    Ties go to the lowest scenario id.
    """
    if db.n_scenarios < 1:
        raise DatabaseInconsistencyError("database is empty")
    steps = _window_steps(window, db.n_steps)
    distances = scenario_dtw_table(
        db, np.asarray(observed, dtype=np.float64)[:, :steps],
        [steps], band=band, aggregate=aggregate,
    )[:, 0]
    best = distances.min()
    ids = np.asarray(db.scenario_ids)
    return int(ids[distances == best].min())
