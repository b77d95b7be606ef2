"""Forecast evaluation: scalar errors, wet/dry classification, box stats."""

from dataclasses import dataclass

import numpy as np

from .errors import DataCorruptionError, DatabaseInconsistencyError

WET_THRESHOLD = 0.01  # m; a cell is inundated above this depth


@dataclass(frozen=True)
class BinaryCounts:
    """Wet/dry confusion counts over grid cells."""

    n_tp: int
    n_tn: int
    n_fp: int
    n_fn: int

    def __post_init__(self):
        for name in ("n_tp", "n_tn", "n_fp", "n_fn"):
            if getattr(self, name) < 0:
                raise DataCorruptionError("counts must be nonnegative")

    @property
    def total(self):
        return self.n_tp + self.n_tn + self.n_fp + self.n_fn


@dataclass(frozen=True)
class BoxStats:
    """Summary of an error sample as drawn in a box plot."""

    mean: float
    median: float
    q1: float
    q3: float
    iqr: float
    min: float
    max: float


def absolute_error(pred, truth):
    pred = float(pred)
    truth = float(truth)
    if not (np.isfinite(pred) and np.isfinite(truth)):
        raise DataCorruptionError("errors need finite inputs")
    return abs(pred - truth)


def _depths(grid):
    return grid.depths if hasattr(grid, "depths") else np.asarray(grid)


def classify_inundation(pred_grid, truth_grid, wet_threshold=WET_THRESHOLD):
    """Tally wet/dry agreement cell by cell.

    A cell is wet iff its depth strictly exceeds ``wet_threshold``.
    """
    pred = _depths(pred_grid)
    truth = _depths(truth_grid)
    if pred.shape != truth.shape:
        raise DatabaseInconsistencyError(
            f"grid shapes differ: {pred.shape} vs {truth.shape}"
        )
    pred_wet = pred > wet_threshold
    truth_wet = truth > wet_threshold
    return BinaryCounts(
        n_tp=int(np.count_nonzero(pred_wet & truth_wet)),
        n_tn=int(np.count_nonzero(~pred_wet & ~truth_wet)),
        n_fp=int(np.count_nonzero(pred_wet & ~truth_wet)),
        n_fn=int(np.count_nonzero(~pred_wet & truth_wet)),
    )


def tpr_fpr(counts):
    """True- and false-positive rates.

    With no truly wet cells the TPR denominator vanishes; such a
    prediction misses nothing, so TPR = 1.0. Likewise FPR = 0.0 when no
    truly dry cells exist.
    """
    wet = counts.n_tp + counts.n_fn
    dry = counts.n_fp + counts.n_tn
    tpr = counts.n_tp / wet if wet > 0 else 1.0
    fpr = counts.n_fp / dry if dry > 0 else 0.0
    return tpr, fpr


def box_stats(samples):
    """Quartile summary with linear interpolation between closest ranks."""
    arr = np.asarray(samples, dtype=np.float64)
    if arr.size == 0:
        raise DataCorruptionError("box stats need at least one sample")
    if not np.isfinite(arr).all():
        raise DataCorruptionError("box stats need finite samples")
    q1, median, q3 = np.percentile(arr, [25.0, 50.0, 75.0])
    return BoxStats(
        mean=float(arr.mean()),
        median=float(median),
        q1=float(q1),
        q3=float(q3),
        iqr=float(q3 - q1),
        min=float(arr.min()),
        max=float(arr.max()),
    )
