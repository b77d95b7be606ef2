"""Risk-index prediction methods.

Three ways to turn an identification result into a forecast: copy the
indices of the posterior's most probable scenario, superpose all
scenarios' indices under the posterior weights, or copy the indices of
the scenario nearest in DTW distance. Copied predictions carry the source
scenario id; the superposed one has none.
"""

import json
from dataclasses import dataclass

import numpy as np

from .core import InundationGrid
from .dtw import shortest_dtw_scenario
from .errors import DatabaseInconsistencyError, ModelError

METHOD_MOST_PROBABLE = "most_probable"
METHOD_WEIGHTED_MEAN = "weighted_mean"
METHOD_SHORTEST_DTW = "shortest_dtw"
METHODS = (METHOD_MOST_PROBABLE, METHOD_WEIGHTED_MEAN, METHOD_SHORTEST_DTW)


@dataclass(frozen=True)
class Prediction:
    """Forecast indices for one observation window.

    eta_max_pred is the maximum offshore wave height at the target gauge,
    h_max_pred the maximum inundation depth over the grid, and
    inundation_pred the full depth grid. chosen_id names the copied
    scenario when the method copies one.
    """

    method: str
    t_obs: float
    eta_max_pred: float
    h_max_pred: float
    inundation_pred: InundationGrid
    chosen_id: int = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ModelError(f"unknown method: {self.method!r}")
        if self.eta_max_pred < 0.0 or self.h_max_pred < 0.0:
            raise ModelError("risk indices must be nonnegative")


def resolve_target_gauge(db, target_gauge=None):
    """Default to the last (nearest-shore) gauge."""
    if target_gauge is None:
        return db.n_gauges - 1
    gauge = int(target_gauge)
    if not 0 <= gauge < db.n_gauges:
        raise DatabaseInconsistencyError(
            f"target gauge {gauge} outside 0..{db.n_gauges - 1}"
        )
    return gauge


def copy_prediction(db, scenario_id, method, t_obs, target_gauge=None):
    """Prediction that reuses one stored scenario's indices verbatim."""
    gauge = resolve_target_gauge(db, target_gauge)
    record = db.record(scenario_id)
    return Prediction(
        method=method,
        t_obs=float(t_obs),
        eta_max_pred=float(record.eta_max_per_gauge[gauge]),
        h_max_pred=float(record.h_max),
        inundation_pred=record.inundation,
        chosen_id=int(scenario_id),
    )


def _argmax_lowest_id(probs, scenario_ids):
    probs = np.asarray(probs)
    ids = np.asarray(scenario_ids)
    peak = probs.max()
    return int(ids[probs == peak].min())


def most_probable(posterior, db, t_obs, target_gauge=None):
    """Copy the indices of the highest-probability scenario.

    Ties go to the lowest scenario id. The posterior's entries must be in
    the database's scenario order.
    """
    if posterior.probs.size != db.n_scenarios:
        raise DatabaseInconsistencyError(
            "posterior length does not match the database"
        )
    chosen = _argmax_lowest_id(posterior.probs, db.scenario_ids)
    return copy_prediction(db, chosen, METHOD_MOST_PROBABLE, t_obs, target_gauge)


def weighted_mean(posterior, db, t_obs, target_gauge=None):
    """Posterior-weighted superposition of every scenario's indices."""
    if posterior.probs.size != db.n_scenarios:
        raise DatabaseInconsistencyError(
            "posterior length does not match the database"
        )
    gauge = resolve_target_gauge(db, target_gauge)
    probs = posterior.probs
    eta = float(probs @ db.eta_max_matrix()[:, gauge])
    h_max = float(probs @ db.h_max_vector())
    depths = np.einsum("s,sxy->xy", probs, db.grid_tensor())
    return Prediction(
        method=METHOD_WEIGHTED_MEAN,
        t_obs=float(t_obs),
        eta_max_pred=eta,
        h_max_pred=h_max,
        inundation_pred=InundationGrid.from_depths(depths),
        chosen_id=None,
    )


def shortest_dtw(db, observed, window, target_gauge=None, band=None,
                 aggregate="sum"):
    """Copy the indices of the scenario nearest in aggregated DTW distance."""
    chosen = shortest_dtw_scenario(
        db, observed, window, band=band, aggregate=aggregate
    )
    return copy_prediction(
        db, chosen, METHOD_SHORTEST_DTW, window.t_obs, target_gauge
    )


def prediction_to_dict(prediction):
    """JSON-ready view; the grid rides along row-major."""
    grid = prediction.inundation_pred
    return {
        "method": prediction.method,
        "t_obs": float(prediction.t_obs),
        "eta_max_pred": float(prediction.eta_max_pred),
        "h_max_pred": float(prediction.h_max_pred),
        "chosen_id": prediction.chosen_id,
        "grid_nx": grid.nx,
        "grid_ny": grid.ny,
        "grid_max_depth": float(grid.max_depth()),
    }


def write_prediction_json(prediction, path):
    with open(path, "w", newline="") as f:
        json.dump(prediction_to_dict(prediction), f, indent=2, sort_keys=True)
        f.write("\n")
