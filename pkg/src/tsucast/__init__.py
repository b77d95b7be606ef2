"""Scenario-database tsunami forecasting.

Reduce a precomputed multi-gauge waveform database with proper orthogonal
decomposition, identify the unfolding scenario from streaming gauge
observations with sequential Bayesian updates (or a DTW nearest-neighbor
search), and forecast offshore wave height and inundation risk indices.
"""

from ._kernels import BACKEND as DTW_BACKEND
from .bayes import LikelihoodModel, PosteriorState, run_sequence
from .core import (
    GaugeSeries,
    GridGeometry,
    InundationGrid,
    ObservationWindow,
    ScenarioDatabase,
    ScenarioRecord,
)
from .detect import (
    METHODS,
    Prediction,
    most_probable,
    shortest_dtw,
    weighted_mean,
)
from .dtw import DtwResult, dtw_distance, multi_gauge_dtw, shortest_dtw_scenario
from .errors import (
    ConfigError,
    DataCorruptionError,
    DatabaseInconsistencyError,
    DegenerateInputError,
    DegenerateLikelihoodWarning,
    InsufficientDataError,
    ModelError,
    TsucastError,
)
from .harness import SweepConfig, SweepReport, kfold_split, run_sweep
from .io import load_database, save_database
from .metrics import BinaryCounts, BoxStats, box_stats, classify_inundation, tpr_fpr
from .pod import CoefficientSet, ModeRule, PodBasis, compute_basis, project
from .synthgen import GenConfig, generate_database

__version__ = "0.1.0"

__all__ = [
    "BinaryCounts",
    "BoxStats",
    "CoefficientSet",
    "ConfigError",
    "DTW_BACKEND",
    "DataCorruptionError",
    "DatabaseInconsistencyError",
    "DegenerateInputError",
    "DegenerateLikelihoodWarning",
    "DtwResult",
    "GaugeSeries",
    "GenConfig",
    "GridGeometry",
    "InundationGrid",
    "InsufficientDataError",
    "LikelihoodModel",
    "METHODS",
    "ModeRule",
    "ModelError",
    "ObservationWindow",
    "PodBasis",
    "PosteriorState",
    "Prediction",
    "ScenarioDatabase",
    "ScenarioRecord",
    "SweepConfig",
    "SweepReport",
    "TsucastError",
    "box_stats",
    "classify_inundation",
    "compute_basis",
    "dtw_distance",
    "generate_database",
    "kfold_split",
    "load_database",
    "most_probable",
    "multi_gauge_dtw",
    "project",
    "run_sequence",
    "run_sweep",
    "save_database",
    "shortest_dtw",
    "shortest_dtw_scenario",
    "tpr_fpr",
    "weighted_mean",
]
