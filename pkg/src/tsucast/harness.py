"""Cross-validation sweep machinery.

A sweep filters out negligible scenarios, splits the rest into k folds,
learns the reduced basis on each training fold only, then forecasts every
held-out scenario at every observation window with every method. Each
test scenario costs one sequential posterior pass (snapshotted at window
boundaries) and one DTW dynamic-programming pass per training pair (all
window lengths read out of the same table), so window count adds almost
nothing to the runtime.

Rows come back sorted by (fold, scenario, method, window) no matter how
the folds were scheduled, and all randomness (splitting, observation
noise) derives from the sweep seed, so a sweep is reproducible
byte for byte.
"""

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks

from . import bayes, detect, dtw, metrics, pod
from .core import GaugeSeries, ObservationWindow
from .errors import ConfigError, DatabaseInconsistencyError

DEFAULT_WINDOWS = tuple(60.0 * m for m in (1, 2, 3, 4, 5, 6, 8, 10, 12, 15))
PEAK_PROMINENCE = 0.05  # m
PEAK_MIN_HEIGHT = 0.01  # m
WORKERS_ENV_VAR = "TSUCAST_WORKERS"

REPORT_COLUMNS = (
    "fold", "scenario_id", "method", "t_obs",
    "eta_pred", "eta_true", "H_pred", "H_true", "TPR", "FPR", "t_arrv",
)


@dataclass(frozen=True)
class ArrivalInfo:
    """First wave peak at a gauge."""

    t_arrv: float
    peak_height: float


@dataclass(frozen=True)
class SweepConfig:
    """Everything a cross-validation sweep depends on besides the database.

    windows are observation times in seconds. noise_sigma adds Gaussian
    noise to held-out observations (never to training data). full_history
    appends a DTW-only case that consumes the entire horizon.
    """

    windows: tuple = DEFAULT_WINDOWS
    folds: int = 5
    rng_seed: int = 0
    methods: tuple = detect.METHODS
    target_gauge: int = None
    amplitude_threshold: float = 0.01
    full_history: bool = False
    mode_threshold: float = pod.DEFAULT_THRESHOLD
    fixed_r: int = None
    likelihood_scale: float = bayes.SCALE_FACTOR
    covariance_policy: str = "spectrum"
    peak_prominence: float = PEAK_PROMINENCE
    peak_min_height: float = PEAK_MIN_HEIGHT
    wet_threshold: float = metrics.WET_THRESHOLD
    noise_sigma: float = 0.0
    band: int = None
    dtw_aggregate: str = "sum"

    def __post_init__(self):
        windows = tuple(sorted(float(w) for w in set(self.windows)))
        if not windows:
            raise ConfigError("at least one observation window is required")
        if windows[0] <= 0:
            raise ConfigError("observation windows must be positive")
        object.__setattr__(self, "windows", windows)
        object.__setattr__(self, "methods", tuple(self.methods))
        if self.folds < 2:
            raise ConfigError("cross validation needs k >= 2 folds")
        for m in self.methods:
            if m not in detect.METHODS:
                raise ConfigError(f"unknown method: {m!r}")
        if not self.methods:
            raise ConfigError("at least one method is required")
        if self.noise_sigma < 0:
            raise ConfigError("noise_sigma must be nonnegative")
        if self.amplitude_threshold < 0:
            raise ConfigError("amplitude threshold must be nonnegative")

    def mode_rule(self):
        if self.fixed_r is not None:
            return pod.ModeRule.fixed(self.fixed_r)
        return pod.ModeRule.threshold(self.mode_threshold)


@dataclass(frozen=True)
class SweepRow:
    """One prediction evaluated against its ground truth."""

    fold: int
    scenario_id: int
    method: str
    t_obs: float
    eta_pred: float
    eta_true: float
    h_pred: float
    h_true: float
    tpr: float
    fpr: float
    t_arrv: float = None


@dataclass(frozen=True)
class SweepFailure:
    fold: int
    scenario_id: int
    message: str


@dataclass(frozen=True)
class SweepReport:
    rows: tuple
    failures: tuple

    def box_table(self):
        return aggregate_box_rows(self.rows)


def detect_arrival(series, prominence=PEAK_PROMINENCE,
                   min_height=PEAK_MIN_HEIGHT):
    """First local maximum that clears both thresholds, or None.

    Later, taller peaks are ignored on purpose: the arrival time is the
    time of the FIRST qualifying peak.
    """
    peaks, _ = find_peaks(
        series.samples, height=min_height, prominence=prominence
    )
    if peaks.size == 0:
        return None
    first = peaks[0]
    return ArrivalInfo(
        t_arrv=float(series.times[first]),
        peak_height=float(series.samples[first]),
    )


def filter_scenarios(db, threshold, target_gauge=None):
    """Drop scenarios whose target-gauge maximum falls below ``threshold``."""
    gauge = detect.resolve_target_gauge(db, target_gauge)
    keep = np.nonzero(db.eta_max_matrix()[:, gauge] >= threshold)[0]
    if keep.size == 0:
        raise ConfigError(
            f"no scenario reaches {threshold} m at gauge {gauge}; "
            "lower the amplitude threshold"
        )
    if keep.size == db.n_scenarios:
        return db
    return db.subset(keep)


def _kfold_positions(n, k, seed):
    if k < 2:
        raise ConfigError("cross validation needs k >= 2 folds")
    if k > n:
        raise ConfigError(f"cannot split {n} scenarios into {k} folds")
    perm = np.random.default_rng(seed).permutation(n)
    pairs = []
    for chunk in np.array_split(perm, k):
        test = np.sort(chunk)
        train = np.setdiff1d(np.arange(n), chunk)
        pairs.append((train, test))
    return pairs


def kfold_split(db, k, seed):
    """Deterministic shuffled k-fold split into (train, test) databases.

    Test folds are disjoint, cover the database, and differ in size by at
    most one; within each side the original scenario order is kept.
    """
    return [
        (db.subset(train), db.subset(test))
        for train, test in _kfold_positions(db.n_scenarios, k, seed)
    ]


def _method_rank(method):
    return detect.METHODS.index(method)


def _observation_noise(cfg, fold_index, scenario_id, shape):
    rng = np.random.default_rng((cfg.rng_seed, fold_index, scenario_id))
    return cfg.noise_sigma * rng.standard_normal(shape)


def _evaluate_scenario(record, train, cfg, fold_index, gauge, basis, coeffs,
                       model, windows):
    """All rows for one held-out scenario."""
    observed = record.waveforms
    if cfg.noise_sigma > 0:
        observed = observed + _observation_noise(
            cfg, fold_index, record.scenario_id, observed.shape
        )

    arrival = detect_arrival(
        record.gauge_series(gauge), cfg.peak_prominence, cfg.peak_min_height
    )
    t_arrv = arrival.t_arrv if arrival is not None else None

    window_steps = [w.step_count for w in windows]
    bayesian = [m for m in cfg.methods if m != detect.METHOD_SHORTEST_DTW]

    snapshots = {}
    if bayesian:
        wanted = set(window_steps)
        state = bayes.PosteriorState.uniform(train.n_scenarios)
        for t in range(max(window_steps)):
            alpha = pod.project(basis, observed[:, t])
            state = bayes.update(state, alpha, coeffs.at_step(t), model)
            if t + 1 in wanted:
                snapshots[t + 1] = state

    dtw_choice = {}
    if detect.METHOD_SHORTEST_DTW in cfg.methods:
        dtw_steps = set(window_steps)
        if cfg.full_history:
            dtw_steps.add(train.n_steps)
        dtw_steps = sorted(dtw_steps)
        table = dtw.scenario_dtw_table(
            train, observed, dtw_steps, band=cfg.band,
            aggregate=cfg.dtw_aggregate,
        )
        ids = train.scenario_ids
        for w, steps in enumerate(dtw_steps):
            col = table[:, w]
            dtw_choice[steps] = int(ids[col == col.min()].min())

    eta_true = float(record.eta_max_per_gauge[gauge])
    h_true = float(record.h_max)
    truth_grid = record.inundation

    def evaluate(prediction):
        counts = metrics.classify_inundation(
            prediction.inundation_pred, truth_grid, cfg.wet_threshold
        )
        tpr, fpr = metrics.tpr_fpr(counts)
        return SweepRow(
            fold=fold_index,
            scenario_id=record.scenario_id,
            method=prediction.method,
            t_obs=prediction.t_obs,
            eta_pred=prediction.eta_max_pred,
            eta_true=eta_true,
            h_pred=prediction.h_max_pred,
            h_true=h_true,
            tpr=tpr,
            fpr=fpr,
            t_arrv=t_arrv,
        )

    rows = []
    for window in windows:
        steps = window.step_count
        for method in cfg.methods:
            if method == detect.METHOD_MOST_PROBABLE:
                pred = detect.most_probable(
                    snapshots[steps], train, window.t_obs, gauge
                )
            elif method == detect.METHOD_WEIGHTED_MEAN:
                pred = detect.weighted_mean(
                    snapshots[steps], train, window.t_obs, gauge
                )
            else:
                pred = detect.copy_prediction(
                    train, dtw_choice[steps], method, window.t_obs, gauge
                )
            rows.append(evaluate(pred))

    if cfg.full_history and detect.METHOD_SHORTEST_DTW in cfg.methods:
        horizon = train.n_steps * train.dt
        if horizon not in cfg.windows:
            pred = detect.copy_prediction(
                train, dtw_choice[train.n_steps], detect.METHOD_SHORTEST_DTW,
                horizon, gauge,
            )
            rows.append(evaluate(pred))
    return rows


def _evaluate_fold(db, cfg, fold_index, train_pos, test_pos):
    train = db.subset(train_pos)
    test = db.subset(test_pos)
    gauge = detect.resolve_target_gauge(db, cfg.target_gauge)

    basis = pod.compute_basis(pod.assemble_matrix(train), cfg.mode_rule())
    coeffs = pod.extract_coefficients(basis, train)
    model = bayes.LikelihoodModel.from_basis(
        basis, cfg.likelihood_scale, cfg.covariance_policy
    )
    windows = [ObservationWindow.for_database(db, t) for t in cfg.windows]

    rows, failures = [], []
    for record in test:
        try:
            rows.extend(
                _evaluate_scenario(
                    record, train, cfg, fold_index, gauge, basis, coeffs,
                    model, windows,
                )
            )
        except Exception as exc:  # noqa: BLE001 - isolate bad scenarios
            failures.append(
                SweepFailure(
                    fold=fold_index,
                    scenario_id=record.scenario_id,
                    message=f"{type(exc).__name__}: {exc}",
                )
            )
    return rows, failures


def resolve_workers(workers=None):
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get(WORKERS_ENV_VAR, "").strip()
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ConfigError(
                f"{WORKERS_ENV_VAR} must be an integer, got {env!r}"
            ) from exc
    return 1


def run_sweep(db, cfg, workers=None):
    """Full k-fold sweep; returns rows sorted deterministically.

    A scenario whose evaluation raises is recorded under failures and the
    sweep keeps going.
    """
    for t in cfg.windows:
        if ObservationWindow.for_database(db, t).step_count < 1:
            raise ConfigError(f"window {t} s is shorter than one {db.dt} s step")
    filtered = filter_scenarios(db, cfg.amplitude_threshold, cfg.target_gauge)
    splits = _kfold_positions(filtered.n_scenarios, cfg.folds, cfg.rng_seed)
    workers = resolve_workers(workers)

    results = []
    if workers > 1 and len(splits) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(splits))) as pool:
            futures = [
                pool.submit(_evaluate_fold, filtered, cfg, i, train, test)
                for i, (train, test) in enumerate(splits)
            ]
            results = [f.result() for f in futures]
    else:
        for i, (train, test) in enumerate(splits):
            results.append(_evaluate_fold(filtered, cfg, i, train, test))

    rows, failures = [], []
    for fold_rows, fold_failures in results:
        rows.extend(fold_rows)
        failures.extend(fold_failures)
    rows.sort(
        key=lambda r: (r.fold, r.scenario_id, _method_rank(r.method), r.t_obs)
    )
    failures.sort(key=lambda f: (f.fold, f.scenario_id))
    return SweepReport(rows=tuple(rows), failures=tuple(failures))


@dataclass(frozen=True)
class BoxRow:
    """Distribution summary of one (method, window) cell of the sweep."""

    method: str
    t_obs: float
    n: int
    eta_err: metrics.BoxStats
    h_err: metrics.BoxStats
    tpr_mean: float
    fpr_mean: float


def aggregate_box_rows(rows):
    """Box stats of the absolute errors, grouped by (method, t_obs)."""
    groups = {}
    for row in rows:
        groups.setdefault((row.method, row.t_obs), []).append(row)
    out = []
    for method, t_obs in sorted(
        groups, key=lambda k: (_method_rank(k[0]), k[1])
    ):
        cell = groups[(method, t_obs)]
        eta_err = [abs(r.eta_pred - r.eta_true) for r in cell]
        h_err = [abs(r.h_pred - r.h_true) for r in cell]
        out.append(
            BoxRow(
                method=method,
                t_obs=t_obs,
                n=len(cell),
                eta_err=metrics.box_stats(eta_err),
                h_err=metrics.box_stats(h_err),
                tpr_mean=float(np.mean([r.tpr for r in cell])),
                fpr_mean=float(np.mean([r.fpr for r in cell])),
            )
        )
    return out


def _fmt(value):
    if value is None:
        return ""
    return repr(float(value))


def write_report_csv(report, path):
    """One row per prediction, stable field order and float formatting."""
    lines = [",".join(REPORT_COLUMNS)]
    for r in report.rows:
        lines.append(
            ",".join(
                [
                    str(r.fold), str(r.scenario_id), r.method, _fmt(r.t_obs),
                    _fmt(r.eta_pred), _fmt(r.eta_true),
                    _fmt(r.h_pred), _fmt(r.h_true),
                    _fmt(r.tpr), _fmt(r.fpr), _fmt(r.t_arrv),
                ]
            )
        )
    with open(path, "w", newline="") as f:
        f.write("\n".join(lines) + "\n")


def read_report_csv(path):
    """Inverse of write_report_csv."""
    with open(path, "r", newline="") as f:
        lines = f.read().splitlines()
    if not lines or tuple(lines[0].split(",")) != REPORT_COLUMNS:
        raise DatabaseInconsistencyError(f"{path} is not a sweep report")
    rows = []
    for line in lines[1:]:
        if not line:
            continue
        parts = line.split(",")
        rows.append(
            SweepRow(
                fold=int(parts[0]),
                scenario_id=int(parts[1]),
                method=parts[2],
                t_obs=float(parts[3]),
                eta_pred=float(parts[4]),
                eta_true=float(parts[5]),
                h_pred=float(parts[6]),
                h_true=float(parts[7]),
                tpr=float(parts[8]),
                fpr=float(parts[9]),
                t_arrv=float(parts[10]) if parts[10] else None,
            )
        )
    return rows


def write_boxstats_csv(box_rows, path):
    header = ["method", "t_obs", "n"]
    for prefix in ("eta_err", "H_err"):
        for stat in ("mean", "median", "q1", "q3", "iqr", "min", "max"):
            header.append(f"{prefix}_{stat}")
    header += ["tpr_mean", "fpr_mean"]
    lines = [",".join(header)]
    for row in box_rows:
        cells = [row.method, _fmt(row.t_obs), str(row.n)]
        for stats in (row.eta_err, row.h_err):
            cells += [
                _fmt(stats.mean), _fmt(stats.median), _fmt(stats.q1),
                _fmt(stats.q3), _fmt(stats.iqr), _fmt(stats.min),
                _fmt(stats.max),
            ]
        cells += [_fmt(row.tpr_mean), _fmt(row.fpr_mean)]
        lines.append(",".join(cells))
    with open(path, "w", newline="") as f:
        f.write("\n".join(lines) + "\n")


def write_scatter_csv(rows, path):
    """Prediction-vs-truth pairs with arrival times, for scatter plots."""
    header = (
        "method,t_obs,fold,scenario_id,eta_pred,eta_true,H_pred,H_true,t_arrv"
    )
    ordered = sorted(
        rows,
        key=lambda r: (_method_rank(r.method), r.t_obs, r.fold, r.scenario_id),
    )
    lines = [header]
    for r in ordered:
        lines.append(
            ",".join(
                [
                    r.method, _fmt(r.t_obs), str(r.fold), str(r.scenario_id),
                    _fmt(r.eta_pred), _fmt(r.eta_true),
                    _fmt(r.h_pred), _fmt(r.h_true), _fmt(r.t_arrv),
                ]
            )
        )
    with open(path, "w", newline="") as f:
        f.write("\n".join(lines) + "\n")


def write_failures_csv(failures, path):
    lines = ["fold,scenario_id,message"]
    for f_ in failures:
        msg = f_.message.replace(",", ";").replace("\n", " ")
        lines.append(f"{f_.fold},{f_.scenario_id},{msg}")
    with open(path, "w", newline="") as f:
        f.write("\n".join(lines) + "\n")
