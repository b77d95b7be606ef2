"""Command-line driver.

Five subcommands cover the whole workflow: ``gen`` builds a synthetic
database, ``decompose`` fits and stores the reduced basis, ``detect``
forecasts from one observed waveform file, ``sweep`` runs the full
cross-validation benchmark, and ``report`` reshapes a sweep report into
plot-ready tables. Every run echoes its effective parameters (paths
excluded) to ``config.json`` in the output directory, so results are
reproducible from the artifacts alone.

All times are seconds. Exit codes: 0 success, 1 runtime/IO failure,
2 usage error.
"""

import json
from pathlib import Path

import click
import yaml

from . import bayes, detect as detect_mod, dtw as dtw_mod, harness, io, pod
from .core import ObservationWindow
from .errors import ConfigError, TsucastError
from .synthgen import GenConfig, generate_database

SUBCOMMANDS = ("gen", "decompose", "detect", "sweep", "report")

_METHOD_ALIASES = {
    "most-probable": detect_mod.METHOD_MOST_PROBABLE,
    "weighted-mean": detect_mod.METHOD_WEIGHTED_MEAN,
    "shortest-dtw": detect_mod.METHOD_SHORTEST_DTW,
}


def _load_config_file(path):
    with open(path, "r") as f:
        data = yaml.safe_load(f) or {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path} must hold a flat key-value mapping")
    flat = {}
    for key, value in data.items():
        flat[str(key).replace("-", "_")] = value
    return flat


def _echo_config(out_dir, params):
    """Write the effective non-path parameters next to the outputs."""
    clean = {}
    for key, value in params.items():
        if key in ("out", "db_path", "basis_path", "coeffs_path", "observed",
                   "report_csv", "config"):
            continue
        if isinstance(value, Path):
            value = str(value)
        clean[key] = value
    path = Path(out_dir) / "config.json"
    with open(path, "w", newline="") as f:
        json.dump(clean, f, indent=2, sort_keys=True)
        f.write("\n")


def _fail(exc):
    raise click.ClickException(str(exc)) from exc


@click.group()
@click.option(
    "--config", type=click.Path(exists=True, dir_okay=False), default=None,
    help="YAML key-value file supplying defaults for any flag.",
)
@click.pass_context
def main(ctx, config):
    """Scenario-database tsunami forecasting toolkit."""
    if config is not None:
        try:
            flat = _load_config_file(config)
        except (TsucastError, OSError, yaml.YAMLError) as exc:
            _fail(exc)
        ctx.default_map = {sub: flat for sub in SUBCOMMANDS}


@main.command()
@click.option("--out", required=True, type=click.Path(file_okay=False))
@click.option("--n-scenarios", default=GenConfig.n_scenarios, show_default=True)
@click.option("--n-gauges", default=GenConfig.n_gauges, show_default=True)
@click.option("--n-steps", default=GenConfig.n_steps, show_default=True)
@click.option("--dt", default=GenConfig.dt, show_default=True)
@click.option("--seed", default=GenConfig.rng_seed, show_default=True)
@click.option("--packets", default=GenConfig.packets, show_default=True)
@click.option("--amp-median", default=GenConfig.amp_median, show_default=True)
@click.option("--amp-sigma", default=GenConfig.amp_sigma, show_default=True)
@click.option("--amp-scale", default=GenConfig.amp_scale, show_default=True)
@click.option("--speed-min", default=GenConfig.speed_range[0], show_default=True)
@click.option("--speed-max", default=GenConfig.speed_range[1], show_default=True)
@click.option("--gauge-spacing-km", default=GenConfig.gauge_spacing_km,
              show_default=True)
@click.option("--onset-min", default=GenConfig.onset_range[0], show_default=True)
@click.option("--onset-max", default=GenConfig.onset_range[1], show_default=True)
@click.option("--period-min", default=GenConfig.period_range[0],
              show_default=True)
@click.option("--period-max", default=GenConfig.period_range[1],
              show_default=True)
@click.option("--width-min", default=GenConfig.width_range[0], show_default=True)
@click.option("--width-max", default=GenConfig.width_range[1], show_default=True)
@click.option("--decay-min", default=GenConfig.decay_range[0], show_default=True)
@click.option("--decay-max", default=GenConfig.decay_range[1], show_default=True)
@click.option("--phase-min", default=GenConfig.phase_range[0], show_default=True)
@click.option("--phase-max", default=GenConfig.phase_range[1], show_default=True)
@click.option("--grid-nx", default=GenConfig.grid_nx, show_default=True)
@click.option("--grid-ny", default=GenConfig.grid_ny, show_default=True)
@click.option("--ramp-height", default=GenConfig.ramp_height, show_default=True)
@click.option("--depth-scale", default=GenConfig.depth_scale, show_default=True)
def gen(out, n_scenarios, n_gauges, n_steps, dt, seed, packets, amp_median,
        amp_sigma, amp_scale, speed_min, speed_max, gauge_spacing_km,
        onset_min, onset_max, period_min, period_max, width_min, width_max,
        decay_min, decay_max, phase_min, phase_max, grid_nx, grid_ny,
        ramp_height, depth_scale):
    """Generate a synthetic scenario database."""
    try:
        cfg = GenConfig(
            n_scenarios=n_scenarios, n_gauges=n_gauges, n_steps=n_steps,
            dt=dt, rng_seed=seed, packets=packets, amp_median=amp_median,
            amp_sigma=amp_sigma, amp_scale=amp_scale,
            speed_range=(speed_min, speed_max),
            gauge_spacing_km=gauge_spacing_km,
            onset_range=(onset_min, onset_max),
            period_range=(period_min, period_max),
            width_range=(width_min, width_max),
            decay_range=(decay_min, decay_max),
            phase_range=(phase_min, phase_max),
            grid_nx=grid_nx, grid_ny=grid_ny,
            ramp_height=ramp_height, depth_scale=depth_scale,
        )
        db = generate_database(cfg)
        out_dir = Path(out)
        out_dir.mkdir(parents=True, exist_ok=True)
        io.save_database(db, out_dir)
        _echo_config(out_dir, click.get_current_context().params)
    except (TsucastError, OSError) as exc:
        _fail(exc)
    click.echo(f"wrote {db.n_scenarios} scenarios to {out}")


@main.command()
@click.option("--db", "db_path", required=True,
              type=click.Path(exists=True, file_okay=False))
@click.option("--out", required=True, type=click.Path(file_okay=False))
@click.option("--mode-threshold", default=pod.DEFAULT_THRESHOLD,
              show_default=True)
@click.option("--fixed-r", default=None, type=int,
              help="Fixed mode count overriding the threshold rule.")
def decompose(db_path, out, mode_threshold, fixed_r):
    """Fit the reduced basis of a database and store it."""
    try:
        db = io.load_database(db_path)
        rule = (pod.ModeRule.fixed(fixed_r) if fixed_r is not None
                else pod.ModeRule.threshold(mode_threshold))
        basis = pod.compute_basis(pod.assemble_matrix(db), rule)
        coeffs = pod.extract_coefficients(basis, db)
        out_dir = Path(out)
        out_dir.mkdir(parents=True, exist_ok=True)
        pod.save_basis(basis, out_dir / "basis.bin")
        pod.save_coefficients(coeffs, out_dir / "coeffs.bin")
        pod.write_contribution_csv(basis, out_dir / "contribution.csv")
        _echo_config(out_dir, click.get_current_context().params)
    except (TsucastError, OSError) as exc:
        _fail(exc)
    click.echo(f"retained {basis.r} of {basis.n_gauges} modes")


@main.command(name="detect")
@click.option("--db", "db_path", required=True,
              type=click.Path(exists=True, file_okay=False))
@click.option("--observed", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="CSV with a time column and one column per gauge.")
@click.option("--method", required=True,
              type=click.Choice(sorted(_METHOD_ALIASES)))
@click.option("--t-obs", required=True, type=float,
              help="Observation window in seconds.")
@click.option("--out", required=True, type=click.Path(file_okay=False))
@click.option("--basis", "basis_path", default=None,
              type=click.Path(exists=True, dir_okay=False),
              help="Stored basis; fitted on the fly when omitted.")
@click.option("--coeffs", "coeffs_path", default=None,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--target-gauge", default=None, type=int)
@click.option("--mode-threshold", default=pod.DEFAULT_THRESHOLD,
              show_default=True)
@click.option("--fixed-r", default=None, type=int)
@click.option("--likelihood-scale", default=bayes.SCALE_FACTOR,
              show_default=True)
@click.option("--covariance-policy", default="spectrum", show_default=True,
              type=click.Choice(["spectrum", "normalized"]))
@click.option("--band", default=None, type=int,
              help="Sakoe-Chiba half-width for the DTW method.")
@click.option("--dtw-aggregate", default="sum", show_default=True,
              type=click.Choice(list(dtw_mod.AGGREGATES)))
def detect(db_path, observed, method, t_obs, out, basis_path, coeffs_path,
           target_gauge, mode_threshold, fixed_r, likelihood_scale,
           covariance_policy, band, dtw_aggregate):
    """Forecast risk indices from one observed waveform file."""
    try:
        db = io.load_database(db_path)
        window = ObservationWindow.for_database(db, t_obs)
        waveforms = io.read_waveform_csv(observed, db.dt, t_obs)
        if waveforms.shape[0] != db.n_gauges:
            raise ConfigError(
                f"observation has {waveforms.shape[0]} gauges, "
                f"database has {db.n_gauges}"
            )
        method_name = _METHOD_ALIASES[method]

        if method_name == detect_mod.METHOD_SHORTEST_DTW:
            prediction = detect_mod.shortest_dtw(
                db, waveforms, window, target_gauge=target_gauge,
                band=band, aggregate=dtw_aggregate,
            )
        else:
            if basis_path is not None:
                basis = pod.load_basis(basis_path)
            else:
                rule = (pod.ModeRule.fixed(fixed_r) if fixed_r is not None
                        else pod.ModeRule.threshold(mode_threshold))
                basis = pod.compute_basis(pod.assemble_matrix(db), rule)
            if coeffs_path is not None:
                coeffs = pod.load_coefficients(coeffs_path)
            else:
                coeffs = pod.extract_coefficients(basis, db)
            model = bayes.LikelihoodModel.from_basis(
                basis, likelihood_scale, covariance_policy
            )
            posterior = bayes.run_sequence(
                coeffs, basis, waveforms, model, window=window
            )
            if method_name == detect_mod.METHOD_MOST_PROBABLE:
                prediction = detect_mod.most_probable(
                    posterior, db, t_obs, target_gauge
                )
            else:
                prediction = detect_mod.weighted_mean(
                    posterior, db, t_obs, target_gauge
                )

        out_dir = Path(out)
        out_dir.mkdir(parents=True, exist_ok=True)
        detect_mod.write_prediction_json(prediction, out_dir / "prediction.json")
        io.write_grid_binary(
            prediction.inundation_pred, out_dir / "inundation_pred.bin"
        )
        _echo_config(out_dir, click.get_current_context().params)
    except (TsucastError, OSError) as exc:
        _fail(exc)
    click.echo(
        f"{method}: eta_max {prediction.eta_max_pred:.4f} m, "
        f"H_max {prediction.h_max_pred:.4f} m"
    )


def _parse_float_list(text):
    return tuple(float(part) for part in str(text).split(",") if part != "")


def _parse_methods(text):
    out = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        key = part.replace("_", "-")
        if key not in _METHOD_ALIASES:
            raise ConfigError(f"unknown method: {part!r}")
        out.append(_METHOD_ALIASES[key])
    return tuple(out)


@main.command()
@click.option("--db", "db_path", required=True,
              type=click.Path(exists=True, file_okay=False))
@click.option("--out", required=True, type=click.Path(file_okay=False))
@click.option("--windows", default=",".join(str(w) for w in
                                            harness.DEFAULT_WINDOWS),
              show_default=True, help="Comma-separated t_obs values, seconds.")
@click.option("--folds", default=5, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--methods",
              default="most-probable,weighted-mean,shortest-dtw",
              show_default=True)
@click.option("--target-gauge", default=None, type=int)
@click.option("--amplitude-threshold", default=0.01, show_default=True)
@click.option("--full-history", is_flag=True, default=False)
@click.option("--mode-threshold", default=pod.DEFAULT_THRESHOLD,
              show_default=True)
@click.option("--fixed-r", default=None, type=int)
@click.option("--likelihood-scale", default=bayes.SCALE_FACTOR,
              show_default=True)
@click.option("--covariance-policy", default="spectrum", show_default=True,
              type=click.Choice(["spectrum", "normalized"]))
@click.option("--peak-prominence", default=harness.PEAK_PROMINENCE,
              show_default=True)
@click.option("--peak-min-height", default=harness.PEAK_MIN_HEIGHT,
              show_default=True)
@click.option("--wet-threshold", default=0.01, show_default=True)
@click.option("--noise-sigma", default=0.0, show_default=True,
              help="Additive Gaussian noise on held-out observations, m.")
@click.option("--band", default=None, type=int)
@click.option("--dtw-aggregate", default="sum", show_default=True,
              type=click.Choice(list(dtw_mod.AGGREGATES)))
@click.option("--workers", default=None, type=int,
              help=f"Fold-level processes; default ${harness.WORKERS_ENV_VAR} or 1.")
def sweep(db_path, out, windows, folds, seed, methods, target_gauge,
          amplitude_threshold, full_history, mode_threshold, fixed_r,
          likelihood_scale, covariance_policy, peak_prominence,
          peak_min_height, wet_threshold, noise_sigma, band, dtw_aggregate,
          workers):
    """Run the k-fold cross-validation benchmark."""
    try:
        db = io.load_database(db_path)
        cfg = harness.SweepConfig(
            windows=_parse_float_list(windows),
            folds=folds,
            rng_seed=seed,
            methods=_parse_methods(methods),
            target_gauge=target_gauge,
            amplitude_threshold=amplitude_threshold,
            full_history=full_history,
            mode_threshold=mode_threshold,
            fixed_r=fixed_r,
            likelihood_scale=likelihood_scale,
            covariance_policy=covariance_policy,
            peak_prominence=peak_prominence,
            peak_min_height=peak_min_height,
            wet_threshold=wet_threshold,
            noise_sigma=noise_sigma,
            band=band,
            dtw_aggregate=dtw_aggregate,
        )
        report = harness.run_sweep(db, cfg, workers=workers)
        out_dir = Path(out)
        out_dir.mkdir(parents=True, exist_ok=True)
        harness.write_report_csv(report, out_dir / "report.csv")
        harness.write_boxstats_csv(report.box_table(), out_dir / "boxstats.csv")
        if report.failures:
            harness.write_failures_csv(report.failures, out_dir / "failures.csv")
        _echo_config(out_dir, click.get_current_context().params)
    except (TsucastError, OSError) as exc:
        _fail(exc)
    click.echo(
        f"{len(report.rows)} rows, {len(report.failures)} failures -> {out}"
    )
    if report.failures:
        for failure in report.failures:
            click.echo(
                f"  fold {failure.fold} scenario {failure.scenario_id}: "
                f"{failure.message}",
                err=True,
            )


@main.command()
@click.option("--report", "report_csv", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(file_okay=False))
def report(report_csv, out):
    """Reshape a sweep report into scatter and box-stat tables."""
    try:
        rows = harness.read_report_csv(report_csv)
        out_dir = Path(out)
        out_dir.mkdir(parents=True, exist_ok=True)
        harness.write_scatter_csv(rows, out_dir / "scatter.csv")
        harness.write_boxstats_csv(
            harness.aggregate_box_rows(rows), out_dir / "boxstats.csv"
        )
    except (TsucastError, OSError) as exc:
        _fail(exc)
    click.echo(f"wrote scatter.csv and boxstats.csv to {out}")


if __name__ == "__main__":
    main()
