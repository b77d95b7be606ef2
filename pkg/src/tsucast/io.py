"""On-disk database format and waveform CSV import.

A database directory contains ``manifest.json`` plus two binary files per
scenario (little-endian float64, row-major):

* ``scenario_<id>_waveforms.bin`` -- ``n_gauges * n_steps`` values
* ``scenario_<id>_inundation.bin`` -- ``nx * ny`` values

The manifest records counts, sampling, grid geometry, and the scenario
index. Risk indices are recomputed on load, so a round trip always
satisfies the record invariants.

CSV import accepts one file per scenario with header
``time,gauge_0,...,gauge_{n_gauges-1}``; columns are resampled onto the
uniform grid.
"""

import csv
import json
from pathlib import Path

import numpy as np

from .core import (
    GridGeometry,
    InundationGrid,
    ScenarioDatabase,
    ScenarioRecord,
    resample_series,
)
from .errors import DataCorruptionError, DatabaseInconsistencyError

MANIFEST_NAME = "manifest.json"
FORMAT_VERSION = 1


def _write_f64(path, array):
    np.ascontiguousarray(array, dtype="<f8").tofile(path)


def _read_f64(path, shape):
    data = np.fromfile(path, dtype="<f8")
    expected = int(np.prod(shape))
    if data.size != expected:
        raise DatabaseInconsistencyError(
            f"{path}: expected {expected} float64 values, found {data.size}"
        )
    return data.reshape(shape)


def save_database(db, directory):
    """Write ``db`` to ``directory`` in the manifest + binary layout."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    index = []
    for rec in db:
        wave_name = f"scenario_{rec.scenario_id:05d}_waveforms.bin"
        inun_name = f"scenario_{rec.scenario_id:05d}_inundation.bin"
        _write_f64(directory / wave_name, rec.waveforms)
        _write_f64(directory / inun_name, rec.inundation.depths)
        index.append(
            {
                "id": int(rec.scenario_id),
                "waveforms": wave_name,
                "inundation": inun_name,
            }
        )
    manifest = {
        "format_version": FORMAT_VERSION,
        "n_scenarios": db.n_scenarios,
        "n_gauges": db.n_gauges,
        "n_steps": db.n_steps,
        "dt": db.dt,
        "grid": {
            "nx": db.grid.nx,
            "ny": db.grid.ny,
            "x0": db.grid.x0,
            "y0": db.grid.y0,
            "dx": db.grid.dx,
            "dy": db.grid.dy,
            "label": db.grid.label,
        },
        "scenarios": index,
    }
    with open(directory / MANIFEST_NAME, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return directory


def load_database(directory):
    """Load a database directory written by :func:`save_database`."""
    directory = Path(directory)
    manifest_path = directory / MANIFEST_NAME
    if not manifest_path.exists():
        raise FileNotFoundError(f"no {MANIFEST_NAME} in {directory}")
    with open(manifest_path) as fh:
        manifest = json.load(fh)
    if manifest.get("format_version") != FORMAT_VERSION:
        raise DatabaseInconsistencyError(
            f"unsupported format version {manifest.get('format_version')}"
        )
    g = manifest["grid"]
    grid = GridGeometry(
        nx=g["nx"], ny=g["ny"], x0=g["x0"], y0=g["y0"],
        dx=g["dx"], dy=g["dy"], label=g["label"],
    )
    n_g, n_t = manifest["n_gauges"], manifest["n_steps"]
    records = []
    for entry in manifest["scenarios"]:
        waves = _read_f64(directory / entry["waveforms"], (n_g, n_t))
        depths = _read_f64(directory / entry["inundation"], (grid.nx, grid.ny))
        records.append(
            ScenarioRecord.build(
                scenario_id=entry["id"],
                waveforms=waves,
                inundation=InundationGrid.from_depths(depths),
                dt=manifest["dt"],
            )
        )
    if len(records) != manifest["n_scenarios"]:
        raise DatabaseInconsistencyError(
            f"manifest lists {manifest['n_scenarios']} scenarios, "
            f"found {len(records)}"
        )
    return ScenarioDatabase(records, grid, manifest["dt"])


def read_waveform_csv(path, dt, horizon):
    """Read one scenario's waveforms from CSV and resample each gauge.

    Returns a ``(n_gauges, n_steps)`` array on the grid ``dt ... horizon``.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(v) for v in row] for row in reader if row]
    if not header or header[0].strip() != "time":
        raise DataCorruptionError(f"{path}: first CSV column must be 'time'")
    expected = ["time"] + [f"gauge_{i}" for i in range(len(header) - 1)]
    if [h.strip() for h in header] != expected:
        raise DataCorruptionError(
            f"{path}: header must be time,gauge_0,...,gauge_{len(header) - 2}"
        )
    data = np.asarray(rows, dtype=np.float64)
    times = data[:, 0]
    gauges = []
    for g in range(data.shape[1] - 1):
        series = resample_series(times, data[:, g + 1], dt, horizon, gauge_id=g)
        gauges.append(series.samples)
    return np.stack(gauges)


def write_waveform_csv(path, waveforms, dt):
    """Write a ``(n_gauges, n_steps)`` block in the CSV import layout."""
    waveforms = np.asarray(waveforms, dtype=np.float64)
    n_g, n_t = waveforms.shape
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["time"] + [f"gauge_{g}" for g in range(n_g)])
        for i in range(n_t):
            t = (i + 1) * dt
            writer.writerow([repr(float(t))] + [repr(float(v)) for v in waveforms[:, i]])
    return Path(path)


def write_grid_binary(grid, path):
    """Raw little-endian float64 dump of an inundation grid, row-major."""
    _write_f64(path, grid.depths)
    return Path(path)


def read_grid_binary(path, nx, ny):
    return InundationGrid.from_depths(_read_f64(path, (nx, ny)))
