"""On-disk database layout, waveform CSV import, grid binaries."""

import json

import numpy as np
import pytest

from conftest import make_db
from tsucast import io
from tsucast.errors import DataCorruptionError, DatabaseInconsistencyError


def test_database_round_trip(tmp_path, small_db):
    io.save_database(small_db, tmp_path / "db")
    loaded = io.load_database(tmp_path / "db")
    assert loaded.fingerprint() == small_db.fingerprint()
    assert loaded.dt == small_db.dt
    assert loaded.grid == small_db.grid
    rec_in = small_db.scenarios[5]
    rec_out = loaded.record(rec_in.scenario_id)
    assert np.array_equal(rec_in.waveforms, rec_out.waveforms)
    assert np.array_equal(rec_in.inundation.depths, rec_out.inundation.depths)
    assert np.array_equal(rec_in.eta_max_per_gauge, rec_out.eta_max_per_gauge)
    assert rec_in.h_max == rec_out.h_max


def test_manifest_contents(tmp_path, small_db):
    io.save_database(small_db, tmp_path / "db")
    with open(tmp_path / "db" / io.MANIFEST_NAME) as f:
        manifest = json.load(f)
    assert manifest["format_version"] == io.FORMAT_VERSION
    assert manifest["n_scenarios"] == small_db.n_scenarios
    assert manifest["n_gauges"] == small_db.n_gauges
    assert manifest["n_steps"] == small_db.n_steps
    assert manifest["dt"] == small_db.dt
    assert manifest["grid"]["nx"] == small_db.grid.nx
    assert len(manifest["scenarios"]) == small_db.n_scenarios


def test_binary_files_are_little_endian_float64(tmp_path):
    db = make_db([[[1.0, 2.0], [3.0, 4.0]]])
    io.save_database(db, tmp_path / "db")
    raw = np.fromfile(
        tmp_path / "db" / "scenario_00000_waveforms.bin", dtype="<f8"
    )
    assert np.array_equal(raw, [1.0, 2.0, 3.0, 4.0])  # row-major


def test_missing_manifest_raises(tmp_path):
    (tmp_path / "empty").mkdir()
    with pytest.raises(FileNotFoundError):
        io.load_database(tmp_path / "empty")


def test_wrong_format_version_rejected(tmp_path, small_db):
    io.save_database(small_db, tmp_path / "db")
    path = tmp_path / "db" / io.MANIFEST_NAME
    manifest = json.loads(path.read_text())
    manifest["format_version"] = 99
    path.write_text(json.dumps(manifest))
    with pytest.raises(DatabaseInconsistencyError):
        io.load_database(tmp_path / "db")


def test_truncated_binary_rejected(tmp_path):
    db = make_db([[[1.0, 2.0], [3.0, 4.0]]])
    io.save_database(db, tmp_path / "db")
    bin_path = tmp_path / "db" / "scenario_00000_waveforms.bin"
    bin_path.write_bytes(bin_path.read_bytes()[:-8])
    with pytest.raises(DatabaseInconsistencyError):
        io.load_database(tmp_path / "db")


def test_waveform_csv_round_trip(tmp_path):
    rng = np.random.default_rng(1)
    waves = rng.normal(size=(3, 8))
    path = tmp_path / "obs.csv"
    io.write_waveform_csv(path, waves, dt=5.0)
    back = io.read_waveform_csv(path, dt=5.0, horizon=40.0)
    assert np.array_equal(back, waves)


def test_waveform_csv_resamples_shorter_horizon(tmp_path):
    waves = np.arange(12.0).reshape(2, 6)
    path = tmp_path / "obs.csv"
    io.write_waveform_csv(path, waves, dt=5.0)
    back = io.read_waveform_csv(path, dt=5.0, horizon=15.0)
    assert back.shape == (2, 3)
    assert np.array_equal(back, waves[:, :3])


def test_waveform_csv_header_is_validated(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("time,gauge_0,sensor_1\n5.0,0.1,0.2\n10.0,0.0,0.0\n")
    with pytest.raises(DataCorruptionError):
        io.read_waveform_csv(path, dt=5.0, horizon=10.0)
    path.write_text("t,gauge_0\n5.0,0.1\n10.0,0.0\n")
    with pytest.raises(DataCorruptionError):
        io.read_waveform_csv(path, dt=5.0, horizon=10.0)


def test_grid_binary_round_trip(tmp_path):
    from tsucast.core import InundationGrid

    grid = InundationGrid.from_depths([[0.0, 1.5], [2.0, 0.25], [0.1, 0.0]])
    path = tmp_path / "grid.bin"
    io.write_grid_binary(grid, path)
    back = io.read_grid_binary(path, 3, 2)
    assert np.array_equal(back.depths, grid.depths)
    with pytest.raises(DatabaseInconsistencyError):
        io.read_grid_binary(path, 2, 2)


def test_save_database_is_deterministic(tmp_path, small_db):
    io.save_database(small_db, tmp_path / "a")
    io.save_database(small_db, tmp_path / "b")
    files_a = sorted(p.name for p in (tmp_path / "a").iterdir())
    files_b = sorted(p.name for p in (tmp_path / "b").iterdir())
    assert files_a == files_b
    for name in files_a:
        assert (tmp_path / "a" / name).read_bytes() == \
            (tmp_path / "b" / name).read_bytes()
