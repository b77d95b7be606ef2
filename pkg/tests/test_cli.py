"""End-to-end command-line workflow: gen, decompose, detect, sweep, report."""

import json

import numpy as np
import pytest
from click.testing import CliRunner

from tsucast import io
from tsucast.cli import main

RUNNER = CliRunner()

TINY_GEN = (
    "--n-scenarios", 12, "--n-gauges", 6, "--n-steps", 96,
    "--grid-nx", 12, "--grid-ny", 10, "--seed", 42,
)


def _invoke(args):
    return RUNNER.invoke(
        main, [str(a) for a in args], catch_exceptions=False
    )


@pytest.fixture(scope="module")
def cli_db(tmp_path_factory):
    db_dir = tmp_path_factory.mktemp("cli") / "db"
    result = _invoke(["gen", "--out", db_dir, *TINY_GEN])
    assert result.exit_code == 0
    assert "wrote 12 scenarios" in result.output
    return db_dir


@pytest.fixture(scope="module")
def cli_basis(cli_db, tmp_path_factory):
    out = tmp_path_factory.mktemp("basis")
    result = _invoke(["decompose", "--db", cli_db, "--out", out])
    assert result.exit_code == 0
    return out


@pytest.fixture(scope="module")
def observed_scenario(cli_db, tmp_path_factory):
    db = io.load_database(cli_db)
    record = db.record(5)
    path = tmp_path_factory.mktemp("obs") / "observed.csv"
    io.write_waveform_csv(path, record.waveforms, db.dt)
    return path, record


class TestGen:
    def test_two_runs_are_byte_identical(self, tmp_path):
        first = tmp_path / "a"
        second = tmp_path / "b"
        args = ("--n-scenarios", 5, "--n-gauges", 4, "--n-steps", 48,
                "--grid-nx", 8, "--grid-ny", 6, "--seed", 3)
        assert _invoke(["gen", "--out", first, *args]).exit_code == 0
        assert _invoke(["gen", "--out", second, *args]).exit_code == 0
        names = sorted(p.name for p in first.iterdir())
        assert names == sorted(p.name for p in second.iterdir())
        assert "manifest.json" in names
        for name in names:
            assert (first / name).read_bytes() == (second / name).read_bytes()

    def test_invalid_generator_parameters_exit_1(self, tmp_path):
        result = _invoke(["gen", "--out", tmp_path / "x",
                          "--n-scenarios", 0])
        assert result.exit_code == 1

    def test_unknown_flag_exits_2(self, tmp_path):
        result = _invoke(["gen", "--out", tmp_path / "x", "--frobnicate"])
        assert result.exit_code == 2

    def test_missing_required_flag_exits_2(self):
        assert _invoke(["gen"]).exit_code == 2


class TestDecompose:
    def test_outputs_and_echo(self, cli_db, cli_basis):
        for name in ("basis.bin", "coeffs.bin", "contribution.csv",
                     "config.json"):
            assert (cli_basis / name).is_file()
        contribution = (cli_basis / "contribution.csv").read_text()
        assert contribution.splitlines()[0] == "r,c"

    def test_retained_mode_echo(self, cli_db, tmp_path):
        result = _invoke(["decompose", "--db", cli_db, "--out",
                          tmp_path / "b2", "--fixed-r", 3])
        assert result.exit_code == 0
        assert "retained 3 of 6 modes" in result.output

    def test_database_without_manifest_exits_1(self, tmp_path):
        empty = tmp_path / "empty"
        empty.mkdir()
        result = _invoke(["decompose", "--db", empty, "--out",
                          tmp_path / "out"])
        assert result.exit_code == 1


class TestDetect:
    def test_most_probable_self_detection(self, cli_db, cli_basis,
                                          observed_scenario, tmp_path):
        observed, record = observed_scenario
        out = tmp_path / "pred"
        result = _invoke([
            "detect", "--db", cli_db, "--observed", observed,
            "--method", "most-probable", "--t-obs", 240,
            "--basis", cli_basis / "basis.bin",
            "--coeffs", cli_basis / "coeffs.bin",
            "--out", out,
        ])
        assert result.exit_code == 0
        payload = json.loads((out / "prediction.json").read_text())
        assert payload["method"] == "most_probable"
        assert payload["chosen_id"] == 5
        assert payload["t_obs"] == 240.0
        assert payload["eta_max_pred"] == record.eta_max_per_gauge[-1]
        assert payload["h_max_pred"] == record.h_max
        grid = io.read_grid_binary(out / "inundation_pred.bin", 12, 10)
        assert np.array_equal(grid.depths, record.inundation.depths)

    def test_on_the_fly_basis_matches_the_stored_one(self, cli_db, cli_basis,
                                                     observed_scenario,
                                                     tmp_path):
        observed, _ = observed_scenario
        stored = tmp_path / "stored"
        fitted = tmp_path / "fitted"
        base = ["detect", "--db", cli_db, "--observed", observed,
                "--method", "most-probable", "--t-obs", 240]
        assert _invoke([*base, "--basis", cli_basis / "basis.bin",
                        "--coeffs", cli_basis / "coeffs.bin",
                        "--out", stored]).exit_code == 0
        assert _invoke([*base, "--out", fitted]).exit_code == 0
        assert ((stored / "prediction.json").read_bytes()
                == (fitted / "prediction.json").read_bytes())

    def test_weighted_mean_converges_to_most_probable(self, cli_db,
                                                      observed_scenario,
                                                      tmp_path):
        # a clean in-database observation, the full horizon, and a sharp
        # likelihood drive the posterior to an exact one-hot, so the two
        # Bayesian methods must agree on every numeric output byte for byte
        observed, _ = observed_scenario
        results = {}
        for method in ("most-probable", "weighted-mean"):
            out = tmp_path / method
            assert _invoke([
                "detect", "--db", cli_db, "--observed", observed,
                "--method", method, "--t-obs", 480,
                "--likelihood-scale", 0.005, "--out", out,
            ]).exit_code == 0
            results[method] = out
        mp = json.loads((results["most-probable"] / "prediction.json")
                        .read_text())
        wm = json.loads((results["weighted-mean"] / "prediction.json")
                        .read_text())
        assert mp.pop("chosen_id") == 5
        assert wm.pop("chosen_id") is None
        assert mp.pop("method") == "most_probable"
        assert wm.pop("method") == "weighted_mean"
        assert mp == wm
        assert ((results["most-probable"] / "inundation_pred.bin")
                .read_bytes()
                == (results["weighted-mean"] / "inundation_pred.bin")
                .read_bytes())

    def test_shortest_dtw_needs_no_basis(self, cli_db, observed_scenario,
                                         tmp_path):
        observed, record = observed_scenario
        out = tmp_path / "dtw"
        result = _invoke([
            "detect", "--db", cli_db, "--observed", observed,
            "--method", "shortest-dtw", "--t-obs", 120, "--out", out,
        ])
        assert result.exit_code == 0
        payload = json.loads((out / "prediction.json").read_text())
        assert payload["chosen_id"] == 5
        assert payload["h_max_pred"] == record.h_max

    def test_gauge_count_mismatch_exits_1(self, cli_db, observed_scenario,
                                          tmp_path):
        _, record = observed_scenario
        short = tmp_path / "short.csv"
        io.write_waveform_csv(short, record.waveforms[:4], 5.0)
        result = _invoke([
            "detect", "--db", cli_db, "--observed", short,
            "--method", "shortest-dtw", "--t-obs", 120,
            "--out", tmp_path / "out",
        ])
        assert result.exit_code == 1

    def test_window_past_the_horizon_exits_1(self, cli_db, observed_scenario,
                                             tmp_path):
        observed, _ = observed_scenario
        result = _invoke([
            "detect", "--db", cli_db, "--observed", observed,
            "--method", "shortest-dtw", "--t-obs", 1e6,
            "--out", tmp_path / "out",
        ])
        assert result.exit_code == 1

    def test_unknown_method_exits_2(self, cli_db, observed_scenario,
                                    tmp_path):
        observed, _ = observed_scenario
        result = _invoke([
            "detect", "--db", cli_db, "--observed", observed,
            "--method", "nearest", "--t-obs", 120, "--out", tmp_path / "out",
        ])
        assert result.exit_code == 2


@pytest.fixture(scope="module")
def sweep_dir(cli_db, tmp_path_factory):
    out = tmp_path_factory.mktemp("sweep")
    result = _invoke([
        "sweep", "--db", cli_db, "--out", out,
        "--windows", "60,120", "--folds", 3, "--seed", 5,
        "--amplitude-threshold", 0,
    ])
    assert result.exit_code == 0
    assert "72 rows, 0 failures" in result.output
    return out


class TestSweepAndReport:
    def test_report_csv_shape(self, sweep_dir):
        lines = (sweep_dir / "report.csv").read_text().splitlines()
        assert len(lines) == 1 + 12 * 3 * 2
        assert lines[0].startswith("fold,scenario_id,method,t_obs")
        assert not (sweep_dir / "failures.csv").exists()

    def test_boxstats_csv_shape(self, sweep_dir):
        lines = (sweep_dir / "boxstats.csv").read_text().splitlines()
        assert len(lines) == 1 + 3 * 2

    def test_config_echo_keeps_parameters_not_paths(self, sweep_dir):
        payload = json.loads((sweep_dir / "config.json").read_text())
        assert "db_path" not in payload
        assert "out" not in payload
        assert payload["folds"] == 3
        assert payload["seed"] == 5
        assert payload["windows"] == "60,120"

    def test_report_subcommand_reshapes_the_report(self, sweep_dir,
                                                   tmp_path):
        out = tmp_path / "plots"
        result = _invoke(["report", "--report", sweep_dir / "report.csv",
                          "--out", out])
        assert result.exit_code == 0
        scatter = (out / "scatter.csv").read_text().splitlines()
        assert len(scatter) == 1 + 72
        assert scatter[0].startswith("method,t_obs,fold,scenario_id")
        assert ((out / "boxstats.csv").read_bytes()
                == (sweep_dir / "boxstats.csv").read_bytes())

    def test_method_list_accepts_both_spellings(self, cli_db, tmp_path):
        out = tmp_path / "two"
        result = _invoke([
            "sweep", "--db", cli_db, "--out", out,
            "--windows", "60", "--folds", 2, "--amplitude-threshold", 0,
            "--methods", "most_probable, shortest-dtw",
        ])
        assert result.exit_code == 0
        lines = (out / "report.csv").read_text().splitlines()[1:]
        methods = {line.split(",")[2] for line in lines}
        assert methods == {"most_probable", "shortest_dtw"}

    def test_unknown_sweep_method_exits_1(self, cli_db, tmp_path):
        result = _invoke([
            "sweep", "--db", cli_db, "--out", tmp_path / "x",
            "--windows", "60", "--methods", "nearest",
        ])
        assert result.exit_code == 1

    def test_foreign_csv_fed_to_report_exits_1(self, tmp_path):
        bogus = tmp_path / "bogus.csv"
        bogus.write_text("a,b\n1,2\n")
        result = _invoke(["report", "--report", bogus,
                          "--out", tmp_path / "y"])
        assert result.exit_code == 1


class TestConfigFile:
    def test_yaml_supplies_defaults(self, tmp_path):
        cfg = tmp_path / "run.yaml"
        cfg.write_text(
            "n-scenarios: 8\nn-gauges: 4\nn-steps: 64\n"
            "grid-nx: 8\ngrid-ny: 6\nseed: 9\n"
        )
        out = tmp_path / "db"
        result = _invoke(["--config", cfg, "gen", "--out", out])
        assert result.exit_code == 0
        db = io.load_database(out)
        assert db.n_scenarios == 8
        assert db.n_gauges == 4

    def test_flags_override_the_config_file(self, tmp_path):
        cfg = tmp_path / "run.yaml"
        cfg.write_text("n-scenarios: 8\nn-gauges: 4\nn-steps: 64\n"
                       "grid-nx: 8\ngrid-ny: 6\n")
        out = tmp_path / "db"
        result = _invoke(["--config", cfg, "gen", "--out", out,
                          "--n-scenarios", 5])
        assert result.exit_code == 0
        assert io.load_database(out).n_scenarios == 5
        payload = json.loads((out / "config.json").read_text())
        assert payload["n_scenarios"] == 5
        assert payload["n_gauges"] == 4
        assert "out" not in payload
        assert "config" not in payload

    def test_non_mapping_config_exits_1(self, tmp_path):
        cfg = tmp_path / "bad.yaml"
        cfg.write_text("- 1\n- 2\n")
        result = _invoke(["--config", cfg, "gen", "--out", tmp_path / "db"])
        assert result.exit_code == 1

    def test_help_lists_every_subcommand(self):
        result = _invoke(["--help"])
        assert result.exit_code == 0
        for sub in ("gen", "decompose", "detect", "sweep", "report"):
            assert sub in result.output
