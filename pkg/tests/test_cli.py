"""
Tests for run configuration parsing, the pipeline and the command line.
"""

import json
import logging
import os

import numpy as np
import pytest

from bresse.config import DEFAULT_N, OUTPUT_DIR
from bresse.exceptions import ConfigError
from bresse.pipeline import BressePipeline, EXIT_CHECK_FAILED, EXIT_ERROR, EXIT_OK, boundary_growth, run
from bresse.reports.csv_report import read_csv_report
from bresse.reports.json_report import read_json_report
from bresse.runconfig import Scenario, parse_config, parse_overrides
from main import main


class TestParseConfig:
    """Defaults, files, overrides and scenarios"""

    def test_defaults(self):
        config = parse_config()
        assert config.N == DEFAULT_N
        assert config.dt is None
        assert config.scenario is Scenario.DEFAULT
        assert config.output_dir == OUTPUT_DIR
        assert config.params.gammas == (1.0, 1.0, 1.0)

    def test_overrides_are_typed(self):
        config = parse_config(overrides=["N=64", "gamma1=0.5", "fit_window=[1, 3]", "lumped=true"])
        assert config.N == 64
        assert config.params.gamma1 == 0.5
        assert config.fit_window == (1.0, 3.0)
        assert config.lumped is True

    def test_file_then_overrides_then_out(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"N": 12, "T": 3.0, "output_dir": "from_file"}))
        config = parse_config(str(path), {"T": 4.0}, out=str(tmp_path / "out"))
        assert config.N == 12
        assert config.T == 4.0
        assert config.output_dir == str(tmp_path / "out")

    def test_conservative_scenario_zeroes_gains(self):
        config = parse_config(overrides=["scenario=conservative", "gamma2=3.0"])
        assert config.params.gammas == (0.0, 0.0, 0.0)

    def test_matched_impedance_scenario(self):
        config = parse_config(overrides={"scenario": "matched_impedance", "rho1": 4.0, "kappa": 9.0})
        assert config.params.gamma1 == pytest.approx(6.0)

    def test_timoshenko_scenario(self):
        assert parse_config(overrides=["scenario=timoshenko"]).params.ell == 0.0

    @pytest.mark.parametrize("overrides,field", [
        (["colour=red"], "colour"),
        (["kappa=0"], "kappa"),
        (["N=0"], "N"),
        (["N=true"], "N"),
        (["dt=-1"], "dt"),
        (["fit_window=[3, 1]"], "fit_window"),
        (["scenario=arch"], "scenario"),
        (["scan_factors=[]"], "scan_factors"),
    ])
    def test_invalid_entries_name_the_field(self, overrides, field):
        with pytest.raises(ConfigError) as excinfo:
            parse_config(overrides=overrides)
        assert excinfo.value.field == field

    def test_malformed_override(self):
        with pytest.raises(ConfigError):
            parse_overrides(["N"])

    def test_string_values_pass_through(self):
        assert parse_overrides(["output_dir=a=b", "N= 8 "]) == {"output_dir": "a=b", "N": 8}

    def test_missing_and_invalid_files(self, tmp_path):
        with pytest.raises(ConfigError):
            parse_config(str(tmp_path / "missing.json"))
        bad = tmp_path / "bad.json"
        bad.write_text("[1, 2]")
        with pytest.raises(ConfigError):
            parse_config(str(bad))

    def test_to_dict_is_flat(self):
        payload = parse_config(overrides=["N=8"]).to_dict()
        assert payload["N"] == 8
        assert payload["kappa"] == 1.0
        assert payload["scenario"] == "default"


class TestBoundaryGrowth:
    """Upper-half over lower-half maxima"""

    def test_values(self):
        assert boundary_growth(np.array([1.0, 2.0, 3.0, 4.0])) == 2.0
        assert boundary_growth(np.zeros(4)) == 0.0
        assert boundary_growth(np.array([0.0, 0.0, 1.0, 0.0])) == float("inf")


class TestPipeline:
    """Subcommands and their reports"""

    def config(self, tmp_path, **overrides):
        values = {"N": 8, "T": 4.0, "fit_window": [1.0, 3.0], "lambda_max": 20.0, "sweep_count": 21,
                  "shooting_modes": 2, "verify_trials": 10, "scan_factors": [0.0, 1.0]}
        values.update(overrides)
        return parse_config(overrides=values, out=str(tmp_path))

    def test_simulate(self, tmp_path):
        result = BressePipeline(self.config(tmp_path)).execute("simulate")
        assert result["passed"]
        data = read_csv_report(str(tmp_path / "energy.csv"), required=("t", "E", "loss"))
        assert data["t"].size == result["summary"]["steps"] + 1
        assert data["loss"][0] == 0.0
        summary = read_json_report(str(tmp_path / "simulate_summary.json"))
        assert summary["mu"] > 0.0
        assert summary["config"]["N"] == 8
        assert summary["resolved_initial_state"] is True

    def test_conservative_simulate_has_zero_rate(self, tmp_path):
        config = self.config(tmp_path, scenario="conservative")
        summary = BressePipeline(config).execute("simulate")["summary"]
        assert abs(summary["mu"]) <= 1e-8
        assert summary["max_balance_residual"] <= 1e-11

    def test_simulate_with_window_past_horizon_records_error(self, tmp_path):
        summary = BressePipeline(self.config(tmp_path, fit_window=[1.0, 50.0])).execute("simulate")["summary"]
        assert summary["mu"] is None
        assert "fit_error" in summary

    def test_spectrum(self, tmp_path):
        result = BressePipeline(self.config(tmp_path)).execute("spectrum")
        data = read_csv_report(str(tmp_path / "spectrum.csv"), required=("re", "im"))
        assert data["re"].size == 6 * 8
        assert result["summary"]["full_spectral_abscissa"] == np.max(data["re"])
        assert result["summary"]["spectral_abscissa"] <= result["summary"]["full_spectral_abscissa"]
        assert result["summary"]["resolved_limit"] > 0.0

    def test_sweep_with_plot(self, tmp_path):
        result = BressePipeline(self.config(tmp_path), plot=True).execute("sweep")
        assert str(tmp_path / "resolvent.svg") in result["outputs"]
        data = read_csv_report(str(tmp_path / "resolvent.csv"), required=("lambda", "norm"))
        assert data["lambda"].size == 21
        assert result["summary"]["sup_norm"] == np.max(data["norm"])

    def test_scan(self, tmp_path):
        BressePipeline(self.config(tmp_path)).execute("scan")
        data = read_csv_report(str(tmp_path / "gain_scan.csv"), required=("factor", "abscissa", "clearance"))
        np.testing.assert_array_equal(data["factor"], [0.0, 1.0])

    def test_verify_writes_reports(self, tmp_path):
        result = BressePipeline(self.config(tmp_path)).execute("verify")
        payload = read_json_report(str(tmp_path / "verify.json"))
        assert payload["dissipativity"]["passed"]
        assert [m["N"] for m in payload["multiplier"]["meshes"]] == [8, 16, 32]
        assert payload["passed"] == result["passed"]
        data = read_csv_report(str(tmp_path / "boundary_estimates.csv"), required=("lambda", "r0", "r1", "r2"))
        np.testing.assert_array_equal(data["lambda"], np.arange(1.0, 101.0))

    def test_unknown_command(self, tmp_path):
        with pytest.raises(ValueError):
            BressePipeline(self.config(tmp_path)).execute("plot")

    def test_execute_logs_duration(self, tmp_path, caplog):
        with caplog.at_level(logging.INFO, logger="bresse.pipeline"):
            BressePipeline(self.config(tmp_path)).execute("spectrum")
        assert any(record.getMessage().startswith("spectrum completed in ") for record in caplog.records)


class TestExitCodes:
    """Exit status of run and main"""

    def test_certify_passes(self, tmp_path):
        config = parse_config(overrides={"N": 16, "lambda_max": 50.0, "sweep_count": 41, "shooting_modes": 3},
                              out=str(tmp_path))
        assert run(config, "certify") == EXIT_OK
        certificate = read_json_report(str(tmp_path / "certificate.json"))
        assert certificate["passed"] is True
        assert os.path.exists(tmp_path / "bresse.log")

    def test_conservative_certify_fails(self, tmp_path):
        config = parse_config(overrides={"N": 8, "lambda_max": 20.0, "sweep_count": 21, "shooting_modes": 0,
                                         "scenario": "conservative"}, out=str(tmp_path))
        assert run(config, "certify") == EXIT_CHECK_FAILED
        assert read_json_report(str(tmp_path / "certificate.json"))["passed"] is False

    def test_unexpected_exception_exits_with_error(self, tmp_path, monkeypatch, capsys):
        def broken(self):
            raise np.linalg.LinAlgError("singular matrix")

        monkeypatch.setattr(BressePipeline, "run_spectrum", broken)
        config = parse_config(overrides={"N": 8}, out=str(tmp_path))
        assert run(config, "spectrum") == EXIT_ERROR
        assert "✗" in capsys.readouterr().out
        assert "singular matrix" in (tmp_path / "bresse.log").read_text()

    def test_main_writes_spectrum(self, tmp_path, capsys):
        code = main(["spectrum", "--set", "N=8", "--out", str(tmp_path)])
        assert code == EXIT_OK
        assert os.path.exists(tmp_path / "spectrum.csv")
        assert "✓" in capsys.readouterr().out

    def test_spectrum_is_reproducible(self, tmp_path):
        first, second = tmp_path / "a", tmp_path / "b"
        assert main(["spectrum", "--set", "N=8", "--out", str(first)]) == EXIT_OK
        assert main(["spectrum", "--set", "N=8", "--out", str(second)]) == EXIT_OK
        assert (first / "spectrum.csv").read_bytes() == (second / "spectrum.csv").read_bytes()

    def test_main_with_config_file_and_plot(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"N": 8, "T": 2.0, "fit_window": [0.5, 1.5]}))
        code = main(["simulate", "--config", str(path), "--out", str(tmp_path / "out"), "--plot"])
        assert code == EXIT_OK
        assert os.path.exists(tmp_path / "out" / "energy.svg")

    @pytest.mark.parametrize("argv", [
        ["spectrum", "--set", "N=0"],
        ["spectrum", "--set", "colour=red"],
        ["spectrum", "--set", "kappa=-1"],
    ])
    def test_invalid_config_exits_with_error(self, tmp_path, argv, capsys):
        assert main(argv + ["--out", str(tmp_path)]) == EXIT_ERROR
        assert "✗" in capsys.readouterr().out
