import json

import pandas as pd
import pytest
from click.testing import CliRunner

from app import cli

FAST_VARIABLES = "X1:free:3,X2:free:3,X3:free:3,X4:free:3"


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def ishigami_csv(runner, tmp_path):
    path = tmp_path / "ishigami.csv"
    result = runner.invoke(cli, ["simulate", "ishigami", "--n", "400", "--seed", "5", "--output", str(path)])
    assert result.exit_code == 0, result.output
    return path


class TestSimulate:

    def test_same_seed_same_file(self, runner, tmp_path):
        paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
        for path in paths:
            result = runner.invoke(cli, ["simulate", "ishigami", "--n", "50", "--seed", "3", "--output", str(path)])
            assert result.exit_code == 0
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_moon_columns(self, runner, tmp_path):
        path = tmp_path / "moon.csv"
        result = runner.invoke(cli, ["simulate", "moon-c3", "--n", "30", "--seed", "1",
                                     "--synthetic-small-terms", "--output", str(path)])
        assert result.exit_code == 0
        frame = pd.read_csv(path)
        assert frame.shape == (30, 22)
        assert list(frame.columns[-2:]) == ["y_g", "y_b"]

    def test_small_terms_file(self, runner, tmp_path):
        table = tmp_path / "small.csv"
        table.write_text("term_kind,i,j,coefficient\nmain,2,,0.25\ninter,3,4,-0.1\n")
        result = runner.invoke(cli, ["simulate", "moon-base", "--n", "30", "--small-terms", str(table),
                                     "--output", str(tmp_path / "moon.csv")])
        assert result.exit_code == 0, result.output

    def test_malformed_small_terms(self, runner, tmp_path):
        table = tmp_path / "small.csv"
        table.write_text("term_kind,i,j,coefficient\ncubic,2,0,0.25\n")
        result = runner.invoke(cli, ["simulate", "moon-base", "--n", "30", "--small-terms", str(table),
                                     "--output", str(tmp_path / "moon.csv")])
        assert result.exit_code == 3
        assert "MalformedCoefficientTable" in result.output

    def test_zero_rows(self, runner, tmp_path):
        result = runner.invoke(cli, ["simulate", "ishigami", "--n", "0", "--output", str(tmp_path / "x.csv")])
        assert result.exit_code == 2

    def test_unknown_model(self, runner, tmp_path):
        result = runner.invoke(cli, ["simulate", "sobol-g", "--output", str(tmp_path / "x.csv")])
        assert result.exit_code == 2


class TestAnalyze:

    def test_table_report(self, runner, ishigami_csv):
        result = runner.invoke(cli, ["analyze", "--input", str(ishigami_csv), "--response", "y_g",
                                     "--variables", FAST_VARIABLES])
        assert result.exit_code == 0, result.output
        assert "Weight (%)" in result.output
        assert "R2_O =" in result.output

    def test_malformed_environment(self, runner, ishigami_csv):
        result = runner.invoke(cli, ["analyze", "--input", str(ishigami_csv), "--response", "y_g",
                                     "--variables", FAST_VARIABLES], env={"RWA_THREADS": "many"})
        assert result.exit_code == 2
        assert "RWA_THREADS" in result.output

    def test_simulation_size_from_environment(self, runner, tmp_path):
        path = tmp_path / "small.csv"
        result = runner.invoke(cli, ["simulate", "ishigami", "--output", str(path)], env={"RWA_SIMULATION_SIZE": "25"})
        assert result.exit_code == 0, result.output
        assert len(pd.read_csv(path)) == 25

    def test_json_report_to_file(self, runner, ishigami_csv, tmp_path):
        out = tmp_path / "report.json"
        result = runner.invoke(cli, ["analyze", "--input", str(ishigami_csv), "--response", "y_b",
                                     "--family", "binomial", "--variables", FAST_VARIABLES,
                                     "--format", "json", "--output", str(out)])
        assert result.exit_code == 0, result.output
        data = json.loads(out.read_text())
        assert data["r2_name"] == "R2_L"
        assert sum(term["percent"] for term in data["terms"]) == pytest.approx(100.0, abs=0.05)

    def test_no_selection(self, runner, ishigami_csv, tmp_path):
        out = tmp_path / "report.json"
        result = runner.invoke(cli, ["analyze", "--input", str(ishigami_csv), "--response", "y_g",
                                     "--variables", "X1:free:3,X2:free:3", "--no-selection",
                                     "--format", "json", "--output", str(out)])
        assert result.exit_code == 0, result.output
        assert [term["variable"] for term in json.loads(out.read_text())["terms"]] == ["X1", "X2", "X1:X2"]

    def test_response_as_predictor(self, runner, ishigami_csv):
        result = runner.invoke(cli, ["analyze", "--input", str(ishigami_csv), "--response", "X1",
                                     "--variables", "X1,X2"])
        assert result.exit_code == 2
        assert "ConfigError" in result.output

    def test_non_binary_response(self, runner, tmp_path):
        path = tmp_path / "data.csv"
        pd.DataFrame({"x": [0.1, 0.5, 0.9, 0.3], "y": [0, 1, 2, 1]}).to_csv(path, index=False)
        result = runner.invoke(cli, ["analyze", "--input", str(path), "--response", "y",
                                     "--family", "binomial", "--variables", "x:free:1"])
        assert result.exit_code == 3
        assert "row 3" in result.output

    def test_missing_input(self, runner, tmp_path):
        result = runner.invoke(cli, ["analyze", "--input", str(tmp_path / "absent.csv"), "--response", "y",
                                     "--variables", "x"])
        assert result.exit_code == 3

    def test_missing_column(self, runner, ishigami_csv):
        result = runner.invoke(cli, ["analyze", "--input", str(ishigami_csv), "--response", "y_g",
                                     "--variables", "X1,X99"])
        assert result.exit_code == 3
        assert "X99" in result.output

    def test_written_config_round_trip(self, runner, tmp_path):
        data, config, out = tmp_path / "sim.csv", tmp_path / "run.env", tmp_path / "report.json"
        result = runner.invoke(cli, ["simulate", "ishigami", "--n", "300", "--seed", "2",
                                     "--output", str(data), "--write-config", str(config)])
        assert result.exit_code == 0, result.output
        assert "VARIABLES=X1:free:5" in config.read_text()
        result = runner.invoke(cli, ["analyze", "--config", str(config), "--variables", FAST_VARIABLES,
                                     "--format", "json", "--output", str(out)])
        assert result.exit_code == 0, result.output
        assert json.loads(out.read_text())["family"] == "gaussian"


class TestCompareAndDiagnostics:

    def test_compare(self, runner, ishigami_csv, tmp_path):
        reports = []
        for response, family in (("y_g", "gaussian"), ("y_b", "binomial")):
            out = tmp_path / f"{response}.json"
            result = runner.invoke(cli, ["analyze", "--input", str(ishigami_csv), "--response", response,
                                         "--family", family, "--variables", FAST_VARIABLES,
                                         "--format", "json", "--output", str(out)])
            assert result.exit_code == 0, result.output
            reports.append(str(out))
        result = runner.invoke(cli, ["compare", *reports])
        assert result.exit_code == 0, result.output
        assert "Delta (p.p.)" in result.output
        assert "y_g" in result.output and "y_b" in result.output

    def test_diagnostics(self, runner):
        result = runner.invoke(cli, ["diagnostics", "--p", "10", "--k", "3"])
        assert result.exit_code == 0
        assert "166 parameters" in result.output

    def test_diagnostics_invalid(self, runner):
        assert runner.invoke(cli, ["diagnostics", "--p", "0"]).exit_code == 2
        assert runner.invoke(cli, ["diagnostics", "--p", "4", "--k", "6"]).exit_code == 2

    def test_diagnostics_from_config(self, runner, tmp_path):
        config = tmp_path / "run.env"
        config.write_text("INPUT=data.csv\nRESPONSE=y\nVARIABLES=A:free:3,B:free:3,C:control\n")
        result = runner.invoke(cli, ["diagnostics", "--config", str(config)])
        assert result.exit_code == 0, result.output
        assert "9 columns" in result.output

    def test_diagnostics_needs_an_input(self, runner):
        assert runner.invoke(cli, ["diagnostics"]).exit_code == 2
