from pathlib import Path

import pytest

from models.exceptions import ConfigError, UnsupportedKnotCount
from models.models import Family, VariableRole, VariableSpec
from utils.config import Config, RunConfig, format_variables, parse_variables


class TestParseVariables:

    def test_roles_and_knots(self):
        specs = parse_variables("X1:free:5, X3:control, X4:fixed:3, X5")
        assert specs == [
            VariableSpec("X1", VariableRole.FREE, 5),
            VariableSpec("X3", VariableRole.CONTROL, 1),
            VariableSpec("X4", VariableRole.FIXED, 3),
            VariableSpec("X5", VariableRole.FREE, 5),
        ]

    def test_format_round_trip(self):
        specs = parse_variables("A:free:3,B:control,C:fixed:1")
        assert parse_variables(format_variables(specs)) == specs

    @pytest.mark.parametrize("text", ["X1:sometimes", "X1:free:five", "X1:free:3:extra", ":free"])
    def test_invalid(self, text):
        with pytest.raises(ConfigError):
            parse_variables(text)

    def test_unsupported_knots(self):
        with pytest.raises(UnsupportedKnotCount):
            parse_variables("X1:free:2")

    def test_control_must_be_linear(self):
        with pytest.raises(ConfigError):
            parse_variables("X1:control:3")


class TestRunConfig:

    def test_load_file(self, tmp_path):
        path = tmp_path / "run.env"
        path.write_text("INPUT=data.csv\nRESPONSE=y_b\nFAMILY=binomial\n"
                        "VARIABLES=X1:free:3,X2:control\nSELECTION=off\nFORMAT=json\nSEED=7\n")
        config = RunConfig.load(path)
        assert config.input_path == tmp_path / "data.csv"
        assert config.family is Family.BINOMIAL
        assert not config.selection
        assert config.output_format == "json"
        assert config.seed == 7
        assert [spec.name for spec in config.variables] == ["X1", "X2"]

    def test_overrides_win(self, tmp_path):
        path = tmp_path / "run.env"
        path.write_text("INPUT=data.csv\nRESPONSE=y_g\nVARIABLES=X1,X2\n")
        config = RunConfig.load(path, format="csv", criterion="aic", variables="X1:fixed:4")
        assert config.output_format == "csv"
        assert config.criterion == "aic"
        assert config.variables == (VariableSpec("X1", VariableRole.FIXED, 4),)

    def test_save_and_load(self, tmp_path):
        config = RunConfig(
            input_path=tmp_path / "data" / "sim.csv",
            response="y_g",
            variables=tuple(parse_variables("X1:free:5,X2:fixed:3,X3:control")),
            selection=False,
            criterion="aic",
            seed=11,
        ).validate()
        saved = config.save(tmp_path / "run.env")
        loaded = RunConfig.load(saved)
        assert Path(loaded.input_path).resolve() == config.input_path.resolve()
        assert loaded.variables == config.variables
        assert (loaded.selection, loaded.criterion, loaded.seed) == (False, "aic", 11)

    def test_response_listed_as_predictor(self):
        with pytest.raises(ConfigError, match="also listed"):
            RunConfig.from_mapping({"INPUT": "d.csv", "RESPONSE": "X1", "VARIABLES": "X1,X2"})

    def test_only_controls(self):
        with pytest.raises(ConfigError):
            RunConfig.from_mapping({"INPUT": "d.csv", "RESPONSE": "y", "VARIABLES": "X1:control"})

    @pytest.mark.parametrize("key, value", [("FAMILY", "poisson"), ("SELECTION", "maybe"),
                                            ("SEED", "abc"), ("FORMAT", "xml"), ("CRITERION", "hqic")])
    def test_bad_values(self, key, value):
        values = {"INPUT": "d.csv", "RESPONSE": "y", "VARIABLES": "X1", key: value}
        with pytest.raises(ConfigError):
            RunConfig.from_mapping(values)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            RunConfig.load(tmp_path / "absent.env")

    def test_missing_input(self):
        with pytest.raises(ConfigError):
            RunConfig.from_mapping({"RESPONSE": "y", "VARIABLES": "X1"})


class TestEnvironment:

    def test_defaults(self, monkeypatch):
        monkeypatch.delenv("RWA_IRLS_MAX_ITER", raising=False)
        monkeypatch.delenv("RWA_SIMULATION_SIZE", raising=False)
        assert Config.IRLS_MAX_ITER == 100
        assert Config.SIMULATION_SIZE == 3000

    def test_values_are_read_when_used(self, monkeypatch):
        monkeypatch.setenv("RWA_THREADS", "3")
        monkeypatch.setenv("RWA_IRLS_TOL", "1e-6")
        assert Config.RWA_THREADS == 3
        assert Config.IRLS_TOL == pytest.approx(1e-6)

    @pytest.mark.parametrize("key, attribute", [("RWA_THREADS", "RWA_THREADS"), ("RWA_PROB_CLAMP", "PROB_CLAMP")])
    def test_malformed_value(self, monkeypatch, key, attribute):
        monkeypatch.setenv(key, "many")
        with pytest.raises(ConfigError, match=key):
            getattr(Config, attribute)
