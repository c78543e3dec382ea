import logging

import pytest
from click.testing import CliRunner

from app import cli
from models.exceptions import ConfigError, DataError
from models.models import Family, VariableRole
from utils.log import ColorFormatter, setup_logging
from views.helpers import default_run_config, read_dataset


class TestReadDataset:

    def test_drops_incomplete_rows(self, tmp_path, caplog):
        path = tmp_path / "data.csv"
        path.write_text("x,y\n1,2\n,3\n4,5\n")
        with caplog.at_level(logging.WARNING):
            frame = read_dataset(path, ["x", "y"])
        assert len(frame) == 2
        assert "Dropped 1 incomplete rows" in caplog.text

    def test_non_numeric_cell(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("x,y\n1,2\nabc,3\n")
        with pytest.raises(DataError, match="row 2"):
            read_dataset(path, ["x", "y"])

    def test_missing_columns(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("x,y\n1,2\n")
        with pytest.raises(DataError, match="z"):
            read_dataset(path, ["x", "z"])


class TestDefaultRunConfig:

    def test_binary_response(self, tmp_path):
        config = default_run_config(tmp_path / "d.csv", ["X1", "X2", "y_g", "y_b"], "y_b")
        assert config.family is Family.BINOMIAL
        assert [spec.name for spec in config.variables] == ["X1", "X2"]
        assert all(spec.role is VariableRole.FREE and spec.knots == 5 for spec in config.variables)

    def test_unknown_response(self, tmp_path):
        with pytest.raises(ConfigError):
            default_run_config(tmp_path / "d.csv", ["X1", "y_g"], "y")


class TestLogging:

    def test_handler_not_duplicated(self):
        setup_logging("INFO")
        root = setup_logging("DEBUG", use_color=False)
        tagged = [h for h in root.handlers if getattr(h, "_rwa_handler", False)]
        assert len(tagged) == 1
        assert root.level == logging.DEBUG
        setup_logging("WARNING")

    def test_plain_formatter(self):
        record = logging.LogRecord("models.glm", logging.WARNING, __file__, 1, "no convergence", None, None)
        assert ColorFormatter(use_color=False).format(record) == "WARNING models.glm: no convergence"

    def test_unknown_level(self):
        with pytest.raises(ConfigError):
            setup_logging("LOUD")

    def test_cli_rejects_unknown_level(self):
        result = CliRunner().invoke(cli, ["--log-level", "LOUD", "diagnostics", "--p", "3"])
        assert result.exit_code == 2
