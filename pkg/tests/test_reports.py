import io
import json
from pathlib import Path

import jsonschema
import numpy as np
import pandas as pd
import pytest

from models.exceptions import DataError
from models.models import Family, TermId
from models.pipeline import run_pipeline
from models.rwa import RwaReport, TermWeight
from utils.config import parse_variables
from views.reports import compare_reports, load_report, render, render_json, report_to_dict

SCHEMA = json.loads((Path(__file__).parent.parent / "views" / "report_schema.json").read_text())


@pytest.fixture
def report():
    terms = (
        TermWeight(TermId.main("X1"), 0.3, 50.0, "Free"),
        TermWeight(TermId.control("X3"), 0.1, 16.6667, "Control"),
        TermWeight(TermId.interaction("X1", "X2"), 0.2, 33.3333, "Interaction"),
    )
    return RwaReport(terms, np.array([0.2, 0.1, 0.1, 0.2]), 0.6, Family.GAUSSIAN)


class TestRender:

    def test_formats_agree(self, report):
        table = render(report, "table")
        frame = pd.read_csv(io.StringIO(render(report, "csv")))
        data = json.loads(render(report, "json"))
        assert list(frame.columns) == ["Variable", "Weight (%)", "Type"]
        assert list(frame["Variable"]) == [term["variable"] for term in data["terms"]] == ["X1", "X3", "X1:X2"]
        assert list(frame["Weight (%)"]) == [term["percent"] for term in data["terms"]] == [50.0, 16.67, 33.33]
        for value in ("50.00", "16.67", "33.33", "Interaction"):
            assert value in table
        assert table.rstrip().endswith("R2_O = 0.6000")

    @pytest.mark.parametrize("response, family", [("y_g", Family.GAUSSIAN), ("y_b", Family.BINOMIAL)])
    def test_pipeline_json_matches_schema(self, ishigami_frame, response, family):
        specs = parse_variables("X1:free:3,X2:free:3,X3:control,X4:fixed:3")
        result = run_pipeline(ishigami_frame, response, specs, family)
        data = json.loads(render_json(result.report, result.selection))
        jsonschema.validate(data, SCHEMA)
        assert data["family"] == family.value
        assert {term["type"] for term in data["terms"]} >= {"Control", "Fixed"}
        assert data["selection"]["steps"][0]["move"] == "start"

    def test_schema_rejects_bad_reports(self, report):
        data = report_to_dict(report)
        jsonschema.validate(data, SCHEMA)
        bad_percent = json.loads(json.dumps(data))
        bad_percent["terms"][0]["percent"] = 150.0
        bad_kind = json.loads(json.dumps(data))
        bad_kind["terms"][1]["kind"] = "quadratic"
        no_steps = dict(data, selection={"criterion": "bic"})
        for bad in (bad_percent, bad_kind, no_steps):
            with pytest.raises(jsonschema.ValidationError):
                jsonschema.validate(bad, SCHEMA)

    def test_logistic_label(self, report):
        logistic = RwaReport(report.per_term, report.column_weights, 0.5, Family.BINOMIAL)
        assert "R2_L = 0.5000" in render(logistic)

    def test_empty_report(self):
        empty = RwaReport((), np.zeros(0), 0.0, Family.GAUSSIAN)
        assert "no terms" in render(empty)

    def test_unknown_format(self, report):
        with pytest.raises(ValueError):
            render(report, "xml")

    def test_selection_trace(self, ishigami_frame):
        specs = parse_variables("X1:free:3,X2:free:3,X3:free:3")
        result = run_pipeline(ishigami_frame, "y_g", specs)
        data = json.loads(render(result.report, "json", result.selection))
        steps = data["selection"]["steps"]
        assert steps[0]["move"] == "start"
        values = [step["value"] for step in steps]
        assert values == sorted(values, reverse=True)


class TestCompare:

    def test_delta(self, report):
        other = {"X1": 40.0, "X3": 20.0, "X2": 5.0}
        frame = compare_reports(report, other, names=("before", "after"))
        rows = frame.set_index("Variable")
        assert rows.loc["X1", "Delta (p.p.)"] == pytest.approx(-10.0)
        assert rows.loc["X1:X2", "after"] == 0.0
        assert rows.loc["X2", "before"] == 0.0

    def test_load_report(self, report, tmp_path):
        path = tmp_path / "report.json"
        path.write_text(render(report, "json"))
        assert load_report(path) == {"X1": 50.0, "X3": 16.67, "X1:X2": 33.33}

    def test_load_broken_report(self, tmp_path):
        path = tmp_path / "report.json"
        path.write_text("{\"family\": \"gaussian\"}")
        with pytest.raises(DataError):
            load_report(path)
