# File: views/reports.py
import json

import pandas as pd

from models.exceptions import DataError
from models.models import Family

R2_NAMES = {Family.GAUSSIAN: "R2_O", Family.BINOMIAL: "R2_L"}


def report_frame(report):
    """One row per term: Variable | Weight (%) | Type, percentages to 2 decimals."""
    return pd.DataFrame(
        {
            "Variable": [item.label for item in report.per_term],
            "Weight (%)": [round(item.percent, 2) for item in report.per_term],
            "Type": [item.role for item in report.per_term],
        }
    )


def report_to_dict(report, selection=None):
    data = {
        "family": report.family.value,
        "r2_name": R2_NAMES[report.family],
        "total_r2": round(report.total_r2, 6),
        "weight_sum": round(report.weight_sum, 6),
        "sum_discrepancy": round(report.sum_discrepancy, 6),
        "terms": [
            {
                "variable": item.label,
                "kind": item.term.kind.value,
                "weight": round(item.weight, 8),
                "percent": round(item.percent, 2),
                "type": item.role,
            }
            for item in report.per_term
        ],
    }
    if selection is not None:
        data["selection"] = {
            "criterion": selection.criterion,
            "steps": [
                {"move": str(step.move) if step.move else "start",
                 "value": round(step.criterion, 6),
                 "n_params": step.n_params}
                for step in selection.trace
            ],
        }
    return data


def render_table(report):
    frame = report_frame(report)
    lines = []
    if len(frame):
        lines.append(frame.to_string(index=False, float_format=lambda v: f"{v:.2f}"))
    else:
        lines.append("(no terms in the model)")
    lines.append("")
    lines.append(f"{R2_NAMES[report.family]} = {report.total_r2:.4f}")
    return "\n".join(lines)


def render_csv(report):
    return report_frame(report).to_csv(index=False, float_format="%.2f")


def render_json(report, selection=None):
    return json.dumps(report_to_dict(report, selection), indent=2, ensure_ascii=False)


def render(report, output_format="table", selection=None):
    if output_format == "table":
        return render_table(report)
    if output_format == "csv":
        return render_csv(report)
    if output_format == "json":
        return render_json(report, selection)
    raise ValueError(f"Unknown output format '{output_format}'")


def load_report(path):
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
        return {term["variable"]: float(term["percent"]) for term in data["terms"]}
    except (OSError, ValueError, KeyError, TypeError) as e:
        raise DataError(f"Cannot read report {path}: {e}")


def compare_reports(first, second, names=("first", "second")):
    """Side-by-side percentages of two reports with their difference in percentage points.

    Accepts RwaReport objects or {variable: percent} mappings; a term missing
    from one side counts as 0%.
    """
    a, b = (_percent_map(r) for r in (first, second))
    variables = list(a) + [v for v in b if v not in a]
    frame = pd.DataFrame(
        {
            "Variable": variables,
            names[0]: [a.get(v, 0.0) for v in variables],
            names[1]: [b.get(v, 0.0) for v in variables],
        }
    )
    frame["Delta (p.p.)"] = frame[names[1]] - frame[names[0]]
    return frame.round(2)


def _percent_map(report):
    if isinstance(report, dict):
        return dict(report)
    return {item.label: item.percent for item in report.per_term}
