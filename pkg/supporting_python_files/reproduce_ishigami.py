"""
Rerun the Ishigami experiments: continuous and binary outputs with all
variables free, X4-X8 fixed, and X3 as a control.

Run from the repository root:
    python supporting_python_files/reproduce_ishigami.py --seed 1
"""

import os
import sys

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import click

from models.models import Family, VariableRole, VariableSpec
from models.pipeline import run_pipeline
from models.simulate import ishigami
from utils.log import setup_logging
from views.reports import render_table

NAMES = [f"X{i}" for i in range(1, 9)]


def scenarios():
    free = [VariableSpec(name, VariableRole.FREE, 5) for name in NAMES]
    fixed = [VariableSpec(name, VariableRole.FIXED if name in NAMES[3:] else VariableRole.FREE, 5)
             for name in NAMES]
    controlled = [VariableSpec(name, VariableRole.CONTROL) if name == "X3"
                  else VariableSpec(name, VariableRole.FREE, 5) for name in NAMES]
    return [
        ("Continuous output y_g", "y_g", Family.GAUSSIAN, free),
        ("Binary output y_b", "y_b", Family.BINOMIAL, free),
        ("Fixed X4, X5, X6, X7 and X8", "y_g", Family.GAUSSIAN, fixed),
        ("Controlled X3", "y_g", Family.GAUSSIAN, controlled),
    ]


@click.command(help=__doc__)
@click.option("--n", type=int, default=3000, show_default=True)
@click.option("--seed", type=int, default=1, show_default=True)
def main(n, seed):
    setup_logging("WARNING")

    data = ishigami(n, seed).to_frame()
    for title, response, family, specs in scenarios():
        print("=" * 60)
        print(title.upper())
        print("=" * 60)
        result = run_pipeline(data, response, specs, family)
        print(render_table(result.report))
        print()


if __name__ == "__main__":
    main()
