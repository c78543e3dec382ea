"""
Rerun the Moon comparison between the base and the C3 (tripled active effects)
variants. The published nuisance coefficients are not bundled; pass them with
--small-terms, otherwise a seeded synthetic table is used.

Run from the repository root:
    python supporting_python_files/reproduce_moon.py --seed 1
"""

import os
import sys

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import click

from models.models import Family, VariableRole, VariableSpec
from models.pipeline import run_pipeline
from models.simulate import MOON_DIM, MoonVariant, load_small_terms, moon, synthetic_small_terms
from utils.log import setup_logging
from views.reports import compare_reports


@click.command(help=__doc__)
@click.option("--n", type=int, default=3000, show_default=True)
@click.option("--seed", type=int, default=1, show_default=True)
@click.option("--small-terms", "small_terms_path", help="term_kind,i,j,coefficient CSV")
def main(n, seed, small_terms_path):
    setup_logging("WARNING")

    if small_terms_path:
        small_terms = load_small_terms(small_terms_path)
        print(f"✓ Loaded {len(small_terms)} small terms from {small_terms_path}")
    else:
        small_terms = synthetic_small_terms(seed)
        print(f"✓ Using {len(small_terms)} synthetic small terms (seed {seed})")

    specs = [VariableSpec(f"X{i}", VariableRole.FREE, 5) for i in range(1, MOON_DIM + 1)]
    reports = []
    for variant in (MoonVariant.BASE, MoonVariant.C3):
        data = moon(n, seed, variant, small_terms).to_frame()
        result = run_pipeline(data, "y_g", specs, Family.GAUSSIAN)
        print(f"✓ {variant.value}: {len(result.selection.terms)} terms, R2_O = {result.report.total_r2:.4f}")
        reports.append(result.report)

    print("=" * 60)
    print(compare_reports(*reports, names=("base", "C3")).to_string(index=False))


if __name__ == "__main__":
    main()
