# File: app.py
import logging
from pathlib import Path

import click

from models.design import count_full_model_parameters, full_model_columns
from models.exceptions import ConfigError
from models.pipeline import run_pipeline
from models.simulate import SimulationModel, load_small_terms, simulate, synthetic_small_terms
from utils.config import CRITERIA, FORMATS, Config, RunConfig
from utils.log import setup_logging
from views.helpers import default_run_config, exit_on_error, print_status, read_dataset
from views.reports import compare_reports, load_report, render

logger = logging.getLogger(__name__)


def run_analysis(config):
    """Run select -> residualize -> relative weights for a RunConfig; returns the pipeline result."""
    config.validate()
    columns = [config.response] + [spec.name for spec in config.variables]
    data = read_dataset(config.input_path, columns)
    logger.info("Loaded %d rows from %s", len(data), config.input_path)
    return run_pipeline(
        data,
        config.response,
        config.variables,
        config.family,
        selection=config.selection,
        criterion=config.criterion,
        max_workers=Config.RWA_THREADS,
    )


def write_output(text, output_path=None):
    if output_path is None:
        click.echo(text)
        return
    Path(output_path).write_text(text + "\n", encoding="utf-8")
    print_status(f"Report written to {output_path}")


def run_simulation(model, n, seed, out_path, small_terms=()):
    """Write X1..Xd, y_g and y_b of a benchmark model to a CSV file."""
    dataset = simulate(model, n, seed, small_terms)
    dataset.to_frame().to_csv(out_path, index=False, float_format="%.17g")
    return dataset


@click.group()
@click.option("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR (default from RWA_LOG_LEVEL).")
@click.option("--no-color", is_flag=True, help="Plain log output.")
@exit_on_error
def cli(log_level, no_color):
    """Residualized relative weight analysis with spline mains and restricted interactions."""
    setup_logging(log_level, use_color=not no_color)


@cli.command()
@click.option("--config", "config_path", type=click.Path(dir_okay=False), help="KEY=VALUE run configuration.")
@click.option("--input", "input_path", type=click.Path(dir_okay=False), help="CSV file with a header row.")
@click.option("--response", help="Response column.")
@click.option("--family", type=click.Choice(["gaussian", "binomial"]))
@click.option("--variables", help="Comma-separated name:role[:knots], e.g. X1:free:5,X3:control.")
@click.option("--output", "output_path", type=click.Path(dir_okay=False), help="Write the report here instead of stdout.")
@click.option("--format", "output_format", type=click.Choice(FORMATS))
@click.option("--criterion", type=click.Choice(CRITERIA), help="Stepwise criterion (default bic).")
@click.option("--no-selection", is_flag=True, help="Analyse the full interaction model without stepwise search.")
@click.option("--seed", type=int, help="Recorded in the run configuration.")
@exit_on_error
def analyze(config_path, input_path, response, family, variables, output_path, output_format,
            criterion, no_selection, seed):
    """Select a model and report each term's relative weight."""
    config = RunConfig.load(
        config_path,
        input=input_path,
        response=response,
        family=family,
        variables=variables,
        output=output_path,
        format=output_format,
        criterion=criterion,
        selection="off" if no_selection else None,
        seed=seed,
    )
    result = run_analysis(config)
    write_output(render(result.report, config.output_format, result.selection), config.output_path)
    print_status(f"{len(result.report.per_term)} terms, R2 = {result.report.total_r2:.4f}")


@cli.command("simulate")
@click.argument("model", type=click.Choice([m.value for m in SimulationModel]))
@click.option("--n", "n", type=int, default=None, help="Rows to draw (default from RWA_SIMULATION_SIZE, 3000).")
@click.option("--seed", type=int, default=1, show_default=True)
@click.option("--output", "out_path", type=click.Path(dir_okay=False), required=True)
@click.option("--small-terms", "small_terms_path", type=click.Path(dir_okay=False),
              help="Moon nuisance coefficients (term_kind,i,j,coefficient CSV).")
@click.option("--synthetic-small-terms", "use_synthetic", is_flag=True, help="Seeded stand-in Moon nuisance terms.")
@click.option("--write-config", "config_out", type=click.Path(dir_okay=False),
              help="Also write a run configuration that analyses the generated file.")
@click.option("--response", default="y_g", type=click.Choice(["y_g", "y_b"]), show_default=True)
@exit_on_error
def simulate_command(model, n, seed, out_path, small_terms_path, use_synthetic, config_out, response):
    """Generate a benchmark dataset (ishigami, moon-base, moon-c3)."""
    if n is None:
        n = Config.SIMULATION_SIZE
    if n < 1:
        raise ConfigError(f"--n must be at least 1, got {n}")
    small_terms = ()
    if small_terms_path:
        small_terms = load_small_terms(small_terms_path)
    elif use_synthetic:
        small_terms = synthetic_small_terms(seed)
    dataset = run_simulation(model, n, seed, out_path, small_terms)
    print_status(f"Wrote {n} rows of {model} to {out_path}")
    if config_out:
        config = default_run_config(out_path, list(dataset.to_frame().columns), response)
        config.save(config_out)
        print_status(f"Wrote run configuration to {config_out}")


@cli.command()
@click.argument("first", type=click.Path(exists=True, dir_okay=False))
@click.argument("second", type=click.Path(exists=True, dir_okay=False))
@exit_on_error
def compare(first, second):
    """Compare two JSON reports term by term (difference in percentage points)."""
    names = (Path(first).stem, Path(second).stem)
    if names[0] == names[1]:
        names = ("first", "second")
    frame = compare_reports(load_report(first), load_report(second), names=names)
    click.echo(frame.to_string(index=False))


@cli.command()
@click.option("--p", "p", type=int, help="Number of variables that may interact.")
@click.option("--k", "k", type=click.IntRange(3, 5), default=3, show_default=True)
@click.option("--config", "config_path", type=click.Path(dir_okay=False),
              help="Also count the columns of the full model of this run configuration.")
@exit_on_error
def diagnostics(p, k, config_path):
    """Parameter count of the full interaction model."""
    if p is None and config_path is None:
        raise ConfigError("Give --p or --config")
    if p is not None:
        if p < 1:
            raise ConfigError(f"--p must be at least 1, got {p}")
        click.echo(f"Full model with p={p}, k={k}: {count_full_model_parameters(p, k)} parameters")
    if config_path is not None:
        config = RunConfig.load(config_path)
        click.echo(f"Full model of {config_path}: {full_model_columns(config.variables)} columns "
                   f"(intercept included)")


if __name__ == "__main__":
    cli()
