# File: views/helpers.py
import logging
from functools import wraps
from pathlib import Path

import click
import pandas as pd

from models.exceptions import ConfigError, DataError, RwaError
from models.models import Family, VariableRole, VariableSpec
from utils.config import RunConfig

logger = logging.getLogger(__name__)

RESPONSE_COLUMNS = ("y_g", "y_b")


def exit_on_error(f):
    """Decorator to turn pipeline errors into a message and an exit code"""
    @wraps(f)
    def decorated_function(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except RwaError as e:
            click.secho(f"✗ {type(e).__name__}: {e}", fg="red", err=True)
            raise SystemExit(e.exit_code)
    return decorated_function


def read_dataset(path, columns=None):
    """Read a CSV and keep complete cases of the requested columns"""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"Input file not found: {path}")
    try:
        frame = pd.read_csv(path)
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise DataError(f"Cannot parse {path}: {e}")

    if columns is not None:
        missing = [c for c in columns if c not in frame.columns]
        if missing:
            raise DataError(f"Columns not found in {path.name}: {', '.join(missing)}")
        frame = frame[list(columns)]

    for column in frame.columns:
        if not pd.api.types.is_numeric_dtype(frame[column]):
            converted = pd.to_numeric(frame[column], errors="coerce")
            bad = converted.isna() & frame[column].notna()
            if bad.any():
                row = int(bad.idxmax()) + 1
                raise DataError(f"Column '{column}' has a non-numeric value {frame[column][bad].iloc[0]!r} at row {row}")
            frame[column] = converted

    complete = frame.dropna()
    dropped = len(frame) - len(complete)
    if dropped:
        logger.warning("Dropped %d incomplete rows of %d", dropped, len(frame))
    if complete.empty:
        raise DataError(f"No complete rows in {path.name}")
    return complete


def default_run_config(input_path, columns, response="y_g", knots=5):
    """Run config that treats every non-response column as a free spline variable"""
    if response not in columns:
        raise ConfigError(f"Response '{response}' is not a column of {input_path}")
    family = Family.BINOMIAL if response == "y_b" else Family.GAUSSIAN
    variables = tuple(
        VariableSpec(c, VariableRole.FREE, knots)
        for c in columns if c not in RESPONSE_COLUMNS and c != response
    )
    return RunConfig(input_path=Path(input_path), response=response, family=family,
                     variables=variables).validate()


def print_status(message, ok=True):
    click.secho(f"{'✓' if ok else '✗'} {message}", fg="green" if ok else "red", err=True)
