# File: models/simulate.py
"""Benchmark datasets: the Ishigami and Moon functions with binary versions.

All randomness comes from numpy's PCG64 generator seeded through a
SeedSequence, so a (model, n, seed) triple gives the same data everywhere.
The inputs and the Bernoulli draws use two independent child streams.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from itertools import combinations

import numpy as np
import pandas as pd
from scipy.special import expit

from models.exceptions import ConfigError, MalformedCoefficientTable

logger = logging.getLogger(__name__)

ISHIGAMI_A = 7.0
ISHIGAMI_B = 0.1
ISHIGAMI_DIM = 8
MOON_DIM = 20

TERM_KINDS = ("main", "quad", "inter")


class SimulationModel(str, Enum):
    ISHIGAMI = "ishigami"
    MOON_BASE = "moon-base"
    MOON_C3 = "moon-c3"


class MoonVariant(str, Enum):
    BASE = "base"
    C3 = "c3"


@dataclass(frozen=True)
class SmallTerm:
    kind: str
    i: int
    j: int = 0
    coefficient: float = 0.0

    def evaluate(self, X):
        xi = X[:, self.i - 1]
        if self.kind == "main":
            return self.coefficient * xi
        if self.kind == "quad":
            return self.coefficient * xi ** 2
        return self.coefficient * xi * X[:, self.j - 1]


# Active Moon effects for the base variant; C3 triples each coefficient.
MOON_ACTIVE = (
    SmallTerm("inter", 1, 18, -19.71),
    SmallTerm("inter", 1, 19, 23.72),
    SmallTerm("quad", 19, 19, -13.34),
    SmallTerm("inter", 7, 12, 28.99),
)


@dataclass(frozen=True)
class SimulatedDataset:
    X: np.ndarray
    y_g: np.ndarray
    y_b: np.ndarray
    seed: int
    model: SimulationModel

    @property
    def columns(self):
        return [f"X{i + 1}" for i in range(self.X.shape[1])]

    def to_frame(self):
        frame = pd.DataFrame(self.X, columns=self.columns)
        frame["y_g"] = self.y_g
        frame["y_b"] = self.y_b
        return frame


def _streams(seed):
    x_seq, b_seq = np.random.SeedSequence(seed).spawn(2)
    return np.random.Generator(np.random.PCG64(x_seq)), b_seq


def _check_size(n):
    if int(n) < 1:
        raise ConfigError(f"Sample size must be at least 1, got {n}")
    return int(n)


def ishigami_function(X, a=ISHIGAMI_A, b=ISHIGAMI_B):
    X = np.atleast_2d(X)
    x1, x2, x3 = X[:, 0], X[:, 1], X[:, 2]
    return np.sin(x1) + a * np.sin(x2) ** 2 + b * x3 ** 4 * np.sin(x1)


def dichotomize(y_g, seed):
    """Bernoulli draws with success probability 1 / (1 + exp(-y_g))."""
    p = expit(np.asarray(y_g, dtype=float))
    rng = np.random.default_rng(seed)
    return (rng.uniform(size=p.shape) < p).astype(int)


def ishigami(n, seed):
    n = _check_size(n)
    rng, b_seq = _streams(seed)
    X = rng.uniform(-np.pi, np.pi, size=(n, ISHIGAMI_DIM))
    y_g = ishigami_function(X)
    return SimulatedDataset(X, y_g, dichotomize(y_g, b_seq), seed, SimulationModel.ISHIGAMI)


def moon_active_terms(variant=MoonVariant.BASE):
    factor = 3.0 if MoonVariant(variant) is MoonVariant.C3 else 1.0
    return tuple(SmallTerm(t.kind, t.i, t.j, round(factor * t.coefficient, 10)) for t in MOON_ACTIVE)


def validate_small_terms(terms):
    checked = []
    for row, term in enumerate(terms, start=1):
        if term.kind not in TERM_KINDS:
            raise MalformedCoefficientTable(f"Row {row}: unknown term kind '{term.kind}'")
        if not 1 <= term.i <= MOON_DIM:
            raise MalformedCoefficientTable(f"Row {row}: variable index {term.i} outside 1..{MOON_DIM}")
        if term.kind == "inter" and (not 1 <= term.j <= MOON_DIM or term.j == term.i):
            raise MalformedCoefficientTable(f"Row {row}: invalid interaction pair ({term.i}, {term.j})")
        if not np.isfinite(term.coefficient):
            raise MalformedCoefficientTable(f"Row {row}: coefficient is not finite")
        checked.append(term)
    return tuple(checked)


def load_small_terms(path):
    """Read a term_kind,i,j,coefficient CSV."""
    try:
        frame = pd.read_csv(path)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise MalformedCoefficientTable(f"Cannot read {path}: {e}")
    missing = {"term_kind", "i", "j", "coefficient"} - set(frame.columns)
    if missing:
        raise MalformedCoefficientTable(f"{path} is missing columns {sorted(missing)}")
    frame["j"] = frame["j"].fillna(0)
    if frame[["i", "j", "coefficient"]].isna().any().any():
        raise MalformedCoefficientTable(f"{path} has empty cells")
    try:
        terms = [SmallTerm(str(r.term_kind).strip().lower(), int(r.i), int(r.j), float(r.coefficient))
                 for r in frame.itertuples(index=False)]
    except (TypeError, ValueError) as e:
        raise MalformedCoefficientTable(f"{path}: {e}")
    return validate_small_terms(terms)


def save_small_terms(terms, path):
    frame = pd.DataFrame([(t.kind, t.i, t.j, t.coefficient) for t in terms],
                         columns=["term_kind", "i", "j", "coefficient"])
    frame.to_csv(path, index=False)
    return path


def synthetic_small_terms(seed, n_interactions=150, low=-0.5, high=0.5):
    """Stand-in nuisance terms: 20 mains, 19 quadratics and 150 interactions."""
    rng = np.random.default_rng(seed)
    active_pairs = {(t.i, t.j) for t in MOON_ACTIVE if t.kind == "inter"}
    terms = [SmallTerm("main", i, 0, 0.0) for i in range(1, MOON_DIM + 1)]
    terms += [SmallTerm("quad", i, i, 0.0) for i in range(1, MOON_DIM + 1) if i != 19]
    pairs = [p for p in combinations(range(1, MOON_DIM + 1), 2) if p not in active_pairs]
    chosen = rng.choice(len(pairs), size=n_interactions, replace=False)
    terms += [SmallTerm("inter", *pairs[k], 0.0) for k in sorted(chosen)]
    coefficients = rng.uniform(low, high, size=len(terms))
    return tuple(SmallTerm(t.kind, t.i, t.j, float(c)) for t, c in zip(terms, coefficients))


def moon_function(X, variant=MoonVariant.BASE, small_terms=()):
    X = np.atleast_2d(X)
    y = np.zeros(X.shape[0])
    for term in moon_active_terms(variant) + tuple(small_terms):
        y += term.evaluate(X)
    return y


def moon(n, seed, variant=MoonVariant.BASE, small_terms=()):
    n = _check_size(n)
    variant = MoonVariant(variant)
    small_terms = validate_small_terms(small_terms)
    rng, b_seq = _streams(seed)
    X = rng.uniform(0.0, 1.0, size=(n, MOON_DIM))
    y_g = moon_function(X, variant, small_terms)
    model = SimulationModel.MOON_C3 if variant is MoonVariant.C3 else SimulationModel.MOON_BASE
    logger.debug("Moon %s: %d small terms", variant.value, len(small_terms))
    return SimulatedDataset(X, y_g, dichotomize(y_g, b_seq), seed, model)


def simulate(model, n, seed, small_terms=()):
    try:
        model = SimulationModel(model)
    except ValueError:
        raise ConfigError(f"Unknown model '{model}'; choose from {[m.value for m in SimulationModel]}")
    if model is SimulationModel.ISHIGAMI:
        return ishigami(n, seed)
    variant = MoonVariant.C3 if model is SimulationModel.MOON_C3 else MoonVariant.BASE
    return moon(n, seed, variant, small_terms)
