# File: models/splines.py
"""Restricted cubic spline knots and basis columns.

A k-knot spline of X is entered as X plus k-2 nonlinear columns S_1..S_{k-2}.
Some write-ups sum the nonlinear part from l=2 to k while only defining S_l
up to k-2; the k-2 count is the one that keeps the fit linear beyond the
boundary knots, and it is what this module produces.
"""
from dataclasses import dataclass

import numpy as np

from models.exceptions import DegenerateVariable, UnsupportedKnotCount

# P(X <= t_i) = q_i
QUANTILE_LEVELS = {
    3: (0.1, 0.5, 0.9),
    4: (0.05, 0.35, 0.65, 0.95),
    5: (0.05, 0.275, 0.5, 0.725, 0.95),
}


@dataclass(frozen=True)
class KnotSet:
    k: int
    positions: tuple = ()

    def __post_init__(self):
        if self.k == 1:
            if self.positions:
                raise ValueError("A linear variable has no knots")
            return
        if self.k not in QUANTILE_LEVELS:
            raise UnsupportedKnotCount(self.k)
        if len(self.positions) != self.k:
            raise ValueError(f"Expected {self.k} knot positions, got {len(self.positions)}")
        if np.any(np.diff(self.positions) <= 0):
            raise ValueError(f"Knot positions must be strictly increasing: {self.positions}")

    @classmethod
    def linear(cls):
        return cls(1, ())

    @property
    def n_columns(self):
        return 1 if self.k == 1 else self.k - 1


@dataclass(frozen=True)
class SplineBasis:
    """Basis columns of one variable. labels[c] is 0 for the raw variable, j for S_j."""
    columns: np.ndarray
    labels: tuple

    def is_nonlinear(self, c):
        return self.labels[c] > 0


def compute_knots(x, k, name="x"):
    """Knots at the empirical quantiles (linear interpolation) of x."""
    if k not in QUANTILE_LEVELS:
        raise UnsupportedKnotCount(k)
    x = np.asarray(x, dtype=float)
    if np.unique(x).size < k:
        raise DegenerateVariable(name, f"needs at least {k} distinct values for {k} knots")
    positions = np.quantile(x, QUANTILE_LEVELS[k], method="linear")
    if np.any(np.diff(positions) <= 0):
        raise DegenerateVariable(name, f"knots collide at {np.round(positions, 6).tolist()}")
    return KnotSet(k, tuple(float(t) for t in positions))


def _cubed_plus(u):
    return np.maximum(u, 0.0) ** 3


def spline_basis(x, knots):
    x = np.asarray(x, dtype=float)
    if knots.k == 1:
        return SplineBasis(x.reshape(-1, 1).copy(), (0,))

    t = np.asarray(knots.positions)
    t_last, t_prev = t[-1], t[-2]
    span = t_last - t_prev
    tail_prev = _cubed_plus(x - t_prev)
    tail_last = _cubed_plus(x - t_last)

    columns = [x]
    for t_j in t[:-2]:
        columns.append(
            _cubed_plus(x - t_j)
            - tail_prev * (t_last - t_j) / span
            + tail_last * (t_prev - t_j) / span
        )
    return SplineBasis(np.column_stack(columns), tuple(range(knots.k - 1)))


def expand(x, k, name="x"):
    """Knots and basis of one variable in one call."""
    knots = KnotSet.linear() if k == 1 else compute_knots(x, k, name)
    return knots, spline_basis(x, knots)
