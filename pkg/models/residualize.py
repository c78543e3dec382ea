# File: models/residualize.py
"""Residualize interaction columns against the two basis columns they are a product of.

A*S(B) is replaced by the residual of regressing it, without an intercept,
on A and S(B). Main and control columns are left untouched.
"""
import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from models.design import DesignMatrix
from models.exceptions import RankDeficient

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Provenance:
    column: int
    parents: tuple  # indices of the two parent columns in the design
    degenerate: bool = False  # zero-variance product, replaced by zeros


@dataclass(frozen=True)
class ResidualizedDesign(DesignMatrix):
    provenance: tuple = field(default_factory=tuple)


def residualize_column(interaction_col, parents):
    """Residual of interaction_col after a no-intercept least-squares fit on the parents."""
    col = np.asarray(interaction_col, dtype=float)
    P = np.column_stack([np.asarray(p, dtype=float) for p in parents])
    Q, R = scipy.linalg.qr(P, mode="economic")
    diag = np.abs(np.diag(R))
    if diag.size == 0 or diag.min() <= diag.max() * max(P.shape) * np.finfo(float).eps:
        raise RankDeficient("parent columns are collinear")
    residual = col - Q @ (Q.T @ col)
    # second pass keeps the residual orthogonal to rounding level
    return residual - Q @ (Q.T @ residual)


def residualize_interactions(design):
    values = design.values.copy()
    provenance = []
    for index, column in enumerate(design.columns):
        if not column.term.is_interaction:
            continue
        try:
            parents = tuple(design.column_index((factor,)) for factor in column.factors)
        except KeyError:
            raise ValueError(f"Interaction {column.term} needs both main effects in the design")

        col = design.values[:, index]
        if np.ptp(col) == 0.0:
            logger.warning("Interaction column %s has zero variance; using a zero residual", column.label)
            values[:, index] = 0.0
            provenance.append(Provenance(index, parents, degenerate=True))
            continue
        try:
            values[:, index] = residualize_column(col, [design.values[:, p] for p in parents])
        except RankDeficient:
            raise RankDeficient(f"{column.term}: parents of {column.label} are collinear")
        provenance.append(Provenance(index, parents))

    logger.debug("Residualized %d interaction columns", len(provenance))
    return ResidualizedDesign(values, design.columns, design.groups, tuple(provenance))
