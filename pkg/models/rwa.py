# File: models/rwa.py
"""Relative weight analysis on a (residualized) design.

The standardized design D is replaced by its closest orthonormal surrogate
Z = A B' (from the thin SVD D = A diag(s) B'). Importance is measured on Z
and mapped back to the columns of D through Lambda = Z'D. Everything is
expressed on the correlation scale, so for a gaussian model the column
weights add up to R2_O.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from models.exceptions import ConstantResponse, DegenerateFit, RankDeficient, ZeroVarianceColumn
from models.glm import fit, r_squared_gaussian, r_squared_logistic
from models.models import Family

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OrthogonalDecomposition:
    Z: np.ndarray  # Z'Z = I
    Lambda: np.ndarray  # Z'D_std / sqrt(n-1)
    D_std: np.ndarray


@dataclass(frozen=True)
class TermWeight:
    term: object
    weight: float  # share of explained variance
    percent: float  # share of the summed weights, in %
    role: str  # Control | Fixed | Free | Interaction

    @property
    def label(self):
        return str(self.term)


@dataclass(frozen=True)
class RwaReport:
    per_term: tuple
    column_weights: np.ndarray
    total_r2: float
    family: Family

    @property
    def weight_sum(self):
        return float(np.sum(self.column_weights))

    @property
    def sum_discrepancy(self):
        return self.weight_sum - self.total_r2

    def weight_of(self, term):
        for item in self.per_term:
            if item.term == term:
                return item
        raise KeyError(term)


def standardize_columns(M, labels=None):
    """Center and scale every column to sd 1 (denominator n-1)."""
    M = np.asarray(M, dtype=float)
    means = M.mean(axis=0)
    sds = M.std(axis=0, ddof=1)
    for j, sd in enumerate(sds):
        if not sd > 1e-12 * (1.0 + abs(means[j])):
            raise ZeroVarianceColumn(j, labels[j] if labels is not None else None)
    return (M - means) / sds, means, sds


def orthogonalize(D_std):
    D_std = np.asarray(D_std, dtype=float)
    n, m = D_std.shape
    A, s, Bt = scipy.linalg.svd(D_std, full_matrices=False)
    if m and s[-1] <= s[0] * max(n, m) * np.finfo(float).eps:
        raise RankDeficient(f"standardized design has rank below {m}")
    Z = A @ Bt
    Lambda = Z.T @ D_std / math.sqrt(n - 1)
    return OrthogonalDecomposition(Z=Z, Lambda=Lambda, D_std=D_std)


def _standardized_response(y):
    y = np.asarray(y, dtype=float)
    sd = y.std(ddof=1)
    if sd == 0.0:
        raise ConstantResponse()
    return (y - y.mean()) / sd


def standardized_coefficients_gaussian(Z, y):
    """OLS coefficients of the standardized response on the standardized columns of Z."""
    y_std = _standardized_response(y)
    return Z.T @ y_std / math.sqrt(len(y_std) - 1)


def fully_standardized_coefficients(b, s_z, r2_l, s_logit):
    """b * s_Z * R_L / s_logit(Yhat), with R_L = sqrt(R2_L)."""
    b = np.asarray(b, dtype=float)
    if not np.any(b):
        return np.zeros_like(b)
    if s_logit == 0.0:
        raise DegenerateFit("All fitted probabilities are equal; the logit prediction has no spread")
    return b * np.asarray(s_z) * math.sqrt(max(r2_l, 0.0)) / s_logit


def _logistic_coefficients(Z, y):
    logistic = fit(Z, y, Family.BINOMIAL)
    r2_l = r_squared_logistic(logistic, y)
    p = logistic.fitted
    s_logit = float(np.log(p / (1.0 - p)).std(ddof=1))
    beta = fully_standardized_coefficients(logistic.coefficients[1:], Z.std(axis=0, ddof=1), r2_l, s_logit)
    return beta, r2_l


def standardized_coefficients_logistic(Z, y):
    return _logistic_coefficients(Z, y)[0]


def relative_weights(design, y, family=Family.GAUSSIAN):
    """Per-column and per-term relative weights of a design for response y."""
    family = Family(family)
    y = np.asarray(y, dtype=float)

    if design.n_columns == 0:
        logger.warning("No predictors left in the model; every weight is empty")
        return RwaReport((), np.zeros(0), 0.0, family)

    D_std, _, _ = standardize_columns(design.values, [c.label for c in design.columns])
    decomposition = orthogonalize(D_std)
    if family is Family.GAUSSIAN:
        beta = standardized_coefficients_gaussian(decomposition.Z, y)
        total_r2 = r_squared_gaussian(fit(design, y, family), y)
    else:
        beta, total_r2 = _logistic_coefficients(decomposition.Z, y)

    epsilon = (decomposition.Lambda ** 2).T @ beta ** 2
    weight_sum = float(epsilon.sum())
    per_term = []
    for group in design.groups:
        weight = float(epsilon[group.columns].sum())
        percent = 100.0 * weight / weight_sum if weight_sum > 0 else 0.0
        per_term.append(TermWeight(group.term, weight, percent, group.role_label))

    report = RwaReport(tuple(per_term), epsilon, total_r2, family)
    logger.info("Relative weights: R2 = %.4f, sum of weights = %.4f", total_r2, weight_sum)
    if family is Family.BINOMIAL:
        logger.info("Logistic weights differ from R2_L by %.4g", report.sum_discrepancy)
    return report
