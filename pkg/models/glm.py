# File: models/glm.py
"""Gaussian (least squares) and binomial (IRLS) fits on a design matrix."""
import logging
import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.special import expit

from models.exceptions import (
    ConstantResponse,
    DataError,
    NonBinaryResponse,
    RankDeficient,
    SeparationWarning,
)
from models.models import Family
from utils.config import Config

logger = logging.getLogger(__name__)

LOG_2PI = math.log(2.0 * math.pi)
SEPARATION_ATOL = 1e-6


@dataclass(frozen=True)
class ModelFit:
    family: Family
    coefficients: np.ndarray  # intercept first
    fitted: np.ndarray  # y-hat for gaussian, probabilities for binomial
    log_likelihood: float
    bic: float
    n: int
    n_params: int
    converged: bool = True
    iterations: int = 0

    @property
    def aic(self):
        return aic(self)

    @property
    def deviance(self):
        return -2.0 * self.log_likelihood


def bic(fit):
    return -2.0 * fit.log_likelihood + math.log(fit.n) * fit.n_params


def aic(fit):
    return -2.0 * fit.log_likelihood + 2.0 * fit.n_params


def penalty(criterion, n):
    """Per-parameter penalty of an information criterion."""
    if criterion == "bic":
        return math.log(n)
    if criterion == "aic":
        return 2.0
    raise ValueError(f"Unknown criterion '{criterion}'")


def criterion_value(fit, criterion="bic"):
    return -2.0 * fit.log_likelihood + penalty(criterion, fit.n) * fit.n_params


def gaussian_log_likelihood(rss, n):
    """Normal log-likelihood with the variance profiled out; +inf for an exact fit."""
    if rss <= 0.0:
        return math.inf
    return -0.5 * n * (LOG_2PI + math.log(rss / n) + 1.0)


def _matrix(design):
    values = getattr(design, "values", design)
    return np.asarray(values, dtype=float)


def _column_names(design, indices):
    columns = getattr(design, "columns", None)
    names = []
    for i in indices:
        # index 0 is the intercept
        if i == 0:
            names.append("(intercept)")
        elif columns is not None:
            names.append(f"{columns[i - 1].label} [{columns[i - 1].term}]")
        else:
            names.append(f"column {i - 1}")
    return names


def with_intercept(values):
    return np.column_stack([np.ones(values.shape[0]), values])


def _pivoted_qr(X, design):
    """Pivoted QR of X; raises RankDeficient naming the dependent columns."""
    Q, R, pivots = scipy.linalg.qr(X, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    tol = diag[0] * max(X.shape) * np.finfo(float).eps if diag.size else 0.0
    rank = int(np.sum(diag > tol))
    if rank < X.shape[1]:
        raise RankDeficient(", ".join(_column_names(design, sorted(pivots[rank:]))))
    return Q, R, pivots


def check_binary(y):
    bad = np.flatnonzero((y != 0) & (y != 1))
    if bad.size:
        raise NonBinaryResponse(int(bad[0]) + 1, y[bad[0]])


def _fit_gaussian(X, y, design):
    Q, R, pivots = _pivoted_qr(X, design)
    coefficients = np.empty(X.shape[1])
    coefficients[pivots] = scipy.linalg.solve_triangular(R, Q.T @ y)
    fitted = X @ coefficients
    rss = float(np.sum((y - fitted) ** 2))
    return coefficients, fitted, gaussian_log_likelihood(rss, len(y)), True, 0


def _binomial_log_likelihood(y, mu):
    return float(np.sum(y * np.log(mu) + (1.0 - y) * np.log1p(-mu)))


def _fit_binomial(X, y, design, tol, max_iter, clamp, warn):
    check_binary(y)
    _pivoted_qr(X, design)

    mu = (y + 0.5) / 2.0
    eta = np.log(mu / (1.0 - mu))
    coefficients = np.zeros(X.shape[1])
    deviance_old = math.inf
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        w = mu * (1.0 - mu)
        z = eta + (y - mu) / w
        sqrt_w = np.sqrt(w)
        coefficients = scipy.linalg.lstsq(X * sqrt_w[:, None], z * sqrt_w)[0]
        eta = X @ coefficients
        mu = np.clip(expit(eta), clamp, 1.0 - clamp)
        deviance = -2.0 * _binomial_log_likelihood(y, mu)
        if abs(deviance - deviance_old) < tol:
            converged = True
            break
        deviance_old = deviance

    # clamp hits, or every observation fitted exactly (complete separation)
    separated = bool(np.any(mu <= clamp) or np.any(mu >= 1.0 - clamp)
                     or np.max(np.abs(y - mu)) < SEPARATION_ATOL)
    if separated or not converged:
        reason = "fitted probabilities reached 0 or 1" if separated else f"no convergence in {max_iter} iterations"
        message = f"Logistic fit did not converge: {reason}"
        if warn:
            warnings.warn(message, SeparationWarning, stacklevel=3)
            logger.warning(message)
        else:
            logger.debug(message)
        converged = False
    return coefficients, mu, _binomial_log_likelihood(y, mu), converged, iterations


def fit(design, y, family=Family.GAUSSIAN, *, tol=None, max_iter=None, clamp=None, warn=True):
    """Fit an intercept plus the design columns to y.

    Gaussian fits are exact least squares with the profiled-variance normal
    log-likelihood. Binomial fits run IRLS until the deviance changes by less
    than `tol`; a fit that hits `max_iter` or separates is returned with
    converged=False and a SeparationWarning.
    """
    family = Family(family)
    X = with_intercept(_matrix(design))
    y = np.asarray(y, dtype=float)
    if y.shape != (X.shape[0],):
        raise DataError(f"Response has {y.size} values but the design has {X.shape[0]} rows")

    if family is Family.GAUSSIAN:
        coefficients, fitted, log_likelihood, converged, iterations = _fit_gaussian(X, y, design)
    else:
        coefficients, fitted, log_likelihood, converged, iterations = _fit_binomial(
            X, y, design,
            tol=Config.IRLS_TOL if tol is None else tol,
            max_iter=Config.IRLS_MAX_ITER if max_iter is None else max_iter,
            clamp=Config.PROB_CLAMP if clamp is None else clamp,
            warn=warn,
        )

    n, n_params = len(y), X.shape[1]
    return ModelFit(
        family=family,
        coefficients=coefficients,
        fitted=fitted,
        log_likelihood=log_likelihood,
        bic=-2.0 * log_likelihood + math.log(n) * n_params,
        n=n,
        n_params=n_params,
        converged=converged,
        iterations=iterations,
    )


def _r_squared(y, fitted):
    y = np.asarray(y, dtype=float)
    total = float(np.sum((y - y.mean()) ** 2))
    if total == 0.0:
        raise ConstantResponse()
    return 1.0 - float(np.sum((y - fitted) ** 2)) / total


def r_squared_gaussian(fit, y):
    """R2_O = 1 - RSS / TSS"""
    return _r_squared(y, fit.fitted)


def r_squared_logistic(fit, y):
    """R2_L = 1 - sum (Y - Yhat)^2 / sum (Y - Ybar)^2 on the fitted probabilities"""
    return _r_squared(y, fit.fitted)


def r_squared(fit, y):
    if fit.family is Family.GAUSSIAN:
        return r_squared_gaussian(fit, y)
    return r_squared_logistic(fit, y)
