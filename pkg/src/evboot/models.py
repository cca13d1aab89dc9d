"""Gaussian linear model spaces, ML fitting, and log-likelihood evaluation."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .data import Dataset

LOG_2PI = float(np.log(2.0 * np.pi))

# Relative floor below which the ML error variance is treated as zero.
DEGENERATE_VARIANCE_REL = 1e-12
# Relative pivot threshold for declaring a resampled design rank deficient.
RANK_TOL = float(np.finfo(float).eps)


class ModelError(Exception):
    """Base class for model fitting/evaluation failures."""


class RankDeficientError(ModelError):
    """The design matrix is collinear on this (re)sample."""


class DegenerateVarianceError(ModelError):
    """Residual sum of squares is numerically zero; the Gaussian fit degenerates."""


class DimensionMismatchError(ModelError):
    """Model refers to covariates the dataset does not have."""


@dataclass(frozen=True)
class LinearModelSpace:
    """A Gaussian linear regression family over a subset of covariates.

    ``covariates`` holds 0-based column indices into the dataset's covariate
    matrix.  The error variance always counts as one estimated parameter.
    """

    covariates: tuple[int, ...] = ()
    intercept: bool = True

    def __post_init__(self) -> None:
        covs = tuple(int(j) for j in self.covariates)
        if len(set(covs)) != len(covs):
            raise ValueError(f"duplicate covariate indices in {covs}")
        if any(j < 0 for j in covs):
            raise ValueError(f"negative covariate index in {covs}")
        object.__setattr__(self, "covariates", covs)

    @property
    def param_count(self) -> int:
        return len(self.covariates) + int(self.intercept) + 1

    @property
    def n_terms(self) -> int:
        return len(self.covariates) + int(self.intercept)

    def design(self, x: np.ndarray) -> np.ndarray:
        """Design matrix (n, n_terms) for a covariate matrix ``x``."""
        x = np.asarray(x, dtype=float)
        if self.covariates and (x.ndim != 2 or max(self.covariates) >= x.shape[1]):
            raise DimensionMismatchError(
                f"space needs covariate columns {self.covariates}, data has "
                f"{x.shape[1] if x.ndim == 2 else 0}"
            )
        cols = []
        if self.intercept:
            cols.append(np.ones(x.shape[0]))
        for j in self.covariates:
            cols.append(x[:, j])
        if not cols:
            return np.empty((x.shape[0], 0))
        return np.column_stack(cols)

    def term_names(self, column_names: tuple[str, ...]) -> tuple[str, ...]:
        names = ("intercept",) if self.intercept else ()
        return names + tuple(column_names[j] for j in self.covariates)


@dataclass(frozen=True)
class FittedLinearModel:
    """A concrete Gaussian linear model: coefficients plus ML error variance."""

    beta: np.ndarray
    sigma2: float
    space: LinearModelSpace

    def __post_init__(self) -> None:
        beta = np.atleast_1d(np.asarray(self.beta, dtype=float))
        if beta.shape != (self.space.n_terms,):
            raise ValueError(
                f"beta has shape {beta.shape}, space has {self.space.n_terms} terms"
            )
        if not self.sigma2 > 0.0:
            raise DegenerateVarianceError(f"sigma2 must be positive, got {self.sigma2}")
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "sigma2", float(self.sigma2))

    def mean(self, x: np.ndarray) -> np.ndarray:
        """Fitted mean response for covariate matrix ``x``."""
        return self.space.design(x) @ self.beta

    def rss(self, data: Dataset) -> float:
        resid = data.y - self.mean(data.x)
        return float(resid @ resid)


@dataclass(frozen=True)
class SpecifiedModel:
    """A fully specified model: a per-row log-density with no free parameters.

    ``log_density(y, x)`` must accept the response vector and covariate matrix
    and return one log-density value per row.
    """

    log_density: Callable[[np.ndarray, np.ndarray], np.ndarray]
    label: str = ""

    def row_log_densities(self, data: Dataset) -> np.ndarray:
        vals = np.asarray(self.log_density(data.y, data.x), dtype=float)
        if vals.shape != (data.n,):
            raise ValueError(
                f"log_density for {self.label!r} returned shape {vals.shape}, "
                f"expected ({data.n},)"
            )
        return vals


Model = Union[FittedLinearModel, SpecifiedModel]


def param_count(space: LinearModelSpace) -> int:
    """Number of estimated parameters: terms plus the error variance."""
    return space.param_count


def fit_mle(space: LinearModelSpace, data: Dataset) -> FittedLinearModel:
    """Maximum-likelihood fit of ``space`` on ``data``.

    Coefficients solve the normal equations (via QR, not an explicit
    inverse); the error variance is RSS/n, the ML divisor.

    Raises
    ------
    RankDeficientError
        if the design is collinear on this sample.
    DegenerateVarianceError
        if the residuals are numerically zero.
    """
    X = space.design(data.x)
    n, k = X.shape
    if n <= space.param_count:
        raise ModelError(
            f"need n > p to fit: n={n}, p={space.param_count}"
        )
    y = data.y
    if k == 0:
        beta = np.empty(0)
        rss = float(y @ y)
    else:
        Q, R = np.linalg.qr(X)
        diag = np.abs(np.diag(R))
        if diag.max() == 0.0 or diag.min() <= n * RANK_TOL * diag.max():
            raise RankDeficientError(
                f"collinear design for covariates {space.covariates}"
            )
        beta = np.linalg.solve(R, Q.T @ y)
        resid = y - X @ beta
        rss = float(resid @ resid)
    sigma2 = rss / n
    if sigma2 <= DEGENERATE_VARIANCE_REL * float(np.var(y)):
        raise DegenerateVarianceError(
            f"residual variance {sigma2:g} is numerically zero"
        )
    return FittedLinearModel(beta=beta, sigma2=sigma2, space=space)


def gaussian_max_loglik(n: int, sigma2: float) -> float:
    """Maximized Gaussian log-likelihood given the ML variance: -(n/2)(log(2*pi*s2)+1)."""
    return -0.5 * n * (np.log(2.0 * np.pi * sigma2) + 1.0)


def log_likelihood(model: Model, data: Dataset) -> float:
    """Sum over rows of the log density of ``data`` under ``model``."""
    if isinstance(model, SpecifiedModel):
        return float(np.sum(model.row_log_densities(data)))
    rss = model.rss(data)
    n = data.n
    return -0.5 * n * np.log(2.0 * np.pi * model.sigma2) - rss / (2.0 * model.sigma2)
