"""True global and local targets for known Gaussian generating processes.

Coverage scoring in the simulation harness needs the quantity each interval
is supposed to contain: the penalized scaled difference of divergences from
the generator to each space's best approximation (global), or the penalized
log-likelihood difference of those fixed best approximations on one realized
dataset (local).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import Dataset
from .evidence import SIC, Penalty
from .models import (
    FittedLinearModel,
    LinearModelSpace,
    RankDeficientError,
    RANK_TOL,
    log_likelihood,
)


@dataclass(frozen=True)
class GaussianLinearGenerator:
    """The true process: fixed design, known coefficients, known error sd.

    ``beta_g`` is the intercept followed by one slope per design column; the
    design is held fixed across simulated datasets.
    """

    beta_g: np.ndarray
    sigma_g: float
    design: np.ndarray

    def __post_init__(self) -> None:
        beta = np.atleast_1d(np.asarray(self.beta_g, dtype=float))
        design = np.asarray(self.design, dtype=float)
        if design.ndim != 2:
            raise ValueError("design must be a 2-d matrix")
        if beta.shape != (design.shape[1] + 1,):
            raise ValueError(
                f"beta_g needs 1 intercept + {design.shape[1]} slopes, "
                f"got shape {beta.shape}"
            )
        if not self.sigma_g > 0.0:
            raise ValueError(f"sigma_g must be positive, got {self.sigma_g}")
        object.__setattr__(self, "beta_g", beta)
        object.__setattr__(self, "design", design)
        object.__setattr__(self, "sigma_g", float(self.sigma_g))

    @property
    def n(self) -> int:
        return self.design.shape[0]

    @property
    def mean(self) -> np.ndarray:
        """True mean response at the fixed design rows."""
        return self.beta_g[0] + self.design @ self.beta_g[1:]

    def sample(self, rng: np.random.Generator) -> Dataset:
        """One dataset: true means plus i.i.d. Gaussian errors."""
        y = self.mean + rng.normal(0.0, self.sigma_g, size=self.n)
        names = tuple(f"x{j + 1}" for j in range(self.design.shape[1]))
        return Dataset(y=y, x=self.design, column_names=names)


@dataclass(frozen=True)
class TargetValue:
    value: float
    kind: str  # global | local

    def __post_init__(self) -> None:
        if self.kind not in ("global", "local"):
            raise ValueError(f"unknown target kind {self.kind!r}")
        if not math.isfinite(self.value):
            raise ValueError(f"target value must be finite, got {self.value}")


def project(g: GaussianLinearGenerator, space: LinearModelSpace) -> FittedLinearModel:
    """Best approximation of the generator within a model space.

    The mean projects by least squares onto the space's column span; the
    lack-of-fit mean square is absorbed into the variance, which minimizes
    the average divergence at fixed mean error.
    """
    X = space.design(g.design)
    mu = g.mean
    if X.shape[1] == 0:
        beta = np.empty(0)
        fitted = np.zeros(g.n)
    else:
        Q, R = np.linalg.qr(X)
        diag = np.abs(np.diag(R))
        if diag.max() == 0.0 or diag.min() <= g.n * RANK_TOL * diag.max():
            raise RankDeficientError(
                f"collinear design for covariates {space.covariates}"
            )
        beta = np.linalg.solve(R, Q.T @ mu)
        fitted = X @ beta
    lack_of_fit = mu - fitted
    sigma2 = g.sigma_g**2 + float(lack_of_fit @ lack_of_fit) / g.n
    return FittedLinearModel(beta=beta, sigma2=sigma2, space=space)


def kld_fixed_design(g: GaussianLinearGenerator, m: FittedLinearModel) -> float:
    """Average over design rows of the Gaussian-vs-Gaussian divergence."""
    mu_g = g.mean
    mu_m = m.mean(g.design)
    s2_g = g.sigma_g**2
    s2_m = m.sigma2
    per_row = (
        0.5 * math.log(s2_m / s2_g) + (s2_g + (mu_g - mu_m) ** 2) / (2.0 * s2_m) - 0.5
    )
    return float(np.mean(per_row))


def _penalty_term(
    space_r: LinearModelSpace, space_a: LinearModelSpace, n: int, penalty: Penalty
) -> float:
    return penalty(n) * (space_a.param_count - space_r.param_count)


def global_target(
    g: GaussianLinearGenerator,
    space_r: LinearModelSpace,
    space_a: LinearModelSpace,
    penalty: Penalty = SIC,
) -> TargetValue:
    """2n * (divergence to the alternative minus to the reference) + penalty."""
    if space_r == space_a:
        return TargetValue(value=0.0, kind="global")
    k_r = kld_fixed_design(g, project(g, space_r))
    k_a = kld_fixed_design(g, project(g, space_a))
    value = 2.0 * g.n * (k_a - k_r) + _penalty_term(space_r, space_a, g.n, penalty)
    return TargetValue(value=value, kind="global")


def local_target(
    g: GaussianLinearGenerator,
    space_r: LinearModelSpace,
    space_a: LinearModelSpace,
    data: Dataset,
    penalty: Penalty = SIC,
) -> TargetValue:
    """Penalized log-likelihood difference of the fixed projections on ``data``."""
    if space_r == space_a:
        return TargetValue(value=0.0, kind="local")
    m_r = project(g, space_r)
    m_a = project(g, space_a)
    value = -2.0 * (log_likelihood(m_a, data) - log_likelihood(m_r, data))
    value += _penalty_term(space_r, space_a, data.n, penalty)
    return TargetValue(value=value, kind="local")
