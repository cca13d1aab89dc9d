"""Raw evidence values: penalized, scaled log-likelihood differences.

Positive evidence supports the reference model; negative supports the
alternative.  Values live on the 2x (information-criterion-difference)
scale throughout, matching the categorical thresholds 4 and 7.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .data import Dataset
from .models import (
    LinearModelSpace,
    SpecifiedModel,
    fit_mle,
    log_likelihood,
)


class NonFiniteLikelihoodError(ValueError):
    """A specified model assigned non-finite log density to an observation."""


@dataclass(frozen=True)
class Penalty:
    """Sample-size penalty multiplier c_n applied per extra estimated parameter."""

    c_n: Callable[[int], float]
    name: str

    def __call__(self, n: int) -> float:
        value = float(self.c_n(n))
        if value < 0.0:
            raise ValueError(f"penalty {self.name!r} is negative at n={n}")
        return value


SIC = Penalty(c_n=math.log, name="sic")
AIC = Penalty(c_n=lambda n: 2.0, name="aic")

PENALTIES = {"sic": SIC, "aic": AIC}


def is_consistent(penalty: Penalty, n_max: int = 10**6) -> bool:
    """Consistency gate: log(log(n)) < c_n(n) < n must hold for all n >= 3.

    Checked on an exhaustive grid up to 1000 and a log-spaced grid beyond.
    A penalty that fails (e.g. the constant AIC penalty) does not yield a
    consistent model-selection evidence function.
    """
    small = np.arange(3, 1001)
    large = np.unique(np.geomspace(1001, n_max, 400).astype(int))
    for n in np.concatenate([small, large]):
        n = int(n)
        c = penalty(n)
        if not (math.log(math.log(n)) < c < n):
            return False
    return True


@dataclass(frozen=True)
class EvidenceValue:
    """One realized evidence value together with how it was computed."""

    value: float
    mode: str  # specified | global | local
    n: int
    penalty_term: float

    def __post_init__(self) -> None:
        if self.mode not in ("specified", "global", "local"):
            raise ValueError(f"unknown evidence mode {self.mode!r}")
        if not math.isfinite(self.value):
            raise ValueError(f"evidence value must be finite, got {self.value}")


def raw_evidence_specified(
    m_r: SpecifiedModel, m_a: SpecifiedModel, data: Dataset
) -> EvidenceValue:
    """-2 * (log-likelihood difference) for two fully specified models.

    No penalty applies: nothing is estimated.
    """
    l_r = log_likelihood(m_r, data)
    l_a = log_likelihood(m_a, data)
    if not (math.isfinite(l_r) and math.isfinite(l_a)):
        raise NonFiniteLikelihoodError(
            f"non-finite log-likelihood: reference={l_r}, alternative={l_a}"
        )
    return EvidenceValue(
        value=-2.0 * (l_a - l_r), mode="specified", n=data.n, penalty_term=0.0
    )


def _penalty_term(
    space_r: LinearModelSpace, space_a: LinearModelSpace, n: int, penalty: Penalty
) -> float:
    return penalty(n) * (space_a.param_count - space_r.param_count)


def raw_evidence_global(
    space_r: LinearModelSpace,
    space_a: LinearModelSpace,
    boot_data: Dataset,
    penalty: Penalty = SIC,
) -> EvidenceValue:
    """Fit both spaces on ``boot_data`` and compare them on ``boot_data``.

    Equals the information-criterion difference
    ``sic(space_a, boot_data) - sic(space_r, boot_data)`` for the same penalty.
    """
    if space_r == space_a:
        return EvidenceValue(value=0.0, mode="global", n=boot_data.n, penalty_term=0.0)
    l_r = log_likelihood(fit_mle(space_r, boot_data), boot_data)
    l_a = log_likelihood(fit_mle(space_a, boot_data), boot_data)
    pen = _penalty_term(space_r, space_a, boot_data.n, penalty)
    return EvidenceValue(
        value=-2.0 * (l_a - l_r) + pen,
        mode="global",
        n=boot_data.n,
        penalty_term=pen,
    )


def raw_evidence_local(
    space_r: LinearModelSpace,
    space_a: LinearModelSpace,
    boot_data: Dataset,
    orig_data: Dataset,
    penalty: Penalty = SIC,
) -> EvidenceValue:
    """Fit both spaces on ``boot_data`` but compare them on ``orig_data``.

    The penalty uses the original sample size (resamples have the same size
    by construction).
    """
    if boot_data.d != orig_data.d:
        raise ValueError(
            f"covariate dimension mismatch: {boot_data.d} vs {orig_data.d}"
        )
    if space_r == space_a:
        return EvidenceValue(value=0.0, mode="local", n=orig_data.n, penalty_term=0.0)
    l_r = log_likelihood(fit_mle(space_r, boot_data), orig_data)
    l_a = log_likelihood(fit_mle(space_a, boot_data), orig_data)
    pen = _penalty_term(space_r, space_a, orig_data.n, penalty)
    return EvidenceValue(
        value=-2.0 * (l_a - l_r) + pen,
        mode="local",
        n=orig_data.n,
        penalty_term=pen,
    )


def sic(space: LinearModelSpace, data: Dataset, penalty: Penalty = SIC) -> float:
    """Information criterion: -2 * max log-likelihood + c_n(n) * p."""
    l_hat = log_likelihood(fit_mle(space, data), data)
    return -2.0 * l_hat + penalty(data.n) * space.param_count
