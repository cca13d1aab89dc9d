"""Mark-recapture abundance estimation with parametric-bootstrap intervals.

A two-visit study marks m animals, captures n2 on the second visit, and
recounts x marked ones.  Three bootstrap schemes condition on progressively
less: both visit totals fixed, only the marked total fixed, or neither.
Less conditioning widens the sampling distribution of the estimator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .density import (
    DegenerateSampleError,
    estimate_density,
    smoothed_quantile,
)

SCHEMES = ("both_fixed", "m_fixed", "none_fixed")
_TAG_LP = 211


class ZeroRecapturesError(ValueError):
    """No marked animals recaptured; the abundance estimate is infinite."""


class InsufficientSampleError(ValueError):
    """Too few finite bootstrap estimates to form an interval."""


@dataclass(frozen=True)
class LPData:
    """Counts from a two-visit mark-recapture study."""

    m: int  # marked on first visit
    n2: int  # captured on second visit
    x: int  # marked recaptures among the n2

    def __post_init__(self) -> None:
        if min(self.m, self.n2, self.x) < 0:
            raise ValueError("counts must be nonnegative")
        if self.x > min(self.m, self.n2):
            raise ValueError(
                f"recaptures x={self.x} cannot exceed min(m, n2)="
                f"{min(self.m, self.n2)}"
            )


@dataclass(frozen=True)
class LPBootstrapSample:
    scheme: str
    estimates: np.ndarray
    discarded: int

    def __post_init__(self) -> None:
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        estimates = np.asarray(self.estimates, dtype=float)
        if estimates.size and not ((estimates > 0) & np.isfinite(estimates)).all():
            raise ValueError("stored estimates must be finite and positive")
        object.__setattr__(self, "estimates", estimates)


def lp_estimate(d: LPData) -> int:
    """Abundance point estimate floor(n2 * m / x)."""
    if d.x == 0:
        raise ZeroRecapturesError("x = 0 gives an infinite abundance estimate")
    return int(d.n2 * d.m // d.x)


def lp_capture_prob(d: LPData) -> float:
    """Estimated per-visit capture probability n2 / estimated abundance."""
    return d.n2 / lp_estimate(d)


def lp_bootstrap(
    T: int,
    phi: float,
    m: int,
    n2: int,
    scheme: str,
    B: int,
    seed: int,
) -> LPBootstrapSample:
    """B parametric-bootstrap abundance estimates under one conditioning scheme.

    ``both_fixed`` draws recaptures hypergeometrically with both visit totals
    held at their observed values; ``m_fixed`` redraws the second-visit total
    binomially; ``none_fixed`` redraws both totals.  Estimates are kept
    unfloored; draws with zero recaptures are discarded and counted.
    """
    if T < m:
        raise ValueError(f"population T={T} cannot be below the marked count m={m}")
    if not 0.0 < phi < 1.0:
        raise ValueError(f"capture probability must be in (0, 1), got {phi}")
    if B < 1:
        raise ValueError(f"B must be >= 1, got {B}")
    if scheme not in SCHEMES:
        raise ValueError(f"scheme must be one of {SCHEMES}, got {scheme!r}")

    rng = np.random.default_rng(np.random.SeedSequence((seed, _TAG_LP)))
    if scheme == "both_fixed":
        X = rng.hypergeometric(m, T - m, n2, size=B)
        estimates = np.divide(m * n2, X, where=X > 0, out=np.zeros(B))
    elif scheme == "m_fixed":
        N = rng.binomial(T, phi, size=B)
        X = rng.binomial(np.minimum(m, N), m / T, size=B)
        estimates = np.divide(m * N, X, where=X > 0, out=np.zeros(B))
    else:
        M = rng.binomial(T, phi, size=B)
        N = rng.binomial(T, phi, size=B)
        X = rng.binomial(np.minimum(M, N), M / T, size=B)
        estimates = np.divide(M * N, X, where=X > 0, out=np.zeros(B))
    keep = X > 0
    return LPBootstrapSample(
        scheme=scheme, estimates=estimates[keep], discarded=int(B - keep.sum())
    )


def lp_intervals(sample: LPBootstrapSample, level: float) -> tuple[float, float]:
    """Equal-tailed smoothed-quantile interval over the finite estimates."""
    if sample.estimates.size < 100:
        raise InsufficientSampleError(
            f"need at least 100 finite estimates, got {sample.estimates.size}"
        )
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must be in (0, 1), got {level}")
    alpha = 0.5 * (1.0 - level)
    try:
        d = estimate_density(sample.estimates)
    except DegenerateSampleError as exc:
        return exc.location, exc.location
    return smoothed_quantile(d, alpha), smoothed_quantile(d, 1.0 - alpha)
