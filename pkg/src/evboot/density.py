"""Kernel smoothing of bootstrap samples: densities, means, quantiles.

The smoothed mean is the point estimate and smoothed quantiles are the
interval bounds; everything downstream consumes the grid representation
built here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid

GRID_SIZE = 512
_DEGENERATE_SPREAD = 1e-12
_NORM_TOL = 1e-6


class DegenerateSampleError(ValueError):
    """All sample values coincide; there is no density to estimate."""

    def __init__(self, location: float):
        super().__init__(f"sample is a point mass at {location}")
        self.location = float(location)


class QOutOfRangeError(ValueError):
    """Requested quantile or level lies outside (0, 1)."""


@dataclass(frozen=True)
class SmoothedDensity:
    """A density estimate tabulated on a strictly increasing grid."""

    grid: np.ndarray
    density: np.ndarray
    cdf: np.ndarray

    def __post_init__(self) -> None:
        grid = np.asarray(self.grid, dtype=float)
        density = np.asarray(self.density, dtype=float)
        cdf = np.asarray(self.cdf, dtype=float)
        if not (grid.shape == density.shape == cdf.shape) or grid.ndim != 1:
            raise ValueError("grid, density and cdf must be equal-length vectors")
        if not (np.diff(grid) > 0).all():
            raise ValueError("grid must be strictly increasing")
        if (density < 0).any():
            raise ValueError("density must be nonnegative")
        total = np.trapezoid(density, grid)
        if abs(total - 1.0) > _NORM_TOL:
            raise ValueError(f"density integrates to {total}, not 1")
        if (np.diff(cdf) < -1e-12).any() or abs(cdf[0]) > 1e-9 or abs(cdf[-1] - 1) > 1e-9:
            raise ValueError("cdf must rise monotonically from 0 to 1")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "density", density)
        object.__setattr__(self, "cdf", cdf)


def _values_of(sample) -> np.ndarray:
    values = getattr(sample, "values", sample)
    return np.asarray(values, dtype=float).ravel()


def silverman_bandwidth(values: np.ndarray) -> float:
    """0.9 * min(sd, IQR/1.34) * B^(-1/5); falls back to sd if IQR is zero."""
    sd = float(np.std(values, ddof=1))
    q75, q25 = np.percentile(values, [75.0, 25.0])
    iqr = float(q75 - q25)
    spread = min(sd, iqr / 1.34) if iqr > 0 else sd
    return 0.9 * spread * values.size ** (-0.2)


def _kde_on_grid(values: np.ndarray, grid: np.ndarray, h: float) -> np.ndarray:
    out = np.zeros(grid.size)
    # Chunk the sample so the (grid, B) kernel matrix stays small.
    for start in range(0, values.size, 4096):
        block = values[start : start + 4096]
        u = (grid[:, None] - block[None, :]) / h
        out += np.exp(-0.5 * u * u).sum(axis=1)
    return out / (values.size * h * math.sqrt(2.0 * math.pi))


def _log_quadratic_on_grid(values: np.ndarray, grid: np.ndarray, h: float) -> np.ndarray:
    """Local log-quadratic density via binned Poisson local likelihood.

    At each grid point a quadratic is fit to the log intensity of binned
    counts by kernel-weighted Newton iterations; the fitted value at the
    center is the density estimate.
    """
    n_bins = 400
    lo, hi = values.min(), values.max()
    width = (hi - lo) / n_bins
    counts, edges = np.histogram(values, bins=n_bins, range=(lo, hi))
    centers = 0.5 * (edges[:-1] + edges[1:])
    scale = values.size * width
    start = _kde_on_grid(values, grid, h)
    out = np.empty(grid.size)
    for i, t in enumerate(grid):
        u = (centers - t) / h
        w = np.exp(-0.5 * u * u)
        Z = np.column_stack([np.ones_like(u), u, u * u])
        beta = np.array([math.log(max(start[i], 1e-300)), 0.0, 0.0])
        for _ in range(50):
            eta = np.clip(Z @ beta, -700.0, 60.0)
            mu = scale * np.exp(eta)
            grad = Z.T @ (w * (counts - mu))
            hess = (Z * (w * mu)[:, None]).T @ Z
            try:
                step = np.linalg.solve(hess + 1e-10 * np.eye(3), grad)
            except np.linalg.LinAlgError:
                break
            beta = beta + np.clip(step, -4.0, 4.0)
            if np.abs(step).max() < 1e-10:
                break
        out[i] = math.exp(min(beta[0], 60.0))
    return out


_ESTIMATORS = {"gaussian": _kde_on_grid, "log_quadratic": _log_quadratic_on_grid}


def estimate_density(
    sample, estimator: str = "gaussian", grid_size: int = GRID_SIZE
) -> SmoothedDensity:
    """Smooth a bootstrap sample into a normalized grid density.

    The grid spans the sample range.  A zero-spread sample raises
    :class:`DegenerateSampleError` carrying the common value.
    """
    values = _values_of(sample)
    if values.size < 10:
        raise ValueError(f"need at least 10 values, got {values.size}")
    if estimator not in _ESTIMATORS:
        raise ValueError(f"unknown density estimator {estimator!r}")
    lo, hi = float(values.min()), float(values.max())
    if hi - lo <= _DEGENERATE_SPREAD:
        raise DegenerateSampleError(values[0])
    h = silverman_bandwidth(values)
    # The grid stays inside the sample range: evidence distributions can have
    # hard support bounds (nested comparisons are capped by the penalty term),
    # and kernel mass leaking past a boundary spike would push quantiles
    # outside the attainable range.  Renormalization restores unit mass.
    grid = np.linspace(lo, hi, grid_size)
    density = _ESTIMATORS[estimator](values, grid, h)
    density = np.maximum(density, 0.0)
    density = density / np.trapezoid(density, grid)
    cdf = cumulative_trapezoid(density, grid, initial=0.0)
    cdf = np.minimum(cdf / cdf[-1], 1.0)
    return SmoothedDensity(grid=grid, density=density, cdf=cdf)


def smoothed_mean(d: SmoothedDensity) -> float:
    """Expectation by trapezoid integration of t * density(t)."""
    return float(np.trapezoid(d.grid * d.density, d.grid))


def smoothed_quantile(d: SmoothedDensity, q: float) -> float:
    """Inverse cdf at q by monotone interpolation on the grid."""
    if not 0.0 < q < 1.0:
        raise QOutOfRangeError(f"quantile order must be in (0, 1), got {q}")
    return float(np.interp(q, d.cdf, d.grid))


def interval(sample, level: float, estimator: str = "gaussian"):
    """Equal-tailed smoothed interval plus the smoothed-mean point estimate.

    Returns (lower, upper, point).  A degenerate sample at c yields (c, c, c).
    """
    if not 0.0 < level < 1.0:
        raise QOutOfRangeError(f"confidence level must be in (0, 1), got {level}")
    try:
        d = estimate_density(sample, estimator=estimator)
    except DegenerateSampleError as exc:
        return exc.location, exc.location, exc.location
    alpha = 0.5 * (1.0 - level)
    return smoothed_quantile(d, alpha), smoothed_quantile(d, 1.0 - alpha), smoothed_mean(d)
