"""Matplotlib renderings of the delimited outputs, written as PNG files.

Every renderer takes already-computed results (never recomputes statistics)
and writes a single figure; the CLI calls these only when a figures
directory is requested.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .classification import Thresholds
from .density import DegenerateSampleError, estimate_density


def _finish(fig, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def evidence_densities_figure(
    samples: dict, intervals: dict, thresholds: Thresholds, path
) -> Path:
    """Smoothed evidence densities per kind with thresholds and interval bands."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for kind, sample in samples.items():
        try:
            d = estimate_density(sample)
        except DegenerateSampleError as exc:
            ax.axvline(exc.location, linestyle="-", label=f"{kind} (point mass)")
            continue
        (line,) = ax.plot(d.grid, d.density, label=kind)
        for level, (lo, hi, _point) in intervals.get(kind, {}).items():
            ax.axvspan(lo, hi, color=line.get_color(), alpha=0.12)
    for k in (thresholds.k_p, thresholds.k_s):
        ax.axvline(k, color="gray", linestyle=":", linewidth=0.8)
        ax.axvline(-k, color="gray", linestyle=":", linewidth=0.8)
    ax.axvline(0.0, color="black", linewidth=0.8)
    ax.set_xlabel("evidence")
    ax.set_ylabel("density")
    ax.legend()
    return _finish(fig, path)


def coverage_figure(result, path) -> Path:
    """Bar chart of coverage by interval kind and level, with nominal lines."""
    fig, ax = plt.subplots(figsize=(6, 4))
    labels, values = [], []
    for (kind, level), cell in sorted(result.cells.items()):
        labels.append(f"{kind}\n{level:.0%}")
        values.append(cell.coverage)
    ax.bar(range(len(values)), values, color="steelblue")
    for level in result.levels:
        ax.axhline(level, color="gray", linestyle="--", linewidth=0.8)
    ax.set_xticks(range(len(labels)), labels)
    ax.set_ylim(0, 1.05)
    ax.set_ylabel("coverage")
    ax.set_title(f"case {result.case_id}, n={result.n}, {result.trials} trials")
    return _finish(fig, path)


def ratio_sweep_figure(ratios: dict, path) -> Path:
    """Box plots of local/global interval length ratios against sample size."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ns = sorted(ratios)
    ax.boxplot([ratios[n] for n in ns], tick_labels=[str(n) for n in ns])
    ax.axhline(1.0, color="gray", linestyle="--", linewidth=0.8)
    ax.set_xlabel("n")
    ax.set_ylabel("local length / global length")
    return _finish(fig, path)


def security_figure(result, path) -> Path:
    """Grouped bars of simulation-category proportions per interval kind."""
    kinds = sorted(result.proportions)
    codes = list(next(iter(result.proportions.values())))
    width = 0.8 / len(kinds)
    fig, ax = plt.subplots(figsize=(8, 4))
    xs = np.arange(len(codes))
    for i, kind in enumerate(kinds):
        vals = [result.proportions[kind][c] for c in codes]
        ax.bar(xs + i * width, vals, width, label=f"{kind} (rel {result.reliability[kind]:.3f})")
    ax.set_xticks(xs + 0.4 - width / 2, codes)
    ax.set_ylabel("proportion")
    ax.legend()
    return _finish(fig, path)


def lp_figure(samples: dict, intervals: dict, point_estimate: float, path) -> Path:
    """Bootstrap abundance densities for the three conditioning schemes."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for scheme, sample in samples.items():
        try:
            d = estimate_density(sample.estimates)
        except DegenerateSampleError as exc:
            ax.axvline(exc.location, label=f"{scheme} (point mass)")
            continue
        (line,) = ax.plot(d.grid, d.density, label=scheme)
        lo, hi = intervals[scheme]
        ax.axvspan(lo, hi, color=line.get_color(), alpha=0.12)
    ax.axvline(point_estimate, color="black", linewidth=0.8)
    ax.set_xlabel("estimated abundance")
    ax.set_ylabel("density")
    ax.legend()
    return _finish(fig, path)


def profile_figure(gammas, curves: dict, path) -> Path:
    """Profile and adjusted log-likelihood curves over the interest grid."""
    fig, ax = plt.subplots(figsize=(6.5, 4))
    for label, values in curves.items():
        ax.plot(gammas, values, label=label)
    ax.set_xlabel("interest parameter")
    ax.set_ylabel("log-likelihood")
    ax.legend()
    return _finish(fig, path)
