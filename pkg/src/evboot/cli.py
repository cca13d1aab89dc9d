"""Command-line front-end: CSV in, JSON/CSV out, optional PNG figures.

Exit codes: 0 success, 2 malformed input or configuration, 3 statistical
failure (degenerate samples, too many rejected replicates, and the like).
Every output embeds the seed and full configuration so a run can be
reproduced byte-for-byte from its own artifacts.
"""

from __future__ import annotations

import csv
import functools
import json
import sys
from pathlib import Path

import click
import numpy as np

from .bootstrap import (
    BootstrapConfig,
    TooManyRejectionsError,
    bootstrap_evidence,
    bootstrap_evidence_pair,
)
from .classification import Thresholds, evidence_category, security_category
from .data import load_csv
from .density import (
    DegenerateSampleError,
    estimate_density,
    smoothed_mean,
    smoothed_quantile,
)
from .evidence import PENALTIES
from .lincoln_petersen import (
    InsufficientSampleError,
    LPData,
    ZeroRecapturesError,
    lp_bootstrap,
    lp_capture_prob,
    lp_estimate,
    lp_intervals,
)
from .models import LinearModelSpace, ModelError
from .profile_likelihood import (
    NormalMeanProblem,
    OptimizerFailureError,
    RegressionSlopeProblem,
    adjusted_profile_loglik,
    implied_variance_divisor,
    profile_loglik,
)
from .simulation import (
    EquidistantModelsError,
    get_case,
    length_ratio_sweep,
    make_design,
    run_coverage,
    run_security_tabulation,
)
from .targets import GaussianLinearGenerator

SCHEMA_VERSION = 1
EXIT_CONFIG = 2
EXIT_STATISTICAL = 3

_STATISTICAL_ERRORS = (
    TooManyRejectionsError,
    DegenerateSampleError,
    EquidistantModelsError,
    OptimizerFailureError,
    InsufficientSampleError,
    ZeroRecapturesError,
)
_CONFIG_ERRORS = (KeyError, ValueError, ModelError, OSError)


def _exit_codes(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except _STATISTICAL_ERRORS as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_STATISTICAL)
        except _CONFIG_ERRORS as exc:
            message = exc.args[0] if exc.args else exc
            click.echo(f"error: {message}", err=True)
            sys.exit(EXIT_CONFIG)

    return wrapper


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _write_json(document: dict, output: str | None) -> None:
    text = json.dumps(_jsonable(document), indent=2)
    if output in (None, "-"):
        click.echo(text)
    else:
        Path(output).write_text(text + "\n")


def _write_csv(rows, header, output: str) -> None:
    with Path(output).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _parse_space(spec: str, data) -> LinearModelSpace:
    """Covariate-name list ('x1,x2', or '' for intercept-only) to a model space."""
    names = [s.strip() for s in spec.split(",") if s.strip()]
    return LinearModelSpace(covariates=tuple(data.covariate_index(n) for n in names))


def _parse_mask(mask: str) -> LinearModelSpace:
    if len(mask) != 3 or any(c not in "01" for c in mask):
        raise ValueError(f"mask must be three 0/1 characters, got {mask!r}")
    return LinearModelSpace(covariates=tuple(j for j, c in enumerate(mask) if c == "1"))


def _interval_bounds(sample, levels, estimator="gaussian"):
    """Per-level (lower, upper) plus the smoothed-mean point for one sample."""
    try:
        d = estimate_density(sample, estimator=estimator)
    except DegenerateSampleError as exc:
        return {lvl: (exc.location, exc.location) for lvl in levels}, exc.location
    bounds = {}
    for lvl in levels:
        alpha = 0.5 * (1.0 - lvl)
        bounds[lvl] = (smoothed_quantile(d, alpha), smoothed_quantile(d, 1.0 - alpha))
    return bounds, smoothed_mean(d)


@click.group()
@click.version_option(package_name="evboot")
def main() -> None:
    """Bootstrap confidence intervals for the strength of model-selection evidence."""


_common = [
    click.option("--seed", type=int, default=0, show_default=True),
    click.option("--penalty", type=click.Choice(sorted(PENALTIES)), default="sic", show_default=True),
    click.option("--threads", type=int, default=1, show_default=True),
]


def _add_options(options):
    def deco(fn):
        for opt in reversed(options):
            fn = opt(fn)
        return fn

    return deco


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path())
@click.option("--response", default="y", show_default=True)
@click.option("--reference", required=True, help="Comma-separated covariate names ('' = intercept only).")
@click.option("--alternative", required=True, help="Comma-separated covariate names.")
@click.option("--B", "B", type=int, default=4000, show_default=True)
@click.option("--level", "levels", type=float, multiple=True, default=(0.95, 0.90), show_default=True)
@click.option("--mode", type=click.Choice(["global", "local", "both"]), default="both", show_default=True)
@click.option("--kp", type=float, default=4.0, show_default=True)
@click.option("--ks", type=float, default=7.0, show_default=True)
@click.option("--estimator", type=click.Choice(["gaussian", "log_quadratic"]), default="gaussian", show_default=True)
@click.option("--output", default="-", show_default=True, help="JSON report path ('-' = stdout).")
@click.option("--figures", type=click.Path(), default=None, help="Directory for PNG figures.")
@_add_options(_common)
@_exit_codes
def analyze(
    input_path, response, reference, alternative, B, levels, mode,
    kp, ks, estimator, output, figures, seed, penalty, threads,
) -> None:
    """Evidence point estimate, intervals, and categories for one dataset."""
    if B < 100:
        raise ValueError(f"analyze needs B >= 100, got {B}")
    for lvl in levels:
        if not 0.0 < lvl < 1.0:
            raise ValueError(f"levels must be in (0, 1), got {lvl}")
    data = load_csv(input_path, response)
    space_r = _parse_space(reference, data)
    space_a = _parse_space(alternative, data)
    thresholds = Thresholds(k_p=kp, k_s=ks)
    pen = PENALTIES[penalty]

    samples = {}
    if mode == "both":
        samples["global"], samples["local"] = bootstrap_evidence_pair(
            space_r, space_a, data, BootstrapConfig(B=B, seed=seed), pen, threads=threads
        )
    else:
        cfg = BootstrapConfig(B=B, seed=seed, mode=mode)
        samples[mode] = bootstrap_evidence(space_r, space_a, data, cfg, pen, threads=threads)

    results = {}
    interval_map = {}
    for kind, sample in samples.items():
        bounds, point = _interval_bounds(sample, levels, estimator)
        interval_map[kind] = {lvl: (*bounds[lvl], point) for lvl in levels}
        results[kind] = {
            "point": point,
            "rejected": sample.rejected_count,
            "intervals": {f"{lvl:g}": list(bounds[lvl]) for lvl in levels},
            "security": {
                f"{lvl:g}": security_category(point, *bounds[lvl], thresholds).value
                for lvl in levels
            },
        }

    # The conditional (local) point is the headline evidence when available.
    headline = results.get("local", next(iter(results.values())))["point"]
    document = {
        "schema_version": SCHEMA_VERSION,
        "command": "analyze",
        "config": {
            "input": str(input_path), "response": response,
            "reference": reference, "alternative": alternative,
            "B": B, "levels": list(levels), "mode": mode, "seed": seed,
            "penalty": penalty, "kp": kp, "ks": ks, "estimator": estimator,
            "threads": threads,
        },
        "n": data.n,
        "evidence_category": evidence_category(headline, thresholds).value,
        "results": results,
    }
    if space_r == space_a:
        document["warning"] = "reference and alternative spaces are identical"
    _write_json(document, output)
    if figures:
        from . import report

        report.evidence_densities_figure(
            samples, interval_map, thresholds, Path(figures) / "evidence_densities.png"
        )


@main.command()
@click.option("--case", type=int, required=True)
@click.option("--n", type=int, default=100, show_default=True)
@click.option("--trials", type=int, default=1000, show_default=True)
@click.option("--B", "B", type=int, default=1000, show_default=True)
@click.option("--level", "levels", type=float, multiple=True, default=(0.95, 0.90), show_default=True)
@click.option("--csv", "csv_path", default="coverage.csv", show_default=True)
@click.option("--json", "json_path", default="coverage.json", show_default=True)
@click.option("--figures", type=click.Path(), default=None)
@_add_options(_common)
@_exit_codes
def simulate(case, n, trials, B, levels, csv_path, json_path, figures, seed, penalty, threads) -> None:
    """Coverage of global and local intervals for one topology case."""
    topo = get_case(case)
    result = run_coverage(
        topo, n=n, trials=trials, B=B, seed=seed, levels=tuple(levels),
        penalty=PENALTIES[penalty], threads=threads,
    )
    rows = [
        [SCHEMA_VERSION, case, n, trials, B, seed, kind, lvl,
         cell.coverage, cell.mean_length, cell.sd_length, result.target_global]
        for (kind, lvl), cell in sorted(result.cells.items())
    ]
    _write_csv(
        rows,
        ["schema_version", "case", "n", "trials", "B", "seed", "kind", "level",
         "coverage", "mean_length", "sd_length", "target_global"],
        csv_path,
    )
    document = {
        "schema_version": SCHEMA_VERSION,
        "command": "simulate",
        "config": {"case": case, "n": n, "trials": trials, "B": B,
                   "levels": list(levels), "seed": seed, "penalty": penalty,
                   "threads": threads},
        "target_global": result.target_global,
        "cells": {
            f"{kind}:{lvl:g}": {
                "coverage": cell.coverage,
                "mean_length": cell.mean_length,
                "sd_length": cell.sd_length,
            }
            for (kind, lvl), cell in sorted(result.cells.items())
        },
    }
    _write_json(document, json_path)
    if figures:
        from . import report

        report.coverage_figure(result, Path(figures) / f"coverage_case{case}.png")


@main.command("ratio-sweep")
@click.option("--case", type=int, required=True)
@click.option("--n", "n_values", type=int, multiple=True, default=(25, 50, 100, 200, 400), show_default=True)
@click.option("--trials", type=int, default=1000, show_default=True)
@click.option("--B", "B", type=int, default=1000, show_default=True)
@click.option("--level", type=float, default=0.95, show_default=True)
@click.option("--csv", "csv_path", default="ratios.csv", show_default=True)
@click.option("--json", "json_path", default="ratios.json", show_default=True)
@click.option("--figures", type=click.Path(), default=None)
@_add_options(_common)
@_exit_codes
def ratio_sweep(case, n_values, trials, B, level, csv_path, json_path, figures, seed, penalty, threads) -> None:
    """Local/global interval-length ratios across sample sizes."""
    topo = get_case(case)
    ratios = length_ratio_sweep(
        topo, n_values, trials=trials, B=B, seed=seed, level=level,
        penalty=PENALTIES[penalty], threads=threads,
    )
    rows = [[case, n, t, r] for n in sorted(ratios) for t, r in enumerate(ratios[n])]
    _write_csv(rows, ["case", "n", "trial", "ratio"], csv_path)
    document = {
        "schema_version": SCHEMA_VERSION,
        "command": "ratio-sweep",
        "config": {"case": case, "n_values": list(n_values), "trials": trials,
                   "B": B, "level": level, "seed": seed, "penalty": penalty,
                   "threads": threads},
        "summary": {
            str(n): {
                "median": float(np.median(r)),
                "q1": float(np.percentile(r, 25)),
                "q3": float(np.percentile(r, 75)),
                "trials": int(r.size),
            }
            for n, r in ratios.items()
        },
    }
    _write_json(document, json_path)
    if figures:
        from . import report

        report.ratio_sweep_figure(ratios, Path(figures) / f"ratios_case{case}.png")


@main.command()
@click.option("--g-par", default="0.60,0.30,0.00", show_default=True,
              help="Three generating slopes, comma-separated.")
@click.option("--reference", "mr_mask", default="110", show_default=True,
              help="Three-bit inclusion mask over x1,x2,x3.")
@click.option("--alternative", "ma_mask", default="011", show_default=True)
@click.option("--intercept", type=float, default=2.0, show_default=True)
@click.option("--sd", type=float, default=1.0, show_default=True)
@click.option("--n", type=int, default=100, show_default=True)
@click.option("--trials", type=int, default=1000, show_default=True)
@click.option("--B", "B", type=int, default=1000, show_default=True)
@click.option("--level", type=float, default=0.90, show_default=True)
@click.option("--kp", type=float, default=4.0, show_default=True)
@click.option("--ks", type=float, default=7.0, show_default=True)
@click.option("--csv", "csv_path", default="security.csv", show_default=True)
@click.option("--json", "json_path", default="security.json", show_default=True)
@click.option("--figures", type=click.Path(), default=None)
@_add_options(_common)
@_exit_codes
def security(g_par, mr_mask, ma_mask, intercept, sd, n, trials, B, level,
             kp, ks, csv_path, json_path, figures, seed, penalty, threads) -> None:
    """Simulation-category proportions and reliability under a known generator."""
    slopes = [float(s) for s in g_par.split(",")]
    if len(slopes) != 3:
        raise ValueError(f"--g-par needs exactly three slopes, got {g_par!r}")
    design = make_design(n, seed)
    g = GaussianLinearGenerator(beta_g=np.array([intercept, *slopes]), sigma_g=sd, design=design)
    result = run_security_tabulation(
        g, _parse_mask(mr_mask), _parse_mask(ma_mask),
        trials=trials, B=B, seed=seed, thresholds=Thresholds(k_p=kp, k_s=ks),
        level=level, penalty=PENALTIES[penalty], threads=threads,
    )
    rows = [
        [kind, code, prop]
        for kind in sorted(result.proportions)
        for code, prop in result.proportions[kind].items()
    ]
    _write_csv(rows, ["kind", "category", "proportion"], csv_path)
    document = {
        "schema_version": SCHEMA_VERSION,
        "command": "security",
        "config": {"g_par": slopes, "reference": mr_mask, "alternative": ma_mask,
                   "intercept": intercept, "sd": sd, "n": n, "trials": trials,
                   "B": B, "level": level, "kp": kp, "ks": ks, "seed": seed,
                   "penalty": penalty, "threads": threads},
        "true_sign": result.true_sign,
        "proportions": result.proportions,
        "reliability": result.reliability,
    }
    _write_json(document, json_path)
    if figures:
        from . import report

        report.security_figure(result, Path(figures) / "security.png")


@main.command()
@click.option("--m", type=int, required=True)
@click.option("--n2", type=int, required=True)
@click.option("--x", type=int, required=True)
@click.option("--B", "B", type=int, default=10000, show_default=True)
@click.option("--level", type=float, default=0.95, show_default=True)
@click.option("--csv", "csv_path", default="lp_density.csv", show_default=True)
@click.option("--json", "json_path", default="lp.json", show_default=True)
@click.option("--figures", type=click.Path(), default=None)
@click.option("--seed", type=int, default=0, show_default=True)
@_exit_codes
def lp(m, n2, x, B, level, csv_path, json_path, figures, seed) -> None:
    """Mark-recapture abundance intervals under three conditioning schemes."""
    data = LPData(m=m, n2=n2, x=x)
    t_hat = lp_estimate(data)
    phi_hat = lp_capture_prob(data)
    samples, intervals, grid_rows = {}, {}, []
    for scheme in ("both_fixed", "m_fixed", "none_fixed"):
        sample = lp_bootstrap(t_hat, phi_hat, m, n2, scheme, B, seed)
        samples[scheme] = sample
        intervals[scheme] = lp_intervals(sample, level)
        try:
            d = estimate_density(sample.estimates)
        except DegenerateSampleError:
            continue
        grid_rows.extend([scheme, g, f] for g, f in zip(d.grid, d.density))
    _write_csv(grid_rows, ["scheme", "grid", "density"], csv_path)
    document = {
        "schema_version": SCHEMA_VERSION,
        "command": "lp",
        "config": {"m": m, "n2": n2, "x": x, "B": B, "level": level, "seed": seed},
        "estimate": t_hat,
        "capture_prob": phi_hat,
        "intervals": {
            scheme: {
                "lower": intervals[scheme][0],
                "upper": intervals[scheme][1],
                "discarded": samples[scheme].discarded,
            }
            for scheme in samples
        },
    }
    _write_json(document, json_path)
    if figures:
        from . import report

        report.lp_figure(samples, intervals, t_hat, Path(figures) / "lp_densities.png")


@main.command()
@click.option("--family", type=click.Choice(["normal", "regression"]), default="normal", show_default=True)
@click.option("--input", "input_path", required=True, type=click.Path())
@click.option("--response", default="y", show_default=True)
@click.option("--covariate", default=None, help="Interest slope's covariate name (regression only).")
@click.option("--fixed-sigma2", type=float, default=None, help="Known variance (normal only).")
@click.option("--B", "B", type=int, default=1000, show_default=True)
@click.option("--gamma-min", type=float, default=None)
@click.option("--gamma-max", type=float, default=None)
@click.option("--points", type=int, default=41, show_default=True)
@click.option("--csv", "csv_path", default="profile.csv", show_default=True)
@click.option("--json", "json_path", default="profile.json", show_default=True)
@click.option("--figures", type=click.Path(), default=None)
@click.option("--seed", type=int, default=0, show_default=True)
@_exit_codes
def profile(family, input_path, response, covariate, fixed_sigma2, B,
            gamma_min, gamma_max, points, csv_path, json_path, figures, seed) -> None:
    """Profile and simulation-adjusted log-likelihood curves for one parameter."""
    data = load_csv(input_path, response)
    if family == "normal":
        prob = NormalMeanProblem(data.y, fixed_sigma2=fixed_sigma2)
    else:
        if covariate is None:
            raise ValueError("--covariate is required for the regression family")
        space = LinearModelSpace(covariates=tuple(range(data.d)))
        prob = RegressionSlopeProblem(data, space, data.covariate_index(covariate))
    gamma_hat, _ = prob.fit_full()
    scale = prob.gamma_scale()
    lo = gamma_min if gamma_min is not None else gamma_hat - 3.0 * scale
    hi = gamma_max if gamma_max is not None else gamma_hat + 3.0 * scale
    if not lo < hi:
        raise ValueError(f"need gamma-min < gamma-max, got {lo} >= {hi}")
    gammas = np.linspace(lo, hi, points)
    curves = {"profile": [], "adjusted": [], "et_adjusted": []}
    for gamma in gammas:
        lp_val = profile_loglik(prob, float(gamma))
        lsa = adjusted_profile_loglik(prob, float(gamma), B, seed)
        curves["profile"].append(lp_val)
        curves["adjusted"].append(lsa)
        curves["et_adjusted"].append(2.0 * lp_val - lsa)
    rows = list(zip(gammas, *curves.values()))
    _write_csv(rows, ["gamma", "profile", "adjusted", "et_adjusted"], csv_path)
    document = {
        "schema_version": SCHEMA_VERSION,
        "command": "profile",
        "config": {"family": family, "input": str(input_path), "response": response,
                   "covariate": covariate, "fixed_sigma2": fixed_sigma2, "B": B,
                   "gamma_min": lo, "gamma_max": hi, "points": points, "seed": seed},
        "gamma_hat": gamma_hat,
        "implied_variance_divisor": (
            implied_variance_divisor(prob, B, seed) if prob.nuisance_dim else prob.n
        ),
    }
    _write_json(document, json_path)
    if figures:
        from . import report

        report.profile_figure(
            gammas, {k: np.asarray(v) for k, v in curves.items()},
            Path(figures) / "profile.png",
        )


if __name__ == "__main__":
    main()
