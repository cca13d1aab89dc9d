"""Monte Carlo validation harness: coverage, length scaling, security rates.

Fourteen topology cases pair a three-covariate Gaussian generator with
reference/alternative covariate subsets covering every nesting/overlap
arrangement.  The harness scores global intervals against the population
target and local intervals against each realized dataset's target.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bootstrap import BootstrapConfig, bootstrap_evidence_pair
from .classification import (
    SIMULATION_CATEGORIES,
    DEFAULT_THRESHOLDS,
    Thresholds,
    simulation_category,
)
from .density import DegenerateSampleError, estimate_density, smoothed_mean, smoothed_quantile
from .evidence import SIC, Penalty
from .models import LinearModelSpace
from .targets import GaussianLinearGenerator, global_target, kld_fixed_design, local_target, project

# Tags keeping the hierarchical seed streams of different draws disjoint.
_TAG_DESIGN = 101
_TAG_RESPONSE = 102
_TAG_BOOT = 103

INTERCEPT = 2.0
ERROR_SD = 1.0
DEFAULT_N = 100
DEFAULT_LEVELS = (0.95, 0.90)


class EquidistantModelsError(ValueError):
    """Both spaces are exactly equally divergent; no true sign exists."""


def _space(mask: str) -> LinearModelSpace:
    """Covariate subset from a three-bit inclusion mask over (x1, x2, x3)."""
    return LinearModelSpace(covariates=tuple(j for j, bit in enumerate(mask) if bit == "1"))


@dataclass(frozen=True)
class TopologyCase:
    """One generator/reference/alternative arrangement from the 14-case study."""

    case_id: int
    g_par: tuple[float, float, float]
    mr_mask: str
    ma_mask: str
    asymptotic_label: str

    @property
    def space_r(self) -> LinearModelSpace:
        return _space(self.mr_mask)

    @property
    def space_a(self) -> LinearModelSpace:
        return _space(self.ma_mask)

    def generator(self, design: np.ndarray) -> GaussianLinearGenerator:
        return GaussianLinearGenerator(
            beta_g=np.array([INTERCEPT, *self.g_par]),
            sigma_g=ERROR_SD,
            design=design,
        )


CASES: tuple[TopologyCase, ...] = (
    TopologyCase(1, (0.00, 0.00, 0.15), "001", "011", "chisquare"),
    TopologyCase(2, (0.00, 0.30, 0.15), "001", "011", "noncentral chisquare"),
    TopologyCase(3, (0.00, 0.30, 0.00), "110", "011", "weighted sum of chisquare"),
    TopologyCase(4, (0.60, 0.30, 0.00), "110", "011", "normal"),
    TopologyCase(5, (0.00, 0.30, 0.15), "110", "011", "normal"),
    TopologyCase(6, (0.60, 0.30, 0.00), "110", "001", "normal"),
    TopologyCase(7, (0.00, 0.00, 0.15), "110", "001", "normal"),
    TopologyCase(8, (0.05, 0.05, 0.15), "001", "011", "weighted sum of chisquare"),
    TopologyCase(9, (0.05, 0.30, 0.15), "001", "011", "normal"),
    TopologyCase(10, (0.05, 0.30, 0.05), "110", "011", "weighted sum of chisquare"),
    TopologyCase(11, (0.60, 0.30, 0.05), "110", "011", "normal"),
    TopologyCase(12, (0.05, 0.30, 0.15), "110", "011", "normal"),
    TopologyCase(13, (0.60, 0.30, 0.05), "110", "001", "normal"),
    TopologyCase(14, (0.05, 0.05, 0.15), "110", "001", "normal"),
)


def get_case(case_id: int) -> TopologyCase:
    if not 1 <= case_id <= len(CASES):
        raise ValueError(f"case must be 1..{len(CASES)}, got {case_id}")
    return CASES[case_id - 1]


def make_design(n: int, seed: int, d: int = 3) -> np.ndarray:
    """Fixed N(0,1) covariate matrix, identical for every trial of a run."""
    rng = np.random.default_rng(np.random.SeedSequence((seed, _TAG_DESIGN)))
    return rng.standard_normal((n, d))


def _trial_rng(seed: int, case_id: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence((seed, case_id, trial, _TAG_RESPONSE))
    )


def _trial_boot_seed(seed: int, case_id: int, trial: int) -> int:
    ss = np.random.SeedSequence((seed, case_id, trial, _TAG_BOOT))
    return int(ss.generate_state(1, np.uint64)[0])


def _interval_bounds(sample, levels):
    """Per-level equal-tailed smoothed bounds, reusing one density fit."""
    try:
        d = estimate_density(sample)
    except DegenerateSampleError as exc:
        c = exc.location
        return {lvl: (c, c) for lvl in levels}, c
    bounds = {}
    for lvl in levels:
        alpha = 0.5 * (1.0 - lvl)
        bounds[lvl] = (smoothed_quantile(d, alpha), smoothed_quantile(d, 1.0 - alpha))
    return bounds, smoothed_mean(d)


@dataclass(frozen=True)
class CoverageCell:
    coverage: float
    mean_length: float
    sd_length: float


@dataclass(frozen=True)
class CoverageResult:
    """Coverage and interval-length summaries for one topology case."""

    case_id: int
    n: int
    trials: int
    B: int
    seed: int
    levels: tuple[float, ...]
    cells: dict  # (kind, level) -> CoverageCell
    target_global: float

    def cell(self, kind: str, level: float) -> CoverageCell:
        return self.cells[(kind, level)]


def run_coverage(
    case: TopologyCase,
    n: int = DEFAULT_N,
    trials: int = 1000,
    B: int = 1000,
    seed: int = 0,
    levels: tuple[float, ...] = DEFAULT_LEVELS,
    penalty: Penalty = SIC,
    threads: int = 1,
) -> CoverageResult:
    """Score global/local interval coverage over repeated draws from the case.

    The design is fixed once from the seed; each trial draws fresh responses,
    bootstraps both evidence kinds on the same resamples, and checks whether
    the global interval covers the population target and the local interval
    covers that trial's realized target.
    """
    design = make_design(n, seed)
    g = case.generator(design)
    space_r, space_a = case.space_r, case.space_a
    t_global = global_target(g, space_r, space_a, penalty).value

    hits = {(kind, lvl): 0 for kind in ("global", "local") for lvl in levels}
    lengths = {key: [] for key in hits}
    for t in range(trials):
        data = g.sample(_trial_rng(seed, case.case_id, t))
        cfg = BootstrapConfig(B=B, seed=_trial_boot_seed(seed, case.case_id, t))
        samp_g, samp_l = bootstrap_evidence_pair(
            space_r, space_a, data, cfg, penalty, threads=threads
        )
        t_local = local_target(g, space_r, space_a, data, penalty).value
        for kind, samp, target in (
            ("global", samp_g, t_global),
            ("local", samp_l, t_local),
        ):
            bounds, _ = _interval_bounds(samp, levels)
            for lvl, (lo, hi) in bounds.items():
                if lo <= target <= hi:
                    hits[(kind, lvl)] += 1
                lengths[(kind, lvl)].append(hi - lo)

    cells = {}
    for key, hit in hits.items():
        ln = np.asarray(lengths[key])
        cells[key] = CoverageCell(
            coverage=hit / trials,
            mean_length=float(ln.mean()),
            sd_length=float(ln.std(ddof=1)) if trials > 1 else 0.0,
        )
    return CoverageResult(
        case_id=case.case_id,
        n=n,
        trials=trials,
        B=B,
        seed=seed,
        levels=tuple(levels),
        cells=cells,
        target_global=t_global,
    )


def length_ratio_sweep(
    case: TopologyCase,
    n_values,
    trials: int = 1000,
    B: int = 1000,
    seed: int = 0,
    level: float = 0.95,
    penalty: Penalty = SIC,
    threads: int = 1,
) -> dict[int, np.ndarray]:
    """Per-trial local/global interval length ratios at each sample size.

    Zero-length global intervals (possible only in degenerate comparisons)
    drop the trial's ratio rather than emitting infinities.
    """
    out = {}
    for n in n_values:
        design = make_design(int(n), seed)
        g = case.generator(design)
        ratios = []
        for t in range(trials):
            data = g.sample(_trial_rng(seed, case.case_id * 1000 + int(n), t))
            cfg = BootstrapConfig(
                B=B, seed=_trial_boot_seed(seed, case.case_id * 1000 + int(n), t)
            )
            samp_g, samp_l = bootstrap_evidence_pair(
                case.space_r, case.space_a, data, cfg, penalty, threads=threads
            )
            bounds_g, _ = _interval_bounds(samp_g, (level,))
            bounds_l, _ = _interval_bounds(samp_l, (level,))
            len_g = bounds_g[level][1] - bounds_g[level][0]
            len_l = bounds_l[level][1] - bounds_l[level][0]
            if len_g > 0.0:
                ratios.append(len_l / len_g)
        out[int(n)] = np.asarray(ratios)
    return out


@dataclass(frozen=True)
class SecurityResult:
    """Category proportions and reliability per interval kind."""

    trials: int
    level: float
    true_sign: int
    proportions: dict  # kind -> {category code -> proportion}
    reliability: dict  # kind -> float
    seed: int = 0
    B: int = field(default=1000)


def run_security_tabulation(
    g: GaussianLinearGenerator,
    space_r: LinearModelSpace,
    space_a: LinearModelSpace,
    trials: int = 1000,
    B: int = 1000,
    seed: int = 0,
    thresholds: Thresholds = DEFAULT_THRESHOLDS,
    level: float = 0.90,
    penalty: Penalty = SIC,
    threads: int = 1,
) -> SecurityResult:
    """Tabulate simulation-category proportions under a known generator.

    The true sign comes from the divergence part of the global target (which
    space's best approximation is closer to the generator); a tie means
    neither model is "best" and raises :class:`EquidistantModelsError`.
    """
    k_r = kld_fixed_design(g, project(g, space_r))
    k_a = kld_fixed_design(g, project(g, space_a))
    divergence_part = 2.0 * g.n * (k_a - k_r)
    if divergence_part == 0.0:
        raise EquidistantModelsError(
            "reference and alternative spaces are equally divergent from the generator"
        )
    true_sign = 1 if divergence_part > 0.0 else -1

    counts = {
        kind: {cat.value: 0 for cat in SIMULATION_CATEGORIES}
        for kind in ("global", "local")
    }
    correct = {"global": 0, "local": 0}
    for t in range(trials):
        data = g.sample(_trial_rng(seed, 0, t))
        cfg = BootstrapConfig(B=B, seed=_trial_boot_seed(seed, 0, t))
        samp_g, samp_l = bootstrap_evidence_pair(
            space_r, space_a, data, cfg, penalty, threads=threads
        )
        for kind, samp in (("global", samp_g), ("local", samp_l)):
            bounds, point = _interval_bounds(samp, (level,))
            lo, hi = bounds[level]
            cat = simulation_category(point, lo, hi, true_sign, thresholds)
            counts[kind][cat.value] += 1
            if (1 if point >= 0.0 else -1) == true_sign:
                correct[kind] += 1

    proportions = {
        kind: {code: c / trials for code, c in per.items()}
        for kind, per in counts.items()
    }
    reliability = {kind: correct[kind] / trials for kind in correct}
    return SecurityResult(
        trials=trials,
        level=level,
        true_sign=true_sign,
        proportions=proportions,
        reliability=reliability,
        seed=seed,
        B=B,
    )
