"""Row-resampling bootstrap of the evidence difference.

Each replicate evaluates the reference/alternative *difference* once on one
resample; the engine never materializes two per-model distributions.  Every
replicate owns a counter-based RNG stream keyed by (seed, replicate index),
so the value vector is bit-identical however replicates are scheduled.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .data import Dataset
from .evidence import SIC, NonFiniteLikelihoodError, Penalty
from .models import (
    DEGENERATE_VARIANCE_REL,
    RANK_TOL,
    LinearModelSpace,
    SpecifiedModel,
    fit_mle,
)

_MASK64 = (1 << 64) - 1
_CHUNK = 1024
# A single replicate failing this many consecutive redraws means the data are
# pathological; bail out rather than spin.
_MAX_ATTEMPTS_PER_REPLICATE = 50


class TooManyRejectionsError(RuntimeError):
    """Rejected-and-redrawn replicates exceeded the configured fraction."""


@dataclass(frozen=True)
class BootstrapConfig:
    B: int = 4000
    seed: int = 0
    mode: str = "global"  # specified | global | local
    max_reject_fraction: float = 0.05

    def __post_init__(self) -> None:
        if self.B < 1:
            raise ValueError(f"B must be >= 1, got {self.B}")
        if self.mode not in ("specified", "global", "local"):
            raise ValueError(f"unknown bootstrap mode {self.mode!r}")
        if not 0.0 <= self.max_reject_fraction < 1.0:
            raise ValueError(
                f"max_reject_fraction must be in [0, 1), got {self.max_reject_fraction}"
            )


@dataclass(frozen=True)
class EvidenceSample:
    """B bootstrap replicate evidence values plus run metadata."""

    values: np.ndarray
    mode: str
    penalty_name: str
    n: int
    rejected_count: int
    seed: int

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size < 1:
            raise ValueError("values must be a non-empty vector")
        if not np.isfinite(values).all():
            raise ValueError("evidence sample contains non-finite values")
        object.__setattr__(self, "values", values)

    @property
    def B(self) -> int:
        return self.values.size


def _replicate_rng(seed: int, replicate_index: int) -> np.random.Generator:
    key = np.array([seed & _MASK64, replicate_index & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def resample_rows(data: Dataset, replicate_index: int, seed: int) -> Dataset:
    """Draw n rows uniformly with replacement.

    Fully determined by ``(seed, replicate_index)``; execution order and
    worker count cannot change the result.
    """
    rng = _replicate_rng(seed, replicate_index)
    return data.take(rng.integers(0, data.n, size=data.n))


def _fit_batch(X: np.ndarray, y: np.ndarray, idx: np.ndarray, n: int):
    """Batched ML fit of one design on many resamples.

    Returns (beta, rss, ok); entries with ok=False (rank-deficient or
    degenerate-variance resamples) carry garbage coefficients.
    """
    yb = y[idx]
    k = X.shape[1]
    m = idx.shape[0]
    if k == 0:
        rss = np.einsum("bn,bn->b", yb, yb)
        beta = np.zeros((m, 0))
        ok = np.ones(m, dtype=bool)
    else:
        Xb = X[idx]
        Q, R = np.linalg.qr(Xb)
        diag = np.abs(np.diagonal(R, axis1=1, axis2=2))
        dmax = diag.max(axis=1)
        dmin = diag.min(axis=1)
        ok = (dmax > 0.0) & (dmin > n * RANK_TOL * dmax)
        if not ok.all():
            R = R.copy()
            R[~ok] = np.eye(k)
        qty = np.einsum("bnk,bn->bk", Q, yb)
        beta = np.linalg.solve(R, qty[:, :, None])[:, :, 0]
        resid = yb - np.einsum("bnk,bk->bn", Xb, beta)
        rss = np.einsum("bn,bn->b", resid, resid)
    vary = yb.var(axis=1)
    ok = ok & (rss / n > DEGENERATE_VARIANCE_REL * vary)
    return beta, rss, ok


def _loglik_on_original(
    X: np.ndarray, y: np.ndarray, beta: np.ndarray, sigma2: np.ndarray, n: int
) -> np.ndarray:
    """Gaussian log-likelihood of the original rows under each replicate fit."""
    if X.shape[1] == 0:
        resid = np.broadcast_to(y, (beta.shape[0], n))
    else:
        resid = y[None, :] - np.einsum("nk,bk->bn", X, beta)
    rss = np.einsum("bn,bn->b", resid, resid)
    return -0.5 * n * np.log(2.0 * np.pi * sigma2) - rss / (2.0 * sigma2)


def _linear_chunk_values(chunk_idx, Xr, Xa, y, n, penalty_term, want):
    """Evidence values for one chunk of resample index rows; both modes."""
    beta_r, rss_r, ok_r = _fit_batch(Xr, y, chunk_idx, n)
    beta_a, rss_a, ok_a = _fit_batch(Xa, y, chunk_idx, n)
    ok = ok_r & ok_a
    s2_r = rss_r / n
    s2_a = rss_a / n
    with np.errstate(divide="ignore", invalid="ignore"):
        vals_g = vals_l = None
        if want in ("global", "both"):
            l_r = -0.5 * n * np.log(2.0 * np.pi * s2_r) - rss_r / (2.0 * s2_r)
            l_a = -0.5 * n * np.log(2.0 * np.pi * s2_a) - rss_a / (2.0 * s2_a)
            vals_g = -2.0 * (l_a - l_r) + penalty_term
        if want in ("local", "both"):
            l_r = _loglik_on_original(Xr, y, beta_r, s2_r, n)
            l_a = _loglik_on_original(Xa, y, beta_a, s2_a, n)
            vals_l = -2.0 * (l_a - l_r) + penalty_term
    return vals_g, vals_l, ok


def _run_block(block, draw_indices, evaluate, out_arrays):
    """Drive one block of replicates to completion, redrawing failures."""
    rejected = 0
    pending = list(block)
    attempts = dict.fromkeys(block, 0)
    rngs = {b: None for b in block}
    while pending:
        chunk = pending[:_CHUNK]
        pending = pending[_CHUNK:]
        idx = draw_indices(chunk, rngs)
        results, ok = evaluate(idx)
        for pos, b in enumerate(chunk):
            if ok[pos]:
                for arr, res in zip(out_arrays, results):
                    arr[b] = res[pos]
            else:
                rejected += 1
                attempts[b] += 1
                if attempts[b] >= _MAX_ATTEMPTS_PER_REPLICATE:
                    raise TooManyRejectionsError(
                        f"replicate {b} failed {attempts[b]} consecutive redraws"
                    )
                pending.append(b)
    return rejected


def _bootstrap_linear(
    space_r: LinearModelSpace,
    space_a: LinearModelSpace,
    data: Dataset,
    cfg: BootstrapConfig,
    penalty: Penalty,
    want: str,
    threads: int,
):
    # Sanity gate: both spaces must fit on the full data.
    fit_mle(space_r, data)
    fit_mle(space_a, data)

    n = data.n
    B = cfg.B
    Xr = space_r.design(data.x)
    Xa = space_a.design(data.x)
    y = data.y
    penalty_term = penalty(n) * (space_a.param_count - space_r.param_count)

    out_g = np.empty(B)
    out_l = np.empty(B)
    out_arrays = {
        "global": (out_g,),
        "local": (out_l,),
        "both": (out_g, out_l),
    }[want]

    def draw_indices(chunk, rngs):
        rows = []
        for b in chunk:
            if rngs[b] is None:
                rngs[b] = _replicate_rng(cfg.seed, b)
            rows.append(rngs[b].integers(0, n, size=n))
        return np.stack(rows)

    def evaluate(idx):
        vals_g, vals_l, ok = _linear_chunk_values(
            idx, Xr, Xa, y, n, penalty_term, want
        )
        results = {
            "global": (vals_g,),
            "local": (vals_l,),
            "both": (vals_g, vals_l),
        }[want]
        return results, ok

    blocks = np.array_split(np.arange(B), max(1, threads))
    blocks = [blk.tolist() for blk in blocks if blk.size]
    if len(blocks) == 1:
        rejected = _run_block(blocks[0], draw_indices, evaluate, out_arrays)
    else:
        with ThreadPoolExecutor(max_workers=len(blocks)) as pool:
            futures = [
                pool.submit(_run_block, blk, draw_indices, evaluate, out_arrays)
                for blk in blocks
            ]
            rejected = sum(f.result() for f in futures)

    if rejected / (B + rejected) > cfg.max_reject_fraction:
        raise TooManyRejectionsError(
            f"{rejected} rejected replicates out of {B + rejected} draws "
            f"exceeds max_reject_fraction={cfg.max_reject_fraction}"
        )
    return out_g, out_l, rejected


def _bootstrap_specified(
    m_r: SpecifiedModel,
    m_a: SpecifiedModel,
    data: Dataset,
    cfg: BootstrapConfig,
) -> np.ndarray:
    d_r = m_r.row_log_densities(data)
    d_a = m_a.row_log_densities(data)
    if not (np.isfinite(d_r).all() and np.isfinite(d_a).all()):
        raise NonFiniteLikelihoodError(
            "specified model assigns non-finite log density to an observation"
        )
    n = data.n
    values = np.empty(cfg.B)
    for start in range(0, cfg.B, _CHUNK):
        chunk = range(start, min(start + _CHUNK, cfg.B))
        idx = np.stack(
            [_replicate_rng(cfg.seed, b).integers(0, n, size=n) for b in chunk]
        )
        values[chunk.start : chunk.stop] = -2.0 * (
            d_a[idx].sum(axis=1) - d_r[idx].sum(axis=1)
        )
    return values


def bootstrap_evidence(
    m_r,
    m_a,
    data: Dataset,
    cfg: BootstrapConfig,
    penalty: Penalty = SIC,
    threads: int = 1,
) -> EvidenceSample:
    """Bootstrap distribution of the evidence for ``m_r`` relative to ``m_a``.

    Mode ``specified`` takes two fully specified models and evaluates them on
    each resample.  Modes ``global`` and ``local`` take two model spaces; both
    refit on each resample, then evaluate on the resample (global) or on the
    original data (local).  Replicates whose fits fail are redrawn from the
    replicate's own stream and counted in ``rejected_count``.
    """
    if cfg.mode == "specified":
        if not (isinstance(m_r, SpecifiedModel) and isinstance(m_a, SpecifiedModel)):
            raise TypeError("specified mode requires two SpecifiedModel instances")
        values = _bootstrap_specified(m_r, m_a, data, cfg)
        rejected = 0
    else:
        if not (
            isinstance(m_r, LinearModelSpace) and isinstance(m_a, LinearModelSpace)
        ):
            raise TypeError(f"{cfg.mode} mode requires two LinearModelSpace instances")
        if m_r == m_a:
            values = np.zeros(cfg.B)
            rejected = 0
        else:
            out_g, out_l, rejected = _bootstrap_linear(
                m_r, m_a, data, cfg, penalty, cfg.mode, threads
            )
            values = out_g if cfg.mode == "global" else out_l
    return EvidenceSample(
        values=values,
        mode=cfg.mode,
        penalty_name=penalty.name,
        n=data.n,
        rejected_count=rejected,
        seed=cfg.seed,
    )


def bootstrap_evidence_pair(
    space_r: LinearModelSpace,
    space_a: LinearModelSpace,
    data: Dataset,
    cfg: BootstrapConfig,
    penalty: Penalty = SIC,
    threads: int = 1,
) -> tuple[EvidenceSample, EvidenceSample]:
    """Global and local evidence samples sharing the same resamples and fits.

    Replicate b here equals replicate b of the single-mode runs with the same
    seed; this is the fast path for coverage simulations that need both kinds.
    """
    if space_r == space_a:
        zeros = np.zeros(cfg.B)
        rejected = 0
        out_g, out_l = zeros, zeros.copy()
    else:
        out_g, out_l, rejected = _bootstrap_linear(
            space_r, space_a, data, cfg, penalty, "both", threads
        )
    common = dict(
        penalty_name=penalty.name, n=data.n, rejected_count=rejected, seed=cfg.seed
    )
    return (
        EvidenceSample(values=out_g, mode="global", **common),
        EvidenceSample(values=out_l, mode="local", **common),
    )
