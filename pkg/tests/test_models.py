import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from evboot.data import Dataset
from evboot.models import (
    DegenerateVarianceError,
    DimensionMismatchError,
    FittedLinearModel,
    LinearModelSpace,
    ModelError,
    RankDeficientError,
    SpecifiedModel,
    fit_mle,
    gaussian_max_loglik,
    log_likelihood,
    param_count,
)

LOG_2PI = math.log(2.0 * math.pi)


def _dataset(y, x=None, names=None):
    y = np.asarray(y, dtype=float)
    if x is None:
        x = np.empty((y.size, 0))
    x = np.asarray(x, dtype=float)
    if names is None:
        names = tuple(f"x{j + 1}" for j in range(x.shape[1]))
    return Dataset(y=y, x=x, column_names=names)


def test_intercept_only_fit_is_mean_and_ml_variance():
    fit = fit_mle(LinearModelSpace(), _dataset([1.0, 3.0, 2.0]))
    assert fit.beta[0] == pytest.approx(2.0)
    assert fit.sigma2 == pytest.approx(np.var([1.0, 3.0, 2.0]))


def test_constant_response_is_degenerate():
    with pytest.raises(DegenerateVarianceError):
        fit_mle(LinearModelSpace(), _dataset([5.0, 5.0, 5.0, 5.0]))


def test_simple_regression_matches_pseudo_inverse_oracle():
    y = np.array([1.0, 2.0, 2.0, 3.0])
    x = np.array([[0.0], [1.0], [2.0], [3.0]])
    fit = fit_mle(LinearModelSpace((0,)), _dataset(y, x))
    X = np.column_stack([np.ones(4), x[:, 0]])
    oracle = np.linalg.pinv(X) @ y
    np.testing.assert_allclose(fit.beta, oracle, atol=1e-12)
    # hand-solved 2x2 normal equations: slope 0.6, intercept 1.1
    assert fit.beta[0] == pytest.approx(1.1)
    assert fit.beta[1] == pytest.approx(0.6)


def test_loglik_standard_normal_at_zero():
    model = FittedLinearModel(beta=np.array([0.0]), sigma2=1.0, space=LinearModelSpace())
    value = log_likelihood(model, _dataset([0.0]))
    assert value == pytest.approx(-0.5 * LOG_2PI, abs=1e-9)


def test_loglik_plug_in_identity():
    data = _dataset([0.4, 1.7, -0.3, 2.2, 0.9])
    fit = fit_mle(LinearModelSpace(), data)
    assert log_likelihood(fit, data) == pytest.approx(
        gaussian_max_loglik(data.n, fit.sigma2)
    )


def test_loglik_matches_row_by_row_oracle():
    rng = np.random.default_rng(3)
    x = rng.standard_normal((10, 1))
    y = 1.0 + 0.5 * x[:, 0] + rng.standard_normal(10)
    data = _dataset(y, x)
    fit = fit_mle(LinearModelSpace((0,)), data)
    mu = fit.beta[0] + fit.beta[1] * x[:, 0]
    oracle = sum(
        -0.5 * (LOG_2PI + math.log(fit.sigma2)) - (yi - mi) ** 2 / (2 * fit.sigma2)
        for yi, mi in zip(y, mu)
    )
    assert log_likelihood(fit, data) == pytest.approx(oracle, rel=1e-12)


def test_param_count_examples():
    assert param_count(LinearModelSpace()) == 2
    assert param_count(LinearModelSpace((0, 1))) == 4
    assert param_count(LinearModelSpace((0,), intercept=False)) == 2


def test_rank_deficient_design():
    x = np.column_stack([np.ones(6), np.ones(6)])
    data = Dataset(y=np.arange(6.0), x=x, column_names=("a", "b"))
    with pytest.raises(RankDeficientError):
        fit_mle(LinearModelSpace((0, 1)), data)


def test_missing_covariate_dimension():
    data = _dataset(np.arange(5.0), np.ones((5, 1)))
    with pytest.raises(DimensionMismatchError):
        LinearModelSpace((0, 3)).design(data.x)


def test_needs_more_rows_than_parameters():
    with pytest.raises(ModelError, match="n > p"):
        fit_mle(LinearModelSpace(), _dataset([1.0, 2.0]))


def test_specified_model_rows():
    m = SpecifiedModel(
        log_density=lambda y, x: -0.5 * (LOG_2PI + y**2), label="std normal"
    )
    data = _dataset([0.0, 1.0])
    vals = m.row_log_densities(data)
    assert vals.shape == (2,)
    assert log_likelihood(m, data) == pytest.approx(vals.sum())


@given(st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=25, deadline=None)
def test_residuals_orthogonal_to_design(seed):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((12, 2))
    y = rng.standard_normal(12)
    data = Dataset(y=y, x=x, column_names=("a", "b"))
    space = LinearModelSpace((0, 1))
    fit = fit_mle(space, data)
    resid = y - fit.mean(x)
    X = space.design(x)
    assert np.abs(X.T @ resid).max() < 1e-8 * data.n


@given(st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=25, deadline=None)
def test_mle_maximizes_likelihood(seed):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((15, 1))
    y = rng.standard_normal(15)
    data = Dataset(y=y, x=x, column_names=("a",))
    space = LinearModelSpace((0,))
    fit = fit_mle(space, data)
    best = log_likelihood(fit, data)
    for _ in range(5):
        perturbed = FittedLinearModel(
            beta=fit.beta + rng.normal(0, 0.1, size=fit.beta.shape),
            sigma2=fit.sigma2 * math.exp(rng.normal(0, 0.2)),
            space=space,
        )
        assert log_likelihood(perturbed, data) <= best + 1e-10


def test_nested_spaces_never_lose_likelihood():
    rng = np.random.default_rng(11)
    x = rng.standard_normal((20, 3))
    y = rng.standard_normal(20)
    data = Dataset(y=y, x=x, column_names=("a", "b", "c"))
    chain = [LinearModelSpace(tuple(range(k))) for k in range(4)]
    logliks = [log_likelihood(fit_mle(s, data), data) for s in chain]
    assert all(b >= a - 1e-10 for a, b in zip(logliks, logliks[1:]))


def test_space_validation():
    with pytest.raises(ValueError):
        LinearModelSpace((0, 0))
    with pytest.raises(ValueError):
        LinearModelSpace((-1,))
