import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.stats import norm

from evboot.models import LinearModelSpace, RankDeficientError
from evboot.simulation import make_design
from evboot.targets import (
    GaussianLinearGenerator,
    global_target,
    kld_fixed_design,
    local_target,
    project,
)

DESIGN = make_design(100, 3)
CASE4_GEN = GaussianLinearGenerator(
    beta_g=np.array([2.0, 0.60, 0.30, 0.0]), sigma_g=1.0, design=DESIGN
)
M110 = LinearModelSpace((0, 1))
M011 = LinearModelSpace((1, 2))
M001 = LinearModelSpace((2,))


def test_projection_of_contained_generator_is_identity():
    proj = project(CASE4_GEN, LinearModelSpace((0, 1, 2)))
    np.testing.assert_allclose(proj.beta, [2.0, 0.60, 0.30, 0.0], atol=1e-10)
    assert proj.sigma2 == pytest.approx(1.0)
    proj110 = project(CASE4_GEN, M110)
    np.testing.assert_allclose(proj110.beta, [2.0, 0.60, 0.30], atol=1e-10)
    assert proj110.sigma2 == pytest.approx(1.0)


def test_projection_with_orthogonal_irrelevant_covariate():
    x1 = np.linspace(-1, 1, 50)
    x1 = x1 - x1.mean()
    g = GaussianLinearGenerator(
        beta_g=np.array([2.0, 0.0]), sigma_g=1.0, design=x1[:, None]
    )
    proj = project(g, LinearModelSpace((0,)))
    np.testing.assert_allclose(proj.beta, [2.0, 0.0], atol=1e-12)
    assert proj.sigma2 == pytest.approx(1.0)


def test_projection_matches_numeric_kl_minimizer():
    from scipy.optimize import minimize

    proj = project(CASE4_GEN, M011)
    X = M011.design(DESIGN)
    mu_g = CASE4_GEN.mean

    def avg_kl(params):
        beta, log_s2 = params[:-1], params[-1]
        s2 = math.exp(log_s2)
        mu_m = X @ beta
        return float(
            np.mean(0.5 * math.log(s2) + (1.0 + (mu_g - mu_m) ** 2) / (2 * s2) - 0.5)
        )

    res = minimize(
        avg_kl,
        np.zeros(X.shape[1] + 1),
        method="Nelder-Mead",
        options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 20000},
    )
    np.testing.assert_allclose(proj.beta, res.x[:-1], atol=1e-5)
    assert proj.sigma2 == pytest.approx(math.exp(res.x[-1]), abs=1e-5)


def test_projection_is_idempotent():
    proj = project(CASE4_GEN, M011)
    as_generator = GaussianLinearGenerator(
        beta_g=np.array([proj.beta[0], 0.0, proj.beta[1], proj.beta[2]]),
        sigma_g=math.sqrt(proj.sigma2),
        design=DESIGN,
    )
    again = project(as_generator, M011)
    np.testing.assert_allclose(again.beta, proj.beta, atol=1e-10)
    assert again.sigma2 == pytest.approx(proj.sigma2)


def test_projection_rank_deficiency():
    design = np.column_stack([DESIGN[:, 0], DESIGN[:, 0]])
    g = GaussianLinearGenerator(
        beta_g=np.array([0.0, 1.0, 1.0]), sigma_g=1.0, design=design
    )
    with pytest.raises(RankDeficientError):
        project(g, LinearModelSpace((0, 1)))


def test_kld_self_is_zero():
    proj = project(CASE4_GEN, LinearModelSpace((0, 1, 2)))
    assert kld_fixed_design(CASE4_GEN, proj) == pytest.approx(0.0, abs=1e-12)


def _kl_numeric(mu_g, s_g, mu_m, s_m):
    def integrand(z):
        return (norm.logpdf(z, mu_g, s_g) - norm.logpdf(z, mu_m, s_m)) * norm.pdf(
            z, mu_g, s_g
        )

    val, _ = quad(integrand, mu_g - 12 * s_g, mu_g + 12 * s_g)
    return val


def test_kld_mean_shift_against_numeric_integration():
    g = GaussianLinearGenerator(
        beta_g=np.array([1.0]), sigma_g=1.0, design=np.empty((1, 0))
    )
    from evboot.models import FittedLinearModel

    m = FittedLinearModel(beta=np.array([0.0]), sigma2=1.0, space=LinearModelSpace())
    assert kld_fixed_design(g, m) == pytest.approx(0.5)
    assert kld_fixed_design(g, m) == pytest.approx(_kl_numeric(1.0, 1.0, 0.0, 1.0), abs=1e-8)


def test_kld_variance_ratio_against_numeric_integration():
    g = GaussianLinearGenerator(
        beta_g=np.array([0.0]), sigma_g=1.0, design=np.empty((1, 0))
    )
    from evboot.models import FittedLinearModel

    m = FittedLinearModel(beta=np.array([0.0]), sigma2=4.0, space=LinearModelSpace())
    expected = math.log(2.0) + 1.0 / 8.0 - 0.5
    assert kld_fixed_design(g, m) == pytest.approx(expected, abs=1e-12)
    assert expected == pytest.approx(_kl_numeric(0.0, 1.0, 0.0, 2.0), abs=1e-8)


@given(st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=25, deadline=None)
def test_kld_nonnegative(seed):
    rng = np.random.default_rng(seed)
    g = GaussianLinearGenerator(
        beta_g=rng.normal(0, 1, 3), sigma_g=float(rng.uniform(0.5, 2.0)),
        design=rng.standard_normal((20, 2)),
    )
    space = LinearModelSpace((0,))
    proj = project(g, space)
    assert kld_fixed_design(g, proj) >= -1e-12


def test_global_target_identical_spaces_is_zero():
    assert global_target(CASE4_GEN, M110, M110).value == 0.0


def test_global_target_nested_with_generator_in_both():
    case1_gen = GaussianLinearGenerator(
        beta_g=np.array([2.0, 0.0, 0.0, 0.15]), sigma_g=1.0, design=DESIGN
    )
    t = global_target(case1_gen, M001, M011)
    assert t.value == pytest.approx(math.log(100), abs=1e-10)


def test_global_target_monte_carlo_oracle():
    # expectation of the per-row log-density difference under g, averaged
    # over a large simulated sample at each design row
    proj_r = project(CASE4_GEN, M110)
    proj_a = project(CASE4_GEN, M011)
    rng = np.random.default_rng(99)
    reps = 10_000
    mu_g = CASE4_GEN.mean
    draws = mu_g[None, :] + rng.standard_normal((reps, 100))
    def mean_logpdf(proj):
        mu = proj.mean(DESIGN)
        return np.mean(
            -0.5 * (math.log(2 * math.pi * proj.sigma2))
            - (draws - mu[None, :]) ** 2 / (2 * proj.sigma2)
        )
    mean_logpdf_g = np.mean(-0.5 * math.log(2 * math.pi) - (draws - mu_g[None, :]) ** 2 / 2.0)
    mc_kld_r = mean_logpdf_g - mean_logpdf(proj_r)
    mc_kld_a = mean_logpdf_g - mean_logpdf(proj_a)
    # both spaces carry two covariates, so the penalty difference vanishes
    mc_value = 2 * 100 * (mc_kld_a - mc_kld_r)
    t = global_target(CASE4_GEN, M110, M011)
    # Monte Carlo SE of the divergence difference, scaled by 2n
    assert t.value == pytest.approx(mc_value, abs=3.0)


def test_local_target_identical_spaces():
    data = CASE4_GEN.sample(np.random.default_rng(0))
    assert local_target(CASE4_GEN, M011, M011, data).value == 0.0


def test_local_target_identical_projections_is_penalty_only():
    case1_gen = GaussianLinearGenerator(
        beta_g=np.array([2.0, 0.0, 0.0, 0.15]), sigma_g=1.0, design=DESIGN
    )
    for seed in range(3):
        data = case1_gen.sample(np.random.default_rng(seed))
        t = local_target(case1_gen, M001, M011, data)
        assert t.value == pytest.approx(math.log(100), abs=1e-9)


def test_local_target_matches_row_wise_oracle():
    data = CASE4_GEN.sample(np.random.default_rng(17))
    proj_r = project(CASE4_GEN, M110)
    proj_a = project(CASE4_GEN, M011)

    def loglik(proj):
        mu = proj.mean(DESIGN)
        return sum(
            -0.5 * math.log(2 * math.pi * proj.sigma2)
            - (yi - mi) ** 2 / (2 * proj.sigma2)
            for yi, mi in zip(data.y, mu)
        )

    # equal parameter counts: no penalty contribution
    expected = -2.0 * (loglik(proj_a) - loglik(proj_r))
    t = local_target(CASE4_GEN, M110, M011, data)
    assert t.value == pytest.approx(expected, rel=1e-10)


def test_generator_validation():
    with pytest.raises(ValueError):
        GaussianLinearGenerator(beta_g=np.array([1.0]), sigma_g=0.0, design=np.empty((2, 0)))
    with pytest.raises(ValueError):
        GaussianLinearGenerator(beta_g=np.array([1.0, 2.0]), sigma_g=1.0, design=np.empty((2, 0)))
