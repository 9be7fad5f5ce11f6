"""Scenario generation, calibration, and the study runners.

Analytic oracles: two-group variance algebra for the slope calibration and
oracle covariance entries; law-of-large-numbers checks for the generated
error distributions; the central chi-squared mean for the residual quadratic
form.  Full-scale bias/coverage/variance validation lives in the acceptance
suite; here the runners are exercised on small grids for mechanics and
reproducibility.
"""

import math

import numpy as np
import pytest

from resi.distributions import make_stream
from resi.linmodels import fit_ols
from resi.simharness import (
    ScenarioSpec,
    build_grid,
    calibrate_beta1,
    gen_scenario,
    make_scenario,
    oracle_cov,
    oracle_cov_realized,
    run_bias_study,
    run_coverage_study,
    run_variance_study,
    slope_variance,
    write_study_csv,
)
from resi.distributions import ErrorDistSpec


class TestCalibration:
    def test_null_effect(self):
        assert calibrate_beta1(make_scenario(100, 0.0)) == 0.0

    def test_homoskedastic_unit_sd(self):
        # S = 1, sigma = 1, pi = 0.3: b1 = sqrt(1 / 0.21) = 2.1822
        assert calibrate_beta1(make_scenario(100, 1.0)) == pytest.approx(2.1821789, abs=1e-6)

    def test_heteroskedastic(self):
        # sqrt(1.5^2/0.3 + 0.5^2/0.7) = sqrt(7.857143) = 2.8030596
        sc = make_scenario(100, 1.0, skedasticity="hetero")
        assert calibrate_beta1(sc) == pytest.approx(2.8030596, abs=1e-6)

    def test_gamma_uses_same_variance_algebra(self):
        assert slope_variance(make_scenario(50, 1.0, family="gamma")) == slope_variance(
            make_scenario(50, 1.0)
        )


class TestOracleCov:
    def test_homoskedastic_entry(self):
        m = oracle_cov(make_scenario(100, 0.5)).matrix
        assert m[1, 1] == pytest.approx(1.0 / 0.21, rel=1e-12)

    def test_heteroskedastic_entry(self):
        m = oracle_cov(make_scenario(100, 0.5, skedasticity="hetero")).matrix
        assert m[1, 1] == pytest.approx(7.857142857, abs=1e-6)

    def test_scale_equivariance(self):
        base = ScenarioSpec(
            n=100, s_true=0.5, errors=ErrorDistSpec("normal", 1.0, 1.0),
            skedasticity="homo", covariate_mode="fixed",
        )
        doubled = ScenarioSpec(
            n=100, s_true=0.5, errors=ErrorDistSpec("normal", 2.0, 2.0),
            skedasticity="homo", covariate_mode="fixed",
        )
        assert np.allclose(oracle_cov(doubled).matrix, 4.0 * oracle_cov(base).matrix)

    def test_realized_matches_analytic_for_exact_proportion(self):
        # fixed design at n=500 puts exactly 150 ones, so p_hat = pi
        sc = make_scenario(500, 1.0, skedasticity="hetero")
        data = gen_scenario(sc, make_stream(1))
        assert np.allclose(oracle_cov_realized(sc, data.X).matrix, oracle_cov(sc).matrix, rtol=1e-10)

    def test_realized_reflects_drawn_design(self):
        sc = make_scenario(200, 1.0, covariate_mode="random")
        data = gen_scenario(sc, make_stream(2))
        p_hat = data.X[:, 1].mean()
        m = oracle_cov_realized(sc, data.X).matrix
        assert m[1, 1] == pytest.approx(1.0 / p_hat + 1.0 / (1 - p_hat), rel=1e-10)


class TestGenScenario:
    def test_fixed_mode_places_ceiling_n_pi_ones(self):
        data = gen_scenario(make_scenario(50, 0.0), make_stream(3))
        assert data.X[:, 1].sum() == 15  # ceil(50 * 0.3)
        data = gen_scenario(make_scenario(51, 0.0), make_stream(3))
        assert data.X[:, 1].sum() == 16  # ceil(15.3)

    def test_heteroskedastic_group_sds(self):
        sc = make_scenario(100000, 0.0, skedasticity="hetero")
        data = gen_scenario(sc, make_stream(4))
        x = data.X[:, 1]
        assert data.y[x == 1.0].std() == pytest.approx(1.5, rel=0.05)
        assert data.y[x == 0.0].std() == pytest.approx(0.5, rel=0.05)

    def test_gamma_errors_centered_unit_variance(self):
        sc = make_scenario(10**6, 0.0, family="gamma")
        data = gen_scenario(sc, make_stream(5))
        assert data.y.mean() == pytest.approx(0.0, abs=0.01)
        assert data.y.var() == pytest.approx(1.0, rel=0.02)

    def test_random_mode_draws_bernoulli(self):
        sc = make_scenario(10**5, 0.0, covariate_mode="random")
        data = gen_scenario(sc, make_stream(6))
        assert data.X[:, 1].mean() == pytest.approx(0.3, abs=0.01)

    def test_deterministic_given_stream(self):
        sc = make_scenario(50, 1.0, covariate_mode="random")
        a = gen_scenario(sc, make_stream(7, 1))
        b = gen_scenario(sc, make_stream(7, 1))
        assert np.array_equal(a.y, b.y) and np.array_equal(a.X, b.X)

    def test_residual_quadratic_form_is_central(self):
        # sigma^-2 Y'(I-H)Y averages n - m under homoskedastic normal errors
        sc = make_scenario(30, 1.0)
        vals = []
        for r in range(20000):
            data = gen_scenario(sc, make_stream(8, r))
            fit = fit_ols(data)
            vals.append(float(fit.residuals @ fit.residuals))
        mean = np.mean(vals)
        se = np.std(vals, ddof=1) / math.sqrt(len(vals))
        assert abs(mean - 28.0) < 3 * se + 0.01
        assert mean == pytest.approx(28.0, abs=0.2)


class TestScenarioValidation:
    def test_homo_requires_equal_sds(self):
        with pytest.raises(ValueError):
            ScenarioSpec(
                n=50, s_true=0.0, errors=ErrorDistSpec("normal", 1.0, 2.0),
                skedasticity="homo", covariate_mode="fixed",
            )

    def test_hetero_requires_standard_sds(self):
        with pytest.raises(ValueError):
            ScenarioSpec(
                n=50, s_true=0.0, errors=ErrorDistSpec("normal", 1.0, 1.0),
                skedasticity="hetero", covariate_mode="fixed",
            )


class TestStudies:
    def test_bias_study_positive_at_null(self):
        # S = 0: the truncated estimator can only overshoot
        res = run_bias_study([make_scenario(50, 0.0)], 200, 9)
        for r in res:
            assert r.mean_s_hat > 0.0
            assert r.bias == r.mean_s_hat

    def test_bias_study_reproducible_across_workers(self):
        grid = build_grid({"n": [50], "s": [0.0, 1.0]})
        a = run_bias_study(grid, 50, 10, workers=1)
        b = run_bias_study(grid, 50, 10, workers=2)
        assert [(r.estimator, r.mean_s_hat, r.bias_se) for r in a] == [
            (r.estimator, r.mean_s_hat, r.bias_se) for r in b
        ]

    def test_coverage_study_rows(self):
        res = run_coverage_study(
            [make_scenario(50, 1.0)], 100, ["chisq", "f"], 11, estimators=("oracle",)
        )
        assert len(res) == 2
        for r in res:
            assert 0.7 <= r.coverage <= 1.0
            assert r.coverage_se == pytest.approx(
                math.sqrt(r.coverage * (1 - r.coverage) / r.replicates)
            )

    def test_coverage_with_bootstrap_method(self):
        res = run_coverage_study(
            [make_scenario(50, 0.66)], 25, ["nonparametric"], 12,
            estimators=("robust",), boot_replicates=100,
        )
        assert res[0].replicates == 25

    def test_variance_study_theory_columns(self):
        res = run_variance_study([50], 1.0, "fixed", 400, 13)
        by_est = {r.estimator: r for r in res}
        assert by_est["oracle"].var_theory == pytest.approx(2 * (1 + 2 * 50), abs=1e-9)
        assert by_est["parametric"].var_theory is not None
        assert by_est["robust"].var_theory is None
        assert by_est["oracle"].var_t2 == pytest.approx(202.0, rel=0.35)

    def test_build_grid_product_order(self):
        grid = build_grid({"n": [50, 100], "s": [0.0, 1.0], "skedasticity": ["homo"]})
        assert [(sc.n, sc.s_true) for sc in grid] == [(50, 0.0), (50, 1.0), (100, 0.0), (100, 1.0)]

    def test_csv_output_deterministic(self, tmp_path):
        grid = build_grid({"n": [50], "s": [1.0]})
        res = run_bias_study(grid, 30, 14)
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        write_study_csv(p1, "bias", res)
        write_study_csv(p2, "bias", run_bias_study(grid, 30, 14, workers=2))
        assert p1.read_bytes() == p2.read_bytes()
        header = p1.read_text().splitlines()[0]
        assert header == (
            "study,n,s_true,error_family,skedasticity,covariate_mode,"
            "estimator,ci_method,statistic,value,mc_se,sims"
        )
