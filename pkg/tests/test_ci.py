"""NCP-inversion intervals and the bootstrap family.

Interval fixed points are checked against the CDFs themselves; resampling
mechanics are checked by multiset membership of the resampled values; the
slow coverage check at the bottom validates the nonparametric bootstrap
against its nominal level on a heteroskedastic scenario.
"""

import math

import numpy as np
import pytest

from resi.ci import (
    BootstrapSpec,
    NcpInterval,
    admissible_specs,
    bootstrap_ci,
    ci_ncp_chisq,
    ci_ncp_f,
    parse_ci_method,
    percentile_bounds,
    resample,
)
from resi.distributions import make_stream, ncf_cdf, ncx2_cdf
from resi.errors import InvalidSpecError
from resi.linmodels import Dataset, fit_ols


def _binary_dataset(n=80, n_ones=24, beta1=1.0, seed=7):
    rng = make_stream(seed)
    x = np.concatenate([np.ones(n_ones), np.zeros(n - n_ones)])
    y = beta1 * x + rng.standard_normal(n)
    return Dataset(y, np.column_stack([np.ones(n), x]), tested=(1,), nuisance=(0,))


class TestNcpInversionChisq:
    def test_zero_statistic_gives_degenerate_interval(self):
        iv = ci_ncp_chisq(0.0, 1, 0.05, 100)
        assert (iv.lower, iv.upper) == (0.0, 0.0)

    def test_lower_clamps_when_central_cdf_below_target(self):
        # central chi2_1 CDF at 0.5 is erf(sqrt(0.25)) = 0.5205 < 0.975
        assert math.erf(0.5) < 0.975
        iv = ci_ncp_chisq(0.5, 1, 0.05, 100)
        assert iv.lower == 0.0
        assert iv.upper > 0.0

    def test_interior_bounds_satisfy_defining_equalities(self):
        iv = ci_ncp_chisq(25.0, 2, 0.05, 200)
        assert ncx2_cdf(25.0, 2, iv.lower) == pytest.approx(0.975, abs=1e-6)
        assert ncx2_cdf(25.0, 2, iv.upper) == pytest.approx(0.025, abs=1e-6)

    def test_resi_scale_is_sqrt_ncp_over_n(self):
        iv = ci_ncp_chisq(25.0, 2, 0.05, 200)
        r = iv.to_resi()
        assert r.lower == math.sqrt(iv.lower / 200)
        assert r.upper == math.sqrt(iv.upper / 200)
        assert r.scale == "resi"

    def test_deterministic(self):
        a = ci_ncp_chisq(17.3, 1, 0.1, 150)
        b = ci_ncp_chisq(17.3, 1, 0.1, 150)
        assert (a.lower, a.upper) == (b.lower, b.upper)

    def test_alpha_validation(self):
        with pytest.raises(ValueError):
            ci_ncp_chisq(5.0, 1, 0.0, 100)
        with pytest.raises(ValueError):
            ci_ncp_chisq(5.0, 1, 1.0, 100)


class TestNcpInversionF:
    def test_zero_statistic(self):
        iv = ci_ncp_f(0.0, 2, 50, 0.05, 60)
        assert (iv.lower, iv.upper) == (0.0, 0.0)

    def test_interior_fixed_points_use_ratio_statistic(self):
        t2 = 30.0
        iv = ci_ncp_f(t2, 3, 90, 0.05, 94)
        assert ncf_cdf(t2 / 3, 3, 90, iv.lower) == pytest.approx(0.975, abs=1e-6)
        assert ncf_cdf(t2 / 3, 3, 90, iv.upper) == pytest.approx(0.025, abs=1e-6)

    def test_matches_chisq_for_huge_df2(self):
        c = ci_ncp_chisq(20.0, 1, 0.05, 400)
        f = ci_ncp_f(20.0, 1, 10**6, 0.05, 400)
        assert f.lower == pytest.approx(c.lower, abs=1e-3)
        assert f.upper == pytest.approx(c.upper, abs=1e-3)

    def test_f_interval_wider_than_chisq(self):
        # estimating the denominator variance stretches the upper bound
        c = ci_ncp_chisq(20.0, 1, 0.05, 60)
        f = ci_ncp_f(20.0, 1, 58, 0.05, 60)
        assert f.upper > c.upper


class TestNcpInterval:
    def test_bound_ordering_enforced(self):
        with pytest.raises(ValueError):
            NcpInterval(lower=2.0, upper=1.0, level=0.95, scale="ncp", n=10)
        with pytest.raises(ValueError):
            NcpInterval(lower=0.0, upper=1.0, level=0.95, scale="log", n=10)


class TestBootstrapSpec:
    def test_exactly_twelve_admissible_procedures(self):
        specs = admissible_specs()
        assert len(specs) == 12
        combos = {(s.scheme, s.multiplier) for s in specs}
        assert ("nonparametric", "none") in combos
        assert ("wild-original", "none") not in combos
        assert ("wild-original", "rademacher") in combos
        # 3 resampling wild schemes x 3 multipliers + 2 original + nonparametric
        assert len(combos) == 12

    def test_inadmissible_combinations_rejected(self):
        with pytest.raises(InvalidSpecError):
            BootstrapSpec("wild-original", "none")
        with pytest.raises(InvalidSpecError):
            BootstrapSpec("nonparametric", "rademacher")
        with pytest.raises(InvalidSpecError):
            BootstrapSpec("bayesian", "none")

    def test_parse_ci_method(self):
        assert parse_ci_method("chisq", 100, 0) is None
        spec = parse_ci_method("wild:fixed-x:rademacher", 100, 3)
        assert (spec.scheme, spec.multiplier) == ("wild-fixed-x", "rademacher")
        with pytest.raises(ValueError):
            parse_ci_method("jackknife", 100, 0)


class TestResample:
    def test_wild_original_identity_with_unit_multiplier(self):
        # the excluded (original, none) combination reconstructs y exactly
        ds = _binary_dataset()
        fit = fit_ols(ds)
        assert np.allclose(fit.fitted + fit.residuals * 1.0, ds.y, atol=1e-12)

    def test_wild_fixed_x_permutes_residuals(self):
        ds = _binary_dataset()
        fit = fit_ols(ds)
        spec = BootstrapSpec("wild-fixed-x", "none", replicates=10, seed=3)
        new = resample(ds, fit, spec, replicate_index=2)
        assert new.X is ds.X
        shifts = new.y - fit.fitted
        pool = set(np.round(fit.residuals, 12))
        assert all(round(v, 12) in pool for v in shifts)

    def test_nonparametric_rows_come_from_original(self):
        ds = _binary_dataset()
        spec = BootstrapSpec("nonparametric", replicates=10, seed=4)
        new = resample(ds, fit_ols(ds), spec, replicate_index=0)
        originals = {(round(y, 12), x) for y, x in zip(ds.y, ds.X[:, 1])}
        assert all((round(y, 12), x) in originals for y, x in zip(new.y, new.X[:, 1]))

    def test_wild_joint_resample_keeps_row_pairing(self):
        # one operator on both terms: with no multiplier this reproduces the
        # nonparametric bootstrap, (y, x) rows drawn together
        ds = _binary_dataset()
        fit = fit_ols(ds)
        spec = BootstrapSpec("wild-joint-resample", "none", replicates=10, seed=5)
        new = resample(ds, fit, spec, replicate_index=1)
        originals = {(round(y, 12), x) for y, x in zip(ds.y, ds.X[:, 1])}
        assert all((round(y, 12), x) in originals for y, x in zip(new.y, new.X[:, 1]))

    def test_wild_independent_breaks_row_pairing(self):
        ds = _binary_dataset()
        fit = fit_ols(ds)
        joint = resample(ds, fit, BootstrapSpec("wild-joint-resample", "none", 10, 6), 0)
        indep = resample(ds, fit, BootstrapSpec("wild-independent", "none", 10, 6), 0)
        assert not np.array_equal(joint.y, indep.y)
        # covariate rows still come from the original design
        assert set(np.unique(indep.X[:, 1])) <= set(np.unique(ds.X[:, 1]))

    def test_deterministic_by_replicate_index(self):
        ds = _binary_dataset()
        fit = fit_ols(ds)
        spec = BootstrapSpec("wild-fixed-x", "rademacher", replicates=10, seed=8)
        a = resample(ds, fit, spec, replicate_index=3).y
        _ = resample(ds, fit, spec, replicate_index=1)
        b = resample(ds, fit, spec, replicate_index=3).y
        assert np.array_equal(a, b)


class TestPercentileBounds:
    def test_rank_convention(self):
        # R = 1000, alpha = 0.05: ranks ceil(25) = 25 and ceil(975) = 975
        values = np.arange(1.0, 1001.0)
        lo, hi = percentile_bounds(values, 0.05)
        assert (lo, hi) == (25.0, 975.0)

    def test_small_r(self):
        # ranks ceil(0.25 * 3) = 1 and ceil(0.75 * 3) = 3
        lo, hi = percentile_bounds(np.array([3.0, 1.0, 2.0]), 0.5)
        assert (lo, hi) == (1.0, 3.0)


class TestBootstrapCi:
    def test_constant_outcome_gives_degenerate_interval(self):
        n = 60
        x = np.concatenate([np.ones(20), np.zeros(40)])
        ds = Dataset(np.full(n, 3.7), np.column_stack([np.ones(n), x]), (1,), (0,))
        spec = BootstrapSpec("nonparametric", replicates=200, seed=1)
        iv = bootstrap_ci(ds, "gaussian", (1,), "robust", spec)
        assert (iv.lower, iv.upper) == (0.0, 0.0)

    def test_identical_spec_gives_identical_interval(self):
        ds = _binary_dataset(beta1=2.0)
        spec = BootstrapSpec("wild-fixed-x", "rademacher", replicates=300, seed=9)
        a = bootstrap_ci(ds, "gaussian", (1,), "robust", spec)
        b = bootstrap_ci(ds, "gaussian", (1,), "robust", spec)
        assert (a.lower, a.upper) == (b.lower, b.upper)
        assert a.scale == "resi" and a.n == ds.n

    def test_interval_brackets_point_estimate(self):
        from resi.linmodels import cov_robust
        from resi.wald import resi_point, wald_stat

        ds = _binary_dataset(n=200, n_ones=60, beta1=2.0, seed=11)
        fit = fit_ols(ds)
        s_hat = resi_point(wald_stat(fit, cov_robust(fit))).s_hat
        spec = BootstrapSpec("nonparametric", replicates=400, seed=12)
        iv = bootstrap_ci(ds, "gaussian", (1,), "robust", spec)
        assert iv.lower < s_hat < iv.upper

    def test_oracle_kind_needs_callable(self):
        ds = _binary_dataset()
        spec = BootstrapSpec("nonparametric", replicates=10, seed=0)
        with pytest.raises(ValueError):
            bootstrap_ci(ds, "gaussian", (1,), "oracle", spec)


@pytest.mark.slow
def test_nonparametric_bootstrap_nominal_coverage_heteroskedastic():
    """Robust-estimator percentile bootstrap holds its level under
    heteroskedasticity with a random covariate (n=500, S=0.66)."""
    from resi.simharness import make_scenario, run_coverage_study

    grid = [make_scenario(500, 0.66, "normal", "hetero", "random")]
    res = run_coverage_study(
        grid, 500, ["nonparametric"], 20250809, estimators=("robust",), boot_replicates=500
    )[0]
    assert res.coverage == pytest.approx(0.95, abs=0.02)
