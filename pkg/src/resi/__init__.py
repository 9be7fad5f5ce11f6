"""Robust effect size index: estimation, confidence intervals, simulation
studies, and analysis-of-effect-sizes tables."""

from .anoes import AnoesTable, anoes_table, load_csv, to_csv_text, to_json_text, to_text
from .ci import (
    BootstrapSpec,
    NcpInterval,
    admissible_specs,
    bootstrap_ci,
    ci_ncp_chisq,
    ci_ncp_f,
    resample,
)
from .distributions import (
    Bernoulli,
    ConstantOne,
    ErrorDistSpec,
    Normal,
    NoncentralChiSq,
    NoncentralF,
    Rademacher,
    ShiftedGamma,
    draw,
    make_stream,
    ncf_cdf,
    ncx2_cdf,
    theoretical_moments,
)
from .linmodels import CovEstimate, Dataset, FitResult, cov_model, cov_robust, fit_glm_binomial, fit_ols
from .simharness import (
    ScenarioSpec,
    StudyResult,
    calibrate_beta1,
    gen_scenario,
    make_scenario,
    oracle_cov,
    oracle_cov_realized,
    run_bias_study,
    run_coverage_study,
    run_variance_study,
    write_study_csv,
)
from .wald import ResiEstimate, WaldResult, resi_full_vs_reduced, resi_point, wald_stat

__version__ = "0.1.0"
