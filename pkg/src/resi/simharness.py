"""Monte Carlo studies of effect size estimator bias, CI coverage, and
test-statistic variance.

Scenarios simulate Y = b1 * x + eps with a binary covariate (probability
pi = 0.3 of a one), normal or shifted-gamma errors, homo- or hetero-
skedastic, with the covariate either fixed by design (ceil(n*pi) ones) or
redrawn Bernoulli each replicate.  b1 is calibrated so the effect size index
takes the requested true value.

Three test statistics are tracked per fit: 'oracle' uses the true error
variances on the realized design, 'parametric' the model-based covariance,
'robust' the sandwich covariance.

Study output is written as long-format CSV with the fixed column set
(study, n, s_true, error_family, skedasticity, covariate_mode, estimator,
ci_method, statistic, value, mc_se, sims); every run with the same seed
produces byte-identical CSV regardless of worker count, because each
replicate's stream is keyed by (seed, cell index, replicate index).
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import product

import numpy as np

from .ci import bootstrap_ci, ci_ncp_chisq, ci_ncp_f, parse_ci_method
from .distributions import ErrorDistSpec, make_stream, stream_key
from .errors import ResiError
from .linmodels import CovEstimate, Dataset, cov_model, cov_robust, fit_ols
from .wald import wald_stat

ESTIMATORS = ("oracle", "parametric", "robust")

CSV_COLUMNS = (
    "study",
    "n",
    "s_true",
    "error_family",
    "skedasticity",
    "covariate_mode",
    "estimator",
    "ci_method",
    "statistic",
    "value",
    "mc_se",
    "sims",
)

_HETERO_SDS = (0.5, 1.5)


@dataclass(frozen=True)
class ScenarioSpec:
    n: int
    s_true: float
    errors: ErrorDistSpec
    skedasticity: str  # 'homo' | 'hetero'
    covariate_mode: str  # 'fixed' | 'random'
    pi: float = 0.3

    def __post_init__(self):
        if self.skedasticity not in ("homo", "hetero"):
            raise ValueError(f"unknown skedasticity {self.skedasticity!r}")
        if self.covariate_mode not in ("fixed", "random"):
            raise ValueError(f"unknown covariate mode {self.covariate_mode!r}")
        if not 0.0 < self.pi < 1.0:
            raise ValueError(f"pi must lie in (0, 1), got {self.pi!r}")
        if self.n < 3:
            raise ValueError(f"n must be at least 3, got {self.n}")
        if self.s_true < 0.0:
            raise ValueError(f"s_true must be nonnegative, got {self.s_true}")
        if self.skedasticity == "homo" and self.errors.sd0 != self.errors.sd1:
            raise ValueError("homoskedastic scenarios need sd0 == sd1")
        if self.skedasticity == "hetero" and (self.errors.sd0, self.errors.sd1) != _HETERO_SDS:
            raise ValueError(f"heteroskedastic scenarios use sds {_HETERO_SDS}")


def make_scenario(
    n: int,
    s_true: float,
    family: str = "normal",
    skedasticity: str = "homo",
    covariate_mode: str = "fixed",
) -> ScenarioSpec:
    """Scenario with the standard error settings (homo sd 1; hetero 0.5/1.5)."""
    sd0, sd1 = (1.0, 1.0) if skedasticity == "homo" else _HETERO_SDS
    fam = "normal" if family == "normal" else "shifted-gamma"
    return ScenarioSpec(
        n=n,
        s_true=s_true,
        errors=ErrorDistSpec(family=fam, sd0=sd0, sd1=sd1),
        skedasticity=skedasticity,
        covariate_mode=covariate_mode,
    )


def slope_variance(scenario: ScenarioSpec) -> float:
    """Var(sqrt(n) * b1_hat) implied by the data-generating process.

    Two-group difference of means: sd1^2/pi + sd0^2/(1-pi); reduces to
    sd^2 / (pi (1-pi)) under homoskedasticity.  The gamma family has the same
    variances, so the same formula applies.
    """
    pi = scenario.pi
    return scenario.errors.sd1**2 / pi + scenario.errors.sd0**2 / (1.0 - pi)


def calibrate_beta1(scenario: ScenarioSpec) -> float:
    """Slope giving the scenario's true effect size: b1 = S * sqrt(V)."""
    return scenario.s_true * math.sqrt(slope_variance(scenario))


def oracle_cov(scenario: ScenarioSpec) -> CovEstimate:
    """Analytic covariance of sqrt(n) (theta_hat - theta) under the DGP.

    Uses the design parameter pi, not a realized covariate proportion.
    """
    pi = scenario.pi
    v00 = scenario.errors.sd0**2 / (1.0 - pi)
    v11 = scenario.errors.sd1**2 / pi + v00
    return CovEstimate(kind="oracle", matrix=np.array([[v00, -v00], [-v00, v11]]))


def oracle_cov_realized(scenario: ScenarioSpec, X: np.ndarray) -> CovEstimate:
    """True-parameter covariance on the realized design.

    The conditional covariance of sqrt(n) (theta_hat - theta) given X is
    (X'X/n)^-1 (X' diag(sd_i^2) X / n) (X'X/n)^-1 with the true per-group
    error variances; with a random covariate this is the covariance the
    'oracle' statistic must use for T^2 to stay non-central chi-squared
    conditionally.
    """
    n = X.shape[0]
    sd = np.where(X[:, 1] == 1.0, scenario.errors.sd1, scenario.errors.sd0)
    q = X.T @ X / n
    meat = X.T @ (X * (sd**2)[:, None]) / n
    qinv = np.linalg.inv(q)
    return CovEstimate(kind="oracle", matrix=qinv @ meat @ qinv)


def gen_scenario(scenario: ScenarioSpec, stream: np.random.Generator) -> Dataset:
    """One simulated dataset; consumes the stream (covariate first, then errors)."""
    n = scenario.n
    if scenario.covariate_mode == "fixed":
        k = math.ceil(n * scenario.pi)
        x = np.concatenate([np.ones(k), np.zeros(n - k)])
    else:
        x = (stream.random(n) < scenario.pi).astype(float)
    eps = scenario.errors.sample(x, stream)
    y = calibrate_beta1(scenario) * x + eps
    return Dataset(y, np.column_stack([np.ones(n), x]), tested=(1,), nuisance=(0,))


def _t2_by_estimator(scenario: ScenarioSpec, data: Dataset, estimators) -> dict[str, float]:
    fit = fit_ols(data)
    out = {}
    for est in estimators:
        if est == "oracle":
            cov = oracle_cov_realized(scenario, data.X)
        elif est == "parametric":
            cov = cov_model(fit)
        else:
            cov = cov_robust(fit)
        out[est] = wald_stat(fit, cov).t2
    return out


# ---------------------------------------------------------------------------
# study results and CSV output
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StudyResult:
    """Summaries for one (scenario, estimator, ci-method) cell."""

    scenario: ScenarioSpec
    estimator: str
    ci_method: str | None
    replicates: int
    failures: int = 0
    mean_s_hat: float | None = None
    bias: float | None = None
    bias_se: float | None = None
    coverage: float | None = None
    coverage_se: float | None = None
    var_t2: float | None = None
    var_t2_se: float | None = None
    var_theory: float | None = None

    def rows(self, study: str):
        sc = self.scenario
        base = (
            study,
            repr(sc.n),
            repr(float(sc.s_true)),
            sc.errors.family,
            sc.skedasticity,
            sc.covariate_mode,
            self.estimator,
            self.ci_method or "",
        )
        pairs = (
            ("mean_s_hat", self.mean_s_hat, self.bias_se),
            ("bias", self.bias, self.bias_se),
            ("coverage", self.coverage, self.coverage_se),
            ("var_t2", self.var_t2, self.var_t2_se),
            ("var_theory", self.var_theory, None),
        )
        for stat, value, se in pairs:
            if value is not None:
                yield base + (stat, repr(float(value)), "" if se is None else repr(float(se)), repr(self.replicates))


def write_study_csv(path, study: str, results: list[StudyResult]) -> None:
    """Long-format CSV; float fields use repr so reruns are byte-identical."""
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for res in results:
            for row in res.rows(study):
                fh.write(",".join(row) + "\n")


def _variance_se(values: np.ndarray) -> float:
    # SE of the sample variance from the fourth central moment
    n = len(values)
    centered = values - values.mean()
    m4 = np.mean(centered**4)
    s2 = np.var(values, ddof=1)
    return math.sqrt(max(0.0, m4 - s2**2 * (n - 3) / (n - 1)) / n)


# ---------------------------------------------------------------------------
# studies
# ---------------------------------------------------------------------------


def _bias_cell(args) -> list[StudyResult]:
    scenario, cell_index, sims, seed, estimators = args
    samples = {est: [] for est in estimators}
    failures = 0
    for r in range(sims):
        data = gen_scenario(scenario, make_stream(seed, cell_index, r))
        try:
            t2s = _t2_by_estimator(scenario, data, estimators)
        except (ResiError, np.linalg.LinAlgError):
            failures += 1
            continue
        for est, t2 in t2s.items():
            samples[est].append(math.sqrt(max(0.0, (t2 - 1.0) / scenario.n)))
    out = []
    for est in estimators:
        vals = np.asarray(samples[est])
        out.append(
            StudyResult(
                scenario=scenario,
                estimator=est,
                ci_method=None,
                replicates=len(vals),
                failures=failures,
                mean_s_hat=float(vals.mean()),
                bias=float(vals.mean() - scenario.s_true),
                bias_se=float(vals.std(ddof=1) / math.sqrt(len(vals))),
            )
        )
    return out


def _coverage_cell(args) -> list[StudyResult]:
    scenario, cell_index, sims, seed, estimators, ci_methods, boot_replicates, alpha = args
    hits = {(est, method): 0 for est in estimators for method in ci_methods}
    counts = {key: 0 for key in hits}
    for r in range(sims):
        data = gen_scenario(scenario, make_stream(seed, cell_index, r))
        try:
            t2s = _t2_by_estimator(scenario, data, estimators)
        except (ResiError, np.linalg.LinAlgError):
            continue
        for est in estimators:
            for method in ci_methods:
                try:
                    interval = _interval_for(
                        scenario, data, est, method, t2s[est], boot_replicates, alpha,
                        stream_key(seed, cell_index, r, "boot", est, method),
                    )
                except (ResiError, np.linalg.LinAlgError):
                    continue
                counts[(est, method)] += 1
                if interval.lower <= scenario.s_true <= interval.upper:
                    hits[(est, method)] += 1
    out = []
    for est in estimators:
        for method in ci_methods:
            n_ok = counts[(est, method)]
            cov = hits[(est, method)] / n_ok if n_ok else float("nan")
            out.append(
                StudyResult(
                    scenario=scenario,
                    estimator=est,
                    ci_method=method,
                    replicates=n_ok,
                    failures=sims - n_ok,
                    coverage=cov,
                    coverage_se=math.sqrt(cov * (1.0 - cov) / n_ok) if n_ok else None,
                )
            )
    return out


def _interval_for(scenario, data, estimator, method, t2, boot_replicates, alpha, key):
    m1 = len(data.tested)
    if method == "chisq":
        return ci_ncp_chisq(t2, m1, alpha, data.n).to_resi()
    if method == "f":
        return ci_ncp_f(t2, m1, data.n - data.m, alpha, data.n).to_resi()
    spec = parse_ci_method(method, boot_replicates, key)
    cov_kind = {"oracle": "oracle", "parametric": "model", "robust": "robust"}[estimator]
    return bootstrap_ci(
        data,
        "gaussian",
        data.tested,
        cov_kind,
        spec,
        alpha,
        oracle_cov=(lambda ds: oracle_cov_realized(scenario, ds.X)) if estimator == "oracle" else None,
    )


def _variance_cell(args) -> list[StudyResult]:
    scenario, cell_index, sims, seed, estimators = args
    from .distributions import NoncentralChiSq, NoncentralF, theoretical_moments

    samples = {est: [] for est in estimators}
    for r in range(sims):
        data = gen_scenario(scenario, make_stream(seed, cell_index, r))
        try:
            t2s = _t2_by_estimator(scenario, data, estimators)
        except (ResiError, np.linalg.LinAlgError):
            continue
        for est, t2 in t2s.items():
            samples[est].append(t2)
    ncp = scenario.n * scenario.s_true**2
    theory = {
        "oracle": theoretical_moments(NoncentralChiSq(1, ncp))[1],
        "parametric": theoretical_moments(NoncentralF(1, scenario.n - 2, ncp))[1],
    }
    out = []
    for est in estimators:
        vals = np.asarray(samples[est])
        out.append(
            StudyResult(
                scenario=scenario,
                estimator=est,
                ci_method=None,
                replicates=len(vals),
                var_t2=float(np.var(vals, ddof=1)),
                var_t2_se=_variance_se(vals),
                var_theory=theory.get(est),
            )
        )
    return out


def _run_cells(fn, tasks, workers: int):
    if workers <= 1:
        chunks = [fn(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(fn, tasks))
    return [res for chunk in chunks for res in chunk]


def run_bias_study(
    grid: list[ScenarioSpec], sims: int, seed, estimators=ESTIMATORS, workers: int = 1
) -> list[StudyResult]:
    """Mean and bias of each estimator's effect size over the grid."""
    tasks = [(sc, ci, sims, seed, tuple(estimators)) for ci, sc in enumerate(grid)]
    return _run_cells(_bias_cell, tasks, workers)


def run_coverage_study(
    grid: list[ScenarioSpec],
    sims: int,
    ci_methods,
    seed,
    estimators=ESTIMATORS,
    boot_replicates: int = 1000,
    workers: int = 1,
    alpha: float = 0.05,
) -> list[StudyResult]:
    """Fraction of CIs covering the true effect size, per estimator and method."""
    for method in ci_methods:  # validate method names up front
        parse_ci_method(method, boot_replicates, 0)
    tasks = [
        (sc, ci, sims, seed, tuple(estimators), tuple(ci_methods), boot_replicates, alpha)
        for ci, sc in enumerate(grid)
    ]
    return _run_cells(_coverage_cell, tasks, workers)


def run_variance_study(
    ns,
    s_true: float,
    covariate_mode: str,
    sims: int,
    seed,
    estimators=ESTIMATORS,
    workers: int = 1,
    family: str = "normal",
    skedasticity: str = "homo",
) -> list[StudyResult]:
    """Simulated Var(T^2) per estimator with the chi-squared / F theory lines."""
    grid = [make_scenario(n, s_true, family, skedasticity, covariate_mode) for n in ns]
    tasks = [(sc, ci, sims, seed, tuple(estimators)) for ci, sc in enumerate(grid)]
    return _run_cells(_variance_cell, tasks, workers)


def build_grid(config: dict) -> list[ScenarioSpec]:
    """Scenario grid from a parsed config mapping.

    Recognized keys (all optional): n, s, family, skedasticity, covariate;
    scalars or lists.  The grid is the cartesian product in that key order.
    """
    def as_list(key, default):
        v = config.get(key, default)
        return list(v) if isinstance(v, (list, tuple)) else [v]

    return [
        make_scenario(int(n), float(s), family, sked, mode)
        for n, s, family, sked, mode in product(
            as_list("n", [50, 500]),
            as_list("s", [0.0, 1.0]),
            as_list("family", ["normal"]),
            as_list("skedasticity", ["homo"]),
            as_list("covariate", ["fixed"]),
        )
    ]
