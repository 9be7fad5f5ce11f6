"""Confidence intervals for the effect size index.

Two routes: inversion of the non-central chi-squared / F CDFs over the
non-centrality parameter, and percentile bootstrap over refitted effect size
estimates (the nonparametric scheme plus the wild-bootstrap family).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .distributions import make_stream, ncf_cdf, ncx2_cdf
from .errors import (
    BootstrapFailureError,
    InvalidSpecError,
    NumericalError,
    ResiError,
)
from .linmodels import CovEstimate, Dataset, FitResult, cov_model, cov_robust, fit_glm_binomial, fit_ols
from .wald import resi_point, wald_stat

_NCP_TOL = 1e-8

SCHEMES = ("nonparametric", "wild-original", "wild-joint-resample", "wild-fixed-x", "wild-independent")
MULTIPLIERS = ("none", "rademacher", "normal")


@dataclass(frozen=True)
class NcpInterval:
    """Central interval for the NCP, or for the effect size sqrt(ncp/n)."""

    lower: float
    upper: float
    level: float
    scale: str  # 'ncp' | 'resi'
    n: int

    def __post_init__(self):
        if self.scale not in ("ncp", "resi"):
            raise ValueError(f"scale must be 'ncp' or 'resi', got {self.scale!r}")
        if not 0.0 <= self.lower <= self.upper:
            raise ValueError(f"bounds must satisfy 0 <= lower <= upper, got ({self.lower}, {self.upper})")

    def to_resi(self) -> "NcpInterval":
        if self.scale == "resi":
            return self
        return NcpInterval(
            lower=math.sqrt(self.lower / self.n),
            upper=math.sqrt(self.upper / self.n),
            level=self.level,
            scale="resi",
            n=self.n,
        )


def _invert_ncp(cdf_at: Callable[[float], float], target: float, t2_obs: float) -> float:
    """Solve cdf_at(ncp) = target for the (strictly decreasing) ncp map.

    Returns 0 when even ncp = 0 puts the CDF at or below the target (the
    zero-clamp convention).  Bracket: start the upper end at t2 + 4
    sqrt(2 t2) + 10 and double until the CDF falls below the target, then
    bisect to an absolute ncp tolerance of 1e-8.
    """
    if cdf_at(0.0) <= target:
        return 0.0
    lo = 0.0
    hi = t2_obs + 4.0 * math.sqrt(2.0 * t2_obs) + 10.0
    for _ in range(200):
        if cdf_at(hi) < target:
            break
        lo = hi
        hi *= 2.0
    else:
        raise NumericalError(f"could not bracket the NCP bound (target={target})")
    while hi - lo > _NCP_TOL:
        mid = 0.5 * (lo + hi)
        if cdf_at(mid) > target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _validate_ci_args(t2_obs: float, alpha: float):
    if not (math.isfinite(t2_obs) and t2_obs >= 0.0):
        raise ValueError(f"t2_obs must be finite and nonnegative, got {t2_obs!r}")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")


def ci_ncp_chisq(t2_obs: float, m1: int, alpha: float, n: int) -> NcpInterval:
    """Chi-squared NCP interval: bounds solve F(t2; m1, ncp) = 1 - a/2 and a/2."""
    _validate_ci_args(t2_obs, alpha)
    lower = _invert_ncp(lambda lam: ncx2_cdf(t2_obs, m1, lam), 1.0 - alpha / 2.0, t2_obs)
    upper = _invert_ncp(lambda lam: ncx2_cdf(t2_obs, m1, lam), alpha / 2.0, t2_obs)
    return NcpInterval(lower=lower, upper=upper, level=1.0 - alpha, scale="ncp", n=int(n))


def ci_ncp_f(t2_obs: float, m1: int, df2: int, alpha: float, n: int) -> NcpInterval:
    """F-distribution NCP interval; the CDF sees the ratio statistic t2/m1."""
    _validate_ci_args(t2_obs, alpha)
    x = t2_obs / m1
    lower = _invert_ncp(lambda lam: ncf_cdf(x, m1, df2, lam), 1.0 - alpha / 2.0, t2_obs)
    upper = _invert_ncp(lambda lam: ncf_cdf(x, m1, df2, lam), alpha / 2.0, t2_obs)
    return NcpInterval(lower=lower, upper=upper, level=1.0 - alpha, scale="ncp", n=int(n))


# ---------------------------------------------------------------------------
# bootstrap
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BootstrapSpec:
    """One of the 12 admissible resampling procedures.

    ``scheme`` picks what is resampled; ``multiplier`` the wild multiplier
    distribution.  The original wild scheme with no multiplier reconstructs
    the data exactly, so it is rejected; the nonparametric scheme resamples
    (y, x) rows jointly and takes no multiplier.
    """

    scheme: str
    multiplier: str = "none"
    replicates: int = 1000
    seed: int | tuple = 0

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise InvalidSpecError(f"unknown scheme {self.scheme!r}")
        if self.multiplier not in MULTIPLIERS:
            raise InvalidSpecError(f"unknown multiplier {self.multiplier!r}")
        if self.scheme == "wild-original" and self.multiplier == "none":
            raise InvalidSpecError("wild-original with no multiplier performs no resampling")
        if self.scheme == "nonparametric" and self.multiplier != "none":
            raise InvalidSpecError("the nonparametric bootstrap takes no multiplier")
        if self.replicates < 1:
            raise InvalidSpecError(f"replicates must be >= 1, got {self.replicates}")


def admissible_specs(replicates: int = 1000, seed=0) -> list[BootstrapSpec]:
    """All admissible scheme x multiplier combinations (exactly 12)."""
    out = []
    for scheme in SCHEMES:
        for multiplier in MULTIPLIERS:
            try:
                out.append(BootstrapSpec(scheme, multiplier, replicates, seed))
            except InvalidSpecError:
                continue
    return out


def parse_ci_method(method: str, replicates: int, seed) -> BootstrapSpec | None:
    """None for the inversion methods; a BootstrapSpec for resampling ones.

    Accepted names: 'chisq', 'f', 'nonparametric', and
    'wild:<scheme>:<multiplier>' (scheme with or without the 'wild-' prefix).
    """
    if method in ("chisq", "f"):
        return None
    if method == "nonparametric":
        return BootstrapSpec("nonparametric", "none", replicates, seed)
    if method.startswith("wild:"):
        _, scheme, multiplier = method.split(":")
        if not scheme.startswith("wild-"):
            scheme = "wild-" + scheme
        return BootstrapSpec(scheme, multiplier, replicates, seed)
    raise ValueError(f"unknown ci method {method!r}")


def _multiplier_values(spec: BootstrapSpec, n: int, rng: np.random.Generator):
    if spec.multiplier == "none":
        return 1.0
    if spec.multiplier == "rademacher":
        return np.where(rng.random(n) < 0.5, -1.0, 1.0)
    return rng.standard_normal(n)


def resample(
    data: Dataset,
    fit: FitResult,
    spec: BootstrapSpec,
    replicate_index: int = 0,
    rng: np.random.Generator | None = None,
) -> Dataset:
    """One resampled dataset under ``spec``.

    Row resampling draws index multisets with replacement; multipliers are
    drawn after the indices.  The covariate-resampling schemes (joint,
    independent, nonparametric) carry the drawn design rows into the new
    dataset; the original and fixed-x schemes keep the design at its sample
    values.  Deterministic given (spec.seed, replicate_index).
    """
    if rng is None:
        rng = make_stream(spec.seed, replicate_index)
    n = data.n
    if spec.scheme == "nonparametric":
        return data.with_rows(rng.integers(0, n, n))
    if spec.scheme == "wild-original":
        w = _multiplier_values(spec, n, rng)
        return data.with_outcome(fit.fitted + fit.residuals * w)
    if spec.scheme == "wild-joint-resample":
        idx = rng.integers(0, n, n)
        w = _multiplier_values(spec, n, rng)
        return data.with_data(fit.fitted[idx] + fit.residuals[idx] * w, data.X[idx])
    if spec.scheme == "wild-fixed-x":
        idx = rng.integers(0, n, n)
        w = _multiplier_values(spec, n, rng)
        return data.with_outcome(fit.fitted + fit.residuals[idx] * w)
    # wild-independent
    idx1 = rng.integers(0, n, n)
    idx2 = rng.integers(0, n, n)
    w = _multiplier_values(spec, n, rng)
    return data.with_data(fit.fitted[idx1] + fit.residuals[idx2] * w, data.X[idx1])


def _fit_family(data: Dataset, family: str) -> FitResult:
    if family == "gaussian":
        return fit_ols(data)
    if family == "binomial":
        return fit_glm_binomial(data)
    raise ValueError(f"family must be 'gaussian' or 'binomial', got {family!r}")


def _cov_for(fit: FitResult, cov_kind: str, oracle_cov) -> CovEstimate:
    if cov_kind == "model":
        return cov_model(fit)
    if cov_kind == "robust":
        return cov_robust(fit)
    if cov_kind == "oracle":
        if oracle_cov is None:
            raise ValueError("cov_kind='oracle' needs an oracle_cov callable")
        return oracle_cov(fit.dataset)
    raise ValueError(f"unknown cov_kind {cov_kind!r}")


def percentile_bounds(values: np.ndarray, alpha: float) -> tuple[float, float]:
    """Order statistics at ranks ceil(a/2 R) and ceil((1-a/2) R), 1-indexed."""
    values = np.sort(np.asarray(values, dtype=float))
    r = len(values)
    k_lo = max(1, math.ceil(alpha / 2.0 * r))
    k_hi = max(1, math.ceil((1.0 - alpha / 2.0) * r))
    return float(values[k_lo - 1]), float(values[k_hi - 1])


def bootstrap_resi_values(
    data: Dataset,
    family: str,
    tested: tuple[int, ...],
    cov_kind: str,
    spec: BootstrapSpec,
    oracle_cov: Callable[[Dataset], CovEstimate] | None = None,
) -> np.ndarray:
    """Effect size estimates from ``spec.replicates`` resampled refits.

    Replicates whose refit fails are dropped; more than 1% of them failing
    raises ``BootstrapFailureError``.  Each replicate uses its own stream
    keyed by (spec.seed, replicate index), so results do not depend on
    execution order.
    """
    if cov_kind not in ("model", "robust", "oracle"):
        raise ValueError(f"unknown cov_kind {cov_kind!r}")
    if cov_kind == "oracle" and oracle_cov is None:
        raise ValueError("cov_kind='oracle' needs an oracle_cov callable")
    base = _fit_family(data, family)
    values = []
    failures = 0
    for b in range(spec.replicates):
        ds = resample(data, base, spec, replicate_index=b)
        try:
            refit = _fit_family(ds, family)
            cov = _cov_for(refit, cov_kind, oracle_cov)
            values.append(resi_point(wald_stat(refit, cov, tested=tested)).s_hat)
        except (ResiError, ValueError, np.linalg.LinAlgError):
            failures += 1
    if failures > 0.01 * spec.replicates:
        raise BootstrapFailureError(failures, spec.replicates)
    return np.asarray(values)


def bootstrap_ci(
    data: Dataset,
    family: str,
    tested: tuple[int, ...],
    cov_kind: str,
    spec: BootstrapSpec,
    alpha: float = 0.05,
    oracle_cov: Callable[[Dataset], CovEstimate] | None = None,
) -> NcpInterval:
    """Percentile bootstrap interval for the effect size index (resi scale)."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
    values = bootstrap_resi_values(data, family, tested, cov_kind, spec, oracle_cov)
    lo, hi = percentile_bounds(values, alpha)
    return NcpInterval(lower=lo, upper=hi, level=1.0 - alpha, scale="resi", n=data.n)
