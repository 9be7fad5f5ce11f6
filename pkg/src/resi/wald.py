"""Wald statistics and the robust effect size index derived from them."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NestingError, SingularCovarianceError
from .linmodels import CovEstimate, FitResult, cov_model, cov_robust


@dataclass(frozen=True)
class WaldResult:
    t2: float
    m1: int
    n: int
    cov_kind: str
    beta0: np.ndarray


@dataclass(frozen=True)
class ResiEstimate:
    """Effect size index point estimate sqrt(max(0, (T^2 - m1) / n))."""

    s_hat: float
    source: WaldResult


def wald_stat(
    fit: FitResult,
    cov: CovEstimate,
    tested: tuple[int, ...] | None = None,
    beta0: np.ndarray | None = None,
) -> WaldResult:
    """T^2 = n (b - b0)' S^-1 (b - b0) over the tested block of ``cov``.

    ``tested`` defaults to the dataset's tested columns; ``beta0`` defaults to
    zero.  A singular tested block raises unless the deviation is exactly
    zero, in which case the quadratic form is zero by continuity.
    """
    data = fit.dataset
    tested = data.tested if tested is None else tuple(int(j) for j in tested)
    if not tested:
        raise ValueError("tested index set must be nonempty")
    if beta0 is None:
        beta0 = np.zeros(len(tested))
    else:
        beta0 = np.asarray(beta0, dtype=float)
        if beta0.shape != (len(tested),):
            raise ValueError(f"beta0 must have length {len(tested)}")
    dev = fit.coefficients[list(tested)] - beta0
    # rounding-level deviations must test as exact nulls: a perfectly fit
    # outcome otherwise divides solver noise by a noise-level covariance
    tol = 32.0 * np.finfo(float).eps * max(
        float(np.max(np.abs(fit.coefficients))), float(np.max(np.abs(beta0)))
    )
    dev[np.abs(dev) <= tol] = 0.0
    sub = cov.tested_block(tested)
    if len(tested) == 1:
        if sub[0, 0] > 0.0:
            t2 = data.n * dev[0] ** 2 / sub[0, 0]
        elif dev[0] == 0.0:
            t2 = 0.0
        else:
            raise SingularCovarianceError(
                f"tested sub-block of the {cov.kind} covariance is singular"
            )
    else:
        try:
            t2 = data.n * float(dev @ np.linalg.solve(sub, dev))
        except np.linalg.LinAlgError:
            if np.all(dev == 0.0):
                t2 = 0.0
            else:
                raise SingularCovarianceError(
                    f"tested sub-block of the {cov.kind} covariance is singular"
                ) from None
    return WaldResult(t2=max(0.0, t2), m1=len(tested), n=data.n, cov_kind=cov.kind, beta0=beta0)


def resi_point(w: WaldResult) -> ResiEstimate:
    """Map a Wald statistic to the (truncated-at-zero) effect size index."""
    return ResiEstimate(s_hat=math.sqrt(max(0.0, (w.t2 - w.m1) / w.n)), source=w)


def _match_columns(full: FitResult, reduced: FitResult) -> tuple[int, ...]:
    """Indices of full-model columns absent from the reduced model."""
    if not np.array_equal(full.dataset.y, reduced.dataset.y):
        raise NestingError("full and reduced models must share the outcome vector")
    Xf, Xr = full.dataset.X, reduced.dataset.X
    used_full = set()
    for j in range(Xr.shape[1]):
        hit = next(
            (k for k in range(Xf.shape[1]) if k not in used_full and np.array_equal(Xr[:, j], Xf[:, k])),
            None,
        )
        if hit is None:
            raise NestingError(f"reduced-model column {j} does not appear in the full model")
        used_full.add(hit)
    extra = tuple(k for k in range((Xf.shape[1])) if k not in used_full)
    if not extra:
        raise NestingError("reduced model must be a strict subset of the full model")
    return extra


def resi_full_vs_reduced(full: FitResult, reduced: FitResult, cov_kind: str = "robust") -> ResiEstimate:
    """Effect size of the full model's extra coefficients over the reduced model.

    Wald-tests the columns present in the full model but not the reduced one
    (jointly, against zero) under the requested covariance kind.
    """
    extra = _match_columns(full, reduced)
    if cov_kind == "robust":
        cov = cov_robust(full)
    elif cov_kind == "model":
        cov = cov_model(full)
    else:
        raise ValueError(f"cov_kind must be 'model' or 'robust', got {cov_kind!r}")
    return resi_point(wald_stat(full, cov, tested=extra))
