"""OLS and binomial-GLM fitting with model-based and sandwich covariances.

All covariance estimates are scaled as covariances of sqrt(n) * (theta_hat -
theta), which is the normalization the Wald statistic expects.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConvergenceError,
    DegenerateLeverageError,
    SingularDesignError,
)

_RANK_RTOL = 1e-10
_GLM_TOL = 1e-8
_GLM_MAX_ITER = 25
_GLM_DIVERGENCE = 30.0


@dataclass(frozen=True)
class Dataset:
    """Outcome, design matrix, and the tested/nuisance column split.

    By convention the first column of ``X`` is an all-ones intercept.  The
    ``tested`` columns carry the effect under test; the remaining columns are
    nuisance.
    """

    y: np.ndarray
    X: np.ndarray
    tested: tuple[int, ...]
    nuisance: tuple[int, ...]

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float)
        X = np.asarray(self.X, dtype=float)
        if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
            raise ValueError(f"shape mismatch: y {y.shape}, X {X.shape}")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "tested", tuple(int(j) for j in self.tested))
        object.__setattr__(self, "nuisance", tuple(int(j) for j in self.nuisance))
        n, m = X.shape
        if n <= m:
            raise ValueError(f"need more rows than columns, got n={n}, m={m}")
        cols = set(self.tested) | set(self.nuisance)
        if set(self.tested) & set(self.nuisance):
            raise ValueError("tested and nuisance column sets overlap")
        if cols != set(range(m)) or not self.tested:
            raise ValueError("tested and nuisance must partition the columns, with tested nonempty")

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def m(self) -> int:
        return self.X.shape[1]

    def with_data(self, y: np.ndarray, X: np.ndarray) -> "Dataset":
        """Copy with replaced values but the same column partition.

        Skips shape/partition validation: resampling preserves both, and this
        sits on the bootstrap hot path.
        """
        obj = object.__new__(Dataset)
        object.__setattr__(obj, "y", y)
        object.__setattr__(obj, "X", X)
        object.__setattr__(obj, "tested", self.tested)
        object.__setattr__(obj, "nuisance", self.nuisance)
        return obj

    def with_rows(self, idx: np.ndarray) -> "Dataset":
        """Row-resampled copy (same column partition)."""
        return self.with_data(self.y[idx], self.X[idx])

    def with_outcome(self, y: np.ndarray) -> "Dataset":
        """Same design, new outcome vector."""
        return self.with_data(np.asarray(y, dtype=float), self.X)


@dataclass
class FitResult:
    family: str  # 'gaussian' | 'binomial'
    coefficients: np.ndarray
    residuals: np.ndarray
    hat_diag: np.ndarray
    fitted: np.ndarray
    sigma2_hat: float | None
    converged: bool
    iterations: int
    dataset: Dataset
    # upper-triangular factor of the (weighted) design, kept for covariance work
    _r_factor: np.ndarray = field(repr=False, default=None)


@dataclass
class CovEstimate:
    """Covariance estimate for sqrt(n) * (theta_hat - theta)."""

    kind: str  # 'oracle' | 'model' | 'robust'
    matrix: np.ndarray
    bread: np.ndarray | None = None
    meat: np.ndarray | None = None

    def tested_block(self, tested: tuple[int, ...]) -> np.ndarray:
        idx = np.asarray(tested, dtype=int)
        return self.matrix[np.ix_(idx, idx)]


def _checked_qr(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Reduced QR with a rank check on the R diagonal.

    Without pivoting, the first column that is numerically dependent on its
    predecessors produces the small diagonal entry, so the reported index
    names the offending column.
    """
    Q, R = np.linalg.qr(X)
    d = np.abs(np.diag(R))
    bad = d <= _RANK_RTOL * d.max()
    if bad.any():
        raise SingularDesignError(int(np.argmax(bad)))
    return Q, R


def fit_ols(data: Dataset) -> FitResult:
    """Ordinary least squares via QR.

    Populates residuals, hat diagonals, and the residual-variance estimate
    sigma2_hat = RSS / (n - m).
    """
    Q, R = _checked_qr(data.X)
    beta = np.linalg.solve(R, Q.T @ data.y)
    fitted = data.X @ beta
    resid = data.y - fitted
    n, m = data.X.shape
    return FitResult(
        family="gaussian",
        coefficients=beta,
        residuals=resid,
        hat_diag=np.einsum("ij,ij->i", Q, Q),
        fitted=fitted,
        sigma2_hat=float(resid @ resid) / (n - m),
        converged=True,
        iterations=1,
        dataset=data,
        _r_factor=R,
    )


def _sigmoid(eta: np.ndarray) -> np.ndarray:
    out = np.empty_like(eta)
    pos = eta >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-eta[pos]))
    e = np.exp(eta[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def fit_glm_binomial(data: Dataset) -> FitResult:
    """Binomial-family GLM (logit link) by iteratively reweighted least squares.

    Outcomes may be proportions in [0, 1].  Iterates until the score has
    sup-norm below 1e-8; a coefficient running past +/-30 is treated as
    separation.  Both failure modes raise ``ConvergenceError`` carrying the
    last iterate.
    """
    y, X = data.y, data.X
    if np.any((y < 0.0) | (y > 1.0)):
        raise ValueError("binomial outcomes must lie in [0, 1]")
    n, m = X.shape
    beta = np.zeros(m)
    for it in range(1, _GLM_MAX_ITER + 1):
        eta = X @ beta
        mu = _sigmoid(eta)
        score = X.T @ (y - mu)
        w = mu * (1.0 - mu)
        if np.max(np.abs(score)) < _GLM_TOL:
            # refactorize at the converged weights so hat diagonals and the
            # stored information factor match the final iterate
            Qw, Rw = _checked_qr(X * np.sqrt(w)[:, None])
            return FitResult(
                family="binomial",
                coefficients=beta,
                residuals=y - mu,
                hat_diag=np.einsum("ij,ij->i", Qw, Qw),
                fitted=mu,
                sigma2_hat=None,
                converged=True,
                iterations=it,
                dataset=data,
                _r_factor=Rw,
            )
        if np.any(w <= 0.0) or np.max(np.abs(beta)) > _GLM_DIVERGENCE:
            raise ConvergenceError(
                "binomial fit diverged (separation?)", coefficients=beta, iterations=it
            )
        sw = np.sqrt(w)
        z = eta + (y - mu) / w
        Qw, Rw = _checked_qr(X * sw[:, None])
        beta = np.linalg.solve(Rw, Qw.T @ (z * sw))
    raise ConvergenceError(
        f"binomial fit did not converge in {_GLM_MAX_ITER} iterations",
        coefficients=beta,
        iterations=_GLM_MAX_ITER,
    )


def _xtx_inv(fit: FitResult) -> np.ndarray:
    # (X'X)^-1 (gaussian) or (X'WX)^-1 (binomial) from the stored R factor
    rinv = np.linalg.solve(fit._r_factor, np.eye(fit._r_factor.shape[0]))
    return rinv @ rinv.T


def cov_model(fit: FitResult) -> CovEstimate:
    """Model-based covariance: the inverse of the average information.

    Gaussian: sigma2_hat * (X'X/n)^-1; binomial: (X'WX/n)^-1.
    """
    if not fit.converged:
        raise ValueError("covariance of a non-converged fit")
    n = fit.dataset.n
    inv = _xtx_inv(fit)
    if fit.family == "gaussian":
        return CovEstimate(kind="model", matrix=n * fit.sigma2_hat * inv)
    return CovEstimate(kind="model", matrix=n * inv)


def cov_robust(fit: FitResult) -> CovEstimate:
    """Sandwich covariance J^-1 K J^-1.

    Gaussian fits use the jackknife-style reweighting K = X' diag(e_i^2 /
    (1-h_i)^2) X / n; binomial fits use the score outer product
    K = sum x_i x_i' (y_i - mu_i)^2 / n.
    """
    if not fit.converged:
        raise ValueError("covariance of a non-converged fit")
    X = fit.dataset.X
    n = fit.dataset.n
    if fit.family == "gaussian":
        if np.any(fit.hat_diag >= 1.0 - 1e-12):
            raise DegenerateLeverageError("a leverage value of 1 leaves no residual information")
        g = (fit.residuals / (1.0 - fit.hat_diag)) ** 2
        bread = (X.T @ X) / n
    else:
        g = fit.residuals**2  # residuals are y - mu, i.e. the score weights
        w = fit.fitted * (1.0 - fit.fitted)
        bread = (X.T @ (X * w[:, None])) / n
    meat = (X.T @ (X * g[:, None])) / n
    inv = _xtx_inv(fit) * n  # (bread)^-1
    return CovEstimate(kind="robust", matrix=inv @ meat @ inv, bread=bread, meat=meat)
