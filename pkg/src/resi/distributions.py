"""Non-central chi-squared and F distributions, error samplers, RNG streams.

The non-central CDFs are evaluated as Poisson mixtures of central-distribution
terms.  Summation starts at the integer nearest the Poisson mode (ncp/2) and
covers a window of 10*sqrt(ncp/2) + 20 indices each way; by the Poisson
Chernoff bounds the mass left outside is below 1e-17, and every mixture term
lies in [0, 1], so that mass bounds the truncation error.  Evaluation fails
rather than silently truncating past 100,000 terms.  The mode weight uses the
saddlepoint form of the Poisson pmf (stirlerr/bd0, so no large-argument
log-gamma cancellation), and neighbouring weights and central-CDF terms follow
one-step ratio recurrences, so each evaluation needs a single incomplete-gamma
(or beta) call.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError
from .special import bd0, chisq_cdf, f_cdf, log_beta, reg_inc_beta, reg_inc_gamma_p, stirlerr

_MAX_TERMS = 100_000


# ---------------------------------------------------------------------------
# distribution types
# ---------------------------------------------------------------------------


def _check_df(value, name: str) -> int:
    if not math.isfinite(value) or value != int(value) or value < 1:
        raise ValueError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


@dataclass(frozen=True)
class NoncentralChiSq:
    """Non-central chi-squared with ``df`` degrees of freedom and NCP ``ncp``."""

    df: int
    ncp: float

    def __post_init__(self):
        _check_df(self.df, "df")
        if not math.isfinite(self.ncp) or self.ncp < 0.0:
            raise ValueError(f"ncp must be finite and nonnegative, got {self.ncp!r}")

    def cdf(self, x: float) -> float:
        return ncx2_cdf(x, self.df, self.ncp)


@dataclass(frozen=True)
class NoncentralF:
    """Non-central F with (``df1``, ``df2``) degrees of freedom and NCP ``ncp``."""

    df1: int
    df2: int
    ncp: float

    def __post_init__(self):
        _check_df(self.df1, "df1")
        _check_df(self.df2, "df2")
        if not math.isfinite(self.ncp) or self.ncp < 0.0:
            raise ValueError(f"ncp must be finite and nonnegative, got {self.ncp!r}")

    def cdf(self, x: float) -> float:
        return ncf_cdf(x, self.df1, self.df2, self.ncp)


# ---------------------------------------------------------------------------
# CDFs
# ---------------------------------------------------------------------------


def _log_pois_pmf(k: float, mu: float) -> float:
    """log of mu^k e^-mu / Gamma(k+1) for real k >= 0, accurate at large arguments."""
    if k == 0.0:
        return -mu
    return -stirlerr(k) - bd0(k, mu) - 0.5 * math.log(2.0 * math.pi * k)


def _poisson_window(mu: float):
    """Weights on the index window round(mu) +/- (10*sqrt(mu) + 20).

    Outside mass < 1e-17 by the Poisson Chernoff bounds.  Returns
    (ks, weights, i0) with ks[i0] == round(mu).
    """
    k0 = int(round(mu))
    half = int(10.0 * math.sqrt(mu) + 20.0)
    lo = max(0, k0 - half)
    hi = k0 + half
    if hi - lo + 1 > _MAX_TERMS:
        raise NumericalError(f"Poisson mixture exceeded {_MAX_TERMS} terms (ncp/2 = {mu})")
    ks = np.arange(lo, hi + 1, dtype=float)
    i0 = k0 - lo
    w = np.exp(_ratio_logs(math.log(mu) - np.log(ks[1:]), i0, _log_pois_pmf(float(k0), mu)))
    return ks, w, i0


def _ratio_logs(step_up: np.ndarray, i0: int, log_mode: float) -> np.ndarray:
    """Log values of a sequence defined by log-ratios, anchored at index i0.

    ``step_up[i]`` is log(v[i+1] / v[i]); accumulating in log space avoids
    overflow when the anchor value underflows but neighbours do not.
    """
    out = np.empty(len(step_up) + 1)
    out[i0] = log_mode
    if i0 + 1 < len(out):
        out[i0 + 1 :] = log_mode + np.cumsum(step_up[i0:])
    if i0 > 0:
        out[:i0] = log_mode - np.cumsum(step_up[:i0][::-1])[::-1]
    return out


def _mixture(w: np.ndarray, i0: int, f_mode: float, terms: np.ndarray) -> float:
    """Sum w_k F_k where F_{k+1} = F_k - terms_k, anchored at F[i0] = f_mode."""
    f = np.empty_like(w)
    f[i0] = f_mode
    if i0 + 1 < len(f):
        f[i0 + 1 :] = f_mode - np.cumsum(terms[i0:-1])
    if i0 > 0:
        f[:i0] = f_mode + np.cumsum(terms[:i0][::-1])[::-1]
    np.clip(f, 0.0, 1.0, out=f)
    return float(min(1.0, max(0.0, w @ f)))


def _validate_cdf_args(x: float, ncp: float):
    if not (math.isfinite(x) and math.isfinite(ncp)):
        raise ValueError(f"non-finite argument: x={x!r}, ncp={ncp!r}")
    if x < 0.0:
        raise ValueError(f"x must be nonnegative, got {x!r}")
    if ncp < 0.0:
        raise ValueError(f"ncp must be nonnegative, got {ncp!r}")


def ncx2_cdf(x: float, df: int, ncp: float) -> float:
    """CDF of the non-central chi-squared distribution.

    Poisson mixture of central chi-squared CDFs with shape df/2 + k; absolute
    accuracy ~1e-12.  Reduces exactly to the central CDF at ncp = 0.
    """
    x = float(x)
    ncp = float(ncp)
    df = _check_df(df, "df")
    _validate_cdf_args(x, ncp)
    if x == 0.0:
        return 0.0
    if ncp == 0.0:
        return chisq_cdf(x, df)

    a = 0.5 * df
    y = 0.5 * x
    mu = 0.5 * ncp
    ks, w, i0 = _poisson_window(mu)
    k0 = ks[i0]

    # decrements: P(a+k+1, y) = P(a+k, y) - T_k with T_k = y^(a+k) e^-y / Gamma(a+k+1)
    ak = a + ks
    t = np.exp(_ratio_logs(math.log(y) - np.log(ak[1:]), i0, _log_pois_pmf(a + k0, y)))
    return _mixture(w, i0, reg_inc_gamma_p(a + k0, y), t)


def ncf_cdf(x: float, df1: int, df2: int, ncp: float) -> float:
    """CDF of the non-central F distribution.

    Poisson mixture of regularized incomplete beta terms I_z(df1/2 + k, df2/2)
    with z = df1*x / (df1*x + df2); absolute accuracy ~1e-12.  Reduces exactly
    to the central F CDF at ncp = 0.
    """
    x = float(x)
    ncp = float(ncp)
    df1 = _check_df(df1, "df1")
    df2 = _check_df(df2, "df2")
    _validate_cdf_args(x, ncp)
    if x == 0.0:
        return 0.0
    if ncp == 0.0:
        return f_cdf(x, df1, df2)

    a = 0.5 * df1
    b = 0.5 * df2
    z = df1 * x / (df1 * x + df2)
    mu = 0.5 * ncp
    ks, w, i0 = _poisson_window(mu)
    k0 = ks[i0]

    # decrements: I_z(a+k+1, b) = I_z(a+k, b) - U_k,
    # U_k = z^(a+k) (1-z)^b / ((a+k) B(a+k, b)), with U_{k+1}/U_k = z (a+k+b)/(a+k+1)
    ak = a + ks
    am = a + k0
    logu_mode = (
        am * math.log(z) + b * math.log1p(-z) - math.log(am) - log_beta(am, b)
    )
    step_up = math.log(z) + np.log(ak[:-1] + b) - np.log(ak[1:])
    u = np.exp(_ratio_logs(step_up, i0, logu_mode))
    return _mixture(w, i0, reg_inc_beta(am, b, z), u)


# ---------------------------------------------------------------------------
# moments
# ---------------------------------------------------------------------------


def theoretical_moments(dist: NoncentralChiSq | NoncentralF) -> tuple[float, float]:
    """Mean and variance of the test statistic implied by ``dist``.

    For ``NoncentralChiSq`` the statistic is the chi-squared variate itself:
    mean df + ncp, variance 2(df + 2 ncp).  For ``NoncentralF`` the statistic
    is df1 * F, matching a Wald statistic whose ratio form is F-distributed;
    requires df2 > 4 for a finite variance.
    """
    if isinstance(dist, NoncentralChiSq):
        return float(dist.df + dist.ncp), float(2.0 * (dist.df + 2.0 * dist.ncp))
    if isinstance(dist, NoncentralF):
        d1, d2, lam = dist.df1, dist.df2, dist.ncp
        if d2 <= 4:
            raise ValueError(f"variance of the F statistic requires df2 > 4, got df2={d2}")
        mean = d2 * (d1 + lam) / (d2 - 2.0)
        var = (
            2.0
            * ((d1 + lam) ** 2 + (d1 + 2.0 * lam) * (d2 - 2.0))
            / ((d2 - 2.0) ** 2 * (d2 - 4.0))
            * d2**2
        )
        return float(mean), float(var)
    raise TypeError(f"unsupported distribution type: {type(dist).__name__}")


# ---------------------------------------------------------------------------
# samplers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Normal:
    mu: float = 0.0
    sigma: float = 1.0

    def __post_init__(self):
        if not (self.sigma > 0.0 and math.isfinite(self.sigma)):
            raise ValueError(f"sigma must be positive, got {self.sigma!r}")


@dataclass(frozen=True)
class ShiftedGamma:
    """Gamma recentered to mean 0, with rate chosen so the variance is sd^2.

    Draws G - shape/rate with G ~ Gamma(shape, rate), rate = sqrt(shape)/sd;
    skewness is 2/sqrt(shape) regardless of sd.
    """

    shape: float
    sd: float

    def __post_init__(self):
        if not (self.shape > 0.0 and math.isfinite(self.shape)):
            raise ValueError(f"shape must be positive, got {self.shape!r}")
        if not (self.sd > 0.0 and math.isfinite(self.sd)):
            raise ValueError(f"sd must be positive, got {self.sd!r}")


@dataclass(frozen=True)
class Bernoulli:
    p: float

    def __post_init__(self):
        if not (0.0 < self.p < 1.0):
            raise ValueError(f"p must lie in (0, 1), got {self.p!r}")


@dataclass(frozen=True)
class Rademacher:
    pass


@dataclass(frozen=True)
class ConstantOne:
    pass


SamplerSpec = Normal | ShiftedGamma | Bernoulli | Rademacher | ConstantOne


def draw(spec: SamplerSpec, count: int, stream: np.random.Generator) -> np.ndarray:
    """Draw ``count`` i.i.d. values from ``spec`` using ``stream``.

    Deterministic given the stream state.  Streams are single-owner: never
    share one generator across concurrent consumers.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    if isinstance(spec, Normal):
        return spec.mu + spec.sigma * stream.standard_normal(count)
    if isinstance(spec, ShiftedGamma):
        scale = spec.sd / math.sqrt(spec.shape)
        return stream.gamma(spec.shape, scale, size=count) - spec.shape * scale
    if isinstance(spec, Bernoulli):
        return (stream.random(count) < spec.p).astype(float)
    if isinstance(spec, Rademacher):
        return np.where(stream.random(count) < 0.5, -1.0, 1.0)
    if isinstance(spec, ConstantOne):
        return np.ones(count)
    raise TypeError(f"unknown sampler spec: {spec!r}")


# ---------------------------------------------------------------------------
# error distributions for the simulation scenarios
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ErrorDistSpec:
    """Mean-zero error family with per-group standard deviations.

    ``sd0`` applies where the binary covariate is 0, ``sd1`` where it is 1.
    The shifted-gamma family keeps the same shape (hence the same skewness
    2/sqrt(shape)) in both groups; only the rate changes with the sd.
    """

    family: str  # 'normal' | 'shifted-gamma'
    sd0: float
    sd1: float
    gamma_shape: float = 0.1

    def __post_init__(self):
        if self.family not in ("normal", "shifted-gamma"):
            raise ValueError(f"unknown error family {self.family!r}")
        for name in ("sd0", "sd1", "gamma_shape"):
            v = getattr(self, name)
            if not (v > 0.0 and math.isfinite(v)):
                raise ValueError(f"{name} must be positive, got {v!r}")

    def sample(self, x: np.ndarray, stream: np.random.Generator) -> np.ndarray:
        """Errors for covariate vector ``x`` (entries in {0, 1})."""
        sd = np.where(x == 1.0, self.sd1, self.sd0)
        if self.family == "normal":
            return sd * stream.standard_normal(len(x))
        scale = sd / math.sqrt(self.gamma_shape)
        return stream.gamma(self.gamma_shape, scale) - self.gamma_shape * scale


# ---------------------------------------------------------------------------
# reproducible streams
# ---------------------------------------------------------------------------


def _path_entropy(part) -> int:
    if isinstance(part, (int, np.integer)):
        if part < 0:
            raise ValueError(f"stream path integers must be nonnegative, got {part}")
        return int(part)
    if isinstance(part, str):
        return int.from_bytes(hashlib.sha256(part.encode()).digest()[:8], "big")
    raise TypeError(f"stream path parts must be int or str, got {type(part).__name__}")


def make_stream(seed, *path) -> np.random.Generator:
    """Independent counter-based stream keyed by (seed, *path).

    The same key always yields the same stream, regardless of how many other
    streams were created before it, so parallel simulation stays reproducible.
    ``seed`` may itself be a tuple of previously derived key parts.
    """
    parts = tuple(seed) if isinstance(seed, tuple) else (seed,)
    entropy = [_path_entropy(p) for p in parts + tuple(path)]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def stream_key(seed, *path) -> tuple:
    """Compose a stream key tuple for later use with ``make_stream``."""
    parts = tuple(seed) if isinstance(seed, tuple) else (seed,)
    return parts + tuple(path)
