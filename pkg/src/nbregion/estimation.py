"""Method-of-moments estimation for NB(mu, P) and its large-sample theory.

The estimators work on the log scale, where the joint distribution of
``ln(mu_hat)`` and ``ln(P_hat + 1)`` is asymptotically normal with simple
closed-form moments.  :func:`standardize` removes their correlation by
regressing the second coordinate on the first, leaving two asymptotically
independent standard normal scores; the confidence region machinery in
:mod:`nbregion.region` is built on exactly that decomposition.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_counts
from .distribution import NbParams, raw_moments
from .errors import ZeroMean, ZeroVariance

__all__ = [
    "Regime",
    "SampleStats",
    "EstimateResult",
    "AsymptoticMoments",
    "sample_stats",
    "mme",
    "asymptotic_moments",
    "linearized_estimates",
    "standardize",
]

_REL_TOL = 1e-12


class Regime(enum.Enum):
    """Which model the moment estimate selects."""

    NEGATIVE_BINOMIAL = "NegativeBinomial"
    POISSON_LIMIT = "PoissonLimit"


@dataclass(frozen=True)
class SampleStats:
    """Sample size, mean, raw second moment and population variance.

    ``s2`` is the divide-by-n variance, i.e. ``m2 - mean**2``; the two
    redundant fields are kept because the linearization works with raw
    moments while the estimators work with the variance.
    """

    n: int
    mean: float
    m2: float
    s2: float

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"n must be at least 2, got {self.n}")
        if not (math.isfinite(self.mean) and self.mean >= 0):
            raise ValueError(f"mean must be finite and nonnegative, got {self.mean}")
        if not (math.isfinite(self.s2) and self.s2 >= 0):
            raise ValueError(f"s2 must be finite and nonnegative, got {self.s2}")
        resid = abs(self.m2 - self.mean**2 - self.s2)
        if resid > _REL_TOL * max(1.0, abs(self.m2)):
            raise ValueError("inconsistent moments: s2 must equal m2 - mean**2")

    @classmethod
    def from_moments(cls, n: int, mean: float, s2: float) -> "SampleStats":
        """Build stats from (n, mean, s2), deriving the raw second moment."""
        return cls(n=n, mean=mean, m2=mean * mean + s2, s2=s2)


@dataclass(frozen=True)
class EstimateResult:
    """Moment estimates on the natural and log scales.

    ``p_hat`` may be negative (under-dispersed sample); ``regime`` records
    whether the fit falls back to the Poisson limit, which happens exactly
    when ``p_hat <= 0``.
    """

    mu_hat: float
    p_hat: float
    log_mu_hat: float
    log_p1_hat: float
    regime: Regime

    def __post_init__(self):
        if not self.mu_hat > 0:
            raise ValueError(f"mu_hat must be positive, got {self.mu_hat}")
        if not self.p_hat > -1:
            raise ValueError(f"p_hat must exceed -1, got {self.p_hat}")
        if abs(self.mu_hat - math.exp(self.log_mu_hat)) > _REL_TOL * self.mu_hat:
            raise ValueError("log_mu_hat is inconsistent with mu_hat")
        p1 = self.p_hat + 1.0
        if abs(p1 - math.exp(self.log_p1_hat)) > _REL_TOL * p1:
            raise ValueError("log_p1_hat is inconsistent with p_hat")
        expected = Regime.POISSON_LIMIT if self.p_hat <= 0 else Regime.NEGATIVE_BINOMIAL
        if self.regime is not expected:
            raise ValueError(f"regime should be {expected} for p_hat={self.p_hat}")


@dataclass(frozen=True)
class AsymptoticMoments:
    """First-order sampling moments of (ln mu_hat, ln(P_hat + 1)).

    All entries carry the 1/n factor.  ``a`` is the regression coefficient
    ``cov / var_log_mu = P / (1 + P)`` used to decorrelate the pair, and
    ``var_resid`` is the variance left in the second coordinate after that
    regression.
    """

    var_log_mu: float
    var_log_p1: float
    cov: float
    rho: float
    a: float
    var_resid: float


def sample_stats(data) -> SampleStats:
    """Exact sample moments of a sequence of counts.

    Sums are accumulated in integer arithmetic (falling back to Python ints
    when an int64 dot product could overflow), so ``mean`` and ``m2`` are
    correctly rounded and ``s2`` suffers only the final cancellation.
    """
    x = check_counts(data)
    n = x.size
    xmax = int(x.max())
    if n * xmax * xmax < 2**62:
        total = int(x.sum())
        total2 = int(np.dot(x, x))
    else:
        total = sum(int(v) for v in x)
        total2 = sum(int(v) * int(v) for v in x)
    mean = total / n
    m2 = total2 / n
    # Exact integer numerator (nonnegative by Cauchy-Schwarz) avoids the
    # catastrophic cancellation of m2 - mean**2 for large counts.
    s2 = (n * total2 - total * total) / (n * n)
    return SampleStats(n=n, mean=mean, m2=m2, s2=s2)


def mme(stats: SampleStats) -> EstimateResult:
    """Method-of-moments estimates: mu_hat = mean, P_hat = s2/mean - 1.

    Raises :class:`ZeroMean` when every count is zero and
    :class:`ZeroVariance` for constant samples; both leave the log-scale
    estimates undefined.  A merely under-dispersed sample (0 < s2 < mean) is
    fine and yields a negative ``p_hat`` with ``regime`` set to the Poisson
    limit.
    """
    if stats.mean <= 0:
        raise ZeroMean("sample mean is zero; estimates are undefined")
    if stats.s2 <= 0:
        raise ZeroVariance("sample variance is zero; dispersion estimate is undefined")
    p1_hat = stats.s2 / stats.mean
    p_hat = p1_hat - 1.0
    regime = Regime.POISSON_LIMIT if p_hat <= 0 else Regime.NEGATIVE_BINOMIAL
    return EstimateResult(
        mu_hat=stats.mean,
        p_hat=p_hat,
        log_mu_hat=math.log(stats.mean),
        log_p1_hat=math.log(p1_hat),
        regime=regime,
    )


def asymptotic_moments(params: NbParams, n: int) -> AsymptoticMoments:
    """Closed-form large-sample moments of the log-scale estimators at ``params``."""
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    mu, p = params.mu, params.p_shape
    var_log_mu = (p + 1.0) / (mu * n)
    var_log_p1 = (3.0 * p * p + 2.0 * mu * p + 2.0 * p + 2.0 * mu) / (mu * (1.0 + p) * n)
    cov = p / (mu * n)
    rho = cov / math.sqrt(var_log_mu * var_log_p1)
    a = p / (1.0 + p)
    var_resid = 2.0 * (mu + p) / (mu * n)
    return AsymptoticMoments(
        var_log_mu=var_log_mu,
        var_log_p1=var_log_p1,
        cov=cov,
        rho=rho,
        a=a,
        var_resid=var_resid,
    )


def linearized_estimates(stats: SampleStats, params: NbParams) -> tuple[float, float]:
    """First-order expansions of the log-scale estimators around ``params``.

    Returns the linear parts of ``ln(mu_hat) - ln(mu)`` and
    ``ln(P_hat + 1) - ln(P + 1)`` as functions of the moment deviations
    ``mean - E[X]`` and ``m2 - E[X^2]``; the closed-form moments in
    :func:`asymptotic_moments` are the exact second moments of these linear
    parts.
    """
    mu, p = params.mu, params.p_shape
    ex2 = raw_moments(params).m2
    d_mean = stats.mean - mu
    d_m2 = stats.m2 - ex2
    dtheta1 = d_mean / mu
    c1 = -(1.0 + p + 2.0 * mu) / (mu * (1.0 + p))
    c2 = 1.0 / (mu * (1.0 + p))
    dtheta2 = c1 * d_mean + c2 * d_m2
    return dtheta1, dtheta2


def standardize(est: EstimateResult, params: NbParams, n: int) -> tuple[float, float]:
    """Map an estimate to two asymptotically independent N(0, 1) scores.

    ``z1`` scales the log-mean deviation; ``z2`` scales what is left of the
    log-dispersion deviation after regressing out ``z1``.  The sum of squares
    ``z1**2 + z2**2`` is the confidence-region statistic evaluated at
    ``params``.
    """
    am = asymptotic_moments(params, n)
    d1 = est.log_mu_hat - math.log(params.mu)
    d2 = est.log_p1_hat - math.log1p(params.p_shape) - am.a * d1
    return d1 / math.sqrt(am.var_log_mu), d2 / math.sqrt(am.var_resid)
