"""Monte Carlo verification of the confidence regions and regime frequencies.

Every experiment here is a pure function of ``(params, n, reps, seed)``:
replicate ``r`` draws its sample from the Philox stream ``(seed, r)``, so
results are reproducible and independent of evaluation order.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_unit_open
from .distribution import NbParams
from .errors import ZeroMean, ZeroVariance
from .estimation import asymptotic_moments, mme, sample_stats
from .region import DEFAULT_LEVELS, critical_value
from .simulate import SeededStream, sample_nb

__all__ = [
    "LevelCoverage",
    "CoverageReport",
    "UnderdispersionReport",
    "coverage",
    "underdispersion_probability",
    "estimate_cloud",
]


@dataclass(frozen=True)
class LevelCoverage:
    """Hit count and empirical coverage of one confidence level."""

    level: float
    hits: int
    coverage: float
    std_error: float


@dataclass(frozen=True)
class CoverageReport:
    """Empirical coverage of the joint region at the true parameters.

    ``degenerate`` counts replicates whose sample had zero mean or zero
    variance; those admit no estimate, so they are excluded from the
    coverage denominator (``reps - degenerate``).
    """

    params: NbParams
    n: int
    reps: int
    seed: int
    degenerate: int
    levels: tuple[LevelCoverage, ...]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("mu,p,n,level,reps,degenerate,coverage,std_error\n")
        for lc in self.levels:
            buf.write(
                f"{self.params.mu:g},{self.params.p_shape:g},{self.n},"
                f"{lc.level:g},{self.reps},{self.degenerate},"
                f"{lc.coverage:.9g},{lc.std_error:.9g}\n"
            )
        return buf.getvalue()


@dataclass(frozen=True)
class UnderdispersionReport:
    """Frequency of samples whose dispersion estimate falls at or below the
    Poisson boundary, i.e. samples with s2 <= mean."""

    params: NbParams
    n: int
    reps: int
    seed: int
    count: int
    proportion: float
    std_error: float

    def to_csv(self) -> str:
        return (
            "mu,p,n,reps,count,proportion,std_error\n"
            f"{self.params.mu:g},{self.params.p_shape:g},{self.n},{self.reps},"
            f"{self.count},{self.proportion:.9g},{self.std_error:.9g}\n"
        )


def _check_reps(reps: int) -> int:
    reps = int(reps)
    if reps < 1:
        raise ValueError(f"reps must be at least 1, got {reps}")
    return reps


def coverage(
    params: NbParams,
    n: int,
    levels=DEFAULT_LEVELS,
    reps: int = 10_000,
    seed: int = 0,
) -> CoverageReport:
    """Fraction of replicates whose region at each level covers ``params``.

    Each replicate draws an NB(mu, P) sample, estimates by moments, and
    checks whether the region statistic at the true ``(mu, P)`` is below the
    level's critical value.
    """
    reps = _check_reps(reps)
    level_list = tuple(sorted({check_unit_open(v, "level") for v in levels}))
    if not level_list:
        raise ValueError("at least one confidence level is required")
    cutoffs = [critical_value(1.0 - lvl) for lvl in level_list]

    am = asymptotic_moments(params, n)
    log_mu = math.log(params.mu)
    log_p1 = math.log1p(params.p_shape)
    hits = [0] * len(level_list)
    degenerate = 0
    for r in range(reps):
        x = sample_nb(params, n, SeededStream(seed, r))
        try:
            est = mme(sample_stats(x))
        except (ZeroMean, ZeroVariance):
            degenerate += 1
            continue
        d1 = est.log_mu_hat - log_mu
        d2 = est.log_p1_hat - log_p1 - am.a * d1
        stat = d1 * d1 / am.var_log_mu + d2 * d2 / am.var_resid
        for i, c0 in enumerate(cutoffs):
            if stat <= c0:
                hits[i] += 1

    effective = reps - degenerate
    per_level = []
    for lvl, h in zip(level_list, hits):
        cov = h / effective if effective else float("nan")
        se = math.sqrt(cov * (1.0 - cov) / effective) if effective else float("nan")
        per_level.append(LevelCoverage(level=lvl, hits=h, coverage=cov, std_error=se))
    return CoverageReport(
        params=params,
        n=n,
        reps=reps,
        seed=seed,
        degenerate=degenerate,
        levels=tuple(per_level),
    )


def underdispersion_probability(
    params: NbParams, n: int, reps: int = 10_000, seed: int = 0
) -> UnderdispersionReport:
    """Monte Carlo estimate of P(s2 <= mean) for NB(mu, P) samples of size n.

    This is the frequency of samples that fail to certify over-dispersion:
    the moment estimate of P is nonpositive, so the fit falls back to the
    Poisson regime.  Ties (s2 == mean, notably all-zero samples) land on the
    Poisson side.  The comparison is done in exact integer arithmetic
    (``n * sum(x^2) - sum(x)^2 <= n * sum(x)``), so ties are never
    miscounted by rounding.
    """
    reps = _check_reps(reps)
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    count = 0
    for r in range(reps):
        x = sample_nb(params, n, SeededStream(seed, r))
        total = int(x.sum())
        total2 = int(np.dot(x, x)) if n * int(x.max()) ** 2 < 2**62 else sum(
            int(v) * int(v) for v in x
        )
        if n * total2 - total * total <= n * total:
            count += 1
    proportion = count / reps
    std_error = math.sqrt(proportion * (1.0 - proportion) / reps)
    return UnderdispersionReport(
        params=params,
        n=n,
        reps=reps,
        seed=seed,
        count=count,
        proportion=proportion,
        std_error=std_error,
    )


def estimate_cloud(
    params: NbParams, n: int, reps: int = 10_000, seed: int = 0
) -> tuple[np.ndarray, int]:
    """Replicate estimates as an array of (mu_hat, p_hat, log_mu_hat, log_p1_hat).

    Degenerate replicates are skipped; the second return value counts them.
    Useful for scatter plots of the estimator cloud against a region.
    """
    reps = _check_reps(reps)
    rows = []
    degenerate = 0
    for r in range(reps):
        x = sample_nb(params, n, SeededStream(seed, r))
        try:
            est = mme(sample_stats(x))
        except (ZeroMean, ZeroVariance):
            degenerate += 1
            continue
        rows.append((est.mu_hat, est.p_hat, est.log_mu_hat, est.log_p1_hat))
    cloud = np.asarray(rows, dtype=np.float64).reshape(-1, 4)
    return cloud, degenerate
