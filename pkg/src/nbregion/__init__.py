"""Negative binomial NB(mu, P) moment fitting and joint confidence regions.

The package estimates the mean/dispersion parametrization of the negative
binomial by the method of moments, builds closed-form joint confidence
regions for (mu, P) from the asymptotic normality of the log-scale
estimators, and verifies the construction by Monte Carlo.  Regions extend
below P = 0 toward the Poisson boundary, so under-dispersed samples are
handled without ad hoc truncation.
"""

from .distribution import (
    ClassicParams,
    NbParams,
    RawMoments,
    from_classic,
    mean_variance,
    pgf,
    pmf,
    raw_moments,
    to_classic,
)
from .errors import (
    DomainInvalid,
    EmptyGrid,
    EmptySample,
    GridTooCoarse,
    NbRegionError,
    NegativeCount,
    ZeroMean,
    ZeroVariance,
)
from .estimation import (
    AsymptoticMoments,
    EstimateResult,
    Regime,
    SampleStats,
    asymptotic_moments,
    linearized_estimates,
    mme,
    sample_stats,
    standardize,
)
from .estimator import NegativeBinomialMME
from .region import (
    DEFAULT_LEVELS,
    ContourGrid,
    GridSpec,
    RegionProblem,
    RegionSplit,
    contains,
    contour_grid,
    critical_value,
    default_grid,
    region_statistic,
    render,
)
from .simulate import SeededStream, sample_nb, sample_poisson
from .verify import (
    CoverageReport,
    LevelCoverage,
    UnderdispersionReport,
    coverage,
    estimate_cloud,
    underdispersion_probability,
)

__version__ = "0.1.0"

__all__ = [
    "NbParams",
    "ClassicParams",
    "RawMoments",
    "pmf",
    "pgf",
    "raw_moments",
    "mean_variance",
    "to_classic",
    "from_classic",
    "Regime",
    "SampleStats",
    "EstimateResult",
    "AsymptoticMoments",
    "sample_stats",
    "mme",
    "asymptotic_moments",
    "linearized_estimates",
    "standardize",
    "NegativeBinomialMME",
    "RegionProblem",
    "GridSpec",
    "RegionSplit",
    "ContourGrid",
    "DEFAULT_LEVELS",
    "critical_value",
    "region_statistic",
    "contains",
    "default_grid",
    "contour_grid",
    "render",
    "SeededStream",
    "sample_nb",
    "sample_poisson",
    "LevelCoverage",
    "CoverageReport",
    "UnderdispersionReport",
    "coverage",
    "underdispersion_probability",
    "estimate_cloud",
    "NbRegionError",
    "EmptySample",
    "NegativeCount",
    "ZeroMean",
    "ZeroVariance",
    "DomainInvalid",
    "GridTooCoarse",
    "EmptyGrid",
]
