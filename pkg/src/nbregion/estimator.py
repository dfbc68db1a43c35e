"""Scikit-learn style front end for moment fitting and region construction."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .distribution import NbParams
from .estimation import mme, sample_stats
from .region import (
    DEFAULT_LEVELS,
    ContourGrid,
    GridSpec,
    RegionProblem,
    contains,
    contour_grid,
    default_grid,
    region_statistic,
)

__all__ = ["NegativeBinomialMME"]


class NegativeBinomialMME(BaseEstimator):
    """Method-of-moments fit of NB(mu, P) with joint confidence regions.

    Parameters
    ----------
    levels : tuple of float, default (0.5, 0.8, 0.95)
        Confidence levels used when building regions.

    Attributes
    ----------
    mu_, p_shape_ : float
        Moment estimates; ``p_shape_`` may be negative for under-dispersed
        samples.
    log_mu_, log_p1_ : float
        The log-scale estimates ``ln(mu_)`` and ``ln(p_shape_ + 1)``.
    regime_ : Regime
        Poisson limit when ``p_shape_ <= 0``, negative binomial otherwise.
    stats_, estimate_ : SampleStats, EstimateResult
        The underlying sample moments and full estimate record.
    n_obs_ : int
        Number of counts seen by :meth:`fit`.

    Examples
    --------
    >>> est = NegativeBinomialMME().fit([0, 1, 0, 2, 5, 1, 0, 3])
    >>> est.mu_
    1.5
    >>> est.contains(1.0, 1.0, delta=0.05)
    True
    """

    def __init__(self, levels: tuple[float, ...] = DEFAULT_LEVELS):
        self.levels = levels

    def fit(self, X, y=None) -> "NegativeBinomialMME":
        """Fit from a 1-D sequence (or single-column array) of counts."""
        self.stats_ = sample_stats(X)
        est = mme(self.stats_)
        self.estimate_ = est
        self.mu_ = est.mu_hat
        self.p_shape_ = est.p_hat
        self.log_mu_ = est.log_mu_hat
        self.log_p1_ = est.log_p1_hat
        self.regime_ = est.regime
        self.n_obs_ = self.stats_.n
        return self

    def fitted_params(self, clamp: bool = True) -> NbParams:
        """Fitted parameters; a negative dispersion is clamped to the
        Poisson boundary unless ``clamp=False`` (which then raises)."""
        check_is_fitted(self, "estimate_")
        p = self.p_shape_
        if p < 0 and clamp:
            p = 0.0
        return NbParams(self.mu_, p)

    def region_problem(self, levels=None) -> RegionProblem:
        """Bundle the fitted log estimates into a region problem."""
        check_is_fitted(self, "estimate_")
        return RegionProblem(
            log_mu_hat=self.log_mu_,
            log_p1_hat=self.log_p1_,
            n=self.n_obs_,
            levels=tuple(levels) if levels is not None else tuple(self.levels),
        )

    def region_statistic(self, mu: float, p: float) -> float:
        """Region statistic at a candidate (mu, P)."""
        return region_statistic(self.region_problem(), (mu, p))

    def contains(self, mu: float, p: float, delta: float) -> bool:
        """Whether (mu, P) lies in the region with tail mass ``delta``."""
        return contains(self.region_problem(), (mu, p), delta)

    def confidence_region(
        self,
        spec: GridSpec | None = None,
        levels=None,
        k: float = 4.0,
        mu_steps: int = 256,
        p_steps: int = 256,
    ) -> ContourGrid:
        """Contour grid of the joint region around the fitted estimates.

        Without an explicit ``spec`` the window spans +-k asymptotic
        standard deviations computed at the (clamped) fitted parameters.
        """
        problem = self.region_problem(levels)
        if spec is None:
            spec = default_grid(
                problem, self.fitted_params(), k=k, mu_steps=mu_steps, p_steps=p_steps
            )
        return contour_grid(problem, spec)

    def pmf(self, x) -> np.ndarray:
        """Probability mass of the fitted (clamped) distribution at ``x``."""
        from .distribution import pmf as _pmf

        return _pmf(self.fitted_params(), x)
