"""Negative binomial distribution in the mean/dispersion parametrization.

``NB(mu, P)`` has mean ``mu`` and variance ``mu * (1 + P)``; its classical
form uses success probability ``p = 1 / (1 + P)`` and size ``alpha = mu / P``.
The boundary ``P = 0`` is the Poisson limit, where the size parameter
diverges, so every routine here treats it as an explicit branch instead of
relying on the generic formulas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from ._validation import check_count_values, check_positive
from .errors import DomainInvalid

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
]


@dataclass(frozen=True)
class NbParams:
    """Mean ``mu > 0`` and dispersion ``p_shape >= 0`` (0 selects Poisson)."""

    mu: float
    p_shape: float

    def __post_init__(self):
        object.__setattr__(self, "mu", check_positive(self.mu, "mu"))
        p = float(self.p_shape)
        if not math.isfinite(p) or p < 0:
            raise ValueError(f"p_shape must be nonnegative and finite, got {p}")
        object.__setattr__(self, "p_shape", p)

    @property
    def is_poisson(self) -> bool:
        return self.p_shape == 0.0


@dataclass(frozen=True)
class ClassicParams:
    """Success probability ``p_success`` in (0, 1) and size ``alpha > 0``."""

    p_success: float
    alpha: float

    def __post_init__(self):
        p = float(self.p_success)
        if not math.isfinite(p) or not 0.0 < p < 1.0:
            raise ValueError(f"p_success must lie in (0, 1), got {p}")
        object.__setattr__(self, "p_success", p)
        object.__setattr__(self, "alpha", check_positive(self.alpha, "alpha"))


@dataclass(frozen=True)
class RawMoments:
    """First four raw moments E[X^k]; always finite for valid parameters."""

    m1: float
    m2: float
    m3: float
    m4: float

    def __post_init__(self):
        for name in ("m1", "m2", "m3", "m4"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and nonnegative, got {v}")
        # Jensen: E[X^2] >= (E[X])^2 and E[X^4] >= (E[X^2])^2.
        if self.m2 < self.m1**2 or self.m4 < self.m2**2:
            raise ValueError("moments violate Jensen ordering")


def pmf(params: NbParams, x):
    """Probability mass at ``x`` (scalar or array of nonnegative integers).

    Evaluated in log space through ``gammaln`` so large counts and extreme
    parameters do not overflow; the result is exponentiated at the end.
    """
    xa = check_count_values(x)
    xf = xa.astype(np.float64)
    mu, p = params.mu, params.p_shape
    if p == 0.0:
        logp = xf * math.log(mu) - mu - gammaln(xf + 1.0)
    else:
        alpha = mu / p
        logp = (
            gammaln(xf + alpha)
            - gammaln(alpha)
            - gammaln(xf + 1.0)
            - alpha * math.log1p(p)
            + xf * (math.log(p) - math.log1p(p))
        )
    out = np.exp(logp)
    if np.ndim(x) == 0:
        return float(out)
    return out


def pgf(params: NbParams, z: float) -> float:
    """Probability generating function E[z^X].

    Defined for ``1 + P - P*z > 0`` (all real ``z`` in the Poisson limit);
    outside that range the series diverges and :class:`DomainInvalid` is
    raised.
    """
    z = float(z)
    if not math.isfinite(z):
        raise ValueError(f"z must be finite, got {z}")
    mu, p = params.mu, params.p_shape
    if p == 0.0:
        return math.exp(mu * (z - 1.0))
    base = 1.0 + p - p * z
    if base <= 0.0:
        raise DomainInvalid(f"pgf undefined at z={z} for p_shape={p}: series diverges")
    return base ** (-mu / p)


def raw_moments(params: NbParams) -> RawMoments:
    """First four raw moments as polynomials in (mu, P).

    Derived from the factorial moments mu/P (mu/P + 1) ... (mu/P + k - 1) P^k
    and cross-checked against brute-force series summation in the test suite.
    """
    mu, p = params.mu, params.p_shape
    m1 = mu
    m2 = mu * (1.0 + mu + p)
    m3 = mu * (1.0 + 3.0 * mu + 3.0 * p + 3.0 * mu * p + mu**2 + 2.0 * p**2)
    m4 = mu * (
        1.0
        + 7.0 * mu
        + 7.0 * p
        + 18.0 * mu * p
        + 6.0 * mu**2
        + 12.0 * p**2
        + 6.0 * mu**2 * p
        + 11.0 * mu * p**2
        + mu**3
        + 6.0 * p**3
    )
    return RawMoments(m1, m2, m3, m4)


def mean_variance(params: NbParams) -> tuple[float, float]:
    """Return ``(mean, variance) = (mu, mu * (1 + P))``."""
    return params.mu, params.mu * (1.0 + params.p_shape)


def to_classic(params: NbParams) -> ClassicParams:
    """Convert to the success-probability/size parametrization.

    The Poisson limit has no classical form (the size diverges), so
    ``p_shape == 0`` raises :class:`DomainInvalid`.
    """
    if params.p_shape == 0.0:
        raise DomainInvalid("the Poisson limit (p_shape=0) has no classical form")
    return ClassicParams(1.0 / (1.0 + params.p_shape), params.mu / params.p_shape)


def from_classic(classic: ClassicParams) -> NbParams:
    """Inverse of :func:`to_classic`."""
    p = 1.0 / classic.p_success - 1.0
    return NbParams(classic.alpha * p, p)
