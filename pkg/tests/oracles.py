"""Shared test oracles: brute-force series sums checked against closed forms.

Truncation points are deterministic and parameter-adaptive: a Chebyshev
bound on the tail mass (then doubled) for normalization sums, and a
cumulative-mass cutoff (then doubled) for moment sums, where the geometric
tail decay makes the residual negligible at the tested tolerances.
"""

import math

import numpy as np

from nbregion import NbParams, mean_variance, pmf

MU_GRID = (0.1, 0.3, 1.0, 3.0, 10.0)
P_GRID = (0.0, 0.1, 0.3, 1.0, 10.0)
PARAM_GRID = tuple(NbParams(mu, p) for mu in MU_GRID for p in P_GRID)


def chebyshev_cutoff(params: NbParams, mass: float) -> int:
    """Doubled Chebyshev bound: tail mass beyond the bound is below ``mass``."""
    mean, var = mean_variance(params)
    return 2 * int(math.ceil(mean + math.sqrt(var / mass)))


def normalization_sum(params: NbParams, mass: float = 1e-10) -> float:
    """Exactly rounded sum of pmf values up to the Chebyshev cutoff."""
    x = np.arange(chebyshev_cutoff(params, mass) + 1)
    return math.fsum(pmf(params, x))


def brute_moments(params: NbParams) -> tuple[float, float, float, float]:
    """First four raw moments by direct series summation of x^k * pmf(x)."""
    block, start, cum, x0 = 256, 0, 0.0, None
    while x0 is None:
        p = pmf(params, np.arange(start, start + block))
        c = cum + np.cumsum(p)
        hit = np.nonzero(c >= 1.0 - 1e-12)[0]
        if hit.size:
            x0 = start + int(hit[0])
        cum = float(c[-1])
        start += block
    x = np.arange(2 * max(x0, 4) + 1, dtype=np.float64)
    p = pmf(params, x.astype(np.int64))
    return tuple(math.fsum(p * x**k) for k in (1, 2, 3, 4))
