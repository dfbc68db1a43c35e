"""Reproducible count sampling for the Monte Carlo checks.

Streams are counter-based: a :class:`SeededStream` is a (seed, stream_id)
pair mapped to an independent Philox generator, so replicate ``r`` of an
experiment can be drawn in isolation and in any order without touching the
other replicates' randomness.

NB(mu, P) draws use the gamma-Poisson mixture: Lambda ~ Gamma(shape=mu/P,
scale=P) followed by X ~ Poisson(Lambda), which reproduces the target pmf
exactly.  ``P = 0`` short-circuits to plain Poisson sampling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import check_positive
from .distribution import NbParams

__all__ = ["SeededStream", "sample_nb", "sample_poisson"]


@dataclass(frozen=True)
class SeededStream:
    """Philox key (seed, stream_id); equal keys give identical draw sequences."""

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("seed", "stream_id"):
            v = getattr(self, name)
            if not 0 <= int(v) < 2**64:
                raise ValueError(f"{name} must be a uint64, got {v}")
            object.__setattr__(self, name, int(v))

    def generator(self) -> np.random.Generator:
        key = np.array([self.seed, self.stream_id], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def spawn(self, stream_id: int) -> "SeededStream":
        """Same seed, different stream."""
        return SeededStream(self.seed, stream_id)


def _check_size(n: int) -> int:
    n = int(n)
    if n < 1:
        raise ValueError(f"sample size must be at least 1, got {n}")
    return n


def sample_nb(params: NbParams, n: int, stream: SeededStream) -> np.ndarray:
    """Draw ``n`` iid NB(mu, P) counts as an int64 array."""
    n = _check_size(n)
    if params.p_shape == 0.0:
        return sample_poisson(params.mu, n, stream)
    rng = stream.generator()
    lam = rng.gamma(shape=params.mu / params.p_shape, scale=params.p_shape, size=n)
    return rng.poisson(lam).astype(np.int64)


def sample_poisson(mu: float, n: int, stream: SeededStream) -> np.ndarray:
    """Draw ``n`` iid Poisson(mu) counts as an int64 array."""
    mu = check_positive(mu, "mu")
    n = _check_size(n)
    return stream.generator().poisson(mu, size=n).astype(np.int64)
