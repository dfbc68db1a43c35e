import math

import numpy as np
import pytest
from scipy.stats import chi2

from nbregion import (
    NbParams,
    SeededStream,
    pmf,
    raw_moments,
    sample_nb,
    sample_poisson,
)


class TestSeededStream:
    def test_rejects_negative_seed(self):
        with pytest.raises(ValueError):
            SeededStream(-1)

    def test_rejects_oversized_stream_id(self):
        with pytest.raises(ValueError):
            SeededStream(0, 2**64)

    def test_spawn_changes_stream_only(self):
        s = SeededStream(7, 3).spawn(9)
        assert (s.seed, s.stream_id) == (7, 9)


class TestDeterminism:
    def test_same_stream_same_draws(self):
        a = sample_nb(NbParams(1, 1), 1000, SeededStream(42, 5))
        b = sample_nb(NbParams(1, 1), 1000, SeededStream(42, 5))
        assert np.array_equal(a, b)

    def test_different_stream_differs(self):
        a = sample_nb(NbParams(1, 1), 1000, SeededStream(42, 5))
        b = sample_nb(NbParams(1, 1), 1000, SeededStream(42, 6))
        c = sample_nb(NbParams(1, 1), 1000, SeededStream(43, 5))
        assert not np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_replicates_independent_of_order(self):
        # replicate r keyed by stream_id=r: drawing r=3 alone equals drawing
        # it after the others
        params = NbParams(0.3, 0.3)
        alone = sample_nb(params, 50, SeededStream(1, 3))
        for r in (0, 1, 2):
            sample_nb(params, 50, SeededStream(1, r))
        again = sample_nb(params, 50, SeededStream(1, 3))
        assert np.array_equal(alone, again)

    def test_poisson_branch_delegates(self):
        stream = SeededStream(11, 0)
        assert np.array_equal(
            sample_nb(NbParams(2.5, 0), 500, stream),
            sample_poisson(2.5, 500, stream),
        )


class TestValidation:
    def test_zero_size_rejected(self):
        with pytest.raises(ValueError):
            sample_nb(NbParams(1, 1), 0, SeededStream(0))

    def test_nonpositive_mu_rejected(self):
        with pytest.raises(ValueError):
            sample_poisson(0.0, 10, SeededStream(0))

    def test_outputs_are_nonnegative_int64(self):
        x = sample_nb(NbParams(0.3, 10), 1000, SeededStream(3))
        assert x.dtype == np.int64
        assert x.min() >= 0


def _chi2_pvalue(params, draws, seed):
    """Chi-squared GOF of sampled counts against pmf, tail bins pooled to
    expected count >= 5."""
    x = sample_nb(params, draws, SeededStream(seed))
    kmax = int(x.max())
    support = np.arange(kmax + 1)
    probs = pmf(params, support)
    observed = np.bincount(x, minlength=kmax + 1).astype(float)
    # closing bin for the unobserved upper tail
    observed = np.append(observed, 0.0)
    expected = draws * np.append(probs, max(1.0 - probs.sum(), 0.0))
    # pool from the right until every bin expects at least 5
    obs, exp = list(observed), list(expected)
    while len(exp) > 1 and exp[-1] < 5.0:
        exp[-2] += exp.pop()
        obs[-2] += obs.pop()
    obs, exp = np.asarray(obs), np.asarray(exp)
    stat = float(np.sum((obs - exp) ** 2 / exp))
    return chi2.sf(stat, df=len(exp) - 1)


@pytest.mark.parametrize("mu,p", [(1.0, 1.0), (3.0, 0.3), (0.3, 10.0)])
def test_goodness_of_fit(mu, p):
    assert _chi2_pvalue(NbParams(mu, p), draws=100_000, seed=2026) > 0.001


@pytest.mark.parametrize("mu,p", [(1.0, 1.0), (3.0, 0.3), (0.3, 10.0)])
def test_moment_match(mu, p):
    params = NbParams(mu, p)
    draws = 100_000
    x = sample_nb(params, draws, SeededStream(99)).astype(np.float64)
    m = raw_moments(params)
    se_mean = math.sqrt((m.m2 - m.m1**2) / draws)
    se_m2 = math.sqrt((m.m4 - m.m2**2) / draws)
    assert abs(x.mean() - m.m1) <= 5 * se_mean
    assert abs(np.mean(x**2) - m.m2) <= 5 * se_m2


def test_nb_empirical_mean_large_sample():
    x = sample_nb(NbParams(1, 1), 10**6, SeededStream(5))
    assert abs(x.mean() - 1.0) <= 4 * math.sqrt(2.0 / 10**6)


def test_poisson_equidispersion():
    x = sample_nb(NbParams(3, 0), 10**6, SeededStream(6)).astype(np.float64)
    ratio = x.var() / x.mean()
    assert abs(ratio - 1.0) <= 0.01


def test_poisson_zero_fraction():
    x = sample_poisson(0.1, 10**6, SeededStream(7))
    assert abs(np.mean(x == 0) - math.exp(-0.1)) <= 0.002


def test_poisson_empirical_mean():
    x = sample_poisson(5.0, 10**6, SeededStream(8))
    assert abs(x.mean() - 5.0) <= 4 * math.sqrt(5.0 / 10**6)
