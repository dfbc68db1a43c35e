import math

import numpy as np
import pytest
from scipy.stats import poisson

from nbregion import (
    ClassicParams,
    DomainInvalid,
    NbParams,
    NegativeCount,
    RawMoments,
    from_classic,
    mean_variance,
    pgf,
    pmf,
    raw_moments,
    to_classic,
)
from oracles import PARAM_GRID, brute_moments, chebyshev_cutoff, normalization_sum


class TestNbParams:
    def test_rejects_nonpositive_mu(self):
        with pytest.raises(ValueError):
            NbParams(0.0, 1.0)
        with pytest.raises(ValueError):
            NbParams(-1.0, 1.0)

    def test_rejects_negative_or_nonfinite_p(self):
        with pytest.raises(ValueError):
            NbParams(1.0, -0.1)
        with pytest.raises(ValueError):
            NbParams(1.0, float("nan"))

    def test_poisson_flag(self):
        assert NbParams(1.0, 0.0).is_poisson
        assert not NbParams(1.0, 0.5).is_poisson


class TestPmf:
    def test_geometric_case_x0(self):
        # mu = P = 1 reduces to geometric with success probability 1/2
        assert pmf(NbParams(1, 1), 0) == pytest.approx(0.5, rel=1e-12)

    def test_geometric_case_x3(self):
        assert pmf(NbParams(1, 1), 3) == pytest.approx(0.0625, rel=1e-12)

    def test_poisson_branch(self):
        assert pmf(NbParams(2, 0), 0) == pytest.approx(math.exp(-2), rel=1e-12)
        assert pmf(NbParams(2, 0), 3) == pytest.approx(
            math.exp(-2) * 8 / 6, rel=1e-12
        )

    def test_array_input_matches_scalars(self):
        params = NbParams(2.5, 0.7)
        xs = np.arange(20)
        vec = pmf(params, xs)
        assert vec.shape == (20,)
        for x in xs:
            assert vec[x] == pmf(params, int(x))

    def test_negative_x_rejected(self):
        with pytest.raises(NegativeCount):
            pmf(NbParams(1, 1), -1)

    def test_fractional_x_rejected(self):
        with pytest.raises(ValueError):
            pmf(NbParams(1, 1), 1.5)

    @pytest.mark.parametrize("params", PARAM_GRID, ids=str)
    def test_values_are_probabilities(self, params):
        vals = pmf(params, np.arange(200))
        assert np.all(vals >= 0.0)
        assert np.all(vals <= 1.0)

    @pytest.mark.parametrize("params", PARAM_GRID, ids=str)
    def test_normalization(self, params):
        total = normalization_sum(params, mass=1e-10)
        assert total >= 1.0 - 1e-10
        # positive terms: no partial sum can exceed the full sum
        assert total <= 1.0 + 1e-12

    @pytest.mark.parametrize("mu", [0.3, 1.0, 3.0])
    def test_poisson_limit_continuity(self, mu):
        near = NbParams(mu, 1e-8)
        x = np.arange(chebyshev_cutoff(near, 1e-10) + 1)
        diff = np.abs(pmf(near, x) - pmf(NbParams(mu, 0.0), x))
        assert diff.max() < 1e-6

    @pytest.mark.parametrize("mu", [0.3, 1.0, 3.0])
    def test_poisson_branch_against_scipy(self, mu):
        x = np.arange(100)
        assert pmf(NbParams(mu, 0.0), x) == pytest.approx(
            poisson.pmf(x, mu), rel=1e-10, abs=1e-300
        )


class TestPgf:
    def test_unit_argument(self):
        assert pgf(NbParams(3, 2), 1.0) == pytest.approx(1.0, rel=1e-12)

    def test_zero_argument_equals_p0(self):
        assert pgf(NbParams(1, 1), 0.0) == pytest.approx(0.5, rel=1e-12)

    def test_poisson_branch(self):
        assert pgf(NbParams(2, 0), 0.0) == pytest.approx(math.exp(-2), rel=1e-12)

    def test_divergent_argument_rejected(self):
        with pytest.raises(DomainInvalid):
            pgf(NbParams(1, 1), 2.0)  # base hits zero
        with pytest.raises(DomainInvalid):
            pgf(NbParams(1, 1), 3.0)  # base negative

    @pytest.mark.parametrize("z", [-0.5, 0.0, 0.5, 0.9])
    @pytest.mark.parametrize("params", PARAM_GRID, ids=str)
    def test_matches_series(self, params, z):
        x = np.arange(chebyshev_cutoff(params, 1e-10) + 1)
        series = math.fsum(np.power(z, x.astype(np.float64)) * pmf(params, x))
        assert pgf(params, z) == pytest.approx(series, abs=1e-8)


class TestRawMoments:
    def test_second_moment_anchor(self):
        assert raw_moments(NbParams(1, 1)).m2 == pytest.approx(3.0, rel=1e-12)

    def test_poisson_moments(self):
        m = raw_moments(NbParams(1, 0))
        assert (m.m1, m.m2, m.m3, m.m4) == pytest.approx((1, 2, 5, 15), rel=1e-12)

    def test_substitution_anchor(self):
        m = raw_moments(NbParams(2, 3))
        assert (m.m1, m.m2, m.m3, m.m4) == pytest.approx(
            (2, 12, 112, 1432), rel=1e-12
        )

    def test_large_parameter_anchor(self):
        m = raw_moments(NbParams(10, 10))
        assert (m.m1, m.m2, m.m3, m.m4) == pytest.approx(
            (10, 210, 6610, 277410), rel=1e-12
        )

    @pytest.mark.parametrize("params", PARAM_GRID, ids=str)
    def test_brute_force_consistency(self, params):
        closed = raw_moments(params)
        brute = brute_moments(params)
        assert (closed.m1, closed.m2, closed.m3, closed.m4) == pytest.approx(
            brute, rel=1e-8
        )

    @pytest.mark.parametrize("params", PARAM_GRID, ids=str)
    def test_variance_identity(self, params):
        m = raw_moments(params)
        _, var = mean_variance(params)
        assert m.m2 - m.m1**2 == pytest.approx(var, rel=1e-12)

    def test_jensen_ordering_enforced(self):
        with pytest.raises(ValueError):
            RawMoments(2.0, 1.0, 1.0, 1.0)  # m2 < m1^2
        with pytest.raises(ValueError):
            RawMoments(1.0, 2.0, 3.0, 3.0)  # m4 < m2^2


class TestMeanVariance:
    def test_anchors(self):
        assert mean_variance(NbParams(3, 0.3)) == pytest.approx((3.0, 3.9), rel=1e-12)
        assert mean_variance(NbParams(5, 0)) == pytest.approx((5.0, 5.0), rel=1e-12)
        assert mean_variance(NbParams(1, 10)) == pytest.approx((1.0, 11.0), rel=1e-12)

    @pytest.mark.parametrize("params", PARAM_GRID, ids=str)
    def test_variance_at_least_mean(self, params):
        mean, var = mean_variance(params)
        assert var >= mean
        assert (var == mean) == params.is_poisson


class TestClassicConversion:
    def test_forward_anchor(self):
        c = to_classic(NbParams(1, 1))
        assert (c.p_success, c.alpha) == pytest.approx((0.5, 1.0), rel=1e-12)

    def test_backward_anchor(self):
        params = from_classic(ClassicParams(0.25, 2))
        assert (params.mu, params.p_shape) == pytest.approx((6.0, 3.0), rel=1e-12)

    def test_poisson_limit_rejected(self):
        with pytest.raises(DomainInvalid):
            to_classic(NbParams(3, 0))

    @pytest.mark.parametrize(
        "params", [p for p in PARAM_GRID if p.p_shape > 0], ids=str
    )
    def test_round_trip(self, params):
        back = from_classic(to_classic(params))
        assert back.mu == pytest.approx(params.mu, rel=1e-12)
        assert back.p_shape == pytest.approx(params.p_shape, rel=1e-12)
