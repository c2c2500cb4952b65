"""Harmonic sums, the service law and order-statistic moments."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from agecast.order_stats import (
    HarmonicCache,
    ServiceDistribution,
    harmonic,
    harmonic2,
    order_stat_mean,
    order_stat_moments,
    order_stat_var,
    sample,
)

ZETA2 = math.pi**2 / 6.0


class TestHarmonic:
    def test_empty_sum(self):
        assert harmonic(0) == 0.0
        assert harmonic2(0) == 0.0

    def test_small_values(self):
        assert harmonic(1) == 1.0
        assert harmonic(2) == 1.5
        assert harmonic2(1) == 1.0
        assert harmonic2(2) == 1.25

    def test_direct_summation(self):
        assert harmonic(10) == pytest.approx(2.9289682539682538, rel=1e-12)
        assert harmonic2(5) == pytest.approx(1.4636111111111112, rel=1e-12)

    def test_matches_compensated_sum_at_large_n(self):
        n = 100_000
        j = np.arange(1, n + 1, dtype=np.float64)
        assert harmonic(n) == pytest.approx(math.fsum(1.0 / j), rel=1e-12)
        assert harmonic2(n) == pytest.approx(math.fsum(1.0 / j**2), rel=1e-12)

    def test_step_invariant(self):
        cache = HarmonicCache()
        for n in (1, 2, 17, 1023, 1024, 1025, 4096, 50_000):
            step = cache.harmonic(n) - cache.harmonic(n - 1)
            assert step == pytest.approx(1.0 / n, abs=1e-12)

    def test_harmonic2_bounded_by_zeta2(self):
        for n in (1, 5, 100, 10_000):
            value = harmonic2(n)
            assert value < ZETA2
            assert ZETA2 - value < 1.0 / n

    def test_negative_index_rejected(self):
        with pytest.raises(ValueError, match="nonnegative"):
            harmonic(-1)
        with pytest.raises(ValueError, match="nonnegative"):
            harmonic2(-3)

    def test_capacity_exceeded_rejected(self):
        cache = HarmonicCache(capacity=100)
        assert cache.harmonic(100) > 0
        with pytest.raises(ValueError, match="capacity"):
            cache.harmonic(101)
        with pytest.raises(ValueError, match="capacity"):
            cache.harmonic2(101)

    def test_bad_capacity_rejected(self):
        with pytest.raises(ValueError, match="capacity"):
            HarmonicCache(capacity=0)


class TestServiceDistribution:
    def test_mean_and_kind(self):
        exp = ServiceDistribution.exponential(2.0)
        assert exp.mean() == 0.5
        assert exp.kind == "exp"
        sexp = ServiceDistribution.shifted_exponential(2.0, 1.0)
        assert sexp.mean() == 1.5
        assert sexp.kind == "sexp"

    def test_cdf(self):
        dist = ServiceDistribution(rate=1.0, shift=1.0)
        assert dist.cdf(0.5) == 0.0
        assert dist.cdf(1.0) == 0.0
        assert dist.cdf(2.0) == pytest.approx(1.0 - math.exp(-1.0), rel=1e-12)
        grid = dist.cdf(np.array([0.0, 1.0, 3.0]))
        assert grid[0] == 0.0
        assert grid[2] == pytest.approx(1.0 - math.exp(-2.0), rel=1e-12)

    def test_quantile(self):
        dist = ServiceDistribution(rate=1.0, shift=2.0)
        assert dist.quantile(0.0) == 2.0
        assert dist.quantile(1.0 - math.exp(-1.0)) == pytest.approx(3.0, rel=1e-12)

    def test_quantile_domain(self):
        dist = ServiceDistribution.exponential(1.0)
        with pytest.raises(ValueError, match=r"\[0, 1\)"):
            dist.quantile(1.0)
        with pytest.raises(ValueError, match=r"\[0, 1\)"):
            dist.quantile(-0.1)

    def test_cdf_inverts_quantile(self):
        dist = ServiceDistribution(rate=0.7, shift=1.3)
        u = np.linspace(0.0, 0.999, 50)
        assert dist.cdf(dist.quantile(u)) == pytest.approx(u, abs=1e-12)

    def test_invalid_parameters(self):
        with pytest.raises(ValueError, match="rate"):
            ServiceDistribution(rate=0.0)
        with pytest.raises(ValueError, match="rate"):
            ServiceDistribution(rate=-1.0)
        with pytest.raises(ValueError, match="rate"):
            ServiceDistribution(rate=math.nan)
        with pytest.raises(ValueError, match="shift"):
            ServiceDistribution(rate=1.0, shift=-0.5)
        with pytest.raises(ValueError, match="shift"):
            ServiceDistribution(rate=1.0, shift=math.inf)

    def test_sample_scalar_and_shape(self):
        dist = ServiceDistribution(rate=2.0, shift=1.0)
        rng = np.random.default_rng(42)
        one = dist.sample(rng)
        assert isinstance(one, float)
        assert one >= 1.0
        block = dist.sample(rng, (100, 3))
        assert block.shape == (100, 3)
        assert block.min() >= 1.0

    def test_sample_mean_law_of_large_numbers(self):
        dist = ServiceDistribution(rate=2.0, shift=1.0)
        rng = np.random.default_rng(2025)
        draws = sample(dist, rng, 1_000_000)
        se = draws.std(ddof=1) / math.sqrt(draws.size)
        assert abs(draws.mean() - 1.5) < 4.0 * se

    def test_sample_module_function_matches_method(self):
        dist = ServiceDistribution(rate=1.0, shift=0.5)
        a = dist.sample(np.random.default_rng(7), 10)
        b = sample(dist, np.random.default_rng(7), 10)
        assert np.array_equal(a, b)


class TestOrderStatMoments:
    def test_single_draw(self):
        exp = ServiceDistribution.exponential(1.0)
        assert order_stat_mean(exp, 1, 1) == 1.0
        assert order_stat_var(exp, 1, 1) == 1.0

    def test_max_of_two_shifted(self):
        dist = ServiceDistribution(rate=1.0, shift=1.0)
        assert order_stat_mean(dist, 2, 2) == pytest.approx(2.5, rel=1e-12)
        assert order_stat_var(dist, 2, 2) == pytest.approx(1.25, rel=1e-12)

    def test_min_of_two(self):
        dist = ServiceDistribution.exponential(2.0)
        assert order_stat_mean(dist, 1, 2) == pytest.approx(0.25, rel=1e-12)

    def test_var_frozen_value(self):
        dist = ServiceDistribution.exponential(2.0)
        assert order_stat_var(dist, 2, 2) == pytest.approx(0.3125, rel=1e-12)

    def test_moments_bundle(self):
        dist = ServiceDistribution(rate=1.0, shift=1.0)
        bundle = order_stat_moments(dist, 2, 3)
        assert bundle.mean == order_stat_mean(dist, 2, 3)
        assert bundle.var == order_stat_var(dist, 2, 3)
        assert (bundle.k, bundle.n) == (2, 3)

    def test_mean_strictly_increasing_in_rank(self):
        for rate, shift in ((1.0, 0.0), (2.0, 1.0)):
            dist = ServiceDistribution(rate=rate, shift=shift)
            for n in (2, 5, 50, 200):
                means = [order_stat_mean(dist, k, n) for k in range(1, n + 1)]
                assert all(b > a for a, b in zip(means, means[1:]))
                variances = [order_stat_var(dist, k, n) for k in range(1, n + 1)]
                assert all(b >= a for a, b in zip(variances, variances[1:]))

    def test_top_step_is_full_scale(self):
        # the gap between the two largest order statistics is 1/rate
        for n in (2, 7, 100):
            dist = ServiceDistribution(rate=4.0, shift=0.5)
            gap = order_stat_mean(dist, n, n) - order_stat_mean(dist, n - 1, n)
            assert gap == pytest.approx(1.0 / 4.0, abs=1e-12)

    def test_rank_domain_errors(self):
        dist = ServiceDistribution.exponential(1.0)
        with pytest.raises(ValueError, match="k"):
            order_stat_mean(dist, 0, 3)
        with pytest.raises(ValueError, match="k"):
            order_stat_mean(dist, 4, 3)
        with pytest.raises(ValueError, match="n"):
            order_stat_var(dist, 1, 0)

    @pytest.mark.parametrize(
        "seed,k,n,rate,shift",
        [(11, 2, 3, 1.0, 0.0), (12, 1, 4, 2.5, 1.5), (13, 5, 5, 0.7, 0.2)],
    )
    def test_monte_carlo_agreement(self, seed, k, n, rate, shift):
        dist = ServiceDistribution(rate=rate, shift=shift)
        rng = np.random.default_rng(seed)
        draws = 400_000
        col = np.sort(dist.sample(rng, (draws, n)), axis=1)[:, k - 1]
        mean_se = col.std(ddof=1) / math.sqrt(draws)
        assert abs(col.mean() - order_stat_mean(dist, k, n)) < 4.0 * mean_se
        centered = (col - col.mean()) ** 2
        var_se = centered.std(ddof=1) / math.sqrt(draws)
        assert abs(col.var(ddof=1) - order_stat_var(dist, k, n)) < 4.0 * var_se


class TestMomentProperties:
    @given(
        n=st.integers(min_value=2, max_value=300),
        data=st.data(),
        rate=st.floats(min_value=0.1, max_value=10.0),
        shift=st.floats(min_value=0.0, max_value=5.0),
    )
    @settings(max_examples=100, deadline=None)
    def test_mean_telescopes(self, n, data, rate, shift):
        k = data.draw(st.integers(min_value=2, max_value=n))
        dist = ServiceDistribution(rate=rate, shift=shift)
        step = order_stat_mean(dist, k, n) - order_stat_mean(dist, k - 1, n)
        assert step == pytest.approx(1.0 / (rate * (n - k + 1)), rel=1e-9)

    @given(
        n=st.integers(min_value=1, max_value=300),
        data=st.data(),
        rate=st.floats(min_value=0.1, max_value=10.0),
        shift=st.floats(min_value=0.0, max_value=5.0),
    )
    @settings(max_examples=100, deadline=None)
    def test_var_ignores_shift(self, n, data, rate, shift):
        k = data.draw(st.integers(min_value=1, max_value=n))
        shifted = ServiceDistribution(rate=rate, shift=shift)
        plain = ServiceDistribution(rate=rate, shift=0.0)
        assert order_stat_var(shifted, k, n) == order_stat_var(plain, k, n)
