import math

import numpy as np
import pytest

from d2dcache import DomainError, harmonic_bounds, harmonic_sum, sample_requests, zipf_pmf


class TestHarmonicSum:
    def test_gamma_zero_counts_terms(self):
        assert harmonic_sum(0, 1, 10) == 10

    def test_single_term(self):
        assert harmonic_sum(0.5, 1, 1) == 1

    def test_direct_summation_value(self):
        expected = 1 + 2**-0.5 + 3**-0.5 + 4**-0.5  # 2.78446...
        assert harmonic_sum(0.5, 1, 4) == pytest.approx(expected, abs=1e-12)
        assert harmonic_sum(0.5, 1, 4) == pytest.approx(2.78446, abs=1e-5)

    def test_rejects_reversed_range(self):
        with pytest.raises(DomainError):
            harmonic_sum(0.5, 5, 4)

    def test_rejects_nonpositive_start(self):
        with pytest.raises(DomainError):
            harmonic_sum(0.5, 0, 4)


class TestHarmonicBounds:
    def test_power_branch_closed_form(self):
        lower, upper = harmonic_bounds(0.5, 1, 4)
        assert lower == pytest.approx(2 * (math.sqrt(5) - 1), abs=1e-12)
        assert upper == pytest.approx(3.0, abs=1e-12)

    def test_log_branch_closed_form(self):
        lower, upper = harmonic_bounds(1, 1, 10)
        assert lower == pytest.approx(math.log(11), abs=1e-12)
        assert upper == pytest.approx(math.log(10) + 1, abs=1e-12)

    def test_brackets_exact_value_gamma_zero(self):
        lower, upper = harmonic_bounds(0, 1, 5)
        assert lower <= 5 <= upper

    def test_brackets_randomized(self):
        rng = np.random.default_rng(42)
        for _ in range(500):
            gamma = rng.uniform(0, 2)
            if abs(gamma - 1) < 1e-9:
                continue
            x = int(rng.integers(1, 1000))
            y = x + int(rng.integers(0, 1000))
            h = harmonic_sum(gamma, x, y)
            lower, upper = harmonic_bounds(gamma, x, y)
            assert lower <= h <= upper


class TestZipfPmf:
    def test_two_file_values(self):
        demand = zipf_pmf(0.5, 2)
        assert demand.probs == pytest.approx([0.58579, 0.41421], abs=1e-5)

    def test_single_file(self):
        demand = zipf_pmf(0.5, 1)
        assert demand.probs.tolist() == [1.0]

    def test_normalization_large(self):
        demand = zipf_pmf(0.6, 1000)
        assert abs(demand.probs.sum() - 1) < 1e-12

    def test_monotone_decreasing(self):
        demand = zipf_pmf(0.3, 200)
        assert np.all(np.diff(demand.probs) < 0)

    @pytest.mark.parametrize("gamma", [0.0, 1.0, -0.2, 1.5])
    def test_rejects_gamma_outside_open_interval(self, gamma):
        with pytest.raises(DomainError):
            zipf_pmf(gamma, 10)

    def test_pmf_accessor_matches_formula(self):
        demand = zipf_pmf(0.4, 50)
        norm = harmonic_sum(0.4, 1, 50)
        for f in (1, 7, 50):
            assert demand.pmf(f) == pytest.approx(f**-0.4 / norm, rel=1e-14)


class TestSampleRequests:
    def test_degenerate_support(self):
        demand = zipf_pmf(0.5, 1)
        rng = np.random.default_rng(0)
        assert sample_requests(demand, 5, rng).tolist() == [1, 1, 1, 1, 1]

    def test_deterministic_under_seed(self):
        demand = zipf_pmf(0.5, 100)
        a = sample_requests(demand, 1000, np.random.default_rng(7))
        b = sample_requests(demand, 1000, np.random.default_rng(7))
        assert np.array_equal(a, b)

    def test_empirical_frequency_matches_pmf(self):
        demand = zipf_pmf(0.5, 2)
        draws = sample_requests(demand, 10**6, np.random.default_rng(3))
        freq = np.mean(draws == 1)
        p = demand.pmf(1)
        sigma = math.sqrt(p * (1 - p) / 10**6)
        assert abs(freq - p) < 3 * sigma

    def test_chi_square_goodness_of_fit(self):
        from scipy.stats import chisquare

        demand = zipf_pmf(0.7, 50)
        draws = sample_requests(demand, 10**6, np.random.default_rng(11))
        counts = np.bincount(draws, minlength=51)[1:]
        _, pvalue = chisquare(counts, 10**6 * demand.probs)
        assert pvalue > 0.001
