import math
from fractions import Fraction

import numpy as np
import pytest

from poissoneb import (
    CountSample,
    DecisionRule,
    DiscretePrior,
    apply_rule,
    empirical_pmf,
    poisson_pmf,
)


class TestCountSample:
    def test_basic(self):
        s = CountSample([0, 1, 1, 2])
        assert s.n == 4
        assert s.y_max == 2

    def test_empty_rejected(self):
        with pytest.raises(ValueError, match="empty sample"):
            CountSample([])

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            CountSample([1, -1])

    def test_immutable(self):
        s = CountSample([1, 2])
        with pytest.raises(ValueError):
            s.counts[0] = 5


class TestEmpiricalPmf:
    def test_counting(self):
        pmf = empirical_pmf(CountSample([0, 1, 1, 2]))
        assert pmf.n == 4
        assert pmf.support.tolist() == [0, 1, 2]
        assert pmf.probabilities.tolist() == [0.25, 0.5, 0.25]

    def test_singleton(self):
        pmf = empirical_pmf(CountSample([7]))
        assert pmf.support.tolist() == [7]
        assert pmf.probability(7) == 1.0
        assert pmf.n == 1

    def test_degenerate(self):
        pmf = empirical_pmf(CountSample([3, 3, 3, 3]))
        assert pmf.support.tolist() == [3]
        assert pmf.probability(3) == 1.0
        assert pmf.n == 4

    def test_probability_is_multiplicity_over_n(self):
        pmf = empirical_pmf(CountSample([0, 0, 5, 5, 5, 9]))
        for y, m in zip(pmf.support, pmf.multiplicities):
            assert pmf.probability(int(y)) == m / pmf.n
        assert pmf.probability(4) == 0.0

    def test_probabilities_sum_to_one_exactly(self):
        # exact rational check on the multiplicities
        rng = np.random.default_rng(0)
        for _ in range(20):
            counts = rng.integers(0, 12, size=rng.integers(1, 40))
            pmf = empirical_pmf(CountSample(counts))
            total = sum(Fraction(int(m), pmf.n) for m in pmf.multiplicities)
            assert total == 1

    def test_support_subset_of_observed(self):
        counts = [4, 4, 9, 2]
        pmf = empirical_pmf(CountSample(counts))
        assert set(pmf.support.tolist()) == set(counts)

    def test_dense_layout(self):
        pmf = empirical_pmf(CountSample([0, 2]))
        assert pmf.dense().tolist() == [0.5, 0.0, 0.5]


class TestPoissonPmf:
    def test_k0(self):
        assert poisson_pmf(0, 1.0) == pytest.approx(math.exp(-1), abs=1e-15)

    def test_degenerate_mean_zero(self):
        assert poisson_pmf(0, 0.0) == 1.0
        assert poisson_pmf(5, 0.0) == 0.0

    def test_direct_formula(self):
        assert poisson_pmf(2, 3.0) == pytest.approx(math.exp(-3) * 9 / 2, rel=1e-13)

    def test_large_k_finite(self):
        v = poisson_pmf(10**6, 10**6)
        assert 0.0 < v < 1.0 and np.isfinite(v)

    def test_tail_sum(self):
        for mean in (0.5, 3.0, 17.0, 120.0):
            K = int(mean + 12 * math.sqrt(mean) + 30)
            total = poisson_pmf(np.arange(K + 1), mean).sum()
            assert total >= 1 - 1e-10

    def test_errors(self):
        with pytest.raises(ValueError):
            poisson_pmf(-1, 1.0)
        with pytest.raises(ValueError):
            poisson_pmf(1, -1.0)


class TestDecisionRule:
    def test_lookup(self):
        rule = DecisionRule([0, 1, 2], [2.0, 1.0, 0.5])
        out = apply_rule(rule, CountSample([0, 1, 1, 2]))
        assert out.tolist() == [2.0, 1.0, 1.0, 0.5]

    def test_constant_rule(self):
        rule = DecisionRule([0, 1, 2, 3], [5.0] * 4)
        assert apply_rule(rule, CountSample([3, 0, 2])).tolist() == [5.0, 5.0, 5.0]

    def test_permutation_commutes(self):
        rng = np.random.default_rng(3)
        counts = rng.integers(0, 6, size=30)
        rule = DecisionRule(np.arange(6), rng.normal(size=6))
        perm = rng.permutation(30)
        direct = apply_rule(rule, CountSample(counts[perm]))
        permuted = apply_rule(rule, CountSample(counts))[perm]
        assert np.array_equal(direct, permuted)

    def test_undefined_value(self):
        rule = DecisionRule([0, 2], [1.0, 2.0])
        with pytest.raises(ValueError, match="rule undefined at y=1"):
            apply_rule(rule, CountSample([0, 1]))
        with pytest.raises(ValueError, match="rule undefined at y=3"):
            rule.at(3)

    def test_validation(self):
        with pytest.raises(ValueError):
            DecisionRule([2, 1], [0.0, 1.0])
        with pytest.raises(ValueError):
            DecisionRule([1, 2], [1.0, 0.5], monotone=True)
        with pytest.raises(ValueError):
            DecisionRule([1, 2], [1.0])


class TestDiscretePrior:
    def test_validation(self):
        with pytest.raises(ValueError):
            DiscretePrior([1.0, 1.0], [0.5, 0.5])
        with pytest.raises(ValueError):
            DiscretePrior([1.0, 2.0], [0.6, 0.6])
        with pytest.raises(ValueError):
            DiscretePrior([1.0, 2.0], [1.1, -0.1])

    def test_from_atoms_merges_duplicates(self):
        prior = DiscretePrior.from_atoms([5.0, 5.0, 15.0], [0.25, 0.25, 0.5])
        assert prior.lambdas.tolist() == [5.0, 15.0]
        assert prior.weights.tolist() == [0.5, 0.5]

    def test_moments(self):
        prior = DiscretePrior([1.0, 3.0], [0.5, 0.5])
        assert prior.mean == pytest.approx(2.0)
        assert prior.variance == pytest.approx(1.0)
