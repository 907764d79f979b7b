import itertools

import numpy as np
import pytest

from poissoneb import WeightedSeries, isotonic_fit, pava


def brute_force_isotonic(values, weights):
    """Exhaustive minimization over consecutive-block partitions.

    Every monotone least-squares fit is piecewise constant on consecutive
    blocks with nondecreasing weighted block means; enumerating all 2^(L-1)
    partitions and keeping the feasible ones recovers the exact optimum.
    """
    values = np.asarray(values, float)
    weights = np.asarray(weights, float)
    L = len(values)
    best_obj, best_fit = np.inf, None
    for cuts in itertools.product([0, 1], repeat=L - 1):
        bounds = [0] + [i + 1 for i, c in enumerate(cuts) if c] + [L]
        means = []
        for a, b in zip(bounds, bounds[1:]):
            means.append(float(weights[a:b] @ values[a:b] / weights[a:b].sum()))
        if any(m2 < m1 for m1, m2 in zip(means, means[1:])):
            continue
        fit = np.concatenate([np.full(b - a, m) for (a, b), m in
                              zip(zip(bounds, bounds[1:]), means)])
        obj = float(weights @ (fit - values) ** 2)
        if obj < best_obj:
            best_obj, best_fit = obj, fit
    return best_fit, best_obj


class TestExamples:
    def test_unit_weights(self):
        out = isotonic_fit([3.0, 1.0, 2.0], [1.0, 1.0, 1.0])
        assert out.tolist() == [2.0, 2.0, 2.0]

    def test_feasible_unchanged(self):
        v = [0.5, 0.5, 1.0, 4.0]
        out = isotonic_fit(v, [1.0, 2.0, 1.0, 3.0])
        assert out.tolist() == v

    def test_weighted_pool(self):
        out = isotonic_fit([5.0, 4.0], [1.0, 3.0])
        assert out.tolist() == [4.25, 4.25]

    def test_series_interface(self):
        series = WeightedSeries([0, 1, 2], [3.0, 1.0, 2.0], [1.0, 1.0, 1.0])
        assert pava(series).tolist() == [2.0, 2.0, 2.0]


class TestProperties:
    def _random_instance(self, rng, max_len=12):
        L = rng.integers(1, max_len + 1)
        v = rng.normal(scale=3.0, size=L)
        w = rng.uniform(0.2, 5.0, size=L)
        return v, w

    def test_nondecreasing(self):
        rng = np.random.default_rng(10)
        for _ in range(200):
            v, w = self._random_instance(rng)
            out = isotonic_fit(v, w)
            assert (np.diff(out) >= 0).all()

    def test_idempotent(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            v, w = self._random_instance(rng)
            once = isotonic_fit(v, w)
            twice = isotonic_fit(once, w)
            assert np.allclose(once, twice, atol=1e-12)

    def test_weighted_mean_preserved(self):
        rng = np.random.default_rng(12)
        for _ in range(200):
            v, w = self._random_instance(rng)
            out = isotonic_fit(v, w)
            assert w @ out == pytest.approx(w @ v, abs=1e-10)

    def test_scaling_equivariance(self):
        rng = np.random.default_rng(13)
        for _ in range(100):
            v, w = self._random_instance(rng)
            c = rng.uniform(0.1, 10.0)
            assert np.allclose(isotonic_fit(c * v, w), c * isotonic_fit(v, w),
                               atol=1e-10)

    def test_optimality_vs_brute_force(self):
        rng = np.random.default_rng(14)
        for _ in range(150):
            L = rng.integers(1, 7)
            v = rng.normal(scale=2.0, size=L)
            w = rng.uniform(0.3, 4.0, size=L)
            fit = isotonic_fit(v, w)
            oracle_fit, oracle_obj = brute_force_isotonic(v, w)
            assert np.allclose(fit, oracle_fit, atol=1e-6)
            assert w @ (fit - v) ** 2 == pytest.approx(oracle_obj, abs=1e-6)


class TestValidation:
    def test_empty(self):
        with pytest.raises(ValueError, match="empty"):
            isotonic_fit(np.array([]), np.array([]))

    def test_bad_weights(self):
        with pytest.raises(ValueError):
            WeightedSeries([0, 1], [1.0, 2.0], [1.0, 0.0])

    def test_xs_strictly_increasing(self):
        with pytest.raises(ValueError):
            WeightedSeries([0, 0], [1.0, 2.0], [1.0, 1.0])
