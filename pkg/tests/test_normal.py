import numpy as np
import pytest

from poissoneb import (
    CountSample,
    kernel_density,
    modified_normal,
    normal_rule,
    vst,
)


class TestVst:
    def test_values(self):
        assert vst(0, 0.25) == 1.0
        assert vst(0, 0.0) == 0.0
        assert vst(4, 0.0) == 4.0

    def test_errors(self):
        with pytest.raises(ValueError):
            vst(-1, 0.0)
        with pytest.raises(ValueError):
            vst(0, -0.5)


class TestKernelDensity:
    def test_derivative_zero_at_single_point(self):
        kde = kernel_density([2.5], 0.8)
        g, gp = kde.density_and_derivative(2.5)
        assert gp[0] == pytest.approx(0.0, abs=1e-15)
        assert g[0] > 0

    def test_derivative_zero_between_symmetric_points(self):
        kde = kernel_density([-1.5, 1.5], 1.0)
        _, gp = kde.density_and_derivative(0.0)
        assert gp[0] == pytest.approx(0.0, abs=1e-15)

    def test_integrates_to_one(self):
        rng = np.random.default_rng(60)
        zs = rng.normal(5.0, 2.0, size=40)
        for bw in (0.3, 1.1):
            kde = kernel_density(zs, bw)
            grid = np.linspace(zs.min() - 10 * bw, zs.max() + 10 * bw, 20001)
            total = np.trapezoid(kde(grid), grid)
            assert total == pytest.approx(1.0, abs=1e-6)

    def test_positive_everywhere(self):
        kde = kernel_density([0.0, 8.0], 0.5)
        assert (kde(np.linspace(-20, 30, 101)) > 0).all()

    def test_bad_bandwidth(self):
        with pytest.raises(ValueError):
            kernel_density([1.0], 0.0)

    def test_gradient_matches_log_density_derivative(self):
        # g'/g must agree with a central finite difference of log g
        rng = np.random.default_rng(61)
        zs = rng.normal(6.0, 1.5, size=60)
        kde = kernel_density(zs, 0.7)
        grid = np.linspace(zs.min(), zs.max(), 41)
        g, gp = kde.density_and_derivative(grid)
        eps = 1e-5
        fd = (np.log(kde(grid + eps)) - np.log(kde(grid - eps))) / (2 * eps)
        assert np.allclose(gp / g, fd, atol=1e-6)


class TestNormalRule:
    def test_single_observation_fixed_point(self):
        rule = normal_rule([3.3], 0.9)
        assert rule(3.3) == pytest.approx(3.3, abs=1e-12)

    def test_all_equal_pull_to_atom(self):
        rule = normal_rule([2.0] * 5, 0.5)
        assert rule(2.0) == pytest.approx(2.0, abs=1e-12)
        assert rule(3.0) < 3.0   # pulled back toward the atom
        assert rule(1.0) > 1.0

    def test_midpoint_symmetry(self):
        rule = normal_rule([0.0, 2.0], 1.0)
        assert rule(1.0) == pytest.approx(1.0, abs=1e-12)
        # antisymmetry of g' around the midpoint
        kde = kernel_density([0.0, 2.0], 1.0)
        _, gp_left = kde.density_and_derivative(0.6)
        _, gp_right = kde.density_and_derivative(1.4)
        assert gp_left[0] == pytest.approx(-gp_right[0], rel=1e-10)

    def test_shrinkage_sign(self):
        rng = np.random.default_rng(62)
        zs = rng.normal(6.0, 1.0, size=50)
        rule = normal_rule(zs, 0.8)
        below, above = zs.min() - 2.0, zs.max() + 2.0
        assert rule(below) > below
        assert rule(above) < above


class TestModifiedNormal:
    def test_degenerate_offset(self):
        # all-equal sample: the estimate is exactly c + q
        for c, q in [(5, 0.25), (3, 0.0), (9, 0.25)]:
            rule = modified_normal(CountSample([c] * 6), 0.5, q)
            assert rule.values.tolist() == pytest.approx([c + q], abs=1e-12)

    def test_zeros_with_q0(self):
        rule = modified_normal(CountSample([0, 0, 0]), 0.5, 0.0)
        assert rule.values.tolist() == [0.0]

    def test_monotone_nonnegative(self):
        rng = np.random.default_rng(63)
        for _ in range(20):
            counts = rng.poisson(rng.uniform(0.5, 12.0), size=rng.integers(5, 200))
            rule = modified_normal(CountSample(counts), rng.uniform(0.2, 1.4),
                                   rng.choice([0.0, 0.25]))
            assert rule.monotone
            assert (np.diff(rule.values) >= 0).all()
            assert (rule.values >= 0).all()
