import math

import numpy as np
import pytest

from poissoneb import (
    CountSample,
    DiscretePrior,
    fit_npmle,
    npmle_rule,
    poisson_pmf,
    stationarity_gap,
)
from poissoneb.npmle import loglik_via_ccdf


@pytest.fixture(scope="module")
def two_atom_fit():
    rng = np.random.default_rng(5)
    lam = rng.choice([2.0, 20.0], size=2000)
    sample = CountSample(rng.poisson(lam))
    return sample, fit_npmle(sample, tol=1e-7)


class TestFitNpmle:
    def test_degenerate_sample_concentrates(self):
        sample = CountSample([4] * 6)
        fit = fit_npmle(sample, grid_size=400, tol=1e-8)
        step = (sample.y_max + 1.0) / 399
        assert fit.prior.mean == pytest.approx(4.0, abs=step)

    def test_two_atom_recovery(self, two_atom_fit):
        sample, fit = two_atom_fit
        near2 = np.abs(fit.prior.lambdas - 2.0) < 1.0
        near20 = np.abs(fit.prior.lambdas - 20.0) < 1.5
        assert abs(fit.prior.weights[near2].sum() - 0.5) < 0.05
        assert abs(fit.prior.weights[near20].sum() - 0.5) < 0.05

    def test_loglik_path_nondecreasing(self, two_atom_fit):
        _, fit = two_atom_fit
        assert (np.diff(fit.loglik_path) >= -1e-9).all()
        assert fit.loglik >= fit.loglik_path[-1] - 1e-6

    def test_support_bound(self, two_atom_fit):
        sample, fit = two_atom_fit
        assert (fit.prior.weights > 1e-8).all()
        assert len(fit.prior.lambdas) < sample.y_max + 1

    def test_stationarity_certificate(self, two_atom_fit):
        _, fit = two_atom_fit
        assert fit.stationarity_gap <= 10 * 1e-7

    def test_flat_likelihood_configuration(self):
        sample = CountSample(np.random.default_rng(3).poisson(10.0, 500))
        fit = fit_npmle(sample, tol=1e-6)
        assert fit.stationarity_gap <= 10 * 1e-6
        assert len(fit.prior.lambdas) < sample.y_max + 1

    def test_atoms_inside_grid_range(self, two_atom_fit):
        sample, fit = two_atom_fit
        assert (fit.prior.lambdas >= 0).all()
        assert (fit.prior.lambdas <= sample.y_max + 1.0).all()

    def test_validation(self):
        with pytest.raises(ValueError):
            fit_npmle(CountSample([1]), grid_size=1)
        with pytest.raises(ValueError):
            fit_npmle(CountSample([1]), tol=0.0)


class TestStationarityGap:
    def test_fitted_prior_has_small_gap(self):
        sample = CountSample(np.random.default_rng(7).poisson(3.0, 300))
        fit = fit_npmle(sample, tol=1e-7)
        grid = np.linspace(0.0, sample.y_max + 1.0, 400)
        assert stationarity_gap(fit.prior, sample, grid) <= 1e-6

    def test_wrong_prior_large_gap(self):
        sample = CountSample(np.random.default_rng(8).poisson(10.0, 200))
        bad = DiscretePrior([1.0], [1.0])
        grid = np.linspace(0.1, sample.y_max + 1.0, 200)
        assert stationarity_gap(bad, sample, grid) > 1.0

    def test_single_observation_point_mass(self):
        # f(3|lam)/f(3|3) is maximized at lam = 3, so D <= 0 with equality there
        sample = CountSample([3])
        prior = DiscretePrior([3.0], [1.0])
        grid = np.linspace(0.0, 4.0, 201)
        gap = stationarity_gap(prior, sample, grid)
        assert gap <= 1e-12
        assert gap == pytest.approx(0.0, abs=1e-12)   # grid contains lam=3

    def test_incompatible_prior(self):
        with pytest.raises(ValueError, match="prior incompatible"):
            stationarity_gap(DiscretePrior([0.0], [1.0]), CountSample([2]),
                             np.linspace(0, 3, 10))


class TestNpmleRule:
    def test_degenerate_constant_rule(self):
        fit = fit_npmle(CountSample([5] * 8), tol=1e-8)
        rule = npmle_rule(fit, 12)
        assert np.allclose(rule.values, fit.prior.mean, atol=0.05)

    def test_values_in_atom_hull_and_monotone(self, two_atom_fit):
        _, fit = two_atom_fit
        rule = npmle_rule(fit, 40)
        lo, hi = fit.prior.lambdas.min(), fit.prior.lambdas.max()
        assert (rule.values >= lo - 1e-9).all()
        assert (rule.values <= hi + 1e-9).all()
        assert (np.diff(rule.values) >= 0).all()


class TestCcdfIdentity:
    def test_matches_direct_loglik(self, two_atom_fit):
        sample, fit = two_atom_fit
        direct = 0.0
        for y in sample.counts:
            py = sum(w * poisson_pmf(int(y), lam)
                     for w, lam in zip(fit.prior.weights, fit.prior.lambdas))
            direct += math.log(py)
        direct /= sample.n
        assert loglik_via_ccdf(fit.prior, sample) == pytest.approx(direct, abs=1e-10)

    def test_single_value_sample(self):
        prior = DiscretePrior([2.0, 5.0], [0.4, 0.6])
        sample = CountSample([0, 0, 0])
        expected = math.log(0.4 * math.exp(-2) + 0.6 * math.exp(-5))
        assert loglik_via_ccdf(prior, sample) == pytest.approx(expected, abs=1e-12)
