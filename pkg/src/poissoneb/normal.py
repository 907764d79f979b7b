"""Normal-transform empirical Bayes for Poisson counts.

Counts are carried to approximate normality by z = 2 sqrt(y + q), shrunk
on the z-scale by the kernel-based rule z + g'(z)/g(z), mapped back by
lambda = mu^2 / 4, and isotonized over the observed support.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import CountSample, DecisionRule, empirical_pmf
from .isotonic import isotonic_fit

__all__ = [
    "TransformedSample",
    "KernelEstimate",
    "vst",
    "transform_sample",
    "kernel_density",
    "normal_rule",
    "modified_normal",
]

_SQRT2PI = np.sqrt(2.0 * np.pi)


def vst(y: int, q: float) -> float:
    """Variance-stabilizing transform 2 sqrt(y + q)."""
    if y < 0 or q < 0:
        raise ValueError("y and q must be nonnegative")
    return 2.0 * np.sqrt(y + q)


@dataclass(frozen=True)
class TransformedSample:
    """Transformed observations z_i = 2 sqrt(y_i + q); unit variance."""

    z_values: np.ndarray
    q: float
    sigma2: float = 1.0

    def __post_init__(self):
        z = np.asarray(self.z_values, dtype=float)
        z.setflags(write=False)
        object.__setattr__(self, "z_values", z)


def transform_sample(sample: CountSample, q: float) -> TransformedSample:
    if q < 0:
        raise ValueError("q must be nonnegative")
    return TransformedSample(2.0 * np.sqrt(sample.counts + q), float(q))


class KernelEstimate:
    """Gaussian kernel density with its exact analytic derivative.

    g(z)  = (1/n) sum phi_b(z - Z_i)
    g'(z) = (1/n) sum -(z - Z_i)/b^2 phi_b(z - Z_i)
    """

    def __init__(self, points: np.ndarray, bandwidth: float):
        if bandwidth <= 0:
            raise ValueError("bandwidth must be positive")
        points = np.asarray(points, dtype=float)
        if points.size == 0:
            raise ValueError("kernel estimate needs at least one point")
        self.points = points
        self.bandwidth = float(bandwidth)

    def density_and_derivative(self, z) -> tuple[np.ndarray, np.ndarray]:
        z = np.atleast_1d(np.asarray(z, dtype=float))
        b = self.bandwidth
        u = (z[:, None] - self.points[None, :]) / b
        k = np.exp(-0.5 * u * u) / (b * _SQRT2PI)
        g = k.mean(axis=1)
        gp = (-u / b * k).mean(axis=1)
        return g, gp

    def __call__(self, z):
        return self.density_and_derivative(z)[0]


def kernel_density(zs, bandwidth: float) -> KernelEstimate:
    return KernelEstimate(np.asarray(zs, dtype=float), bandwidth)


def normal_rule(zs, bandwidth: float, sigma2: float = 1.0):
    """The kernel plug-in posterior-mean rule z -> z + sigma^2 g'(z)/g(z)."""
    kde = kernel_density(zs, bandwidth)

    def rule(z):
        scalar = np.isscalar(z)
        g, gp = kde.density_and_derivative(z)
        out = np.atleast_1d(np.asarray(z, dtype=float)) + sigma2 * gp / g
        return float(out[0]) if scalar else out

    return rule


def modified_normal(sample: CountSample, bandwidth: float, q: float = 0.25) -> DecisionRule:
    """Transform, shrink on the z-scale, back-transform, isotonize.

    The z-scale estimate is clamped at 0 before squaring: mu = 2 sqrt(lambda)
    is nonnegative by construction, and squaring a negative estimate would
    turn it into a large positive one.
    """
    pmf = empirical_pmf(sample)
    ts = transform_sample(sample, q)
    rule = normal_rule(ts.z_values, bandwidth, ts.sigma2)
    z_support = 2.0 * np.sqrt(pmf.support + q)
    mu = np.maximum(rule(z_support), 0.0)
    lam = 0.25 * mu * mu
    values = np.maximum(isotonic_fit(lam, pmf.multiplicities.astype(float)), 0.0)
    return DecisionRule(pmf.support, values, monotone=True)
