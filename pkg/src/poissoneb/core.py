"""Core data types shared by every estimator: count samples, empirical
pmfs, decision rules, discrete priors, and Poisson pmf evaluation.

All types are immutable after construction (arrays are marked read-only),
so instances can be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

__all__ = [
    "CountSample",
    "EmpiricalPmf",
    "DecisionRule",
    "DiscretePrior",
    "empirical_pmf",
    "poisson_pmf",
    "apply_rule",
]

WEIGHT_SUM_TOL = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class CountSample:
    """An ordered vector of observed nonnegative integer counts."""

    counts: np.ndarray

    def __init__(self, counts) -> None:
        arr = np.asarray(counts, dtype=np.int64)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("empty sample")
        if (arr < 0).any():
            raise ValueError("counts must be nonnegative integers")
        object.__setattr__(self, "counts", _frozen(arr))

    @property
    def n(self) -> int:
        return int(self.counts.size)

    @property
    def y_max(self) -> int:
        return int(self.counts.max())


@dataclass(frozen=True)
class EmpiricalPmf:
    """Empirical distribution of a count sample.

    Multiplicities are retained alongside probabilities because the
    isotonic projection step weights each support point by its
    observation count.
    """

    support: np.ndarray      # distinct observed values, strictly increasing
    multiplicities: np.ndarray
    n: int

    def __post_init__(self):
        object.__setattr__(self, "support", _frozen(np.asarray(self.support, dtype=np.int64)))
        object.__setattr__(self, "multiplicities", _frozen(np.asarray(self.multiplicities, dtype=np.int64)))
        if self.support.size == 0:
            raise ValueError("empty sample")
        if (np.diff(self.support) <= 0).any():
            raise ValueError("support must be strictly increasing")
        if (self.multiplicities <= 0).any():
            raise ValueError("multiplicities must be positive")
        if int(self.multiplicities.sum()) != self.n:
            raise ValueError("multiplicities must sum to n")

    @property
    def probabilities(self) -> np.ndarray:
        return self.multiplicities / self.n

    def probability(self, y: int) -> float:
        """P-hat(y); zero off the support."""
        i = np.searchsorted(self.support, y)
        if i < self.support.size and self.support[i] == y:
            return float(self.multiplicities[i]) / self.n
        return 0.0

    def dense(self, length: int | None = None) -> np.ndarray:
        """Probabilities on 0..length-1 (default: y_max+1), zeros off-support."""
        if length is None:
            length = int(self.support[-1]) + 1
        out = np.zeros(length)
        out[self.support] = self.multiplicities / self.n
        return out


@dataclass(frozen=True)
class DecisionRule:
    """A finite map y -> lambda-hat over a sorted integer domain."""

    domain: np.ndarray
    values: np.ndarray
    monotone: bool = False

    def __post_init__(self):
        dom = _frozen(np.asarray(self.domain, dtype=np.int64))
        val = _frozen(np.asarray(self.values, dtype=float))
        object.__setattr__(self, "domain", dom)
        object.__setattr__(self, "values", val)
        if dom.size != val.size:
            raise ValueError("domain and values must have equal length")
        if dom.size == 0:
            raise ValueError("empty rule")
        if (np.diff(dom) <= 0).any():
            raise ValueError("domain must be strictly increasing")
        if self.monotone and (np.diff(val) < 0).any():
            raise ValueError("monotone rule has decreasing values")

    def at(self, y: int) -> float:
        i = np.searchsorted(self.domain, y)
        if i >= self.domain.size or self.domain[i] != y:
            raise ValueError(f"rule undefined at y={int(y)}")
        return float(self.values[i])

    def __call__(self, counts: np.ndarray) -> np.ndarray:
        counts = np.asarray(counts, dtype=np.int64)
        idx = np.searchsorted(self.domain, counts)
        bad = (idx >= self.domain.size) | (self.domain[np.minimum(idx, self.domain.size - 1)] != counts)
        if bad.any():
            raise ValueError(f"rule undefined at y={int(counts[bad][0])}")
        return self.values[idx]


@dataclass(frozen=True)
class DiscretePrior:
    """A discrete mixing distribution: atoms (lambda_j, g_j)."""

    lambdas: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        lam = _frozen(np.asarray(self.lambdas, dtype=float))
        wts = _frozen(np.asarray(self.weights, dtype=float))
        object.__setattr__(self, "lambdas", lam)
        object.__setattr__(self, "weights", wts)
        if lam.size == 0 or lam.size != wts.size:
            raise ValueError("prior needs matching nonempty atoms and weights")
        if (lam < 0).any():
            raise ValueError("atom locations must be >= 0")
        if (np.diff(lam) <= 0).any():
            raise ValueError("atom locations must be strictly increasing")
        if (wts <= 0).any():
            raise ValueError("atom weights must be positive")
        if abs(float(wts.sum()) - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError("atom weights must sum to 1")

    @classmethod
    def from_atoms(cls, lambdas, weights) -> "DiscretePrior":
        """Build a prior from possibly unsorted/duplicated atoms."""
        lam = np.asarray(lambdas, dtype=float)
        wts = np.asarray(weights, dtype=float)
        uniq, inv = np.unique(lam, return_inverse=True)
        merged = np.zeros_like(uniq)
        np.add.at(merged, inv, wts)
        merged = merged / merged.sum()
        return cls(uniq, merged)

    @property
    def mean(self) -> float:
        return float(self.weights @ self.lambdas)

    @property
    def variance(self) -> float:
        return float(self.weights @ self.lambdas**2 - self.mean**2)


def empirical_pmf(sample: CountSample) -> EmpiricalPmf:
    """Empirical pmf of the sample: probability(y) = multiplicity(y)/n."""
    support, mult = np.unique(sample.counts, return_counts=True)
    return EmpiricalPmf(support, mult, sample.n)


def poisson_pmf(k, mean: float):
    """Poisson pmf e^{-mean} mean^k / k!, evaluated in log space.

    Accepts a scalar or array ``k``; stays finite for k up to ~1e6.
    """
    k_arr = np.asarray(k)
    if np.any(k_arr < 0):
        raise ValueError("k must be nonnegative")
    if mean < 0:
        raise ValueError("mean must be nonnegative")
    if mean == 0.0:
        out = np.where(k_arr == 0, 1.0, 0.0)
    else:
        out = np.exp(-mean + k_arr * np.log(mean) - gammaln(k_arr + 1.0))
    return float(out) if np.isscalar(k) or k_arr.ndim == 0 else out


def apply_rule(rule: DecisionRule, sample: CountSample) -> np.ndarray:
    """Apply a decision rule elementwise to a sample."""
    return rule(sample.counts)
