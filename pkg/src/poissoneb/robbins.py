"""The classical Robbins plug-in rule and its three-step adjustment.

Step 1 smooths the empirical pmf by convolving with artificial Poisson(h)
noise and applies the plug-in ratio to the smoothed pmf; Step 2 replaces
the randomized rule by its expectation over the noise (Rao-Blackwell);
Step 3 projects onto nondecreasing rules over the observed support and
clamps at zero.

Intermediate values from Steps 1-2 are deliberately left unclamped
(possibly negative): clamping before the Step-2 averaging would bias the
expectation.  Nonnegativity is imposed only on the final rule.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from .core import CountSample, DecisionRule, EmpiricalPmf, empirical_pmf
from .isotonic import isotonic_fit

__all__ = [
    "SmoothedPmf",
    "classical_rule",
    "smoothed_pmf",
    "delta_h1",
    "delta_h2",
    "adjusted_robbins",
    "delta_h2_at_ymax_slope",
]

TAIL_MASS = 1e-12


@lru_cache(maxsize=256)
def _noise_weights(h: float) -> np.ndarray:
    """Poisson(h) pmf on 0..J, J minimal with tail mass P(N > J) < 1e-12."""
    if h == 0.0:
        return np.array([1.0])
    j = max(int(h + 12.0 * np.sqrt(h) + 12.0), 4)
    js = np.arange(j + 1)
    w = np.exp(-h + js * np.log(h) - gammaln(js + 1.0))
    while 1.0 - w.sum() >= TAIL_MASS:
        js = np.arange(len(w), len(w) + 8)
        w = np.append(w, np.exp(-h + js * np.log(h) - gammaln(js + 1.0)))
    keep = np.searchsorted(np.cumsum(w), 1.0 - TAIL_MASS) + 1
    out = w[:keep]
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class SmoothedPmf:
    """Truncated pmf of Z = Y + N, N ~ Poisson(h) independent of Y."""

    h: float
    values: np.ndarray          # P-tilde_Z(z) for z = 0..z_max
    min_support: int            # smallest observed y; P-tilde is 0 below it

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def z_max(self) -> int:
        return int(self.values.size - 1)


def classical_rule(pmf: EmpiricalPmf) -> DecisionRule:
    """Robbins plug-in (y+1) P-hat(y+1) / P-hat(y) on the observed support."""
    dense = pmf.dense(int(pmf.support[-1]) + 2)
    y = pmf.support
    values = (y + 1) * dense[y + 1] / dense[y]
    return DecisionRule(y, values, monotone=False)


def smoothed_pmf(pmf: EmpiricalPmf, h: float) -> SmoothedPmf:
    """Exact Poisson(h) convolution of the empirical pmf.

    Truncated one noise step beyond the 1e-12 tail cutoff so that the
    Step-1 ratio stays defined at y_max plus the largest retained noise.
    """
    if h < 0:
        raise ValueError("h must be nonnegative")
    dense = pmf.dense()
    if h == 0.0:
        # one trailing zero keeps the Step-1 ratio defined at y_max
        return SmoothedPmf(0.0, np.append(dense, 0.0), int(pmf.support[0]))
    w = _noise_weights(h)
    w = np.append(w, np.exp(-h + len(w) * np.log(h) - gammaln(len(w) + 1.0)))
    values = np.convolve(dense, w)
    return SmoothedPmf(float(h), values, int(pmf.support[0]))


def _delta_h1_all(spmf: SmoothedPmf) -> np.ndarray:
    """Step-1 values on z = 0..z_max-1, with 0 wherever P-tilde(z) = 0."""
    p = spmf.values
    z1 = np.arange(1, p.size, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(p[:-1] > 0.0, z1 * p[1:] / p[:-1], spmf.h)
    return ratio - spmf.h


def delta_h1(spmf: SmoothedPmf, z: int) -> float:
    """Step-1 rule (z+1) P-tilde(z+1)/P-tilde(z) - h; raw, may be negative."""
    if z < 0 or z > spmf.z_max - 1:
        raise ValueError(f"z={z} out of truncation range [0, {spmf.z_max - 1}]")
    return float(_delta_h1_all(spmf)[z])


def _delta_h2_support(pmf: EmpiricalPmf, h: float) -> np.ndarray:
    """Step-2 values on the support, the windowed noise average of Step 1."""
    d1 = _delta_h1_all(smoothed_pmf(pmf, h))
    if h == 0.0:
        return d1[pmf.support]
    w = _noise_weights(h)
    # truncated expectation over N, renormalized by the retained mass
    windows = np.lib.stride_tricks.sliding_window_view(d1, w.size)
    return windows[pmf.support] @ w / w.sum()


def delta_h2(pmf: EmpiricalPmf, h: float) -> DecisionRule:
    """Rao-Blackwellized Step-2 rule on the support; raw, not monotone."""
    if h < 0:
        raise ValueError("h must be nonnegative")
    return DecisionRule(pmf.support, _delta_h2_support(pmf, h), monotone=False)


def _adjusted_values(pmf: EmpiricalPmf, h: float) -> np.ndarray:
    d2 = _delta_h2_support(pmf, h)
    iso = isotonic_fit(d2, pmf.multiplicities.astype(float))
    return np.maximum(iso, 0.0)


def adjusted_robbins(sample: CountSample, h: float) -> DecisionRule:
    """The adjusted Robbins estimator: Steps 1-3 plus the zero clamp.

    The isotonic projection weights each support point by its
    multiplicity, matching a least-squares objective summed over
    observations rather than support points.
    """
    if h < 0:
        raise ValueError("h must be nonnegative")
    pmf = empirical_pmf(sample)
    return DecisionRule(pmf.support, _adjusted_values(pmf, h), monotone=True)


def delta_h2_at_ymax_slope(sample: CountSample, h_grid) -> list[float]:
    """Small-h slope diagnostic at the sample maximum.

    Returns the uncentered ratio (delta_h2(y_max) + h) / h per h, i.e. the
    slope of the Rao-Blackwellized plug-in ratio before recentring by h.
    It tends to y_max + 1 as h -> 0 (the centred rule itself has slope
    y_max, so the rule value at y_max is an order of magnitude below the
    true mean for small h).
    """
    pmf = empirical_pmf(sample)
    out = []
    for h in h_grid:
        if not 0.0 < h <= 0.1:
            raise ValueError("slope diagnostic expects h in (0, 0.1]")
        d2 = _delta_h2_support(pmf, float(h))[-1]
        out.append((float(d2) + h) / h)
    return out
