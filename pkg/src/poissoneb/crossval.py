"""Smoothing-parameter selection by Poisson-thinning cross-validation.

The sample is split into independent U ~ Po(p lambda) and V ~ Po((1-p) lambda)
via binomial thinning; rules fitted on U are scored against the unbiased
target p(1-p)^{-1} V.  The thinning is randomized, so the criterion is
averaged over K independent thinnings; the same K thinnings are shared
across the whole h-grid, which cancels the common random term and makes
criterion differences far less noisy than the criteria themselves.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import CountSample, DecisionRule, EmpiricalPmf
from . import normal as _normal
from . import robbins as _robbins
from .isotonic import isotonic_fit

__all__ = ["CvConfig", "CvResult", "thin", "cv_criterion", "select_h", "normal_split"]

_ESTIMATOR_ALIASES = {
    "adjusted": "adjusted",
    "adjusted_robbins": "adjusted",
    "normal": "normal",
    "modified_normal": "normal",
}


@dataclass(frozen=True)
class CvConfig:
    p: float                      # thinning retention probability
    h_grid: tuple[float, ...]     # candidate smoothing parameters, ascending
    K: int = 1000                 # thinning replications
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.p < 1.0:
            raise ValueError("p must lie in (0, 1)")
        grid = tuple(float(h) for h in self.h_grid)
        if len(grid) == 0:
            raise ValueError("h_grid must be nonempty")
        if any(h < 0 for h in grid):
            raise ValueError("h_grid entries must be nonnegative")
        if any(a > b for a, b in zip(grid, grid[1:])):
            raise ValueError("h_grid must be sorted ascending")
        if self.K < 1:
            raise ValueError("K must be positive")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")
        object.__setattr__(self, "h_grid", grid)


@dataclass(frozen=True)
class CvResult:
    h_star: float
    criteria: dict[float, float]   # h -> mean criterion over thinnings
    scaled: dict[float, float]     # h -> total criterion scaled by (1-p)^2
    p: float
    K: int


def thin(sample: CountSample, p: float, rng: np.random.Generator) -> tuple[CountSample, CountSample]:
    """Split Y into U ~ B(Y, p) and V = Y - U; U + V = Y exactly."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    u = rng.binomial(sample.counts, p)
    return CountSample(u), CountSample(sample.counts - u)


def cv_criterion(u: CountSample, v: CountSample, rule_on_u: DecisionRule, p: float) -> float:
    """(1/n) sum (rule(U_i) - p(1-p)^{-1} V_i)^2."""
    if u.n != v.n:
        raise ValueError("length mismatch")
    pred = rule_on_u(u.counts)
    target = p / (1.0 - p) * v.counts
    return float(((pred - target) ** 2).mean())


def _support_fit(family: str, counts: np.ndarray, pmf: EmpiricalPmf,
                 param: float, q: float) -> np.ndarray:
    """Monotone clamped rule values on the support, by estimator family."""
    if family == "adjusted":
        return _robbins._adjusted_values(pmf, param)
    z = 2.0 * np.sqrt(counts + q)
    zs = 2.0 * np.sqrt(pmf.support + q)
    rule = _normal.normal_rule(z, param)
    mu = np.maximum(rule(zs), 0.0)
    lam = 0.25 * mu * mu
    return np.maximum(isotonic_fit(lam, pmf.multiplicities.astype(float)), 0.0)


def select_h(sample: CountSample, cfg: CvConfig, estimator: str = "adjusted",
             q: float = 0.25) -> CvResult:
    """Pick the h minimizing the thinning criterion averaged over K splits.

    Deterministic given (sample, cfg, estimator): thinning k draws from its
    own stream keyed by (seed, k).  Ties break toward smaller h.
    """
    family = _ESTIMATOR_ALIASES.get(estimator)
    if family is None:
        raise ValueError(f"unknown estimator {estimator!r}")
    grid = cfg.h_grid
    totals = np.zeros(len(grid))
    scale = cfg.p / (1.0 - cfg.p)
    counts = sample.counts
    for k in range(cfg.K):
        rng = np.random.default_rng([cfg.seed, k])
        u = rng.binomial(counts, cfg.p)
        target = scale * (counts - u)
        support, mult = np.unique(u, return_counts=True)
        pmf = EmpiricalPmf(support, mult, u.size)
        lookup = np.zeros(int(support[-1]) + 1)
        for j, h in enumerate(grid):
            vals = _support_fit(family, u, pmf, h, q)
            lookup[support] = vals
            totals[j] += ((lookup[u] - target) ** 2).mean()
    crit = totals / cfg.K
    h_star = grid[int(np.argmin(crit))]
    scaled = (1.0 - cfg.p) ** 2 * sample.n * crit
    return CvResult(
        h_star=float(h_star),
        criteria={h: float(c) for h, c in zip(grid, crit)},
        scaled={h: float(s) for h, s in zip(grid, scaled)},
        p=cfg.p,
        K=cfg.K,
    )


def normal_split(zs, alpha: float, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Gaussian analogue of thinning: U = z + a e, V = z - e/a, e ~ N(0,1)."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    zs = np.asarray(zs, dtype=float)
    eps = rng.standard_normal(zs.shape)
    return zs + alpha * eps, zs - eps / alpha
