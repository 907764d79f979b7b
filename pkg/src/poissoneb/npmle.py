"""Nonparametric maximum likelihood estimation of the mixing distribution.

The likelihood is concave in the mixture weights, and the maximizer over
all mixing distributions is discrete with few atoms (fewer than the sample
maximum).  Fitting proceeds in three stages:

1. EM fixed-point iteration over a uniform grid on [0, max(sample)+1],
   recording the (nondecreasing) log-likelihood path.
2. An exact convex solve of the same grid problem; EM alone concentrates
   mass onto the optimal support only at an impractically slow rate, while
   the exact solve identifies the support regions directly.  Contiguous
   grid clusters are merged into single atoms at their weighted centroid.
3. A free-support polish: EM over atom weights and locations, with atoms
   added at the stationarity-gap argmax until the first-order optimality
   certificate D(lambda) <= 0 holds on the grid to within tolerance.

``stationarity_gap`` exposes the certificate: at the NPMLE, the normalized
score D(lambda) = (1/n) sum_i f(y_i|lambda)/p_G(y_i) - 1 is <= 0 for every
lambda, with equality on the support.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import gammaln

from .core import CountSample, DecisionRule, DiscretePrior
from .losses import bayes_rule

__all__ = ["NpmleFit", "fit_npmle", "stationarity_gap", "npmle_rule", "loglik_via_ccdf"]

PRUNE_WEIGHT = 1e-8


@dataclass(frozen=True)
class NpmleFit:
    prior: DiscretePrior
    loglik: float
    iterations: int
    stationarity_gap: float
    loglik_path: tuple[float, ...]   # grid-EM iterates, nondecreasing


def _log_pois(ys: np.ndarray, lams: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (-lams[None, :] + ys[:, None] * np.log(lams[None, :])
               - gammaln(ys + 1.0)[:, None])
    zero = lams == 0.0
    if zero.any():
        out[:, zero] = np.where(ys[:, None] == 0, 0.0, -np.inf)
    return out


def _solve_grid_weights(F: np.ndarray, wobs: np.ndarray) -> np.ndarray | None:
    """Exact solve of max_w wobs @ log(F w) over the simplex."""
    import cvxpy as cp

    w = cp.Variable(F.shape[1], nonneg=True)
    problem = cp.Problem(cp.Maximize(wobs @ cp.log(F @ w)), [cp.sum(w) == 1])
    try:
        problem.solve(solver=cp.CLARABEL)
        if w.value is None:
            problem.solve(solver=cp.SCS)
    except cp.error.SolverError:
        problem.solve(solver=cp.SCS)
    if w.value is None:
        return None
    out = np.maximum(np.asarray(w.value, dtype=float), 0.0)
    return out / out.sum()


def _cluster(grid: np.ndarray, g: np.ndarray, threshold: float) -> tuple[np.ndarray, np.ndarray]:
    """Merge contiguous above-threshold grid runs into centroid atoms."""
    idx = np.nonzero(g > threshold)[0]
    if idx.size == 0:
        idx = np.array([int(np.argmax(g))])
    clusters = np.split(idx, np.nonzero(np.diff(idx) > 1)[0] + 1)
    atoms = np.array([(grid[c] * g[c]).sum() / g[c].sum() for c in clusters])
    wts = np.array([g[c].sum() for c in clusters])
    return atoms, wts / wts.sum()


def fit_npmle(sample: CountSample, grid_size: int = 400, tol: float = 1e-6,
              max_iter: int = 2000) -> NpmleFit:
    """Fit the NPMLE of the mixing distribution over a lambda grid."""
    if grid_size < 2:
        raise ValueError("grid_size must be at least 2")
    if tol <= 0 or max_iter < 1:
        raise ValueError("tol must be positive and max_iter >= 1")
    n = sample.n
    ys, mult = np.unique(sample.counts, return_counts=True)
    wobs = mult / n
    grid = np.linspace(0.0, sample.y_max + 1.0, grid_size)
    step = grid[1] - grid[0]
    Fg = np.exp(_log_pois(ys, grid))

    def total_ll(pg: np.ndarray) -> float:
        return n * float(wobs @ np.log(pg))

    # stage 1: grid EM with monotone log-likelihood path
    g = np.full(grid_size, 1.0 / grid_size)
    path: list[float] = []
    for _ in range(max_iter):
        pg = Fg @ g
        path.append(total_ll(pg))
        g = g * ((wobs / pg) @ Fg)
        g = g / g.sum()
        if len(path) > 1 and path[-1] - path[-2] < tol:
            break
    iterations = len(path)

    # stage 2: exact grid solve, then cluster the support
    g_exact = _solve_grid_weights(Fg, wobs)
    if g_exact is None:
        g_exact = g
    atoms, wts = _cluster(grid, g_exact, max(PRUNE_WEIGHT, 1e-3 * g_exact.max()))

    def free_em(atoms, wts, cap=20000):
        ll_prev = -np.inf
        it = 0
        for it in range(1, cap + 1):
            Fa = np.exp(_log_pois(ys, atoms))
            pg = Fa @ wts
            ll = total_ll(pg)
            resp = Fa * wts[None, :] / pg[:, None]
            rw = wobs[:, None] * resp
            wts = rw.sum(axis=0)
            atoms = (rw * ys[:, None]).sum(axis=0) / np.maximum(wts, 1e-300)
            wts = wts / wts.sum()
            if ll - ll_prev < tol:
                break
            ll_prev = ll
        return atoms, wts, it

    def consolidate(atoms, wts):
        order = np.argsort(atoms)
        atoms, wts = atoms[order], wts[order]
        keep = wts > PRUNE_WEIGHT
        if not keep.any():
            keep[int(np.argmax(wts))] = True
        atoms, wts = atoms[keep], wts[keep] / wts[keep].sum()
        out_a, out_w = [atoms[0]], [wts[0]]
        for a, w in zip(atoms[1:], wts[1:]):
            if a - out_a[-1] < 0.75 * step:
                tot = out_w[-1] + w
                out_a[-1] = (out_a[-1] * out_w[-1] + a * w) / tot
                out_w[-1] = tot
            else:
                out_a.append(a)
                out_w.append(w)
        return np.asarray(out_a), np.asarray(out_w)

    def grid_gap(atoms, wts):
        pg = np.exp(_log_pois(ys, atoms)) @ wts
        return float((((wobs / pg) @ Fg) - 1.0).max()), pg

    # stage 3: polish, adding atoms until the certificate holds
    best = None
    inner = 0
    for _ in range(15):
        atoms, wts, used = free_em(atoms, wts)
        inner += used
        atoms, wts = consolidate(atoms, wts)
        gap, pg = grid_gap(atoms, wts)
        if best is None or gap < best[2]:
            best = (atoms.copy(), wts.copy(), gap)
        if gap <= max(5.0 * tol, 1e-10):
            break
        lam_new = grid[int(np.argmax((wobs / pg) @ Fg))]
        f_new = np.exp(_log_pois(ys, np.array([lam_new])))[:, 0]
        a = 0.02     # mixing weight for the new atom, by 1-d Newton
        for _ in range(30):
            mix = (1.0 - a) * pg + a * f_new
            d1 = float((wobs * (f_new - pg) / mix).sum())
            d2 = float(-(wobs * (f_new - pg) ** 2 / mix**2).sum())
            a_next = float(np.clip(a - d1 / d2, 1e-6, 0.5))
            if abs(a_next - a) < 1e-12:
                a = a_next
                break
            a = a_next
        order = np.argsort(np.append(atoms, lam_new))
        atoms = np.append(atoms, lam_new)[order]
        wts = np.append(wts * (1.0 - a), a)[order]
    if best is not None and best[2] < gap:
        atoms, wts, gap = best

    atoms, wts = consolidate(atoms, wts)
    prior = DiscretePrior(atoms, wts / wts.sum())
    gap = stationarity_gap(prior, sample, grid)
    pg = np.exp(_log_pois(ys, prior.lambdas)) @ prior.weights
    return NpmleFit(
        prior=prior,
        loglik=total_ll(pg),
        iterations=iterations + inner,
        stationarity_gap=gap,
        loglik_path=tuple(path),
    )


def stationarity_gap(prior: DiscretePrior, sample: CountSample, grid) -> float:
    """max over the grid of D(lambda) = (1/n) sum_i f(y_i|lambda)/p_G(y_i) - 1."""
    grid = np.asarray(grid, dtype=float)
    ys, mult = np.unique(sample.counts, return_counts=True)
    wobs = mult / sample.n
    pg = np.exp(_log_pois(ys, prior.lambdas)) @ prior.weights
    if (pg == 0.0).any():
        raise ValueError("prior incompatible with data")
    Fg = np.exp(_log_pois(ys, grid))
    return float((((wobs / pg) @ Fg) - 1.0).max())


def npmle_rule(fit: NpmleFit, y_max: int) -> DecisionRule:
    """The Bayes rule induced by the fitted mixing distribution."""
    return bayes_rule(fit.prior, y_max)


def loglik_via_ccdf(prior: DiscretePrior, sample: CountSample) -> float:
    """Per-observation log-likelihood through the complementary-CDF identity.

    (1/n) sum log p_G(y_i) = log p_G(0)
        + sum_{i>=0} Fbar_n(i) [log delta_G(i) - log(i+1)],
    a finite sum since Fbar_n vanishes at and beyond the sample maximum.
    Serves as a consistency check on the mixture likelihood, not as a
    fitting objective.
    """
    y_max = sample.y_max
    ys = np.arange(y_max + 2)
    pg = np.exp(_log_pois(ys, prior.lambdas)) @ prior.weights
    obs = np.bincount(sample.counts, minlength=y_max + 1) / sample.n
    if (pg[: y_max + 1][obs > 0] == 0.0).any():
        raise ValueError("prior incompatible with data")
    fbar = 1.0 - np.cumsum(obs)          # Fbar(i) = P_n(Y > i), i = 0..y_max
    i = np.arange(y_max)
    if y_max == 0:
        return float(np.log(pg[0]))
    delta = (i + 1) * pg[i + 1] / pg[i]
    return float(np.log(pg[0]) + fbar[:y_max] @ (np.log(delta) - np.log(i + 1)))
