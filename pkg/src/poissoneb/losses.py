"""Loss functions, exact Bayes rules and Bayes risk for a known prior,
and the Kullback-Leibler plug-in rule.
"""

from __future__ import annotations

import enum

import numpy as np
from scipy.special import gammaln, logsumexp

from .core import DecisionRule, DiscretePrior, EmpiricalPmf
from .isotonic import isotonic_fit

__all__ = [
    "LossKind",
    "loss",
    "bayes_rule",
    "bayes_risk_l2",
    "kl_plugin_rule",
    "kl_zero_decision",
]

MASS_TOL = 1e-10


class LossKind(enum.Enum):
    L2 = "l2"
    HELLINGER = "hellinger"
    KL = "kl"


def loss(kind: LossKind, lambda_true, lambda_hat) -> float:
    """Summed loss between a true mean vector and an estimate."""
    lt = np.asarray(lambda_true, dtype=float)
    lh = np.asarray(lambda_hat, dtype=float)
    if lt.shape != lh.shape:
        raise ValueError("length mismatch")
    if kind is LossKind.L2:
        return float(((lt - lh) ** 2).sum())
    if kind is LossKind.HELLINGER:
        if (lt < 0).any() or (lh < 0).any():
            raise ValueError("Hellinger loss requires nonnegative means")
        return float(((np.sqrt(lt) - np.sqrt(lh)) ** 2).sum())
    if kind is LossKind.KL:
        zero = lt == 0.0
        if (zero & (lh != 0.0)).any():
            raise ValueError("infinite KL loss: lambda=0 with nonzero estimate")
        terms = np.zeros_like(lt)
        nz = ~zero
        terms[nz] = (lt[nz] - lh[nz]) ** 2 / lt[nz]
        return float(terms.sum())
    raise ValueError(f"unknown loss kind {kind!r}")


def _log_pois_matrix(ys: np.ndarray, lams: np.ndarray) -> np.ndarray:
    """log f(y | lambda) for each (y, lambda); lambda = 0 handled exactly."""
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (-lams[None, :] + ys[:, None] * np.log(lams[None, :])
               - gammaln(ys + 1.0)[:, None])
    zero = lams == 0.0
    if zero.any():
        out[:, zero] = np.where(ys[:, None] == 0, 0.0, -np.inf)
    return out


def bayes_rule(prior: DiscretePrior, y_max: int) -> DecisionRule:
    """Exact posterior mean rule for a known discrete prior, in log space."""
    if y_max < 0:
        raise ValueError("y_max must be nonnegative")
    ys = np.arange(y_max + 1)
    pos = prior.lambdas > 0
    if not pos.any():       # point mass at 0: estimate is identically 0
        return DecisionRule(ys, np.zeros(ys.size), monotone=True)
    logf = _log_pois_matrix(ys, prior.lambdas)
    logw = np.log(prior.weights)
    log_den = logsumexp(logf + logw[None, :], axis=1)
    with np.errstate(divide="ignore"):
        log_num = logsumexp(logf[:, pos] + logw[None, pos]
                            + np.log(prior.lambdas[pos])[None, :], axis=1)
    if not np.isfinite(log_den).all():
        raise ValueError("underflow; raise y_max cap or use log-space")
    values = np.exp(log_num - log_den)
    return DecisionRule(ys, values, monotone=True)


def _mixture_truncation(prior: DiscretePrior) -> int:
    hi = float(prior.lambdas.max())
    return int(hi + 12.0 * np.sqrt(hi) + 40.0)


def bayes_risk_l2(prior: DiscretePrior) -> float:
    """Per-coordinate Bayes risk E[Var(Lambda | Y)] under squared loss.

    The y-sum runs until the retained mixture mass exceeds 1 - 1e-10.
    """
    ys = np.arange(_mixture_truncation(prior) + 1)
    f = np.exp(_log_pois_matrix(ys, prior.lambdas))
    py = f @ prior.weights
    cum = np.cumsum(py)
    stop = int(np.searchsorted(cum, 1.0 - MASS_TOL)) + 1
    ys, f, py = ys[:stop], f[:stop], py[:stop]
    m1 = (f * (prior.weights * prior.lambdas)[None, :]).sum(axis=1) / py
    m2 = (f * (prior.weights * prior.lambdas**2)[None, :]).sum(axis=1) / py
    var = np.maximum(m2 - m1**2, 0.0)   # guard float cancellation at point masses
    return float(py @ var)


def kl_plugin_rule(pmf: EmpiricalPmf) -> DecisionRule:
    """Plug-in rule for KL loss: y P-hat(y)/P-hat(y-1), isotonized.

    The decision at y = 0 is 0 (the only safe choice when the prior may
    put mass at 0), and unobserved predecessors also give 0.
    """
    dense = pmf.dense()
    y = pmf.support
    raw = np.zeros(y.size)
    pos = y >= 1
    prev = dense[y[pos] - 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = np.where(prev > 0, y[pos] * dense[y[pos]] / prev, 0.0)
    raw[pos] = vals
    iso = np.maximum(isotonic_fit(raw, pmf.multiplicities.astype(float)), 0.0)
    return DecisionRule(y, iso, monotone=True)


def kl_zero_decision(prior: DiscretePrior) -> float:
    """KL-optimal decision at y = 0 for a known strictly positive prior.

    Equals int e^{-lam} dG / int lam^{-1} e^{-lam} dG; forced to 0 whenever
    the prior has an atom at 0, where any other decision has infinite risk.
    """
    if prior.lambdas[0] == 0.0:
        return 0.0
    e = np.exp(-prior.lambdas)
    num = float(prior.weights @ e)
    den = float(prior.weights @ (e / prior.lambdas))
    return num / den
