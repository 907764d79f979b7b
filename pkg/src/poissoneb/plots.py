"""Figure rendering for report payloads.

Figures are written straight to files (Agg backend); the CLI renders them
alongside the delimited output when asked via --plot.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .report import CvPayload, RulePayload
from .simulate import RiskReport

__all__ = ["save_risk_figure", "save_cv_figure", "save_rule_figure", "save_payload_figure"]

_RC = {
    "figure.figsize": (6.0, 4.0),
    "figure.dpi": 150,
    "savefig.bbox": "tight",
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 10,
}


def save_risk_figure(report: RiskReport, path: str) -> None:
    """Risk vs smoothing parameter, one curve per estimator family."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        families: dict[str, list] = {}
        for r in report.rows:
            families.setdefault(r.estimator, []).append(r)
        for name, rows in families.items():
            xs = [r.parameter for r in rows]
            if any(x is None for x in xs):
                ax.axhline(rows[0].mean_loss, linestyle=":", linewidth=1.2,
                           label=f"{name} ({rows[0].mean_loss:.0f})")
                continue
            ys = [r.mean_loss for r in rows]
            es = [r.se for r in rows]
            ax.errorbar(xs, ys, yerr=es, marker="o", capsize=3, label=name)
        ax.axhline(report.benchmarks["naive"], color="gray", linestyle="--",
                   linewidth=1.0, label="naive $\\Sigma\\lambda$")
        ax.axhline(report.benchmarks["n_bayes"], color="black", linestyle="--",
                   linewidth=1.0, label="$nB(\\lambda)$")
        ax.set_xlabel("smoothing parameter")
        ax.set_ylabel(f"mean total loss ({report.reps} reps)")
        ax.legend(fontsize=8)
        fig.savefig(path)
        plt.close(fig)


def save_cv_figure(payload: CvPayload, path: str) -> None:
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        ax.plot(payload.h_grid, payload.criteria, marker="o")
        ax.axvline(payload.h_star, color="red", linestyle="--", linewidth=1.0,
                   label=f"selected h = {payload.h_star:g}")
        ax.set_xlabel("h")
        ax.set_ylabel("mean thinning criterion")
        ax.set_title(f"{payload.estimator}, p={payload.p:g}, K={payload.K}")
        ax.legend()
        fig.savefig(path)
        plt.close(fig)


def save_rule_figure(payload: RulePayload, path: str) -> None:
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        dom = np.asarray(payload.domain)
        ax.step(dom, payload.values, where="mid", marker="o", label=payload.estimator)
        lo, hi = float(dom.min()), float(dom.max())
        ax.plot([lo, hi], [lo, hi], color="gray", linestyle=":", linewidth=1.0,
                label="identity")
        ax.set_xlabel("observed count y")
        ax.set_ylabel("estimate")
        ax.legend()
        fig.savefig(path)
        plt.close(fig)


def save_payload_figure(payload, path: str) -> None:
    """Dispatch on payload type; raises for payloads with no figure form."""
    if isinstance(payload, RiskReport):
        save_risk_figure(payload, path)
    elif isinstance(payload, CvPayload):
        save_cv_figure(payload, path)
    elif isinstance(payload, RulePayload):
        save_rule_figure(payload, path)
    else:
        raise ValueError(f"no figure rendering for {type(payload).__name__}")
