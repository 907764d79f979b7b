"""Empirical-Bayes estimators for vectors of Poisson means.

Robbins' plug-in rule and its smoothed, Rao-Blackwellized, isotonized
adjustment; a variance-stabilized normal-transform rule; thinning-based
cross-validation for the smoothing parameter; a nonparametric mixture MLE;
and a Monte Carlo harness for risk benchmarking.
"""

__version__ = "0.1.0"

from .core import (
    CountSample,
    DecisionRule,
    DiscretePrior,
    EmpiricalPmf,
    apply_rule,
    empirical_pmf,
    poisson_pmf,
)
from .crossval import CvConfig, CvResult, cv_criterion, normal_split, select_h, thin
from .isotonic import WeightedSeries, isotonic_fit, pava
from .losses import LossKind, bayes_risk_l2, bayes_rule, kl_plugin_rule, kl_zero_decision, loss
from .normal import KernelEstimate, kernel_density, modified_normal, normal_rule, vst
from .npmle import NpmleFit, fit_npmle, npmle_rule, stationarity_gap
from .robbins import (
    SmoothedPmf,
    adjusted_robbins,
    classical_rule,
    delta_h1,
    delta_h2,
    delta_h2_at_ymax_slope,
    smoothed_pmf,
)
from .simulate import (
    Concat,
    Constant,
    EstimatorSpec,
    ExperimentConfig,
    Linspace,
    RiskReport,
    RiskRow,
    bayes_benchmark,
    empirical_risk,
    fit_estimator,
    make_lambda,
    parse_lambda_spec,
    run_experiment,
    table_preset,
)

__all__ = [
    "CountSample",
    "DecisionRule",
    "DiscretePrior",
    "EmpiricalPmf",
    "apply_rule",
    "empirical_pmf",
    "poisson_pmf",
    "WeightedSeries",
    "isotonic_fit",
    "pava",
    "SmoothedPmf",
    "adjusted_robbins",
    "classical_rule",
    "delta_h1",
    "delta_h2",
    "delta_h2_at_ymax_slope",
    "smoothed_pmf",
    "KernelEstimate",
    "kernel_density",
    "modified_normal",
    "normal_rule",
    "vst",
    "LossKind",
    "bayes_risk_l2",
    "bayes_rule",
    "kl_plugin_rule",
    "kl_zero_decision",
    "loss",
    "CvConfig",
    "CvResult",
    "cv_criterion",
    "normal_split",
    "select_h",
    "thin",
    "NpmleFit",
    "fit_npmle",
    "npmle_rule",
    "stationarity_gap",
    "Concat",
    "Constant",
    "EstimatorSpec",
    "ExperimentConfig",
    "Linspace",
    "RiskReport",
    "RiskRow",
    "bayes_benchmark",
    "empirical_risk",
    "fit_estimator",
    "make_lambda",
    "parse_lambda_spec",
    "run_experiment",
    "table_preset",
]
