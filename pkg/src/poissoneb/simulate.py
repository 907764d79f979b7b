"""Monte Carlo risk estimation over fixed mean configurations.

Each replication draws Y_i ~ Po(lambda_i), fits every requested estimator
on the same draw (common random numbers across estimators), and records
the total squared-error loss.  Replication r draws from its own RNG
stream keyed by (seed, r), so results are bit-identical regardless of the
worker count; reduction is ordered by replication index.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import CountSample, DecisionRule, DiscretePrior, empirical_pmf
from .losses import bayes_risk_l2, kl_plugin_rule
from .normal import modified_normal
from .robbins import adjusted_robbins, classical_rule

__all__ = [
    "Constant",
    "Linspace",
    "Concat",
    "LambdaConfig",
    "EstimatorSpec",
    "ExperimentConfig",
    "RiskRow",
    "RiskReport",
    "make_lambda",
    "parse_lambda_spec",
    "format_lambda_spec",
    "fit_estimator",
    "run_experiment",
    "bayes_benchmark",
    "empirical_risk",
    "table_preset",
    "TABLE_NAMES",
]


@dataclass(frozen=True)
class Constant:
    value: float
    n: int

    def __post_init__(self):
        if self.value < 0 or self.n < 1:
            raise ValueError("constant spec needs value >= 0 and n >= 1")


@dataclass(frozen=True)
class Linspace:
    lo: float
    hi: float
    n: int

    def __post_init__(self):
        if self.lo < 0 or self.hi < self.lo or self.n < 1:
            raise ValueError("linspace spec needs 0 <= lo <= hi and n >= 1")


@dataclass(frozen=True)
class Concat:
    parts: tuple

    def __post_init__(self):
        if len(self.parts) == 0:
            raise ValueError("concat spec needs at least one part")


LambdaConfig = Constant | Linspace | Concat


def make_lambda(cfg: LambdaConfig) -> np.ndarray:
    """Materialize the deterministic mean vector."""
    if isinstance(cfg, Constant):
        return np.full(cfg.n, cfg.value, dtype=float)
    if isinstance(cfg, Linspace):
        return np.linspace(cfg.lo, cfg.hi, cfg.n)
    if isinstance(cfg, Concat):
        return np.concatenate([make_lambda(p) for p in cfg.parts])
    raise TypeError(f"not a lambda config: {cfg!r}")


def parse_lambda_spec(spec: str) -> LambdaConfig:
    """Parse 'constant:C:N', 'linspace:LO:HI:N', or '+'-joined parts."""
    if "+" in spec:
        return Concat(tuple(parse_lambda_spec(s) for s in spec.split("+")))
    fields = spec.split(":")
    try:
        if fields[0] == "constant" and len(fields) == 3:
            return Constant(float(fields[1]), int(fields[2]))
        if fields[0] == "linspace" and len(fields) == 4:
            return Linspace(float(fields[1]), float(fields[2]), int(fields[3]))
    except ValueError as exc:
        raise ValueError(f"bad lambda spec {spec!r}: {exc}") from None
    raise ValueError(f"bad lambda spec {spec!r}: expected constant:C:N or linspace:LO:HI:N")


def format_lambda_spec(cfg: LambdaConfig) -> str:
    if isinstance(cfg, Constant):
        return f"constant:{cfg.value:g}:{cfg.n}"
    if isinstance(cfg, Linspace):
        return f"linspace:{cfg.lo:g}:{cfg.hi:g}:{cfg.n}"
    return "+".join(format_lambda_spec(p) for p in cfg.parts)


@dataclass(frozen=True)
class EstimatorSpec:
    """One estimator family with its parameter grid.

    ``params`` holds smoothing parameters (h for the adjusted family,
    kernel bandwidths for the normal family); parameter-free families use
    a single ``None``.  ``q`` is the transform offset, normal family only.
    """

    family: str
    params: tuple = (None,)
    q: float | None = None

    def __post_init__(self):
        if self.family not in ("naive", "robbins", "adjusted", "normal", "kl", "npmle"):
            raise ValueError(f"unknown estimator family {self.family!r}")
        object.__setattr__(self, "params", tuple(self.params))
        if len(self.params) == 0:
            raise ValueError("parameter grid must be nonempty")

    @property
    def label(self) -> str:
        if self.family == "normal":
            return f"normal[q={self.q:g}]"
        return self.family


@dataclass(frozen=True)
class ExperimentConfig:
    lam: LambdaConfig
    reps: int
    estimators: tuple[EstimatorSpec, ...]
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.reps < 1:
            raise ValueError("reps must be positive")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")
        if self.workers < 1:
            raise ValueError("workers must be positive")
        object.__setattr__(self, "estimators", tuple(self.estimators))
        if len(self.estimators) == 0:
            raise ValueError("estimator list must be nonempty")


@dataclass(frozen=True)
class RiskRow:
    estimator: str
    parameter: float | None
    mean_loss: float
    se: float


@dataclass(frozen=True)
class RiskReport:
    rows: tuple[RiskRow, ...]
    benchmarks: dict[str, float]      # {"naive": sum lambda, "n_bayes": n B(lambda)}
    reps: int


def fit_estimator(family: str, sample: CountSample, param: float | None = None,
                  q: float = 0.25, npmle_opts: dict | None = None) -> DecisionRule:
    """Fit one estimator family on a sample; domain is the observed support."""
    if family == "naive":
        support = np.unique(sample.counts)
        return DecisionRule(support, support.astype(float), monotone=True)
    if family == "robbins":
        return classical_rule(empirical_pmf(sample))
    if family == "adjusted":
        if param is None:
            raise ValueError("adjusted estimator needs a smoothing parameter h")
        return adjusted_robbins(sample, param)
    if family == "normal":
        if param is None:
            raise ValueError("normal estimator needs a kernel bandwidth")
        return modified_normal(sample, param, q)
    if family == "kl":
        return kl_plugin_rule(empirical_pmf(sample))
    if family == "npmle":
        from .npmle import fit_npmle, npmle_rule

        fit = fit_npmle(sample, **(npmle_opts or {}))
        return npmle_rule(fit, sample.y_max)
    raise ValueError(f"unknown estimator family {family!r}")


def _rep_losses(lam: np.ndarray, estimators, seed: int, rep: int) -> np.ndarray:
    rng = np.random.default_rng([seed, rep])
    sample = CountSample(rng.poisson(lam))
    out = np.empty(sum(len(s.params) for s in estimators))
    j = 0
    for spec in estimators:
        for param in spec.params:
            rule = fit_estimator(spec.family, sample, param,
                                 q=spec.q if spec.q is not None else 0.25)
            est = rule(sample.counts)
            out[j] = float(((est - lam) ** 2).sum())
            j += 1
    return out


def _rep_chunk(args):
    lam, estimators, seed, reps = args
    return [(r, _rep_losses(lam, estimators, seed, r)) for r in reps]


def run_experiment(cfg: ExperimentConfig) -> RiskReport:
    """Estimate total risk for every (estimator, parameter) pair."""
    lam = make_lambda(cfg.lam)
    n_rows = sum(len(s.params) for s in cfg.estimators)
    losses = np.empty((n_rows, cfg.reps))
    if cfg.workers == 1:
        for r in range(cfg.reps):
            losses[:, r] = _rep_losses(lam, cfg.estimators, cfg.seed, r)
    else:
        chunks = [c for c in np.array_split(np.arange(cfg.reps), cfg.workers * 4)
                  if c.size > 0]
        args = [(lam, cfg.estimators, cfg.seed, list(c)) for c in chunks]
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            for pairs in pool.map(_rep_chunk, args):
                for r, vals in pairs:
                    losses[:, r] = vals
    means = losses.mean(axis=1)
    if cfg.reps > 1:
        ses = losses.std(axis=1, ddof=1) / np.sqrt(cfg.reps)
    else:
        ses = np.zeros(n_rows)
    rows = []
    j = 0
    for spec in cfg.estimators:
        for param in spec.params:
            rows.append(RiskRow(spec.label, None if param is None else float(param),
                                float(means[j]), float(ses[j])))
            j += 1
    benchmarks = {
        "naive": float(lam.sum()),
        "n_bayes": bayes_benchmark(lam),
    }
    return RiskReport(tuple(rows), benchmarks, cfg.reps)


def bayes_benchmark(lam) -> float:
    """n times the per-coordinate Bayes risk under the empirical prior of lam."""
    lam = np.asarray(lam, dtype=float)
    if lam.size == 0:
        raise ValueError("empty lambda vector")
    prior = DiscretePrior.from_atoms(lam, np.full(lam.size, 1.0 / lam.size))
    return float(lam.size * bayes_risk_l2(prior))


def empirical_risk(rule: DecisionRule, sample: CountSample, targets) -> float:
    """sum (rule(y_i) - z_i)^2 against paired targets."""
    targets = np.asarray(targets, dtype=float)
    if targets.size != sample.n:
        raise ValueError("length mismatch")
    return float(((rule(sample.counts) - targets) ** 2).sum())


def _preset(lam, h_grid, bw_grid, reps):
    ests = (
        EstimatorSpec("naive"),
        EstimatorSpec("adjusted", tuple(h_grid)),
        EstimatorSpec("normal", tuple(bw_grid), q=0.0),
        EstimatorSpec("normal", tuple(bw_grid), q=0.25),
    )
    return lam, ests, reps


_TABLES = {
    "1": _preset(Linspace(5, 15, 200), (0, 0.2, 0.4, 0.8, 1.8, 3),
                 (0.2, 0.3, 0.5, 0.7, 0.9, 1.2), 1000),
    "2": _preset(Linspace(0, 5, 200), (0, 0.2, 1, 1.8, 2.4, 3),
                 (0.2, 0.3, 0.5, 0.8, 1.0, 1.4), 1000),
    "3": _preset(Constant(10, 200), (0, 0.2, 0.4, 1, 2, 3),
                 (0.2, 0.3, 0.5, 0.7, 0.9, 1.3), 1000),
    "4": _preset(Concat((Constant(5, 200), Constant(15, 20))), (0, 0.2, 0.4, 1.2, 2.0, 3),
                 (0.2, 0.3, 0.5, 0.9, 1.1, 1.4), 1000),
    "5": _preset(Linspace(0, 20, 30), (0, 0.01, 0.2, 0.4, 1.2, 2.0, 3),
                 (0.2, 0.3, 0.5, 0.9, 1.2, 1.4), 1000),
    "example1": (
        Constant(10, 500),
        (EstimatorSpec("naive"), EstimatorSpec("robbins"), EstimatorSpec("adjusted", (0.0, 3.0))),
        100,
    ),
}

TABLE_NAMES = tuple(_TABLES)


def table_preset(name: str, reps: int | None = None, seed: int = 0,
                 workers: int = 1) -> ExperimentConfig:
    """Experiment configuration reproducing one of the benchmark tables."""
    if name not in _TABLES:
        raise ValueError(f"unknown table {name!r}; choose from {TABLE_NAMES}")
    lam, ests, default_reps = _TABLES[name]
    return ExperimentConfig(lam, reps if reps is not None else default_reps,
                            ests, seed=seed, workers=workers)
