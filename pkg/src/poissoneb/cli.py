"""Command-line front end.

Subcommands: estimate, simulate, cv, bayes-risk, empirical-risk.  Output
goes to stdout as aligned text, or to a file as csv/json via --format and
--out; simulate/cv/estimate can additionally render a figure with --plot.
All randomness flows from --seed (default 1729), so runs are reproducible
by default.
"""

from __future__ import annotations

import argparse
import sys
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .core import CountSample, empirical_pmf
from .crossval import CvConfig, select_h
from .losses import bayes_risk_l2
from .report import (
    BayesRiskPayload,
    CvPayload,
    EmpiricalRiskPayload,
    ReportDocument,
    RulePayload,
    write_document,
)
from .simulate import (
    EstimatorSpec,
    ExperimentConfig,
    TABLE_NAMES,
    bayes_benchmark,
    empirical_risk,
    fit_estimator,
    make_lambda,
    parse_lambda_spec,
    run_experiment,
    table_preset,
)

DEFAULT_SEED = 1729

_ESTIMATORS = ("robbins", "adjusted", "normal", "kl", "npmle")


def ingest_counts(path: str, paired: bool = False):
    """Read newline-delimited counts, or 'y,z' pairs in paired mode.

    Blank lines and '#' comments are skipped.  Returns (CountSample,
    targets-or-None).
    """
    counts: list[int] = []
    targets: list[float] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            fields = [f.strip() for f in line.split(",")]
            if paired:
                if len(fields) != 2:
                    raise ValueError(f"{path}:{lineno}: expected 'y,z' pair")
                ytext, ztext = fields
            else:
                if len(fields) != 1:
                    raise ValueError(f"{path}:{lineno}: expected one count per line")
                ytext, ztext = fields[0], None
            try:
                y = int(ytext)
            except ValueError:
                raise ValueError(f"{path}:{lineno}: count {ytext!r} is not an integer") from None
            if y < 0:
                raise ValueError(f"{path}:{lineno}: count must be nonnegative")
            counts.append(y)
            if paired:
                try:
                    targets.append(float(ztext))
                except ValueError:
                    raise ValueError(f"{path}:{lineno}: target {ztext!r} is not a number") from None
    if not counts:
        raise ValueError(f"{path}: empty sample")
    return CountSample(counts), (targets if paired else None)


def _add_output_flags(sp, plot: bool = False):
    sp.add_argument("--format", choices=("text", "csv", "json"), default="text")
    sp.add_argument("--out", metavar="PATH", help="write output to a file instead of stdout")
    if plot:
        sp.add_argument("--plot", metavar="PATH", help="also render a figure to PATH")


def _grid(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(f) for f in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}: expected comma-separated numbers")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="poissoneb",
        description="Empirical-Bayes estimation for vectors of Poisson means.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="fit an estimator to a count file")
    p.add_argument("--input", required=True)
    p.add_argument("--estimator", required=True, choices=_ESTIMATORS)
    p.add_argument("--h", type=float, default=0.0, help="smoothing parameter (adjusted)")
    p.add_argument("--bandwidth", type=float, default=0.5, help="kernel bandwidth (normal)")
    p.add_argument("--q", type=float, default=0.25, help="transform offset (normal)")
    p.add_argument("--grid-size", type=int, default=400, help="lambda grid size (npmle)")
    p.add_argument("--tol", type=float, default=1e-6, help="convergence tolerance (npmle)")
    p.add_argument("--max-iter", type=int, default=2000, help="EM iteration cap (npmle)")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    _add_output_flags(p, plot=True)

    p = sub.add_parser("simulate", help="Monte Carlo risk table")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--table", choices=TABLE_NAMES)
    group.add_argument("--lambda-spec", metavar="SPEC",
                       help="constant:C:N or linspace:LO:HI:N, '+'-joined to concatenate")
    p.add_argument("--reps", type=int, help="replications (default: table preset or 1000)")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--h-grid", type=_grid, help="adjusted-family grid for --lambda-spec runs")
    p.add_argument("--bandwidth-grid", type=_grid, help="normal-family grid for --lambda-spec runs")
    p.add_argument("--q", type=float, default=0.25)
    _add_output_flags(p, plot=True)

    p = sub.add_parser("cv", help="choose h by thinning cross-validation")
    p.add_argument("--input", required=True)
    p.add_argument("--estimator", choices=("adjusted", "normal"), default="adjusted")
    p.add_argument("--p", type=float, default=0.9, help="thinning retention probability")
    p.add_argument("--K", type=int, default=1000, help="thinning replications")
    p.add_argument("--h-grid", type=_grid, required=True)
    p.add_argument("--q", type=float, default=0.25)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    _add_output_flags(p, plot=True)

    p = sub.add_parser("bayes-risk", help="benchmark n*B(lambda) for a mean vector")
    p.add_argument("--lambda-spec", required=True, metavar="SPEC")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    _add_output_flags(p)

    p = sub.add_parser("empirical-risk", help="sum (rule(y_i)-z_i)^2 on paired data")
    p.add_argument("--input", required=True, help="paired 'y,z' file")
    p.add_argument("--estimator", required=True, choices=_ESTIMATORS)
    p.add_argument("--h", type=float, default=0.0)
    p.add_argument("--bandwidth", type=float, default=0.5)
    p.add_argument("--q", type=float, default=0.25)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    _add_output_flags(p)
    return parser


def _metadata(args) -> dict:
    return {
        "command": args.command,
        "seed": getattr(args, "seed", None),
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "version": __version__,
    }


def _estimator_param(args) -> tuple[float | None, str]:
    if args.estimator == "adjusted":
        return args.h, f"adjusted"
    if args.estimator == "normal":
        return args.bandwidth, f"normal[q={args.q:g}]"
    return None, args.estimator


def _cmd_estimate(args) -> ReportDocument:
    sample, _ = ingest_counts(args.input)
    npmle_opts = {"grid_size": args.grid_size, "tol": args.tol, "max_iter": args.max_iter}
    param, label = _estimator_param(args)
    rule = fit_estimator(args.estimator, sample, param, q=args.q, npmle_opts=npmle_opts)
    estimates = rule(sample.counts)
    payload = RulePayload(
        estimator=label,
        parameter=param,
        domain=tuple(int(y) for y in rule.domain),
        values=tuple(float(v) for v in rule.values),
        monotone=rule.monotone,
        observations=tuple(int(y) for y in sample.counts),
        estimates=tuple(float(v) for v in estimates),
    )
    return ReportDocument(_metadata(args), payload)


def _cmd_simulate(args) -> ReportDocument:
    if args.table is not None:
        cfg = table_preset(args.table, reps=args.reps, seed=args.seed, workers=args.workers)
    else:
        lam = parse_lambda_spec(args.lambda_spec)
        ests: list[EstimatorSpec] = [EstimatorSpec("naive")]
        if args.h_grid:
            ests.append(EstimatorSpec("adjusted", args.h_grid))
        if args.bandwidth_grid:
            ests.append(EstimatorSpec("normal", args.bandwidth_grid, q=args.q))
        if len(ests) == 1:
            ests.append(EstimatorSpec("adjusted", (0.0, 0.5, 1.0, 2.0, 3.0)))
        cfg = ExperimentConfig(lam, args.reps or 1000, tuple(ests),
                               seed=args.seed, workers=args.workers)
    report = run_experiment(cfg)
    return ReportDocument(_metadata(args), report)


def _cmd_cv(args) -> ReportDocument:
    sample, _ = ingest_counts(args.input)
    cfg = CvConfig(p=args.p, h_grid=args.h_grid, K=args.K, seed=args.seed)
    result = select_h(sample, cfg, estimator=args.estimator, q=args.q)
    payload = CvPayload(
        estimator=args.estimator,
        p=cfg.p, K=cfg.K, h_star=result.h_star,
        h_grid=tuple(cfg.h_grid),
        criteria=tuple(result.criteria[h] for h in cfg.h_grid),
        scaled=tuple(result.scaled[h] for h in cfg.h_grid),
    )
    return ReportDocument(_metadata(args), payload)


def _cmd_bayes_risk(args) -> ReportDocument:
    lam = make_lambda(parse_lambda_spec(args.lambda_spec))
    total = bayes_benchmark(lam)
    payload = BayesRiskPayload(n=int(lam.size), per_coordinate=total / lam.size, total=total)
    return ReportDocument(_metadata(args), payload)


def _cmd_empirical_risk(args) -> ReportDocument:
    sample, targets = ingest_counts(args.input, paired=True)
    param, label = _estimator_param(args)
    rule = fit_estimator(args.estimator, sample, param, q=args.q)
    risk = empirical_risk(rule, sample, targets)
    naive = float(((sample.counts - np.asarray(targets)) ** 2).sum())
    payload = EmpiricalRiskPayload(
        rows=((label, param, risk), ("naive", None, naive)),
        n=sample.n,
    )
    return ReportDocument(_metadata(args), payload)


_COMMANDS = {
    "estimate": _cmd_estimate,
    "simulate": _cmd_simulate,
    "cv": _cmd_cv,
    "bayes-risk": _cmd_bayes_risk,
    "empirical-risk": _cmd_empirical_risk,
}


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        doc = _COMMANDS[args.command](args)
        write_document(doc, fmt=args.format, out=args.out)
        if getattr(args, "plot", None):
            from .plots import save_payload_figure

            save_payload_figure(doc.payload, args.plot)
    except (ValueError, OSError) as exc:
        print(f"poissoneb {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
