"""Report documents: typed payloads plus text/CSV/JSON serialization.

CSV and JSON encodings round-trip losslessly back to the in-memory
payload (floats are written with shortest round-trip repr).
"""

from __future__ import annotations

import csv
import io
import json
import sys
from dataclasses import dataclass

import numpy as np

from .simulate import RiskReport, RiskRow

__all__ = [
    "ReportDocument",
    "RulePayload",
    "CvPayload",
    "BayesRiskPayload",
    "EmpiricalRiskPayload",
    "to_text",
    "to_csv",
    "to_json",
    "payload_from_csv",
    "document_from_json",
    "write_document",
]


@dataclass(frozen=True)
class RulePayload:
    """A fitted decision rule plus per-observation estimates."""

    estimator: str
    parameter: float | None
    domain: tuple[int, ...]
    values: tuple[float, ...]
    monotone: bool
    observations: tuple[int, ...]
    estimates: tuple[float, ...]


@dataclass(frozen=True)
class CvPayload:
    estimator: str
    p: float
    K: int
    h_star: float
    h_grid: tuple[float, ...]
    criteria: tuple[float, ...]
    scaled: tuple[float, ...]


@dataclass(frozen=True)
class BayesRiskPayload:
    n: int
    per_coordinate: float
    total: float


@dataclass(frozen=True)
class EmpiricalRiskPayload:
    rows: tuple[tuple[str, float | None, float], ...]   # (estimator, parameter, risk)
    n: int


@dataclass(frozen=True)
class ReportDocument:
    metadata: dict
    payload: object


_KINDS = {
    RiskReport: "risk",
    RulePayload: "rule",
    CvPayload: "cv",
    BayesRiskPayload: "bayes_risk",
    EmpiricalRiskPayload: "empirical_risk",
}


def payload_kind(payload) -> str:
    try:
        return _KINDS[type(payload)]
    except KeyError:
        raise TypeError(f"unknown payload type {type(payload).__name__}") from None


def _fmt(x) -> str:
    """Shortest round-trip representation for CSV cells."""
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


# ---------------------------------------------------------------- JSON

def _payload_to_jsonable(payload) -> dict:
    kind = payload_kind(payload)
    if kind == "risk":
        return {
            "rows": [{"estimator": r.estimator, "parameter": r.parameter,
                      "mean_loss": r.mean_loss, "se": r.se} for r in payload.rows],
            "benchmarks": dict(payload.benchmarks),
            "reps": payload.reps,
        }
    if kind == "rule":
        return {
            "estimator": payload.estimator,
            "parameter": payload.parameter,
            "rule": {"domain": list(payload.domain), "values": list(payload.values),
                     "monotone": payload.monotone},
            "observations": list(payload.observations),
            "estimates": list(payload.estimates),
        }
    if kind == "cv":
        return {
            "estimator": payload.estimator, "p": payload.p, "K": payload.K,
            "selected_h": payload.h_star,
            "rows": [{"h": h, "criterion": c, "scaled": s}
                     for h, c, s in zip(payload.h_grid, payload.criteria, payload.scaled)],
        }
    if kind == "bayes_risk":
        return {"n": payload.n, "per_coordinate": payload.per_coordinate,
                "total": payload.total}
    return {"rows": [{"estimator": e, "parameter": p, "risk": r}
                     for e, p, r in payload.rows],
            "n": payload.n}


def to_json(doc: ReportDocument) -> str:
    body = {"metadata": {**doc.metadata, "kind": payload_kind(doc.payload)}}
    body.update(_payload_to_jsonable(doc.payload))
    return json.dumps(body, indent=2)


def document_from_json(text: str) -> ReportDocument:
    body = json.loads(text)
    meta = dict(body["metadata"])
    kind = meta.pop("kind")
    if kind == "risk":
        rows = tuple(RiskRow(r["estimator"], r["parameter"], r["mean_loss"], r["se"])
                     for r in body["rows"])
        payload = RiskReport(rows, dict(body["benchmarks"]), body["reps"])
    elif kind == "rule":
        payload = RulePayload(
            body["estimator"], body["parameter"],
            tuple(body["rule"]["domain"]), tuple(body["rule"]["values"]),
            body["rule"]["monotone"],
            tuple(body["observations"]), tuple(body["estimates"]))
    elif kind == "cv":
        rows = body["rows"]
        payload = CvPayload(body["estimator"], body["p"], body["K"], body["selected_h"],
                            tuple(r["h"] for r in rows),
                            tuple(r["criterion"] for r in rows),
                            tuple(r["scaled"] for r in rows))
    elif kind == "bayes_risk":
        payload = BayesRiskPayload(body["n"], body["per_coordinate"], body["total"])
    elif kind == "empirical_risk":
        payload = EmpiricalRiskPayload(
            tuple((r["estimator"], r["parameter"], r["risk"]) for r in body["rows"]),
            body["n"])
    else:
        raise ValueError(f"unknown report kind {kind!r}")
    return ReportDocument(meta, payload)


# ----------------------------------------------------------------- CSV

def to_csv(payload) -> str:
    kind = payload_kind(payload)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if kind == "risk":
        w.writerow(["estimator", "parameter", "mean_loss", "se"])
        for r in payload.rows:
            w.writerow([r.estimator, _fmt(r.parameter), _fmt(r.mean_loss), _fmt(r.se)])
        w.writerow(["benchmark.naive", "", _fmt(payload.benchmarks["naive"]), ""])
        w.writerow(["benchmark.n_bayes", "", _fmt(payload.benchmarks["n_bayes"]), ""])
        w.writerow(["meta.reps", "", _fmt(float(payload.reps)), ""])
    elif kind == "rule":
        w.writerow(["section", "key", "value"])
        w.writerow(["meta", "estimator", payload.estimator])
        w.writerow(["meta", "parameter", _fmt(payload.parameter)])
        w.writerow(["meta", "monotone", str(int(payload.monotone))])
        for y, v in zip(payload.domain, payload.values):
            w.writerow(["rule", _fmt(y), _fmt(v)])
        for i, (y, v) in enumerate(zip(payload.observations, payload.estimates)):
            w.writerow(["estimate", f"{i}:{y}", _fmt(v)])
    elif kind == "cv":
        w.writerow(["h", "criterion", "scaled", "selected"])
        for h, c, s in zip(payload.h_grid, payload.criteria, payload.scaled):
            w.writerow([_fmt(h), _fmt(c), _fmt(s), int(h == payload.h_star)])
        w.writerow(["meta.estimator", payload.estimator, "", ""])
        w.writerow(["meta.p", _fmt(payload.p), "", ""])
        w.writerow(["meta.K", str(payload.K), "", ""])
    elif kind == "bayes_risk":
        w.writerow(["n", "per_coordinate", "total"])
        w.writerow([payload.n, _fmt(payload.per_coordinate), _fmt(payload.total)])
    else:
        w.writerow(["estimator", "parameter", "risk"])
        for e, p, r in payload.rows:
            w.writerow([e, _fmt(p), _fmt(r)])
        w.writerow(["meta.n", "", str(payload.n)])
    return buf.getvalue()


def _parse_opt_float(s: str) -> float | None:
    return None if s == "" else float(s)


def payload_from_csv(kind: str, text: str):
    rows = list(csv.reader(io.StringIO(text)))
    header, body = rows[0], rows[1:]
    if kind == "risk":
        rrows, benchmarks, reps = [], {}, 0
        for est, par, mean, se in body:
            if est == "benchmark.naive":
                benchmarks["naive"] = float(mean)
            elif est == "benchmark.n_bayes":
                benchmarks["n_bayes"] = float(mean)
            elif est == "meta.reps":
                reps = int(float(mean))
            else:
                rrows.append(RiskRow(est, _parse_opt_float(par), float(mean), float(se)))
        return RiskReport(tuple(rrows), benchmarks, reps)
    if kind == "rule":
        meta, domain, values, obs, est = {}, [], [], [], []
        for section, key, value in body:
            if section == "meta":
                meta[key] = value
            elif section == "rule":
                domain.append(int(key))
                values.append(float(value))
            else:
                obs.append(int(key.split(":")[1]))
                est.append(float(value))
        return RulePayload(meta["estimator"], _parse_opt_float(meta["parameter"]),
                           tuple(domain), tuple(values), bool(int(meta["monotone"])),
                           tuple(obs), tuple(est))
    if kind == "cv":
        hs, crit, scaled, meta, h_star = [], [], [], {}, None
        for a, b, c, d in body:
            if a.startswith("meta."):
                meta[a[5:]] = b
            else:
                hs.append(float(a))
                crit.append(float(b))
                scaled.append(float(c))
                if d == "1":
                    h_star = float(a)
        return CvPayload(meta["estimator"], float(meta["p"]), int(meta["K"]),
                         h_star, tuple(hs), tuple(crit), tuple(scaled))
    if kind == "bayes_risk":
        n, per, total = body[0]
        return BayesRiskPayload(int(n), float(per), float(total))
    if kind == "empirical_risk":
        rrows, n = [], 0
        for e, p, r in body:
            if e == "meta.n":
                n = int(r)
            else:
                rrows.append((e, _parse_opt_float(p), float(r)))
        return EmpiricalRiskPayload(tuple(rrows), n)
    raise ValueError(f"unknown report kind {kind!r}")


# ---------------------------------------------------------------- text

def _risk_text(payload: RiskReport) -> str:
    lines = [f"Monte Carlo risk over {payload.reps} replications",
             f"{'estimator':<16}{'param':>8}{'mean loss':>14}{'se':>10}"]
    # mark the per-family minimum, mirroring the boldface convention
    by_family: dict[str, float] = {}
    for r in payload.rows:
        cur = by_family.get(r.estimator)
        if cur is None or r.mean_loss < cur:
            by_family[r.estimator] = r.mean_loss
    for r in payload.rows:
        par = "-" if r.parameter is None else f"{r.parameter:g}"
        mark = " *" if r.mean_loss == by_family[r.estimator] and len(
            [x for x in payload.rows if x.estimator == r.estimator]) > 1 else ""
        lines.append(f"{r.estimator:<16}{par:>8}{r.mean_loss:>14.2f}{r.se:>10.2f}{mark}")
    lines.append(f"benchmark naive (sum lambda): {payload.benchmarks['naive']:.2f}")
    lines.append(f"benchmark n*B(lambda):        {payload.benchmarks['n_bayes']:.2f}")
    lines.append("(* per-family minimum)")
    return "\n".join(lines)


def _rule_text(payload: RulePayload) -> str:
    par = "" if payload.parameter is None else f" (parameter {payload.parameter:g})"
    lines = [f"Decision rule: {payload.estimator}{par}",
             f"{'y':>6}{'lambda_hat':>14}"]
    for y, v in zip(payload.domain, payload.values):
        lines.append(f"{y:>6}{v:>14.6f}")
    lines.append(f"per-observation estimates ({len(payload.observations)} values):")
    est = " ".join(f"{v:.4f}" for v in payload.estimates)
    lines.append(est)
    return "\n".join(lines)


def _cv_text(payload: CvPayload) -> str:
    lines = [
        f"Thinning cross-validation: estimator={payload.estimator} "
        f"p={payload.p:g} K={payload.K}",
        f"{'h':>8}{'criterion':>16}{'scaled':>12}",
    ]
    for h, c, s in zip(payload.h_grid, payload.criteria, payload.scaled):
        mark = "  <- selected" if h == payload.h_star else ""
        lines.append(f"{h:>8g}{c:>16.6f}{s:>12.4f}{mark}")
    lines.append(f"selected h = {payload.h_star:g}")
    return "\n".join(lines)


def to_text(doc: ReportDocument) -> str:
    payload = doc.payload
    kind = payload_kind(payload)
    if kind == "risk":
        body = _risk_text(payload)
    elif kind == "rule":
        body = _rule_text(payload)
    elif kind == "cv":
        body = _cv_text(payload)
    elif kind == "bayes_risk":
        body = (f"Bayes risk benchmark: n={payload.n}, "
                f"per-coordinate B = {payload.per_coordinate:.6f}, "
                f"n*B = {payload.total:.4f}")
    else:
        lines = [f"Empirical risk on paired data (n={payload.n})"]
        for e, p, r in payload.rows:
            par = "-" if p is None else f"{p:g}"
            lines.append(f"  {e:<16}{par:>8}{r:>14.6f}")
        body = "\n".join(lines)
    meta = doc.metadata
    head = f"# {meta.get('command', '?')} | seed={meta.get('seed', '-')} | {meta.get('timestamp', '')}"
    return head + "\n" + body + "\n"


def write_document(doc: ReportDocument, fmt: str = "text", out: str | None = None) -> None:
    if fmt == "text":
        rendered = to_text(doc)
    elif fmt == "csv":
        rendered = to_csv(doc.payload)
    elif fmt == "json":
        rendered = to_json(doc)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if out is None:
        sys.stdout.write(rendered)
        if not rendered.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(rendered)
