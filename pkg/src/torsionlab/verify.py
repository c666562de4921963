"""Inequality and identity checks with signed margins over a domain corpus.

Every check records the margin it evaluated; a check passes when
``margin >= -tolerance``. With the closed-form backend the tolerance is a
round-off allowance. With the grid backend it is three times the
Richardson error estimate of the least accurate input. Where lambda_1 is
only bracketed, each margin is taken at the endpoint that makes it smallest.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from . import constructions, oracle, pde
from .domains import Cuboid, Domain, Ellipsoid, IntervalUnion, from_dict, primitives
from .functionals import INF, FunctionalReport, _fill, evaluate, fmt, round_floats
from .oracle import Lambda1Bracket

ORACLE_TOL = 1e-12
DEFAULT_PS = (1.0, 1.5, 2.0, 4.0, INF)

STATUS_PASS, STATUS_VIOLATION, STATUS_ERROR = 0, 1, 2


@dataclass(frozen=True)
class CheckResult:
    check_id: str
    domain: str
    margin: float
    tolerance: float
    parts: dict = field(default_factory=dict, compare=False)
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.margin >= -self.tolerance

    def to_dict(self) -> dict:
        return {
            "check_id": self.check_id, "domain": self.domain, "margin": self.margin,
            "tolerance": self.tolerance, "passed": self.passed, "parts": self.parts, "note": self.note,
        }


def _pname(p) -> str:
    return "inf" if math.isinf(p) else fmt(float(p))


def _need(report: FunctionalReport, *ps):
    missing = [p for p in ps if p not in report.tp]
    if missing:
        raise KeyError(f"report for {report.label!r} lacks T_p for p = {[_pname(p) for p in missing]}")


def _numeric(report: FunctionalReport) -> bool:
    return report.backend != "oracle"


def _tol(report: FunctionalReport, keys, scale: float = 1.0) -> float:
    base = ORACLE_TOL * max(1.0, abs(scale))
    if not _numeric(report):
        return base
    return base + 3.0 * max((report.error(*k) for k in keys), default=0.0)


def _adverse(fn, lam: Lambda1Bracket) -> float:
    return min(fn(e) for e in lam.endpoints())


def check_monotone_fp(report: FunctionalReport, ps: Sequence[float]) -> list[CheckResult]:
    """F_p <= F_q for consecutive p <= q in ``ps``."""
    ps = sorted(float(p) for p in ps)
    _need(report, *ps)
    out = []
    for p, q in zip(ps, ps[1:]):
        margin = _adverse(lambda lam: report.fp_at(q, lam) - report.fp_at(p, lam), report.lambda1)
        tol = _tol(report, [("fp", p), ("fp", q)], report.fp_at(q, report.lambda1.upper))
        out.append(CheckResult(f"monotone_fp[{_pname(p)}<={_pname(q)}]", report.label, margin, tol))
    return out


def check_interpolation(report: FunctionalReport, p: float) -> CheckResult:
    """F_p <= F_1^(1/p) <= 1 for 1 <= p <= 2."""
    if not 1.0 <= p <= 2.0:
        raise ValueError(f"interpolation bound needs p in [1, 2], got {p}")
    _need(report, 1.0, p)
    lam = report.lambda1
    first = _adverse(lambda e: report.fp_at(1.0, e) ** (1.0 / p) - report.fp_at(p, e), lam)
    second = _adverse(lambda e: 1.0 - report.fp_at(1.0, e), lam)
    tol = _tol(report, [("fp", 1.0), ("fp", p)])
    return CheckResult(f"interpolation[p={_pname(p)}]", report.label, min(first, second), tol,
                       {"fp_le_f1_root": first, "f1_le_1": second})


def check_t2_bound(report: FunctionalReport) -> CheckResult:
    """T_2 <= (T_1 / lambda_1)^(1/2)."""
    _need(report, 1.0, 2.0)
    t1, t2 = report.tp[1.0], report.tp[2.0]
    margin = _adverse(lambda e: math.sqrt(t1 / e) - t2, report.lambda1)
    tol = ORACLE_TOL * t2
    if _numeric(report):
        lam = report.lambda1.upper
        rel = report.error("tp", 1.0) / t1 + report.error("lambda1") / lam
        tol += 3.0 * max(report.error("tp", 2.0), 0.5 * math.sqrt(t1 / lam) * rel)
    return CheckResult("t2_bound", report.label, margin, tol)


def check_sandwich(report: FunctionalReport, m: int) -> CheckResult:
    """1 <= lambda_1 v_max <= 4 + 3 m log 2."""
    _need(report, INF)
    vmax = report.tp[INF]
    top = constructions.sandwich_constant(m)
    lower = _adverse(lambda e: e * vmax - 1.0, report.lambda1)
    upper = _adverse(lambda e: top - e * vmax, report.lambda1)
    tol = _tol(report, [("fp", INF)])
    return CheckResult("sandwich", report.label, min(lower, upper), tol,
                       {"lower": lower, "upper": upper})


def energy_mismatch(fld: pde.TorsionField, p: float) -> float:
    """Relative gap between int v^p and (4p/(p+1)^2) int |D v^((p+1)/2)|^2."""
    lhs = pde.lp_norm(fld, p) ** p
    rhs = 4.0 * p / (p + 1.0) ** 2 * pde.grad_energy(fld, p)
    return abs(lhs - rhs) / lhs


def check_energy_identity(fld: pde.TorsionField, p: float, tolerance: float = 1e-2,
                          label: str = "grid") -> CheckResult:
    """Discrete integration-by-parts identity for the torsion function.

    The margin is ``tolerance - mismatch`` so the recorded tolerance is zero.
    """
    mismatch = energy_mismatch(fld, p)
    return CheckResult(f"energy_identity[p={_pname(p)}]", label, tolerance - mismatch, 0.0,
                       {"mismatch": mismatch, "allowed": tolerance, "h": fld.grid.h})


def _convex_piece(spec: Domain):
    """The single convex primitive of ``spec`` or None."""
    pieces = list(primitives(spec))
    if len(pieces) != 1:
        return None
    piece = pieces[0]
    if isinstance(piece, IntervalUnion):
        return piece if len(piece.intervals) == 1 else None
    return piece if isinstance(piece, (Ellipsoid, Cuboid)) else None


def check_convex_lower(report: FunctionalReport, p: float) -> CheckResult:
    """F_p >= the convex-set lower bound in the report's dimension."""
    _need(report, p)
    bound = constructions.g_p_convex_lower(report.dim, p)
    margin = _adverse(lambda e: report.fp_at(p, e) - bound, report.lambda1)
    return CheckResult(f"convex_lower[p={_pname(p)}]", report.label, margin, _tol(report, [("fp", p)]))


def check_fpq_bounded(report: FunctionalReport, p: float, q: float) -> CheckResult:
    """F_{p,q} below a finite supremum bound for q <= 1.

    In one dimension the bound is the sharp constant, at q = 0 the
    rearrangement constant, otherwise the Faber-Krahn constant.
    """
    if q > 1:
        raise ValueError("no finite bound for q > 1")
    _need(report, p)
    m = report.dim
    if m == 1:
        bound, kind = constructions.one_d_sharp(p, q), "sharp_1d"
    elif q == 0 and not math.isinf(p):
        bound, kind = constructions.talenti_fp0(m, p), "rearrangement"
    else:
        bound, kind = constructions.fpq_upper_bound(m, q), "faber_krahn"
    margin = _adverse(lambda e: bound - report.fpq_at(p, q, e), report.lambda1)
    tol = _tol(report, [("fpq", p, q)], bound)
    return CheckResult(f"fpq_bounded[p={_pname(p)};q={fmt(float(q))}]", report.label, margin, tol,
                       {"bound": bound, "kind": kind})


def check_fpq_growth(m: int, p: float, q: float, ns=(1, 10, 100)) -> CheckResult:
    """For q > 1, F_{p,q} must grow along unions of equal balls.

    Recorded with the note ``expected-unbounded``: the margin is the smallest
    relative increase between consecutive sample sizes.
    """
    vals = [constructions.equal_ball_sequence(m, p, q, n).fp_value for n in ns]
    growth = min(b / a - 1.0 for a, b in zip(vals, vals[1:]))
    return CheckResult(f"fpq_growth[p={_pname(p)};q={fmt(float(q))}]", f"equal_balls_m{m}", growth, 0.0,
                       {"values": vals, "n": list(ns)}, note="expected-unbounded")


# ---------------------------------------------------------------- corpus

@dataclass
class CorpusEntry:
    label: str
    spec: Domain
    backend: str | None = None
    h: float | None = None
    lambda1_override: tuple[float, float] | None = None


@dataclass
class Corpus:
    entries: list[CorpusEntry]
    ps: tuple | None = None
    qs: tuple | None = None


def _parse_p(x) -> float:
    if isinstance(x, str) and x.lower() in ("inf", "infinity"):
        return INF
    return float(x)


def parse_corpus(doc: dict) -> Corpus:
    if not isinstance(doc, dict) or "domains" not in doc:
        raise ValueError("corpus document needs a 'domains' list")
    entries = []
    for i, item in enumerate(doc["domains"]):
        label = item.get("label", f"domain{i}")
        spec = from_dict(item["spec"])
        override = item.get("lambda1_override")
        if override is not None:
            override = (float(override[0]), float(override[-1]))
        h = item.get("h")
        entries.append(CorpusEntry(label, spec, item.get("backend"), None if h is None else float(h), override))
    ps = tuple(_parse_p(p) for p in doc["ps"]) if "ps" in doc else None
    qs = tuple(float(q) for q in doc["qs"]) if "qs" in doc else None
    return Corpus(entries, ps, qs)


def load_corpus(path) -> Corpus:
    return parse_corpus(json.loads(Path(path).read_text()))


BUILTIN_CORPUS_JSON = """
{
  "ps": [1, 1.5, 2, 4, "inf"],
  "domains": [
    {"label": "interval", "spec": {"type": "interval_union", "dim": 1, "intervals": [[0.0, 1.0]]}},
    {"label": "two_intervals", "spec": {"type": "interval_union", "dim": 1, "intervals": [[0.0, 1.0], [2.0, 2.5]]}},
    {"label": "disk", "spec": {"type": "ball", "dim": 2, "radius": 1.0, "center": [0.0, 0.0]}},
    {"label": "ellipse_2to1", "spec": {"type": "ellipsoid", "dim": 2, "axes": [2.0, 1.0], "center": [0.0, 0.0]}},
    {"label": "square", "backend": "numeric", "h": 0.015625,
     "spec": {"type": "cuboid", "dim": 2, "sides": [1.0, 1.0], "corner": [0.0, 0.0]}},
    {"label": "rectangle_3to1", "backend": "numeric", "h": 0.015625,
     "spec": {"type": "cuboid", "dim": 2, "sides": [3.0, 1.0], "corner": [0.0, 0.0]}},
    {"label": "ball_cluster_n10", "spec": {"type": "union", "dim": 2, "children": [
        {"type": "ball", "dim": 2, "radius": 1.0, "center": [0.0, 0.0]},
        {"type": "ball", "dim": 2, "radius": 0.5623413251903491, "center": [3.5623413251903493, 0.0]},
        {"type": "ball", "dim": 2, "radius": 0.5623413251903491, "center": [6.687023975571048, 0.0]},
        {"type": "ball", "dim": 2, "radius": 0.5623413251903491, "center": [9.811706625951746, 0.0]},
        {"type": "ball", "dim": 2, "radius": 0.5623413251903491, "center": [12.936389276332445, 0.0]},
        {"type": "ball", "dim": 2, "radius": 0.5623413251903491, "center": [16.061071926713144, 0.0]},
        {"type": "ball", "dim": 2, "radius": 0.5623413251903491, "center": [19.185754577093842, 0.0]},
        {"type": "ball", "dim": 2, "radius": 0.5623413251903491, "center": [22.31043722747454, 0.0]},
        {"type": "ball", "dim": 2, "radius": 0.5623413251903491, "center": [25.43511987785524, 0.0]},
        {"type": "ball", "dim": 2, "radius": 0.5623413251903491, "center": [28.559802528235938, 0.0]},
        {"type": "ball", "dim": 2, "radius": 0.5623413251903491, "center": [31.684485178616637, 0.0]}
    ]}}
  ]
}
"""


def builtin_corpus() -> Corpus:
    return parse_corpus(json.loads(BUILTIN_CORPUS_JSON))


def resolve_backend(spec: Domain, requested: str | None) -> str:
    if requested in (None, "auto"):
        return "oracle" if oracle.supports_torsion(spec) else "numeric"
    if requested not in ("oracle", "numeric"):
        raise ValueError(f"unknown backend {requested!r}")
    return requested


@dataclass
class CorpusRun:
    results: list[CheckResult]
    reports: list[FunctionalReport]
    errors: list[tuple[str, str]]

    @property
    def n_failed(self) -> int:
        return sum(not r.passed for r in self.results)

    @property
    def status(self) -> int:
        if self.n_failed:
            return STATUS_VIOLATION
        return STATUS_ERROR if self.errors else STATUS_PASS

    def summary(self) -> dict:
        worst: dict[str, dict] = {}
        for r in self.results:
            family = r.check_id.split("[")[0]
            if family not in worst or r.margin < worst[family]["margin"]:
                worst[family] = {"margin": r.margin, "check_id": r.check_id, "domain": r.domain}
        return {
            "n_domains": len(self.reports) + len(self.errors),
            "n_checks": len(self.results),
            "n_passed": len(self.results) - self.n_failed,
            "n_failed": self.n_failed,
            "n_errors": len(self.errors),
            "errors": [{"domain": d, "message": msg} for d, msg in self.errors],
            "worst_margin": worst,
            "status": self.status,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["check_id", "domain", "margin", "tolerance", "passed"])
        for r in self.results:
            w.writerow([r.check_id, r.domain, fmt(float(r.margin)), fmt(float(r.tolerance)), str(r.passed).lower()])
        return buf.getvalue()

    def to_text(self) -> str:
        doc = {"results": [r.to_dict() for r in self.results], "summary": self.summary()}
        return json.dumps(round_floats(doc), indent=2) + "\n"


def checks_for_report(report: FunctionalReport, ps, qs) -> list[CheckResult]:
    """Every check that applies to one evaluated domain."""
    out = check_monotone_fp(report, ps)
    out.extend(check_interpolation(report, p) for p in ps if 1.0 <= p <= 2.0)
    out.append(check_t2_bound(report))
    out.append(check_sandwich(report, report.dim))
    if _convex_piece(report.spec) is not None:
        out.extend(check_convex_lower(report, p) for p in ps if not math.isinf(p))
    for p in ps:
        for q in qs:
            if q <= 1:
                out.append(check_fpq_bounded(report, p, q))
    return out


def run_corpus(entries: Sequence[CorpusEntry] | Corpus, ps: Sequence[float] | None = None,
               qs: Sequence[float] | None = None, backend: str | None = "auto",
               h: float | None = None, tol: float = 1e-10, richardson: bool = True) -> CorpusRun:
    """Evaluate each domain and apply all applicable checks.

    A domain that cannot be evaluated is recorded in ``errors`` and the sweep
    continues. Sizes q > 1 add growth checks along equal-ball unions instead
    of boundedness checks.
    """
    if isinstance(entries, Corpus):
        ps = ps if ps is not None else entries.ps
        qs = qs if qs is not None else entries.qs
        entries = entries.entries
    ps = sorted(set(float(p) for p in (ps if ps is not None else DEFAULT_PS)))
    qs = [float(q) for q in (qs or ())]
    needed = sorted(set(ps) | {1.0, 2.0, INF})
    results: list[CheckResult] = []
    reports: list[FunctionalReport] = []
    errors: list[tuple[str, str]] = []
    dims = []
    for entry in entries:
        try:
            chosen = resolve_backend(entry.spec, entry.backend or backend)
            report = evaluate(entry.spec, needed, [q for q in qs if q <= 1], backend=chosen,
                              h=entry.h or h, tol=tol, richardson=richardson, label=entry.label)
            if entry.lambda1_override is not None:
                report.lambda1 = Lambda1Bracket(*entry.lambda1_override)
                report.fp.clear()
                report.fpq.clear()
                _fill(report, needed, [q for q in qs if q <= 1], report.lambda1)
            results.extend(checks_for_report(report, ps, qs))
        except (ValueError, KeyError, ArithmeticError, RuntimeError) as exc:
            errors.append((entry.label, f"{type(exc).__name__}: {exc}"))
            continue
        reports.append(report)
        if report.dim not in dims:
            dims.append(report.dim)
    for m in dims:
        for p in ps:
            for q in qs:
                if q > 1 and not math.isinf(p):
                    results.append(check_fpq_growth(m, p, q))
    return CorpusRun(results, reports, errors)


__all__ = [
    "CheckResult", "CorpusEntry", "Corpus", "CorpusRun", "check_monotone_fp", "check_interpolation",
    "check_t2_bound", "check_sandwich", "check_energy_identity", "energy_mismatch", "check_convex_lower",
    "check_fpq_bounded", "check_fpq_growth", "run_corpus", "builtin_corpus", "parse_corpus", "load_corpus",
]
