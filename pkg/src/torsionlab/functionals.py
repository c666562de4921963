"""Scale-invariant functionals built from T_p, lambda_1 and the measure.

``p = math.inf`` stands for the sup-norm variants; with it the measure
exponent changes discontinuously, so it is handled as its own case and
never approximated by a large finite p.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

from . import oracle, pde
from .domains import Domain, primitives
from .oracle import Lambda1Bracket

INF = math.inf


def _check_positive(**values):
    for name, val in values.items():
        if not val > 0:
            raise ValueError(f"{name} must be positive, got {val!r}")


def f_p(tp: float, lambda1: float, measure: float, p: float) -> float:
    """F_p = T_p lambda_1 / |Omega|^(1/p); for p = inf, v_max lambda_1."""
    _check_positive(tp=tp, lambda1=lambda1, measure=measure)
    if math.isinf(p):
        return tp * lambda1
    return tp * lambda1 / measure ** (1.0 / p)


def f_pq(tp: float, lambda1: float, measure: float, p: float, q: float, m: int) -> float:
    """F_{p,q} = T_p lambda_1^q / |Omega|^(1/p + 2(1-q)/m)."""
    _check_positive(tp=tp, lambda1=lambda1, measure=measure)
    expo = 2.0 * (1.0 - q) / m
    if not math.isinf(p):
        expo += 1.0 / p
    return tp * lambda1**q / measure**expo


@dataclass
class FunctionalReport:
    label: str
    spec: Domain
    backend: str
    measure: float
    lambda1: Lambda1Bracket
    tp: dict
    fp: dict = field(default_factory=dict)
    fpq: dict = field(default_factory=dict)
    errors: dict = field(default_factory=dict)
    settings: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.spec.dim

    def fp_at(self, p: float, lam: float) -> float:
        return f_p(self.tp[p], lam, self.measure, p)

    def fpq_at(self, p: float, q: float, lam: float) -> float:
        return f_pq(self.tp[p], lam, self.measure, p, q, self.dim)

    def error(self, *key) -> float:
        return self.errors.get(key, 0.0)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "spec": self.spec.to_dict(),
            "backend": self.backend,
            "settings": self.settings,
            "measure": self.measure,
            "lambda1": {"lower": self.lambda1.lower, "upper": self.lambda1.upper, "exact": self.lambda1.exact},
            "tp": {_pkey(p): v for p, v in self.tp.items()},
            "fp": {_pkey(p): list(v) for p, v in self.fp.items()},
            "fpq": [{"p": _pkey(p), "q": q, "value": list(v)} for (p, q), v in self.fpq.items()],
            "errors": [{"key": [_pkey(k) for k in key], "value": v} for key, v in self.errors.items()],
        }


def _pkey(p):
    if isinstance(p, float) and math.isinf(p):
        return "inf"
    return p


def fmt(x) -> str:
    """Twelve significant digits; brackets print as [lo, hi]."""
    if isinstance(x, (tuple, list)):
        if len(x) == 2 and x[0] == x[1]:
            return fmt(x[0])
        return "[" + ", ".join(fmt(v) for v in x) + "]"
    if isinstance(x, Lambda1Bracket):
        return fmt((x.lower, x.upper))
    if isinstance(x, float):
        if math.isinf(x):
            return "inf"
        return format(x, ".12g")
    return str(x)


def round_floats(obj):
    """Copy of a JSON-like tree with floats cut to 12 significant digits."""
    if isinstance(obj, float):
        return fmt(obj) if not math.isfinite(obj) else float(fmt(obj))
    if isinstance(obj, dict):
        return {k: round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_floats(v) for v in obj]
    return obj


REPORT_CSV_COLUMNS = ["domain", "p", "q", "measure", "lambda1", "tp", "fp", "fpq", "err"]


def report_rows(report: FunctionalReport) -> list[dict]:
    rows = []
    for p, val in report.fp.items():
        rows.append({
            "domain": report.label, "p": fmt(p), "q": "", "measure": fmt(report.measure),
            "lambda1": fmt(report.lambda1), "tp": fmt(report.tp[p]), "fp": fmt(val), "fpq": "",
            "err": fmt(report.error("fp", p)),
        })
    for (p, q), val in report.fpq.items():
        rows.append({
            "domain": report.label, "p": fmt(p), "q": fmt(float(q)), "measure": fmt(report.measure),
            "lambda1": fmt(report.lambda1), "tp": fmt(report.tp[p]), "fp": "", "fpq": fmt(val),
            "err": fmt(report.error("fpq", p, q)),
        })
    return rows


def reports_to_csv(reports: Sequence[FunctionalReport]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=REPORT_CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for rep in reports:
        writer.writerows(report_rows(rep))
    return buf.getvalue()


def reports_to_text(reports: Sequence[FunctionalReport]) -> str:
    return json.dumps(round_floats([r.to_dict() for r in reports]), indent=2) + "\n"


def _fill(report: FunctionalReport, ps, qs, lam: Lambda1Bracket):
    for p in ps:
        report.fp[p] = tuple(report.fp_at(p, e) for e in (lam.lower, lam.upper))
        for q in qs:
            report.fpq[(p, q)] = tuple(report.fpq_at(p, q, e) for e in (lam.lower, lam.upper))


def _numeric_quantities(spec: Domain, ps, h: float, tol: float, cache: dict):
    """lambda_1, T_p and v_max on one grid spacing, solving component by component."""
    lam = math.inf
    tp_pow = {p: 0.0 for p in ps if not math.isinf(p)}
    vmax = 0.0
    for comp in pde.component_specs(spec):
        lo, _ = comp.bbox()
        key = (json.dumps(comp.translated(-lo).to_dict()), h, tol)
        if key not in cache:
            grid = pde.rasterize(comp, h)
            fld = pde.solve_torsion(grid, tol)
            eig = pde.lambda1_numeric(grid, tol)
            cache[key] = (fld, eig)
        fld, eig = cache[key]
        lam = min(lam, eig.lambda1)
        vmax = max(vmax, fld.vmax)
        for p in tp_pow:
            tp_pow[p] += pde.lp_norm(fld, p) ** p
    tp = {p: tp_pow[p] ** (1.0 / p) for p in tp_pow}
    if any(math.isinf(p) for p in ps):
        tp[INF] = vmax
    return lam, tp


def default_spacing(spec: Domain) -> float:
    """64 nodes across the narrowest piece."""
    return min(piece.min_width() for piece in primitives(spec)) / 64.0


def evaluate(spec: Domain, ps: Sequence[float], qs: Sequence[float] = (), backend: str = "oracle",
             h: float | None = None, tol: float = 1e-10, richardson: bool = True,
             label: str | None = None) -> FunctionalReport:
    """Tabulate measure, lambda_1, T_p, F_p and F_{p,q} for one domain."""
    ps = [float(p) for p in ps]
    qs = [float(q) for q in qs]
    label = label or type(spec).__name__
    measure = spec.measure()
    if backend == "oracle":
        lam = oracle.lambda1(spec)
        tp = {p: oracle.tp_norm(spec, p) for p in ps}
        report = FunctionalReport(label, spec, "oracle", measure, lam, tp)
        _fill(report, ps, qs, lam)
        return report
    if backend != "numeric":
        raise ValueError(f"unknown backend {backend!r}")
    if spec.dim > 2:
        raise ValueError("numeric backend supports dimension 1 and 2 only")
    h = h or default_spacing(spec)
    cache: dict = {}
    lam_c, tp_c = _numeric_quantities(spec, ps, h, tol, cache)
    settings = {"h": h, "tol": tol, "richardson": richardson}
    if not richardson:
        lam = Lambda1Bracket(lam_c, lam_c)
        report = FunctionalReport(label, spec, "numeric", measure, lam, tp_c, settings=settings)
        _fill(report, ps, qs, lam)
        return report

    lam_f, tp_f = _numeric_quantities(spec, ps, 0.5 * h, tol, cache)
    lam_x, lam_err = pde.richardson(lam_c, lam_f)
    tp = {}
    errors = {("lambda1",): lam_err}
    for p in tp_c:
        tp[p], errors[("tp", p)] = pde.richardson(tp_c[p], tp_f[p])
    lam = Lambda1Bracket(lam_x, lam_x)
    report = FunctionalReport(label, spec, "numeric", measure, lam, tp, errors=errors, settings=settings)
    _fill(report, ps, qs, lam)
    # error of each functional from its own coarse/fine pair
    m = spec.dim
    for p in ps:
        _, errors[("fp", p)] = pde.richardson(f_p(tp_c[p], lam_c, measure, p), f_p(tp_f[p], lam_f, measure, p))
        for q in qs:
            _, errors[("fpq", p, q)] = pde.richardson(
                f_pq(tp_c[p], lam_c, measure, p, q, m), f_pq(tp_f[p], lam_f, measure, p, q, m)
            )
    return report
