"""Command-line entry point: ``torsionlab <command> [options]``.

Exit codes: 0 success, 1 an inequality check failed, 2 usage or runtime error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from pathlib import Path

from . import constructions, oracle
from .domains import Ball, Cuboid, Ellipsoid, GeometryError, IntervalUnion, from_dict
from .functionals import evaluate, f_pq, fmt, reports_to_csv, reports_to_text, round_floats
from .specialfn import first_bessel_zero
from .verify import STATUS_ERROR, builtin_corpus, load_corpus, resolve_backend, run_corpus


class UsageError(ValueError):
    pass


def parse_list(text: str | None, allow_inf: bool = True) -> list[float]:
    if text is None or not text.strip():
        return []
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if allow_inf and tok.lower() in ("inf", "infinity"):
            out.append(math.inf)
        else:
            out.append(float(tok))
    return out


def parse_int_list(text: str) -> list[int]:
    text = text.split("=", 1)[1] if "=" in text else text
    return [int(t) for t in text.split(",") if t.strip()]


def _numbers(text: str) -> tuple[float, ...]:
    return tuple(float(t) for t in text.split(","))


def domain_from_arg(text: str, dim: int = 2):
    """Named shape, inline JSON document, or path to a JSON file.

    Named shapes: interval, ball, disk, square, ellipse:a,b, rectangle:a,b,
    cuboid:a,b[,c...], ellipsoid:a,b[,c...], intervals:a,b,c,d,...
    """
    text = text.strip()
    if text.startswith("{"):
        return from_dict(json.loads(text))
    name, _, args = text.partition(":")
    name = name.lower()
    if name == "interval":
        return IntervalUnion(((0.0, 1.0),))
    if name == "intervals" and args:
        vals = _numbers(args)
        return IntervalUnion(tuple(zip(vals[::2], vals[1::2])))
    if name == "ball":
        return IntervalUnion(((-1.0, 1.0),)) if dim == 1 else Ball(dim, 1.0)
    if name == "disk":
        return Ball(2, 1.0)
    if name == "square":
        return Cuboid((1.0, 1.0))
    if name in ("ellipse", "ellipsoid") and args:
        return Ellipsoid(_numbers(args))
    if name in ("rectangle", "cuboid") and args:
        return Cuboid(_numbers(args))
    path = Path(text)
    if path.exists():
        return from_dict(json.loads(path.read_text()))
    raise UsageError(f"unknown domain {text!r}: not a named shape, JSON document or existing file")


def write_atomic(path, text: str) -> None:
    """Write to a temporary file in the target directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(args, text: str, table: str | None = None) -> None:
    if args.out:
        write_atomic(args.out, text)
    sys.stdout.write(table if table is not None else text)


def _csv(rows, header) -> str:
    lines = [",".join(header)]
    lines += [",".join(fmt(v) if isinstance(v, float) else str(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def _structured(rows, header) -> str:
    return json.dumps(round_floats([dict(zip(header, row)) for row in rows]), indent=2) + "\n"


def _tabular(args, rows, header) -> None:
    text = _csv(rows, header) if args.format == "csv" else _structured(rows, header)
    _emit(args, text)


def _check_numeric_args(args) -> None:
    if getattr(args, "h", None) is not None and not args.h > 0:
        raise UsageError(f"--h must be positive, got {args.h}")
    if getattr(args, "tol", None) is not None and not args.tol > 0:
        raise UsageError(f"--tol must be positive, got {args.tol}")


def _human_table(report) -> str:
    lines = [f"{report.label}  backend={report.backend}  |Omega|={fmt(report.measure)}  lambda1={fmt(report.lambda1)}"]
    for p, val in report.fp.items():
        err = report.error("fp", p)
        tail = f"  +/- {fmt(err)}" if err else ""
        lines.append(f"  p={fmt(p):>6}  T_p={fmt(report.tp[p]):>20}  F_p={fmt(val)}{tail}")
    for (p, q), val in report.fpq.items():
        lines.append(f"  p={fmt(p):>6}  q={fmt(q):>6}  F_pq={fmt(val)}")
    return "\n".join(lines) + "\n"


def cmd_eval(args) -> int:
    _check_numeric_args(args)
    ps = parse_list(args.p)
    if not ps:
        raise UsageError("--p needs at least one value")
    spec = domain_from_arg(args.domain, args.dim)
    backend = resolve_backend(spec, args.backend)
    report = evaluate(spec, ps, parse_list(args.q, allow_inf=False), backend=backend, h=args.h,
                      tol=args.tol, richardson=args.richardson, label=args.domain if len(args.domain) < 40 else None)
    text = reports_to_csv([report]) if args.format == "csv" else reports_to_text([report])
    _emit(args, text, _human_table(report))
    return 0


def cmd_verify(args) -> int:
    _check_numeric_args(args)
    corpus = load_corpus(args.corpus) if args.corpus else builtin_corpus()
    ps = parse_list(args.p) if args.p else None
    qs = parse_list(args.q, allow_inf=False) if args.q else None
    run = run_corpus(corpus, ps, qs, backend=args.backend, h=args.h, tol=args.tol, richardson=args.richardson)
    text = run.to_csv() if args.format == "csv" else run.to_text()
    if args.out:
        write_atomic(args.out, text)
    summary = run.summary()
    for r in run.results:
        if not r.passed:
            sys.stdout.write(f"FAIL {r.check_id} {r.domain} margin={fmt(float(r.margin))} tol={fmt(float(r.tolerance))}\n")
    for label, msg in run.errors:
        sys.stderr.write(f"error in {label}: {msg}\n")
    sys.stdout.write(
        f"{summary['n_checks']} checks on {summary['n_domains']} domains: "
        f"{summary['n_passed']} passed, {summary['n_failed']} failed, {summary['n_errors']} errors\n"
    )
    return run.status


def _sup_witness(m: int, p: float, q: float) -> tuple[float, str]:
    if q > 1:
        return math.inf, "unbounded"
    if m == 1:
        return constructions.one_d_sharp(p, q), "sup_1d"
    if q == 0 and not math.isinf(p):
        return constructions.talenti_fp0(m, p), "sup_rearrangement"
    return constructions.fpq_upper_bound(m, q), "bound_faber_krahn"


def cmd_sweep_pq(args) -> int:
    _check_numeric_args(args)
    ps = parse_list(args.p)
    qs = parse_list(args.q, allow_inf=False)
    ns = parse_int_list(args.sequence) if args.sequence else []
    header = ["p", "q", "value", "domain"] + [f"seq_n{n}" for n in ns]
    rows = []
    report = None
    if args.domain:
        spec = domain_from_arg(args.domain, args.dim)
        if ps:
            report = evaluate(spec, ps, backend=resolve_backend(spec, args.backend), h=args.h, tol=args.tol,
                              richardson=args.richardson)
        m = spec.dim
    else:
        m = args.dim
    for p in ps:
        for q in qs:
            if report is not None:
                value = f_pq(report.tp[p], report.lambda1.lower, report.measure, p, q, m)
                label = args.domain
            else:
                value, label = _sup_witness(m, p, q)
            extra = []
            for n in ns:
                extra.append(constructions.equal_ball_sequence(m, p, q, n).fp_value if not math.isinf(p) else "")
            rows.append([p, float(q), value, label] + extra)
    _tabular(args, rows, header)
    return 0


def cmd_sequence(args) -> int:
    ns = parse_int_list(args.n)
    if not ns:
        raise UsageError("--n needs at least one value")
    ps = parse_list(args.p) or [1.0]
    p = ps[0]
    if args.family == "cluster":
        samples = [constructions.cluster_sequence(args.dim, p, n) for n in ns]
    else:
        qs = parse_list(args.q, allow_inf=False) or [1.0]
        samples = [constructions.equal_ball_sequence(args.dim, p, qs[0], n) for n in ns]
    if args.format == "csv":
        text = constructions.sequence_to_csv(samples)
    else:
        cols = constructions.SEQUENCE_CSV_COLUMNS
        rows = [[s.n, s.r_n, s.measure, s.lambda1, s.tp, s.fp_value, s.predicted_bound] for s in samples]
        text = _structured(rows, cols)
    _emit(args, text)
    return 0


def cmd_oned_table(args) -> int:
    ps = parse_list(args.p) if args.p else [1.0, 2.0, 5.0, 10.0, math.inf]
    qs = parse_list(args.q, allow_inf=False) if args.q else [0.0, 0.5, 1.0]
    bad = [q for q in qs if q > 1]
    if bad:
        raise UsageError(
            f"q = {fmt(bad[0])} > 1: the 1-D supremum is infinite, since F_(p,q) grows without bound "
            "along unions of n equal intervals of total length one"
        )
    unit = IntervalUnion(((0.0, 1.0),))
    lam = oracle.lambda1(unit).value
    header = ["p", "q", "sharp", "single_interval", "rearrangement_q0"]
    rows = []
    for p in ps:
        tp = oracle.tp_norm(unit, p)
        for q in qs:
            sharp = constructions.one_d_sharp(p, q)
            attained = f_pq(tp, lam, 1.0, p, q, 1)
            tal = constructions.talenti_fp0(1, p) if (q == 0 and not math.isinf(p)) else ""
            rows.append([p, float(q), sharp, attained, tal])
    _tabular(args, rows, header)
    return 0


def cmd_bessel_zero(args) -> int:
    nus = parse_list(args.nu, allow_inf=False)
    if not nus:
        raise UsageError("--nu needs at least one value")
    rows = []
    for nu in nus:
        z = first_bessel_zero(nu)
        rows.append([float(nu), z.value, z.precision])
    _tabular(args, rows, ["nu", "j", "precision"])
    return 0


def _common(sub, domain=True, numeric=True):
    if domain:
        sub.add_argument("--domain", help="named shape, inline JSON or JSON file")
    sub.add_argument("--dim", type=int, default=2)
    sub.add_argument("--p", help="comma-separated p values; 'inf' allowed")
    sub.add_argument("--q", help="comma-separated q values")
    if numeric:
        sub.add_argument("--backend", choices=["oracle", "numeric", "auto"], default="auto")
        sub.add_argument("--h", type=float, default=None, help="grid spacing for the numeric backend")
        sub.add_argument("--tol", type=float, default=1e-10)
        sub.add_argument("--richardson", action=argparse.BooleanOptionalAction, default=True)
    sub.add_argument("--out", help="output file, written atomically")
    sub.add_argument("--format", choices=["csv", "txt"], default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="torsionlab", description="Torsion-function functionals F_p and F_p,q.")
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("eval", help="tabulate lambda_1, T_p, F_p, F_p,q for one domain")
    _common(sub)
    sub.set_defaults(func=cmd_eval)

    sub = subs.add_parser("verify", help="run every inequality check over a corpus")
    _common(sub, domain=False)
    sub.add_argument("--corpus", help="corpus JSON file; built-in corpus when omitted")
    sub.set_defaults(func=cmd_verify)

    sub = subs.add_parser("sweep-pq", help="F_p,q over a (p, q) grid")
    _common(sub)
    sub.add_argument("--sequence", help="n=1,10,100 adds equal-ball sequence columns")
    sub.set_defaults(func=cmd_sweep_pq)

    sub = subs.add_parser("sequence", help="extremal ball-union sequences")
    _common(sub, domain=False, numeric=False)
    sub.add_argument("--family", choices=["cluster", "equal-balls"], default="cluster")
    sub.add_argument("--n", required=True, help="comma-separated sample sizes")
    sub.set_defaults(func=cmd_sequence)

    sub = subs.add_parser("oneD-table", help="sharp one-dimensional constants")
    _common(sub, domain=False, numeric=False)
    sub.set_defaults(func=cmd_oned_table)

    sub = subs.add_parser("bessel-zero", help="first positive zero of J_nu")
    sub.add_argument("--nu", required=True)
    sub.add_argument("--out")
    sub.add_argument("--format", choices=["csv", "txt"], default="csv")
    sub.set_defaults(func=cmd_bessel_zero)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "command", None) == "eval" and not args.domain:
        parser.error("eval needs --domain")
    try:
        return args.func(args)
    except (ValueError, GeometryError, OSError, KeyError, ArithmeticError, RuntimeError) as exc:
        sys.stderr.write(f"torsionlab {args.command}: {exc}\n")
        return STATUS_ERROR


if __name__ == "__main__":
    sys.exit(main())
