import csv
import io
import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torsionlab.domains import Ball, Cuboid, Ellipsoid, IntervalUnion, arrange, scale
from torsionlab.functionals import (
    INF,
    REPORT_CSV_COLUMNS,
    evaluate,
    f_p,
    f_pq,
    fmt,
    reports_to_csv,
    reports_to_text,
    round_floats,
)

UNIT = IntervalUnion(((0.0, 1.0),))
ORACLE_DOMAINS = [
    UNIT,
    IntervalUnion(((0.0, 1.0), (2.0, 2.5))),
    Ball(2, 1.0),
    Ball(3, 1.0),
    Ellipsoid((2.0, 1.0)),
    Ellipsoid((3.0, 1.0, 0.5)),
    arrange([Ball(2, 1.0), Ball(2, 0.4)]),
]


def test_unit_interval_known_values():
    r = evaluate(UNIT, [1, 2, INF])
    assert r.fp[1.0][0] == pytest.approx(math.pi**2 / 12, rel=1e-14)
    assert r.fp[2.0][0] == pytest.approx(math.pi**2 / math.sqrt(120), rel=1e-14)
    assert r.fp[INF][0] == pytest.approx(math.pi**2 / 8, rel=1e-14)


def test_fpq_reduces_to_fp_at_q1():
    for spec in ORACLE_DOMAINS:
        r = evaluate(spec, [1, 2.5, INF], [1.0])
        for p in (1.0, 2.5, INF):
            assert r.fpq[(p, 1.0)] == pytest.approx(r.fp[p], rel=1e-14)


def test_f_p_validation():
    with pytest.raises(ValueError):
        f_p(0.0, 1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        f_pq(1.0, -1.0, 1.0, 1.0, 0.5, 2)


def test_inf_is_not_large_p():
    # the measure exponent drops out at p = inf
    assert f_p(2.0, 3.0, 10.0, INF) == 6.0
    assert f_pq(2.0, 3.0, 4.0, INF, 0.0, 2) == pytest.approx(2.0 * 1.0 / 4.0)


@pytest.mark.parametrize("spec", ORACLE_DOMAINS, ids=lambda s: type(s).__name__)
@given(alpha=st.sampled_from([0.5, 2.0, 7.0]) | st.floats(0.1, 10.0))
@settings(max_examples=15)
def test_homothety_invariance(spec, alpha):
    ps, qs = [1.0, 2.0, 4.0, INF], [0.0, 0.5, 1.5]
    r0 = evaluate(spec, ps, qs)
    r1 = evaluate(scale(spec, alpha), ps, qs)
    for p in ps:
        for a, b in zip(r0.fp[p], r1.fp[p]):
            assert b == pytest.approx(a, rel=1e-12)
        for q in qs:
            for a, b in zip(r0.fpq[(p, q)], r1.fpq[(p, q)]):
                assert b == pytest.approx(a, rel=1e-12)


def test_bracketed_report_keeps_both_endpoints():
    r = evaluate(Ellipsoid((2.0, 1.0)), [1.0])
    lo, hi = r.fp[1.0]
    assert lo < hi
    assert fmt(r.fp[1.0]).startswith("[")


def test_numeric_backend_square():
    r = evaluate(Cuboid((1.0, 1.0)), [1.0, 2.0, INF], [0.0], backend="numeric", h=1 / 32)
    assert r.backend == "numeric"
    assert r.lambda1.lower == pytest.approx(2 * math.pi**2, rel=1e-4)
    assert r.tp[1.0] == pytest.approx(0.035144253738788429, rel=1e-5)
    assert r.error("fp", 1.0) > 0
    assert ("fpq", 0.0, 0.0) not in r.errors
    assert r.error("fpq", 1.0, 0.0) > 0


def test_numeric_backend_without_richardson():
    r = evaluate(UNIT, [1.0], backend="numeric", h=1 / 16, richardson=False)
    assert r.errors == {}
    # nodal values are exact; the node sum of x(1-x)/2 is 1/12 - h^2/12
    assert r.tp[1.0] == pytest.approx(1 / 12 - (1 / 16) ** 2 / 12, rel=1e-12)


def test_numeric_backend_limits():
    with pytest.raises(ValueError):
        evaluate(Ball(3, 1.0), [1.0], backend="numeric")
    with pytest.raises(ValueError):
        evaluate(UNIT, [1.0], backend="magic")


def test_csv_projection():
    r = evaluate(UNIT, [1.0, INF], [0.0], label="unit")
    rows = list(csv.DictReader(io.StringIO(reports_to_csv([r]))))
    assert list(rows[0].keys()) == REPORT_CSV_COLUMNS
    assert rows[0]["fp"] == "0.822467033424"
    assert rows[1]["p"] == "inf"
    assert rows[2]["q"] == "0"


def test_text_report_round_trips_through_json():
    r = evaluate(Ellipsoid((2.0, 1.0)), [1.0, INF], [0.5])
    doc = json.loads(reports_to_text([r]))
    assert doc[0]["spec"]["type"] == "ellipsoid"
    assert doc[0]["tp"]["inf"] == pytest.approx(0.4)


def test_twelve_significant_digits():
    assert fmt(math.pi) == "3.14159265359"
    assert round_floats({"a": [math.pi, math.inf]}) == {"a": [3.14159265359, "inf"]}


@pytest.mark.parametrize("spec", [UNIT, Ball(2, 1.0), Ellipsoid((2.0, 1.0))], ids=["interval", "disk", "ellipse"])
def test_backends_agree(spec):
    exact = evaluate(spec, [1.0, 2.0, INF])
    num = evaluate(spec, [1.0, 2.0, INF], backend="numeric")
    lo, hi = exact.lambda1.lower, exact.lambda1.upper
    assert lo * (1 - 5e-3) <= num.lambda1.lower <= hi * (1 + 5e-3)
    for p in (1.0, 2.0, INF):
        assert num.tp[p] == pytest.approx(exact.tp[p], rel=5e-3)
