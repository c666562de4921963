"""Extremal sequences and explicit bound formulas for the F_p family.

The ball-union sequences are built as real domain specs and evaluated with
the closed-form backend, so each sample carries both the predicted value
and an independently computed one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import oracle
from .domains import Ball, DisjointUnion, IntervalUnion, arrange
from .functionals import f_p, f_pq, fmt
from .specialfn import ball_volume, first_bessel_zero, gamma_ratio, ln_gamma

# Numerical upper bound 1 - 1/11560 for F_1 over planar convex sets, taken from
# the literature as input data; it is not derived here.
CONVEX_F1_PLANE_BOUND = 1.0 - 1.0 / 11560.0


@dataclass(frozen=True)
class SequenceSample:
    n: int
    spec: DisjointUnion
    r_n: float
    measure: float
    lambda1: float
    tp: float
    fp_value: float
    predicted_bound: float


def unit_ball(m: int):
    return IntervalUnion(((-1.0, 1.0),)) if m == 1 else Ball(m, 1.0)


def ball_fp(m: int, p: float) -> float:
    """F_p of the unit ball."""
    b = unit_ball(m)
    return f_p(oracle.tp_norm(b, p), oracle.lambda1(b).value, b.measure(), p)


def _ball_union(m: int, radii) -> DisjointUnion:
    if m == 1:
        members = [IntervalUnion(((-r, r),)) for r in radii]
    else:
        members = [Ball(m, r) for r in radii]
    return arrange(members, gap=2.0)


def cluster_radius(m: int, p: float, n: int) -> float:
    return (m / (2.0 * p * n)) ** (1.0 / (2.0 * p + m))


def cluster_sequence(m: int, p: float, n: int) -> SequenceSample:
    """Unit ball plus n balls of the radius that minimises the F_p bound."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    r = cluster_radius(m, p, n)
    if r >= 1.0:
        raise ValueError(f"r_n = {r} >= 1 for n = {n}; the construction needs small balls")
    spec = _ball_union(m, [1.0] + [r] * n)
    expo = 2.0 * p / (2.0 * p + m)
    bound_pow = (1.0 + 2.0 * p / m) * (m / (2.0 * p)) ** expo * n**-expo * ball_fp(m, p) ** p
    lam = oracle.lambda1(spec).value
    tp = oracle.tp_norm(spec, p)
    meas = spec.measure()
    return SequenceSample(n, spec, r, meas, lam, tp, f_p(tp, lam, meas, p), bound_pow ** (1.0 / p))


def equal_ball_radius(m: int, n: int) -> float:
    return (1.0 / (ball_volume(m) * n)) ** (1.0 / m)


def equal_ball_sequence(m: int, p: float, q: float, n: int) -> SequenceSample:
    """n equal balls of total measure one; F_{p,q} grows without bound iff q > 1.

    ``predicted_bound`` holds the closed-form value of F_{p,q} for the union,
    ``fp_value`` the same quantity evaluated on the constructed domain.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    r = equal_ball_radius(m, n)
    b = unit_ball(m)
    lam_b = oracle.lambda1(b).value
    closed = (
        r ** (2.0 * p - 2.0 * p * q) * oracle.tp_norm(b, p) ** p * lam_b ** (p * q) / ball_volume(m)
    ) ** (1.0 / p)
    spec = _ball_union(m, [r] * n)
    lam = oracle.lambda1(spec).value
    tp = oracle.tp_norm(spec, p)
    meas = spec.measure()
    return SequenceSample(n, spec, r, meas, lam, tp, f_pq(tp, lam, meas, p, q, m), closed)


def sandwich_constant(m: int) -> float:
    """4 + 3 m log 2, an upper bound for v_max lambda_1 on any open set in R^m."""
    return 4.0 + 3.0 * m * math.log(2.0)


def fpq_upper_bound(m: int, q: float) -> float:
    """Upper bound for F_{p,q} when q <= 1, valid for every p.

    Faber-Krahn moves lambda_1^(q-1) |Omega|^(2(q-1)/m) onto the ball, and
    sup F_p <= sup F_inf is bounded by the sandwich constant.
    """
    if q > 1:
        raise ValueError(f"q = {q} > 1: F_{{p,q}} is unbounded along equal-ball unions")
    b = unit_ball(m)
    return sandwich_constant(m) * oracle.lambda1(b).value ** (q - 1.0) * ball_volume(m) ** (2.0 * (q - 1.0) / m)


def g_p_convex_lower(m: int, p: float) -> float:
    """Lower bound for F_p over convex sets in R^m."""
    shape = math.exp(ln_gamma(0.5 * m + 1.0) + ln_gamma(p + 1.0) - ln_gamma(0.5 * m + p + 1.0))
    return math.pi**2 / 8.0 * m ** (-(m + 2.0 * p) / p) * shape ** (1.0 / p)


def tp_ball_lower(m: int, p: float) -> float:
    """Elementary lower bound for T_p of the unit ball, m >= 2."""
    if m < 2:
        raise ValueError("bound is stated for m >= 2")
    return ball_volume(m) ** (1.0 / p) / (2.0 * m ** ((p + 1.0) / p) * p ** (m / (2.0 * p)))


def bessel_ratio_bound(m: int) -> float:
    """j_{(m-2)/2}^2 / (2^(19/16) m^(9/8)); exceeds one for m = 2..19."""
    if m < 2:
        raise ValueError("m must be >= 2")
    j = first_bessel_zero(0.5 * (m - 2)).value
    return j**2 / (2.0 ** (19.0 / 16.0) * m ** (9.0 / 8.0))


def recursion_bound(p: float, n: int, fp_base: float) -> float:
    """Bound for sup F_{p+n} in terms of sup F_p after n steps of the recursion."""
    if p < 1 or n < 1 or fp_base <= 0:
        raise ValueError("need p >= 1, n >= 1, fp_base > 0")
    prod = math.prod(p + j for j in range(1, n + 1))
    return ((p + n) / (4.0**n * p) * prod) ** (1.0 / (p + n)) * fp_base ** (p / (p + n))


def integer_fn_bound(n: int) -> float:
    """(n n! / 4^(n-1))^(1/n), the bound on sup F_n from sup F_1 = 1."""
    return (n * math.factorial(n) / 4.0 ** (n - 1)) ** (1.0 / n)


def convex_p2_criterion(delta: float) -> float:
    return ((1.0 + delta**2 / 4.0) * CONVEX_F1_PLANE_BOUND) ** (1.0 / (2.0 + delta))


def p2_convex_lower() -> float:
    """2 + delta*, delta* = 2/sqrt(11559), confirmed by bisection on the product bound."""
    delta_star = 2.0 / math.sqrt(11559.0)

    def g(d):
        return (1.0 + d * d / 4.0) * CONVEX_F1_PLANE_BOUND - 1.0

    lo, hi = 0.0, 1.0
    if not (g(lo) < 0 < g(hi)):
        raise ArithmeticError("product bound does not change sign on (0, 1]")
    while hi - lo > 1e-15:
        mid = 0.5 * (lo + hi)
        if g(mid) < 0:
            lo = mid
        else:
            hi = mid
    root = 0.5 * (lo + hi)
    if abs(root - delta_star) > 1e-10:
        raise ArithmeticError(f"bisection root {root} disagrees with 2/sqrt(11559) = {delta_star}")
    return 2.0 + delta_star


def talenti_fp0(m: int, p: float) -> float:
    """sup F_{p,0} = T_p(B_1) / |B_1|^(1/p + 2/m)."""
    b = unit_ball(m)
    return oracle.tp_norm(b, p) / ball_volume(m) ** (1.0 / p + 2.0 / m)


def one_d_sharp(p: float, q: float) -> float:
    """sup F_{p,q} over open subsets of the line, q <= 1."""
    if q > 1:
        raise ValueError(f"q = {q} > 1: the supremum is infinite")
    if math.isinf(p):
        return one_d_sharp_inf(q)
    return (
        math.pi ** ((4.0 * p * q + 1.0) / (2.0 * p))
        / 2.0 ** ((1.0 + 3.0 * p) / p)
        * gamma_ratio(p + 1.0, p + 1.5) ** (1.0 / p)
    )


def one_d_sharp_inf(q: float) -> float:
    if q > 1:
        raise ValueError(f"q = {q} > 1: the supremum is infinite")
    return math.pi ** (2.0 * q) / 8.0


SEQUENCE_CSV_COLUMNS = ["n", "r_n", "measure", "lambda1", "tp", "fp", "predicted_bound"]


def sequence_to_csv(samples) -> str:
    lines = [",".join(SEQUENCE_CSV_COLUMNS)]
    for s in samples:
        vals = [s.r_n, s.measure, s.lambda1, s.tp, s.fp_value, s.predicted_bound]
        vals = [str(s.n)] + [fmt(float(v)) for v in vals]
        lines.append(",".join(vals))
    return "\n".join(lines) + "\n"
