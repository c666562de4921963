"""Special functions behind the closed forms: log-Gamma, Bessel J, Bessel zeros.

Everything here is pure Python on floats. No dependency on scipy, so the
closed-form oracles stay independent of the libraries used in the tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# Lanczos approximation, g = 7, n = 9.
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

# Power series is used up to this argument; beyond it, backward recurrence.
_SERIES_MAX_X = 8.0


def ln_gamma(x: float) -> float:
    """Natural log of the Gamma function for x > 0."""
    if not x > 0:
        raise ValueError(f"ln_gamma requires x > 0, got {x!r}")
    if x < 0.5:
        # Lanczos sum is accurate for x >= 0.5; shift up once.
        return ln_gamma(x + 1.0) - math.log(x)
    z = x - 1.0
    acc = _LANCZOS_COEF[0]
    for i in range(1, len(_LANCZOS_COEF)):
        acc += _LANCZOS_COEF[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * math.log(t) - t + math.log(acc)


def gamma_ratio(a: float, b: float) -> float:
    """Gamma(a) / Gamma(b) computed through log-Gamma."""
    return math.exp(ln_gamma(a) - ln_gamma(b))


def _bessel_series(nu: float, x: float) -> float:
    half = 0.5 * x
    term = math.exp(nu * math.log(half) - ln_gamma(nu + 1.0))
    total = term
    q = -half * half
    k = 0
    while True:
        k += 1
        term *= q / (k * (k + nu))
        total += term
        if abs(term) < 1e-18 * abs(total) or k > 500:
            return total


def _bessel_miller(nu: float, x: float) -> float:
    # Backward recurrence on J_{nu+k}, normalised with
    #   sum_k (nu + 2k) Gamma(nu + k) / k! * J_{nu+2k}(x) = (x/2)^nu.
    n_top = int(x + 2.0 * math.sqrt(40.0 * x) + 40)
    if n_top % 2:
        n_top += 1
    f_next = 0.0
    f_cur = 1e-250
    norm = 0.0
    for k in range(n_top, 0, -1):
        if k % 2 == 0:
            norm += _neumann_coef(nu, k) * f_cur
        f_prev = 2.0 * (nu + k) / x * f_cur - f_next
        f_next, f_cur = f_cur, f_prev
        if abs(f_cur) > 1e200:
            f_cur *= 1e-200
            f_next *= 1e-200
            norm *= 1e-200
    # f_cur now holds the unnormalised J_nu
    norm += _neumann_coef(nu, 0) * f_cur
    return f_cur * math.exp(nu * math.log(0.5 * x)) / norm


def _neumann_coef(nu: float, j: int) -> float:
    # weight of J_{nu+j}, j even
    if j == 0:
        return math.exp(ln_gamma(nu + 1.0))
    k = j // 2
    return (nu + j) * math.exp(ln_gamma(nu + k) - ln_gamma(k + 1.0))


def bessel_j(nu: float, x: float) -> float:
    """Bessel function of the first kind J_nu(x) for nu >= 0, x >= 0."""
    if nu < 0 or x < 0:
        raise ValueError(f"bessel_j needs nu >= 0 and x >= 0, got nu={nu!r}, x={x!r}")
    if x == 0.0:
        return 1.0 if nu == 0 else 0.0
    if x <= _SERIES_MAX_X:
        return _bessel_series(nu, x)
    return _bessel_miller(nu, x)


def bessel_j_prime(nu: float, x: float) -> float:
    """d/dx J_nu(x) = (nu/x) J_nu(x) - J_{nu+1}(x)."""
    return nu / x * bessel_j(nu, x) - bessel_j(nu + 1.0, x)


@dataclass(frozen=True)
class BesselZero:
    nu: float
    value: float
    precision: float


def first_bessel_zero(nu: float) -> BesselZero:
    """First positive zero of J_nu.

    Scans the bracket [nu, nu + 3(1 + nu^(1/3)) + 3] for the first sign
    change, bisects to 1e-6 and polishes with Newton steps. The returned
    precision is certified by a sign check on either side of the root.
    """
    if nu < 0:
        raise ValueError(f"first_bessel_zero needs nu >= 0, got {nu!r}")
    lo_end = float(nu)
    hi_end = nu + 3.0 * (1.0 + nu ** (1.0 / 3.0)) + 3.0
    step = 0.25
    a = lo_end + 1e-3 if nu == 0 else lo_end
    fa = bessel_j(nu, a)
    if fa <= 0:
        raise ArithmeticError(f"J_{nu}({a}) = {fa} is not positive at the bracket start")
    b = a
    while True:
        b = min(a + step, hi_end)
        fb = bessel_j(nu, b)
        if fb <= 0:
            break
        if b >= hi_end:
            raise ArithmeticError(f"no sign change of J_{nu} in [{lo_end}, {hi_end}]")
        a, fa = b, fb

    while b - a > 1e-6:
        mid = 0.5 * (a + b)
        if bessel_j(nu, mid) > 0:
            a = mid
        else:
            b = mid

    x = 0.5 * (a + b)
    for _ in range(20):
        dx = bessel_j(nu, x) / bessel_j_prime(nu, x)
        x -= dx
        if abs(dx) < 1e-15 * x:
            break
    if not a - 1e-6 <= x <= b + 1e-6:
        x = 0.5 * (a + b)

    delta = 1e-11
    if bessel_j(nu, x - delta) > 0 and bessel_j(nu, x + delta) < 0:
        precision = delta
    else:
        precision = b - a
    return BesselZero(nu=float(nu), value=x, precision=precision)


def ball_volume(m: int) -> float:
    """Volume of the unit ball in R^m: pi^(m/2) / Gamma(m/2 + 1)."""
    if m < 1:
        raise ValueError(f"dimension must be >= 1, got {m!r}")
    # omega_m = 2 pi omega_{m-2} / m, exact in the two seeds
    vol = 2.0 if m % 2 else math.pi
    for k in range(2 - m % 2 + 2, m + 1, 2):
        vol *= 2.0 * math.pi / k
    return vol


def ball_lambda1(m: int) -> float:
    """Principal Dirichlet eigenvalue of the unit ball, j_{(m-2)/2}^2."""
    if m == 1:
        return math.pi**2 / 4.0
    return first_bessel_zero(0.5 * (m - 2)).value ** 2
