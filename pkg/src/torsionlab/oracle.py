"""Closed-form torsion functions, L^p norms and principal eigenvalues.

Supported shapes are intervals (and unions of them), balls, ellipsoids and
disjoint unions of these; cuboids only for the eigenvalue. The ellipsoid
eigenvalue has no closed form and comes back as a two-sided bracket.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .domains import Ball, Cuboid, Domain, Ellipsoid, IntervalUnion, Polygon, primitives
from .specialfn import ball_volume, first_bessel_zero, gamma_ratio, ln_gamma


class UnsupportedDomainError(ValueError):
    """The requested closed form does not exist for this domain."""


@dataclass(frozen=True)
class Lambda1Bracket:
    lower: float
    upper: float
    exact: bool = False

    def __post_init__(self):
        if not 0 <= self.lower <= self.upper:
            raise ValueError(f"bad bracket [{self.lower}, {self.upper}]")
        if self.exact and self.lower != self.upper:
            raise ValueError("an exact bracket must have lower == upper")

    @classmethod
    def point(cls, value: float) -> "Lambda1Bracket":
        return cls(value, value, True)

    @property
    def value(self) -> float:
        if self.lower != self.upper:
            raise ValueError("eigenvalue is only bracketed; pick an endpoint explicitly")
        return self.lower

    def endpoints(self) -> tuple[float, ...]:
        return (self.lower,) if self.exact else (self.lower, self.upper)

    def scaled(self, factor: float) -> "Lambda1Bracket":
        return Lambda1Bracket(self.lower * factor, self.upper * factor, self.exact)


@lru_cache(maxsize=None)
def _bessel_j2(m: int) -> float:
    """j_{(m-2)/2}^2, the principal eigenvalue of the unit ball in R^m."""
    if m == 1:
        return math.pi**2 / 4.0
    return first_bessel_zero(0.5 * (m - 2)).value ** 2


def _inv_sq_sum(axes) -> float:
    return math.fsum(1.0 / a**2 for a in axes)


def _ellipsoid_tp_pow(axes, p: float) -> float:
    """int v^p over the ellipsoid with the given semi-axes."""
    m = len(axes)
    shape = math.exp(ln_gamma(0.5 * m + 1.0) + ln_gamma(p + 1.0) - ln_gamma(0.5 * m + p + 1.0))
    return 2.0**-p * ball_volume(m) * shape * _inv_sq_sum(axes) ** -p * math.prod(axes)


def _ellipsoid_vmax(axes) -> float:
    return 0.5 / _inv_sq_sum(axes)


def _shape_axes(spec: Domain) -> list[tuple[float, ...]]:
    """Semi-axes of each ellipsoidal piece (intervals count as 1-D balls)."""
    out = []
    for piece in primitives(spec):
        if isinstance(piece, IntervalUnion):
            out.extend((a,) for a in piece.half_lengths())
        elif isinstance(piece, Ellipsoid):
            out.append(piece.axes)
        else:
            raise UnsupportedDomainError(
                f"no closed-form torsion function for {type(piece).__name__}; use the numeric backend"
            )
    return out


def interval_tp_constant(p: float) -> float:
    """c_p with T_p(interval of half-length a) = a^((2p+1)/p) c_p."""
    return 0.5 * math.pi ** (0.5 / p) * gamma_ratio(p + 1.0, p + 1.5) ** (1.0 / p)


def torsion_value(spec: Domain, x) -> float:
    """Torsion function v(x); zero outside the domain."""
    pt = np.atleast_1d(np.asarray(x, dtype=float))
    for piece in primitives(spec):
        if isinstance(piece, (Cuboid, Polygon)):
            raise UnsupportedDomainError(f"no closed-form torsion function for {type(piece).__name__}")
        if isinstance(piece, IntervalUnion):
            for a, b in piece.intervals:
                if a < pt[0] < b:
                    half, mid = 0.5 * (b - a), 0.5 * (a + b)
                    return 0.5 * (half**2 - (pt[0] - mid) ** 2)
        elif piece.contains(pt[None, :])[0]:
            s = (pt - np.array(piece.center)) / np.array(piece.axes)
            return 0.5 / _inv_sq_sum(piece.axes) * (1.0 - float(s @ s))
    return 0.0


def tp_norm(spec: Domain, p: float) -> float:
    """T_p = ||v||_p. p = inf gives the maximum of v."""
    if not p >= 1:
        raise ValueError(f"p must be >= 1, got {p!r}")
    pieces = _shape_axes(spec)
    if math.isinf(p):
        return max(_ellipsoid_vmax(a) for a in pieces)
    # T_p^p is additive over components
    return math.fsum(_ellipsoid_tp_pow(a, p) for a in pieces) ** (1.0 / p)


def torsion_max(spec: Domain) -> float:
    return tp_norm(spec, math.inf)


def _ritz_upper(axes) -> float:
    # Rayleigh quotient of (1 - |x/a|^2)^k equals
    #   k (m/2 + 2k) / (2k - 1) * sum 1/a_i^2,  minimal at k = (1 + sqrt(1 + m/2)) / 2.
    m = len(axes)
    k = 0.5 * (1.0 + math.sqrt(1.0 + 0.5 * m))
    return k * (0.5 * m + 2.0 * k) / (2.0 * k - 1.0) * _inv_sq_sum(axes)


def _lambda1_piece(piece: Domain) -> Lambda1Bracket:
    if isinstance(piece, IntervalUnion):
        a1 = max(piece.half_lengths())
        return Lambda1Bracket.point(math.pi**2 / (4.0 * a1**2))
    if isinstance(piece, Ball):
        return Lambda1Bracket.point(_bessel_j2(piece.m) / piece.radius**2)
    if isinstance(piece, Ellipsoid):
        if len(set(piece.axes)) == 1:
            return Lambda1Bracket.point(_bessel_j2(piece.dim) / piece.axes[0] ** 2)
        # enclosing cuboid below, inscribed ball and a Ritz bound above
        lower = math.pi**2 / 4.0 * _inv_sq_sum(piece.axes)
        upper = min(_bessel_j2(piece.dim) / min(piece.axes) ** 2, _ritz_upper(piece.axes))
        return Lambda1Bracket(lower, upper)
    if isinstance(piece, Cuboid):
        return Lambda1Bracket.point(math.pi**2 * _inv_sq_sum(piece.sides))
    raise UnsupportedDomainError(f"no closed-form eigenvalue for {type(piece).__name__}")


def lambda1(spec: Domain) -> Lambda1Bracket:
    """Principal Dirichlet eigenvalue, exact or bracketed."""
    brackets = [_lambda1_piece(p) for p in primitives(spec)]
    lower = min(b.lower for b in brackets)
    upper = min(b.upper for b in brackets)
    if lower == upper and all(b.exact for b in brackets):
        return Lambda1Bracket.point(lower)
    return Lambda1Bracket(lower, upper)


def supports_torsion(spec: Domain) -> bool:
    return all(isinstance(p, (IntervalUnion, Ellipsoid)) for p in primitives(spec))


def spectral_partial_sums(length: float, p: int, n_terms: int) -> np.ndarray:
    """Partial sums over j <= N of lambda_j^-p (int phi_j)^2 on an interval, N = 1..n_terms.

    With p = 1 the series converges to T_1, with p = 2 to T_2^2.
    """
    if length <= 0 or n_terms < 1:
        raise ValueError("need length > 0 and n_terms >= 1")
    if p not in (1, 2):
        raise ValueError("p must be 1 or 2")
    j = np.arange(1, n_terms + 1, dtype=float)
    lam = (j * math.pi / length) ** 2
    # (int phi_j)^2 = 8 L / (j pi)^2 for odd j; even modes integrate to zero
    mean_sq = np.where(j % 2 == 1, 8.0 * length / (j * math.pi) ** 2, 0.0)
    return np.cumsum(mean_sq / lam**p)


def spectral_series_1d(length: float, p: int, n_terms: int) -> float:
    """The N = n_terms partial sum, added smallest term first."""
    if length <= 0 or n_terms < 1:
        raise ValueError("need length > 0 and n_terms >= 1")
    if p not in (1, 2):
        raise ValueError("p must be 1 or 2")
    j = np.arange(1, n_terms + 1, 2, dtype=float)
    lam = (j * math.pi / length) ** 2
    terms = 8.0 * length / (j * math.pi) ** 2 / lam**p
    return math.fsum(terms[::-1])
