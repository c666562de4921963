"""Torsion functions, principal Dirichlet eigenvalues and the F_p functionals."""

from .constructions import (
    SequenceSample,
    bessel_ratio_bound,
    cluster_sequence,
    equal_ball_sequence,
    fpq_upper_bound,
    g_p_convex_lower,
    one_d_sharp,
    one_d_sharp_inf,
    p2_convex_lower,
    recursion_bound,
    talenti_fp0,
    tp_ball_lower,
)
from .domains import Ball, Cuboid, DisjointUnion, Ellipsoid, GeometryError, IntervalUnion, Polygon
from .functionals import FunctionalReport, evaluate, f_p, f_pq
from .oracle import Lambda1Bracket, lambda1, tp_norm
from .specialfn import bessel_j, first_bessel_zero, ln_gamma
from .verify import CheckResult, builtin_corpus, run_corpus

__version__ = "0.1.0"
