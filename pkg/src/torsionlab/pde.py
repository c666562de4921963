"""Finite-difference backend on uniform grids in one and two dimensions.

Grid nodes sit at ``origin + h * index`` with the origin on the lower corner
of the bounding box. Nodes strictly inside the domain are unknowns. Where a
neighbour lies outside, the fractional distance theta in (0, 1] to the true
boundary along that axis is stored, and the boundary flux is taken over the
short arm theta*h. The coupling between interior nodes keeps the plain
-1/h^2 weight, so the operator is symmetric positive definite and an
M-matrix, and conjugate gradients apply.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .domains import DisjointUnion, Domain, IntervalUnion, primitives

THETA_MIN = 1e-8


class GridTooCoarseError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    pass


@dataclass
class Grid:
    dim: int
    h: float
    origin: np.ndarray
    shape: tuple[int, ...]
    mask: np.ndarray
    # boundary_frac[2*axis + (0 for -, 1 for +)]: 1 where the neighbour is interior
    boundary_frac: np.ndarray

    def __post_init__(self):
        if not self.mask.any():
            raise GridTooCoarseError("grid has no interior node")

    @property
    def n_interior(self) -> int:
        return int(self.mask.sum())

    @property
    def cell_volume(self) -> float:
        return self.h**self.dim

    def coordinates(self) -> list[np.ndarray]:
        axes = [self.origin[i] + self.h * np.arange(n) for i, n in enumerate(self.shape)]
        return np.meshgrid(*axes, indexing="ij")

    def interior_points(self) -> np.ndarray:
        return np.stack([c[self.mask] for c in self.coordinates()], axis=1)


def _shift(arr: np.ndarray, axis: int, step: int, fill=0) -> np.ndarray:
    """out[i] = arr[i + step] along axis, ``fill`` past the edge."""
    out = np.full_like(arr, fill)
    src = [slice(None)] * arr.ndim
    dst = [slice(None)] * arr.ndim
    if step > 0:
        src[axis], dst[axis] = slice(step, None), slice(None, -step)
    else:
        src[axis], dst[axis] = slice(None, step), slice(-step, None)
    out[tuple(dst)] = arr[tuple(src)]
    return out


def rasterize(spec: Domain, h: float) -> Grid:
    """Node-based inclusion mask plus fractional boundary distances."""
    if not h > 0:
        raise ValueError(f"grid spacing must be positive, got {h!r}")
    if spec.dim > 2:
        raise ValueError("finite-difference grids are limited to dimension 1 and 2")
    for piece in primitives(spec):
        widths = [b - a for a, b in piece.intervals] if isinstance(piece, IntervalUnion) else [piece.min_width()]
        if min(widths) < 4.0 * h * (1.0 - 1e-12):
            raise GridTooCoarseError(
                f"h = {h} leaves fewer than 4 cells across a {type(piece).__name__} of width {min(widths)}"
            )
    lo, hi = spec.bbox()
    shape = tuple(int(math.ceil((hi[i] - lo[i]) / h - 1e-9)) + 1 for i in range(spec.dim))
    axes = [lo[i] + h * np.arange(n) for i, n in enumerate(shape)]
    coords = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([c.ravel() for c in coords], axis=1)
    mask = spec.contains(pts).reshape(shape)

    frac = np.ones((2 * spec.dim,) + shape)
    for axis in range(spec.dim):
        for side, sign in enumerate((-1, 1)):
            nb_inside = _shift(mask, axis, sign, fill=False)
            cut = mask & ~nb_inside
            if cut.any():
                dist = _axis_distance(spec, pts[cut.ravel()], axis, sign)
                frac[2 * axis + side][cut] = np.clip(dist / h, THETA_MIN, 1.0)
    return Grid(spec.dim, float(h), np.asarray(lo, dtype=float), shape, mask, frac)


def _axis_distance(spec: Domain, pts: np.ndarray, axis: int, sign: int) -> np.ndarray:
    if not isinstance(spec, DisjointUnion):
        return spec.axis_distance(pts, axis, sign)
    out = np.full(len(pts), np.inf)
    for piece in primitives(spec):
        sel = piece.contains(pts)
        if sel.any():
            out[sel] = piece.axis_distance(pts[sel], axis, sign)
    return out


def component_specs(spec: Domain) -> list[Domain]:
    """Connected pieces solved separately by the numeric backend."""
    out: list[Domain] = []
    for piece in primitives(spec):
        if isinstance(piece, IntervalUnion):
            out.extend(piece.pieces())
        else:
            out.append(piece)
    return out


class DirichletLaplacian:
    """Matrix-free symmetric Dirichlet Laplacian on a grid."""

    def __init__(self, grid: Grid):
        self.grid = grid
        self.mask = grid.mask
        inv_h2 = 1.0 / grid.h**2
        self.inv_h2 = inv_h2
        self.diagonal = np.where(grid.mask, (1.0 / grid.boundary_frac).sum(axis=0) * inv_h2, 1.0)

    def __call__(self, u: np.ndarray) -> np.ndarray:
        nb = np.zeros_like(u)
        for axis in range(self.grid.dim):
            nb += _shift(u, axis, 1)
            nb += _shift(u, axis, -1)
        out = self.diagonal * u - self.inv_h2 * nb
        out[~self.mask] = 0.0
        return out


def conjugate_gradient(op: DirichletLaplacian, rhs: np.ndarray, tol: float, x0=None,
                       max_iter: int | None = None, jacobi: bool = True):
    """Solve op(x) = rhs; stops when ||r|| <= tol * ||rhs||. Returns (x, iterations)."""
    mask = op.mask
    if max_iter is None:
        max_iter = 20 * max(op.grid.shape) ** 2
    x = np.zeros_like(rhs) if x0 is None else np.where(mask, x0, 0.0)
    r = np.where(mask, rhs - op(x), 0.0)
    target = tol * float(np.linalg.norm(rhs))
    if float(np.linalg.norm(r)) <= target:
        return x, 0
    inv_diag = 1.0 / op.diagonal if jacobi else None
    z = r * inv_diag if jacobi else r
    p = z.copy()
    rz = float(np.vdot(r, z))
    for it in range(1, max_iter + 1):
        ap = op(p)
        alpha = rz / float(np.vdot(p, ap))
        x += alpha * p
        r -= alpha * ap
        if float(np.linalg.norm(r)) <= target:
            return x, it
        z = r * inv_diag if jacobi else r
        rz_new = float(np.vdot(r, z))
        p = z + (rz_new / rz) * p
        rz = rz_new
    raise ConvergenceError(f"CG did not reach tol {tol} within {max_iter} iterations")


@dataclass
class TorsionField:
    grid: Grid
    values: np.ndarray
    residual: float
    iterations: int = 0

    @property
    def vmax(self) -> float:
        return float(self.values.max())


@dataclass
class EigenResult:
    lambda1: float
    vector: np.ndarray
    residual: float
    iterations: int
    history: list[float] = field(default_factory=list)


def solve_torsion(grid: Grid, tol: float = 1e-10, jacobi: bool = True) -> TorsionField:
    """Solve -Lap v = 1 with zero Dirichlet data by conjugate gradients."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    op = DirichletLaplacian(grid)
    rhs = grid.mask.astype(float)
    v, its = conjugate_gradient(op, rhs, tol, jacobi=jacobi)
    res = float(np.abs((op(v) - rhs)[grid.mask]).max())
    return TorsionField(grid, v, res, its)


def lambda1_numeric(grid: Grid, tol: float = 1e-10, max_outer: int = 500,
                    jacobi: bool = True) -> EigenResult:
    """Smallest eigenvalue of the discrete Laplacian by inverse power iteration.

    Starts from the constant vector, so the first iterate is the discrete
    torsion function. Stops once the Rayleigh quotient changes by at most
    ``tol`` (relative) and the relative residual is below sqrt(tol).
    """
    op = DirichletLaplacian(grid)
    u = grid.mask.astype(float)
    u /= np.linalg.norm(u)
    inner_tol = min(1e-10, tol)
    history: list[float] = []
    lam_old = None
    y = None
    for it in range(1, max_outer + 1):
        x0 = None if lam_old is None else u / lam_old
        y, _ = conjugate_gradient(op, u, inner_tol, x0=x0, jacobi=jacobi)
        ay = op(y)
        yy = float(np.vdot(y, y))
        lam = float(np.vdot(y, ay)) / yy
        history.append(lam)
        residual = float(np.linalg.norm(ay - lam * y)) / (lam * math.sqrt(yy))
        u = y / math.sqrt(yy)
        if lam_old is not None and abs(lam - lam_old) <= tol * lam and residual <= math.sqrt(tol):
            vec = u / u.max()
            return EigenResult(lam, vec, residual, it, history)
        lam_old = lam
    raise ConvergenceError(f"inverse iteration did not converge in {max_outer} steps")


def lp_norm(field: TorsionField, p: float) -> float:
    """Midpoint-rule L^p norm; p = inf gives the maximum."""
    if math.isinf(p):
        return field.vmax
    if not p >= 1:
        raise ValueError("p must be >= 1")
    v = field.values[field.grid.mask]
    return float(field.grid.cell_volume * np.sum(v**p)) ** (1.0 / p)


def grad_energy(field: TorsionField, p: float) -> float:
    """Discrete int |D v^((p+1)/2)|^2 with forward differences.

    Edges between interior nodes use the plain difference. Edges that leave
    the domain end on the boundary at distance theta*h, where the value is
    zero; with theta = 1 this is ordinary zero extension.
    """
    grid = field.grid
    w = np.where(grid.mask, np.maximum(field.values, 0.0), 0.0) ** (0.5 * (p + 1.0))
    total = 0.0
    for axis in range(grid.dim):
        nxt = _shift(w, axis, 1)
        both = grid.mask & _shift(grid.mask, axis, 1, fill=False)
        total += float(np.sum(((nxt - w)[both]) ** 2))
        for side in (0, 1):
            theta = grid.boundary_frac[2 * axis + side]
            cut = grid.mask & ~_shift(grid.mask, axis, 2 * side - 1, fill=False)
            total += float(np.sum(w[cut] ** 2 / theta[cut]))
    return total * grid.h ** (grid.dim - 2)


def richardson(coarse: float, fine: float, order: int = 2) -> tuple[float, float]:
    """Extrapolate values at h and h/2. Returns (value, error estimate)."""
    factor = 2.0**order
    return (factor * fine - coarse) / (factor - 1.0), abs(fine - coarse) / (factor - 1.0)


def dump_field(field: TorsionField, path) -> None:
    """Write ``x [y] value`` rows, one per interior node."""
    pts = field.grid.interior_points()
    vals = field.values[field.grid.mask]
    rows = np.column_stack([pts, vals])
    Path(path).write_text("\n".join(" ".join(f"{x:.12g}" for x in row) for row in rows) + "\n")
