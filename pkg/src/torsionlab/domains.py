"""Symbolic domain descriptions with exact measures.

Each primitive is an immutable dataclass. Besides measure and homothety,
primitives answer the two geometric queries the finite-difference backend
needs: point inclusion and the distance from an interior point to the
boundary along a coordinate axis.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .specialfn import ball_volume


class GeometryError(ValueError):
    """Invalid or degenerate geometry."""


def _tuple(values) -> tuple[float, ...]:
    return tuple(float(v) for v in values)


class Domain:
    """Base class for all domain specs."""

    dim: int

    def measure(self) -> float:
        raise NotImplementedError

    def scaled(self, alpha: float) -> "Domain":
        raise NotImplementedError

    def translated(self, offset: Sequence[float]) -> "Domain":
        raise NotImplementedError

    def bbox(self) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def contains(self, pts: np.ndarray) -> np.ndarray:
        """Boolean mask of points (shape (k, dim)) strictly inside."""
        raise NotImplementedError

    def axis_distance(self, pts: np.ndarray, axis: int, sign: int) -> np.ndarray:
        """Distance from interior points to the boundary along +/- axis."""
        raise NotImplementedError

    def min_width(self) -> float:
        """Smallest feature width, used for the rasterization coarseness check."""
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class IntervalUnion(Domain):
    intervals: tuple[tuple[float, float], ...]
    dim: int = field(default=1, init=False)

    def __post_init__(self):
        ivs = tuple(sorted((float(a), float(b)) for a, b in self.intervals))
        if not ivs:
            raise GeometryError("interval union needs at least one interval")
        for a, b in ivs:
            if not (math.isfinite(a) and math.isfinite(b) and a < b):
                raise GeometryError(f"interval endpoints must be strictly ordered, got ({a}, {b})")
        for (_, b0), (a1, _) in zip(ivs, ivs[1:]):
            if a1 < b0:
                raise GeometryError("intervals overlap")
        object.__setattr__(self, "intervals", ivs)

    def measure(self):
        return sum(b - a for a, b in self.intervals)

    def scaled(self, alpha):
        return IntervalUnion(tuple((alpha * a, alpha * b) for a, b in self.intervals))

    def translated(self, offset):
        d = float(offset[0])
        return IntervalUnion(tuple((a + d, b + d) for a, b in self.intervals))

    def bbox(self):
        return np.array([self.intervals[0][0]]), np.array([self.intervals[-1][1]])

    def pieces(self) -> list["IntervalUnion"]:
        return [IntervalUnion(((a, b),)) for a, b in self.intervals]

    def half_lengths(self) -> list[float]:
        return [0.5 * (b - a) for a, b in self.intervals]

    def contains(self, pts):
        x = np.asarray(pts, dtype=float).reshape(-1)
        inside = np.zeros(x.shape, dtype=bool)
        for a, b in self.intervals:
            inside |= (x > a) & (x < b)
        return inside

    def axis_distance(self, pts, axis, sign):
        x = np.asarray(pts, dtype=float).reshape(-1)
        out = np.full(x.shape, np.inf)
        for a, b in self.intervals:
            sel = (x > a) & (x < b)
            out[sel] = (b - x[sel]) if sign > 0 else (x[sel] - a)
        return out

    def min_width(self):
        return min(b - a for a, b in self.intervals)

    def to_dict(self):
        return {"type": "interval_union", "dim": 1, "intervals": [list(iv) for iv in self.intervals]}


@dataclass(frozen=True)
class Ellipsoid(Domain):
    axes: tuple[float, ...]
    center: tuple[float, ...] | None = None

    def __post_init__(self):
        axes = _tuple(self.axes)
        if not axes or any(not (a > 0 and math.isfinite(a)) for a in axes):
            raise GeometryError(f"semi-axes must be positive, got {axes}")
        center = _tuple(self.center) if self.center is not None else (0.0,) * len(axes)
        if len(center) != len(axes):
            raise GeometryError("center and axes differ in dimension")
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "center", center)

    @property
    def dim(self) -> int:
        return len(self.axes)

    def measure(self):
        return ball_volume(self.dim) * math.prod(self.axes)

    def scaled(self, alpha):
        return Ellipsoid(tuple(alpha * a for a in self.axes), tuple(alpha * c for c in self.center))

    def translated(self, offset):
        return Ellipsoid(self.axes, tuple(c + float(o) for c, o in zip(self.center, offset)))

    def bbox(self):
        c, a = np.array(self.center), np.array(self.axes)
        return c - a, c + a

    def _normalized(self, pts):
        pts = np.asarray(pts, dtype=float).reshape(-1, self.dim)
        return (pts - np.array(self.center)) / np.array(self.axes)

    def contains(self, pts):
        return (self._normalized(pts) ** 2).sum(axis=1) < 1.0

    def axis_distance(self, pts, axis, sign):
        s = self._normalized(pts)
        rest = (s**2).sum(axis=1) - s[:, axis] ** 2
        reach = np.sqrt(np.maximum(1.0 - rest, 0.0))
        a = self.axes[axis]
        if sign > 0:
            return a * (reach - s[:, axis])
        return a * (reach + s[:, axis])

    def min_width(self):
        return 2.0 * min(self.axes)

    def to_dict(self):
        return {"type": "ellipsoid", "dim": self.dim, "axes": list(self.axes), "center": list(self.center)}


@dataclass(frozen=True, init=False)
class Ball(Ellipsoid):
    """Ball of given radius; an ellipsoid with equal semi-axes."""

    m: int
    radius: float

    def __init__(self, m: int = 2, radius: float = 1.0, center: Sequence[float] | None = None):
        if int(m) != m or m < 1:
            raise GeometryError(f"dimension must be a positive integer, got {m}")
        if not (radius > 0 and math.isfinite(radius)):
            raise GeometryError(f"radius must be positive, got {radius}")
        object.__setattr__(self, "m", int(m))
        object.__setattr__(self, "radius", float(radius))
        object.__setattr__(self, "axes", (float(radius),) * int(m))
        object.__setattr__(self, "center", center)
        Ellipsoid.__post_init__(self)

    def measure(self):
        return ball_volume(self.m) * self.radius**self.m

    def scaled(self, alpha):
        return Ball(self.m, alpha * self.radius, tuple(alpha * c for c in self.center))

    def translated(self, offset):
        return Ball(self.m, self.radius, tuple(c + float(o) for c, o in zip(self.center, offset)))

    def to_dict(self):
        return {"type": "ball", "dim": self.m, "radius": self.radius, "center": list(self.center)}


@dataclass(frozen=True)
class Cuboid(Domain):
    sides: tuple[float, ...]
    corner: tuple[float, ...] | None = None

    def __post_init__(self):
        sides = _tuple(self.sides)
        if not sides or any(not (s > 0 and math.isfinite(s)) for s in sides):
            raise GeometryError(f"side lengths must be positive, got {sides}")
        corner = _tuple(self.corner) if self.corner is not None else (0.0,) * len(sides)
        if len(corner) != len(sides):
            raise GeometryError("corner and sides differ in dimension")
        object.__setattr__(self, "sides", sides)
        object.__setattr__(self, "corner", corner)

    @property
    def dim(self) -> int:
        return len(self.sides)

    def measure(self):
        return math.prod(self.sides)

    def scaled(self, alpha):
        return Cuboid(tuple(alpha * s for s in self.sides), tuple(alpha * c for c in self.corner))

    def translated(self, offset):
        return Cuboid(self.sides, tuple(c + float(o) for c, o in zip(self.corner, offset)))

    def bbox(self):
        lo = np.array(self.corner)
        return lo, lo + np.array(self.sides)

    def contains(self, pts):
        pts = np.asarray(pts, dtype=float).reshape(-1, self.dim)
        lo, hi = self.bbox()
        return np.all((pts > lo) & (pts < hi), axis=1)

    def axis_distance(self, pts, axis, sign):
        pts = np.asarray(pts, dtype=float).reshape(-1, self.dim)
        lo, hi = self.bbox()
        return (hi[axis] - pts[:, axis]) if sign > 0 else (pts[:, axis] - lo[axis])

    def min_width(self):
        return min(self.sides)

    def to_dict(self):
        return {"type": "cuboid", "dim": self.dim, "sides": list(self.sides), "corner": list(self.corner)}


def _segments_cross(p1, p2, q1, q2) -> bool:
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1, d2 = orient(q1, q2, p1), orient(q1, q2, p2)
    d3, d4 = orient(p1, p2, q1), orient(p1, p2, q2)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and 0 not in (d1, d2, d3, d4):
        return True

    def on_seg(a, b, c):
        return min(a[0], b[0]) <= c[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= c[1] <= max(a[1], b[1])

    return (
        (d1 == 0 and on_seg(q1, q2, p1))
        or (d2 == 0 and on_seg(q1, q2, p2))
        or (d3 == 0 and on_seg(p1, p2, q1))
        or (d4 == 0 and on_seg(p1, p2, q2))
    )


@dataclass(frozen=True)
class Polygon(Domain):
    vertices: tuple[tuple[float, float], ...]
    dim: int = field(default=2, init=False)

    def __post_init__(self):
        verts = tuple((float(x), float(y)) for x, y in self.vertices)
        if len(verts) >= 2 and verts[0] == verts[-1]:
            verts = verts[:-1]
        if len(verts) < 3:
            raise GeometryError("polygon needs at least 3 vertices")
        object.__setattr__(self, "vertices", verts)
        if self.signed_area() == 0:
            raise GeometryError("polygon has zero area")
        n = len(verts)
        for i in range(n):
            for j in range(i + 1, n):
                if j == i + 1 or (i == 0 and j == n - 1):
                    continue
                if _segments_cross(verts[i], verts[(i + 1) % n], verts[j], verts[(j + 1) % n]):
                    raise GeometryError("polygon is not simple")

    def signed_area(self) -> float:
        v = np.array(self.vertices)
        x, y = v[:, 0], v[:, 1]
        return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))

    def measure(self):
        return abs(self.signed_area())

    def scaled(self, alpha):
        return Polygon(tuple((alpha * x, alpha * y) for x, y in self.vertices))

    def translated(self, offset):
        dx, dy = float(offset[0]), float(offset[1])
        return Polygon(tuple((x + dx, y + dy) for x, y in self.vertices))

    def bbox(self):
        v = np.array(self.vertices)
        return v.min(axis=0), v.max(axis=0)

    def _edges(self):
        v = np.array(self.vertices)
        return v, np.roll(v, -1, axis=0)

    def contains(self, pts):
        pts = np.asarray(pts, dtype=float).reshape(-1, 2)
        a, b = self._edges()
        x, y = pts[:, :1], pts[:, 1:]
        straddle = (a[:, 1] > y) != (b[:, 1] > y)
        with np.errstate(divide="ignore", invalid="ignore"):
            xi = a[:, 0] + (y - a[:, 1]) * (b[:, 0] - a[:, 0]) / (b[:, 1] - a[:, 1])
        crossings = (straddle & (xi > x)).sum(axis=1)
        return crossings % 2 == 1

    def axis_distance(self, pts, axis, sign):
        pts = np.asarray(pts, dtype=float).reshape(-1, 2)
        a, b = self._edges()
        other = 1 - axis
        u, w = pts[:, axis : axis + 1], pts[:, other : other + 1]
        straddle = (a[:, other] > w) != (b[:, other] > w)
        with np.errstate(divide="ignore", invalid="ignore"):
            ui = a[:, axis] + (w - a[:, other]) * (b[:, axis] - a[:, axis]) / (b[:, other] - a[:, other])
        t = (ui - u) * sign
        t = np.where(straddle & (t > 0), t, np.inf)
        return t.min(axis=1)

    def min_width(self):
        lo, hi = self.bbox()
        return float(min(hi - lo))

    def to_dict(self):
        return {"type": "polygon", "dim": 2, "vertices": [list(v) for v in self.vertices]}


@dataclass(frozen=True)
class DisjointUnion(Domain):
    members: tuple[Domain, ...]

    def __post_init__(self):
        members = tuple(self.members)
        if not members:
            raise GeometryError("disjoint union needs at least one member")
        object.__setattr__(self, "members", members)
        if not check_disjoint(members):
            raise GeometryError("union members are not pairwise disjoint")

    @property
    def dim(self) -> int:
        return self.members[0].dim

    def measure(self):
        return math.fsum(m.measure() for m in self.members)

    def scaled(self, alpha):
        return DisjointUnion(tuple(m.scaled(alpha) for m in self.members))

    def translated(self, offset):
        return DisjointUnion(tuple(m.translated(offset) for m in self.members))

    def bbox(self):
        boxes = [m.bbox() for m in self.members]
        return np.min([b[0] for b in boxes], axis=0), np.max([b[1] for b in boxes], axis=0)

    def contains(self, pts):
        out = self.members[0].contains(pts)
        for m in self.members[1:]:
            out = out | m.contains(pts)
        return out

    def min_width(self):
        return min(m.min_width() for m in self.members)

    def to_dict(self):
        return {"type": "union", "dim": self.dim, "children": [m.to_dict() for m in self.members]}


def measure(spec: Domain) -> float:
    """Exact Lebesgue measure."""
    return spec.measure()


def scale(spec: Domain, alpha: float) -> Domain:
    """Homothety x -> alpha x."""
    if not alpha > 0:
        raise ValueError(f"scale factor must be positive, got {alpha!r}")
    return spec.scaled(float(alpha))


def primitives(spec: Domain) -> Iterator[Domain]:
    """Flatten nested unions into their primitive members."""
    if isinstance(spec, DisjointUnion):
        for m in spec.members:
            yield from primitives(m)
    else:
        yield spec


def _pair_disjoint(s: Domain, t: Domain) -> bool:
    if isinstance(s, IntervalUnion) and isinstance(t, IntervalUnion):
        return all(b1 <= a2 or b2 <= a1 for a1, b1 in s.intervals for a2, b2 in t.intervals)
    if isinstance(s, Ball) and isinstance(t, Ball):
        dist = math.dist(s.center, t.center)
        return dist >= s.radius + t.radius
    if isinstance(s, Cuboid) and isinstance(t, Cuboid):
        (lo1, hi1), (lo2, hi2) = s.bbox(), t.bbox()
        return bool(np.any((hi1 <= lo2) | (hi2 <= lo1)))
    if isinstance(s, Cuboid) and isinstance(t, Ball):
        s, t = t, s
    if isinstance(s, Ball) and isinstance(t, Cuboid):
        lo, hi = t.bbox()
        nearest = np.clip(np.array(s.center), lo, hi)
        return float(np.linalg.norm(nearest - np.array(s.center))) >= s.radius
    if isinstance(s, Polygon) and isinstance(t, Polygon):
        n, k = len(s.vertices), len(t.vertices)
        for i in range(n):
            for j in range(k):
                if _segments_cross(s.vertices[i], s.vertices[(i + 1) % n], t.vertices[j], t.vertices[(j + 1) % k]):
                    return False
        return not (s.contains(np.array(t.vertices[:1]))[0] or t.contains(np.array(s.vertices[:1]))[0])
    # Mixed pairs with curved pieces: sampled boundaries, then refuse if the
    # ellipsoid-polygon boxes still overlap.
    if _sample_overlap(s, t):
        return False
    if isinstance(s, Polygon) or isinstance(t, Polygon):
        return False
    return True


def _boundary_samples(spec: Domain, count: int = 720) -> np.ndarray:
    if isinstance(spec, Ellipsoid):
        if spec.dim != 2:
            raise GeometryError("sampled disjointness test is 2-D only")
        th = np.linspace(0.0, 2.0 * math.pi, count, endpoint=False)
        return np.array(spec.center) + np.stack([spec.axes[0] * np.cos(th), spec.axes[1] * np.sin(th)], axis=1)
    if isinstance(spec, (Polygon, Cuboid)):
        if isinstance(spec, Cuboid):
            (x0, y0), (x1, y1) = spec.bbox()
            verts = np.array([(x0, y0), (x1, y0), (x1, y1), (x0, y1)])
        else:
            verts = np.array(spec.vertices)
        per = max(count // len(verts), 2)
        t = np.linspace(0.0, 1.0, per, endpoint=False)[:, None]
        nxt = np.roll(verts, -1, axis=0)
        return np.concatenate([a + t * (b - a) for a, b in zip(verts, nxt)])
    raise GeometryError(f"no boundary sampler for {type(spec).__name__}")


def _sample_overlap(s: Domain, t: Domain) -> bool:
    return bool(t.contains(_boundary_samples(s)).any() or s.contains(_boundary_samples(t)).any())


def _boxes_overlap(b1, b2) -> bool:
    return bool(np.all((b1[0] < b2[1]) & (b2[0] < b1[1])))


def check_disjoint(specs: Iterable[Domain]) -> bool:
    """True iff the given specs are pairwise disjoint.

    Candidate pairs come from a sweep over bounding boxes sorted along the
    first axis; only box-overlapping pairs reach the exact pairwise tests.
    """
    specs = [p for s in specs for p in primitives(s)]
    if not specs:
        return True
    dims = {s.dim for s in specs}
    if len(dims) != 1:
        raise GeometryError(f"dimension mismatch among members: {sorted(dims)}")
    boxes = [s.bbox() for s in specs]
    order = sorted(range(len(specs)), key=lambda i: boxes[i][0][0])
    active: list[int] = []
    for i in order:
        lo_i = boxes[i][0][0]
        active = [j for j in active if boxes[j][1][0] > lo_i]
        for j in active:
            if _boxes_overlap(boxes[i], boxes[j]) and not _pair_disjoint(specs[i], specs[j]):
                return False
        active.append(i)
    return True


def arrange(members: Sequence[Domain], gap: float | None = None) -> DisjointUnion:
    """Place members along the first axis with the given gap between boxes.

    The default gap is the largest member diameter. Functionals of a
    disjoint union do not depend on the placement.
    """
    if gap is None:
        gap = max(float(np.max(hi - lo)) for lo, hi in (m.bbox() for m in members))
    placed = []
    cursor = None
    for m in members:
        lo, hi = m.bbox()
        shift = np.zeros(m.dim)
        if cursor is not None:
            shift[0] = cursor + gap - lo[0]
        moved = m.translated(shift)
        placed.append(moved)
        cursor = moved.bbox()[1][0]
    return DisjointUnion(tuple(placed))


def from_dict(doc: dict) -> Domain:
    """Build a domain spec from its document form."""
    kind = doc.get("type")
    dim = doc.get("dim")
    try:
        if kind == "interval_union" or kind == "interval":
            if "intervals" in doc:
                spec = IntervalUnion(tuple(tuple(iv) for iv in doc["intervals"]))
            else:
                spec = IntervalUnion(((float(doc.get("a", 0.0)), float(doc.get("b", 1.0))),))
        elif kind == "ball":
            m = int(dim if dim is not None else len(doc.get("center", [0, 0])))
            spec = Ball(m, float(doc.get("radius", 1.0)), doc.get("center"))
        elif kind == "ellipsoid":
            spec = Ellipsoid(tuple(doc["axes"]), doc.get("center"))
        elif kind == "cuboid":
            spec = Cuboid(tuple(doc["sides"]), doc.get("corner"))
        elif kind == "polygon":
            spec = Polygon(tuple(tuple(v) for v in doc["vertices"]))
        elif kind == "union":
            spec = DisjointUnion(tuple(from_dict(c) for c in doc["children"]))
        else:
            raise GeometryError(f"unknown domain type {kind!r}")
    except KeyError as exc:
        raise GeometryError(f"domain of type {kind!r} is missing field {exc}") from None
    if dim is not None and int(dim) != spec.dim:
        raise GeometryError(f"declared dim {dim} does not match geometry dim {spec.dim}")
    return spec


def to_dict(spec: Domain) -> dict:
    return spec.to_dict()


def loads(text: str) -> Domain:
    return from_dict(json.loads(text))


def dumps(spec: Domain) -> str:
    return json.dumps(spec.to_dict())
