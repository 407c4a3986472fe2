"""Convex polygon kernel: distances, supports, raycasts, Voronoi features along a path.

All coordinates are metres in double precision. Predicates share the absolute
tolerance ``EPS_GEO``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import InvalidDirectionError, InvalidPolygonError

EPS_GEO = 1e-9
_UNIT_TOL = 1e-12


@dataclass(frozen=True)
class Direction:
    """Unit push direction; ``perp`` is the direction rotated by +90 degrees."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise InvalidDirectionError("direction must be finite")
        if abs(math.hypot(self.x, self.y) - 1.0) > _UNIT_TOL:
            raise InvalidDirectionError(f"direction ({self.x}, {self.y}) is not unit length")

    @classmethod
    def from_angle(cls, theta: float) -> "Direction":
        c, s = math.cos(theta), math.sin(theta)
        n = math.hypot(c, s)
        return cls(c / n, s / n)

    @classmethod
    def of(cls, d: "Direction | Sequence[float]") -> "Direction":
        if isinstance(d, Direction):
            return d
        x, y = (float(v) for v in d)
        return cls(x, y)

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.x, self.y])

    @property
    def perp(self) -> np.ndarray:
        return np.array([-self.y, self.x])

    def __neg__(self) -> "Direction":
        return Direction(-self.x, -self.y)


def evenly_spaced_directions(count: int = 8) -> tuple[Direction, ...]:
    if count < 1:
        raise ValueError("need at least one direction")
    return tuple(Direction.from_angle(2.0 * math.pi * k / count) for k in range(count))


class ConvexPolygon:
    """Strictly convex polygon with counter-clockwise vertices.

    Edge ``k`` runs from vertex ``k`` to vertex ``k + 1`` (cyclically). Derived
    quantities (edge vectors, outward unit normals, support offsets) are
    computed once at construction.
    """

    __slots__ = ("vertices", "edges", "normals", "offsets", "edge_len2")

    def __init__(self, vertices: Iterable[Sequence[float]] | np.ndarray, *, validate: bool = True):
        v = np.array(vertices, dtype=float)
        if validate:
            _validate_vertices(v)
        v.setflags(write=False)
        edges = np.roll(v, -1, axis=0) - v
        lengths = np.hypot(edges[:, 0], edges[:, 1])
        normals = np.column_stack((edges[:, 1], -edges[:, 0])) / lengths[:, None]
        offsets = np.einsum("ij,ij->i", normals, v)
        for arr in (edges, normals, offsets):
            arr.setflags(write=False)
        self.vertices = v
        self.edges = edges
        self.normals = normals
        self.offsets = offsets
        self.edge_len2 = lengths * lengths

    @classmethod
    def rectangle(cls, center: Sequence[float], width: float, height: float,
                  angle: float = 0.0) -> "ConvexPolygon":
        if width <= 0 or height <= 0:
            raise InvalidPolygonError("rectangle sides must be positive")
        hw, hh = width / 2.0, height / 2.0
        local = np.array([[-hw, -hh], [hw, -hh], [hw, hh], [-hw, hh]])
        if angle:
            c, s = math.cos(angle), math.sin(angle)
            local = local @ np.array([[c, s], [-s, c]])
        return cls(local + np.asarray(center, dtype=float))

    @classmethod
    def box(cls, xmin: float, ymin: float, xmax: float, ymax: float) -> "ConvexPolygon":
        return cls([[xmin, ymin], [xmax, ymin], [xmax, ymax], [xmin, ymax]])

    def __len__(self) -> int:
        return len(self.vertices)

    def __repr__(self) -> str:
        pts = ", ".join(f"({x:.6g}, {y:.6g})" for x, y in self.vertices)
        return f"ConvexPolygon([{pts}])"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ConvexPolygon):
            return NotImplemented
        return self.vertices.shape == other.vertices.shape and bool(np.all(self.vertices == other.vertices))

    __hash__ = None  # type: ignore[assignment]

    def translated(self, offset: Sequence[float]) -> "ConvexPolygon":
        return ConvexPolygon(self.vertices + np.asarray(offset, dtype=float), validate=False)

    def rotated(self, angle: float, about: Sequence[float]) -> "ConvexPolygon":
        c, s = math.cos(angle), math.sin(angle)
        about = np.asarray(about, dtype=float)
        rel = self.vertices - about
        rot = np.column_stack((c * rel[:, 0] - s * rel[:, 1], s * rel[:, 0] + c * rel[:, 1]))
        return ConvexPolygon(rot + about, validate=False)

    @property
    def centroid(self) -> np.ndarray:
        v = self.vertices
        w = np.roll(v, -1, axis=0)
        cross = v[:, 0] * w[:, 1] - w[:, 0] * v[:, 1]
        a = cross.sum() / 2.0
        cx = ((v[:, 0] + w[:, 0]) * cross).sum() / (6.0 * a)
        cy = ((v[:, 1] + w[:, 1]) * cross).sum() / (6.0 * a)
        return np.array([cx, cy])

    @property
    def area(self) -> float:
        v = self.vertices
        w = np.roll(v, -1, axis=0)
        return float((v[:, 0] * w[:, 1] - w[:, 0] * v[:, 1]).sum() / 2.0)

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        lo = self.vertices.min(axis=0)
        hi = self.vertices.max(axis=0)
        return float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1])

    def project(self, axis: Sequence[float]) -> tuple[float, float]:
        p = self.vertices @ np.asarray(axis, dtype=float)
        return float(p.min()), float(p.max())

    def contains(self, p: Sequence[float], eps: float = EPS_GEO) -> bool:
        return bool(np.all(self.normals @ np.asarray(p, dtype=float) - self.offsets <= eps))


def _validate_vertices(v: np.ndarray) -> None:
    if v.ndim != 2 or v.shape[1] != 2:
        raise InvalidPolygonError("vertices must be an (n, 2) array")
    n = len(v)
    if n < 3:
        raise InvalidPolygonError("polygon needs at least 3 vertices")
    if not np.all(np.isfinite(v)):
        raise InvalidPolygonError("vertices must be finite")
    diff = v[:, None, :] - v[None, :, :]
    dist = np.hypot(diff[..., 0], diff[..., 1])
    np.fill_diagonal(dist, np.inf)
    if np.any(dist <= EPS_GEO):
        raise InvalidPolygonError("repeated vertices")
    e = np.roll(v, -1, axis=0) - v
    en = np.roll(e, -1, axis=0)
    cross = e[:, 0] * en[:, 1] - e[:, 1] * en[:, 0]
    if np.any(cross <= 0.0):
        raise InvalidPolygonError("vertices are not strictly convex in counter-clockwise order")
    turning = np.arctan2(cross, np.einsum("ij,ij->i", e, en)).sum()
    if abs(turning - 2.0 * math.pi) > 1e-6:
        raise InvalidPolygonError("polygon is self-intersecting")


def _as_point(p: Sequence[float]) -> np.ndarray:
    return np.asarray(p, dtype=float)


# ---------------------------------------------------------------- distances

def dist_point_polygon(p: Sequence[float], poly: ConvexPolygon) -> float:
    """Euclidean distance from ``p`` to ``poly``; zero inside or on the boundary."""
    if not isinstance(poly, ConvexPolygon):
        raise InvalidPolygonError("expected a ConvexPolygon")
    p = _as_point(p)
    if np.all(poly.normals @ p - poly.offsets <= 0.0):
        return 0.0
    rel = p - poly.vertices
    t = np.clip(np.einsum("ij,ij->i", rel, poly.edges) / poly.edge_len2, 0.0, 1.0)
    gap = rel - t[:, None] * poly.edges
    return float(np.sqrt((gap * gap).sum(axis=1).min()))


def dist_points_polygon(points: np.ndarray, poly: ConvexPolygon) -> np.ndarray:
    """Vectorised :func:`dist_point_polygon` over an ``(n, 2)`` array."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(pts) == 0:
        return np.zeros(0)
    inside = np.all(pts @ poly.normals.T - poly.offsets <= 0.0, axis=1)
    rel = pts[:, None, :] - poly.vertices[None, :, :]
    t = np.clip(np.einsum("nkj,kj->nk", rel, poly.edges) / poly.edge_len2, 0.0, 1.0)
    gap = rel - t[..., None] * poly.edges[None, :, :]
    d = np.sqrt((gap * gap).sum(axis=2).min(axis=1))
    d[inside] = 0.0
    return d


def polygon_distance(a: ConvexPolygon, b: ConvexPolygon) -> float:
    """Distance between two convex polygons (zero when they intersect)."""
    if overlap_depth(a, b) >= 0.0:
        return 0.0
    da = dist_points_polygon(a.vertices, b).min()
    db = dist_points_polygon(b.vertices, a).min()
    return float(min(da, db))


# ----------------------------------------------------------------- supports

def supports(poly: ConvexPolygon, direction: "Direction | Sequence[float]") -> tuple[float, float]:
    """Minimum and maximum of <direction, v> over the vertices of ``poly``."""
    d = Direction.of(direction)
    return poly.project((d.x, d.y))


# ------------------------------------------------------------------ raycast

def raycast(origin: Sequence[float], direction: "Direction | Sequence[float]",
            poly: ConvexPolygon, eps: float = EPS_GEO) -> Optional[float]:
    """Smallest ``t >= 0`` with ``origin + t * direction`` in the closed polygon.

    Returns ``0.0`` when the origin already lies inside and ``None`` on a miss.
    """
    d = Direction.of(direction)
    ox, oy = float(origin[0]), float(origin[1])
    t_in, t_out = 0.0, math.inf
    for (nx, ny), h in zip(poly.normals.tolist(), poly.offsets.tolist()):
        num = h - (nx * ox + ny * oy)
        den = nx * d.x + ny * d.y
        if abs(den) < 1e-15:
            if num < -eps:
                return None
            continue
        t = (num + eps) / den if den > 0 else (num - eps) / den
        if den > 0:
            if t < t_out:
                t_out = t
        elif t > t_in:
            t_in = t
        if t_in > t_out:
            return None
    return t_in


def translation_gap(moving: ConvexPolygon, obstacle: ConvexPolygon,
                    direction: "Direction | Sequence[float]", eps: float = EPS_GEO) -> float:
    """Distance ``moving`` can translate along ``direction`` before its interior meets ``obstacle``.

    On every separating axis the translations with overlapping projections
    form an open interval; their intersection is the overlap window. Touching
    polygons that slide past or move apart never collide and give ``inf``, as
    does a swept path that misses the obstacle. Already overlapping gives 0.
    """
    d = Direction.of(direction)
    axes = np.vstack((moving.normals, obstacle.normals))
    pa = moving.vertices @ axes.T
    pb = obstacle.vertices @ axes.T
    a0, a1 = pa.min(axis=0), pa.max(axis=0)
    b0, b1 = pb.min(axis=0), pb.max(axis=0)
    s = axes @ np.array([d.x, d.y])
    lo, hi = -math.inf, math.inf
    for k in range(len(s)):
        sk = float(s[k])
        if abs(sk) < 1e-15:
            if not (a1[k] > b0[k] + eps and a0[k] < b1[k] - eps):
                return math.inf
            continue
        # overlap needs a1 + t*s > b0 + eps and a0 + t*s < b1 - eps
        t1 = (b0[k] + eps - a1[k]) / sk
        t2 = (b1[k] - eps - a0[k]) / sk
        if sk < 0:
            t1, t2 = t2, t1
        lo, hi = max(lo, t1), min(hi, t2)
    if hi <= lo or hi <= 0.0:
        return math.inf
    return max(lo, 0.0)


# --------------------------------------------------------- Voronoi features

@dataclass(frozen=True, order=True)
class Feature:
    """Closest feature of a polygon: ``vertex``/``edge`` with an index, or ``interior``."""

    kind: str
    index: int = -1

    def __str__(self) -> str:
        return "Interior" if self.kind == "interior" else f"{self.kind.capitalize()}({self.index})"


INTERIOR = Feature("interior", -1)


@dataclass(frozen=True)
class FeatureSegment:
    lo: float
    hi: float
    feature: Feature


def closest_feature(p: Sequence[float], poly: ConvexPolygon, eps: float = EPS_GEO) -> Feature:
    """Feature of ``poly`` closest to ``p``; ties resolve to the lower index."""
    p = _as_point(p)
    if np.all(poly.normals @ p - poly.offsets <= eps):
        return INTERIOR
    rel = p - poly.vertices
    t = np.einsum("ij,ij->i", rel, poly.edges) / poly.edge_len2
    tc = np.clip(t, 0.0, 1.0)
    gap = rel - tc[:, None] * poly.edges
    d2 = (gap * gap).sum(axis=1)
    k = int(np.argmin(d2))
    n = len(poly)
    if 0.0 < t[k] < 1.0:
        return Feature("edge", k)
    vertex = k if t[k] <= 0.0 else (k + 1) % n
    return Feature("vertex", vertex)


def feature_breakpoints(start: Sequence[float], direction: "Direction | Sequence[float]",
                        length: float, poly: ConvexPolygon) -> list[float]:
    """Path parameters in ``(0, length)`` where the moving point crosses a Voronoi boundary."""
    d = Direction.of(direction)
    s0 = _as_point(start)
    dv = np.array([d.x, d.y])
    cuts: list[float] = []
    # edge supporting lines (interior/exterior transitions)
    den = poly.normals @ dv
    num = poly.offsets - poly.normals @ s0
    # perpendiculars through both endpoints of every edge (edge/vertex transitions)
    e = poly.edges
    nxt = np.roll(poly.vertices, -1, axis=0)
    eden = e @ dv
    for arr_num, arr_den in (
        (num, den),
        (np.einsum("ij,ij->i", e, poly.vertices) - e @ s0, eden),
        (np.einsum("ij,ij->i", e, nxt) - e @ s0, eden),
    ):
        ok = np.abs(arr_den) > 1e-15
        s = arr_num[ok] / arr_den[ok]
        cuts.extend(s[(s > 0.0) & (s < length)].tolist())
    cuts.sort()
    out: list[float] = []
    for c in cuts:
        if not out or c - out[-1] > 1e-12:
            out.append(c)
    return out


def feature_segments(start: Sequence[float], direction: "Direction | Sequence[float]",
                     length: float, poly: ConvexPolygon) -> list[FeatureSegment]:
    """Partition ``[0, length]`` by the closest feature to ``start + s * direction``.

    Breakpoints come from intersecting the path with the edge lines and with
    the edge-normal lines through each vertex; each cell is then classified
    at its midpoint. Adjacent cells with the same feature are merged.
    """
    if length < 0:
        raise ValueError("length must be non-negative")
    d = Direction.of(direction)
    s0 = _as_point(start)
    dv = np.array([d.x, d.y])
    if length == 0.0:
        return [FeatureSegment(0.0, 0.0, closest_feature(s0, poly))]
    knots = [0.0, *feature_breakpoints(s0, d, length, poly), float(length)]
    segs: list[FeatureSegment] = []
    for lo, hi in zip(knots[:-1], knots[1:]):
        f = closest_feature(s0 + 0.5 * (lo + hi) * dv, poly)
        if segs and segs[-1].feature == f:
            segs[-1] = FeatureSegment(segs[-1].lo, hi, f)
        else:
            segs.append(FeatureSegment(lo, hi, f))
    return segs


def feature_distance_terms(start: Sequence[float], direction: "Direction | Sequence[float]",
                           feature: Feature, poly: ConvexPolygon) -> tuple[str, float, float]:
    """Closed form of the distance to a fixed feature along ``start + s * direction``.

    Returns ``("zero", 0, 0)`` for the interior, ``("linear", a, b)`` for an
    edge (distance ``a + b*s``) and ``("radial", wu, ww)`` for a vertex
    (distance ``sqrt(s^2 + 2*wu*s + ww)``).
    """
    d = Direction.of(direction)
    s0 = _as_point(start)
    if feature.kind == "interior":
        return ("zero", 0.0, 0.0)
    if feature.kind == "edge":
        n = poly.normals[feature.index]
        a = float(n @ (s0 - poly.vertices[feature.index]))
        b = float(n[0] * d.x + n[1] * d.y)
        return ("linear", a, b)
    w = s0 - poly.vertices[feature.index]
    return ("radial", float(w[0] * d.x + w[1] * d.y), float(w @ w))


def squared_distance_quadratic(start: Sequence[float], direction: "Direction | Sequence[float]",
                               feature: Feature, poly: ConvexPolygon) -> tuple[float, float, float]:
    """Coefficients ``(a, b, c)`` with squared distance ``a*s^2 + b*s + c`` on a feature segment."""
    kind, p, q = feature_distance_terms(start, direction, feature, poly)
    if kind == "zero":
        return (0.0, 0.0, 0.0)
    if kind == "linear":
        return (q * q, 2.0 * p * q, p * p)
    return (1.0, 2.0 * p, q)


# -------------------------------------------------------------- containment

def ball_in_polygon(center: Sequence[float], radius: float, poly: ConvexPolygon,
                    eps: float = EPS_GEO) -> bool:
    """True iff the closed disc lies inside ``poly`` (every edge margin >= radius)."""
    if radius < 0:
        raise ValueError("radius must be non-negative")
    margins = poly.offsets - poly.normals @ _as_point(center)
    return bool(np.all(margins >= radius - eps))


# ---------------------------------------------------------- overlap / SAT

def _sat(a: ConvexPolygon, b: ConvexPolygon) -> tuple[float, np.ndarray]:
    # per axis: translation of b along +axis / -axis that separates it from a
    axes = np.vstack((a.normals, b.normals))
    pa = a.vertices @ axes.T
    pb = b.vertices @ axes.T
    fwd = pa.max(axis=0) - pb.min(axis=0)
    bwd = pb.max(axis=0) - pa.min(axis=0)
    depth = np.minimum(fwd, bwd)
    k = int(np.argmin(depth))
    axis = axes[k] if fwd[k] <= bwd[k] else -axes[k]
    return float(depth[k]), axis


def overlap_depth(a: ConvexPolygon, b: ConvexPolygon) -> float:
    """Minimum axis overlap of two convex polygons; negative means separated by that gap."""
    return _sat(a, b)[0]


def polygons_overlap(a: ConvexPolygon, b: ConvexPolygon, tol: float = EPS_GEO) -> bool:
    """True iff the interiors intersect by more than ``tol``."""
    return overlap_depth(a, b) > tol


def penetration(a: ConvexPolygon, b: ConvexPolygon,
                tol: float = 0.0) -> Optional[tuple[float, np.ndarray]]:
    """Minimum translation that separates ``b`` from ``a``.

    Returns ``(depth, normal)`` where ``normal`` is a unit vector pointing from
    ``a`` towards ``b`` so that ``b`` translated by ``depth * normal`` just
    touches ``a``; ``None`` if the overlap depth does not exceed ``tol``.
    """
    depth, axis = _sat(a, b)
    if depth <= tol:
        return None
    return depth, axis
