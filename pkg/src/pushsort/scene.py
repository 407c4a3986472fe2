"""World model: objects, target regions and the gripper position."""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from .errors import InfeasibleTaskError, InvalidStateError
from .geometry import EPS_GEO, ConvexPolygon, overlap_depth, polygons_overlap


@dataclass(frozen=True, eq=False)
class SceneObject:
    """A planar object: world-frame polygon, center ``o_i``, label in ``1..C``, radius ``r_i``."""

    polygon: ConvexPolygon
    label: int
    center: tuple[float, float]
    radius: float

    @classmethod
    def from_polygon(cls, polygon: ConvexPolygon, label: int,
                     center: Optional[Sequence[float]] = None) -> "SceneObject":
        c = polygon.centroid if center is None else np.asarray(center, dtype=float)
        r = float(np.hypot(*(polygon.vertices - c).T).max())
        return cls(polygon, int(label), (float(c[0]), float(c[1])), r)

    @classmethod
    def square(cls, center: Sequence[float], size: float, label: int = 1,
               angle: float = 0.0) -> "SceneObject":
        poly = ConvexPolygon.rectangle(center, size, size, angle)
        return cls.from_polygon(poly, label, center)

    def moved_to(self, new_center: Sequence[float]) -> "SceneObject":
        dx = float(new_center[0]) - self.center[0]
        dy = float(new_center[1]) - self.center[1]
        return SceneObject(self.polygon.translated((dx, dy)), self.label,
                           (float(new_center[0]), float(new_center[1])), self.radius)


@dataclass(frozen=True, eq=False)
class TargetRegion:
    """Closed convex target region with one capacity per category (index ``k-1`` for label ``k``)."""

    polygon: ConvexPolygon
    capacities: tuple[int, ...]

    def __post_init__(self) -> None:
        caps = tuple(int(c) for c in self.capacities)
        if any(c < 0 for c in caps):
            raise InvalidStateError("capacities must be non-negative")
        object.__setattr__(self, "capacities", caps)


@dataclass(frozen=True, eq=False)
class SceneState:
    """Immutable planner world model. Derived arrays are cached per instance."""

    objects: tuple[SceneObject, ...]
    regions: tuple[TargetRegion, ...]
    gripper_pos: tuple[float, float] = (0.0, 0.0)
    num_categories: int = 1
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "objects", tuple(self.objects))
        object.__setattr__(self, "regions", tuple(self.regions))
        g = self.gripper_pos
        object.__setattr__(self, "gripper_pos", (float(g[0]), float(g[1])))

    @property
    def n_objects(self) -> int:
        return len(self.objects)

    @property
    def n_regions(self) -> int:
        return len(self.regions)

    @cached_property
    def centers(self) -> np.ndarray:
        c = np.array([o.center for o in self.objects], dtype=float).reshape(-1, 2)
        c.setflags(write=False)
        return c

    @cached_property
    def labels(self) -> np.ndarray:
        return np.array([o.label for o in self.objects], dtype=int)

    @cached_property
    def radii(self) -> np.ndarray:
        return np.array([o.radius for o in self.objects], dtype=float)

    @property
    def max_radius(self) -> float:
        """``R``: the largest bounding-circle radius."""
        return float(self.radii.max()) if self.objects else 0.0

    @cached_property
    def capacity_matrix(self) -> np.ndarray:
        """``(T, C)`` integer capacities."""
        caps = np.zeros((len(self.regions), self.num_categories), dtype=int)
        for j, r in enumerate(self.regions):
            k = min(len(r.capacities), self.num_categories)
            caps[j, :k] = r.capacities[:k]
        return caps

    @cached_property
    def vertex_array(self) -> np.ndarray:
        """``(N, Vmax, 2)`` vertices; shorter polygons repeat their last vertex."""
        if not self.objects:
            return np.zeros((0, 3, 2))
        vmax = max(len(o.polygon) for o in self.objects)
        out = np.empty((len(self.objects), vmax, 2))
        for i, o in enumerate(self.objects):
            v = o.polygon.vertices
            out[i, : len(v)] = v
            out[i, len(v):] = v[-1]
        return out

    @cached_property
    def fingerprint(self) -> bytes:
        """Digest of the geometric content; equal states give equal digests."""
        h = hashlib.blake2b(digest_size=20)
        h.update(np.ascontiguousarray(self.vertex_array).tobytes())
        h.update(self.centers.tobytes())
        h.update(self.labels.tobytes())
        h.update(np.array(self.gripper_pos).tobytes())
        return h.digest()

    def with_object(self, i: int, obj: SceneObject) -> "SceneState":
        objs = list(self.objects)
        objs[i] = obj
        return replace(self, objects=tuple(objs), meta={})

    def with_objects(self, objects: Sequence[SceneObject],
                     gripper_pos: Optional[Sequence[float]] = None) -> "SceneState":
        g = self.gripper_pos if gripper_pos is None else gripper_pos
        return replace(self, objects=tuple(objects), gripper_pos=(float(g[0]), float(g[1])), meta={})

    def with_gripper(self, gripper_pos: Sequence[float]) -> "SceneState":
        return replace(self, gripper_pos=(float(gripper_pos[0]), float(gripper_pos[1])), meta={})


def category_counts(state: SceneState) -> np.ndarray:
    return np.bincount(state.labels - 1, minlength=state.num_categories)[: state.num_categories]


def check_capacities(state: SceneState) -> None:
    """Raise :class:`InfeasibleTaskError` if some category cannot be absorbed."""
    counts = category_counts(state)
    total = state.capacity_matrix.sum(axis=0)
    short = np.nonzero(counts > total)[0]
    if len(short):
        k = int(short[0]) + 1
        raise InfeasibleTaskError(
            f"category {k} has {int(counts[k - 1])} objects but total capacity {int(total[k - 1])}")


def overlapping_pairs(state: SceneState, tol: float = EPS_GEO) -> list[tuple[int, int]]:
    """Pairs of objects whose interiors intersect by more than ``tol``."""
    c = state.centers
    r = state.radii
    out = []
    for i in range(len(c)):
        d = np.hypot(*(c[i + 1:] - c[i]).T)
        for j in np.nonzero(d < r[i] + r[i + 1:])[0]:
            j = int(j) + i + 1
            if polygons_overlap(state.objects[i].polygon, state.objects[j].polygon, tol):
                out.append((i, j))
    return out


def validate_state(state: SceneState, *, check_overlap: bool = True) -> None:
    """Check every structural invariant of ``state``; raise on the first violation."""
    if state.num_categories < 1:
        raise InvalidStateError("need at least one category")
    for i, o in enumerate(state.objects):
        if not 1 <= o.label <= state.num_categories:
            raise InvalidStateError(f"object {i} label {o.label} outside 1..{state.num_categories}")
        reach = float(np.hypot(*(o.polygon.vertices - np.array(o.center)).T).max())
        if o.radius < reach - 1e-9:
            raise InvalidStateError(f"object {i} radius {o.radius} below vertex reach {reach}")
        if not all(math.isfinite(v) for v in o.center):
            raise InvalidStateError(f"object {i} center is not finite")
    for j, r in enumerate(state.regions):
        if len(r.capacities) != state.num_categories:
            raise InvalidStateError(f"region {j} has {len(r.capacities)} capacities, expected {state.num_categories}")
    for a in range(len(state.regions)):
        for b in range(a + 1, len(state.regions)):
            if overlap_depth(state.regions[a].polygon, state.regions[b].polygon) >= 0.0:
                raise InvalidStateError(f"regions {a} and {b} are not disjoint")
    if check_overlap:
        pairs = overlapping_pairs(state)
        if pairs:
            raise InvalidStateError(f"objects {pairs[0][0]} and {pairs[0][1]} overlap")
    check_capacities(state)
