"""Planar reachability maps answering reach / traj / range queries.

``ConvexReachabilityMap`` is the default: a single convex polygon, where a
trajectory is the straight segment. ``GridReachabilityMap`` is a boolean
occupancy grid with 4-connected shortest paths, for non-convex experiments.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import UnreachableError
from .geometry import EPS_GEO, ConvexPolygon, Direction


@dataclass(frozen=True)
class Trajectory:
    points: tuple[tuple[float, float], ...]
    length: float


class ReachabilityMap:
    """Interface shared by all maps."""

    def reach(self, x: Sequence[float]) -> bool:
        raise NotImplementedError

    def traj(self, x: Sequence[float], y: Sequence[float]) -> Trajectory:
        raise NotImplementedError

    def range(self, x: Sequence[float], direction: "Direction | Sequence[float]") -> tuple[float, float]:
        raise NotImplementedError

    def exit_distance(self, x: Sequence[float], direction: "Direction | Sequence[float]") -> float:
        """Largest ``s >= 0`` such that ``x + s*d`` is reachable, or 0 if the ray never is."""
        raise NotImplementedError

    def bounds(self) -> tuple[float, float, float, float]:
        raise NotImplementedError

    def reach_many(self, pts: np.ndarray) -> np.ndarray:
        return np.array([self.reach(p) for p in np.asarray(pts).reshape(-1, 2)], dtype=bool)

    def to_dict(self) -> dict:
        raise NotImplementedError


class ConvexReachabilityMap(ReachabilityMap):
    def __init__(self, polygon: ConvexPolygon, spacing: float = 0.01):
        self.polygon = polygon
        self.spacing = float(spacing)

    @classmethod
    def rectangle(cls, xmin: float, ymin: float, xmax: float, ymax: float) -> "ConvexReachabilityMap":
        return cls(ConvexPolygon.box(xmin, ymin, xmax, ymax))

    def __repr__(self) -> str:
        return f"ConvexReachabilityMap({self.polygon!r})"

    def reach(self, x: Sequence[float]) -> bool:
        return self.polygon.contains(x, EPS_GEO)

    def reach_many(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float).reshape(-1, 2)
        return np.all(pts @ self.polygon.normals.T - self.polygon.offsets <= EPS_GEO, axis=1)

    def _require(self, x: Sequence[float]) -> None:
        if not self.reach(x):
            raise UnreachableError(f"point ({x[0]:.6g}, {x[1]:.6g}) is outside the reachable set")

    def traj(self, x: Sequence[float], y: Sequence[float]) -> Trajectory:
        self._require(x)
        self._require(y)
        a = (float(x[0]), float(x[1]))
        b = (float(y[0]), float(y[1]))
        return Trajectory((a, b), math.hypot(b[0] - a[0], b[1] - a[1]))

    def _clip(self, x: Sequence[float], d: Direction) -> tuple[float, float]:
        lo, hi = -math.inf, math.inf
        ox, oy = float(x[0]), float(x[1])
        for (nx, ny), h in zip(self.polygon.normals.tolist(), self.polygon.offsets.tolist()):
            num = h - (nx * ox + ny * oy)
            den = nx * d.x + ny * d.y
            if abs(den) < 1e-15:
                if num < -EPS_GEO:
                    return (math.inf, -math.inf)
                continue
            t = num / den
            if den > 0:
                hi = min(hi, t)
            else:
                lo = max(lo, t)
        return lo, hi

    def range(self, x: Sequence[float], direction: "Direction | Sequence[float]") -> tuple[float, float]:
        self._require(x)
        lo, hi = self._clip(x, Direction.of(direction))
        return min(lo, 0.0), max(hi, 0.0)

    def exit_distance(self, x: Sequence[float], direction: "Direction | Sequence[float]") -> float:
        lo, hi = self._clip(x, Direction.of(direction))
        if hi < lo or hi < 0.0:
            return 0.0
        return hi

    def bounds(self) -> tuple[float, float, float, float]:
        return self.polygon.bounds

    def to_dict(self) -> dict:
        return {"type": "convex", "vertices": self.polygon.vertices.tolist(), "spacing": self.spacing}


class GridReachabilityMap(ReachabilityMap):
    """Boolean grid; cell ``(r, c)`` covers ``origin + h*[c, c+1) x h*[r, r+1)``.

    ``traj`` runs a 4-connected Dijkstra between cell centers; its length is the
    grid-path length plus the two end connectors.
    """

    def __init__(self, origin: Sequence[float], spacing: float, mask: np.ndarray):
        self.origin = (float(origin[0]), float(origin[1]))
        self.spacing = float(spacing)
        m = np.array(mask, dtype=bool)
        if m.ndim != 2 or m.size == 0:
            raise ValueError("mask must be a non-empty 2-D array")
        m.setflags(write=False)
        self.mask = m

    def __repr__(self) -> str:
        return f"GridReachabilityMap(origin={self.origin}, spacing={self.spacing}, shape={self.mask.shape})"

    def _cell(self, x: Sequence[float]) -> tuple[int, int]:
        c = math.floor((float(x[0]) - self.origin[0]) / self.spacing)
        r = math.floor((float(x[1]) - self.origin[1]) / self.spacing)
        rows, cols = self.mask.shape
        # closed outer boundary
        if c == cols and abs(float(x[0]) - (self.origin[0] + cols * self.spacing)) <= EPS_GEO:
            c -= 1
        if r == rows and abs(float(x[1]) - (self.origin[1] + rows * self.spacing)) <= EPS_GEO:
            r -= 1
        return r, c

    def reach(self, x: Sequence[float]) -> bool:
        r, c = self._cell(x)
        rows, cols = self.mask.shape
        return 0 <= r < rows and 0 <= c < cols and bool(self.mask[r, c])

    def _require(self, x: Sequence[float]) -> None:
        if not self.reach(x):
            raise UnreachableError(f"point ({x[0]:.6g}, {x[1]:.6g}) is outside the reachable set")

    def _center(self, rc: tuple[int, int]) -> tuple[float, float]:
        return (self.origin[0] + (rc[1] + 0.5) * self.spacing, self.origin[1] + (rc[0] + 0.5) * self.spacing)

    def traj(self, x: Sequence[float], y: Sequence[float]) -> Trajectory:
        self._require(x)
        self._require(y)
        a = (float(x[0]), float(x[1]))
        b = (float(y[0]), float(y[1]))
        start, goal = self._cell(a), self._cell(b)
        if start == goal:
            return Trajectory((a, b), math.hypot(b[0] - a[0], b[1] - a[1]))
        rows, cols = self.mask.shape
        dist = {start: 0}
        prev: dict[tuple[int, int], tuple[int, int]] = {}
        heap = [(0, start)]
        while heap:
            g, cur = heapq.heappop(heap)
            if cur == goal:
                break
            if g > dist[cur]:
                continue
            r, c = cur
            for nb in ((r - 1, c), (r, c - 1), (r, c + 1), (r + 1, c)):
                if 0 <= nb[0] < rows and 0 <= nb[1] < cols and self.mask[nb] and g + 1 < dist.get(nb, 1 << 60):
                    dist[nb] = g + 1
                    prev[nb] = cur
                    heapq.heappush(heap, (g + 1, nb))
        if goal not in dist:
            raise UnreachableError("no grid path between the two points")
        cells = [goal]
        while cells[-1] != start:
            cells.append(prev[cells[-1]])
        cells.reverse()
        pts = [a] + [self._center(rc) for rc in cells] + [b]
        length = sum(math.hypot(q[0] - p[0], q[1] - p[1]) for p, q in zip(pts[:-1], pts[1:]))
        return Trajectory(tuple(pts), length)

    def _march(self, x: Sequence[float], d: Direction, sign: float) -> float:
        # coarse march, then bisection on the first transition
        step = self.spacing / 8.0
        limit = (self.mask.shape[0] + self.mask.shape[1] + 2) * self.spacing
        ox, oy = float(x[0]), float(x[1])
        s = 0.0
        while s < limit:
            nxt = s + step
            if not self.reach((ox + sign * nxt * d.x, oy + sign * nxt * d.y)):
                lo, hi = s, nxt
                for _ in range(60):
                    mid = 0.5 * (lo + hi)
                    if self.reach((ox + sign * mid * d.x, oy + sign * mid * d.y)):
                        lo = mid
                    else:
                        hi = mid
                return lo
            s = nxt
        return s

    def range(self, x: Sequence[float], direction: "Direction | Sequence[float]") -> tuple[float, float]:
        self._require(x)
        d = Direction.of(direction)
        return -self._march(x, d, -1.0), self._march(x, d, 1.0)

    def exit_distance(self, x: Sequence[float], direction: "Direction | Sequence[float]") -> float:
        d = Direction.of(direction)
        if self.reach(x):
            return self._march(x, d, 1.0)
        step = self.spacing / 4.0
        limit = (self.mask.shape[0] + self.mask.shape[1] + 2) * self.spacing
        s = step
        while s < limit:
            p = (float(x[0]) + s * d.x, float(x[1]) + s * d.y)
            if self.reach(p):
                return s + self._march(p, d, 1.0)
            s += step
        return 0.0

    def bounds(self) -> tuple[float, float, float, float]:
        rows, cols = self.mask.shape
        return (self.origin[0], self.origin[1],
                self.origin[0] + cols * self.spacing, self.origin[1] + rows * self.spacing)

    def to_dict(self) -> dict:
        return {
            "type": "grid",
            "origin": list(self.origin),
            "spacing": self.spacing,
            "rows": ["".join("1" if v else "0" for v in row) for row in self.mask.tolist()],
        }


def map_from_dict(data: dict) -> ReachabilityMap:
    kind = data.get("type")
    if kind == "convex":
        return ConvexReachabilityMap(ConvexPolygon(data["vertices"]), data.get("spacing", 0.01))
    if kind == "grid":
        mask = np.array([[ch == "1" for ch in row] for row in data["rows"]], dtype=bool)
        return GridReachabilityMap(data["origin"], data["spacing"], mask)
    raise ValueError(f"unknown reachability map type {kind!r}")
