"""One-step greedy grasp selection.

For a fixed grasped object ``i`` the post-grasp cost of placing it into region
``k`` is the optimum of the remaining objects with one ``(k, l_i)`` slot taken
(:func:`costs_with_fixed_object`) plus the best placement distance to ``t_k``.
Enumerating ``i`` and ``k`` therefore solves the grasp program exactly without
a general MILP solver.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .actions import GLOBAL, GraspAction, Mode, Target
from .assignment import Assignment, compute_cost, costs_with_fixed_object
from .geometry import EPS_GEO, dist_points_polygon, polygon_distance
from .reachability import ReachabilityMap
from .scene import SceneState

_STRICT = 1e-9


@dataclass(frozen=True)
class BufferLocation:
    point: tuple[float, float]
    grid_index: tuple[int, int]
    distances: tuple[float, ...]
    pseudo: bool = False


@dataclass(frozen=True, eq=False)
class PlacementGrid:
    """sqrt(2)*R-spaced placement samples anchored at the workspace corner.

    ``region_points[j]`` / ``region_index[j]`` hold ``S_j`` (sorted by grid
    index); ``region_free[j]`` marks samples whose ``B_R`` clears every object.
    """

    spacing: float
    origin: tuple[float, float]
    radius: float
    shape: tuple[int, int]
    region_points: tuple[np.ndarray, ...]
    region_index: tuple[np.ndarray, ...]
    region_free: tuple[np.ndarray, ...]
    buffer: Optional[BufferLocation]

    def sample(self, m: int, n: int) -> tuple[float, float]:
        return (self.origin[0] + self.spacing * m, self.origin[1] + self.spacing * n)

    def free_points(self, j: int) -> np.ndarray:
        return self.region_points[j][self.region_free[j]]

    def placements(self) -> list[tuple[tuple[int, int], tuple[float, float], int]]:
        """Offered placements ``(grid index, point, region or -1 for buffer)`` in grid-index order."""
        out = []
        for j in range(len(self.region_points)):
            for idx, p, free in zip(self.region_index[j].tolist(), self.region_points[j].tolist(),
                                    self.region_free[j].tolist()):
                if free:
                    out.append((tuple(idx), tuple(p), j))
        if self.buffer is not None:
            out.append((self.buffer.grid_index, self.buffer.point, -1))
        out.sort(key=lambda t: t[0])
        return out


def _grid_points(state: SceneState, reach_map: ReachabilityMap, spacing: float):
    xmin, ymin, xmax, ymax = reach_map.bounds()
    for r in state.regions:
        bx0, by0, bx1, by1 = r.polygon.bounds
        xmin, ymin, xmax, ymax = min(xmin, bx0), min(ymin, by0), max(xmax, bx1), max(ymax, by1)
    nm = int(math.floor((xmax - xmin) / spacing + 1e-9)) + 1
    nn = int(math.floor((ymax - ymin) / spacing + 1e-9)) + 1
    mm, nnn = np.meshgrid(np.arange(nm), np.arange(nn), indexing="ij")
    idx = np.column_stack((mm.ravel(), nnn.ravel()))
    pts = np.column_stack((xmin + spacing * idx[:, 0], ymin + spacing * idx[:, 1]))
    return (xmin, ymin), (nm, nn), idx, pts


def _free_mask(pts: np.ndarray, state: SceneState, R: float) -> np.ndarray:
    if state.n_objects == 0 or len(pts) == 0:
        return np.ones(len(pts), dtype=bool)
    c = state.centers
    free = np.ones(len(pts), dtype=bool)
    # chunked to bound memory on large grids
    for s in range(0, len(pts), 4096):
        blk = pts[s:s + 4096]
        d2 = ((blk[:, None, :] - c[None, :, :]) ** 2).sum(axis=2)
        free[s:s + 4096] = np.all(d2 >= (2.0 * R - EPS_GEO) ** 2, axis=1)
    return free


def build_placement_grid(state: SceneState, reach_map: ReachabilityMap,
                         radius: Optional[float] = None) -> PlacementGrid:
    """Placement samples ``S_j`` per region plus a buffer location.

    A sample belongs to ``S_j`` when ``B_2R(p)`` lies in ``t_j`` and ``p`` is
    reachable; it is free when ``B_R(p)`` overlaps no object's ``B_R``.
    """
    R = state.max_radius if radius is None else float(radius)
    if R <= 0:
        raise ValueError("placement grid needs a positive object radius")
    spacing = math.sqrt(2.0) * R
    origin, shape, idx, pts = _grid_points(state, reach_map, spacing)
    reachable = reach_map.reach_many(pts)
    free = _free_mask(pts, state, R)
    rp, ri, rf = [], [], []
    for j, region in enumerate(state.regions):
        poly = region.polygon
        margins = poly.offsets[None, :] - pts @ poly.normals.T
        inside = np.all(margins >= 2.0 * R - EPS_GEO, axis=1) & reachable
        sel = np.nonzero(inside)[0]
        if len(sel) == 0:
            warnings.warn(f"region {j} has no placement samples (degenerate region)", RuntimeWarning,
                          stacklevel=2)
        rp.append(pts[sel])
        ri.append(idx[sel])
        rf.append(free[sel])
    buf = _find_buffer(state, pts, idx, reachable & free)
    return PlacementGrid(spacing, origin, R, shape, tuple(rp), tuple(ri), tuple(rf), buf)


def _region_separation(state: SceneState) -> np.ndarray:
    """``min_{i != j} dist(t_i, t_j)`` per region (``inf`` when ``T = 1``)."""
    T = state.n_regions
    sep = np.full(T, math.inf)
    for a in range(T):
        for b in range(a + 1, T):
            d = polygon_distance(state.regions[a].polygon, state.regions[b].polygon)
            sep[a] = min(sep[a], d)
            sep[b] = min(sep[b], d)
    return sep


def _find_buffer(state: SceneState, pts: np.ndarray, idx: np.ndarray,
                 usable: np.ndarray) -> Optional[BufferLocation]:
    if state.n_regions == 0:
        return None
    cand = np.nonzero(usable)[0]
    if len(cand) == 0:
        return None
    D = np.column_stack([dist_points_polygon(pts[cand], r.polygon) for r in state.regions])
    outside = np.all(D > EPS_GEO, axis=1)
    cand, D = cand[outside], D[outside]
    if len(cand) == 0:
        return None
    sep = _region_separation(state)
    ok = np.all(D < sep[None, :], axis=1)
    pseudo = not ok.any()
    if not pseudo:
        cand, D = cand[ok], D[ok]
    # most central candidate first, then smallest grid index
    score = D.max(axis=1)
    order = np.lexsort((idx[cand, 1], idx[cand, 0], score))
    k = order[0]
    p = pts[cand[k]]
    return BufferLocation((float(p[0]), float(p[1])), (int(idx[cand[k], 0]), int(idx[cand[k], 1])),
                          tuple(float(v) for v in D[k]), pseudo)


def find_buffer(state: SceneState, grid: PlacementGrid) -> Optional[BufferLocation]:
    """Buffer location of ``grid`` (already computed when the grid is built)."""
    return grid.buffer


def _placement_table(state: SceneState, grid: PlacementGrid, include_pseudo: bool):
    """Per region ``k``: best placement distance ``g_k`` and the placement achieving it."""
    T = state.n_regions
    offered = [p for p in grid.placements()
               if p[2] >= 0 or (grid.buffer is not None and (include_pseudo or not grid.buffer.pseudo))]
    g = np.full(T, math.inf)
    best: list[Optional[tuple]] = [None] * T
    if not offered:
        return g, best
    pts = np.array([p[1] for p in offered])
    D = np.column_stack([dist_points_polygon(pts, r.polygon) for r in state.regions])
    for row, p in enumerate(offered):
        if p[2] >= 0:
            D[row, p[2]] = 0.0
        elif grid.buffer.pseudo:
            D[row, :] = 0.0
    arg = np.argmin(D, axis=0)  # offered is in grid-index order: first wins ties
    for k in range(T):
        g[k] = D[arg[k], k]
        best[k] = offered[arg[k]]
    return g, best


def _plan(state: SceneState, grid: PlacementGrid, reach_map: ReachabilityMap,
          assignment: Assignment, modes: list[Mode], include_pseudo: bool) -> dict:
    g, best = _placement_table(state, grid, include_pseudo)
    J = assignment.cost
    out: dict = {m: None for m in modes}
    if state.n_objects == 0 or not np.isfinite(g).any():
        return out
    reachable = reach_map.reach_many(state.centers)
    scores = {m: (math.inf, -1, -1) for m in modes}
    for i in np.nonzero(reachable)[0].tolist():
        post = costs_with_fixed_object(assignment, i) + g
        for m in modes:
            if m == GLOBAL:
                k = int(np.argmin(post))
            else:
                k = m.region
            val = float(post[k])
            if val < scores[m][0] - 1e-12:
                scores[m] = (val, i, k)
    for m in modes:
        val, i, k = scores[m]
        if i < 0 or not val < J - _STRICT:
            continue
        idx, p, region = best[k]
        buffer = region < 0
        out[m] = GraspAction(
            object_index=i, placement=(float(p[0]), float(p[1])), region=k, predicted_cost=val,
            grid_index=idx, to_buffer=buffer, pseudo_buffer=buffer and grid.buffer.pseudo)
    return out


def plan_grasps(state: SceneState, grid: PlacementGrid, reach_map: ReachabilityMap,
                modes: list[Mode], assignment: Optional[Assignment] = None) -> dict:
    """Exact greedy grasps for several objectives sharing one pass over objects.

    A pseudo buffer (when no true buffer exists) is only offered if no regular
    placement strictly reduces the cost.
    """
    a = compute_cost(state) if assignment is None else assignment
    out = _plan(state, grid, reach_map, a, modes, include_pseudo=False)
    if grid.buffer is not None and grid.buffer.pseudo and any(v is None for v in out.values()):
        missing = [m for m, v in out.items() if v is None]
        out.update(_plan(state, grid, reach_map, a, missing, include_pseudo=True))
    return out


def plan_grasp(state: SceneState, grid: PlacementGrid, reach_map: ReachabilityMap,
               mode: Mode = GLOBAL, assignment: Optional[Assignment] = None) -> Optional[GraspAction]:
    """Best single grasp under ``mode``; ``None`` when no grasp strictly reduces the objective."""
    if isinstance(mode, Target) and not 0 <= mode.region < state.n_regions:
        raise ValueError(f"target region {mode.region} out of range")
    return plan_grasps(state, grid, reach_map, [mode], assignment)[mode]
