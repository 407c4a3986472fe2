"""Sorting cost J: capacity-constrained optimal assignment of objects to regions.

The transportation problem decomposes by category. Within one category the
residual network of successive shortest paths collapses onto the ``T`` region
nodes: moving object ``m`` from region ``q`` to ``r`` costs
``c[m, r] - c[m, q]``, so the cheapest ``q -> r`` move is a min over the
current members of ``q``. Each augmentation is a Bellman-Ford pass over at
most ``T`` nodes on that graph.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InfeasibleTaskError
from .geometry import dist_points_polygon
from .scene import SceneState, check_capacities

_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Assignment:
    """Optimal object-to-region map ``b`` and its cost ``J``."""

    regions: np.ndarray        # b(i), region index per object
    cost: float                # J
    object_costs: np.ndarray   # dist(o_i, t_b(i))
    cost_matrix: np.ndarray    # (N, T) point-to-polygon distances
    labels: np.ndarray         # 1..C
    capacities: np.ndarray     # (T, C)

    @property
    def n_objects(self) -> int:
        return len(self.regions)

    def region_cost(self, j: int) -> float:
        """Share of ``J`` carried by objects assigned to region ``j``."""
        return float(self.object_costs[self.regions == j].sum())

    def counts(self) -> np.ndarray:
        """``(T, C)`` assigned object counts."""
        T, C = self.capacities.shape
        out = np.zeros((T, C), dtype=int)
        np.add.at(out, (self.regions, self.labels - 1), 1)
        return out


def cost_matrix(state: SceneState) -> np.ndarray:
    """``(N, T)`` Euclidean distances from object centers to region polygons."""
    if state.n_objects == 0:
        return np.zeros((0, state.n_regions))
    cols = [dist_points_polygon(state.centers, r.polygon) for r in state.regions]
    return np.column_stack(cols) if cols else np.zeros((state.n_objects, 0))


# ------------------------------------------------------------ region graph

def _region_graph(cost: np.ndarray, assign: np.ndarray, T: int,
                  skip: int = -1) -> tuple[list[list[float]], list[list[int]]]:
    """Cheapest single-object move between every pair of regions.

    ``W[q][r]`` is ``min_m c[m, r] - c[m, q]`` over members ``m`` of ``q``
    (``inf`` if ``q`` is empty); ``arg[q][r]`` is the moving member, smallest
    index on ties. Member ``skip`` is ignored.
    """
    W = [[math.inf] * T for _ in range(T)]
    arg = [[-1] * T for _ in range(T)]
    for q in range(T):
        idx = np.nonzero(assign == q)[0]
        if skip >= 0:
            idx = idx[idx != skip]
        if len(idx) == 0:
            continue
        diff = cost[idx] - cost[idx, q][:, None]
        k = np.argmin(diff, axis=0)
        row = diff[k, np.arange(T)].tolist()
        who = idx[k].tolist()
        for r in range(T):
            if r != q:
                W[q][r] = row[r]
                arg[q][r] = who[r]
    return W, arg


def _relax_forward(dist: list[float], W: list[list[float]]) -> list[int]:
    """Single-source-set Bellman-Ford; mutates ``dist`` and returns predecessors."""
    T = len(dist)
    pred = [-1] * T
    for _ in range(max(T - 1, 1)):
        changed = False
        for q in range(T):
            dq = dist[q]
            if dq == math.inf:
                continue
            row = W[q]
            for r in range(T):
                nd = dq + row[r]
                if nd < dist[r] - _TOL:
                    dist[r] = nd
                    pred[r] = q
                    changed = True
        if not changed:
            break
    return pred


def _relax_backward(dist: list[float], W: list[list[float]]) -> list[int]:
    """Bellman-Ford towards a target set; ``succ[q]`` is the next region on the path."""
    T = len(dist)
    succ = [-1] * T
    for _ in range(max(T - 1, 1)):
        changed = False
        for q in range(T):
            row = W[q]
            for r in range(T):
                dr = dist[r]
                if dr == math.inf or row[r] == math.inf:
                    continue
                nd = row[r] + dr
                if nd < dist[q] - _TOL:
                    dist[q] = nd
                    succ[q] = r
                    changed = True
        if not changed:
            break
    return succ


def _ssp(cost: np.ndarray, cap: np.ndarray) -> np.ndarray:
    """Exact min-cost assignment of rows to columns with column capacities."""
    n, T = cost.shape
    assign = np.full(n, -1, dtype=int)
    load = [0] * T
    capl = [int(c) for c in cap]
    for i in range(n):
        W, arg = _region_graph(cost, assign, T)
        dist = cost[i].tolist()
        pred = _relax_forward(dist, W)
        best, j = math.inf, -1
        for r in range(T):
            if load[r] < capl[r] and dist[r] < best - _TOL:
                best, j = dist[r], r
        if j < 0:
            raise InfeasibleTaskError("capacity exhausted while assigning objects")
        cur = j
        while pred[cur] != -1:
            q = pred[cur]
            assign[arg[q][cur]] = cur
            cur = q
        assign[i] = cur
        load[j] += 1
    return assign


def solve_transportation(cost: np.ndarray, capacities: np.ndarray,
                         labels: Optional[np.ndarray] = None) -> tuple[np.ndarray, float]:
    """Integral optimum of the capacitated transportation problem.

    ``cost`` is ``(N, T)``. Without ``labels``, ``capacities`` is ``(T,)``;
    with labels in ``1..C`` it is ``(T, C)`` and each category is solved
    independently. Slack capacity is left unused (inequality form).
    Returns the region per row and the total cost.
    """
    cost = np.asarray(cost, dtype=float)
    if cost.ndim != 2:
        raise ValueError("cost must be a 2-D matrix")
    if not np.all(np.isfinite(cost)):
        raise ValueError("costs must be finite")
    n, T = cost.shape
    caps = np.asarray(capacities, dtype=int)
    if labels is None:
        caps = caps.reshape(T, 1)
        labels = np.ones(n, dtype=int)
    labels = np.asarray(labels, dtype=int)
    if caps.shape[0] != T:
        raise ValueError("capacities must have one row per region")
    assign = np.full(n, -1, dtype=int)
    for k in range(caps.shape[1]):
        rows = np.nonzero(labels == k + 1)[0]
        if len(rows) == 0:
            continue
        if len(rows) > caps[:, k].sum():
            raise InfeasibleTaskError(f"category {k + 1}: {len(rows)} objects exceed capacity {caps[:, k].sum()}")
        assign[rows] = _ssp(cost[rows], caps[:, k])
    total = float(cost[np.arange(n), assign].sum()) if n else 0.0
    return assign, total


def _make(assign: np.ndarray, cm: np.ndarray, labels: np.ndarray, caps: np.ndarray) -> Assignment:
    n = len(assign)
    oc = cm[np.arange(n), assign] if n else np.zeros(0)
    return Assignment(assign, float(oc.sum()), oc, cm, labels, caps)


def compute_cost(state: SceneState) -> Assignment:
    """Minimum-cost capacity-feasible assignment; ``J = 0`` iff the scene is sorted."""
    check_capacities(state)
    cm = cost_matrix(state)
    caps = state.capacity_matrix
    if state.n_regions == 0:
        if state.n_objects:
            raise InfeasibleTaskError("no target regions")
        return _make(np.zeros(0, dtype=int), cm, state.labels, caps)
    assign, _ = solve_transportation(cm, caps, state.labels)
    return _make(assign, cm, state.labels, caps)


def _remove(a: Assignment, i: int) -> tuple[np.ndarray, float]:
    """Drop object ``i`` and re-optimise its category; returns (assign with -1 at i, cost change)."""
    lab = a.labels[i]
    rows = np.nonzero(a.labels == lab)[0]
    T = a.capacities.shape[0]
    sub = a.regions[rows].copy()
    loc = int(np.nonzero(rows == i)[0][0])
    cm = a.cost_matrix[rows]
    r = int(sub[loc])
    W, arg = _region_graph(cm, sub, T, skip=loc)
    dist = [math.inf] * T
    dist[r] = 0.0
    succ = _relax_backward(dist, W)
    delta = -float(cm[loc, r])
    best, q = -_TOL, -1
    for s in range(T):
        if s != r and dist[s] < best:
            best, q = dist[s], s
    sub[loc] = -1
    if q >= 0:
        delta += best
        cur = q
        while cur != r:
            nxt = succ[cur]
            sub[arg[cur][nxt]] = nxt
            cur = nxt
    out = a.regions.copy()
    out[rows] = sub
    return out, delta


def remove_and_resolve(assignment: Assignment, i: int) -> Assignment:
    """Optimal assignment of every object except ``i`` (indices above ``i`` shift down).

    Removing one unit frees one slot in ``b(i)``; the only possible
    improvement is a single shortest move chain into that slot.
    """
    out, _ = _remove(assignment, i)
    keep = np.arange(assignment.n_objects) != i
    return _make(out[keep], assignment.cost_matrix[keep], assignment.labels[keep], assignment.capacities)


def costs_with_fixed_object(assignment: Assignment, i: int) -> np.ndarray:
    """Optimal cost of all objects except ``i`` when ``i`` occupies a slot of region ``k``.

    Entry ``k`` is the optimum with capacity ``c_{l_i}(t_k)`` reduced by one,
    ``inf`` if that is infeasible. After removing ``i``, a full region ``k``
    must route one unit to a region with spare capacity along a shortest chain.
    """
    a = assignment
    T = a.capacities.shape[0]
    removed, delta = _remove(a, i)
    base = a.cost + delta
    lab = a.labels[i]
    rows = np.nonzero(a.labels == lab)[0]
    sub = removed[rows]
    loc = int(np.nonzero(rows == i)[0][0])
    cm = a.cost_matrix[rows]
    cap = a.capacities[:, lab - 1]
    load = np.bincount(sub[sub >= 0], minlength=T)
    W, _ = _region_graph(cm, sub, T, skip=loc)
    dist = [0.0 if load[k] < cap[k] else math.inf for k in range(T)]
    _relax_backward(dist, W)
    return base + np.array(dist)
