"""Deterministic quasi-static stepper for grasp and push actions.

A push advances the pusher in small increments; after every increment each
penetration is removed by translating the downstream body along the minimum
translation vector. Objects never touched keep their original records.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .actions import Action, GraspAction, PushAction
from .errors import InvalidActionError, SimulationDivergenceError
from .geometry import EPS_GEO, ConvexPolygon, Direction, penetration, polygons_overlap, translation_gap
from .push_planner import Pusher
from .scene import SceneObject, SceneState


@dataclass(frozen=True)
class SimConfig:
    increment: float = 0.002
    iterations: int = 32
    tolerance: float = 1e-6
    rotation: bool = False

    def __post_init__(self) -> None:
        if not self.increment > 0:
            raise ValueError("increment must be positive")
        if self.iterations < 1:
            raise ValueError("iterations must be at least 1")


class _World:
    """Mutable working copy of the object polygons during one push."""

    def __init__(self, state: SceneState, d: Direction):
        self.state = state
        self.d = d
        self.u = d.vector
        self.w = d.perp
        self.polys: list[ConvexPolygon] = [o.polygon for o in state.objects]
        self.centers = np.array(state.centers, dtype=float).reshape(-1, 2)
        self.bbox = np.array([p.bounds for p in self.polys], dtype=float).reshape(-1, 4)
        self.touched = np.zeros(len(self.polys), dtype=bool)
        self.verts = np.array(state.vertex_array, dtype=float)

    def translate(self, k: int, delta: np.ndarray) -> None:
        self.polys[k] = self.polys[k].translated(delta)
        self.centers[k] += delta
        self.verts[k] += delta
        self.bbox[k] += (delta[0], delta[1], delta[0], delta[1])
        self.touched[k] = True

    def rotate(self, k: int, angle: float) -> None:
        self.polys[k] = self.polys[k].rotated(angle, self.centers[k])
        v = self.polys[k].vertices
        self.verts[k, : len(v)] = v
        self.verts[k, len(v):] = v[-1]
        self.bbox[k] = self.polys[k].bounds
        self.touched[k] = True

    def near(self, box: tuple[float, float, float, float], skip: int = -1) -> np.ndarray:
        b = self.bbox
        hit = (b[:, 0] < box[2] + EPS_GEO) & (b[:, 2] > box[0] - EPS_GEO) & \
              (b[:, 1] < box[3] + EPS_GEO) & (b[:, 3] > box[1] - EPS_GEO)
        if skip >= 0:
            hit[skip] = False
        return np.nonzero(hit)[0]

    def along(self, k: int) -> float:
        return float(self.centers[k] @ self.u)

    def lateral(self, poly: ConvexPolygon) -> tuple[float, float]:
        p = poly.vertices @ self.w
        return float(p.min()), float(p.max())


def _free_travel(world: _World, movers: list[ConvexPolygon], skip: set[int], limit: float) -> float:
    """How far ``movers`` can translate along ``d`` before touching any other object."""
    best = limit
    if not len(world.polys):
        return best
    pw = world.verts @ world.w
    pu = world.verts @ world.u
    wlo, whi, umax = pw.min(axis=1), pw.max(axis=1), pu.max(axis=1)
    for mp in movers:
        lo, hi = world.lateral(mp)
        front = float((mp.vertices @ world.u).min())
        cand = np.nonzero((np.minimum(hi, whi) - np.maximum(lo, wlo) > EPS_GEO) & (umax > front))[0]
        for k in cand.tolist():
            if k in skip:
                continue
            g = translation_gap(mp, world.polys[k], world.d)
            if g < best:
                best = g
    return max(best, 0.0)


def _resolve(world: _World, pusher_poly: ConvexPolygon, cfg: SimConfig,
             moved: dict[int, np.ndarray]) -> None:
    """Iterative projection until no penetration exceeds the tolerance."""
    for _ in range(cfg.iterations):
        changed = False
        for k in world.near(pusher_poly.bounds).tolist():
            pen = penetration(pusher_poly, world.polys[k], cfg.tolerance * 0.5)
            if pen is not None:
                depth, n = pen
                delta = depth * n
                world.translate(k, delta)
                moved[k] = moved.get(k, 0.0) + delta
                if cfg.rotation:
                    _rotate_off_center(world, k, pusher_poly, depth)
                changed = True
        # front-to-back: bodies nearest the pusher push first
        order = sorted(moved, key=lambda k: (world.along(k), k))
        for a in order:
            for b in world.near(tuple(world.bbox[a]), skip=a).tolist():
                pen = penetration(world.polys[a], world.polys[b], cfg.tolerance * 0.5)
                if pen is None:
                    continue
                depth, n = pen
                down, sign = b, 1.0
                if (world.along(a), a) > (world.along(b), b):
                    down, sign = a, -1.0
                delta = sign * depth * n
                world.translate(down, delta)
                moved[down] = moved.get(down, 0.0) + delta
                changed = True
        if not changed:
            return
    worst = 0.0
    for k in moved:
        for b in world.near(tuple(world.bbox[k]), skip=k).tolist():
            pen = penetration(world.polys[k], world.polys[b], cfg.tolerance)
            if pen is not None:
                worst = max(worst, pen[0])
        pen = penetration(pusher_poly, world.polys[k], cfg.tolerance)
        if pen is not None:
            worst = max(worst, pen[0])
    if worst > cfg.tolerance:
        raise SimulationDivergenceError(f"contact projection left {worst:.3g} m of penetration")


def _rotate_off_center(world: _World, k: int, pusher_poly: ConvexPolygon, depth: float) -> None:
    # small-angle correction proportional to the lateral offset of the push
    c = world.centers[k]
    pc = pusher_poly.vertices.mean(axis=0)
    off = float((pc - c) @ world.w)
    r = float(np.hypot(*(world.polys[k].vertices - c).T).max())
    if r <= 0.0 or abs(off) < 1e-9:
        return
    angle = max(-0.05, min(0.05, -depth * off / (r * r)))
    world.rotate(k, angle)


def step_push(state: SceneState, pusher_pose: tuple[float, float], advance: float,
              direction: Direction, cfg: SimConfig = SimConfig(), pusher: Pusher = Pusher()) -> SceneState:
    """Advance a pusher at ``pusher_pose`` by ``advance`` (at most one increment) and resolve contacts."""
    if advance > cfg.increment + 1e-15:
        raise ValueError("advance exceeds the configured increment")
    d = Direction.of(direction)
    world = _World(state, d)
    pose = np.asarray(pusher_pose, dtype=float) + advance * d.vector
    _resolve(world, pusher.polygon(pose, d), cfg, {})
    return _finish(state, world, (float(pose[0]), float(pose[1])))


def _finish(state: SceneState, world: _World, gripper: tuple[float, float]) -> SceneState:
    objs = list(state.objects)
    for k in np.nonzero(world.touched)[0].tolist():
        o = objs[k]
        c = world.centers[k]
        objs[k] = SceneObject(world.polys[k], o.label, (float(c[0]), float(c[1])), o.radius)
    return state.with_objects(objs, gripper)


def _simulate_push(state: SceneState, action: PushAction, cfg: SimConfig, pusher: Pusher) -> SceneState:
    d = action.direction
    u = d.vector
    world = _World(state, d)
    pose = np.array(action.anchor, dtype=float)
    total = float(action.distance)
    done = 0.0
    # pusher may start in contact
    _resolve(world, pusher.polygon(pose, d), cfg, {})
    group: set[int] = set()
    rigid = True
    while total - done > 1e-12:
        remaining = total - done
        if rigid:
            movers = [pusher.polygon(pose, d)] + [world.polys[k] for k in sorted(group)]
            free = _free_travel(world, movers, group, remaining)
            if free > cfg.increment:
                delta = free * u
                pose = pose + delta
                for k in sorted(group):
                    world.translate(k, delta)
                done += free
                continue
        step = min(cfg.increment, remaining)
        pose = pose + step * u
        moved: dict[int, np.ndarray] = {}
        _resolve(world, pusher.polygon(pose, d), cfg, moved)
        done += step
        group = set(moved)
        rigid = all(np.abs(v - step * u).max() <= 1e-12 for v in moved.values())
    end = (float(action.anchor[0] + total * u[0]), float(action.anchor[1] + total * u[1]))
    return _finish(state, world, end)


def simulate(state: SceneState, action: Action, cfg: SimConfig = SimConfig(),
             pusher: Optional[Pusher] = None) -> SceneState:
    """Apply ``action`` and return the resulting state; the gripper ends where the action ends."""
    if isinstance(action, GraspAction):
        i = action.object_index
        if not 0 <= i < state.n_objects:
            raise InvalidActionError(f"object index {i} out of range")
        moved = state.objects[i].moved_to(action.placement)
        c = np.asarray(action.placement)
        for k, o in enumerate(state.objects):
            if k == i:
                continue
            if math.hypot(o.center[0] - c[0], o.center[1] - c[1]) >= o.radius + moved.radius:
                continue
            if polygons_overlap(o.polygon, moved.polygon, cfg.tolerance):
                raise InvalidActionError(f"placement of object {i} overlaps object {k}")
        objs = list(state.objects)
        objs[i] = moved
        return state.with_objects(objs, action.placement)
    if isinstance(action, PushAction):
        if action.distance < 0:
            raise InvalidActionError("push distance must be non-negative")
        return _simulate_push(state, action, cfg, pusher or Pusher())
    raise InvalidActionError(f"unknown action {action!r}")
