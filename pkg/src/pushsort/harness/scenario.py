"""Seeded scenario generation: workspace layout, regions, labels and object poses."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from ..errors import DensityError
from ..geometry import ConvexPolygon
from ..reachability import ConvexReachabilityMap, ReachabilityMap
from ..scene import SceneObject, SceneState, TargetRegion, validate_state

WORKSPACE_DEPTH = 2.0
REGION_GAP = 0.1
MAX_ATTEMPTS = 1_000_000
MAX_FILL = 0.7


@dataclass(frozen=True)
class ScenarioSpec:
    """Everything needed to regenerate a scene bit-for-bit.

    ``caps`` is a per-category capacity applied to every region (``None``
    derives ``ceil(count_k / T)``); ``weights`` sets category proportions.
    ``c == n`` gives every object its own category with one designated
    region. ``map`` is ``full``, ``inset:<margin>`` or ``polygon:x,y;x,y;...``.
    """

    seed: int = 0
    n: int = 50
    t: int = 2
    c: int = 1
    caps: Optional[tuple[int, ...]] = None
    weights: Optional[tuple[float, ...]] = None
    object_size: float = 0.05
    region_size: tuple[float, float] = (1.0, 0.5)
    map: str = "full"
    pusher_width: float = 0.08
    spawn_depth: float = 0.6

    def __post_init__(self) -> None:
        if self.n < 0 or self.t < 1 or self.c < 1:
            raise ValueError("need n >= 0, t >= 1, c >= 1")
        if self.caps is not None:
            object.__setattr__(self, "caps", tuple(int(v) for v in self.caps))
        if self.weights is not None:
            object.__setattr__(self, "weights", tuple(float(v) for v in self.weights))
        object.__setattr__(self, "region_size", tuple(float(v) for v in self.region_size))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["caps"] = list(self.caps) if self.caps is not None else None
        d["weights"] = list(self.weights) if self.weights is not None else None
        d["region_size"] = list(self.region_size)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioSpec":
        d = dict(d)
        for k in ("caps", "weights", "region_size"):
            if d.get(k) is not None:
                d[k] = tuple(d[k])
        return cls(**d)


@dataclass
class Scenario:
    spec: ScenarioSpec
    state: SceneState
    reach_map: ReachabilityMap
    workspace: tuple[float, float, float, float]
    designated: Optional[tuple[int, ...]] = field(default=None)


def workspace_for(spec: ScenarioSpec) -> tuple[float, float, float, float]:
    rw = spec.region_size[0]
    width = max(2.0, spec.t * rw + (spec.t + 1) * REGION_GAP)
    return (0.0, 0.0, width, WORKSPACE_DEPTH)


def region_polygons(spec: ScenarioSpec) -> list[ConvexPolygon]:
    """Regions side by side along the far edge of the workspace."""
    x0, y0, x1, y1 = workspace_for(spec)
    rw, rh = spec.region_size
    span = spec.t * rw + (spec.t - 1) * REGION_GAP
    left = x0 + 0.5 * ((x1 - x0) - span)
    top = y1 - REGION_GAP
    return [ConvexPolygon.box(left + j * (rw + REGION_GAP), top - rh, left + j * (rw + REGION_GAP) + rw, top)
            for j in range(spec.t)]


def spawn_box(spec: ScenarioSpec) -> tuple[float, float, float, float]:
    """Band just below the regions where objects are sampled."""
    x0, y0, x1, y1 = workspace_for(spec)
    rh = spec.region_size[1]
    top = y1 - REGION_GAP - rh - REGION_GAP
    bottom = max(y0 + REGION_GAP, top - spec.spawn_depth)
    return (x0 + REGION_GAP, bottom, x1 - REGION_GAP, top)


def build_map(spec: ScenarioSpec) -> ReachabilityMap:
    x0, y0, x1, y1 = workspace_for(spec)
    kind, _, arg = spec.map.partition(":")
    if kind == "full":
        return ConvexReachabilityMap(ConvexPolygon.box(x0, y0, x1, y1))
    if kind == "inset":
        m = float(arg)
        return ConvexReachabilityMap(ConvexPolygon.box(x0 + m, y0 + m, x1 - m, y1 - m))
    if kind == "polygon":
        pts = [tuple(float(v) for v in p.split(",")) for p in arg.split(";") if p]
        return ConvexReachabilityMap(ConvexPolygon(pts))
    raise ValueError(f"unknown map spec {spec.map!r}")


def _category_counts(spec: ScenarioSpec) -> np.ndarray:
    if spec.c == 1:
        return np.array([spec.n])
    w = np.ones(spec.c) if spec.weights is None else np.asarray(spec.weights, dtype=float)
    if len(w) != spec.c or np.any(w < 0) or w.sum() <= 0:
        raise ValueError("weights must give one non-negative value per category")
    raw = spec.n * w / w.sum()
    counts = np.floor(raw).astype(int)
    # largest remainder, lower category first on ties
    rest = spec.n - counts.sum()
    order = sorted(range(spec.c), key=lambda k: (-(raw[k] - counts[k]), k))
    for k in order[:rest]:
        counts[k] += 1
    return counts


def _sample_centers(rng: np.random.Generator, n: int, size: float,
                    box: tuple[float, float, float, float]) -> np.ndarray:
    x0, y0, x1, y1 = box
    h = size / 2.0
    area = max((x1 - x0), 0.0) * max((y1 - y0), 0.0)
    if n and (area <= 0 or n * size * size / area > MAX_FILL):
        raise DensityError(f"{n} objects of size {size} m exceed the fill limit of the spawn area")
    out = np.empty((n, 2))
    k = 0
    attempts = 0
    while k < n:
        attempts += 1
        if attempts > MAX_ATTEMPTS:
            raise DensityError(f"placed only {k} of {n} objects in {MAX_ATTEMPTS} attempts")
        p = (rng.uniform(x0 + h, x1 - h), rng.uniform(y0 + h, y1 - h))
        if k and np.any((np.abs(out[:k, 0] - p[0]) < size) & (np.abs(out[:k, 1] - p[1]) < size)):
            continue
        out[k] = p
        k += 1
    return out


def generate_scenario(spec: ScenarioSpec) -> Scenario:
    """Rejection-sample non-overlapping axis-aligned squares below the regions."""
    rng = np.random.default_rng(spec.seed)
    polys = region_polygons(spec)
    T = spec.t
    designated = None
    if spec.c == spec.n and spec.n > 1:
        labels = np.arange(1, spec.n + 1)
        designated = np.resize(np.arange(T), spec.n)
        rng.shuffle(designated)
        caps = np.zeros((T, spec.c), dtype=int)
        caps[designated, labels - 1] = 1
    else:
        counts = _category_counts(spec)
        labels = np.repeat(np.arange(1, spec.c + 1), counts)
        rng.shuffle(labels)
        if spec.caps is not None:
            if len(spec.caps) != spec.c:
                raise ValueError("caps needs one value per category")
            per = np.asarray(spec.caps, dtype=int)
        else:
            per = np.ceil(counts / T).astype(int)
        caps = np.tile(per, (T, 1))
    centers = _sample_centers(rng, spec.n, spec.object_size, spawn_box(spec))
    objects = [SceneObject.square(c, spec.object_size, int(l)) for c, l in zip(centers.tolist(), labels.tolist())]
    regions = [TargetRegion(p, tuple(int(v) for v in caps[j])) for j, p in enumerate(polys)]
    reach_map = build_map(spec)
    x0, y0, x1, y1 = reach_map.bounds()
    gripper = (0.5 * (x0 + x1), y0 + 0.5 * (y1 - y0))
    state = SceneState(tuple(objects), tuple(regions), gripper, spec.c)
    validate_state(state)
    return Scenario(spec, state, reach_map, workspace_for(spec),
                    None if designated is None else tuple(int(v) for v in designated))


def fig5_spec(seed: int, n: int = 50, labeled: bool = False) -> ScenarioSpec:
    """Two regions with either one shared category or one category per object."""
    if labeled:
        return ScenarioSpec(seed=seed, n=n, t=2, c=n)
    return ScenarioSpec(seed=seed, n=n, t=2, c=1, caps=(math.ceil(n / 2),))


def fig6_spec(seed: int, n: int, t: int) -> ScenarioSpec:
    """Two categories at 80/20 with per-region capacities ``0.4N`` and ``0.1N``."""
    return ScenarioSpec(seed=seed, n=n, t=t, c=2, weights=(0.8, 0.2),
                        caps=(math.ceil(0.4 * n), math.ceil(0.1 * n)))
