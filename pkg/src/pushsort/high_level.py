"""Receding-horizon selection among per-region grasp and push actions.

Each search node offers ``G_j`` (best grasp into region ``j``) and ``P_j``
(best push for region ``j``). Children are produced by the simulator and a
leaf is scored by cumulative cost reduction per meter of end-effector travel
from the root.
"""
from __future__ import annotations

import time
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Optional

from .actions import Action, GraspAction, PushAction, Target
from .assignment import compute_cost
from .errors import PushSortError
from .grasp_planner import build_placement_grid, plan_grasps
from .push_planner import Pusher, plan_pushes
from .reachability import ReachabilityMap
from .scene import SceneState
from .simulator import SimConfig, simulate
from .geometry import evenly_spaced_directions

FULL = "full"
GREEDY = "greedy"
_PROGRESS = 1e-9


@dataclass(frozen=True)
class PlannerConfig:
    horizon: int = 1
    mode: str = GREEDY
    use_grasp: bool = True
    use_push: bool = True
    pusher: Pusher = Pusher()
    directions: int = 8
    sim: SimConfig = SimConfig()
    guard: bool = True
    cache_size: int = 256

    def __post_init__(self) -> None:
        if self.horizon < 1:
            raise ValueError("horizon must be at least 1")
        if self.mode not in (FULL, GREEDY):
            raise ValueError(f"mode must be {FULL!r} or {GREEDY!r}")
        if not (self.use_grasp or self.use_push):
            raise ValueError("at least one action type must be enabled")


@dataclass(frozen=True)
class Child:
    """One expansion: action ``ordinal`` (grasps ``0..T-1``, pushes ``T..2T-1``) and its result."""

    ordinal: int
    action: Action
    state: SceneState
    cost: float
    transit: float


@dataclass
class SearchNode:
    state: SceneState
    depth: int
    cost: float
    transit: float = 0.0
    path: tuple[int, ...] = ()
    first: Optional[Child] = None


@dataclass
class StepRecord:
    action: Action
    cost_before: float
    cost_after: float
    transit: float
    wall_time: float
    increased: bool = False


@dataclass
class PlanTrace:
    steps: list[StepRecord] = field(default_factory=list)
    initial_cost: float = 0.0
    final_state: Optional[SceneState] = None
    final_cost: float = 0.0
    status: str = "sorted"

    @property
    def complete(self) -> bool:
        return self.status == "sorted"

    @property
    def total_transit(self) -> float:
        return float(sum(s.transit for s in self.steps))

    @property
    def n_grasps(self) -> int:
        return sum(isinstance(s.action, GraspAction) for s in self.steps)

    @property
    def n_pushes(self) -> int:
        return sum(isinstance(s.action, PushAction) for s in self.steps)


def transit_cost(state: SceneState, action: Action, reach_map: ReachabilityMap) -> float:
    """Approach from the gripper to the action start plus the in-action travel (m)."""
    start = action.start_point(state)
    approach = reach_map.traj(state.gripper_pos, start).length
    if isinstance(action, GraspAction):
        return approach + reach_map.traj(start, action.placement).length
    return approach + abs(action.distance)


def j_rate(root_cost: float, leaf_cost: float, transit: float) -> float:
    """Cost reduction per meter of end-effector travel."""
    if not transit > 0:
        raise ValueError("transit must be positive")
    return (root_cost - leaf_cost) / transit


class Planner:
    """Stateful planner: owns the reachability map, configuration and an expansion cache."""

    def __init__(self, reach_map: ReachabilityMap, config: PlannerConfig = PlannerConfig()):
        self.reach_map = reach_map
        self.config = config
        self.directions = evenly_spaced_directions(config.directions)
        self._cache: OrderedDict[bytes, list[Child]] = OrderedDict()
        self.nodes_visited = 0

    # ----------------------------------------------------------- children

    def candidates(self, state: SceneState) -> list[tuple[int, Action]]:
        """``G_j`` and ``P_j`` actions in ordinal order (absent ones skipped)."""
        T = state.n_regions
        a = compute_cost(state)
        if a.cost <= _PROGRESS:
            return []
        modes = [Target(j) for j in range(T)]
        out: list[tuple[int, Action]] = []
        if self.config.use_grasp:
            grid = build_placement_grid(state, self.reach_map)
            g = plan_grasps(state, grid, self.reach_map, modes, a)
            out += [(j, g[m]) for j, m in enumerate(modes) if g[m] is not None]
        if self.config.use_push:
            p = plan_pushes(state, self.reach_map, modes, a, self.config.pusher, self.directions,
                            guard=self.config.guard)
            out += [(T + j, p[m].action) for j, m in enumerate(modes) if p[m].action is not None]
        return out

    def _simulate(self, state: SceneState, ordinal: int, action: Action) -> Optional[Child]:
        try:
            child = simulate(state, action, self.config.sim, self.config.pusher)
            transit = transit_cost(state, action, self.reach_map)
        except PushSortError:
            return None
        return Child(ordinal, action, child, compute_cost(child).cost, transit)

    def expand(self, state: SceneState, mode: Optional[str] = None) -> list[Child]:
        """Simulated children that strictly reduce the cost, in ordinal order."""
        mode = self.config.mode if mode is None else mode
        key = state.fingerprint + mode.encode()
        hit = self._cache.get(key)
        if hit is not None:
            self._cache.move_to_end(key)
            return hit
        cost = compute_cost(state).cost
        T = state.n_regions
        children = []
        for ordinal, action in self.candidates(state):
            c = self._simulate(state, ordinal, action)
            if c is not None and c.cost < cost - _PROGRESS and c.transit > 0:
                children.append(c)
        if mode == GREEDY:
            best: dict[int, Child] = {}
            for c in children:
                j = c.ordinal % T
                r = j_rate(cost, c.cost, c.transit)
                if j not in best or r > j_rate(cost, best[j].cost, best[j].transit) + 1e-15:
                    best[j] = c
            children = sorted(best.values(), key=lambda c: c.ordinal)
        self._cache[key] = children
        if len(self._cache) > self.config.cache_size:
            self._cache.popitem(last=False)
        return children

    # ------------------------------------------------------------- search

    def plan_next_action(self, state: SceneState, horizon: Optional[int] = None) -> Optional[Action]:
        """First action of the leaf with the best cumulative reduction rate within ``horizon`` steps."""
        node = self.search(state, horizon)
        return None if node is None else node.first.action

    def search(self, state: SceneState, horizon: Optional[int] = None) -> Optional[SearchNode]:
        H = self.config.horizon if horizon is None else horizon
        if H < 1:
            raise ValueError("horizon must be at least 1")
        root = SearchNode(state, 0, compute_cost(state).cost)
        self.nodes_visited = 0
        best: Optional[SearchNode] = None
        best_key: Optional[tuple] = None
        stack = [root]
        while stack:
            node = stack.pop()
            self.nodes_visited += 1
            children = self.expand(node.state) if node.depth < H else []
            if not children:
                if node.depth == 0:
                    continue
                key = (-j_rate(root.cost, node.cost, node.transit), node.depth, node.path)
                if best_key is None or key < best_key:
                    best, best_key = node, key
                continue
            for c in reversed(children):
                stack.append(SearchNode(c.state, node.depth + 1, c.cost, node.transit + c.transit,
                                        node.path + (c.ordinal,), node.first or c))
        return best


def plan_next_action(state: SceneState, reach_map: ReachabilityMap, horizon: int = 1,
                     mode: str = GREEDY, **options) -> Optional[Action]:
    cfg = PlannerConfig(horizon=horizon, mode=mode, **options)
    return Planner(reach_map, cfg).plan_next_action(state)


def solve_task(state: SceneState, planner: Planner, budget: int = 1000) -> PlanTrace:
    """Replan and execute until sorted, stuck, or out of budget.

    ``status`` is ``sorted``, ``stuck`` (no action available) or ``budget``.
    A simulated step that raises the cost is still executed and flagged.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    cost = compute_cost(state).cost
    trace = PlanTrace(initial_cost=cost)
    cur = state
    while True:
        if cost <= _PROGRESS:
            trace.status = "sorted"
            break
        if len(trace.steps) >= budget:
            trace.status = "budget"
            break
        t0 = time.perf_counter()
        node = planner.search(cur)
        wall = time.perf_counter() - t0
        if node is None:
            trace.status = "stuck"
            break
        step = node.first
        trace.steps.append(StepRecord(step.action, cost, step.cost, step.transit, wall, step.cost > cost))
        cur, cost = step.state, step.cost
    trace.final_state = cur
    trace.final_cost = cost
    return trace
