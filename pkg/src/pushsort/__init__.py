"""Push and grasp planning for large-scale planar object sorting."""
from .actions import GLOBAL, GraspAction, PushAction, Target
from .assignment import Assignment, compute_cost, costs_with_fixed_object, remove_and_resolve
from .errors import (DensityError, InfeasibleTaskError, InvalidActionError, InvalidDirectionError,
                     InvalidPolygonError, InvalidStateError, PushSortError, SimulationDivergenceError,
                     UnreachableError)
from .geometry import ConvexPolygon, Direction, evenly_spaced_directions
from .grasp_planner import build_placement_grid, find_buffer, plan_grasp, plan_grasps
from .high_level import FULL, GREEDY, Planner, PlannerConfig, PlanTrace, j_rate, plan_next_action, solve_task, transit_cost
from .push_planner import Pusher, build_cost, enumerate_slots, minimize_piecewise, plan_push, plan_pushes
from .reachability import ConvexReachabilityMap, GridReachabilityMap, ReachabilityMap
from .scene import SceneObject, SceneState, TargetRegion, validate_state
from .simulator import SimConfig, simulate

__version__ = "0.1.0"
