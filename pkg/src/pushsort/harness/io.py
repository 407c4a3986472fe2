"""Versioned JSON files for scenarios, traces and benchmark tables.

Floats are written with ``repr`` precision and keys are sorted, so equal
inputs always give identical bytes. Timing never enters these files; it goes
to a ``.timing.json`` sidecar instead.
"""
from __future__ import annotations

import json
import math
import os
from typing import Any, Optional

from ..actions import Action, GraspAction, PushAction
from ..geometry import ConvexPolygon, Direction
from ..high_level import PlanTrace
from ..reachability import ReachabilityMap, map_from_dict
from ..scene import SceneObject, SceneState, TargetRegion
from .scenario import Scenario, ScenarioSpec

SCENARIO_FORMAT = "pushsort-scenario/1"
TRACE_FORMAT = "pushsort-trace/1"
BENCH_FORMAT = "pushsort-bench/1"
UNITS = "m"


class FormatError(ValueError):
    pass


def _num(x: float) -> Any:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def _unnum(x: Any) -> float:
    return float(x)


def dumps(data: dict) -> str:
    return json.dumps(data, sort_keys=True, indent=1, allow_nan=False) + "\n"


def write_json(path: str, data: dict) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8", newline="\n") as f:
        f.write(dumps(data))
    os.replace(tmp, path)


def read_json(path: str, fmt: str) -> dict:
    with open(path, encoding="utf-8") as f:
        data = json.load(f)
    if data.get("format") != fmt:
        raise FormatError(f"{path}: expected format {fmt!r}, found {data.get('format')!r}")
    if data.get("units", UNITS) != UNITS:
        raise FormatError(f"{path}: unsupported units {data.get('units')!r}")
    return data


# ------------------------------------------------------------------ state

def state_to_dict(state: SceneState) -> dict:
    return {
        "gripper": [_num(v) for v in state.gripper_pos],
        "num_categories": state.num_categories,
        "objects": [{"label": o.label, "center": [_num(v) for v in o.center],
                     "vertices": [[_num(x), _num(y)] for x, y in o.polygon.vertices.tolist()]}
                    for o in state.objects],
        "regions": [{"capacities": list(r.capacities),
                     "vertices": [[_num(x), _num(y)] for x, y in r.polygon.vertices.tolist()]}
                    for r in state.regions],
    }


def state_from_dict(d: dict) -> SceneState:
    objs = [SceneObject.from_polygon(ConvexPolygon(o["vertices"]), o["label"], o["center"])
            for o in d["objects"]]
    regions = [TargetRegion(ConvexPolygon(r["vertices"]), tuple(r["capacities"])) for r in d["regions"]]
    return SceneState(tuple(objs), tuple(regions), tuple(d["gripper"]), int(d["num_categories"]))


def scenario_to_dict(sc: Scenario) -> dict:
    return {
        "format": SCENARIO_FORMAT,
        "units": UNITS,
        "spec": sc.spec.to_dict(),
        "workspace": [_num(v) for v in sc.workspace],
        "designated": None if sc.designated is None else list(sc.designated),
        "reachability": sc.reach_map.to_dict(),
        "state": state_to_dict(sc.state),
    }


def scenario_from_dict(d: dict) -> Scenario:
    designated = d.get("designated")
    return Scenario(ScenarioSpec.from_dict(d["spec"]), state_from_dict(d["state"]),
                    map_from_dict(d["reachability"]), tuple(d["workspace"]),
                    None if designated is None else tuple(designated))


def save_scenario(path: str, sc: Scenario) -> None:
    write_json(path, scenario_to_dict(sc))


def load_scenario(path: str) -> Scenario:
    return scenario_from_dict(read_json(path, SCENARIO_FORMAT))


# ---------------------------------------------------------------- actions

def action_to_dict(a: Action) -> dict:
    if isinstance(a, GraspAction):
        return {"kind": "grasp", "object": a.object_index, "placement": [_num(v) for v in a.placement],
                "region": a.region, "predicted_cost": _num(a.predicted_cost),
                "grid_index": list(a.grid_index), "to_buffer": a.to_buffer, "pseudo_buffer": a.pseudo_buffer}
    if isinstance(a, PushAction):
        return {"kind": "push", "direction_index": a.direction_index,
                "direction": [_num(a.direction.x), _num(a.direction.y)],
                "alpha": _num(a.alpha), "beta": _num(a.beta), "distance": _num(a.distance),
                "affected": list(a.affected),
                "predicted_displacements": [_num(v) for v in a.predicted_displacements],
                "predicted_cost": _num(a.predicted_cost), "slot_index": list(a.slot_index)}
    raise TypeError(f"not an action: {a!r}")


def action_from_dict(d: dict) -> Action:
    if d["kind"] == "grasp":
        return GraspAction(int(d["object"]), tuple(d["placement"]), int(d["region"]),
                           _unnum(d["predicted_cost"]), tuple(d["grid_index"]),
                           bool(d["to_buffer"]), bool(d["pseudo_buffer"]))
    if d["kind"] == "push":
        return PushAction(int(d["direction_index"]), Direction(*d["direction"]), float(d["alpha"]),
                          float(d["beta"]), float(d["distance"]), tuple(d["affected"]),
                          tuple(float(v) for v in d["predicted_displacements"]),
                          _unnum(d["predicted_cost"]), tuple(d["slot_index"]))
    raise FormatError(f"unknown action kind {d['kind']!r}")


# ------------------------------------------------------------------ trace

def trace_to_dict(trace: PlanTrace, scenario: Optional[dict] = None, config: Optional[dict] = None) -> dict:
    return {
        "format": TRACE_FORMAT,
        "units": UNITS,
        "scenario": scenario,
        "config": config,
        "status": trace.status,
        "initial_cost": _num(trace.initial_cost),
        "final_cost": _num(trace.final_cost),
        "total_transit": _num(trace.total_transit),
        "grasps": trace.n_grasps,
        "pushes": trace.n_pushes,
        "steps": [{"action": action_to_dict(s.action), "cost_before": _num(s.cost_before),
                   "cost_after": _num(s.cost_after), "transit": _num(s.transit), "increased": s.increased}
                  for s in trace.steps],
        "final_state": None if trace.final_state is None else state_to_dict(trace.final_state),
    }


def timing_path(path: str) -> str:
    return f"{path}.timing.json"


def write_timing(path: str, wall_times: list[float]) -> None:
    write_json(timing_path(path), {"format": "pushsort-timing/1", "units": "s",
                                   "wall_time": [float(t) for t in wall_times]})


def load_trace(path: str) -> dict:
    return read_json(path, TRACE_FORMAT)
