"""Benchmark orchestration: scenario sets crossed with planner variants.

Runs are independent and may execute in worker processes; results are always
collected in (scenario, variant) order so the table does not depend on the
number of workers.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Iterable, Optional

import numpy as np

from ..high_level import PlannerConfig, Planner, PlanTrace, solve_task
from ..push_planner import Pusher
from .scenario import ScenarioSpec, fig5_spec, fig6_spec, generate_scenario

GRASP_ONLY = "grasp-only"
PUSH_H1 = "push+grasp-h1"
PUSH_H3 = "push+grasp-h3"
VARIANTS = (GRASP_ONLY, PUSH_H1, PUSH_H3)


def variant_config(variant: str, pusher_width: float = 0.08, mode: str = "greedy") -> PlannerConfig:
    pusher = Pusher(width=pusher_width)
    if variant == GRASP_ONLY:
        return PlannerConfig(horizon=1, mode=mode, use_push=False, pusher=pusher)
    if variant == PUSH_H1:
        return PlannerConfig(horizon=1, mode=mode, pusher=pusher)
    if variant == PUSH_H3:
        return PlannerConfig(horizon=3, mode=mode, pusher=pusher)
    raise ValueError(f"unknown variant {variant!r}; expected one of {', '.join(VARIANTS)}")


@dataclass
class RunMetrics:
    scenario: int
    seed: int
    variant: str
    n: int
    t: int
    c: int
    actions: int
    grasps: int
    pushes: int
    transit: float
    initial_cost: float
    final_cost: float
    status: str
    increased_steps: int
    action_speedup: Optional[float] = None
    transit_speedup: Optional[float] = None

    @property
    def complete(self) -> bool:
        return self.status == "sorted"


def run_variant(spec: ScenarioSpec, variant: str, budget: int = 1000,
                mode: str = "greedy") -> tuple[PlanTrace, list[float]]:
    sc = generate_scenario(spec)
    planner = Planner(sc.reach_map, variant_config(variant, spec.pusher_width, mode))
    trace = solve_task(sc.state, planner, budget)
    return trace, [s.wall_time for s in trace.steps]


def _job(args: tuple) -> tuple[dict, list[float]]:
    idx, spec_dict, variant, budget, mode = args
    spec = ScenarioSpec.from_dict(spec_dict)
    trace, walls = run_variant(spec, variant, budget, mode)
    m = RunMetrics(idx, spec.seed, variant, spec.n, spec.t, spec.c, len(trace.steps), trace.n_grasps,
                   trace.n_pushes, trace.total_transit, trace.initial_cost, trace.final_cost, trace.status,
                   sum(s.increased for s in trace.steps))
    return asdict(m), walls


def _ratio(base: float, other: float) -> Optional[float]:
    if other > 0:
        return base / other
    return None if base > 0 else 1.0


def attach_ratios(rows: list[RunMetrics], baseline: str = GRASP_ONLY) -> None:
    """Speedup of every row against the baseline run on the same scenario."""
    base = {r.scenario: r for r in rows if r.variant == baseline}
    for r in rows:
        b = base.get(r.scenario)
        if b is None:
            continue
        r.action_speedup = _ratio(b.actions, r.actions)
        r.transit_speedup = _ratio(b.transit, r.transit)


def expand_config(cfg: dict) -> list[ScenarioSpec]:
    """Scenario list from a bench config: explicit ``scenarios`` or a ``preset``.

    Presets: ``fig5`` (``n``, ``labeled``), ``fig6`` (per-seed ``n``, ``t``
    drawn from ``n_range`` and ``t_range`` with a generator seeded by ``seed``).
    """
    seeds = list(cfg.get("seeds", range(int(cfg.get("count", 1)))))
    preset = cfg.get("preset")
    if "scenarios" in cfg:
        return [ScenarioSpec.from_dict(d) for d in cfg["scenarios"]]
    if preset == "fig5":
        return [fig5_spec(s, int(cfg.get("n", 50)), bool(cfg.get("labeled", False))) for s in seeds]
    if preset == "fig6":
        rng = np.random.default_rng(int(cfg.get("seed", 0)))
        nlo, nhi = cfg.get("n_range", (50, 200))
        tlo, thi = cfg.get("t_range", (2, 4))
        out = []
        for s in seeds:
            n = int(rng.integers(nlo, nhi + 1))
            t = int(rng.integers(tlo, thi + 1))
            out.append(fig6_spec(s, n, t))
        return out
    raise ValueError("bench config needs 'scenarios' or a known 'preset'")


def run_benchmark(specs: Iterable[ScenarioSpec], variants: Iterable[str] = VARIANTS, budget: int = 1000,
                  jobs: int = 1, mode: str = "greedy") -> tuple[list[RunMetrics], list[list[float]]]:
    """Metrics rows in (scenario, variant) order plus per-run decision wall times."""
    variants = list(variants)
    for v in variants:
        variant_config(v)
    tasks = [(i, s.to_dict(), v, budget, mode) for i, s in enumerate(specs) for v in variants]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_job, tasks))
    else:
        results = [_job(t) for t in tasks]
    rows = [RunMetrics(**d) for d, _ in results]
    if GRASP_ONLY in variants:
        attach_ratios(rows)
    return rows, [w for _, w in results]


def summarize(rows: list[RunMetrics]) -> dict:
    """Per-variant totals and geometric-mean speedups."""
    out = {}
    for v in sorted({r.variant for r in rows}):
        rs = [r for r in rows if r.variant == v]
        sp = [r.action_speedup for r in rs if r.action_speedup]
        tp = [r.transit_speedup for r in rs if r.transit_speedup]
        out[v] = {
            "runs": len(rs),
            "incomplete": sum(not r.complete for r in rs),
            "actions": sum(r.actions for r in rs),
            "transit": sum(r.transit for r in rs),
            "action_speedup_gmean": math.exp(sum(map(math.log, sp)) / len(sp)) if sp else None,
            "transit_speedup_gmean": math.exp(sum(map(math.log, tp)) / len(tp)) if tp else None,
        }
    return out
