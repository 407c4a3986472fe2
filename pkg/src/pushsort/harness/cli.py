"""Command line entry point: ``gen``, ``plan``, ``solve``, ``bench``, ``render``.

Exit codes: 0 success, 2 infeasible task, 3 budget exhausted, 4 I/O error.
Everything written to stdout or output files is deterministic; timings go to
stderr or to ``<out>.timing.json``.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Optional, Sequence

from ..errors import DensityError, InfeasibleTaskError
from ..high_level import GREEDY, FULL, Planner, PlannerConfig, solve_task
from ..push_planner import Pusher
from . import io
from .bench import VARIANTS, PUSH_H1, expand_config, run_benchmark, summarize, variant_config
from .render import render_snapshot
from .scenario import ScenarioSpec, generate_scenario

EXIT_OK = 0
EXIT_INFEASIBLE = 2
EXIT_BUDGET = 3
EXIT_IO = 4


class _IOFailure(Exception):
    pass


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.split(",") if v.strip())


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(",") if v.strip())


def _emit(text: str, out: Optional[str]) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
    except OSError as e:
        raise _IOFailure(str(e)) from e


def _load_scenario(path: str):
    try:
        return io.load_scenario(path)
    except (OSError, ValueError, KeyError) as e:
        raise _IOFailure(f"cannot read scenario {path}: {e}") from e


def _config(args, sc) -> PlannerConfig:
    base = variant_config(getattr(args, "variant", PUSH_H1), sc.spec.pusher_width, args.mode)
    horizon = getattr(args, "horizon", None)
    if horizon is not None:
        base = PlannerConfig(horizon=horizon, mode=base.mode, use_grasp=base.use_grasp,
                             use_push=base.use_push, pusher=base.pusher)
    return base


def cmd_gen(args) -> int:
    spec = ScenarioSpec(seed=args.seed, n=args.n, t=args.t, c=args.c,
                        caps=_ints(args.caps) if args.caps else None,
                        weights=_floats(args.weights) if args.weights else None,
                        map=args.map, pusher_width=args.pusher_width, spawn_depth=args.spawn_depth)
    try:
        sc = generate_scenario(spec)
    except InfeasibleTaskError as e:
        print(f"infeasible: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    _emit(io.dumps(io.scenario_to_dict(sc)), args.out)
    return EXIT_OK


def cmd_plan(args) -> int:
    sc = _load_scenario(args.scenario)
    planner = Planner(sc.reach_map, _config(args, sc))
    t0 = time.perf_counter()
    node = planner.search(sc.state)
    print(f"decision time {time.perf_counter() - t0:.3f} s, {planner.nodes_visited} nodes", file=sys.stderr)
    if node is None:
        _emit(io.dumps({"action": None}), args.out)
        return EXIT_OK
    c = node.first
    _emit(io.dumps({"action": io.action_to_dict(c.action), "cost_after": io._num(c.cost),
                    "transit": io._num(c.transit)}), args.out)
    return EXIT_OK


def cmd_solve(args) -> int:
    sc = _load_scenario(args.scenario)
    cfg = _config(args, sc)
    trace = solve_task(sc.state, Planner(sc.reach_map, cfg), args.budget)
    meta = {"variant": args.variant, "mode": cfg.mode, "horizon": cfg.horizon, "budget": args.budget}
    _emit(io.dumps(io.trace_to_dict(trace, io.scenario_to_dict(sc), meta)), args.out)
    walls = [s.wall_time for s in trace.steps]
    if args.out not in (None, "-"):
        io.write_timing(args.out, walls)
    print(f"{trace.status}: {len(trace.steps)} actions, total decision time {sum(walls):.3f} s",
          file=sys.stderr)
    if trace.status == "budget":
        return EXIT_BUDGET
    if trace.status == "stuck":
        return EXIT_INFEASIBLE
    return EXIT_OK


def cmd_bench(args) -> int:
    try:
        with open(args.config, encoding="utf-8") as f:
            cfg = json.load(f)
    except (OSError, ValueError) as e:
        raise _IOFailure(f"cannot read bench config {args.config}: {e}") from e
    specs = expand_config(cfg)
    variants = cfg.get("variants", list(VARIANTS))
    budget = int(cfg.get("budget", 1000))
    rows, walls = run_benchmark(specs, variants, budget, args.jobs, cfg.get("mode", GREEDY))
    table = {
        "format": io.BENCH_FORMAT,
        "units": io.UNITS,
        "config": cfg,
        "rows": [{k: io._num(v) if isinstance(v, float) else v for k, v in vars(r).items()} for r in rows],
        "summary": summarize(rows),
    }
    _emit(io.dumps(table), args.out)
    if args.out not in (None, "-"):
        io.write_json(io.timing_path(args.out), {"format": "pushsort-timing/1", "units": "s",
                                                 "wall_time": walls})
    incomplete = [r for r in rows if not r.complete]
    for r in incomplete:
        print(f"incomplete run: scenario {r.scenario} {r.variant} ({r.status})", file=sys.stderr)
    return EXIT_BUDGET if any(r.status == "budget" for r in incomplete) else EXIT_OK


def cmd_render(args) -> int:
    if bool(args.scenario) == bool(args.trace):
        print("render needs exactly one of --scenario or --trace", file=sys.stderr)
        return EXIT_IO
    if args.scenario:
        sc = _load_scenario(args.scenario)
        state, actions, ws, width = sc.state, [], sc.workspace, sc.spec.pusher_width
    else:
        try:
            tr = io.load_trace(args.trace)
        except (OSError, ValueError) as e:
            raise _IOFailure(f"cannot read trace {args.trace}: {e}") from e
        sc = io.scenario_from_dict(tr["scenario"])
        ws, width = sc.workspace, sc.spec.pusher_width
        steps = [io.action_from_dict(s["action"]) for s in tr["steps"]]
        if args.step is None:
            state, actions = io.state_from_dict(tr["final_state"]), steps[-1:]
        else:
            # replay to the requested step so the overlay matches the scene it acts on
            from ..simulator import simulate
            if not 0 <= args.step < len(steps):
                print(f"step {args.step} out of range", file=sys.stderr)
                return EXIT_IO
            state = sc.state
            for a in steps[:args.step]:
                state = simulate(state, a, pusher=Pusher(width=width))
            actions = [steps[args.step]]
    try:
        render_snapshot(state, args.out, actions, ws, Pusher(width=width))
    except OSError as e:
        raise _IOFailure(str(e)) from e
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pushsort", description="Push and grasp object sorting planner")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a scenario file")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--n", type=int, default=50)
    g.add_argument("--t", type=int, default=2)
    g.add_argument("--c", type=int, default=1)
    g.add_argument("--caps", help="per-category capacity, comma separated")
    g.add_argument("--weights", help="category proportions, comma separated")
    g.add_argument("--pusher-width", type=float, default=0.08)
    g.add_argument("--map", default="full", help="full | inset:<m> | polygon:x,y;x,y;...")
    g.add_argument("--spawn-depth", type=float, default=0.6)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    for name, fn, text in (("plan", cmd_plan, "choose one action"), ("solve", cmd_solve, "run to completion")):
        s = sub.add_parser(name, help=text)
        s.add_argument("--scenario", required=True)
        s.add_argument("--variant", choices=VARIANTS, default=PUSH_H1)
        s.add_argument("--horizon", type=int, help="overrides the variant's horizon")
        s.add_argument("--mode", choices=(GREEDY, FULL), default=GREEDY)
        s.add_argument("--out")
        if name == "solve":
            s.add_argument("--budget", type=int, default=1000)
        s.set_defaults(func=fn)

    b = sub.add_parser("bench", help="run a benchmark config")
    b.add_argument("config")
    b.add_argument("--out")
    b.add_argument("--jobs", type=int, default=1)
    b.set_defaults(func=cmd_bench)

    r = sub.add_parser("render", help="write an SVG snapshot")
    r.add_argument("--scenario")
    r.add_argument("--trace")
    r.add_argument("--step", type=int, help="trace step to show (default: final state)")
    r.add_argument("--out", required=True)
    r.set_defaults(func=cmd_render)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _IOFailure as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    except (InfeasibleTaskError, DensityError) as e:
        print(f"infeasible: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
