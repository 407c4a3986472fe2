"""End-to-end acceptance checks; each prints one PASS/FAIL line.

Run just these with ``pytest tests/test_acceptance.py -v``; the lines are
repeated in the terminal summary.
"""
import math
import os
import subprocess
import sys
import time

import numpy as np
import pytest

from pushsort.assignment import compute_cost
from pushsort.geometry import ConvexPolygon, evenly_spaced_directions
from pushsort.grasp_planner import build_placement_grid, plan_grasp
from pushsort.harness.bench import GRASP_ONLY, PUSH_H1, run_benchmark, summarize
from pushsort.harness.scenario import ScenarioSpec, fig5_spec, fig6_spec, generate_scenario
from pushsort.high_level import Planner, PlannerConfig, solve_task
from pushsort.push_planner import Pusher, plan_push, plan_pushes, predicted_centers
from pushsort.scene import SceneObject, SceneState, TargetRegion
from pushsort.actions import GLOBAL
from pushsort.simulator import simulate

from conftest import box_map, make_state
from oracles import PushModel, brute_grasp, scene_cost

HALF = 0.025 * math.sqrt(2)


def _spread(rng, n, lo, hi, gap=0.055):
    pts = []
    while len(pts) < n:
        p = rng.uniform(lo, hi, 2)
        if all(max(abs(p[0] - q[0]), abs(p[1] - q[1])) > gap for q in pts):
            pts.append(tuple(p))
    return pts


# ------------------------------------------------------------ 1: assignment

def test_criterion_1_assignment_exact(criterion):
    rng = np.random.default_rng(1001)
    worst, spent = 0.0, 0.0
    for _ in range(500):
        n, T, C = int(rng.integers(1, 8)), int(rng.integers(1, 4)), int(rng.integers(1, 4))
        labels = rng.integers(1, C + 1, n)
        caps = rng.integers(0, n + 1, (T, C))
        for k in range(C):
            short = (labels == k + 1).sum() - caps[:, k].sum()
            if short > 0:
                caps[rng.integers(T), k] += short
        boxes = []
        for _ in range(T):
            x, y = rng.uniform(-2, 2, 2)
            w, h = rng.uniform(0.1, 1.0, 2)
            boxes.append((x, y, x + w, y + h))
        st = make_state(_spread(rng, n, -2.5, 3.0), boxes, caps=caps.tolist(), labels=labels.tolist(), n_cat=C)
        t0 = time.perf_counter()
        got = compute_cost(st).cost
        spent += time.perf_counter() - t0
        want = scene_cost(st.centers, labels.tolist(), [r.polygon for r in st.regions], caps.tolist())
        worst = max(worst, abs(got - want))
    ok = worst <= 1e-9 and spent < 10.0
    criterion(1, ok, f"500 instances, max |J - brute| = {worst:.2e}, compute_cost total {spent:.2f} s")
    assert ok


# ---------------------------------------------------------------- 2: grasp

def test_criterion_2_grasp_exact(criterion):
    rng = np.random.default_rng(1002)
    boxes = [(0.0, 0.0, 0.25, 0.2), (0.6, 0.0, 0.85, 0.2)]
    m = box_map(-0.1, -0.1, 1.0, 0.8)
    worst, checked = 0.0, 0
    while checked < 200:
        T, n, C = int(rng.integers(1, 3)), int(rng.integers(1, 6)), int(rng.integers(1, 3))
        labels = rng.integers(1, C + 1, n).tolist()
        st = make_state(_spread(rng, n, 0.0, 0.75, 0.06), boxes[:T], caps=[[n] * C] * T, labels=labels, n_cat=C)
        grid = build_placement_grid(st, m)
        offered = grid.placements()
        if len(offered) > 12:
            continue
        checked += 1
        J = compute_cost(st).cost
        pl = [(p, r, r < 0 and grid.buffer.pseudo) for _, p, r in offered]
        want = min(brute_grasp(st, pl), J)
        g = plan_grasp(st, grid, m, GLOBAL)
        got = J if g is None else g.predicted_cost
        worst = max(worst, abs(got - want))
    ok = worst <= 1e-9
    criterion(2, ok, f"200 instances, max |J_post - brute| = {worst:.2e}")
    assert ok


# ------------------------------------------------------ 3: grasp completeness

def _cyclic_scene():
    centers = [(0.5, 0.5), (-0.5, 0.5), (-0.5, -0.5), (0.5, -0.5)]
    regions, objs = [], []
    h = 2 * HALF + 1e-6
    for j, (x, y) in enumerate(centers):
        caps = [0] * 4
        caps[j] = 1
        regions.append(TargetRegion(ConvexPolygon.box(x - h, y - h, x + h, y + h), tuple(caps)))
        objs.append(SceneObject.square((x, y), 0.05, (j + 1) % 4 + 1))
    return SceneState(tuple(objs), tuple(regions), (0.0, 0.0), 4), box_map(-1, -1, 1, 1)


def _roomy_instance(rng):
    """Roomy regions along the top, objects scattered anywhere reachable (including wrong regions)."""
    T, C = int(rng.integers(1, 4)), int(rng.integers(1, 3))
    boxes = [(0.1 + 0.8 * j, 1.0, 0.6 + 0.8 * j, 1.5) for j in range(T)]
    n = int(rng.integers(1, 7))
    labels = rng.integers(1, C + 1, n)
    caps = np.zeros((T, C), dtype=int)
    for k in range(C):
        for _ in range((labels == k + 1).sum()):
            caps[rng.integers(T), k] += 1
    caps = np.minimum(caps + rng.integers(0, 2, (T, C)), 7 // C)
    for k in range(C):
        short = (labels == k + 1).sum() - caps[:, k].sum()
        if short > 0:
            return None
    st = make_state(_spread(rng, n, 0.05, 0.8 * T + 0.05, 0.06), boxes, caps=caps.tolist(), labels=labels.tolist(),
                    n_cat=C)
    return st, box_map(0.0, 0.0, 0.8 * T + 0.1, 1.6)


def _preconditions(st, m):
    if not m.reach_many(st.centers).all():
        return False
    grid = build_placement_grid(st, m)
    if grid.buffer is None or grid.buffer.pseudo:
        return False
    return all(len(grid.region_points[j]) > 9 * sum(r.capacities) for j, r in enumerate(st.regions))


def _grasp_only_solves(st, m):
    trace = solve_task(st, Planner(m, PlannerConfig(use_push=False)), budget=10 * st.n_objects + 10)
    costs = [trace.initial_cost] + [s.cost_after for s in trace.steps]
    strict = all(b < a for a, b in zip(costs, costs[1:]))
    return trace, trace.status == "sorted" and strict and len(trace.steps) <= 2 * st.n_objects


def test_criterion_3_greedy_grasp_completeness(criterion):
    rng = np.random.default_rng(1003)
    done, failures, skipped = 0, [], 0
    while done < 200:
        inst = _roomy_instance(rng)
        if inst is None or not _preconditions(*inst):
            skipped += 1
            continue
        done += 1
        trace, ok = _grasp_only_solves(*inst)
        if not ok:
            failures.append((done, trace.status, len(trace.steps)))
    st, m = _cyclic_scene()
    trace, cyc_ok = _grasp_only_solves(st, m)
    cyc_ok = cyc_ok and trace.steps[0].action.to_buffer
    ok = not failures and cyc_ok
    criterion(3, ok, f"200 instances ({skipped} rejected draws), failures {failures[:3]}, "
                     f"cyclic case {'solved via buffer' if cyc_ok else 'FAILED'} in {len(trace.steps)} grasps")
    assert ok


# ------------------------------------------------------------ 4: push optimum

@pytest.mark.slow
def test_criterion_4_push_near_optimal(criterion):
    rng = np.random.default_rng(1004)
    box = (-1.0, -1.0, 2.0, 2.0)
    m = box_map(*box)
    worst_gap, worst_model, planner_time, checked = -math.inf, 0.0, 0.0, 0
    t_all = time.perf_counter()
    while checked < 100:
        n = int(rng.integers(1, 5))
        st = make_state(_spread(rng, n, 0.0, 1.0), [(1.2, 0.3, 1.6, 0.7)], caps=[[n]])
        a = compute_cost(st)
        if a.cost <= 1e-9:
            continue
        checked += 1
        t0 = time.perf_counter()
        p = plan_push(st, m)
        planner_time += time.perf_counter() - t0
        got = a.cost if p is None else p.predicted_cost
        model = PushModel(st, a, box)
        want = model.dense_optimum()
        worst_gap = max(worst_gap, got - want)
        if p is not None:
            theta = 2 * math.pi * p.direction_index / 8
            _, val = model.evaluate(theta, p.alpha, p.beta, p.distance)
            worst_model = max(worst_model, abs(val - p.predicted_cost))
    total = time.perf_counter() - t_all
    ok = worst_gap <= 1e-3 and worst_model <= 1e-6 and planner_time < 300
    criterion(4, ok, f"100 scenes, planner - dense optimum <= {worst_gap:.2e} m, model check {worst_model:.1e}, "
                     f"planner {planner_time:.1f} s (with oracle {total:.0f} s)")
    assert ok


# --------------------------------------------------------- 5: model vs sim

def _grazes(st, p, pusher=Pusher()):
    """Does any unaffected object lie ahead in the strip swept by the pusher or the affected objects?"""
    u, w = p.direction.vector, p.direction.perp
    spans = [(p.beta - pusher.width / 2, p.beta + pusher.width / 2)]
    for i in p.affected:
        pw = st.objects[i].polygon.vertices @ w
        spans.append((pw.min(), pw.max()))
    back = p.alpha - pusher.thickness / 2
    for k, o in enumerate(st.objects):
        if k in p.affected:
            continue
        pu, pw = o.polygon.vertices @ u, o.polygon.vertices @ w
        if pu.max() > back and any(min(hi, pw.max()) - max(lo, pw.min()) > 0 for lo, hi in spans):
            return True
    return False


def test_criterion_5_model_matches_simulator(criterion):
    rng = np.random.default_rng(1005)
    axes = [evenly_spaced_directions(8)[k] for k in (0, 2, 4, 6)]
    m = box_map(-0.5, -0.5, 2.2, 1.7)
    worst, checked, rejected = 0.0, 0, 0
    while checked < 100:
        centers = []
        for row in range(int(rng.integers(1, 4))):
            y = 0.15 + 0.3 * row
            xs = np.sort(rng.uniform(0.0, 0.9, int(rng.integers(1, 5))))
            xs = xs[np.concatenate(([True], np.diff(xs) > 0.052))]
            centers += [(float(x), y) for x in xs]
        st = make_state(centers, [(1.3, 0.0, 1.9, 0.8), (0.0, 1.1, 0.8, 1.5)])
        p = plan_push(st, m, directions=axes)
        if p is None:
            continue
        if _grazes(st, p):
            rejected += 1
            continue
        checked += 1
        worst = max(worst, float(np.abs(simulate(st, p).centers - predicted_centers(st, p)).max()))
    ok = worst <= 0.004
    criterion(5, ok, f"100 aligned scenes, max center error {worst * 1000:.4f} mm (limit 4 mm); "
                     f"{rejected} pushes rejected for touching an unaffected object")
    assert ok


# ------------------------------------------------------------- 6: speedup

@pytest.mark.slow
def test_criterion_6_action_speedup(criterion):
    parts, ok = [], True
    for labeled, need in ((False, 3.0), (True, 1.2)):
        specs = [fig5_spec(s, 50, labeled) for s in range(10)]
        rows, _ = run_benchmark(specs, (GRASP_ONLY, PUSH_H1), budget=500)
        s = summarize(rows)
        g = s[PUSH_H1]["action_speedup_gmean"]
        done = all(r.complete for r in rows)
        parts.append(f"C={'N' if labeled else '1'}: {s[GRASP_ONLY]['actions']} vs {s[PUSH_H1]['actions']} "
                     f"actions, gmean {g:.2f}x (need {need}x)")
        ok = ok and done and g >= need
    criterion(6, ok, "; ".join(parts))
    assert ok


# ------------------------------------------------------------ 7: lookahead

@pytest.mark.slow
def test_criterion_7_lookahead_transit(criterion):
    rng = np.random.default_rng(1007)
    ratios = []
    for seed in range(10):
        n, t = int(rng.integers(50, 201)), int(rng.integers(2, 5))
        sc = generate_scenario(fig6_spec(seed, n, t))
        tr = [solve_task(sc.state, Planner(sc.reach_map, PlannerConfig(horizon=h))).total_transit for h in (1, 3)]
        ratios.append(tr[1] / tr[0])
    better = sum(r <= 1.0 for r in ratios)
    ok = better >= 7 and max(ratios) <= 1.1
    criterion(7, ok, f"H=3/H=1 transit ratios {[round(r, 3) for r in ratios]}, {better}/10 no worse")
    assert ok


# -------------------------------------------------------------- 8: latency

@pytest.mark.slow
def test_criterion_8_latency(criterion):
    sc = generate_scenario(fig6_spec(0, 200, 4))
    times = {}
    for h in (1, 3):
        planner = Planner(sc.reach_map, PlannerConfig(horizon=h))
        t0 = time.perf_counter()
        planner.plan_next_action(sc.state)
        times[h] = time.perf_counter() - t0
    ok = times[1] < 10.0 and times[3] - times[1] < 60.0
    criterion(8, ok, f"N=200 T=4: H=1 {times[1]:.1f} s, H=3 overhead {times[3] - times[1]:.1f} s")
    assert ok


# --------------------------------------------------------------- 9: slope

def test_criterion_9_complexity_slope(criterion):
    ns = [25, 50, 100, 200]
    times = []
    for n in ns:
        st = generate_scenario(fig6_spec(0, n, 2))
        best = math.inf
        for _ in range(2):
            t0 = time.perf_counter()
            plan_pushes(st.state, st.reach_map, [GLOBAL], pusher=Pusher())
            best = min(best, time.perf_counter() - t0)
        times.append(best)
    slope = float(np.polyfit(np.log(ns), np.log(times), 1)[0])
    ok = slope <= 3.4
    criterion(9, ok, f"push planner times {[round(t, 3) for t in times]} s, log-log slope {slope:.2f}")
    assert ok


# ---------------------------------------------------------- 10: determinism

def _cli(args, cwd):
    env = dict(os.environ, PYTHONHASHSEED="0")
    r = subprocess.run([sys.executable, "-m", "pushsort", *args], cwd=cwd, capture_output=True, env=env)
    return r.returncode, r.stdout


def _cli_files(tmp, tag, jobs):
    out = {}
    scen = os.path.join(tmp, f"scen-{tag}.json")
    trace = os.path.join(tmp, f"trace-{tag}.json")
    bench_cfg = os.path.join(tmp, "bench.json")
    with open(bench_cfg, "w") as f:
        f.write('{"preset": "fig5", "n": 8, "seeds": [0, 1], "variants": ["grasp-only", "push+grasp-h1"]}')
    runs = [
        ("gen", ["gen", "--seed", "7", "--n", "10", "--t", "2", "--c", "2", "--out", scen], scen),
        ("plan", ["plan", "--scenario", scen, "--out", os.path.join(tmp, f"plan-{tag}.json")], None),
        ("solve", ["solve", "--scenario", scen, "--out", trace], trace),
        ("render", ["render", "--trace", trace, "--out", os.path.join(tmp, f"r-{tag}.svg")], None),
        ("bench", ["bench", bench_cfg, "--jobs", str(jobs), "--out", os.path.join(tmp, f"bench-{tag}.json")], None),
    ]
    for name, args, _ in runs:
        code, stdout = _cli(args, tmp)
        path = args[args.index("--out") + 1]
        with open(path, "rb") as f:
            out[name] = (code, f.read(), stdout)
    return out


def test_criterion_10_cli_determinism(criterion, tmp_path):
    a = _cli_files(str(tmp_path), "a", 1)
    b = _cli_files(str(tmp_path), "b", 2)
    same = {k: a[k] == b[k] for k in a}
    codes = {k: a[k][0] for k in a}
    ok = all(same.values()) and all(c == 0 for c in codes.values())
    criterion(10, ok, f"byte-identical across runs (bench --jobs 1 vs 2): {same}, exit codes {codes}")
    assert ok
