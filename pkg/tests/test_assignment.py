import numpy as np
import pytest

from pushsort.assignment import _make, compute_cost, costs_with_fixed_object, remove_and_resolve, solve_transportation
from pushsort.errors import InfeasibleTaskError
from pushsort.scene import SceneState

from conftest import make_state
from oracles import brute_assignment


def _random_instance(rng, n_max=7, t_max=3):
    n = int(rng.integers(1, n_max + 1))
    T = int(rng.integers(1, t_max + 1))
    C = int(rng.integers(1, 3))
    labels = rng.integers(1, C + 1, n)
    caps = rng.integers(0, n + 1, (T, C))
    for k in range(C):
        short = (labels == k + 1).sum() - caps[:, k].sum()
        if short > 0:
            caps[rng.integers(T), k] += short
    return rng.uniform(0, 3, (n, T)), caps, labels


def test_solve_transportation_examples():
    assign, total = solve_transportation(np.array([[5.0]]), np.array([1]))
    assert total == 5.0 and assign.tolist() == [0]
    assign, total = solve_transportation(np.array([[1.0, 2.0], [2.0, 1.0]]), np.array([1, 1]))
    assert total == 2.0 and assign.tolist() == [0, 1]


def test_solve_transportation_matches_brute_force():
    rng = np.random.default_rng(10)
    for _ in range(300):
        cost, caps, labels = _random_instance(rng, 6, 3)
        assign, total = solve_transportation(cost, caps, labels)
        assert abs(total - brute_assignment(cost, caps, labels)) < 1e-9
        used = np.zeros_like(caps)
        np.add.at(used, (assign, labels - 1), 1)
        assert np.all(used <= caps)


def test_solve_transportation_infeasible():
    with pytest.raises(InfeasibleTaskError):
        solve_transportation(np.ones((3, 2)), np.array([1, 1]))


def test_compute_cost_examples():
    st = make_state([(2.0, 0.5)], [(0, 0, 1, 1)], caps=[[1]])
    assert compute_cost(st).cost == pytest.approx(1.0)
    st = make_state([(0.3, 0.3), (0.7, 0.7)], [(0, 0, 1, 1)], caps=[[2]])
    assert compute_cost(st).cost == 0.0
    # capacity forces the second object out of the nearer region
    st = make_state([(0.5, 0.5), (0.6, 0.5)], [(0, 0, 1, 1), (2, 0, 3, 1)], caps=[[1], [1]])
    assert compute_cost(st).cost == pytest.approx(1.4)


def test_compute_cost_infeasible():
    st = make_state([(0.5, 0.5), (2.0, 2.0)], [(0, 0, 1, 1)], caps=[[1]])
    with pytest.raises(InfeasibleTaskError):
        compute_cost(st)


def test_compute_cost_deterministic():
    rng = np.random.default_rng(11)
    pts = rng.uniform(0, 3, (6, 2)).tolist()
    st = make_state(pts, [(0, 0, 1, 1), (2, 2, 3, 3)], caps=[[3], [3]])
    a, b = compute_cost(st), compute_cost(st)
    assert a.regions.tobytes() == b.regions.tobytes() and a.cost == b.cost


def test_moving_closer_never_increases_cost():
    rng = np.random.default_rng(12)
    for _ in range(100):
        pts = rng.uniform(-1, 4, (5, 2))
        st = make_state(pts.tolist(), [(0, 0, 1, 1), (2, 2, 3, 3)], caps=[[3], [2]], size=0.01)
        a = compute_cost(st)
        i = int(rng.integers(5))
        j = a.regions[i]
        target = np.array(st.regions[j].polygon.centroid)
        pts2 = pts.copy()
        pts2[i] += 0.3 * (target - pts[i])
        st2 = make_state(pts2.tolist(), [(0, 0, 1, 1), (2, 2, 3, 3)], caps=[[3], [2]], size=0.01)
        assert compute_cost(st2).cost <= a.cost + 1e-12


def test_remove_and_resolve_matches_fresh_solve():
    rng = np.random.default_rng(13)
    for _ in range(300):
        cost, caps, labels = _random_instance(rng, 6, 3)
        assign, total = solve_transportation(cost, caps, labels)
        a = _make(assign, cost, labels, caps)
        i = int(rng.integers(len(labels)))
        keep = np.arange(len(labels)) != i
        r = remove_and_resolve(a, i)
        _, fresh = solve_transportation(cost[keep], caps, labels[keep])
        assert abs(r.cost - fresh) < 1e-9
        # fixed-object costs: object i placed in region k uses one slot there
        fixed = costs_with_fixed_object(a, i)
        for k in range(caps.shape[0]):
            c2 = caps.copy()
            c2[k, labels[i] - 1] -= 1
            if c2[k, labels[i] - 1] < 0:
                assert fixed[k] == np.inf
                continue
            want = brute_assignment(cost[keep], c2, labels[keep])
            assert (fixed[k] == np.inf and want == np.inf) or abs(fixed[k] - want) < 1e-9


def test_remove_only_object():
    st = make_state([(2.0, 0.5)], [(0, 0, 1, 1)], caps=[[1]])
    r = remove_and_resolve(compute_cost(st), 0)
    assert r.cost == 0.0 and r.n_objects == 0


def test_empty_scene():
    st = SceneState((), make_state([], [(0, 0, 1, 1)]).regions)
    assert compute_cost(st).cost == 0.0
