import numpy as np
import pytest

from pushsort.actions import GraspAction, PushAction
from pushsort.errors import InvalidActionError
from pushsort.geometry import Direction, polygons_overlap
from pushsort.push_planner import Pusher
from pushsort.simulator import SimConfig, simulate, step_push

from conftest import make_state

EAST = Direction(1.0, 0.0)
REGION = [(2.0, -0.5, 2.5, 0.5)]


def grasp(i, p):
    return GraspAction(object_index=i, placement=p, region=0, predicted_cost=0.0)


def push(alpha, beta, distance, d=EAST):
    return PushAction(direction_index=0, direction=d, alpha=alpha, beta=beta, distance=distance)


def test_grasp_teleports_one_object():
    st = make_state([(0.0, 0.0), (0.5, 0.0)], REGION)
    out = simulate(st, grasp(0, (1.0, 1.0)))
    assert out.objects[0].center == (1.0, 1.0)
    assert out.objects[1] is st.objects[1]
    assert out.gripper_pos == (1.0, 1.0)


def test_grasp_into_occupied_spot_is_rejected():
    st = make_state([(0.0, 0.0), (0.5, 0.0)], REGION)
    with pytest.raises(InvalidActionError):
        simulate(st, grasp(0, (0.52, 0.0)))
    with pytest.raises(InvalidActionError):
        simulate(st, grasp(7, (1.0, 1.0)))
    with pytest.raises(InvalidActionError):
        simulate(st, push(-0.1, 0.0, -1.0))


def test_lone_box_moves_by_travel_past_contact():
    st = make_state([(0.0, 0.0)], REGION)
    # face starts 0.1 behind the box
    out = simulate(st, push(-0.135, 0.0, 0.4))
    assert out.objects[0].center == pytest.approx((0.3, 0.0), abs=1e-9)
    assert out.gripper_pos == pytest.approx((0.265, 0.0))


def test_chain_closes_gaps_in_order():
    st = make_state([(0.0, 0.0), (0.07, 0.0), (0.16, 0.0)], REGION)
    out = simulate(st, push(-0.035, 0.0, 0.2))
    c = out.centers[:, 0]
    assert c == pytest.approx([0.2, 0.25, 0.3], abs=1e-9)
    assert out.centers[:, 1] == pytest.approx([0.0, 0.0, 0.0], abs=1e-12)


def test_push_that_misses_leaves_state_unchanged():
    st = make_state([(0.0, 0.0), (0.3, 0.3)], REGION)
    out = simulate(st, push(-0.5, -0.4, 0.6))
    for a, b in zip(out.objects, st.objects):
        assert a is b


def test_flush_box_advances_with_a_single_step():
    st = make_state([(0.0, 0.0)], REGION)
    out = step_push(st, (-0.035, 0.0), 0.002, EAST)
    assert out.objects[0].center == pytest.approx((0.002, 0.0), abs=1e-9)
    with pytest.raises(ValueError):
        step_push(st, (-0.035, 0.0), 0.01, EAST)


def test_off_center_contact_resolves_without_overlap():
    # only half the pusher face meets the box
    st = make_state([(0.0, 0.05)], REGION)
    out = simulate(st, push(-0.035, 0.0, 0.1))
    assert out.objects[0].center[0] == pytest.approx(0.1, abs=1e-6)
    pusher = Pusher().polygon((0.065, 0.0), EAST)
    assert not polygons_overlap(pusher, out.objects[0].polygon, 1e-6)


def test_untouched_objects_are_bit_identical():
    st = make_state([(0.0, 0.0), (0.07, 0.0), (0.0, 0.5), (1.0, -0.3)], REGION)
    out = simulate(st, push(-0.035, 0.0, 0.3))
    assert out.objects[2] is st.objects[2] and out.objects[3] is st.objects[3]
    assert out.objects[2].polygon.vertices.tobytes() == st.objects[2].polygon.vertices.tobytes()


def test_random_pushes_never_leave_penetration():
    rng = np.random.default_rng(50)
    for _ in range(25):
        pts = []
        while len(pts) < 6:
            p = rng.uniform(0.0, 0.4, 2)
            if all(max(abs(p[0] - q[0]), abs(p[1] - q[1])) > 0.055 for q in pts):
                pts.append(tuple(p))
        st = make_state(pts, REGION)
        d = Direction.from_angle(rng.uniform(0, 2 * np.pi))
        c = np.mean(pts, axis=0)
        alpha = float(c @ d.vector) - 0.45
        beta = float(c @ d.perp) + rng.uniform(-0.1, 0.1)
        out = simulate(st, PushAction(0, d, alpha, beta, 0.5))
        objs = out.objects
        for i in range(len(objs)):
            for j in range(i + 1, len(objs)):
                assert not polygons_overlap(objs[i].polygon, objs[j].polygon, 2e-6)
            assert not polygons_overlap(Pusher().polygon(out.gripper_pos, d), objs[i].polygon, 2e-6)


def test_sim_config_validation():
    with pytest.raises(ValueError):
        SimConfig(increment=0.0)
    with pytest.raises(ValueError):
        SimConfig(iterations=0)
