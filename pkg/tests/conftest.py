import numpy as np
import pytest

from pushsort.geometry import ConvexPolygon
from pushsort.reachability import ConvexReachabilityMap
from pushsort.scene import SceneObject, SceneState, TargetRegion


def make_state(centers, regions, caps=None, labels=None, size=0.05, gripper=(0.0, 0.0), n_cat=None):
    """Squares at ``centers``; ``regions`` are (xmin, ymin, xmax, ymax) boxes."""
    labels = [1] * len(centers) if labels is None else list(labels)
    C = n_cat or (max(labels) if labels else 1)
    if caps is None:
        caps = [[len(centers)] * C for _ in regions]
    objs = [SceneObject.square(c, size, l) for c, l in zip(centers, labels)]
    regs = [TargetRegion(ConvexPolygon.box(*b), tuple(cp)) for b, cp in zip(regions, caps)]
    return SceneState(tuple(objs), tuple(regs), gripper, C)


def box_map(xmin=-5.0, ymin=-5.0, xmax=5.0, ymax=5.0):
    return ConvexReachabilityMap(ConvexPolygon.box(xmin, ymin, xmax, ymax))


def random_convex(rng, n=None, center=(0.0, 0.0), scale=1.0):
    """Points on a random ellipse: always strictly convex, counter-clockwise."""
    n = n or int(rng.integers(3, 8))
    ang = np.sort(rng.uniform(0, 2 * np.pi, n))
    while np.min(np.diff(np.r_[ang, ang[0] + 2 * np.pi])) < 0.2:
        ang = np.sort(rng.uniform(0, 2 * np.pi, n))
    a, b = scale * rng.uniform(0.5, 1.0, 2)
    rot = rng.uniform(0, np.pi)
    pts = np.column_stack((a * np.cos(ang), b * np.sin(ang)))
    c, s = np.cos(rot), np.sin(rot)
    pts = pts @ np.array([[c, s], [-s, c]]) + np.asarray(center)
    return ConvexPolygon(pts)


@pytest.fixture
def unit_square():
    return ConvexPolygon.box(0.0, 0.0, 1.0, 1.0)


_RESULTS: dict[int, str] = {}


@pytest.fixture
def criterion():
    """``report(number, ok, detail)`` prints one line and keeps it for the terminal summary."""
    def report(number, ok, detail):
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        _RESULTS[number] = line
        print(line)
        return ok
    return report


def pytest_terminal_summary(terminalreporter):
    if _RESULTS:
        terminalreporter.write_sep("=", "acceptance criteria")
        for k in sorted(_RESULTS):
            terminalreporter.write_line(_RESULTS[k])
