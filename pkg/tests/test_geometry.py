import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pushsort.errors import InvalidDirectionError, InvalidPolygonError
from pushsort.geometry import (ConvexPolygon, Direction, Feature, ball_in_polygon, closest_feature,
                               dist_point_polygon, dist_points_polygon, evenly_spaced_directions,
                               feature_segments, penetration, polygon_distance, polygons_overlap,
                               raycast, squared_distance_quadratic, supports, translation_gap)

from conftest import random_convex


def test_polygon_rejects_bad_input():
    with pytest.raises(InvalidPolygonError):
        ConvexPolygon([(0, 0), (1, 0)])
    with pytest.raises(InvalidPolygonError):
        ConvexPolygon([(0, 0), (0, 1), (1, 0)])  # clockwise
    with pytest.raises(InvalidPolygonError):
        ConvexPolygon([(0, 0), (1, 0), (2, 0), (1, 1)])  # collinear
    with pytest.raises(InvalidPolygonError):
        ConvexPolygon([(0, 0), (1, 0), (1, 0), (0, 1)])


def test_direction_unit_and_perp():
    d = Direction(1.0, 0.0)
    assert np.allclose(d.perp, (0.0, 1.0))
    with pytest.raises(InvalidDirectionError):
        Direction(1.0, 1.0)
    dirs = evenly_spaced_directions(8)
    assert len(dirs) == 8 and abs(dirs[2].x) < 1e-15 and dirs[2].y == 1.0


@pytest.mark.parametrize("p, want", [((0.5, 0.5), 0.0), ((2.0, 0.5), 1.0), ((2.0, 2.0), math.sqrt(2))])
def test_dist_point_polygon_examples(unit_square, p, want):
    assert dist_point_polygon(p, unit_square) == pytest.approx(want, abs=1e-12)


def _sampled_boundary_distance(p, poly):
    # coarse scan of every edge, then a fine scan around the best coarse sample
    best = math.inf
    v = poly.vertices
    for a, b in zip(v, np.roll(v, -1, axis=0)):
        t = np.linspace(0, 1, 401)
        d = np.hypot(*(a + t[:, None] * (b - a) - p).T)
        k = int(np.argmin(d))
        t = np.linspace(t[max(k - 1, 0)], t[min(k + 1, 400)], 2001)
        best = min(best, np.hypot(*(a + t[:, None] * (b - a) - p).T).min())
    return best


def test_dist_point_polygon_matches_boundary_sampling():
    rng = np.random.default_rng(1)
    for _ in range(1000):
        poly = random_convex(rng)
        p = rng.uniform(-2, 2, 2)
        brute = 0.0 if poly.contains(p) else _sampled_boundary_distance(p, poly)
        assert abs(dist_point_polygon(p, poly) - brute) < 1e-6
        assert dist_points_polygon(p[None], poly)[0] == pytest.approx(dist_point_polygon(p, poly), abs=1e-12)


def test_supports_examples(unit_square):
    assert supports(unit_square, (1.0, 0.0)) == (0.0, 1.0)
    lo, hi = supports(unit_square, Direction.from_angle(math.pi / 4))
    assert lo == pytest.approx(0.0) and hi == pytest.approx(math.sqrt(2))
    with pytest.raises(InvalidDirectionError):
        supports(unit_square, (1.0, 1.0))


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10_000), st.floats(0, 2 * math.pi))
def test_supports_antisymmetry(seed, theta):
    poly = random_convex(np.random.default_rng(seed))
    d = Direction.from_angle(theta)
    assert supports(poly, d)[0] == pytest.approx(-supports(poly, -d)[1], abs=1e-12)


def test_raycast_examples(unit_square):
    assert raycast((-1.0, 0.5), (1.0, 0.0), unit_square) == pytest.approx(1.0, abs=1e-8)
    assert raycast((-1.0, 2.0), (1.0, 0.0), unit_square) is None
    for theta in np.linspace(0, 2 * np.pi, 7):
        assert raycast((0.5, 0.5), Direction.from_angle(theta), unit_square) == 0.0


def test_raycast_monotone_under_shrinking():
    rng = np.random.default_rng(2)
    for _ in range(300):
        poly = random_convex(rng)
        o = rng.uniform(-3, 3, 2)
        d = Direction.from_angle(rng.uniform(0, 2 * np.pi))
        small = ConvexPolygon(poly.centroid + 0.7 * (poly.vertices - poly.centroid))
        t_big, t_small = raycast(o, d, poly), raycast(o, d, small)
        if t_small is not None:
            assert t_big is not None and t_big <= t_small + 1e-9


def test_feature_segments_examples(unit_square):
    segs = feature_segments((2.0, 0.5), (-1.0, 0.0), 1.0, unit_square)
    assert len(segs) == 1 and segs[0].feature.kind == "edge"
    segs = feature_segments((2.0, 2.0), (-1.0, 0.0), 2.0, unit_square)
    assert [s.feature.kind for s in segs] == ["vertex", "edge"]
    assert segs[0].hi == pytest.approx(1.0)
    assert np.allclose(unit_square.vertices[segs[0].feature.index], (1.0, 1.0))
    segs = feature_segments((0.2, 0.2), (1.0, 0.0), 0.5, unit_square)
    assert len(segs) == 1 and segs[0].feature == Feature("interior")


def test_feature_segments_match_dense_sampling_and_are_quadratic():
    rng = np.random.default_rng(3)
    for _ in range(200):
        poly = random_convex(rng)
        s0 = rng.uniform(-3, 3, 2)
        d = Direction.from_angle(rng.uniform(0, 2 * np.pi))
        L = float(rng.uniform(0.5, 6))
        segs = feature_segments(s0, d, L, poly)
        assert segs[0].lo == 0.0 and segs[-1].hi == L
        for a, b in zip(segs, segs[1:]):
            assert a.hi == b.lo and a.feature != b.feature
        for seg in segs:
            qa, qb, qc = squared_distance_quadratic(s0, d, seg.feature, poly)
            for s in np.linspace(seg.lo, seg.hi, 12)[1:-1]:
                p = s0 + s * d.vector
                assert abs(qa * s * s + qb * s + qc - dist_point_polygon(p, poly) ** 2) < 1e-9
                # closest feature at interior samples agrees except on exact ties
                f = closest_feature(p, poly)
                if f != seg.feature:
                    assert abs(dist_point_polygon(p, poly) ** 2 - (qa * s * s + qb * s + qc)) < 1e-9


def test_ball_in_polygon_examples(unit_square):
    assert ball_in_polygon((0.5, 0.5), 0.4, unit_square)
    assert not ball_in_polygon((0.5, 0.5), 0.6, unit_square)
    assert ball_in_polygon((0.0, 0.5), 0.0, unit_square)


def test_translation_gap_cases():
    a = ConvexPolygon.box(0, 0, 1, 1)
    b = ConvexPolygon.box(2, 0.2, 3, 0.8)
    assert translation_gap(a, b, (1.0, 0.0)) == pytest.approx(1.0, abs=1e-8)
    assert translation_gap(a, b, (-1.0, 0.0)) == math.inf
    touching = ConvexPolygon.box(1, 0, 2, 1)
    assert translation_gap(a, touching, (1.0, 0.0)) == pytest.approx(0.0, abs=1e-8)
    assert translation_gap(a, touching, (0.0, 1.0)) == math.inf  # slides past
    above = ConvexPolygon.box(0, 2, 1, 3)
    assert translation_gap(a, above, (1.0, 0.0)) == math.inf


def test_translation_gap_against_stepping():
    rng = np.random.default_rng(4)
    for _ in range(200):
        a = random_convex(rng, scale=0.3)
        b = random_convex(rng, center=rng.uniform(-1, 1, 2), scale=0.3)
        if polygons_overlap(a, b):
            continue
        d = Direction.from_angle(rng.uniform(0, 2 * np.pi))
        g = translation_gap(a, b, d)
        ts = np.linspace(0, 3, 3001)
        hit = [t for t in ts if polygons_overlap(a.translated(t * d.vector), b, 1e-7)]
        if hit:
            assert abs(g - hit[0]) <= 1e-3 + 1e-6
        else:
            assert g > 3 - 1e-3


def test_polygon_distance_and_penetration():
    a = ConvexPolygon.box(0, 0, 1, 1)
    assert polygon_distance(a, ConvexPolygon.box(2, 0, 3, 1)) == pytest.approx(1.0)
    depth, n = penetration(a, ConvexPolygon.box(0.9, 0.2, 1.9, 0.8))
    assert depth == pytest.approx(0.1) and np.allclose(n, (1.0, 0.0))
    assert penetration(a, ConvexPolygon.box(1.5, 0, 2, 1)) is None
