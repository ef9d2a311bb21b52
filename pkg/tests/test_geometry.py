import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mdm.geometry import (
    TAU,
    CircularArc,
    NonContiguousPieces,
    Ray,
    Segment,
    clip_arc_outside_disk,
    clip_segment_outside_disk,
    directed_angle,
    dist_point_arc,
    dist_point_segment,
    normalize_angle,
    pt,
    rotate,
    turning,
)

coords = st.floats(min_value=-100, max_value=100, allow_nan=False)
angles = st.floats(min_value=-math.pi, max_value=math.pi, allow_nan=False)


def ray(angle):
    return Ray(pt(0, 0), pt(math.cos(angle), math.sin(angle)))


class TestDistPointSegment:
    def test_endpoint_projection(self):
        assert dist_point_segment(pt(0, 0), Segment(pt(1, 0), pt(2, 0))) == pytest.approx(1.0)

    def test_interior_projection(self):
        assert dist_point_segment(pt(0, 1), Segment(pt(-1, 0), pt(1, 0))) == pytest.approx(1.0)

    def test_degenerate_segment(self):
        assert dist_point_segment(pt(3, 4), Segment(pt(0, 0), pt(0, 0))) == pytest.approx(5.0)

    def test_vectorized_matches_scalar(self):
        seg = Segment(pt(0.3, -1.0), pt(2.0, 4.0))
        pts = np.array([[0, 0], [5, 5], [-3, 2], [1, 1]], dtype=float)
        vec = dist_point_segment(pts, seg)
        for p, d in zip(pts, vec):
            assert d == pytest.approx(dist_point_segment(p, seg))

    @given(coords, coords, coords, coords, coords, coords, coords, coords)
    @settings(max_examples=200)
    def test_triangle_inequality(self, px, py, qx, qy, ax, ay, bx, by):
        p, q = pt(px, py), pt(qx, qy)
        s = Segment(pt(ax, ay), pt(bx, by))
        lhs = abs(dist_point_segment(p, s) - dist_point_segment(q, s))
        assert lhs <= math.hypot(px - qx, py - qy) + 1e-12

    @given(coords, coords, coords, coords, coords, coords, angles, coords, coords)
    @settings(max_examples=200)
    def test_rigid_motion_invariance(self, px, py, ax, ay, bx, by, theta, tx, ty):
        p = pt(px, py)
        s = Segment(pt(ax, ay), pt(bx, by))
        d0 = dist_point_segment(p, s)
        shift = pt(tx, ty)
        p2 = rotate(p, theta) + shift
        s2 = Segment(rotate(s.a, theta) + shift, rotate(s.b, theta) + shift)
        assert dist_point_segment(p2, s2) == pytest.approx(d0, abs=1e-10)


class TestDistPointArc:
    def test_center_to_full_circle(self):
        a = CircularArc(pt(0, 0), 2.5, 0.0, -TAU, "cw")
        assert dist_point_arc(pt(0, 0), a) == pytest.approx(2.5)

    def test_point_on_arc(self):
        a = CircularArc(pt(0, 0), 1.0, math.pi / 2, 0.0, "cw")
        on = pt(math.cos(0.3), math.sin(0.3))
        assert dist_point_arc(on, a) == pytest.approx(0.0, abs=1e-12)

    def test_outside_full_circle(self):
        a = CircularArc(pt(0, 0), 1.0, 0.0, TAU, "ccw")
        assert dist_point_arc(pt(2, 0), a) == pytest.approx(1.0)

    def test_outside_angular_span_uses_endpoints(self):
        # quarter arc in the first quadrant, query point near the opposite side:
        # nearest endpoint is (0, 1), distance sqrt(5)
        a = CircularArc(pt(0, 0), 1.0, math.pi / 2, 0.0, "cw")
        assert dist_point_arc(pt(-2, 0), a) == pytest.approx(math.sqrt(5))


class TestDirectedAngle:
    def test_zero(self):
        assert directed_angle(ray(0.0), ray(0.0)) == pytest.approx(0.0)

    def test_clockwise_quarter_turn_positive(self):
        r1 = Ray(pt(0, 0), pt(1, 0))
        r2 = Ray(pt(0, 0), pt(0, -1))
        assert directed_angle(r1, r2) == pytest.approx(math.pi / 2)

    def test_counterclockwise_quarter_turn_negative(self):
        r1 = Ray(pt(0, 0), pt(1, 0))
        r2 = Ray(pt(0, 0), pt(0, 1))
        assert directed_angle(r1, r2) == pytest.approx(-math.pi / 2)

    @given(angles, angles)
    @settings(max_examples=200)
    def test_antisymmetric(self, a, b):
        d1 = directed_angle(ray(a), ray(b))
        d2 = directed_angle(ray(b), ray(a))
        if abs(abs(d1) - math.pi) > 1e-9:
            assert d1 == pytest.approx(-d2, abs=1e-12)

    @given(angles, angles, angles)
    @settings(max_examples=200)
    def test_additive_mod_tau(self, a, b, c):
        ab = directed_angle(ray(a), ray(b))
        bc = directed_angle(ray(b), ray(c))
        ac = directed_angle(ray(a), ray(c))
        assert normalize_angle(ab + bc - ac) == pytest.approx(0.0, abs=1e-9)

    def test_ray_direction_must_be_unit(self):
        with pytest.raises(ValueError):
            Ray(pt(0, 0), pt(1, 1))


class TestTurning:
    def test_full_clockwise_circle(self):
        a = CircularArc(pt(0, 0), 1.0, 0.0, -TAU, "cw")
        assert turning([a], closed=True) == pytest.approx(TAU)

    def test_single_segment(self):
        assert turning([Segment(pt(0, 0), pt(1, 2))]) == pytest.approx(0.0)

    def test_clockwise_square(self):
        # clockwise: up the left side is wrong; go (0,0)->(0,1)->(1,1)->(1,0)->(0,0)
        sq = [
            Segment(pt(0, 0), pt(0, 1)),
            Segment(pt(0, 1), pt(1, 1)),
            Segment(pt(1, 1), pt(1, 0)),
            Segment(pt(1, 0), pt(0, 0)),
        ]
        assert turning(sq, closed=True) == pytest.approx(TAU)
        assert turning(sq, closed=False) == pytest.approx(3 * math.pi / 2)

    def test_non_contiguous_raises(self):
        with pytest.raises(NonContiguousPieces):
            turning([Segment(pt(0, 0), pt(1, 0)), Segment(pt(2, 0), pt(3, 0))])

    def test_random_clockwise_convex_polygons(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            n = rng.integers(3, 12)
            ang = np.sort(rng.uniform(0, TAU, n))
            if len(np.unique(np.round(ang, 6))) < 3:
                continue
            rad = rng.uniform(0.5, 3.0)
            ptsccw = np.c_[np.cos(ang), np.sin(ang)] * rad
            ptscw = ptsccw[::-1]
            segs = [Segment(ptscw[i], ptscw[(i + 1) % len(ptscw)]) for i in range(len(ptscw))]
            assert turning(segs, closed=True) == pytest.approx(TAU, abs=1e-8)


class TestClipping:
    def test_segment_fully_outside(self):
        s = Segment(pt(5, 5), pt(6, 5))
        assert clip_segment_outside_disk(s, pt(0, 0), 1.0) == [s]

    def test_segment_through_disk(self):
        s = Segment(pt(-2, 0), pt(2, 0))
        parts = clip_segment_outside_disk(s, pt(0, 0), 1.0)
        assert len(parts) == 2
        total = sum(p.length for p in parts)
        assert total == pytest.approx(2.0)

    def test_segment_swallowed(self):
        s = Segment(pt(-0.1, 0), pt(0.1, 0))
        assert clip_segment_outside_disk(s, pt(0, 0), 1.0) == []

    def test_arc_window_removed(self):
        a = CircularArc(pt(0, 0), 1.0, math.pi, 0.0, "cw")  # upper half, cw
        parts = clip_arc_outside_disk(a, pt(0, 1), 0.2)
        assert len(parts) == 2
        removed = sum(p.length for p in parts)
        assert removed < a.length
        for p in parts:
            # midpoints stay outside the removal disk
            assert np.linalg.norm(p.point_at(0.5) - pt(0, 1)) >= 0.2 - 1e-12

    def test_arc_untouched(self):
        a = CircularArc(pt(0, 0), 1.0, math.pi, 0.0, "cw")
        assert clip_arc_outside_disk(a, pt(0, -5), 0.5) == [a]

    def test_full_circle_window(self):
        a = CircularArc(pt(0, 0), 1.0, 0.0, -TAU, "cw")
        parts = clip_arc_outside_disk(a, pt(1, 0), 0.3)
        assert len(parts) == 1
        assert parts[0].length == pytest.approx(a.length - 2 * math.asin(0.15) * 2, rel=0.05)


class TestArcBasics:
    def test_extent_full(self):
        a = CircularArc(pt(0, 0), 1.0, 0.0, -TAU, "cw")
        assert a.extent == pytest.approx(TAU)

    def test_extent_partial(self):
        a = CircularArc(pt(0, 0), 1.0, math.pi / 2, 0.0, "cw")
        assert a.extent == pytest.approx(math.pi / 2)
        assert a.turn == pytest.approx(math.pi / 2)

    def test_ccw_turn_negative(self):
        a = CircularArc(pt(0, 0), 1.0, 0.0, math.pi / 2, "ccw")
        assert a.turn == pytest.approx(-math.pi / 2)

    def test_radius_positive(self):
        with pytest.raises(ValueError):
            CircularArc(pt(0, 0), 0.0, 0.0, 1.0, "cw")
