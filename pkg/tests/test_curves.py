import math

import numpy as np
import pytest

from mdm.curves import (
    ConvexCurve,
    CurveArc,
    InvalidCurve,
    InvalidErosion,
    covers,
    curve_from_json,
    curve_to_json,
    inner_curve,
    min_curvature_radius,
    normal_foot,
)
from mdm.geometry import Segment, pt

TAU = 2 * math.pi


@pytest.fixture
def circle5():
    return ConvexCurve.circle(5.0)


@pytest.fixture
def stadium():
    return ConvexCurve.stadium(10.0, 1.0)


@pytest.fixture
def hexagon():
    ang = np.linspace(0, TAU, 7)[:-1]
    verts = [(2 * math.cos(a), 2 * math.sin(a)) for a in ang]
    return ConvexCurve.smoothed_polygon(verts, 0.4)


class TestConstruction:
    def test_circle_perimeter(self, circle5):
        assert circle5.arc_length == pytest.approx(TAU * 5)

    def test_stadium_perimeter(self, stadium):
        assert stadium.arc_length == pytest.approx(2 * 10 + TAU * 1)

    def test_circle_points_on_circle(self, circle5):
        for s in np.linspace(0, circle5.arc_length, 37):
            assert np.linalg.norm(circle5.point(s)) == pytest.approx(5.0)

    def test_clockwise_orientation(self, circle5):
        # outward normal is the ccw-rotated tangent; on a circle it is radial
        cp = circle5.curve_point(1.7)
        assert cp.outward_normal @ cp.point == pytest.approx(5.0)
        assert cp.tangent @ cp.outward_normal == pytest.approx(0.0, abs=1e-12)

    def test_stadium_contains(self, stadium):
        assert stadium.contains(pt(5, 0))
        assert stadium.contains(pt(0, 0))
        assert stadium.contains(pt(-0.99, 0))
        assert not stadium.contains(pt(-1.01, 0))
        assert not stadium.contains(pt(5, 1.01))

    def test_smoothed_polygon_convex(self, hexagon):
        # winding once around, tangent directions rotate by 2*pi clockwise
        assert hexagon.min_curvature_radius() == pytest.approx(0.4)

    def test_degenerate_polygon_rejected(self):
        with pytest.raises(InvalidCurve):
            ConvexCurve.smoothed_polygon([(0, 0), (1, 0), (2, 0)], 0.1)

    def test_corner_radius_too_large(self):
        with pytest.raises(InvalidCurve):
            ConvexCurve.smoothed_polygon([(0, 0), (1, 0), (0.5, 0.5)], 5.0)


class TestMinCurvatureRadius:
    def test_circle(self, circle5):
        assert min_curvature_radius(circle5) == pytest.approx(5.0)

    def test_stadium_unit_cap(self):
        for t in (1.0, 5.0, 39.2):
            assert min_curvature_radius(ConvexCurve.stadium(t, 1.0)) == pytest.approx(1.0)

    def test_smoothed_polygon(self, hexagon):
        assert min_curvature_radius(hexagon) == pytest.approx(0.4)


class TestInnerCurve:
    def test_circle_erosion_is_concentric(self, circle5):
        inner = inner_curve(circle5, 1.0)
        assert inner.arc_length == pytest.approx(TAU * 4)
        for s in np.linspace(0, inner.arc_length, 17):
            assert np.linalg.norm(inner.point(s)) == pytest.approx(4.0)

    def test_stadium_erosion_shrinks_caps(self):
        st = ConvexCurve.stadium(10.0, 1.0)
        inner = inner_curve(st, 0.5)
        assert inner.arc_length == pytest.approx(2 * 10 + TAU * 0.5)
        assert min_curvature_radius(inner) == pytest.approx(0.5)

    def test_stadium_erosion_matches_brute_force(self):
        # Hausdorff-style check against erosion of a dense polygonal sampling
        st = ConvexCurve.stadium(10.0, 1.0)
        r = 0.5
        inner = inner_curve(st, r)
        pts, _ = inner.sample(400)
        # every inner point is at distance exactly r from the stadium
        for p in pts[::7]:
            _, _, d = st.project(p)
            assert d == pytest.approx(r, abs=1e-9)
        # and brute-force eroded samples of the stadium lie on `inner`
        outer_pts, ss = st.sample(400)
        for s in ss[::7]:
            cp = st.curve_point(s)
            q = cp.point - r * cp.outward_normal
            _, _, d = inner.project(q)
            assert d == pytest.approx(0.0, abs=1e-9)

    def test_boundary_erosion_rejected(self):
        with pytest.raises(InvalidErosion):
            inner_curve(ConvexCurve.circle(1.0), 1.0)

    def test_erosion_monotone_containment(self, circle5):
        inner1 = inner_curve(circle5, 1.0)
        inner2 = inner_curve(circle5, 2.0)
        pts, _ = inner2.sample(64)
        for p in pts:
            assert inner1.contains(p, tol=1e-9)

    def test_result_min_curvature(self, hexagon):
        inner = inner_curve(hexagon, 0.15)
        assert min_curvature_radius(inner) == pytest.approx(0.25)


class TestNormalFoot:
    def test_circle_radial(self, circle5):
        inner = inner_curve(circle5, 1.0)
        s_inner = inner.project(pt(4, 0))[0]
        x = inner.curve_point(s_inner)
        q = normal_foot(x, 1.0, circle5)
        assert q.point == pytest.approx(pt(5, 0), abs=1e-10)

    def test_stadium_flat_vertical(self):
        st = ConvexCurve.stadium(10.0, 1.0)
        inner = inner_curve(st, 0.5)
        s = inner.project(pt(5.0, 0.5))[0]
        x = inner.curve_point(s)
        q = normal_foot(x, 0.5, st)
        assert q.point == pytest.approx(pt(5.0, 1.0), abs=1e-10)

    def test_foot_distance_exact(self, hexagon):
        inner = inner_curve(hexagon, 0.1)
        for s in np.linspace(0, inner.arc_length, 23):
            x = inner.curve_point(s)
            q = normal_foot(x, 0.1, hexagon)
            assert np.linalg.norm(q.point - x.point) == pytest.approx(0.1, abs=1e-10)

    def test_foot_is_global_nearest(self, circle5):
        inner = inner_curve(circle5, 1.3)
        rng = np.random.default_rng(3)
        pts, ss = circle5.sample(4000)
        for s in rng.uniform(0, inner.arc_length, 12):
            x = inner.curve_point(s)
            q = normal_foot(x, 1.3, circle5)
            dists = np.linalg.norm(pts - x.point[None, :], axis=1)
            best = pts[int(np.argmin(dists))]
            assert np.linalg.norm(best - q.point) < 2 * circle5.arc_length / 4000


class TestParamMaps:
    def test_roundtrip(self, stadium):
        inner, to_in, to_out = stadium.erosion_param_maps(0.4)
        for s in np.linspace(0, stadium.arc_length, 29, endpoint=False):
            si = to_in(s)
            assert to_out(si) == pytest.approx(s % stadium.arc_length, abs=1e-9)

    def test_normal_correspondence(self, stadium):
        inner, to_in, to_out = stadium.erosion_param_maps(0.4)
        for s in np.linspace(0, stadium.arc_length, 29, endpoint=False):
            outer_p = stadium.curve_point(s)
            inner_p = inner.point(to_in(s))
            assert np.linalg.norm(outer_p.point - inner_p) == pytest.approx(0.4, abs=1e-9)


class TestCovers:
    def test_inner_curve_covers_everything(self, circle5):
        r = 1.0
        inner = inner_curve(circle5, r)
        rep = covers([inner.full_arc()], circle5.full_arc(), r, n_samples=2048)
        assert rep.covered
        assert rep.worst_dist == pytest.approx(r, abs=1e-6)

    def test_single_far_point_fails(self, circle5):
        r = 1.0
        z = [Segment(pt(0, 0), pt(0, 0))]
        rep = covers(z, circle5.full_arc(), r, n_samples=512)
        assert not rep.covered
        assert rep.worst_dist >= 5.0 - 1e-9

    def test_monotone_in_r(self, circle5):
        inner = inner_curve(circle5, 1.0)
        q = circle5.arc(0.0, 10.0)
        rep1 = covers([inner.full_arc()], q, 1.0, n_samples=512)
        rep2 = covers([inner.full_arc()], q, 1.5, n_samples=512)
        assert rep1.covered and rep2.covered

    def test_needs_two_samples(self, circle5):
        with pytest.raises(ValueError):
            covers([], circle5.full_arc(), 1.0, n_samples=1)


class TestJson:
    def test_circle_roundtrip(self):
        c = curve_from_json({"kind": "circle", "R": 5.0})
        assert c.kind == "circle"
        assert curve_to_json(c)["R"] == 5.0

    def test_stadium_roundtrip(self):
        c = curve_from_json({"kind": "stadium", "t": 39.2, "cap_radius": 1.0})
        assert c.arc_length == pytest.approx(2 * 39.2 + TAU)

    def test_polygon_roundtrip(self):
        c = curve_from_json({"kind": "smoothed_polygon",
                             "vertices": [(0, 0), (4, 0), (4, 3), (0, 3)],
                             "corner_radius": 0.5})
        j = curve_to_json(c)
        c2 = curve_from_json(j)
        assert c2.arc_length == pytest.approx(c.arc_length)

    def test_unknown_kind(self):
        with pytest.raises(InvalidCurve):
            curve_from_json({"kind": "blob"})


class TestCurveArc:
    def test_arc_length_wraparound(self, circle5):
        a = circle5.arc(circle5.arc_length - 1.0, 2.0)
        assert a.length == pytest.approx(3.0)

    def test_full_arc(self, circle5):
        assert circle5.full_arc().length == pytest.approx(circle5.arc_length)

    def test_pieces_reconstruct_length(self, stadium):
        a = stadium.arc(1.0, 15.0)
        pieces = a.to_pieces()
        assert sum(p.length for p in pieces) == pytest.approx(a.length, abs=1e-9)

    def test_contains_s(self, circle5):
        a = circle5.arc(1.0, 4.0)
        assert a.contains_s(2.0)
        assert not a.contains_s(5.0)
