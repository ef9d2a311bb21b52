"""Closed convex curves: circles, stadiums, smoothed polygons, and their erosions.

Every curve is a closed clockwise chain of circular arcs and line segments,
parameterized by arc length.  Erosion by r (the inner parallel curve) maps
each piece to a piece of the same kind: arcs keep their centers and angular
spans with radius reduced by r, segments translate inward by r.  That gives
closed-form inner curves and an exact arc-length correspondence between a
curve and its erosion along shared normals.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

import numpy as np

from .geometry import (
    TAU,
    CircularArc,
    Segment,
    norm,
    normalize_angle,
    pt,
    rot90_ccw,
    unit,
)


class InvalidErosion(ValueError):
    """Requested erosion depth reaches or exceeds the minimal curvature radius."""


class InvalidCurve(ValueError):
    """Construction parameters do not describe a convex closed curve."""


@dataclass(frozen=True)
class _ArcPiece:
    center: np.ndarray
    radius: float
    phi_start: float  # traversal is clockwise: angle decreases
    span: float       # positive angular extent

    @property
    def length(self):
        return self.radius * self.span

    def point(self, t):
        a = self.phi_start - t * self.span
        return self.center + self.radius * np.array([math.cos(a), math.sin(a)])

    def tangent(self, t):
        a = self.phi_start - t * self.span
        return np.array([math.sin(a), -math.cos(a)])

    def curvature_radius(self):
        return self.radius

    def erode(self, r):
        return _ArcPiece(self.center, self.radius - r, self.phi_start, self.span)

    def to_geom(self):
        return CircularArc(self.center, self.radius, self.phi_start,
                           self.phi_start - self.span, "cw")


@dataclass(frozen=True)
class _SegPiece:
    a: np.ndarray
    b: np.ndarray

    @property
    def length(self):
        return norm(self.b - self.a)

    def point(self, t):
        return self.a + t * (self.b - self.a)

    def tangent(self, t):
        return unit(self.b - self.a)

    def curvature_radius(self):
        return math.inf

    def erode(self, r):
        n_out = rot90_ccw(self.tangent(0.0))
        shift = -r * n_out
        return _SegPiece(self.a + shift, self.b + shift)

    def to_geom(self):
        return Segment(self.a, self.b)


@dataclass(frozen=True)
class CurvePoint:
    """A point of a curve with its local frame."""

    curve: "ConvexCurve"
    s: float
    point: np.ndarray
    tangent: np.ndarray
    outward_normal: np.ndarray


@dataclass(frozen=True)
class CurveArc:
    """Arc of a curve from arc-length s0 clockwise to s1 (mod L).

    full=True denotes the whole closed curve.
    """

    curve: "ConvexCurve"
    s0: float
    s1: float
    full: bool = False

    @property
    def length(self):
        if self.full:
            return self.curve.arc_length
        return (self.s1 - self.s0) % self.curve.arc_length

    def point_at(self, t):
        return self.curve.point(self.s0 + t * self.length)

    def sample_s(self, n):
        """n arc-length-equispaced parameter values along the arc."""
        return (self.s0 + np.linspace(0.0, self.length, n)) % self.curve.arc_length

    def contains_s(self, s, tol=1e-9):
        if self.full:
            return True
        off = (s - self.s0) % self.curve.arc_length
        return off <= self.length + tol or off >= self.curve.arc_length - tol

    def to_pieces(self):
        return self.curve.pieces_between(self.s0, self.s1, self.full)


@dataclass(frozen=True)
class CoverageReport:
    covered: bool
    worst_point: CurvePoint
    worst_dist: float
    slack: float


class ConvexCurve:
    """Closed convex curve as a clockwise chain of arcs and segments."""

    def __init__(self, kind, pieces, params):
        self.kind = kind
        self.pieces = tuple(pieces)
        self.params = dict(params)
        lengths = [p.length for p in self.pieces]
        self._cum = np.concatenate([[0.0], np.cumsum(lengths)])
        self.arc_length = float(self._cum[-1])
        if self.arc_length <= 0.0:
            raise InvalidCurve("curve has zero length")
        self._check_closed_convex()
        self._sample_cache = {}
        self._erosion_cache = {}

    # -- construction -------------------------------------------------------

    @staticmethod
    def circle(R, center=(0.0, 0.0)):
        if R <= 0:
            raise InvalidCurve("circle radius must be positive")
        c = pt(*center)
        piece = _ArcPiece(c, float(R), math.pi / 2.0, TAU)
        return ConvexCurve("circle", [piece], {"R": float(R), "center": tuple(map(float, center))})

    @staticmethod
    def stadium(t, cap_radius):
        """Boundary of the r-neighborhood of the spine [0, t] x {0}."""
        if t <= 0 or cap_radius <= 0:
            raise InvalidCurve("stadium needs positive spine length and cap radius")
        t, c = float(t), float(cap_radius)
        left, right = pt(0.0, 0.0), pt(t, 0.0)
        pieces = [
            _SegPiece(pt(0.0, c), pt(t, c)),
            _ArcPiece(right, c, math.pi / 2.0, math.pi),
            _SegPiece(pt(t, -c), pt(0.0, -c)),
            _ArcPiece(left, c, -math.pi / 2.0, math.pi),
        ]
        return ConvexCurve("stadium", pieces, {"t": t, "cap_radius": c})

    @staticmethod
    def smoothed_polygon(vertices, corner_radius):
        """Convex polygon with corners rounded by inscribed radius-`corner_radius` arcs."""
        rho = float(corner_radius)
        if rho <= 0:
            raise InvalidCurve("corner radius must be positive")
        v = [pt(*q) for q in vertices]
        if len(v) < 3:
            raise InvalidCurve("need at least 3 vertices")
        # normalize to clockwise order via the signed area
        area2 = sum((v[i][0] * v[(i + 1) % len(v)][1] - v[(i + 1) % len(v)][0] * v[i][1])
                    for i in range(len(v)))
        if area2 > 0:
            v = v[::-1]
        n = len(v)
        tangent_pts = []
        arcs = []
        for i in range(n):
            prev, cur, nxt = v[(i - 1) % n], v[i], v[(i + 1) % n]
            d_in, d_out = unit(cur - prev), unit(nxt - cur)
            crossz = d_in[0] * d_out[1] - d_in[1] * d_out[0]
            if crossz >= -1e-12:
                raise InvalidCurve("vertices must be strictly convex")
            interior = math.pi - math.acos(max(-1.0, min(1.0, float(d_in @ d_out))))
            offset = rho / math.tan(interior / 2.0)
            p_in = cur - offset * d_in
            p_out = cur + offset * d_out
            # arc center sits on the bisector at distance rho from both edges
            center = p_in + rho * rot90_ccw(-d_in)  # inward normal of incoming edge
            phi0 = math.atan2(p_in[1] - center[1], p_in[0] - center[0])
            span = math.pi - interior
            arcs.append((p_in, p_out, _ArcPiece(center, rho, phi0, span)))
            tangent_pts.append((p_in, p_out))
        pieces = []
        for i in range(n):
            p_in, p_out, arc = arcs[i]
            pieces.append(arc)
            nxt_in = arcs[(i + 1) % n][0]
            edge = _SegPiece(p_out, nxt_in)
            if float((nxt_in - p_out) @ unit(v[(i + 1) % n] - v[i])) < -1e-9:
                raise InvalidCurve("corner radius too large for an edge")
            if edge.length > 1e-12:
                pieces.append(edge)
        return ConvexCurve("smoothed_polygon", pieces,
                           {"vertices": [tuple(map(float, q)) for q in vertices],
                            "corner_radius": rho})

    # -- basic queries -------------------------------------------------------

    def _check_closed_convex(self):
        scale = max(1.0, math.sqrt(self.arc_length))
        for i, piece in enumerate(self.pieces):
            nxt = self.pieces[(i + 1) % len(self.pieces)]
            if norm(piece.point(1.0) - nxt.point(0.0)) > 1e-9 * scale:
                raise InvalidCurve(f"pieces {i} and {(i + 1) % len(self.pieces)} do not join")
            # convexity: tangent may only rotate clockwise across the joint
            t_out, t_in = piece.tangent(1.0), nxt.tangent(0.0)
            if t_out[0] * t_in[1] - t_out[1] * t_in[0] > 1e-9:
                raise InvalidCurve("tangent turns counterclockwise at a joint")

    def _locate(self, s):
        s = s % self.arc_length
        i = bisect.bisect_right(self._cum, s) - 1
        i = min(i, len(self.pieces) - 1)
        piece = self.pieces[i]
        local = (s - self._cum[i]) / piece.length if piece.length > 0 else 0.0
        return i, piece, local

    def point(self, s):
        _, piece, t = self._locate(s)
        return piece.point(t)

    def tangent(self, s):
        _, piece, t = self._locate(s)
        return piece.tangent(t)

    def outward_normal(self, s):
        return rot90_ccw(self.tangent(s))

    def curve_point(self, s):
        s = s % self.arc_length
        _, piece, t = self._locate(s)
        tan = piece.tangent(t)
        return CurvePoint(self, s, piece.point(t), tan, rot90_ccw(tan))

    def points_at(self, ss):
        """Vectorized point evaluation at arc-length parameters ss."""
        ss = np.asarray(ss, dtype=float) % self.arc_length
        idx = np.searchsorted(self._cum, ss, side="right") - 1
        idx = np.clip(idx, 0, len(self.pieces) - 1)
        out = np.empty((len(ss), 2))
        for i, piece in enumerate(self.pieces):
            mask = idx == i
            if not mask.any():
                continue
            t = (ss[mask] - self._cum[i]) / piece.length
            if isinstance(piece, _ArcPiece):
                a = piece.phi_start - t * piece.span
                out[mask, 0] = piece.center[0] + piece.radius * np.cos(a)
                out[mask, 1] = piece.center[1] + piece.radius * np.sin(a)
            else:
                d = piece.b - piece.a
                out[mask, 0] = piece.a[0] + t * d[0]
                out[mask, 1] = piece.a[1] + t * d[1]
        return out

    def sample(self, n):
        """(n,2) points equispaced in arc length (memoized per n)."""
        hit = self._sample_cache.get(n)
        if hit is None:
            ss = np.linspace(0.0, self.arc_length, n, endpoint=False)
            hit = (self.points_at(ss), ss)
            if len(self._sample_cache) < 8:
                self._sample_cache[n] = hit
        return hit

    def min_curvature_radius(self):
        return min(p.curvature_radius() for p in self.pieces)

    def perimeter(self):
        return self.arc_length

    def arc(self, s0, s1, full=False):
        return CurveArc(self, s0 % self.arc_length, s1 % self.arc_length, full)

    def full_arc(self):
        return CurveArc(self, 0.0, 0.0, full=True)

    def pieces_between(self, s0, s1, full=False):
        """Geometric pieces of the sub-arc from s0 clockwise to s1."""
        if full:
            return [p.to_geom() for p in self.pieces]
        L = self.arc_length
        s0, s1 = s0 % L, s1 % L
        length = (s1 - s0) % L
        if length == 0.0:
            return []
        out = []
        remaining = length
        s = s0
        while remaining > 1e-15 * max(L, 1.0):
            i, piece, t = self._locate(s)
            piece_left = piece.length * (1.0 - t)
            take = min(piece_left, remaining)
            if take > 1e-15 * max(L, 1.0):
                t1 = t + take / piece.length
                if isinstance(piece, _ArcPiece):
                    a0 = piece.phi_start - t * piece.span
                    a1 = piece.phi_start - t1 * piece.span
                    out.append(CircularArc(piece.center, piece.radius, a0, a1, "cw"))
                else:
                    out.append(Segment(piece.point(t), piece.point(t1)))
            remaining -= take
            s = (s + take) % L
            if piece_left <= take:
                # snap to the start of the next piece to avoid float drift
                s = self._cum[(i + 1) % len(self.pieces)] % L
        return out

    def to_geom_pieces(self):
        return [p.to_geom() for p in self.pieces]

    # -- containment and projection -------------------------------------------

    def project(self, p):
        """Nearest curve point to p: returns (s, point, dist)."""
        p = np.asarray(p, dtype=float)
        best = (math.inf, 0.0, None)
        for i, piece in enumerate(self.pieces):
            if isinstance(piece, _SegPiece):
                d = piece.b - piece.a
                dd = float(d @ d)
                t = 0.0 if dd == 0 else max(0.0, min(1.0, float((p - piece.a) @ d) / dd))
                q = piece.a + t * d
            else:
                v = p - piece.center
                rho = norm(v)
                if rho == 0.0:
                    t, q = 0.0, piece.point(0.0)
                else:
                    phi = math.atan2(v[1], v[0])
                    off = (piece.phi_start - phi) % TAU
                    if off <= piece.span:
                        t = off / piece.span
                    else:
                        # outside the angular window: nearest arc endpoint
                        t = 0.0 if (TAU - off) < (off - piece.span) else 1.0
                    q = piece.point(t)
            dist = norm(p - q)
            if dist < best[0]:
                best = (dist, self._cum[i] + t * piece.length, q)
        dist, s, q = best
        return s % self.arc_length, q, dist

    def contains(self, p, tol=0.0):
        """Whether p lies in the closed convex body bounded by the curve."""
        s, q, dist = self.project(p)
        if dist <= max(tol, 1e-12 * self.arc_length):
            return True
        return float((np.asarray(p, dtype=float) - q) @ self.outward_normal(s)) <= tol

    def signed_distance(self, p):
        """Negative inside the body, positive outside; magnitude = distance to the curve."""
        s, q, dist = self.project(p)
        side = float((np.asarray(p, dtype=float) - q) @ self.outward_normal(s))
        return dist if side > 0 else -dist

    # -- erosion ---------------------------------------------------------------

    def erode(self, r):
        """Inner parallel curve at depth r (closed form, piecewise; memoized)."""
        hit = self._erosion_cache.get(r)
        if hit is None:
            hit = inner_curve(self, r)
            if len(self._erosion_cache) < 8:
                self._erosion_cache[r] = hit
        return hit

    def erosion_param_maps(self, r):
        """Arc-length correspondence with the erosion: (to_inner, to_outer) callables."""
        inner = self.erode(r)
        outer_cum, inner_cum = self._cum, inner._cum
        L_out, L_in = self.arc_length, inner.arc_length

        def to_inner(s):
            i, piece, t = self._locate(s)
            return (inner_cum[i] + t * inner.pieces[i].length) % L_in

        def to_outer(s):
            i, piece, t = inner._locate(s)
            return (outer_cum[i] + t * self.pieces[i].length) % L_out

        return inner, to_inner, to_outer


def min_curvature_radius(curve: ConvexCurve):
    """Infimum of the curvature radius over the curve (closed form per kind)."""
    return curve.min_curvature_radius()


def inner_curve(curve: ConvexCurve, r):
    """The eroded curve at depth r; every arc keeps its center, radius drops by r."""
    if not (0.0 < r < curve.min_curvature_radius()):
        raise InvalidErosion(
            f"erosion depth {r} must lie in (0, {curve.min_curvature_radius()})")
    pieces = [p.erode(r) for p in curve.pieces]
    params = dict(curve.params)
    params["eroded_by"] = params.get("eroded_by", 0.0) + r
    return ConvexCurve(curve.kind, pieces, params)


def normal_foot(x: CurvePoint, r, outer: ConvexCurve = None):
    """The point Q on the outer curve at distance exactly r along the shared normal.

    `x` must lie on the erosion of `outer` by r; when `outer` is omitted the
    foot is constructed purely from x's frame (valid by the curvature bound).
    """
    q = x.point + r * x.outward_normal
    if outer is None:
        return q
    s, qq, dist = outer.project(q)
    if dist > 1e-8 * max(1.0, outer.arc_length):
        raise ValueError("normal foot does not land on the outer curve; "
                         "is x on the r-erosion?")
    return outer.curve_point(s)


def covers(pieces, q: CurveArc, r, n_samples=1024):
    """Sampling certificate that `pieces` cover the arc q within distance r.

    Samples q at n_samples equispaced points; the inter-sample error of the
    1-Lipschitz distance function is bounded by half the sample spacing,
    reported as `slack`.
    """
    from .geometry import dist_point_pieces

    if n_samples < 2:
        raise ValueError("need at least 2 samples")
    geo = []
    for z in pieces:
        if isinstance(z, CurveArc):
            geo.extend(z.to_pieces())
        else:
            geo.append(z)
    ss = q.sample_s(n_samples)
    pts = np.array([q.curve.point(s) for s in ss])
    d = dist_point_pieces(pts, geo)
    worst = int(np.argmax(d))
    spacing = q.length / n_samples
    slack = spacing / 2.0
    return CoverageReport(
        covered=bool(d[worst] <= r + slack),
        worst_point=q.curve.curve_point(float(ss[worst])),
        worst_dist=float(d[worst]),
        slack=slack,
    )


def curve_from_json(obj):
    """Deserialize a curve from a scenario block."""
    kind = obj.get("kind")
    if kind == "circle":
        return ConvexCurve.circle(obj["R"], tuple(obj.get("center", (0.0, 0.0))))
    if kind == "stadium":
        return ConvexCurve.stadium(obj["t"], obj.get("cap_radius", 1.0))
    if kind == "smoothed_polygon":
        return ConvexCurve.smoothed_polygon(obj["vertices"], obj["corner_radius"])
    raise InvalidCurve(f"unknown curve kind {kind!r}")


def curve_to_json(curve: ConvexCurve):
    out = {"kind": curve.kind}
    out.update({k: v for k, v in curve.params.items() if k != "eroded_by"})
    return out
