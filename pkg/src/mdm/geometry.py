"""Planar primitives: points, segments, rays, circular arcs, distances, directed angles.

Everything is plain float64 numpy; exactness is approximated by explicit
tolerances.  The plane carries a fixed *clockwise* orientation: directed
angles and turning numbers are positive for clockwise rotation, and a
simple closed curve traversed clockwise has total turning 2*pi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TAU = 2.0 * math.pi

# unit-vector validation tolerance for Ray directions
UNIT_TOL = 1e-12


class NonContiguousPieces(ValueError):
    """Consecutive pieces of a chain do not share endpoints."""


def pt(x, y):
    """Make a point (float64 array of shape (2,))."""
    return np.array([x, y], dtype=float)


def norm(v):
    return float(math.hypot(v[0], v[1]))


def unit(v):
    n = math.hypot(v[0], v[1])
    if n == 0.0:
        raise ValueError("zero vector has no direction")
    return np.array([v[0] / n, v[1] / n])


def cross2(a, b):
    return a[0] * b[1] - a[1] * b[0]


def rot90_ccw(v):
    return np.array([-v[1], v[0]])


def rot90_cw(v):
    return np.array([v[1], -v[0]])


def rotate(v, angle):
    """Rotate v by `angle` counterclockwise (standard axes)."""
    c, s = math.cos(angle), math.sin(angle)
    return np.array([c * v[0] - s * v[1], s * v[0] + c * v[1]])


def normalize_angle(a):
    """Reduce an angle to (-pi, pi].  Single wraparound helper for the package."""
    a = math.remainder(a, TAU)
    if a <= -math.pi:
        a += TAU
    return a


@dataclass(frozen=True)
class Segment:
    """Closed line segment [a, b]; degenerate a == b is permitted."""

    a: np.ndarray
    b: np.ndarray

    @property
    def length(self):
        return norm(self.b - self.a)

    @property
    def direction(self):
        return unit(self.b - self.a)

    def point_at(self, t):
        return self.a + t * (self.b - self.a)

    def reversed(self):
        return Segment(self.b, self.a)


@dataclass(frozen=True)
class Ray:
    """Ray from `origin` in unit `direction`."""

    origin: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        n = math.hypot(self.direction[0], self.direction[1])
        if abs(n - 1.0) > UNIT_TOL:
            raise ValueError(f"ray direction must be unit length, got norm {n!r}")

    @staticmethod
    def through(origin, target):
        return Ray(np.asarray(origin, dtype=float), unit(np.asarray(target, dtype=float) - origin))


@dataclass(frozen=True)
class CircularArc:
    """Arc of a circle, traversed from start_angle to end_angle.

    orientation 'cw' means the angle decreases along the traversal (clockwise
    in standard axes), 'ccw' means it increases.  A full circle is expressed
    by |end_angle - start_angle| == 2*pi.
    """

    center: np.ndarray
    radius: float
    start_angle: float
    end_angle: float
    orientation: str = "cw"

    def __post_init__(self):
        if self.radius <= 0.0:
            raise ValueError("arc radius must be positive")
        if self.orientation not in ("cw", "ccw"):
            raise ValueError(f"bad orientation {self.orientation!r}")
        if self.orientation == "cw":
            raw = self.start_angle - self.end_angle
        else:
            raw = self.end_angle - self.start_angle
        ext = 0.0
        if raw != 0.0:
            ext = raw % TAU
            if ext == 0.0:
                ext = TAU
        object.__setattr__(self, "_extent", ext)
        object.__setattr__(self, "_p0", self._point_at_angle(self.start_angle))
        object.__setattr__(self, "_p1", self._point_at_angle(
            self.start_angle + (-ext if self.orientation == "cw" else ext)))

    def _point_at_angle(self, a):
        return self.center + self.radius * np.array([math.cos(a), math.sin(a)])

    @property
    def extent(self):
        """Angular extent in [0, 2*pi]."""
        return self._extent

    @property
    def length(self):
        return self.radius * self.extent

    def angle_at(self, t):
        """Angle at fraction t in [0, 1] along the traversal."""
        sgn = -1.0 if self.orientation == "cw" else 1.0
        return self.start_angle + sgn * t * self.extent

    def point_at(self, t):
        a = self.angle_at(t)
        return self.center + self.radius * np.array([math.cos(a), math.sin(a)])

    def tangent_at(self, t):
        """Unit tangent in the direction of traversal."""
        a = self.angle_at(t)
        d = np.array([-math.sin(a), math.cos(a)])
        return -d if self.orientation == "cw" else d

    @property
    def start_point(self):
        return self._p0

    @property
    def end_point(self):
        return self._p1

    def contains_angle(self, phi, tol=1e-12):
        """Whether the angle phi (mod 2*pi) lies in the traversed span."""
        if self.extent >= TAU - tol:
            return True
        if self.orientation == "cw":
            off = (self.start_angle - phi) % TAU
        else:
            off = (phi - self.start_angle) % TAU
        return off <= self.extent + tol or off >= TAU - tol

    def reversed(self):
        flip = "ccw" if self.orientation == "cw" else "cw"
        return CircularArc(self.center, self.radius, self.end_angle, self.start_angle, flip)

    @property
    def turn(self):
        """Signed turning of the tangent along the arc (clockwise positive)."""
        return self.extent if self.orientation == "cw" else -self.extent


def dist_point_segment(p, s: Segment):
    """Euclidean distance from p (point or (n,2) array) to the closed segment."""
    p = np.asarray(p, dtype=float)
    ax, ay = s.a[0], s.a[1]
    dx, dy = s.b[0] - ax, s.b[1] - ay
    dd = dx * dx + dy * dy
    if p.ndim > 1:
        px = p[:, 0] - ax
        py = p[:, 1] - ay
        if dd == 0.0:
            return np.sqrt(px * px + py * py)
        t = np.clip((px * dx + py * dy) / dd, 0.0, 1.0)
        ex = px - t * dx
        ey = py - t * dy
        return np.sqrt(ex * ex + ey * ey)
    px, py = p[0] - ax, p[1] - ay
    if dd == 0.0:
        return math.hypot(px, py)
    t = min(1.0, max(0.0, (px * dx + py * dy) / dd))
    return math.hypot(px - t * dx, py - t * dy)


def dist_point_arc(p, a: CircularArc):
    """Distance from p (point or (n,2) array) to the closed arc."""
    p = np.asarray(p, dtype=float)
    single = p.ndim == 1
    q = p[None, :] if single else p
    vx = q[:, 0] - a.center[0]
    vy = q[:, 1] - a.center[1]
    rho = np.sqrt(vx * vx + vy * vy)
    radial = np.abs(rho - a.radius)
    if a.extent >= TAU - 1e-15:
        return float(radial[0]) if single else radial

    phi = np.arctan2(vy, vx)
    if a.orientation == "cw":
        off = (a.start_angle - phi) % TAU
    else:
        off = (phi - a.start_angle) % TAU
    inside = off <= a.extent
    p0, p1 = a.start_point, a.end_point
    e0x, e0y = q[:, 0] - p0[0], q[:, 1] - p0[1]
    e1x, e1y = q[:, 0] - p1[0], q[:, 1] - p1[1]
    d0 = np.sqrt(e0x * e0x + e0y * e0y)
    d1 = np.sqrt(e1x * e1x + e1y * e1y)
    out = np.where(inside, radial, np.minimum(d0, d1))
    return float(out[0]) if single else out


def dist_point_pieces(p, pieces):
    """Distance from p (point or (n,2)) to a collection of Segments/CircularArcs.

    Segments are batched into a single broadcast computation.
    """
    p = np.asarray(p, dtype=float)
    single = p.ndim == 1
    q = p[None, :] if single else p
    if not pieces:
        out = np.full(len(q), np.inf)
        return float(out[0]) if single else out
    best = np.full(len(q), np.inf)
    for piece in pieces:
        if isinstance(piece, Segment):
            d = dist_point_segment(q, piece)
        elif isinstance(piece, CircularArc):
            d = dist_point_arc(q, piece)
        else:
            raise TypeError(f"unsupported piece {type(piece)!r}")
        np.minimum(best, d, out=best)
    return float(best[0]) if single else best


def directed_angle(r1: Ray, r2: Ray):
    """Signed angle from r1 to r2 in (-pi, pi], clockwise positive.

    Antisymmetric except at the pi branch point.
    """
    d1, d2 = r1.direction, r2.direction
    ccw = math.atan2(cross2(d1, d2), float(d1 @ d2))
    return normalize_angle(-ccw)


def directed_angle_vec(v1, v2):
    """directed_angle for raw direction vectors (not necessarily unit)."""
    ccw = math.atan2(cross2(v1, v2), float(np.dot(v1, v2)))
    return normalize_angle(-ccw)


def _piece_endpoints(piece):
    if isinstance(piece, Segment):
        return piece.a, piece.b
    return piece.start_point, piece.end_point


def _piece_tangents(piece):
    """(incoming-at-start, outgoing-at-end) unit tangents along the traversal."""
    if isinstance(piece, Segment):
        d = piece.direction
        return d, d
    return piece.tangent_at(0.0), piece.tangent_at(1.0)


def _piece_turn(piece):
    if isinstance(piece, Segment):
        return 0.0
    return piece.turn


def turning(pieces, closed=False, tol=1e-9):
    """Total turning of a contiguous chain of Segments/CircularArcs.

    Sum of the smooth per-piece turns plus the directed corner angles at the
    junctions; for `closed` chains the corner between the last and first
    piece is included.  Clockwise positive: a simple closed clockwise chain
    turns by 2*pi.

    Raises NonContiguousPieces when consecutive endpoints disagree by more
    than `tol` (measured against the chain scale).
    """
    pieces = list(pieces)
    if not pieces:
        return 0.0
    scale = max(max(abs(float(c)) for c in np.concatenate(_piece_endpoints(p))) for p in pieces)
    scale = max(scale, 1.0)
    total = 0.0
    for i, piece in enumerate(pieces):
        total += _piece_turn(piece)
        if i + 1 < len(pieces) or closed:
            nxt = pieces[(i + 1) % len(pieces)]
            end = _piece_endpoints(piece)[1]
            start = _piece_endpoints(nxt)[0]
            if norm(end - start) > tol * scale:
                raise NonContiguousPieces(
                    f"piece {i} ends at {end}, piece {(i + 1) % len(pieces)} starts at {start}"
                )
            t_out = _piece_tangents(piece)[1]
            t_in = _piece_tangents(nxt)[0]
            total += directed_angle_vec(t_out, t_in)
    return total


def segment_intersection(s1: Segment, s2: Segment, tol=1e-12):
    """Proper intersection point of two segments, or None.

    Endpoint-to-endpoint contacts are not reported; overlapping collinear
    interiors return the midpoint of the shared part.
    """
    p, r = s1.a, s1.b - s1.a
    q, s = s2.a, s2.b - s2.a
    denom = cross2(r, s)
    qp = q - p
    scale = max(norm(r), norm(s), 1e-30)
    if abs(denom) <= tol * scale * scale:
        # parallel; check collinear overlap
        if abs(cross2(qp, r)) > tol * scale * scale:
            return None
        rr = float(r @ r)
        if rr == 0.0:
            return None
        t0 = float(qp @ r) / rr
        t1 = t0 + float(s @ r) / rr
        lo, hi = max(0.0, min(t0, t1)), min(1.0, max(t0, t1))
        if hi - lo <= tol:
            return None
        return s1.point_at(0.5 * (lo + hi))
    t = cross2(qp, s) / denom
    u = cross2(qp, r) / denom
    eps = tol
    # only interior-interior crossings count; endpoint contacts are allowed
    if eps < t < 1.0 - eps and eps < u < 1.0 - eps:
        return s1.point_at(t)
    return None


def clip_segment_outside_disk(s: Segment, center, radius):
    """Parts of the segment outside the open disk, as a list of segments."""
    d = s.b - s.a
    dd = float(d @ d)
    if dd == 0.0:
        return [] if norm(s.a - center) < radius else [s]
    f = s.a - center
    # |f + t d|^2 = radius^2
    a, b, c = dd, 2.0 * float(f @ d), float(f @ f) - radius * radius
    disc = b * b - 4.0 * a * c
    if disc <= 0.0:
        return [s]
    sq = math.sqrt(disc)
    t0, t1 = (-b - sq) / (2 * a), (-b + sq) / (2 * a)
    t0, t1 = max(0.0, t0), min(1.0, t1)
    if t0 >= t1:
        return [s]
    out = []
    if t0 > 0.0:
        out.append(Segment(s.a, s.point_at(t0)))
    if t1 < 1.0:
        out.append(Segment(s.point_at(t1), s.b))
    return out


def clip_arc_outside_disk(arc: CircularArc, center, radius):
    """Parts of the arc outside the open disk B(center, radius)."""
    c2c = np.asarray(center, dtype=float) - arc.center
    d = norm(c2c)
    R = arc.radius
    if d >= R + radius:
        return [arc]
    if d + R <= radius:
        return []  # whole supporting circle inside the disk
    if d + radius <= R or d == 0.0:
        return [arc]  # disk strictly inside the circle, no boundary crossing
    # angular half-width of the supporting circle's portion inside the disk
    cos_half = (d * d + R * R - radius * radius) / (2.0 * d * R)
    cos_half = min(1.0, max(-1.0, cos_half))
    half = math.acos(cos_half)
    mid = math.atan2(c2c[1], c2c[0])
    # removed angular window on the supporting circle: [mid - half, mid + half]
    sgn = -1.0 if arc.orientation == "cw" else 1.0

    def frac_of(phi):
        """Traversal fraction of angle phi, possibly outside [0,1]."""
        if arc.orientation == "cw":
            off = (arc.start_angle - phi) % TAU
        else:
            off = (phi - arc.start_angle) % TAU
        return off / arc.extent if arc.extent > 0 else 0.0

    ext = arc.extent
    if ext == 0.0:
        inside = norm(arc.start_point - center) < radius
        return [] if inside else [arc]
    # window endpoints in traversal order
    w_enter = frac_of(mid - sgn * half)
    w_exit = frac_of(mid + sgn * half)
    if w_enter <= w_exit:
        windows = [(w_enter, w_exit)]
    else:
        windows = [(0.0, w_exit), (w_enter, 1.0)]
    # keep the complement of the windows within [0, 1]
    kept = []
    cursor = 0.0
    for lo, hi in sorted((max(0.0, lo), min(1.0, hi)) for lo, hi in windows):
        if hi <= cursor:
            continue
        if lo > cursor:
            kept.append((cursor, min(lo, 1.0)))
        cursor = max(cursor, hi)
    if cursor < 1.0:
        kept.append((cursor, 1.0))
    out = []
    for lo, hi in kept:
        if hi - lo <= 1e-15:
            continue
        a0, a1 = arc.angle_at(lo), arc.angle_at(hi)
        out.append(CircularArc(arc.center, arc.radius, a0, a1, arc.orientation))
    # drop slivers whose midpoint is actually inside the disk (window math is
    # conservative when the arc wraps across the window boundary)
    out = [a for a in out if norm(a.point_at(0.5) - center) >= radius - 1e-12]
    return out
