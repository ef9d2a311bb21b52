"""Locally minimal networks on 2 to 4 terminals.

Seven combinatorial types: a segment; the regular tripod and the bent path
on three terminals; and on four terminals the two full topologies (two
branch points, either pairing of the terminals), the tripod with a tail,
and the three-segment path.  Branch points always meet their segments at
exactly 2*pi/3; a type that admits no such realization for the given
terminals is reported as infeasible, never silently replaced.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .geometry import Segment, directed_angle_vec, norm, pt, rot90_ccw, unit
from .networks import EmbeddedNetwork

TWO_THIRDS_PI = 2.0 * math.pi / 3.0


class InfeasibleTopology(ValueError):
    """The combinatorial type admits no locally minimal realization here."""

    def __init__(self, topo, reason=""):
        self.topo = topo
        super().__init__(f"{topo}: {reason}" if reason else str(topo))


@dataclass(frozen=True)
class SteinerTopology:
    """A combinatorial type plus the assignment of terminals to its slots.

    type_id        one of seg2 / path3 / tripod3 / full4_a / full4_b /
                   tripod4 / path4
    order          terminal indices in slot order:
                   path3, path4: visit order along the path
                   tripod4: (tail, attach, other, other)
                   full4_a: branch pairs (o0,o1) and (o2,o3)
                   full4_b: branch pairs (o1,o2) and (o3,o0)
    """

    type_id: str
    order: tuple = ()

    @property
    def n_terminals(self):
        return {"seg2": 2, "path3": 3, "tripod3": 3}.get(self.type_id, 4)

    @property
    def branch_count(self):
        return {"seg2": 0, "path3": 0, "path4": 0,
                "tripod3": 1, "tripod4": 1,
                "full4_a": 2, "full4_b": 2}[self.type_id]

    def __str__(self):
        return f"{self.type_id}{list(self.order)}"


CATALOG = ("seg2", "path3", "tripod3", "full4_a", "full4_b", "tripod4", "path4")


def catalog_topologies(n_terminals):
    """The canonical (identity-order) topology per catalog type of this arity."""
    out = []
    for tid in CATALOG:
        topo = SteinerTopology(tid, tuple(range({"seg2": 2, "path3": 3, "tripod3": 3}.get(tid, 4))))
        if topo.n_terminals == n_terminals:
            out.append(topo)
    return out


def assignments(type_id, n=None):
    """All distinct terminal-role assignments of a type (up to symmetry)."""
    if type_id == "seg2":
        return [SteinerTopology("seg2", (0, 1))]
    if type_id == "tripod3":
        return [SteinerTopology("tripod3", (0, 1, 2))]
    if type_id == "path3":
        # the middle terminal determines the path
        return [SteinerTopology("path3", (a, m, b))
                for m in range(3)
                for a, b in [tuple(sorted(set(range(3)) - {m}))]]
    if type_id == "path4":
        seen, out = set(), []
        for p in permutations(range(4)):
            if p[::-1] in seen:
                continue
            seen.add(p)
            out.append(SteinerTopology("path4", p))
        return out
    if type_id == "tripod4":
        out = []
        for tail in range(4):
            for attach in range(4):
                if attach == tail:
                    continue
                rest = tuple(sorted(set(range(4)) - {tail, attach}))
                out.append(SteinerTopology("tripod4", (tail, attach) + rest))
        return out
    if type_id == "full4_a":
        # unordered pairings {01|23}, {02|13}, {03|12}
        return [SteinerTopology("full4_a", p)
                for p in ((0, 1, 2, 3), (0, 2, 1, 3), (0, 3, 1, 2))]
    if type_id == "full4_b":
        return [SteinerTopology("full4_b", p)
                for p in ((0, 1, 2, 3), (0, 2, 1, 3), (0, 3, 1, 2))]
    raise ValueError(f"unknown type {type_id!r}")


def _tree(vertices, edges):
    return EmbeddedNetwork(np.array(vertices, dtype=float), edges)


def _angle_at(p, q1, q2):
    """Unsigned angle q1-p-q2."""
    u, v = q1 - p, q2 - p
    nu, nv = norm(u), norm(v)
    if nu == 0 or nv == 0:
        return 0.0
    c = float(u @ v) / (nu * nv)
    return math.acos(max(-1.0, min(1.0, c)))


def equilateral_apex(a, b, side):
    """Third vertex of the equilateral triangle on [ab]; side=+1 is left of a->b."""
    mid = 0.5 * (a + b)
    h = math.sqrt(3) / 2.0 * norm(b - a)
    return mid + side * h * rot90_ccw(unit(b - a))


def fermat_point(p1, p2, p3):
    """Shortest network connecting three points.

    Returns (tree, steiner_point).  If every triangle angle is below 2*pi/3
    the tree branches at the Torricelli point with three segments at mutual
    angles 2*pi/3; otherwise it is the two edges at the obtuse vertex, and
    collinear inputs give the covering segment.
    """
    ps = [np.asarray(p, dtype=float) for p in (p1, p2, p3)]
    if min(norm(ps[0] - ps[1]), norm(ps[1] - ps[2]), norm(ps[0] - ps[2])) == 0.0:
        raise ValueError("terminals must be distinct")
    u, v = ps[1] - ps[0], ps[2] - ps[0]
    cr = float(u[0] * v[1] - u[1] * v[0])
    if abs(cr) <= 1e-14 * max(norm(ps[1] - ps[0]), norm(ps[2] - ps[0])) ** 2:
        # collinear: the covering segment through the middle point
        order = sorted(range(3), key=lambda i: float((ps[i] - ps[0]) @ unit(ps[2] - ps[0]))
                       if norm(ps[2] - ps[0]) > 0 else 0.0)
        a, m, b = (ps[i] for i in order)
        return _tree([a, m, b], [(0, 1), (1, 2)]), None
    angles = [_angle_at(ps[i], ps[(i + 1) % 3], ps[(i + 2) % 3]) for i in range(3)]
    worst = int(np.argmax(angles))
    if angles[worst] >= TWO_THIRDS_PI:
        others = [(worst + 1) % 3, (worst + 2) % 3]
        verts = [ps[worst], ps[others[0]], ps[others[1]]]
        return _tree(verts, [(0, 1), (0, 2)]), None
    # Torricelli point via the outer equilateral apex and its circumcircle
    side = 1.0 if cr < 0 else -1.0  # apex on the far side of [p1 p2] from p3
    e = equilateral_apex(ps[0], ps[1], side)
    s = _second_circle_intersection(ps[0], ps[1], e, e, ps[2])
    if s is None:
        # numerically marginal: fall back to the analytic rotation formula
        s = _torricelli_iterative(ps)
    verts = [ps[0], ps[1], ps[2], s]
    return _tree(verts, [(3, 0), (3, 1), (3, 2)]), s


def _second_circle_intersection(a, b, c, line_p, line_q):
    """Second intersection of line (line_p, line_q) with the circle through a, b, c."""
    # circumcenter
    ax, ay = a
    bx, by = b
    cx, cy = c
    d = 2 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    if d == 0:
        return None
    ux = ((ax * ax + ay * ay) * (by - cy) + (bx * bx + by * by) * (cy - ay)
          + (cx * cx + cy * cy) * (ay - by)) / d
    uy = ((ax * ax + ay * ay) * (cx - bx) + (bx * bx + by * by) * (ax - cx)
          + (cx * cx + cy * cy) * (bx - ax)) / d
    center = np.array([ux, uy])
    radius = norm(a - center)
    u = line_q - line_p
    uu = float(u @ u)
    if uu == 0:
        return None
    f = line_p - center
    bq = 2 * float(f @ u)
    cq = float(f @ f) - radius * radius
    disc = bq * bq - 4 * uu * cq
    if disc < 0:
        return None
    sq = math.sqrt(disc)
    t1, t2 = (-bq - sq) / (2 * uu), (-bq + sq) / (2 * uu)
    # line runs from the apex (line_p) to the far terminal; the Torricelli
    # point is the intersection lying between them, away from the apex
    cands = [t for t in (t1, t2) if 1e-12 < t < 1 - 1e-12]
    if not cands:
        return None
    t = max(cands)
    return line_p + t * u


def _torricelli_iterative(ps, iters=200):
    x = (ps[0] + ps[1] + ps[2]) / 3.0
    for _ in range(iters):
        w = np.zeros(2)
        tot = 0.0
        for p in ps:
            d = norm(x - p)
            if d < 1e-15:
                return p.copy()
            w += p / d
            tot += 1.0 / d
        x = w / tot
    return x


def local_min_network(terminals, topo: SteinerTopology):
    """Realize the combinatorial type on the terminals or raise InfeasibleTopology.

    All branch points of the result meet their three segments at 2*pi/3
    within 1e-9; path types require their interior angles to be at least
    2*pi/3 to count as locally minimal.
    """
    ts = [np.asarray(p, dtype=float) for p in terminals]
    if len(ts) != topo.n_terminals:
        raise InfeasibleTopology(topo, f"needs {topo.n_terminals} terminals, got {len(ts)}")
    for i in range(len(ts)):
        for j in range(i + 1, len(ts)):
            if norm(ts[i] - ts[j]) == 0.0:
                raise ValueError("terminals must be distinct")
    o = topo.order if topo.order else tuple(range(len(ts)))

    if topo.type_id == "seg2":
        return _tree([ts[o[0]], ts[o[1]]], [(0, 1)])

    if topo.type_id == "path3":
        a, m, b = ts[o[0]], ts[o[1]], ts[o[2]]
        if _angle_at(m, a, b) < TWO_THIRDS_PI - 1e-9:
            raise InfeasibleTopology(topo, "interior angle below 2*pi/3")
        return _tree([a, m, b], [(0, 1), (1, 2)])

    if topo.type_id == "tripod3":
        tree, s = fermat_point(ts[o[0]], ts[o[1]], ts[o[2]])
        if s is None:
            raise InfeasibleTopology(topo, "no interior Torricelli point")
        return tree

    if topo.type_id == "path4":
        a, b, c, d = (ts[i] for i in o)
        if (_angle_at(b, a, c) < TWO_THIRDS_PI - 1e-9
                or _angle_at(c, b, d) < TWO_THIRDS_PI - 1e-9):
            raise InfeasibleTopology(topo, "interior angle below 2*pi/3")
        return _tree([a, b, c, d], [(0, 1), (1, 2), (2, 3)])

    if topo.type_id == "tripod4":
        tail, attach, r1, r2 = (ts[i] for i in o)
        tree, s = fermat_point(attach, r1, r2)
        if s is None:
            raise InfeasibleTopology(topo, "no interior Torricelli point")
        if _angle_at(attach, tail, s) < TWO_THIRDS_PI - 1e-9:
            raise InfeasibleTopology(topo, "tail angle below 2*pi/3")
        return _tree([tail, attach, r1, r2, s],
                     [(0, 1), (4, 1), (4, 2), (4, 3)])

    if topo.type_id in ("full4_a", "full4_b"):
        if topo.type_id == "full4_a":
            pair1 = (ts[o[0]], ts[o[1]])
            pair2 = (ts[o[2]], ts[o[3]])
        else:
            pair1 = (ts[o[1]], ts[o[2]])
            pair2 = (ts[o[3]], ts[o[0]])
        return _melzak_full4(pair1, pair2, topo)

    raise ValueError(f"unknown topology {topo.type_id!r}")


def _melzak_full4(pair1, pair2, topo):
    """Two-branch tree via the double equilateral-point construction.

    Both apex side choices are tried; a candidate is kept only if both branch
    points land strictly inside the spine between the apexes with all angles
    2*pi/3, and the shortest valid candidate wins.
    """
    (a, b), (c, d) = pair1, pair2
    best = None
    for s1_side in (1.0, -1.0):
        for s2_side in (1.0, -1.0):
            e1 = equilateral_apex(a, b, s1_side)
            e2 = equilateral_apex(c, d, s2_side)
            if norm(e2 - e1) < 1e-14:
                continue
            v1 = _second_circle_intersection(a, b, e1, e1, e2)
            v2 = _second_circle_intersection(c, d, e2, e2, e1)
            if v1 is None or v2 is None:
                continue
            # spine order along e1 -> e2 must be e1, v1, v2, e2
            u = unit(e2 - e1)
            t1 = float((v1 - e1) @ u)
            t2 = float((v2 - e1) @ u)
            if not (0.0 < t1 < t2 < norm(e2 - e1)):
                continue
            net = _tree([a, b, c, d, v1, v2],
                        [(4, 0), (4, 1), (5, 2), (5, 3), (4, 5)])
            if validate_angles(net):
                continue
            length = net.total_length()
            if best is None or length < best[0]:
                best = (length, net)
    if best is None:
        raise InfeasibleTopology(topo, "branch points leave the feasible region")
    return best[1]


def validate_angles(net: EmbeddedNetwork, tol=1e-9):
    """Angle violations: vertices where incident pieces meet below 2*pi/3.

    Returns a list of (vertex_index, angle) pairs; degree-1 vertices never
    appear.  Arc pieces contribute their endpoint tangent directions.
    """
    dirs = {i: [] for i in range(len(net.vertices))}
    for i, j in net.edges:
        d = net.vertices[j] - net.vertices[i]
        n = norm(d)
        if n == 0:
            continue
        dirs[i].append(d / n)
        dirs[j].append(-d / n)
    for a in net.mr_arcs:
        arcs = net.mr_curve.pieces_between(a.s0, a.s1, a.full)
        if not arcs:
            continue
        first, last_p = arcs[0], arcs[-1]
        start_t = first.tangent_at(0.0) if hasattr(first, "tangent_at") else first.direction
        end_t = last_p.tangent_at(1.0) if hasattr(last_p, "tangent_at") else last_p.direction
        dirs[a.v0].append(start_t)
        dirs[a.v1].append(-end_t)
    violations = []
    for v, ds in dirs.items():
        if len(ds) < 2:
            continue
        for i in range(len(ds)):
            for j in range(i + 1, len(ds)):
                c = float(ds[i] @ ds[j])
                ang = math.acos(max(-1.0, min(1.0, c)))
                if ang < TWO_THIRDS_PI - tol:
                    violations.append((v, ang))
    return violations


def best_network(terminals, return_table=False):
    """Shortest feasible realization over the whole catalog.

    With return_table=True also returns one row per catalog type:
    (type_id, feasible, length or None, assignment or None).
    """
    ts = list(terminals)
    table = []
    best = None
    for tid in CATALOG:
        needed = SteinerTopology(tid).n_terminals
        if needed != len(ts):
            table.append((tid, False, None, None))
            continue
        rows = []
        for topo in assignments(tid):
            try:
                net = local_min_network(ts, topo)
            except InfeasibleTopology:
                continue
            rows.append((net.total_length(), topo, net))
        if not rows:
            table.append((tid, False, None, None))
            continue
        length, topo, net = min(rows, key=lambda r: r[0])
        table.append((tid, True, length, topo))
        if best is None or length < best[0]:
            best = (length, topo, net)
    if return_table:
        return best, table
    return best
