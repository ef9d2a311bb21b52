"""Embedded candidate networks and their diagnostics.

A network is a set of straight segments between vertices plus arcs of the
inner curve M_r.  This module measures them (length, covering energy),
checks connectivity and loops, classifies points as energetic or not by
ball removal, splits a network into the abstract component graph G, and
computes the turning decomposition of the region T bounded by the network
together with the two length-r connectors to the meeting point A.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .curves import ConvexCurve, CurveArc, CurvePoint
from .geometry import (
    TAU,
    Segment,
    clip_arc_outside_disk,
    clip_segment_outside_disk,
    directed_angle_vec,
    dist_point_pieces,
    dist_point_segment,
    norm,
    segment_intersection,
    turning,
)

__all__ = [
    "EmbeddedNetwork", "MrArc", "PointClass", "ComponentGraph", "GraphNode",
    "TurningDecomposition", "length", "energy", "energy_report", "is_connected",
    "has_loop", "classify_point", "component_graph", "turning_decomposition",
    "chord_length_bound", "AmbiguousCrossing", "ComponentGraphError",
    "NotAPath", "NoCommonCoveredPoint", "network_from_json", "network_to_json",
]


class AmbiguousCrossing(ValueError):
    """A vertex sits too close to M_r to classify robustly."""


class ComponentGraphError(ValueError):
    """The network does not decompose into the expected component structure."""


class NotAPath(ComponentGraphError):
    """The component graph is not a path."""


class NoCommonCoveredPoint(ComponentGraphError):
    """The two ending components cover disjoint parts of M."""


@dataclass(frozen=True)
class MrArc:
    """Arc of M_r between two network vertices, clockwise from s0 to s1."""

    s0: float
    s1: float
    v0: int
    v1: int
    full: bool = False


class EmbeddedNetwork:
    """Vertices, segments, and M_r arcs with shared endpoints."""

    def __init__(self, vertices, edges, mr_arcs=(), mr_curve: ConvexCurve = None):
        self.vertices = np.asarray(vertices, dtype=float).reshape(-1, 2)
        self.edges = [(int(i), int(j)) for i, j in edges]
        self.mr_arcs = list(mr_arcs)
        self.mr_curve = mr_curve
        if self.mr_arcs and mr_curve is None:
            raise ValueError("mr_arcs need an mr_curve")
        self._pieces = None

    def copy(self):
        return EmbeddedNetwork(self.vertices.copy(), list(self.edges),
                               list(self.mr_arcs), self.mr_curve)

    def pieces(self):
        """Geometric pieces (Segments and CircularArcs)."""
        if self._pieces is None:
            out = []
            for i, j in self.edges:
                out.append(Segment(self.vertices[i], self.vertices[j]))
            for a in self.mr_arcs:
                out.extend(self.mr_curve.pieces_between(a.s0, a.s1, a.full))
            self._pieces = out
        return self._pieces

    def arc_objects(self):
        return [CurveArc(self.mr_curve, a.s0, a.s1, a.full) for a in self.mr_arcs]

    @property
    def scale(self):
        if len(self.vertices):
            span = float(np.ptp(self.vertices, axis=0).max())
        else:
            span = 0.0
        if self.mr_curve is not None:
            span = max(span, self.mr_curve.arc_length)
        return max(span, 1.0)

    def total_length(self):
        total = 0.0
        for i, j in self.edges:
            total += norm(self.vertices[i] - self.vertices[j])
        for a in self.mr_arcs:
            total += CurveArc(self.mr_curve, a.s0, a.s1, a.full).length
        return total

    def validate(self, tol=1e-9):
        """Check positive piece lengths and pairwise disjoint segment interiors."""
        problems = []
        segs = []
        for k, (i, j) in enumerate(self.edges):
            s = Segment(self.vertices[i], self.vertices[j])
            if s.length <= tol * self.scale:
                problems.append(f"edge {k} is degenerate")
            segs.append(s)
        for a in range(len(segs)):
            for b in range(a + 1, len(segs)):
                x = segment_intersection(segs[a], segs[b], tol=tol)
                if x is not None:
                    problems.append(f"edges {a} and {b} cross at {tuple(x)}")
        return problems

    # vertex clustering used by the graph checks
    def _vertex_clusters(self, tol=1e-9):
        n = len(self.vertices)
        parent = list(range(n))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        thresh = tol * self.scale
        for i in range(n):
            for j in range(i + 1, n):
                if norm(self.vertices[i] - self.vertices[j]) <= thresh:
                    parent[find(i)] = find(j)
        return [find(i) for i in range(n)]


@dataclass(frozen=True)
class PointClass:
    label: str  # 'non_isolated_energetic' | 'isolated_energetic' | 'non_energetic'
    witness_Q: CurvePoint = None

    @property
    def energetic(self):
        return self.label != "non_energetic"


def length(net: EmbeddedNetwork):
    """Total one-dimensional measure: segments plus arcs."""
    return net.total_length()


def _max_dist_refined(pieces, M: ConvexCurve, n_samples, refine=True,
                      extra_windows=()):
    """Max over M of the distance to `pieces`, with local refinement.

    Coarse equispaced scan, then a bounded scalar polish around the top
    coarse maxima (the distance along M is piecewise smooth).  Narrow
    features the coarse grid could straddle can be listed as extra
    (s_center, half_width) windows; each is scanned densely too.
    Returns (value, s_at_max).
    """
    if not pieces:
        return math.inf, 0.0
    pts, ss = M.sample(n_samples)
    d = dist_point_pieces(pts, pieces)
    order = np.argsort(d)[-3:]
    best_v, best_s = float(d[order[-1]]), float(ss[order[-1]])
    if not refine:
        return best_v, best_s
    h = M.arc_length / n_samples

    def neg(s):
        return -dist_point_pieces(M.point(s % M.arc_length), pieces)

    windows = [(float(ss[idx]), h) for idx in order]
    for center, half, spacing in extra_windows:
        n_win = int(min(max(2 * half / max(spacing, 1e-12), 257), 8193))
        sub = center + np.linspace(-half, half, n_win)
        dv = dist_point_pieces(M.points_at(sub), pieces)
        k = int(np.argmax(dv))
        if dv[k] > best_v:
            best_v, best_s = float(dv[k]), float(sub[k] % M.arc_length)
        windows.append((float(sub[k]), 2 * half / (n_win - 1)))
    for s0, half in windows:
        res = minimize_scalar(neg, bounds=(s0 - half, s0 + half), method="bounded",
                              options={"xatol": 1e-12 * M.arc_length})
        if -res.fun > best_v:
            best_v, best_s = float(-res.fun), float(res.x % M.arc_length)
    return best_v, best_s


def energy(net, M: ConvexCurve, n_samples=4096):
    """Covering energy sup_{y in M} dist(y, net); +inf for the empty network."""
    pieces = net.pieces() if isinstance(net, EmbeddedNetwork) else list(net)
    v, _ = _max_dist_refined(pieces, M, n_samples)
    return v


def energy_report(net, M: ConvexCurve, n_samples=4096):
    """(energy, slack, worst CurvePoint); slack is the Lipschitz sampling bound."""
    pieces = net.pieces() if isinstance(net, EmbeddedNetwork) else list(net)
    v, s = _max_dist_refined(pieces, M, n_samples)
    slack = M.arc_length / n_samples / 2.0
    return v, slack, M.curve_point(s)


def _window_max(pieces, M: ConvexCurve, lo, hi, rounds=3, n=33):
    """Max distance over the M parameter window [lo, hi] by vectorized zooming."""
    lo0, hi0 = lo, hi
    best_v, best_s = -math.inf, lo
    for _ in range(rounds):
        ss = np.linspace(lo, hi, n)
        d = dist_point_pieces(M.points_at(ss), pieces)
        k = int(np.argmax(d))
        if d[k] > best_v:
            best_v, best_s = float(d[k]), float(ss[k])
        h = (hi - lo) / (n - 1)
        lo, hi = max(lo0, ss[k] - h), min(hi0, ss[k] + h)
    return best_v, best_s % M.arc_length


def certified_energy(net: EmbeddedNetwork, M: ConvexCurve, r, n_complement=8192,
                     return_s=False):
    """Covering energy with the arc feet handled analytically.

    Arcs of the eroded curve cover their foot intervals of M at distance
    exactly r with no gaps, so only the complement of those intervals can
    hide a covering hole; the complement is scanned densely and every
    Lipschitz-suspect run is polished.  Far more reliable than a global
    scan when most of M sits at distance exactly r.
    """
    pieces = net.pieces()
    if not pieces:
        return (math.inf, 0.0) if return_s else math.inf
    L = M.arc_length
    feet = []
    if net.mr_arcs and net.mr_curve is not None:
        depth = net.mr_curve.params.get("eroded_by", 0.0) - M.params.get("eroded_by", 0.0)
        if abs(depth - r) <= 1e-12 * max(r, 1.0):
            inner, to_in, to_out = M.erosion_param_maps(r)
            for a in net.mr_arcs:
                if a.full:
                    return (r, a.s0) if return_s else r
                feet.append((to_out(a.s0), (to_out(a.s1) - to_out(a.s0)) % L))
    if not feet:
        segments = [(0.0, L)]
        base = 0.0
    else:
        base = r
        segments = _complement_intervals(feet, L)
        if not segments:
            return (r, feet[0][0]) if return_s else r
    best = base
    best_s = segments[0][0]
    pad = L / n_complement
    for (s0, span) in segments:
        n = max(64, int(n_complement * (span + 2 * pad) / L) + 1)
        ss = (s0 - pad) + np.linspace(0.0, span + 2 * pad, n)
        d = dist_point_pieces(M.points_at(ss), pieces)
        h = (span + 2 * pad) / (n - 1)
        k = int(np.argmax(d))
        if d[k] > best:
            best, best_s = float(d[k]), float(ss[k] % L)
        suspects = np.nonzero(d + h / 2.0 > max(best, r))[0]
        if len(suspects) == 0:
            continue
        runs = []
        for idx in suspects:
            lo, hi = ss[max(0, idx - 1)], ss[min(n - 1, idx + 1)]
            if runs and lo <= runs[-1][1]:
                runs[-1] = (runs[-1][0], hi)
            else:
                runs.append((lo, hi))
        for lo, hi in runs:
            v, s_at = _window_max(pieces, M, lo, hi, rounds=4)
            if v > best:
                best, best_s = v, s_at
    return (best, best_s) if return_s else best


def _complement_intervals(intervals, L):
    """Complement of a union of (start, span) intervals on a circle of size L."""
    if not intervals:
        return [(0.0, L)]
    items = sorted((s % L, span) for s, span in intervals)
    merged = []
    for s, span in items:
        if merged and (s - merged[-1][0]) % L <= merged[-1][1]:
            ps, pspan = merged[-1]
            merged[-1] = (ps, max(pspan, (s - ps) % L + span))
        else:
            merged.append((s, span))
    if len(merged) > 1:
        s0, sp0 = merged[0]
        s1, sp1 = merged[-1]
        if (s0 - s1) % L <= sp1:
            merged[0] = (s1, max(sp1, (s0 - s1) % L + sp0))
            merged.pop()
    out = []
    for k, (s, span) in enumerate(merged):
        if span >= L:
            return []
        nxt = merged[(k + 1) % len(merged)][0]
        gap = (nxt - (s + span)) % L
        if gap > 0:
            out.append(((s + span) % L, gap))
    return out


def _adjacency(net: EmbeddedNetwork, tol=1e-9):
    """(clusters, edges-as-cluster-pairs) including arcs; full arcs are self-loops."""
    labels = net._vertex_clusters(tol)
    links = [(labels[i], labels[j]) for i, j in net.edges]
    for a in net.mr_arcs:
        if a.full:
            links.append((labels[a.v0], labels[a.v0]))
        else:
            links.append((labels[a.v0], labels[a.v1]))
    return labels, links


def is_connected(net: EmbeddedNetwork, tol=1e-9):
    labels, links = _adjacency(net, tol)
    used = sorted(set(labels))
    if len(used) <= 1:
        return True
    parent = {u: u for u in used}

    def find(u):
        while parent[u] != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    for a, b in links:
        parent[find(a)] = find(b)
    roots = {find(u) for u in used}
    return len(roots) == 1


def has_loop(net: EmbeddedNetwork, tol=1e-9):
    labels, links = _adjacency(net, tol)
    used = sorted(set(labels))
    parent = {u: u for u in used}

    def find(u):
        while parent[u] != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    for a, b in links:
        ra, rb = find(a), find(b)
        if ra == rb:
            return True
        parent[ra] = rb
    return False


def _clip_pieces_outside_disk(pieces, center, rho):
    out = []
    for p in pieces:
        if isinstance(p, Segment):
            out.extend(clip_segment_outside_disk(p, center, rho))
        else:
            out.extend(clip_arc_outside_disk(p, center, rho))
    return out


def default_rho_grid(M: ConvexCurve):
    R = M.min_curvature_radius()
    return [1e-3 * R, 1e-2 * R, 5e-2 * R]


def classify_point(net, M: ConvexCurve, r, x, rho_grid=None,
                   n_samples=4096, tol_energy=None):
    """Energetic-point test by ball removal on a grid of radii.

    x is energetic when removing B_rho(x) from the network pushes the
    sampled energy above r + tol for every rho in the grid.  Energetic
    points on M_r are non-isolated (they come in arcs); off M_r they are
    isolated tips.
    """
    x = np.asarray(x, dtype=float)
    if rho_grid is None:
        rho_grid = default_rho_grid(M)
    if tol_energy is None:
        tol_energy = 1e-6 * M.min_curvature_radius()
    pieces = net.pieces() if isinstance(net, EmbeddedNetwork) else list(net)
    witness = None
    s_foot = M.project(x)[0]
    for rho in sorted(rho_grid):
        clipped = _clip_pieces_outside_disk(pieces, x, rho)
        # the uncovered bump sits near the feet of the removed ball, within
        # about r of them, and can be far narrower than the coarse spacing;
        # spacing rho/2 guarantees detection of a Lipschitz bump of size
        # about rho against the tolerance
        half = 1.5 * (r + rho)
        v, s = _max_dist_refined(clipped, M, n_samples,
                                 extra_windows=[(s_foot, half, rho / 2.0)])
        if v <= r + tol_energy:
            return PointClass("non_energetic")
        if witness is None:
            witness = M.curve_point(s)
    mr = net.mr_curve if isinstance(net, EmbeddedNetwork) else None
    label = "isolated_energetic"
    if mr is not None and abs(mr.signed_distance(x)) <= 1e-6 * mr.arc_length:
        label = "non_isolated_energetic"
    return PointClass(label, witness)


def chord_length_bound(M: ConvexCurve, r):
    """Upper bound on the length of a straight piece strictly inside the eroded body."""
    if r <= 0:
        return 0.0
    if M.kind == "circle":
        R = M.params["R"]
        if not r < R:
            raise ValueError("need r < R")
        return 2.0 * r * math.sqrt(1.0 - r * r / (4.0 * R * R))
    return 2.0 * r


def canonicalize(net: EmbeddedNetwork, angle_tol=1e-7, tol=1e-9):
    """Simplify a network without moving it.

    Duplicate vertices are unified; arcs sharing an endpoint are chained into
    maximal arcs (a chain spanning the whole curve becomes a full loop);
    degree-2 vertices joining two near-collinear segments are removed.
    """
    # unify coincident vertices
    labels = net._vertex_clusters(tol)
    remap = {}
    verts = []
    for i, lab in enumerate(labels):
        if lab not in remap:
            remap[lab] = len(verts)
            verts.append(net.vertices[lab])
    vmap = [remap[lab] for lab in labels]
    edges = []
    for i, j in net.edges:
        a, b = vmap[i], vmap[j]
        if a != b and (a, b) not in edges and (b, a) not in edges:
            edges.append((a, b))
    arcs = [MrArc(a.s0, a.s1, vmap[a.v0], vmap[a.v1], a.full) for a in net.mr_arcs]

    # chain arcs end-to-start
    if arcs and not any(a.full for a in arcs):
        L = net.mr_curve.arc_length
        changed = True
        while changed and len(arcs) > 1:
            changed = False
            for x in range(len(arcs)):
                for y in range(len(arcs)):
                    if x == y:
                        continue
                    ax, ay = arcs[x], arcs[y]
                    if ax.v1 == ay.v0 and abs((ay.s0 - ax.s1) % L) <= tol * L:
                        arcs[x] = MrArc(ax.s0, ay.s1, ax.v0, ay.v1)
                        arcs.pop(y)
                        changed = True
                        break
                if changed:
                    break
        if len(arcs) == 1 and arcs[0].v0 == arcs[0].v1:
            a = arcs[0]
            span = (a.s1 - a.s0) % L
            if span <= tol * L or span >= L * (1 - tol):
                arcs = [MrArc(a.s0, a.s0, a.v0, a.v0, full=True)]

    out = EmbeddedNetwork(np.array(verts, dtype=float).reshape(-1, 2),
                          edges, arcs, net.mr_curve)

    # merge collinear degree-2 chains (vertices not used by any arc)
    changed = True
    while changed:
        changed = False
        deg = {}
        for i, j in out.edges:
            deg.setdefault(i, []).append((i, j))
            deg.setdefault(j, []).append((i, j))
        arc_verts = set()
        for a in out.mr_arcs:
            arc_verts.update((a.v0, a.v1))
        for v, inc in deg.items():
            if v in arc_verts or len(inc) != 2:
                continue
            (i1, j1), (i2, j2) = inc
            o1 = j1 if i1 == v else i1
            o2 = j2 if i2 == v else i2
            if o1 == o2:
                continue
            d1 = out.vertices[v] - out.vertices[o1]
            d2 = out.vertices[o2] - out.vertices[v]
            n1, n2 = norm(d1), norm(d2)
            if n1 <= tol * out.scale or n2 <= tol * out.scale:
                continue
            ang = abs(directed_angle_vec(d1, d2))
            if ang <= angle_tol:
                new_edges = [e for e in out.edges if v not in e]
                new_edges.append((o1, o2))
                out = EmbeddedNetwork(out.vertices, new_edges, out.mr_arcs, out.mr_curve)
                changed = True
                break

    # drop unreferenced vertices
    used = sorted({i for e in out.edges for i in e}
                  | {a.v0 for a in out.mr_arcs} | {a.v1 for a in out.mr_arcs})
    remap2 = {old: new for new, old in enumerate(used)}
    return EmbeddedNetwork(out.vertices[used],
                           [(remap2[i], remap2[j]) for i, j in out.edges],
                           [MrArc(a.s0, a.s1, remap2[a.v0], remap2[a.v1], a.full)
                            for a in out.mr_arcs],
                           out.mr_curve)


# ---------------------------------------------------------------------------
# component graph
# ---------------------------------------------------------------------------

@dataclass
class GraphNode:
    kind: str                     # 'component' (off the eroded body) or 'arc' (on M_r)
    piece_chain: list             # geometric pieces of this node
    entering: list                # [(vertex_id, s_on_mr)] contact points with M_r
    q: CurveArc = None            # covered arc of M
    n_energetic: int = 0
    m_entering: int = 0
    arc_interval: tuple = None    # (s0, s1) on M_r for 'arc' nodes
    vertex_ids: tuple = ()
    tips: tuple = ()              # off-curve degree-1 vertex ids


@dataclass
class ComponentGraph:
    nodes: list
    edges: list                   # (i, j, via) with via in {'chord', 'touch'}
    mr: ConvexCurve
    chords: list = field(default_factory=list)

    def degree(self, i):
        return sum(1 for a, b, _ in self.edges if i in (a, b))

    def degrees(self):
        return [self.degree(i) for i in range(len(self.nodes))]

    def is_path(self):
        n = len(self.nodes)
        if n == 0:
            return False
        if n == 1:
            return False  # a single node cannot be a path with an edge
        degs = self.degrees()
        if sorted(degs)[:2] != [1, 1] or any(d > 2 for d in degs):
            return False
        if len(self.edges) != n - 1:
            return False
        # connectivity
        seen = {0}
        frontier = [0]
        while frontier:
            cur = frontier.pop()
            for a, b, _ in self.edges:
                if cur not in (a, b):
                    continue
                nxt = b if a == cur else a
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        return len(seen) == n

    def path_order(self):
        """Node indices from one degree-1 end to the other."""
        if not self.is_path():
            raise NotAPath("component graph is not a path")
        degs = self.degrees()
        start = degs.index(1)
        order = [start]
        prev = None
        while True:
            nxts = [b if a == order[-1] else a
                    for a, b, _ in self.edges
                    if order[-1] in (a, b) and (b if a == order[-1] else a) != prev]
            if not nxts:
                break
            prev = order[-1]
            order.append(nxts[0])
        return order


def _covered_interval(pieces, M: ConvexCurve, r, n_coarse=2048, eps=None):
    """The arc {y in M : dist(y, pieces) <= r} as a CurveArc, refined by bisection.

    Returns None when nothing is covered; the full curve when everything is.
    """
    if eps is None:
        eps = 1e-9 * r
    pts, ss = M.sample(n_coarse)
    d = dist_point_pieces(pts, pieces)
    inside = d <= r + eps
    if not inside.any():
        return None
    if inside.all():
        return M.full_arc()
    # largest contiguous run with wraparound
    n = len(inside)
    runs = []
    i = 0
    while i < n:
        if inside[i]:
            j = i
            while j < n and inside[j]:
                j += 1
            runs.append((i, j - 1))
            i = j
        else:
            i += 1
    if inside[0] and inside[-1] and len(runs) > 1:
        first, last = runs[0], runs.pop()
        runs[0] = (last[0], first[1] + n)
    i0, i1 = max(runs, key=lambda ab: ab[1] - ab[0])
    h = M.arc_length / n_coarse

    def g(s):
        return float(dist_point_pieces(M.point(s % M.arc_length), pieces)) - r

    # refine the two boundary crossings
    s_lo_out, s_lo_in = (i0 - 1) * h, i0 * h
    s_hi_in, s_hi_out = i1 * h, (i1 + 1) * h
    try:
        s0 = brentq(g, s_lo_out, s_lo_in, xtol=1e-13 * M.arc_length)
    except ValueError:
        s0 = s_lo_in
    try:
        s1 = brentq(g, s_hi_in, s_hi_out, xtol=1e-13 * M.arc_length)
    except ValueError:
        s1 = s_hi_in
    return M.arc(s0 % M.arc_length, s1 % M.arc_length)


def component_graph(net: EmbeddedNetwork, M: ConvexCurve, r,
                    classify_samples=2048, energetic_test=True):
    """Split the network at M_r into the abstract graph G.

    Nodes are closures of connected components of the network outside the
    eroded body (kind 'component') and maximal covered arcs of M_r with an
    energetic interior point (kind 'arc').  Straight runs lying on a flat
    part of M_r without an interior energetic point act as chords instead,
    as do segments through the interior.
    """
    mr = net.mr_curve
    if mr is None:
        mr = M.erode(r)
        net = EmbeddedNetwork(net.vertices, net.edges, net.mr_arcs, mr)
    scale = net.scale
    band = 1e-9 * scale
    ambiguous = 1e-7 * scale

    verts = net.vertices
    side = np.empty(len(verts))
    s_on_mr = np.empty(len(verts))
    for i, v in enumerate(verts):
        sd = mr.signed_distance(v)
        if abs(sd) <= band:
            side[i] = 0.0
        elif abs(sd) <= ambiguous:
            raise AmbiguousCrossing(
                f"vertex {i} at {tuple(v)} lies {sd:.3e} from the eroded curve")
        else:
            side[i] = math.copysign(1.0, sd)
        s_on_mr[i] = mr.project(v)[0]

    # split segments crossing the eroded curve transversally
    work_edges = []   # (vi, vj) indices into an extended vertex list
    ext_vertices = [tuple(v) for v in verts]
    ext_side = list(side)
    ext_s = list(s_on_mr)

    def add_vertex(p, sd_zero=True):
        ext_vertices.append(tuple(p))
        ext_side.append(0.0)
        ext_s.append(mr.project(p)[0])
        return len(ext_vertices) - 1

    for (i, j) in net.edges:
        if side[i] * side[j] < 0:
            a, b = verts[i], verts[j]

            def f(t):
                return mr.signed_distance(a + t * (b - a))

            t = brentq(f, 0.0, 1.0, xtol=1e-14)
            k = add_vertex(a + t * (b - a))
            work_edges.append((i, k))
            work_edges.append((k, j))
        else:
            work_edges.append((i, j))

    ext_vertices = np.array(ext_vertices, dtype=float)

    outside_edges, inside_edges, on_edges = [], [], []
    for (i, j) in work_edges:
        mid = 0.5 * (ext_vertices[i] + ext_vertices[j])
        sd = mr.signed_distance(mid)
        if ext_side[i] > 0 or ext_side[j] > 0 or sd > band:
            outside_edges.append((i, j))
        elif abs(sd) <= band and ext_side[i] == 0 and ext_side[j] == 0:
            on_edges.append((i, j))
        else:
            inside_edges.append((i, j))

    # --- outside components: connectivity only through strictly outside vertices
    def component_merge(edge_list):
        parent = {}

        def find(u):
            parent.setdefault(u, u)
            while parent[u] != u:
                parent[u] = parent[parent[u]]
                u = parent[u]
            return u

        for idx, (i, j) in enumerate(edge_list):
            find(("e", idx))
            for v in (i, j):
                if ext_side[v] != 0:
                    parent[find(("v", v))] = find(("e", idx))
                else:
                    parent.setdefault(("v", v), ("v", v))
        groups = {}
        for idx in range(len(edge_list)):
            groups.setdefault(find(("e", idx)), []).append(idx)
        return list(groups.values())

    outside_groups = component_merge(outside_edges)

    def interval_energetic(s_mid_on_mr):
        if not energetic_test:
            return True
        x = mr.point(s_mid_on_mr)
        pc = classify_point(net, M, r, x, n_samples=classify_samples)
        return pc.energetic

    # --- on-curve intervals: explicit arcs plus straight runs lying on M_r
    L = mr.arc_length
    raw_intervals = []
    for a in net.mr_arcs:
        if a.full:
            raw_intervals.append((0.0, L, True))
        else:
            raw_intervals.append((a.s0 % L, ((a.s1 - a.s0) % L), False))
    for (i, j) in on_edges:
        s_i, s_j = ext_s[i], ext_s[j]
        span = (s_j - s_i) % L
        if span <= L / 2:
            raw_intervals.append((s_i, span, False))
        else:
            raw_intervals.append((s_j, (s_i - s_j) % L, False))

    merged = _merge_intervals(raw_intervals, L, tol=band)

    nodes = []
    # arc nodes (or chord-role intervals)
    chordlike = []
    for (s0, span, full) in merged:
        mid = (s0 + span / 2.0) % L
        is_arc = interval_energetic(mid)
        if is_arc:
            arc_pieces = mr.pieces_between(s0, (s0 + span) % L, full)
            nodes.append(GraphNode(
                kind="arc",
                piece_chain=arc_pieces,
                entering=[],
                arc_interval=(0.0, L) if full else (s0, (s0 + span) % L),
                q=None,
            ))
        else:
            chordlike.append((s0, span))

    arc_nodes = list(range(len(nodes)))

    for group in outside_groups:
        edge_ids = group
        vset = set()
        for idx in edge_ids:
            vset.update(outside_edges[idx])
        entering = sorted((v, ext_s[v]) for v in vset if ext_side[v] == 0)
        chain = [Segment(ext_vertices[i], ext_vertices[j])
                 for i, j in (outside_edges[idx] for idx in edge_ids)]
        deg = {}
        for idx in edge_ids:
            for v in outside_edges[idx]:
                deg[v] = deg.get(v, 0) + 1
        tips = tuple(v for v, d in deg.items() if d == 1 and ext_side[v] != 0)
        nodes.append(GraphNode(
            kind="component",
            piece_chain=chain,
            entering=[(v, s) for v, s in entering],
            m_entering=len(entering),
            vertex_ids=tuple(sorted(vset)),
            tips=tips,
        ))

    comp_nodes = list(range(len(arc_nodes), len(nodes)))

    # --- edges of G
    edges = []

    def node_of_vertex_on_mr(v):
        hits = []
        for ni in comp_nodes:
            if any(v == vv for vv, _ in nodes[ni].entering):
                hits.append(ni)
        return hits

    def arc_containing(s):
        for ni in arc_nodes:
            s0, s1 = nodes[ni].arc_interval
            if s1 == L and s0 == 0.0:
                return ni
            span = (s1 - s0) % L
            off = (s - s0) % L
            if off <= span + 1e-7 * L or off >= L - 1e-7 * L:
                return ni
        return None

    # chords: connected runs of inside edges
    inside_groups = component_merge(inside_edges) if inside_edges else []
    chords = []
    for group in inside_groups:
        vset = set()
        for idx in group:
            vset.update(inside_edges[idx])
        boundary = [v for v in vset if ext_side[v] == 0]
        if len(boundary) != 2:
            raise ComponentGraphError(
                "an interior structure touches the eroded curve at "
                f"{len(boundary)} points; expected a simple chord")
        chords.append((boundary[0], boundary[1], group))
    # chord-role flat intervals connect whatever sits at their two ends
    for (s0, span) in chordlike:
        v0 = _nearest_vertex(ext_vertices, ext_s, mr, s0, band)
        v1 = _nearest_vertex(ext_vertices, ext_s, mr, (s0 + span) % L, band)
        chords.append((v0, v1, None))

    for va, vb, _group in chords:
        ends = []
        for v in (va, vb):
            hits = node_of_vertex_on_mr(v)
            if not hits:
                ni = arc_containing(ext_s[v])
                if ni is None:
                    raise ComponentGraphError(
                        f"chord endpoint {v} is attached to nothing on the eroded curve")
                hits = [ni]
            ends.append(hits)
        # a chord links every node touching one end to every node at the other
        for na in ends[0]:
            for nb in ends[1]:
                edges.append((na, nb, "chord"))

    # touching: component-component and component-arc via shared entering points
    for ia in range(len(nodes)):
        for ib in range(ia + 1, len(nodes)):
            na, nb = nodes[ia], nodes[ib]
            if na.kind == "arc" and nb.kind == "arc":
                continue
            touch = False
            if na.kind == "component" and nb.kind == "component":
                sa = {v for v, _ in na.entering}
                touch = any(v in sa for v, _ in nb.entering)
            else:
                comp = na if na.kind == "component" else nb
                arcn = na if na.kind == "arc" else nb
                for _, s in comp.entering:
                    s0, s1 = arcn.arc_interval
                    span = (s1 - s0) % L if (s0, s1) != (0.0, L) else L
                    off = (s - s0) % L
                    if off <= span + 1e-7 * L or off >= L - 1e-7 * L:
                        touch = True
                        break
            if touch:
                edges.append((ia, ib, "touch"))

    graph = ComponentGraph(nodes=nodes, edges=edges, mr=mr,
                           chords=[Segment(ext_vertices[a], ext_vertices[b])
                                   for a, b, _ in chords])

    # covered arcs q_S and energetic counts
    inner, to_in, to_out = M.erosion_param_maps(r)
    for node in nodes:
        if node.kind == "arc":
            s0, s1 = node.arc_interval
            if (s0, s1) == (0.0, L):
                node.q = M.full_arc()
            else:
                node.q = M.arc(to_out(s0), to_out(s1))
        else:
            node.q = _covered_interval(node.piece_chain, M, r)
        if node.kind == "component" and energetic_test:
            count = 0
            for v in node.tips:
                if classify_point(net, M, r, ext_vertices[v],
                                  n_samples=classify_samples).energetic:
                    count += 1
            for v, _s in node.entering:
                if classify_point(net, M, r, ext_vertices[v],
                                  n_samples=classify_samples).energetic:
                    count += 1
            node.n_energetic = count
    return graph


def _merge_intervals(raw, L, tol):
    """Merge (start, span, full) intervals on a circle of circumference L."""
    if any(full for _, _, full in raw):
        return [(0.0, L, True)]
    if not raw:
        return []
    items = sorted((s % L, span) for s, span, _ in raw)
    merged = []
    for s, span in items:
        if merged and (s - merged[-1][0]) % L <= merged[-1][1] + tol:
            prev_s, prev_span = merged[-1]
            end = max(prev_span, (s - prev_s) % L + span)
            merged[-1] = (prev_s, end)
        else:
            merged.append((s, span))
    # wraparound merge of last into first
    if len(merged) > 1:
        s_first, span_first = merged[0]
        s_last, span_last = merged[-1]
        if (s_first - s_last) % L <= span_last + tol:
            total = (s_first - s_last) % L + span_first
            merged[0] = (s_last, max(span_last, total))
            merged.pop()
    out = []
    for s, span in merged:
        if span >= L - tol:
            return [(0.0, L, True)]
        out.append((s, span, False))
    return out


def _nearest_vertex(ext_vertices, ext_s, mr, s, band):
    p = mr.point(s)
    dists = np.linalg.norm(ext_vertices - p[None, :], axis=1)
    i = int(np.argmin(dists))
    if dists[i] > 1e-6 * max(mr.arc_length, 1.0):
        raise ComponentGraphError("no vertex at the end of a flat chord run")
    return i


# ---------------------------------------------------------------------------
# turning decomposition
# ---------------------------------------------------------------------------

@dataclass
class ComponentTurn:
    node_index: int
    role: str            # 'left' | 'right' | 'middle' | 'arc'
    turn_s: float
    turn_q: float
    connectors: float    # connector angles attributed to this node
    junction_in: float   # corner where the boundary enters this node
    junction_out: float

    @property
    def lhs(self):
        return self.turn_q

    @property
    def rhs(self):
        return self.turn_s + self.connectors

    @property
    def margin(self):
        return self.rhs - self.lhs


@dataclass
class TurningDecomposition:
    components: list
    A: CurvePoint
    tip_left: np.ndarray
    tip_right: np.ndarray
    angle_tip_left: float    # angle([C_l S_l'), [S_l' A))
    angle_A_left: float      # angle([S_l' A), a)
    angle_A_right: float     # angle(a, [A S_r'))
    angle_tip_right: float   # angle([A S_r'), [S_r' C_r))
    junction_corners: list
    total_turn: float        # turning of the closed boundary of T

    @property
    def connector_sum(self):
        return (self.angle_tip_left + self.angle_A_left +
                self.angle_A_right + self.angle_tip_right)

    def inequalities_hold(self, tol=1e-6):
        return all(c.margin >= -tol for c in self.components)

    def equalities_hold(self, tol=1e-6):
        return all(abs(c.margin) <= tol for c in self.components)


def _q_turn(q: CurveArc):
    """Tangent rotation along the covered arc (clockwise positive)."""
    if q is None:
        return 0.0
    if q.full:
        return TAU
    pieces = q.to_pieces()
    if not pieces:
        return 0.0
    return turning(pieces, closed=False)


def _component_path(node: GraphNode, start_pt, end_pt, scale):
    """Oriented chain of node segments from start_pt to end_pt (tree path).

    Either endpoint may sit in the middle of a segment (the nearest point of
    the component to A); such segments are split at the endpoint first.
    """
    tol = 1e-9 * scale
    segs = list(node.piece_chain)
    for p in (start_pt, end_pt):
        hit = None
        for idx, s in enumerate(segs):
            if norm(s.a - p) <= tol or norm(s.b - p) <= tol:
                hit = "vertex"
                break
        if hit == "vertex":
            continue
        for idx, s in enumerate(segs):
            if dist_point_segment(p, s) <= tol:
                segs[idx:idx + 1] = [Segment(s.a, np.asarray(p, dtype=float)),
                                     Segment(np.asarray(p, dtype=float), s.b)]
                break

    def key(p):
        return (round(p[0] / tol), round(p[1] / tol))

    adj = {}
    for idx, s in enumerate(segs):
        adj.setdefault(key(s.a), []).append((idx, False))
        adj.setdefault(key(s.b), []).append((idx, True))

    start_k, end_k = key(start_pt), key(end_pt)
    if start_k not in adj or end_k not in adj:
        raise ComponentGraphError("path endpoints are not vertices of the component")
    # BFS over oriented segment traversals
    frontier = [(start_k, [])]
    seen = {start_k}
    while frontier:
        cur, path = frontier.pop(0)
        if cur == end_k:
            return [segs[i].reversed() if rev else segs[i] for i, rev in path]
        for idx, rev in adj.get(cur, []):
            seg = segs[idx]
            nxt = key(seg.a if rev else seg.b)
            if nxt in seen:
                continue
            seen.add(nxt)
            frontier.append((nxt, path + [(idx, rev)]))
    raise ComponentGraphError("component is not connected between its contact points")


def turning_decomposition(net: EmbeddedNetwork, M: ConvexCurve, r,
                          graph: ComponentGraph = None, tol=1e-6):
    """Turning split of the closed boundary of the region T.

    The boundary runs from the meeting point A to the right tip, through the
    network to the left tip, and back to A; its total turning is 2*pi.  Per
    node the covered-arc turning turn(q_S) is compared against turn(S) plus,
    for the two ending components, the connector angles at the tips and at A.
    """
    if graph is None:
        graph = component_graph(net, M, r)
    order = graph.path_order()
    mr = graph.mr
    scale = max(M.arc_length, 1.0)
    L = M.arc_length

    first, last = graph.nodes[order[0]], graph.nodes[order[-1]]
    if first.kind != "component" or last.kind != "component":
        raise NotAPath("path must end with components off the eroded curve")
    if first.q is None or last.q is None:
        raise NoCommonCoveredPoint("an ending component covers nothing")

    sA = _arc_intersection(first.q, last.q, L)
    if sA is None:
        raise NoCommonCoveredPoint("ending components cover disjoint arcs of M")
    A = M.curve_point(sA)

    # boundary travel is clockwise: the right end's covered arc starts at A,
    # the left end's covered arc ends at A
    start_gap_first = (first.q.s0 - sA) % L
    start_gap_last = (last.q.s0 - sA) % L
    if min(start_gap_first, L - start_gap_first) > min(start_gap_last, L - start_gap_last):
        order = order[::-1]
    right_node = graph.nodes[order[0]]
    left_node = graph.nodes[order[-1]]

    tip_r = _nearest_point_on_chain(right_node.piece_chain, A.point)
    tip_l = _nearest_point_on_chain(left_node.piece_chain, A.point)

    # walk the path, collecting oriented chains per node (chords get ni=None)
    chains = []
    cursor = tip_r
    for step, ni in enumerate(order):
        node = graph.nodes[ni]
        if node.kind == "component":
            if step == len(order) - 1:
                target = tip_l
            else:
                target = _exit_contact(graph, node, graph.nodes[order[step + 1]],
                                       cursor, scale)
            chain = _component_path(node, cursor, target, scale)
            chains.append((ni, chain))
            cursor = target
        else:
            s0, s1 = node.arc_interval
            full = node.arc_interval == (0.0, mr.arc_length)
            if not full and norm(cursor - mr.point(s0)) > 1e-6 * scale:
                raise ComponentGraphError(
                    "boundary would traverse an arc of the eroded curve "
                    "counterclockwise; network is not minimizer-shaped")
            chain = mr.pieces_between(s0, s1, full)
            chains.append((ni, chain))
            cursor = mr.point(s1)
        if step + 1 < len(order):
            hop = _chord_between(graph, ni, order[step + 1], cursor, scale)
            if hop is not None:
                chains.append((None, [hop]))
                cursor = hop.b

    # assemble the closed boundary: A -> tip_r, chains, tip_l -> A
    conn_r = Segment(A.point, tip_r)
    conn_l = Segment(tip_l, A.point)
    full_chain = [conn_r] + [p for _, chain in chains for p in chain] + [conn_l]
    total = turning(full_chain, closed=True, tol=1e-6)

    # connector angles; `a` is the tangent ray of M at A in travel direction
    a_dir = M.tangent(sA)
    dir_A_to_tip_r = tip_r - A.point
    dir_tip_l_to_A = A.point - tip_l
    angle_A_right = directed_angle_vec(a_dir, dir_A_to_tip_r)
    angle_A_left = directed_angle_vec(dir_tip_l_to_A, a_dir)
    angle_tip_right = directed_angle_vec(dir_A_to_tip_r, _chain_dir(chains[0][1][0], True))
    angle_tip_left = directed_angle_vec(_chain_dir(chains[-1][1][-1], False), dir_tip_l_to_A)

    # junction corners between consecutive chains
    junctions = []
    for k in range(len(chains) - 1):
        out_t = _chain_dir(chains[k][1][-1], False)
        in_t = _chain_dir(chains[k + 1][1][0], True)
        junctions.append(directed_angle_vec(out_t, in_t))

    components = []
    for k, (ni, chain) in enumerate(chains):
        if ni is None:
            continue
        node = graph.nodes[ni]
        t_s = turning(chain, closed=False, tol=1e-6)
        t_q = _q_turn(node.q)
        if ni == order[0]:
            role, conn = "right", angle_A_right + angle_tip_right
        elif ni == order[-1]:
            role, conn = "left", angle_A_left + angle_tip_left
        elif node.kind == "arc":
            role, conn = "arc", 0.0
        else:
            role, conn = "middle", 0.0
        j_in = junctions[k - 1] if k > 0 else 0.0
        j_out = junctions[k] if k < len(junctions) else 0.0
        components.append(ComponentTurn(ni, role, t_s, t_q, conn, j_in, j_out))

    return TurningDecomposition(
        components=components,
        A=A,
        tip_left=tip_l,
        tip_right=tip_r,
        angle_tip_left=angle_tip_left,
        angle_A_left=angle_A_left,
        angle_A_right=angle_A_right,
        angle_tip_right=angle_tip_right,
        junction_corners=junctions,
        total_turn=total,
    )


def _arc_intersection(qa: CurveArc, qb: CurveArc, L):
    """Midpoint of the intersection of two arcs of the same curve, or None."""
    if qa.full or qb.full:
        src = qb if qa.full else qa
        return (src.s0 + src.length / 2.0) % L

    def inside(s, q):
        off = (s - q.s0) % L
        return off <= q.length + 1e-9 * L

    # candidate overlap endpoints
    cands = []
    for s in (qa.s0, qa.s1, qb.s0, qb.s1):
        if inside(s, qa) and inside(s, qb):
            cands.append(s % L)
    if not cands:
        return None
    if len(cands) == 1:
        return cands[0]
    # midpoint of the shortest arc containing all candidates
    best = None
    for s in cands:
        for t in cands:
            span = (t - s) % L
            if all((u - s) % L <= span + 1e-12 * L for u in cands):
                if best is None or span < best[1]:
                    best = (s, span)
    s, span = best
    return (s + span / 2.0) % L


def _nearest_point_on_chain(chain, p):
    best, best_d = None, math.inf
    for piece in chain:
        if isinstance(piece, Segment):
            d = piece.b - piece.a
            dd = float(d @ d)
            t = 0.0 if dd == 0 else max(0.0, min(1.0, float((p - piece.a) @ d) / dd))
            q = piece.a + t * d
        else:
            v = p - piece.center
            phi = math.atan2(v[1], v[0])
            if piece.contains_angle(phi):
                q = piece.center + piece.radius * np.array([math.cos(phi), math.sin(phi)])
            else:
                q = min((piece.start_point, piece.end_point), key=lambda e: norm(p - e))
        dist = norm(p - q)
        if dist < best_d:
            best, best_d = q, dist
    return best


def _chain_dir(piece, at_start):
    if isinstance(piece, Segment):
        return piece.direction
    return piece.tangent_at(0.0 if at_start else 1.0)


def _exit_contact(graph, node, next_node, cursor, scale):
    """The entering point through which `node` hands over to `next_node`."""
    mr = graph.mr
    contacts = [mr.point(s) for _, s in node.entering]
    if not contacts:
        raise ComponentGraphError("a path component has no contact with the eroded curve")
    best, best_d = None, math.inf
    for c in contacts:
        if norm(c - cursor) <= 1e-9 * scale and len(contacts) > 1:
            continue  # do not exit where we entered
        d = float(dist_point_pieces(np.asarray(c, dtype=float), next_node.piece_chain))
        if d < best_d:
            best, best_d = c, d
    return best


def _chord_between(graph, ni, nj, cursor, scale):
    """The chord segment linking nodes ni and nj, oriented to start at cursor."""
    for (a, b, via) in graph.edges:
        if via != "chord" or {a, b} != {ni, nj}:
            continue
        for seg in graph.chords:
            if norm(seg.a - cursor) <= 1e-6 * scale:
                return seg
            if norm(seg.b - cursor) <= 1e-6 * scale:
                return seg.reversed()
    return None


# ---------------------------------------------------------------------------
# JSON round trip
# ---------------------------------------------------------------------------

def network_to_json(net: EmbeddedNetwork):
    out = {
        "vertices": [[float(x), float(y)] for x, y in net.vertices],
        "edges": [[int(i), int(j)] for i, j in net.edges],
        "mr_arcs": [{"s0": a.s0, "s1": a.s1, "v0": a.v0, "v1": a.v1, "full": a.full}
                    for a in net.mr_arcs],
    }
    return out


def network_from_json(obj, mr_curve: ConvexCurve = None):
    vertices = [tuple(v) for v in obj.get("vertices", [])]
    edges = [tuple(e) for e in obj.get("edges", [])]
    arcs = []
    vertices = list(vertices)
    for a in obj.get("mr_arcs", []):
        if mr_curve is None:
            raise ValueError("network has arcs but no eroded curve was supplied")
        s0, s1 = float(a["s0"]), float(a["s1"])
        full = bool(a.get("full", False))
        if "v0" in a:
            v0, v1 = int(a["v0"]), int(a["v1"])
        else:
            vertices.append(tuple(mr_curve.point(s0)))
            v0 = len(vertices) - 1
            vertices.append(tuple(mr_curve.point(s1)))
            v1 = len(vertices) - 1
        arcs.append(MrArc(s0, s1, v0, v1, full))
    return EmbeddedNetwork(np.array(vertices, dtype=float).reshape(-1, 2),
                           edges, arcs, mr_curve)
