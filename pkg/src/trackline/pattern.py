"""Corner vectors realized as patterns: arcs, points, tracks and regions.

A solution vector is realized with the canonical nested arc structure: at
corner i of a triangle, arc k joins the k-th point from the corner's vertex
on each adjacent side.  Point order along a 1-cell runs from the edge's
initial vertex; a side with orientation -1 sees that order reversed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .complex import TriangularComplex, edge_weight, matching_system, residual
from .errors import InternalInvariant, NegativeEntry, NotASolution, TwistedInput


class Arc(NamedTuple):
    """One arc, cutting off ``corner`` of ``triangle`` at nesting ``depth``.

    p lies on side ``corner``, q on side ``corner + 1``; dirf_* record, per
    endpoint, whether the cut-off corner lies in the forward direction of the
    underlying 1-cell (used for coorientation bookkeeping).
    """

    triangle: int
    corner: int
    depth: int
    p: int
    dirf_p: bool
    q: int
    dirf_q: bool


@dataclass(frozen=True)
class Pattern:
    cx: TriangularComplex
    vector: tuple[int, ...]
    edge_points: tuple[tuple[int, ...], ...]  # per edge, ordered global point ids
    point_position: tuple[tuple[int, int], ...]  # per point, (edge, index)
    arcs: tuple[Arc, ...]

    @property
    def point_count(self) -> int:
        return len(self.point_position)

    @property
    def arc_count(self) -> int:
        return len(self.arcs)

    @property
    def euler(self) -> int:
        return self.point_count - self.arc_count

    def is_empty(self) -> bool:
        return not self.arcs and not self.point_position

    def point_degrees(self) -> list[int]:
        deg = [0] * self.point_count
        for arc in self.arcs:
            deg[arc.p] += 1
            deg[arc.q] += 1
        return deg


def _side_point(cx, edge_points, t, s, traversal_pos):
    edge, orient = cx.triangles[t][s]
    pts = edge_points[edge]
    idx = traversal_pos if orient > 0 else len(pts) - 1 - traversal_pos
    return pts[idx]


def realize(v, cx: TriangularComplex) -> Pattern:
    """Canonical pattern for a non-negative solution vector."""
    v = tuple(v)
    if any(x < 0 for x in v):
        raise NegativeEntry("corner vector has a negative entry")
    sys = matching_system(cx)
    if any(residual(sys, v)):
        raise NotASolution("corner vector does not satisfy the matching equations")
    edge_points: list[tuple[int, ...]] = []
    point_position: list[tuple[int, int]] = []
    next_id = 0
    for e in range(cx.edge_count):
        w = edge_weight(cx, v, e)
        ids = tuple(range(next_id, next_id + w))
        edge_points.append(ids)
        point_position.extend((e, k) for k in range(w))
        next_id += w
    arcs: list[Arc] = []
    for t, tri in enumerate(cx.triangles):
        weights = []
        for s in range(3):
            e, _ = tri[s]
            weights.append(len(edge_points[e]))
        for i in range(3):
            x = v[3 * t + i]
            s1, s2 = i, (i + 1) % 3
            for k in range(1, x + 1):
                p = _side_point(cx, edge_points, t, s1, weights[s1] - k)
                q = _side_point(cx, edge_points, t, s2, k - 1)
                dirf_p = tri[s1][1] > 0
                dirf_q = tri[s2][1] < 0
                arcs.append(Arc(t, i, k, p, dirf_p, q, dirf_q))
    return Pattern(
        cx=cx,
        vector=v,
        edge_points=tuple(edge_points),
        point_position=tuple(point_position),
        arcs=tuple(arcs),
    )


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


@dataclass(frozen=True)
class Track:
    """A connected pattern (re-realized canonically from its own vector)."""

    pattern: Pattern

    @property
    def vector(self) -> tuple[int, ...]:
        return self.pattern.vector

    @property
    def euler(self) -> int:
        return self.pattern.euler

    @property
    def cx(self) -> TriangularComplex:
        return self.pattern.cx


def component_vectors(p: Pattern) -> list[tuple[int, ...]]:
    """Corner vectors of the connected components, ordered by least point id."""
    if p.is_empty():
        return []
    uf = _UnionFind(p.point_count)
    for arc in p.arcs:
        uf.union(arc.p, arc.q)
    comp_of_root: dict[int, int] = {}
    order: list[int] = []
    for pt in range(p.point_count):
        root = uf.find(pt)
        if root not in comp_of_root:
            comp_of_root[root] = len(order)
            order.append(root)
    vectors = [[0] * len(p.vector) for _ in order]
    for arc in p.arcs:
        c = comp_of_root[uf.find(arc.p)]
        vectors[c][3 * arc.triangle + arc.corner] += 1
    if any(deg == 0 for deg in p.point_degrees()):
        raise InternalInvariant("isolated pattern point")
    return [tuple(vec) for vec in vectors]


def components(p: Pattern) -> list[Track]:
    """Split a pattern into its connected tracks."""
    out = []
    for vec in component_vectors(p):
        sub = realize(vec, p.cx)
        if len(component_vectors(sub)) != 1:
            raise InternalInvariant("component vector did not realize connectedly")
        out.append(Track(sub))
    return out


def _coorientation_solve(p: Pattern):
    """2-color point directions across arcs; returns (consistent, colors).

    colors[pt] is True when the transverse direction at pt points forward
    along its 1-cell.  The first arc's cut-off corner fixes the global sign.
    """
    colors: dict[int, bool] = {}
    consistent = True
    adj: dict[int, list[tuple[int, bool]]] = {}
    for arc in p.arcs:
        parity = arc.dirf_p != arc.dirf_q
        adj.setdefault(arc.p, []).append((arc.q, parity))
        adj.setdefault(arc.q, []).append((arc.p, parity))
    for arc in p.arcs:
        if arc.p in colors:
            continue
        colors[arc.p] = arc.dirf_p
        stack = [arc.p]
        while stack:
            a = stack.pop()
            for bpt, parity in adj.get(a, ()):
                want = colors[a] != parity
                if bpt in colors:
                    if colors[bpt] != want:
                        consistent = False
                else:
                    colors[bpt] = want
                    stack.append(bpt)
    return consistent, colors


def is_twisted(t: Track) -> bool:
    """A track is twisted when its double is a single connected pattern.

    Both the doubling criterion and the coorientation-consistency criterion
    are computed; they must agree.
    """
    doubled = realize(tuple(2 * x for x in t.vector), t.cx)
    ncomp = len(component_vectors(doubled))
    if ncomp not in (1, 2):
        raise InternalInvariant(f"double of a track has {ncomp} components")
    by_double = ncomp == 1
    consistent, _ = _coorientation_solve(t.pattern)
    if by_double != (not consistent):
        raise InternalInvariant("twisting criteria disagree")
    return by_double


def coorientation(t: Track) -> dict[int, bool]:
    """Consistent transverse directions for an untwisted track."""
    consistent, colors = _coorientation_solve(t.pattern)
    if not consistent:
        raise TwistedInput("track is twisted; no global coorientation")
    return colors


FaceKey = tuple
PieceKey = tuple

BASEPOINT: PieceKey = ("V",)


def pattern_faces(p: Pattern) -> list[FaceKey]:
    """Complementary faces inside each triangle, in canonical order."""
    out: list[FaceKey] = []
    for t in range(len(p.cx.triangles)):
        out.append(("C", t))
        for i in range(3):
            for depth in range(p.vector[3 * t + i]):
                out.append(("F", t, i, depth))
    return out


def face_at(p: Pattern, t: int, s: int, gap: int) -> FaceKey:
    """Face of triangle t met by the side-s boundary gap at traversal index gap."""
    c1 = (s + 2) % 3
    c2 = s
    x1 = p.vector[3 * t + c1]
    x2 = p.vector[3 * t + c2]
    e, _ = p.cx.triangles[t][s]
    w = len(p.edge_points[e])
    if gap < x1:
        return ("F", t, c1, gap)
    if gap > w - x2:
        return ("F", t, c2, w - gap)
    return ("C", t)


def segment_key(p: Pattern, e: int, traversal_gap: int, orient: int) -> PieceKey:
    w = len(p.edge_points[e])
    j = traversal_gap if orient > 0 else w - traversal_gap
    return ("S", e, j)


@dataclass(frozen=True)
class RegionDecomposition:
    """Connected components of the complex cut along a pattern."""

    pattern: Pattern
    region_of: dict
    regions: tuple[tuple[PieceKey, ...], ...]
    basepoint_region: int

    @property
    def count(self) -> int:
        return len(self.regions)


def cut_regions(p: Pattern, cx: TriangularComplex | None = None) -> RegionDecomposition:
    if cx is not None and cx != p.cx:
        raise InternalInvariant("pattern realized on a different complex")
    cx = p.cx
    pieces: list[PieceKey] = list(pattern_faces(p))
    for e in range(cx.edge_count):
        w = len(p.edge_points[e])
        pieces.extend(("S", e, j) for j in range(w + 1))
    pieces.append(BASEPOINT)
    index = {piece: i for i, piece in enumerate(pieces)}
    uf = _UnionFind(len(pieces))
    for t, tri in enumerate(cx.triangles):
        for s in range(3):
            e, orient = tri[s]
            w = len(p.edge_points[e])
            for gap in range(w + 1):
                face = face_at(p, t, s, gap)
                seg = segment_key(p, e, gap, orient)
                uf.union(index[face], index[seg])
    for e in range(cx.edge_count):
        w = len(p.edge_points[e])
        uf.union(index[BASEPOINT], index[("S", e, 0)])
        uf.union(index[BASEPOINT], index[("S", e, w)])
    region_ids: dict[int, int] = {}
    region_of: dict[PieceKey, int] = {}
    members: list[list[PieceKey]] = []
    for i, piece in enumerate(pieces):
        root = uf.find(i)
        if root not in region_ids:
            region_ids[root] = len(members)
            members.append([])
        rid = region_ids[root]
        region_of[piece] = rid
        members[rid].append(piece)
    return RegionDecomposition(
        pattern=p,
        region_of=region_of,
        regions=tuple(tuple(m) for m in members),
        basepoint_region=region_of[BASEPOINT],
    )


def _edge_parity_even(p: Pattern) -> bool:
    return all(len(pts) % 2 == 0 for pts in p.edge_points)


def _two_sided_coloring_consistent(p: Pattern) -> bool:
    """Try to 2-color the cut pieces so the color flips across the pattern."""
    cx = p.cx
    pieces: list[PieceKey] = list(pattern_faces(p))
    for e in range(cx.edge_count):
        w = len(p.edge_points[e])
        pieces.extend(("S", e, j) for j in range(w + 1))
    pieces.append(BASEPOINT)
    index = {piece: i for i, piece in enumerate(pieces)}
    # Parity-union-find: edges with parity 0 keep color, parity 1 flip.
    parent = list(range(len(pieces)))
    rel = [0] * len(pieces)

    def find(x):
        if parent[x] == x:
            return x, 0
        root, r = find(parent[x])
        parent[x] = root
        rel[x] ^= r
        return root, rel[x]

    ok = True

    def union(a, b, parity):
        nonlocal ok
        ra, pa = find(a)
        rb, pb = find(b)
        if ra == rb:
            if pa ^ pb != parity:
                ok = False
        else:
            parent[rb] = ra
            rel[rb] = pa ^ pb ^ parity

    for t, tri in enumerate(cx.triangles):
        for s in range(3):
            e, orient = tri[s]
            w = len(p.edge_points[e])
            for gap in range(w + 1):
                face = face_at(p, t, s, gap)
                seg = segment_key(p, e, gap, orient)
                union(index[face], index[seg], 0)
    for e in range(cx.edge_count):
        w = len(p.edge_points[e])
        union(index[BASEPOINT], index[("S", e, 0)], 0)
        union(index[BASEPOINT], index[("S", e, w)], 0)
    # Flips: across each arc (adjacent faces within the triangle) and across
    # each point (consecutive segments of its edge).
    for arc in p.arcs:
        t, i, k = arc.triangle, arc.corner, arc.depth
        inner = ("F", t, i, k - 1)
        x = p.vector[3 * t + i]
        outer = ("F", t, i, k) if k < x else ("C", t)
        union(index[inner], index[outer], 1)
    for e in range(cx.edge_count):
        w = len(p.edge_points[e])
        for j in range(w):
            union(index[("S", e, j)], index[("S", e, j + 1)], 1)
    return ok


def is_separating(t: Track, cx: TriangularComplex | None = None) -> bool:
    """True when the complement of the track has exactly two regions.

    Computes three equivalent criteria (region count, even edge parities,
    global two-sided coloring) and insists they agree.
    """
    if is_twisted(t):
        raise TwistedInput("separation is only defined for untwisted tracks")
    by_regions = cut_regions(t.pattern, cx).count == 2
    by_parity = _edge_parity_even(t.pattern)
    by_coloring = _two_sided_coloring_consistent(t.pattern)
    if not (by_regions == by_parity == by_coloring):
        raise InternalInvariant("separation criteria disagree")
    return by_regions


@dataclass(frozen=True)
class BasisTrackReport:
    """Classification record for one basis element."""

    index: int
    vector: tuple[int, ...]
    component_count: int
    tracks: tuple[Track, ...]  # final untwisted tracks (doubled where needed)
    twisted_components: tuple[bool, ...]
    separating: tuple[bool, ...]

    @property
    def connected(self) -> bool:
        return self.component_count == 1


def untwist_basis(basis_vectors, cx: TriangularComplex) -> list[BasisTrackReport]:
    """Classify each basis vector, doubling any twisted track.

    A connected basis element is processed as a single track; a disconnected
    one is classified component by component.
    """
    reports = []
    for i, vec in enumerate(basis_vectors):
        pattern = realize(vec, cx)
        comps = components(pattern)
        finals: list[Track] = []
        twisted_flags: list[bool] = []
        separating_flags: list[bool] = []
        for comp in comps:
            tw = is_twisted(comp)
            twisted_flags.append(tw)
            final = comp
            if tw:
                final = Track(realize(tuple(2 * x for x in comp.vector), cx))
                if is_twisted(final):
                    raise InternalInvariant("double of a twisted track is twisted")
            finals.append(final)
            separating_flags.append(is_separating(final))
        reports.append(
            BasisTrackReport(
                index=i,
                vector=tuple(vec),
                component_count=len(comps),
                tracks=tuple(finals),
                twisted_components=tuple(twisted_flags),
                separating=tuple(separating_flags),
            )
        )
    return reports
