"""Arrangements of untwisted tracks and their dual square complexes.

Tracks are embedded with straight arcs: the boundary of each triangle is laid
out on a convex curve (x = BASE^position, y = x^2) and arcs become chords, so
all crossing data is exact rational arithmetic.  Two arcs cross exactly when
their endpoints interleave around the triangle boundary; the embedding only
decides the order of crossings along an arc when three mutually crossing
arcs meet, where some deterministic choice is unavoidable.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .complex import TriangularComplex
from .errors import AllZero, InternalInvariant, ResolutionFailed, TwistedTrack
from .pattern import Track, coorientation, is_twisted
from .presentation import TriangulatedPresentation
from .splitting import classify_splitting

BASEPOINT = ("V",)
_SCALE_BASES = (2, 3, 5, 7)


def default_orderings(tracks, cx: TriangularComplex):
    """Per-edge point order: track i's points precede track j's for i < j."""
    orderings = []
    for e in range(cx.edge_count):
        order = []
        for ti, track in enumerate(tracks):
            for pos in range(len(track.pattern.edge_points[e])):
                order.append((ti, pos))
        orderings.append(tuple(order))
    return tuple(orderings)


def parallel_orderings(tracks, cx: TriangularComplex):
    """Coorientation-aware interleaving making equal tracks disjoint copies.

    Tracks with identical vectors share base points; their copies are placed
    at each point in the transverse direction's order, so the copies embed as
    a genuinely parallel family (the uniform block order provably forces two
    copies of the same track to cross at any corner joining two equally
    oriented sides).  Distinct vectors keep the block order.
    """
    colors = [coorientation(t) for t in tracks]
    class_of: dict = {}
    classes: list[list[int]] = []
    for ti, t in enumerate(tracks):
        key = t.vector
        if key not in class_of:
            class_of[key] = len(classes)
            classes.append([])
        classes[class_of[key]].append(ti)
    orderings = []
    for e in range(cx.edge_count):
        order = []
        for members in classes:
            rep = tracks[members[0]]
            for pos, point in enumerate(rep.pattern.edge_points[e]):
                forward = colors[members[0]][point]
                seq = members if forward else list(reversed(members))
                order.extend((ti, pos) for ti in seq)
        orderings.append(tuple(order))
    return tuple(orderings)


@dataclass(frozen=True)
class Chord:
    """One arc of one track inside one triangle, as a boundary chord."""

    triangle: int
    track: int
    arc_index: int
    corner: int
    bpos1: int  # boundary position of the side-i endpoint
    bpos2: int  # boundary position of the side-i+1 endpoint
    side1: int
    side2: int


@dataclass(frozen=True)
class Arrangement:
    cx: TriangularComplex
    tracks: tuple[Track, ...]
    edge_orderings: tuple[tuple[tuple[int, int], ...], ...]
    boundary: tuple[tuple, ...]  # per triangle: items ("corner", c) | ("slot", s, ti, pos)
    chords: tuple[tuple[Chord, ...], ...]  # per triangle
    crossings: tuple[tuple[tuple[int, int], ...], ...]  # per triangle: chord index pairs

    @property
    def crossing_count(self) -> int:
        return sum(len(c) for c in self.crossings)


def _interleave(a1, a2, b1, b2, n):
    """Do chords {a1,a2}, {b1,b2} of an n-cycle cross (endpoints alternate)?"""
    def between(x, lo, hi):
        if lo < hi:
            return lo < x < hi
        return x > lo or x < hi

    return between(b1, a1, a2) != between(b2, a1, a2)


def build_arrangement(tracks, cx: TriangularComplex, orderings=None) -> Arrangement:
    """Embed the tracks with the given (or default) per-edge point orders."""
    tracks = tuple(tracks)
    for t in tracks:
        if is_twisted(t):
            raise TwistedTrack("arrangements accept untwisted tracks only")
    if orderings is None:
        orderings = default_orderings(tracks, cx)
    else:
        orderings = tuple(tuple(o) for o in orderings)
        expect = default_orderings(tracks, cx)
        for e in range(cx.edge_count):
            if sorted(orderings[e]) != sorted(expect[e]):
                raise ValueError(f"ordering for edge {e} is not a permutation")
            for ti in range(len(tracks)):
                sub = [pos for (tj, pos) in orderings[e] if tj == ti]
                if sub != sorted(sub):
                    raise ValueError(
                        f"ordering for edge {e} breaks track {ti}'s point order"
                    )
    order_index = []
    for e in range(cx.edge_count):
        order_index.append({tp: k for k, tp in enumerate(orderings[e])})

    boundary = []
    slot_bpos = []  # per triangle: dict (side, combined traversal index) -> bpos
    for t, tri in enumerate(cx.triangles):
        items = []
        lookup = {}
        for s in range(3):
            items.append(("corner", (s + 2) % 3))
            e, orient = tri[s]
            combined = orderings[e] if orient > 0 else tuple(reversed(orderings[e]))
            for k, (ti, pos) in enumerate(combined):
                lookup[(s, k)] = len(items)
                items.append(("slot", s, ti, pos))
        boundary.append(tuple(items))
        slot_bpos.append(lookup)

    all_chords = []
    for t, tri in enumerate(cx.triangles):
        chords = []
        for ti, track in enumerate(tracks):
            for ai, arc in enumerate(track.pattern.arcs):
                if arc.triangle != t:
                    continue
                s1, s2 = arc.corner, (arc.corner + 1) % 3
                bp = []
                for s, point in ((s1, arc.p), (s2, arc.q)):
                    e, orient = tri[s]
                    _, pos = track.pattern.point_position[point]
                    k = order_index[e][(ti, pos)]
                    if orient < 0:
                        k = len(orderings[e]) - 1 - k
                    bp.append(slot_bpos[t][(s, k)])
                chords.append(Chord(t, ti, ai, arc.corner, bp[0], bp[1], s1, s2))
        all_chords.append(tuple(chords))

    crossings = []
    for t in range(len(cx.triangles)):
        n = len(boundary[t])
        found = []
        chords = all_chords[t]
        for i in range(len(chords)):
            for j in range(i + 1, len(chords)):
                a, b = chords[i], chords[j]
                if _interleave(a.bpos1, a.bpos2, b.bpos1, b.bpos2, n):
                    if a.track == b.track:
                        raise InternalInvariant("same-track arcs interleave")
                    found.append((i, j))
        crossings.append(tuple(found))
    return Arrangement(
        cx=cx,
        tracks=tracks,
        edge_orderings=orderings,
        boundary=tuple(boundary),
        chords=tuple(all_chords),
        crossings=tuple(crossings),
    )


class _Geometry:
    """Exact coordinates for one triangle's boundary circle and chords."""

    def __init__(self, n_positions, chords, base):
        self.x = [Fraction(base) ** k for k in range(n_positions)]
        self.lines = []  # per chord: (slope, intercept) of y = s*x - c
        for ch in chords:
            xa, xb = self.x[ch.bpos1], self.x[ch.bpos2]
            self.lines.append((xa + xb, xa * xb))

    def point(self, bpos):
        x = self.x[bpos]
        return (x, x * x)

    def crossing_point(self, i, j):
        si, ci = self.lines[i]
        sj, cj = self.lines[j]
        if si == sj:
            raise InternalInvariant("parallel chords cannot cross")
        x0 = (ci - cj) / (si - sj)
        return (x0, si * x0 - ci)

    def sign_vector(self, pt, perturb=(), skip=()):
        """Signs of pt against every chord; first-order symbolic perturbation."""
        out = []
        for i, (s, c) in enumerate(self.lines):
            val = s * pt[0] - pt[1] - c
            if val == 0:
                if i in skip:
                    deriv = 0
                    for (ux, uy) in perturb:
                        deriv = s * ux - uy
                        if deriv != 0:
                            break
                    if deriv == 0:
                        raise InternalInvariant("degenerate perturbation")
                    val = deriv
                else:
                    raise _Degenerate()
            out.append(1 if val > 0 else -1)
        return tuple(out)


class _Degenerate(Exception):
    pass


@dataclass
class _TriangleCells:
    faces: dict  # sign vector -> face id
    boundary_face: dict  # boundary position -> face id (piece [pos, pos+1])
    piece_sides: list  # per chord: list of (left_face, right_face) per piece
    stations: list  # per chord: [bpos_low, crossing ids..., bpos_high]
    crossing_at: dict  # crossing id -> (chord_i, chord_j)
    wedges: dict  # crossing id -> tuple of 4 (face, strand) ccw, strand=(chord, hi_end)

    def face_count(self):
        return len(self.faces)


def _triangle_cells(arr: Arrangement, t: int) -> _TriangleCells:
    chords = arr.chords[t]
    n = len(arr.boundary[t])
    pairs = arr.crossings[t]
    for base in _SCALE_BASES:
        try:
            return _triangle_cells_scaled(arr, t, chords, n, pairs, base)
        except _Degenerate:  # coincidence at this scale; retry rescaled
            continue
    raise InternalInvariant(f"no generic embedding scale found for triangle {t}")


def _triangle_cells_scaled(arr, t, chords, n, pairs, base):
    geo = _Geometry(n, chords, base)
    cross_pts = {}
    for cid, (i, j) in enumerate(pairs):
        cross_pts[cid] = geo.crossing_point(i, j)

    # stations along each chord, ordered by x
    stations = []
    for i, ch in enumerate(chords):
        lo, hi = sorted((ch.bpos1, ch.bpos2), key=lambda b: geo.x[b])
        here = [cid for cid, (a, b) in enumerate(pairs) if i in (a, b)]
        here.sort(key=lambda cid: cross_pts[cid][0])
        xs = [cross_pts[cid][0] for cid in here]
        if len(set(xs)) != len(xs):
            raise _Degenerate()
        stations.append([("b", lo)] + [("x", cid) for cid in here] + [("b", hi)])

    faces: dict = {}

    def face_of(sign):
        if sign not in faces:
            faces[sign] = len(faces)
        return faces[sign]

    # boundary pieces: mid-point witnesses, walked in cyclic order
    boundary_face = {}
    for pos in range(n):
        p1 = geo.point(pos)
        p2 = geo.point((pos + 1) % n)
        mid = ((p1[0] + p2[0]) / 2, (p1[1] + p2[1]) / 2)
        boundary_face[pos] = face_of(geo.sign_vector(mid))

    # chord piece side witnesses
    piece_sides = []
    for i, ch in enumerate(chords):
        sides = []
        st = stations[i]
        s, _c = geo.lines[i]
        for k in range(len(st) - 1):
            a = st[k]
            b = st[k + 1]
            pa = geo.point(a[1]) if a[0] == "b" else cross_pts[a[1]]
            pb = geo.point(b[1]) if b[0] == "b" else cross_pts[b[1]]
            mid = ((pa[0] + pb[0]) / 2, (pa[1] + pb[1]) / 2)
            left = face_of(geo.sign_vector(mid, perturb=[(-s, Fraction(1))], skip=(i,)))
            right = face_of(geo.sign_vector(mid, perturb=[(s, Fraction(-1))], skip=(i,)))
            sides.append((left, right))
        piece_sides.append(sides)

    # wedge faces around each crossing, in ccw strand order
    wedges = {}
    crossing_at = {}
    for cid, (i, j) in enumerate(pairs):
        crossing_at[cid] = (i, j)
        si, _ = geo.lines[i]
        sj, _ = geo.lines[j]
        di = (Fraction(1), si)
        dj = (Fraction(1), sj)
        if sj > si:
            strands = [(i, True), (j, True), (i, False), (j, False)]
            dirs = [di, dj, (-di[0], -di[1]), (-dj[0], -dj[1])]
        else:
            strands = [(i, True), (j, False), (i, False), (j, True)]
            dirs = [di, (-dj[0], -dj[1]), (-di[0], -di[1]), dj]
        pt = cross_pts[cid]
        out = []
        for k in range(4):
            u1 = dirs[k]
            u2 = dirs[(k + 1) % 4]
            w = (u1[0] + u2[0], u1[1] + u2[1])
            sign = geo.sign_vector(pt, perturb=[w], skip=(i, j))
            out.append((face_of(sign), strands[k]))
        wedges[cid] = tuple(out)
    return _TriangleCells(
        faces=faces,
        boundary_face=boundary_face,
        piece_sides=piece_sides,
        stations=stations,
        crossing_at=crossing_at,
        wedges=wedges,
    )


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def add(self, x):
        self.parent.setdefault(x, x)

    def find(self, x):
        self.add(x)
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def _boundary_piece_side_gap(arr, t):
    """Map boundary position -> (side, gap) for the piece [pos, pos+1]."""
    items = arr.boundary[t]
    out = {}
    for pos in range(len(items)):
        cur = items[pos]
        if cur[0] == "corner":
            out[pos] = ((cur[1] + 1) % 3, 0)
        else:
            side = cur[1]
            gap = 0
            k = pos
            while items[k][0] == "slot":
                gap += 1
                k -= 1
            out[pos] = (side, gap)
    return out


def _segment_key(arr, t, side, gap):
    e, orient = arr.cx.triangles[t][side]
    n = len(arr.edge_orderings[e])
    j = gap if orient > 0 else n - gap
    return ("S", e, j)


@dataclass(frozen=True)
class DualSquare:
    index: int
    triangle: int
    crossing: int  # crossing id within the triangle
    tracks: tuple[int, int]
    corner_regions: tuple[int, int, int, int]
    edges: tuple[int, int, int, int]
    marked_corner: int
    marked_side: int


@dataclass(frozen=True)
class DualSquareComplex:
    arrangement: Arrangement
    region_of: dict  # piece key -> region id
    regions: tuple[tuple, ...]
    basepoint_region: int
    edges: tuple[tuple[int, tuple[int, int]], ...]  # per C-edge: (track, regions)
    squares: tuple[DualSquare, ...]
    cells: tuple  # per triangle _TriangleCells (kept for downstream queries)

    @property
    def vertex_count(self):
        return len(self.regions)

    @property
    def edge_count(self):
        return len(self.edges)

    @property
    def square_count(self):
        return len(self.squares)

    def euler(self):
        return self.vertex_count - self.edge_count + self.square_count


def build_dual_complex(arr: Arrangement, cx: TriangularComplex | None = None) -> DualSquareComplex:
    cx = arr.cx
    cells = tuple(_triangle_cells(arr, t) for t in range(len(cx.triangles)))

    uf = _UnionFind()
    piece_order = []

    def touch(x):
        if x not in uf.parent:
            piece_order.append(x)
        uf.add(x)

    for t in range(len(cx.triangles)):
        for face_id in sorted(cells[t].faces.values()):
            touch(("F", t, face_id))
    for e in range(cx.edge_count):
        n = len(arr.edge_orderings[e])
        for j in range(n + 1):
            touch(("S", e, j))
    touch(BASEPOINT)

    for t in range(len(cx.triangles)):
        gaps = _boundary_piece_side_gap(arr, t)
        for pos, face_id in cells[t].boundary_face.items():
            side, gap = gaps[pos]
            uf.union(("F", t, face_id), _segment_key(arr, t, side, gap))
    for e in range(cx.edge_count):
        n = len(arr.edge_orderings[e])
        uf.union(BASEPOINT, ("S", e, 0))
        uf.union(BASEPOINT, ("S", e, n))

    region_ids = {}
    region_of = {}
    members = []
    for piece in piece_order:
        root = uf.find(piece)
        if root not in region_ids:
            region_ids[root] = len(members)
            members.append([])
        rid = region_ids[root]
        region_of[piece] = rid
        members[rid].append(piece)

    # C-edges: pieces of each track between crossings, glued at pattern points
    sub = _UnionFind()
    for t in range(len(cx.triangles)):
        for ci, st in enumerate(cells[t].stations):
            for k in range(len(st) - 1):
                sub.add((t, ci, k))
    endpoint_lookup = {}
    for t in range(len(cx.triangles)):
        for ci, ch in enumerate(arr.chords[t]):
            st = cells[t].stations[ci]
            lo = st[0][1]
            for bpos in (ch.bpos1, ch.bpos2):
                piece = 0 if bpos == lo else len(st) - 2
                endpoint_lookup[(t, bpos)] = (ci, piece)
    slot_position = []  # per triangle: item -> boundary position
    for t in range(len(cx.triangles)):
        slot_position.append(
            {item: ppos for ppos, item in enumerate(arr.boundary[t]) if item[0] == "slot"}
        )
    for ti, track in enumerate(arr.tracks):
        for point in range(track.pattern.point_count):
            e, pos = track.pattern.point_position[point]
            incident = []
            for (t, s) in cx.occurrences(e):
                bpos = slot_position[t][("slot", s, ti, pos)]
                ci, piece = endpoint_lookup[(t, bpos)]
                incident.append((t, ci, piece))
            for a, b in zip(incident, incident[1:]):
                sub.union(a, b)

    edge_ids = {}
    edge_records = []
    for t in range(len(cx.triangles)):
        for ci, st in enumerate(cells[t].stations):
            for k in range(len(st) - 1):
                root = sub.find((t, ci, k))
                if root not in edge_ids:
                    left, right = cells[t].piece_sides[ci][k]
                    regions = (
                        region_of[("F", t, left)],
                        region_of[("F", t, right)],
                    )
                    edge_ids[root] = len(edge_records)
                    edge_records.append((arr.chords[t][ci].track, regions))

    def edge_id_of(t, ci, piece):
        return edge_ids[sub.find((t, ci, piece))]

    squares = []
    for t in range(len(cx.triangles)):
        for cid in sorted(cells[t].crossing_at):
            i, j = cells[t].crossing_at[cid]
            cha, chb = arr.chords[t][i], arr.chords[t][j]
            sides = [cha.side1, cha.side2, chb.side1, chb.side2]
            counts = {s: sides.count(s) for s in set(sides)}
            marked_side = min(s for s, c in counts.items() if c == 2)
            wedge = cells[t].wedges[cid]
            corner_regions = tuple(region_of[("F", t, f)] for f, _ in wedge)
            edge_list = []
            st_index = {}
            for ci2 in (i, j):
                st = cells[t].stations[ci2]
                for k, item in enumerate(st):
                    if item == ("x", cid):
                        st_index[ci2] = k
            for _, (ci2, hi) in wedge:
                k = st_index[ci2]
                piece = k if hi else k - 1
                edge_list.append(edge_id_of(t, ci2, piece))
            # marked corner sits between the two strands heading to the side
            # that carries two of the four arc endpoints
            sa = (i, not _low_is_target(arr, cells, t, i, marked_side))
            sb = (j, not _low_is_target(arr, cells, t, j, marked_side))
            strand_list = [w[1] for w in wedge]
            marked = None
            for k in range(4):
                pair = {strand_list[k], strand_list[(k + 1) % 4]}
                if pair == {sa, sb}:
                    marked = k
                    break
            if marked is None:
                raise InternalInvariant("marked-side strands are not adjacent")
            squares.append(
                DualSquare(
                    index=len(squares),
                    triangle=t,
                    crossing=cid,
                    tracks=tuple(sorted((cha.track, chb.track))),
                    corner_regions=corner_regions,
                    edges=tuple(edge_list),
                    marked_corner=marked,
                    marked_side=marked_side,
                )
            )
    return DualSquareComplex(
        arrangement=arr,
        region_of=region_of,
        regions=tuple(tuple(m) for m in members),
        basepoint_region=region_of[BASEPOINT],
        edges=tuple(edge_records),
        squares=tuple(squares),
        cells=cells,
    )


def _low_is_target(arr, cells, t, ci, side):
    ch = arr.chords[t][ci]
    target = ch.bpos1 if ch.side1 == side else ch.bpos2
    lo = cells[t].stations[ci][0][1]
    return target == lo


@dataclass(frozen=True)
class SquarePattern:
    """Counts of a combination pattern against the dual square complex."""

    coefficients: tuple[int, ...]
    squares: dict  # square index -> (p, q, marked_corner_count)
    edge_counts: dict  # C-edge id -> crossing count


def combination_pattern(arr: Arrangement, coeffs, dual: DualSquareComplex) -> SquarePattern:
    coeffs = tuple(int(c) for c in coeffs)
    if len(coeffs) != len(arr.tracks):
        raise ValueError("one coefficient per track required")
    if not any(coeffs):
        raise AllZero("all combination coefficients are zero")
    squares = {}
    for sq in dual.squares:
        ti, tj = sq.tracks
        p, q = abs(coeffs[ti]), abs(coeffs[tj])
        mixed = coeffs[ti] * coeffs[tj] < 0
        squares[sq.index] = (p, q, min(p, q) if mixed else 0)
    edge_counts = {}
    for eid, (track, _regions) in enumerate(dual.edges):
        edge_counts[eid] = abs(coeffs[track])
    return SquarePattern(coefficients=coeffs, squares=squares, edge_counts=edge_counts)


# --- expanded copies, smoothing trace and mixed-sign resolution -------------


@dataclass
class ReturningReport:
    returning: int  # returning arcs that survive all cancellation moves
    cancelled: int  # cancellation moves applied
    closed_deleted: int
    edge_counts: tuple[int, ...]  # surviving copy-points per 1-cell


def _copy_orderings(arr, coeffs):
    """Per edge: ordered copy slots (track, base pos, copy index)."""
    colors = [coorientation(tr) for tr in arr.tracks]
    out = []
    for e in range(arr.cx.edge_count):
        slots = []
        for (ti, pos) in arr.edge_orderings[e]:
            k = abs(coeffs[ti])
            if k == 0:
                continue
            point = arr.tracks[ti].pattern.edge_points[e][pos]
            forward = colors[ti][point]
            copies = list(range(k)) if forward else list(reversed(range(k)))
            slots.extend((ti, pos, m) for m in copies)
        out.append(tuple(slots))
    return out


def _copy_trace(arr, coeffs, copy_orderings, deleted, tunnels):
    """Trace the smoothed copy curves; returns per-triangle curve endpoints.

    deleted: per edge, set of copy slots cancelled so far (their chord ends
    remain as connection points but are not curve endpoints).
    tunnels: per edge, dict slot -> partner slot; a walk reaching a cancelled
    slot continues at the partner's chord end of the same side occurrence.
    """
    cx = arr.cx
    curves = []  # (triangle, start (side, slot), end (side, slot) | None)
    closed = 0
    for t in range(len(cx.triangles)):
        tri = cx.triangles[t]
        bpos = {}
        items = []
        for s in range(3):
            items.append(("corner", (s + 2) % 3))
            e, orient = tri[s]
            order = copy_orderings[e]
            order = order if orient > 0 else tuple(reversed(order))
            for sl in order:
                bpos[(s, sl)] = len(items)
                items.append(("slot", s, sl))
        chords = []
        chord_sign = []
        for ti, track in enumerate(arr.tracks):
            k = abs(coeffs[ti])
            if k == 0:
                continue
            sign = 1 if coeffs[ti] > 0 else -1
            for arc in track.pattern.arcs:
                if arc.triangle != t:
                    continue
                s1, s2 = arc.corner, (arc.corner + 1) % 3
                _, pos1 = track.pattern.point_position[arc.p]
                _, pos2 = track.pattern.point_position[arc.q]
                for m in range(k):
                    chords.append(((s1, (ti, pos1, m)), (s2, (ti, pos2, m))))
                    chord_sign.append(sign)
        for base in _SCALE_BASES:
            try:
                curves_t, closed_t = _trace_one_triangle(
                    t, tri, items, bpos, chords, chord_sign, deleted, tunnels, base
                )
                break
            except _Degenerate:
                continue
        else:
            raise InternalInvariant("no generic scale for copy trace")
        curves.extend(curves_t)
        closed += closed_t
    return curves, closed


def _trace_one_triangle(t, tri, items, bpos, chords, chord_sign, deleted, tunnels, base):
    n = len(items)
    x = [Fraction(base) ** k for k in range(n)]
    lines = []
    ends = []
    for (s1, sl1), (s2, sl2) in chords:
        b1, b2 = bpos[(s1, sl1)], bpos[(s2, sl2)]
        xa, xb = x[b1], x[b2]
        lines.append((xa + xb, xa * xb))
        ends.append(((s1, sl1, b1), (s2, sl2, b2)))
    end_is_high = [
        (x[e1[2]] > x[e2[2]], x[e2[2]] > x[e1[2]]) for (e1, e2) in ends
    ]
    crossings = []
    for i in range(len(chords)):
        for j in range(i + 1, len(chords)):
            a1, a2 = ends[i][0][2], ends[i][1][2]
            b1, b2 = ends[j][0][2], ends[j][1][2]
            if _interleave(a1, a2, b1, b2, n):
                si, ci = lines[i]
                sj, cj = lines[j]
                if si == sj:
                    raise _Degenerate()
                x0 = (ci - cj) / (si - sj)
                crossings.append((i, j, x0))
    stations = [[] for _ in chords]
    for cid, (i, j, x0) in enumerate(crossings):
        stations[i].append((x0, cid))
        stations[j].append((x0, cid))
    station_index = {}
    for i in range(len(chords)):
        stations[i].sort()
        xs = [s[0] for s in stations[i]]
        if len(set(xs)) != len(xs):
            raise _Degenerate()
        for k, (_, cid) in enumerate(stations[i]):
            station_index[(i, cid)] = k

    # smoothing transitions: approaching crossing cid along chord c with the
    # endpoint `behind` at one's back, leave toward the paired endpoint
    transition = {}
    for cid, (i, j, _x0) in enumerate(crossings):
        pts = sorted(
            (ends[c][endk][2], c, endk) for c in (i, j) for endk in (0, 1)
        )
        if pts[0][1] == pts[1][1]:
            raise InternalInvariant("crossing endpoints do not alternate")
        sides4 = [items[p[0]][1] for p in pts]
        counts = {s: sides4.count(s) for s in set(sides4)}
        marked_side = min(s for s, c in counts.items() if c == 2)
        pairing1 = ((pts[0], pts[1]), (pts[2], pts[3]))
        pairing2 = ((pts[1], pts[2]), (pts[3], pts[0]))

        def joins_marked(pairing):
            return any(
                items[p1[0]][1] == marked_side and items[p2[0]][1] == marked_side
                for p1, p2 in pairing
            )

        marked1, marked2 = joins_marked(pairing1), joins_marked(pairing2)
        if marked1 == marked2:
            raise InternalInvariant("marked side does not select a pairing")
        mixed = chord_sign[i] != chord_sign[j]
        p_marked = pairing1 if marked1 else pairing2
        p_other = pairing2 if marked1 else pairing1
        use = p_marked if mixed else p_other
        for (p1, p2) in use:
            transition[(cid, p1[1], p1[2])] = (p2[1], p2[2])
            transition[(cid, p2[1], p2[2])] = (p1[1], p1[2])

    def follow(ci, target, from_cid):
        """From station from_cid (None = far end) move toward end `target`."""
        while True:
            st = stations[ci]
            toward_high = end_is_high[ci][target]
            if from_cid is None:
                if not st:
                    return ci, target
                idx = 0 if toward_high else len(st) - 1
            else:
                k = station_index[(ci, from_cid)]
                idx = k + 1 if toward_high else k - 1
                if idx < 0 or idx >= len(st):
                    return ci, target
            cid = st[idx][1]
            cj, endj = transition[(cid, ci, 1 - target)]
            ci, target, from_cid = cj, endj, cid

    def slot_of(ci, endk):
        side, sl, _b = ends[ci][endk]
        return side, sl

    def edge_of(side):
        return tri[side][0]

    used = set()
    curves = []
    for ci in range(len(chords)):
        for endk in (0, 1):
            if (ci, endk) in used:
                continue
            side, sl = slot_of(ci, endk)
            if sl in deleted[edge_of(side)]:
                continue  # cancelled slots are not curve endpoints
            used.add((ci, endk))
            start = (side, sl)
            cur_ci, cur_end = ci, endk
            while True:
                out_ci, out_end = follow(cur_ci, 1 - cur_end, None)
                used.add((out_ci, out_end))
                oside, osl = slot_of(out_ci, out_end)
                partner = tunnels[edge_of(oside)].get(osl)
                if partner is None:
                    curves.append((t, start, (oside, osl)))
                    break
                entry = _chord_end_at(ends, oside, partner)
                if entry is None:
                    raise InternalInvariant("tunnel partner has no chord end")
                if entry in used:
                    raise InternalInvariant("live walk revisited a chord end")
                used.add(entry)
                cur_ci, cur_end = entry
    closed = 0
    for ci in range(len(chords)):
        for endk in (0, 1):
            if (ci, endk) in used:
                continue
            # a component closed up through cancellations; consume its cycle
            closed += 1
            cur_ci, cur_end = ci, endk
            while (cur_ci, cur_end) not in used:
                used.add((cur_ci, cur_end))
                out_ci, out_end = follow(cur_ci, 1 - cur_end, None)
                used.add((out_ci, out_end))
                oside, osl = slot_of(out_ci, out_end)
                partner = tunnels[edge_of(oside)].get(osl)
                if partner is None:
                    raise InternalInvariant("open curve found while closing cycles")
                entry = _chord_end_at(ends, oside, partner)
                cur_ci, cur_end = entry
    return curves, closed


def _chord_end_at(ends, side, slot):
    for ci2, (e1, e2) in enumerate(ends):
        if (e1[0], e1[1]) == (side, slot):
            return (ci2, 0)
        if (e2[0], e2[1]) == (side, slot):
            return (ci2, 1)
    return None


def returning_arc_report(arr: Arrangement, coeffs) -> ReturningReport:
    """Smooth all crossings, cancel adjacent opposite-sign returning arcs.

    Implements the cancellation move (a returning arc whose endpoints are
    adjacent on their 1-cell and come from opposite-sign tracks removes both
    points), iterated deterministically to a fixpoint.
    """
    coeffs = tuple(int(c) for c in coeffs)
    if not any(coeffs):
        raise AllZero("all combination coefficients are zero")
    cx = arr.cx
    copy_orderings = _copy_orderings(arr, coeffs)
    deleted = [set() for _ in range(cx.edge_count)]
    tunnels = [dict() for _ in range(cx.edge_count)]

    def sign_of(slot):
        return 1 if coeffs[slot[0]] > 0 else -1

    cancelled = 0
    closed_total = 0
    while True:
        curves, closed = _copy_trace(arr, coeffs, copy_orderings, deleted, tunnels)
        closed_total = closed
        move = None
        for (t, start, end) in curves:
            if end is None:
                continue
            (s1, sl1), (s2, sl2) = start, end
            if s1 != s2:
                continue
            e, orient = cx.triangles[t][s1]
            if sign_of(sl1) == sign_of(sl2):
                continue
            # adjacency among surviving slots on the edge
            order = [sl for sl in copy_orderings[e] if sl not in deleted[e]]
            i1, i2 = order.index(sl1), order.index(sl2)
            if abs(i1 - i2) != 1:
                continue
            move = (e, sl1, sl2)
            break
        if move is None:
            break
        e, sl1, sl2 = move
        deleted[e].add(sl1)
        deleted[e].add(sl2)
        tunnels[e][sl1] = sl2
        tunnels[e][sl2] = sl1
        cancelled += 1
    returning = 0
    for (t, start, end) in curves:
        if end is None:
            continue
        if start[0] == end[0]:
            returning += 1
    edge_counts = tuple(
        len([sl for sl in copy_orderings[e] if sl not in deleted[e]])
        for e in range(cx.edge_count)
    )
    return ReturningReport(
        returning=returning,
        cancelled=cancelled,
        closed_deleted=closed_total,
        edge_counts=edge_counts,
    )


def resolve_mixed(arr: Arrangement, coeffs, max_attempts: int = 256) -> Arrangement:
    """Find per-edge orderings whose resolved combination has no returning arcs.

    Follows the adjacent-pairing scan: on each 1-cell the negative tracks'
    points are interleaved next to positive points; candidate interleavings
    are tried in a bounded deterministic order.  Raises ResolutionFailed when
    the budget is exhausted.
    """
    coeffs = tuple(int(c) for c in coeffs)
    pos = [i for i, c in enumerate(coeffs) if c > 0]
    neg = [i for i, c in enumerate(coeffs) if c < 0]
    if not pos or not neg:
        if not any(coeffs):
            raise AllZero("all combination coefficients are zero")
        return arr  # nothing to resolve

    cx = arr.cx

    def candidates_for_edge(e):
        base = arr.edge_orderings[e]
        reds = [bp for bp in base if coeffs[bp[0]] > 0]
        blues = [bp for bp in base if coeffs[bp[0]] < 0]
        rest = [bp for bp in base if coeffs[bp[0]] == 0]
        if not reds or not blues:
            yield base
            return
        r, b = len(reds), len(blues)
        # enumerate interleavings: positions of blues among reds
        seen = 0
        for positions in itertools.combinations(range(r + b), b):
            out = []
            ri = bi = 0
            for k in range(r + b):
                if bi < b and k == positions[bi]:
                    out.append(blues[bi])
                    bi += 1
                else:
                    out.append(reds[ri])
                    ri += 1
            yield tuple(out) + tuple(rest)
            seen += 1
            if seen >= max_attempts:
                return

    edges_with_both = []
    for e in range(cx.edge_count):
        base = arr.edge_orderings[e]
        has_r = any(coeffs[bp[0]] > 0 for bp in base)
        has_b = any(coeffs[bp[0]] < 0 for bp in base)
        if has_r and has_b:
            edges_with_both.append(e)

    def try_orderings(orderings):
        cand = build_arrangement(arr.tracks, cx, orderings=orderings)
        report = returning_arc_report(cand, coeffs)
        return cand, report

    # depth-first over per-edge candidate orderings, bounded
    attempts = 0
    base_orderings = list(arr.edge_orderings)

    def dfs(idx, orderings):
        nonlocal attempts
        if idx == len(edges_with_both):
            cand, report = try_orderings(tuple(orderings))
            attempts += 1
            if report.returning == 0:
                return cand
            return None
        e = edges_with_both[idx]
        for candidate in candidates_for_edge(e):
            if attempts >= max_attempts:
                return None
            orderings[e] = candidate
            found = dfs(idx + 1, orderings)
            if found is not None:
                return found
        orderings[e] = arr.edge_orderings[e]
        return None

    found = dfs(0, base_orderings)
    if found is None:
        raise ResolutionFailed(
            f"no returning-arc-free interleaving found within {max_attempts} attempts"
        )
    return found


def common_side_region(tracks, cx: TriangularComplex, tp: TriangulatedPresentation,
                       orderings=None):
    """A region of the arrangement inside every track's group-fixed side.

    Every track must be separating with a Trivial flag; the fixed side is the
    one whose vertex words cover all generators.  Returns a region id of the
    full arrangement, or None when the default embedding exhibits no common
    region (the repositioning argument is not implemented).
    """
    fixed_is_basepoint = []
    for t in tracks:
        s = classify_splitting(t, cx, tp)
        if s.kind != "amalgam" or s.trivial_flag != "Trivial":
            raise ValueError("common_side_region expects separating Trivial tracks")
        fixed_is_basepoint.append(s.trivial_side == 0)
    arr = build_arrangement(tracks, cx, orderings=orderings)
    dual = build_dual_complex(arr)

    # coarse regions w.r.t. each single track: redo the gluing, but do not
    # glue across the chosen track's chords or points
    coarse_maps = []
    for ti in range(len(tracks)):
        uf = _UnionFind()
        for t in range(len(cx.triangles)):
            gaps = _boundary_piece_side_gap(arr, t)
            for pos, face_id in dual.cells[t].boundary_face.items():
                side, gap = gaps[pos]
                uf.union(("F", t, face_id), _segment_key(arr, t, side, gap))
            for ci, ch in enumerate(arr.chords[t]):
                if ch.track == ti:
                    continue
                for (left, right) in dual.cells[t].piece_sides[ci]:
                    uf.union(("F", t, left), ("F", t, right))
        for e in range(cx.edge_count):
            n = len(arr.edge_orderings[e])
            uf.union(BASEPOINT, ("S", e, 0))
            uf.union(BASEPOINT, ("S", e, n))
            for j in range(n):
                tj, _pos = arr.edge_orderings[e][j]
                if tj != ti:
                    uf.union(("S", e, j), ("S", e, j + 1))
        roots = {uf.find(p) for p in dual.region_of}
        if len(roots) != 2:
            raise InternalInvariant("single-track coarsening is not two-sided")
        base_root = uf.find(BASEPOINT)
        coarse_maps.append((uf, base_root))

    for rid in range(dual.vertex_count):
        piece = dual.regions[rid][0]
        ok = True
        for ti in range(len(tracks)):
            uf, base_root = coarse_maps[ti]
            on_base_side = uf.find(piece) == base_root
            if on_base_side != fixed_is_basepoint[ti]:
                ok = False
                break
        if ok:
            return rid
    return None
