"""The triangular presentation 2-complex and its matching equations.

The complex has a single 0-cell.  Each triangle is a cyclic triple of sides,
a side being (edge index, orientation).  Corner i of triangle t sits between
side i and side i+1 (mod 3) and has flat index 3*t + i.  A corner vector
assigns a non-negative count of arcs cutting off each corner; the matching
equations force all side-occurrences of an edge to meet the same number of
arc endpoints.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DimensionMismatch
from .presentation import TriangulatedPresentation

Side = tuple[int, int]  # (edge index, orientation +1/-1)


@dataclass(frozen=True)
class TriangularComplex:
    edge_count: int
    triangles: tuple[tuple[Side, Side, Side], ...]

    @property
    def corner_count(self) -> int:
        return 3 * len(self.triangles)

    def corner_index(self, t: int, i: int) -> int:
        return 3 * t + i

    def side_corners(self, t: int, s: int) -> tuple[int, int]:
        """The two flat corner indices adjacent to side s of triangle t."""
        return (3 * t + (s + 2) % 3, 3 * t + s)

    def occurrences(self, e: int) -> tuple[tuple[int, int], ...]:
        """All (triangle, side) pairs carried by edge e, in canonical order."""
        if not 0 <= e < self.edge_count:
            raise DimensionMismatch(f"edge {e} out of range")
        out = []
        for t, tri in enumerate(self.triangles):
            for s, (edge, _orient) in enumerate(tri):
                if edge == e:
                    out.append((t, s))
        return tuple(out)


def build_complex(tp: TriangulatedPresentation) -> TriangularComplex:
    triangles = tuple(
        tuple((letter.gen, letter.sign) for letter in tri) for tri in tp.triangles
    )
    return TriangularComplex(edge_count=len(tp.extended_generators), triangles=triangles)


def occurrence_count(c: TriangularComplex, e: int) -> int:
    return len(c.occurrences(e))


@dataclass(frozen=True)
class MatchingSystem:
    """Integer matrix of matching equations over the corner coordinates.

    Row r equates the arc-endpoint counts of two consecutive occurrences of
    the edge recorded in row_origin[r]; an occurrence's count is the sum of
    its two adjacent corner coordinates.
    """

    corner_count: int
    rows: tuple[tuple[int, ...], ...]
    row_origin: tuple[tuple[int, tuple[tuple[int, int], tuple[int, int]]], ...]

    @property
    def row_count(self) -> int:
        return len(self.rows)


def matching_system(c: TriangularComplex) -> MatchingSystem:
    rows = []
    origins = []
    m = c.corner_count
    for e in range(c.edge_count):
        occs = c.occurrences(e)
        for a, b in zip(occs, occs[1:]):
            row = [0] * m
            for corner in c.side_corners(*a):
                row[corner] += 1
            for corner in c.side_corners(*b):
                row[corner] -= 1
            rows.append(tuple(row))
            origins.append((e, (a, b)))
    return MatchingSystem(corner_count=m, rows=tuple(rows), row_origin=tuple(origins))


def residual(sys: MatchingSystem, v) -> tuple[int, ...]:
    """matrix . v; the zero vector exactly when v solves the system."""
    if len(v) != sys.corner_count:
        raise DimensionMismatch(
            f"vector has {len(v)} entries, system has {sys.corner_count} corners"
        )
    return tuple(sum(r * x for r, x in zip(row, v)) for row in sys.rows)


def edge_weight(c: TriangularComplex, v, e: int) -> int:
    """Number of pattern points on edge e for the solution vector v."""
    occs = c.occurrences(e)
    if not occs:
        return 0
    a, b = c.side_corners(*occs[0])
    return v[a] + v[b]
