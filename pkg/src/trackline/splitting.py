"""Group decompositions carried by untwisted tracks.

Loops in the pattern-subdivided complex are evaluated to words by the functor
that slides every pattern point to the terminal vertex of its 1-cell: crossing
the initial segment of an edge emits that edge's letter, every other segment
emits nothing, and an arc emits the letters picked up by the boundary path it
cuts off.  Output words are freely reduced and written over the original
generators (triangulation generators are eliminated by substitution).
"""

from __future__ import annotations

from dataclasses import dataclass

from .complex import TriangularComplex
from .errors import (
    InternalInvariant,
    InvalidRegion,
    PathNotComposable,
    TwistedInput,
)
from .pattern import (
    BASEPOINT,
    Pattern,
    RegionDecomposition,
    Track,
    coorientation,
    cut_regions,
    is_separating,
    is_twisted,
)
from .presentation import (
    Letter,
    Presentation,
    TriangulatedPresentation,
    Word,
    free_reduce,
    invert_word,
)

TRIVIAL = "Trivial"
UNKNOWN = "Unknown"


def arc_word(cx: TriangularComplex, arc) -> Word:
    """Word emitted by an arc traversed from its side-i to its side-i+1 end.

    The arc is homotopic to the path around the corner it cuts off; only the
    initial edge segments on that path emit letters.
    """
    t, i = arc.triangle, arc.corner
    e1, o1 = cx.triangles[t][i]
    e2, o2 = cx.triangles[t][(i + 1) % 3]
    word = []
    if o1 < 0:
        word.append(Letter(e1, -1))
    if o2 > 0:
        word.append(Letter(e2, 1))
    return tuple(word)


class PathEvaluator:
    """Evaluate edge-paths in the subdivided complex to words.

    Steps are ("seg", edge, index, direction) or ("arc", arc_index,
    direction) with direction +1 for the canonical orientation (segments run
    along the edge; arcs run from their side-i to their side-i+1 endpoint).
    Nodes are pattern point ids, or -1 for the 0-cell.
    """

    def __init__(self, cx: TriangularComplex, pattern: Pattern):
        self.cx = cx
        self.pattern = pattern

    def _seg_ends(self, e, j):
        pts = self.pattern.edge_points[e]
        tail = pts[j - 1] if j > 0 else -1
        head = pts[j] if j < len(pts) else -1
        return tail, head

    def _step_data(self, step):
        kind = step[0]
        if kind == "seg":
            _, e, j, direction = step
            tail, head = self._seg_ends(e, j)
            word: Word = (Letter(e, 1),) if j == 0 else ()
        elif kind == "arc":
            _, ai, direction = step
            arc = self.pattern.arcs[ai]
            tail, head = arc.p, arc.q
            word = arc_word(self.cx, arc)
        else:
            raise PathNotComposable(f"unknown step kind {kind!r}")
        if direction < 0:
            tail, head = head, tail
            word = invert_word(word)
        return tail, head, word

    def evaluate(self, path) -> Word:
        word: list[Letter] = []
        at = None
        for step in path:
            tail, head, part = self._step_data(step)
            if at is not None and at != tail:
                raise PathNotComposable(f"step {step} does not start at node {at}")
            at = head
            word.extend(part)
        return free_reduce(word)


def word_functor(cx: TriangularComplex, p: Pattern) -> PathEvaluator:
    return PathEvaluator(cx, p)


def _arc_adjacency(pattern: Pattern):
    adj: dict[int, list[tuple[int, int]]] = {}
    for ai, arc in enumerate(pattern.arcs):
        adj.setdefault(arc.p, []).append((ai, arc.q))
        adj.setdefault(arc.q, []).append((ai, arc.p))
    for lst in adj.values():
        lst.sort()
    return adj


def edge_group_words(t: Track, cx: TriangularComplex,
                     tp: TriangulatedPresentation) -> tuple[Word, ...]:
    """Generators of the track stabilizer: one word per non-tree arc.

    A BFS spanning tree of the point/arc incidence graph is grown from the
    lowest point id; the tail connecting the 0-cell to the root is the slide
    path of the root point, which emits nothing.
    """
    pattern = t.pattern
    if pattern.is_empty():
        return ()
    if is_twisted(t):
        raise TwistedInput("edge groups are extracted from untwisted tracks")
    adj = _arc_adjacency(pattern)
    root = 0
    word_to: dict[int, Word] = {root: ()}
    tree_arcs: set[int] = set()
    queue = [root]
    while queue:
        a = queue.pop(0)
        for ai, b in adj.get(a, ()):
            if b in word_to or ai in tree_arcs:
                continue
            arc = pattern.arcs[ai]
            w = arc_word(cx, arc)
            step = w if arc.p == a else invert_word(w)
            if arc.p == arc.q:
                continue  # a self-loop can never be a tree arc
            tree_arcs.add(ai)
            word_to[b] = free_reduce(word_to[a] + step)
            queue.append(b)
    if len(word_to) != pattern.point_count:
        raise InternalInvariant("track incidence graph is not connected")
    words = []
    for ai, arc in enumerate(pattern.arcs):
        if ai in tree_arcs:
            continue
        loop = word_to[arc.p] + arc_word(cx, arc) + invert_word(word_to[arc.q])
        words.append(tp.eliminate(free_reduce(loop)))
    return tuple(words)


def _point_copy_region(r: RegionDecomposition, point: int, forward: bool) -> int:
    pattern = r.pattern
    e, pos = pattern.point_position[point]
    j = pos + 1 if forward else pos
    return r.region_of[("S", e, j)]


def _arc_side_faces(pattern: Pattern, arc):
    t, i, k = arc.triangle, arc.corner, arc.depth
    inner = ("F", t, i, k - 1)
    x = pattern.vector[3 * t + i]
    outer = ("F", t, i, k) if k < x else ("C", t)
    return inner, outer


def vertex_group_words(r: RegionDecomposition, region: int, cx: TriangularComplex,
                       tp: TriangulatedPresentation) -> tuple[Word, ...]:
    """Generators of a region's fundamental-group image.

    The region's 1-skeleton in the cut complex has the 0-cell and the pattern
    point copies as nodes, and the region's edge segments and arc sides as
    edges.  Words of the non-tree edges of a BFS spanning tree generate the
    image; loops at the 0-cell (free edges, whole 1-cells in the region) are
    picked up the same way.
    """
    if not 0 <= region < r.count:
        raise InvalidRegion(f"region {region} out of range")
    pattern = r.pattern
    cxp = pattern.cx
    if cx != cxp:
        raise InternalInvariant("region decomposition built on a different complex")

    nodes: list = []
    if r.region_of[BASEPOINT] == region:
        nodes.append(("V",))
    for point in range(pattern.point_count):
        for forward in (False, True):
            if _point_copy_region(r, point, forward) == region:
                nodes.append(("P", point, forward))
    node_index = {n: i for i, n in enumerate(nodes)}

    edges = []  # (tail node, head node, word)
    for e in range(cxp.edge_count):
        pts = pattern.edge_points[e]
        for j in range(len(pts) + 1):
            if r.region_of[("S", e, j)] != region:
                continue
            tail = ("V",) if j == 0 else ("P", pts[j - 1], True)
            head = ("V",) if j == len(pts) else ("P", pts[j], False)
            word: Word = (Letter(e, 1),) if j == 0 else ()
            edges.append((tail, head, word))
    for ai, arc in enumerate(pattern.arcs):
        inner, outer = _arc_side_faces(pattern, arc)
        w = arc_word(cxp, arc)
        for face, corner_side in ((inner, True), (outer, False)):
            if r.region_of[face] != region:
                continue
            tail = ("P", arc.p, arc.dirf_p if corner_side else not arc.dirf_p)
            head = ("P", arc.q, arc.dirf_q if corner_side else not arc.dirf_q)
            edges.append((tail, head, w))

    for tail, head, _ in edges:
        if tail not in node_index or head not in node_index:
            raise InternalInvariant("region edge touches a node outside the region")

    word_to: dict = {}
    tree: set[int] = set()
    if nodes:
        root = nodes[0]
        word_to[root] = ()
        queue = [root]
        while queue:
            at = queue.pop(0)
            for ei, (tail, head, w) in enumerate(edges):
                if ei in tree:
                    continue
                if tail == at and head not in word_to:
                    other, step = head, w
                elif head == at and tail not in word_to:
                    other, step = tail, invert_word(w)
                else:
                    continue
                tree.add(ei)
                word_to[other] = free_reduce(word_to[at] + step)
                queue.append(other)
        if len(word_to) != len(nodes):
            raise InternalInvariant("region 1-skeleton is not connected")
    words = []
    for ei, (tail, head, w) in enumerate(edges):
        if ei in tree:
            continue
        loop = word_to[tail] + w + invert_word(word_to[head])
        words.append(tp.eliminate(free_reduce(loop)))
    return tuple(words)


@dataclass(frozen=True)
class Splitting:
    """Amalgam or HNN decomposition carried by an untwisted track."""

    kind: str  # "amalgam" | "hnn"
    edge_words: tuple[Word, ...]
    vertex_words: tuple[tuple[Word, ...], ...]  # two lists (amalgam) or one (hnn)
    stable_hom: tuple[tuple[str, int], ...] | None  # original generator -> Z
    stable_letter: Word | None
    trivial_flag: str
    trivial_side: int | None


def _nielsen_reduce(words):
    """Bounded, length-non-increasing cleanup of a generating set.

    Two kinds of sound moves run to a fixpoint, each strictly shrinking the
    total letter count:

    * when every word is wrapped as l x l^-1 by one common letter l, the set
      is conjugated by l (whether a vertex group is the whole group is a
      conjugation-invariant question);
    * a word may absorb an already-single-letter member on either side when
      the product is strictly shorter.

    Deliberately weaker than full Nielsen reduction: the flag it feeds is
    meant to catch only blatantly trivial sides.
    """
    def canon(w):
        return min(w, invert_word(w))

    current = {canon(free_reduce(w)) for w in words if free_reduce(w)}
    changed = True
    while changed:
        changed = False
        multi = [w for w in current if len(w) > 1]
        if multi and len(multi) == len(current):
            heads = {w[0] for w in multi}
            if len(heads) == 1:
                head = next(iter(heads))
                if all(w[-1] == head.inverse() for w in multi):
                    current = {canon(w[1:-1]) for w in multi if w[1:-1]}
                    changed = True
                    continue
        singles = [w for w in current if len(w) == 1]
        for w in sorted(current):
            if len(w) <= 1:
                continue
            for u in singles:
                for cand in (u + w, invert_word(u) + w, w + u, w + invert_word(u)):
                    red = free_reduce(cand)
                    if red and len(red) < len(w):
                        current.discard(w)
                        current.add(canon(red))
                        changed = True
                        break
                if changed:
                    break
            if changed:
                break
    return sorted(current)


def triviality_check(vertex_lists, p: Presentation) -> tuple[str, int | None]:
    """Sound, incomplete detection of an obviously trivial splitting.

    Returns (flag, side): Trivial when some vertex list, after free reduction
    and the bounded cleanup above, contains every original generator as a
    single letter (that vertex group is then syntactically the whole group).
    Never flags a genuinely non-trivial splitting; misses are expected.
    """
    n = len(p.generators)
    for side, words in enumerate(vertex_lists):
        reduced = _nielsen_reduce(words)
        singles = {w[0].gen for w in reduced if len(w) == 1}
        if all(g in singles for g in range(n)):
            return TRIVIAL, side
    return UNKNOWN, None


def stable_homomorphism(t: Track, cx: TriangularComplex) -> dict[int, int]:
    """Signed crossing counts per (extended) edge, for an untwisted track.

    The global sign is fixed by orienting the lowest arc's cut-off corner
    positively.
    """
    colors = coorientation(t)
    pattern = t.pattern
    values = {}
    for e in range(cx.edge_count):
        total = 0
        for point in pattern.edge_points[e]:
            total += 1 if colors[point] else -1
        values[e] = total
    return values


def stable_letter_word(values_by_gen, tp: TriangulatedPresentation) -> Word:
    """A word realizing the least positive value of the homomorphism.

    Folds an extended gcd over the original generators, so the resulting
    loop crosses the track the minimum possible net number of times.
    """
    n = len(tp.base.generators)
    g = 0
    coeffs = [0] * n
    for i in range(n):
        v = values_by_gen.get(i, 0)
        if v == 0:
            continue
        if g == 0:
            g = abs(v)
            coeffs = [0] * n
            coeffs[i] = 1 if v > 0 else -1
            continue
        # extended gcd of (g, v)
        a, b = g, v
        x0, x1 = 1, 0
        while b:
            q = a // b
            a, b = b, a - q * b
            x0, x1 = x1, x0 - q * x1
        # a = gcd, with a = x0*g + y*v for some y
        y = (a - x0 * g) // v
        coeffs = [x0 * c for c in coeffs]
        coeffs[i] += y
        g = a
    if g < 0:
        g = -g
        coeffs = [-c for c in coeffs]
    if g == 0:
        raise InternalInvariant("stable homomorphism vanishes on all generators")
    word: list[Letter] = []
    for i, c in enumerate(coeffs):
        word.extend([Letter(i, 1 if c > 0 else -1)] * abs(c))
    return free_reduce(word)


def classify_splitting(t: Track, cx: TriangularComplex,
                       tp: TriangulatedPresentation) -> Splitting:
    """Amalgam (separating) or HNN (non-separating) data for a track."""
    if is_twisted(t):
        raise TwistedInput("double the track before classifying")
    edge_words = edge_group_words(t, cx, tp)
    regions = cut_regions(t.pattern)
    if is_separating(t):
        base = regions.basepoint_region
        other = next(i for i in range(regions.count) if i != base)
        first = vertex_group_words(regions, base, cx, tp)
        second = vertex_group_words(regions, other, cx, tp)
        flag, side = triviality_check((first, second), tp.base)
        return Splitting(
            kind="amalgam",
            edge_words=edge_words,
            vertex_words=(first, second),
            stable_hom=None,
            stable_letter=None,
            trivial_flag=flag,
            trivial_side=side,
        )
    values = stable_homomorphism(t, cx)
    n = len(tp.base.generators)
    hom = tuple((tp.base.generators[i], values.get(i, 0)) for i in range(n))
    letter = stable_letter_word(values, tp)
    only = vertex_group_words(regions, 0, cx, tp)
    flag, side = triviality_check((only,), tp.base)
    return Splitting(
        kind="hnn",
        edge_words=edge_words,
        vertex_words=(only,),
        stable_hom=hom,
        stable_letter=letter,
        trivial_flag=flag,
        trivial_side=side,
    )


def hom_eval(word, hom: dict[str, int], names) -> int:
    total = 0
    for letter in word:
        total += letter.sign * hom[names[letter.gen]]
    return total


def crossing_parity(word, t: Track) -> int:
    """Parity of the number of track crossings of the loop spelled by word."""
    total = 0
    for letter in word:
        total += len(t.pattern.edge_points[letter.gen])
    return total % 2


def _snf_with_col_transform(matrix, width):
    """Smith normal form; returns (diagonal entries, V) with U @ A @ V = D."""
    a = [list(r) for r in matrix]
    rows = len(a)
    v = [[1 if i == j else 0 for j in range(width)] for i in range(width)]

    def col_op(j, k, q):
        for r in a:
            r[j] -= q * r[k]
        for r in v:
            r[j] -= q * r[k]

    def col_swap(j, k):
        for r in a:
            r[j], r[k] = r[k], r[j]
        for r in v:
            r[j], r[k] = r[k], r[j]

    def col_neg(j):
        for r in a:
            r[j] = -r[j]
        for r in v:
            r[j] = -r[j]

    def row_op(i, k, q):
        a[i] = [x - q * y for x, y in zip(a[i], a[k])]

    def row_swap(i, k):
        a[i], a[k] = a[k], a[i]

    diag = []
    top = 0
    for _ in range(min(rows, width)):
        # find the smallest nonzero entry in the remaining block
        best = None
        for i in range(top, rows):
            for j in range(top, width):
                if a[i][j] != 0:
                    key = (abs(a[i][j]), i, j)
                    if best is None or key < best:
                        best = key
        if best is None:
            break
        _, bi, bj = best
        row_swap(top, bi)
        col_swap(top, bj)
        while True:
            for i in range(top + 1, rows):
                if a[i][top]:
                    row_op(i, top, a[i][top] // a[top][top])
            for j in range(top + 1, width):
                if a[top][j]:
                    col_op(j, top, a[top][j] // a[top][top])
            if all(a[i][top] == 0 for i in range(top + 1, rows)) and all(
                a[top][j] == 0 for j in range(top + 1, width)
            ):
                break
            best = None
            for i in range(top, rows):
                for j in range(top, width):
                    if a[i][j] != 0:
                        key = (abs(a[i][j]), i, j)
                        if best is None or key < best:
                            best = key
            _, bi, bj = best
            row_swap(top, bi)
            col_swap(top, bj)
        if a[top][top] < 0:
            col_neg(top)
        diag.append(a[top][top])
        top += 1
    # note: divisibility chaining is irrelevant for the free part
    return diag, v


def abelianization_hom(p: Presentation) -> dict[str, tuple[int, ...]]:
    """Free-part coordinates of each generator in the abelianization.

    Computed from the Smith normal form of the relator exponent matrix; the
    free rank is the generator count minus the matrix rank.
    """
    n = len(p.generators)
    matrix = []
    for rel in p.relators:
        row = [0] * n
        for letter in rel:
            row[letter.gen] += letter.sign
        matrix.append(row)
    if not matrix:
        ident = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        return {name: tuple(ident[i]) for i, name in enumerate(p.generators)}
    diag, v = _snf_with_col_transform(matrix, n)
    rank = sum(1 for d in diag if d != 0)
    return {
        name: tuple(v[i][rank:]) for i, name in enumerate(p.generators)
    }


def abelian_image(word, hom: dict[str, tuple[int, ...]], names) -> tuple[int, ...]:
    if not hom:
        return ()
    size = len(next(iter(hom.values())))
    out = [0] * size
    for letter in word:
        coords = hom[names[letter.gen]]
        for i, c in enumerate(coords):
            out[i] += letter.sign * c
    return tuple(out)
