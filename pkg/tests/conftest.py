"""Shared fixtures and independent oracles for the test suite."""

import random
from fractions import Fraction

import pytest

from trackline.complex import build_complex, matching_system
from trackline.lattice import nonnegativize, nullspace_basis
from trackline.presentation import parse_presentation, triangulate

HIGMAN_TEXT = "a b c d : ab-a-b-b bc-b-c-c cd-c-d-d da-d-a-a"
TREFOIL_TEXT = "c d : ccc-d-d"

# The reference output prints corner vectors with the corner preceding side i
# listed first; canonical order puts the corner following side i first.  The
# fixed relabeling below converts a printed vector to canonical coordinates
# (the same shift maps the printed trefoil vector to its canonical form).
PRINTED_HIGMAN_VECTORS = (
    (1,) * 36,
    (1, 3, 1, 0, 2, 2, 1, 1, 3) + (2,) * 27,
    (2, 0, 4, 5, 1, 1, 3, 3, 1, 3, 1, 1, 1, 3) + (1,) * 22,
    (3, 1, 5, 6, 2, 2, 4, 4, 2, 2, 4, 0, 0, 2, 4) + (2,) * 21,
)

TREFOIL_T1 = (1, 1, 1, 2, 0, 0, 0, 0, 0)


def printed_vector_to_canonical(v):
    return tuple(v[3 * t + (i + 1) % 3] for t in range(len(v) // 3) for i in range(3))


class Setup:
    def __init__(self, text):
        self.presentation = parse_presentation(text)
        self.tp = triangulate(self.presentation)
        self.cx = build_complex(self.tp)
        self.system = matching_system(self.cx)
        self.basis = nonnegativize(nullspace_basis(self.system))


@pytest.fixture(scope="session")
def higman():
    return Setup(HIGMAN_TEXT)


@pytest.fixture(scope="session")
def trefoil():
    return Setup(TREFOIL_TEXT)


def random_presentation_texts(seed, count, max_gens=3, max_rels=2, max_len=5,
                              min_rels=0):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        ngen = rng.randint(1, max_gens)
        gens = list("abcd"[:ngen])
        nrel = rng.randint(min_rels, max_rels)
        rels = []
        for _ in range(nrel):
            length = rng.randint(1, max_len)
            tok = "".join(
                ("-" if rng.random() < 0.35 else "") + rng.choice(gens)
                for _ in range(length)
            )
            rels.append(tok)
        out.append(" ".join(gens) + " : " + " ".join(rels))
    return out


# --- independent oracles ----------------------------------------------------


def rational_kernel_dimension(rows, width):
    """Kernel dimension by plain fraction Gaussian elimination."""
    mat = [[Fraction(x) for x in row] for row in rows]
    rank = 0
    for col in range(width):
        piv = None
        for r in range(rank, len(mat)):
            if mat[r][col] != 0:
                piv = r
                break
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        inv = 1 / mat[rank][col]
        mat[rank] = [x * inv for x in mat[rank]]
        for r in range(len(mat)):
            if r != rank and mat[r][col] != 0:
                f = mat[r][col]
                mat[r] = [a - f * b for a, b in zip(mat[r], mat[rank])]
        rank += 1
    return width - rank


def rational_kernel_integer_vectors(rows, width):
    """A rational kernel basis with denominators cleared (independent route)."""
    mat = [[Fraction(x) for x in row] for row in rows]
    pivots = []
    rank = 0
    for col in range(width):
        piv = None
        for r in range(rank, len(mat)):
            if mat[r][col] != 0:
                piv = r
                break
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        inv = 1 / mat[rank][col]
        mat[rank] = [x * inv for x in mat[rank]]
        for r in range(len(mat)):
            if r != rank and mat[r][col] != 0:
                f = mat[r][col]
                mat[r] = [a - f * b for a, b in zip(mat[r], mat[rank])]
        pivots.append(col)
        rank += 1
    free_cols = [c for c in range(width) if c not in pivots]
    out = []
    for fc in free_cols:
        vec = [Fraction(0)] * width
        vec[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            vec[pc] = -mat[r][fc]
        denom = 1
        for x in vec:
            denom = denom * x.denominator // _gcd(denom, x.denominator)
        out.append(tuple(int(x * denom) for x in vec))
    return out


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def box_solutions(system, bound_vector):
    """Every non-negative integer solution <= bound componentwise (brute force)."""
    from itertools import product

    from trackline.complex import residual

    width = system.corner_count
    ranges = [range(int(b) + 1) for b in bound_vector]
    out = []
    for v in product(*ranges):
        if not any(residual(system, v)):
            out.append(tuple(v))
    return out


def crossing_count_oracle(arrangement):
    """Count interleaving arc pairs of distinct tracks, per triangle."""
    total = 0
    for t in range(len(arrangement.cx.triangles)):
        chords = arrangement.chords[t]
        n = len(arrangement.boundary[t])
        for i in range(len(chords)):
            for j in range(i + 1, len(chords)):
                a, b = chords[i], chords[j]
                if a.track == b.track:
                    continue
                if _interleave_oracle(a.bpos1, a.bpos2, b.bpos1, b.bpos2, n):
                    total += 1
    return total


def _interleave_oracle(a1, a2, b1, b2, n):
    seq = []
    for k in range(n):
        if k in (a1, a2):
            seq.append("a")
        elif k in (b1, b2):
            seq.append("b")
    pat = "".join(seq)
    return pat in ("abab", "baba")


def euler_oracle(arrangement):
    """(V, E, F) of the dual complex by an independent enumeration.

    Faces of a straight-chord arrangement are sign-vector cells, so two
    boundary gaps lie in the same face exactly when no chord separates them.
    Faces with no boundary gap (grid cells enclosed by two pairs of parallel
    arcs) touch no edge segment, so each is an isolated region; their count
    per triangle is chords + crossings + 1 minus the boundary face classes.
    """
    cx = arrangement.cx

    parent = {}

    def find(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra

    # F: crossings
    f_count = crossing_count_oracle(arrangement)

    # gap identification within each triangle
    interior_faces = 0
    for t in range(len(cx.triangles)):
        items = arrangement.boundary[t]
        n = len(items)
        chords = arrangement.chords[t]

        def separates(ch, g1, g2):
            # gap g = boundary interval (g, g+1); chord separates the gaps
            # iff exactly one endpoint lies in the cyclic interval
            # (g1+1 .. g2) of boundary positions
            def inside(pos):
                return (pos - (g1 + 1)) % n <= (g2 - (g1 + 1)) % n

            return inside(ch.bpos1) != inside(ch.bpos2)

        gaps = list(range(n))
        for g1 in gaps:
            for g2 in gaps:
                if g2 <= g1:
                    continue
                if not any(separates(ch, g1, g2) for ch in chords):
                    union(("gap", t, g1), ("gap", t, g2))
        boundary_classes = len({find(("gap", t, g)) for g in gaps})
        crossings_here = 0
        for i in range(len(chords)):
            for j in range(i + 1, len(chords)):
                if chords[i].track == chords[j].track:
                    continue
                if _interleave_oracle(
                    chords[i].bpos1, chords[i].bpos2,
                    chords[j].bpos1, chords[j].bpos2, n
                ):
                    crossings_here += 1
        interior_faces += len(chords) + crossings_here + 1 - boundary_classes
        # gap -> segment gluing
        pos_side_gap = _oracle_side_gaps(items)
        for pos in range(n):
            side, gap = pos_side_gap[pos]
            e, orient = cx.triangles[t][side]
            total = len(arrangement.edge_orderings[e])
            j = gap if orient > 0 else total - gap
            union(("gap", t, pos), ("seg", e, j))
    for e in range(cx.edge_count):
        total = len(arrangement.edge_orderings[e])
        union(("V",), ("seg", e, 0))
        union(("V",), ("seg", e, total))
        for j in range(total + 1):
            find(("seg", e, j))
    find(("V",))
    v_count = len({find(x) for x in list(parent)}) + interior_faces

    # E: abstract piece-paths per arc, glued at pattern points
    eparent = {}

    def efind(x):
        eparent.setdefault(x, x)
        while eparent[x] != x:
            eparent[x] = eparent[eparent[x]]
            x = eparent[x]
        return x

    def eunion(a, b):
        ra, rb = efind(a), efind(b)
        if ra != rb:
            eparent[rb] = ra

    crossings_per_chord = {}
    for t in range(len(cx.triangles)):
        chords = arrangement.chords[t]
        n = len(arrangement.boundary[t])
        for i in range(len(chords)):
            cnt = 0
            for j in range(len(chords)):
                if i == j or chords[i].track == chords[j].track:
                    continue
                if _interleave_oracle(
                    chords[i].bpos1, chords[i].bpos2,
                    chords[j].bpos1, chords[j].bpos2, n
                ):
                    cnt += 1
            crossings_per_chord[(t, i)] = cnt
            for k in range(cnt + 1):
                efind((t, i, k))
            # path structure: consecutive pieces are NOT glued (cut at
            # crossings); nothing to do here
    # glue end pieces at pattern points
    for t in range(len(cx.triangles)):
        items = arrangement.boundary[t]
        chords = arrangement.chords[t]
        end_piece = {}
        for i, ch in enumerate(chords):
            cnt = crossings_per_chord[(t, i)]
            end_piece[ch.bpos1] = (i, 0 if ch.bpos1 < ch.bpos2 else cnt)
            end_piece[ch.bpos2] = (i, 0 if ch.bpos2 < ch.bpos1 else cnt)
        # NOTE: which physical end carries piece 0 is irrelevant for counting
        # as long as the two ends get the two extreme pieces consistently.
        for bpos, (i, piece) in end_piece.items():
            item = items[bpos]
            ti, pos = item[2], item[3]
            eunion(("pt", ti, item[1], bpos, t), (t, i, piece))
    # same pattern point across occurrences
    for ti, track in enumerate(arrangement.tracks):
        for point in range(track.pattern.point_count):
            e, pos = track.pattern.point_position[point]
            nodes = []
            for (t, s) in cx.occurrences(e):
                items = arrangement.boundary[t]
                for bpos, item in enumerate(items):
                    if item[0] == "slot" and item[1] == s and (item[2], item[3]) == (ti, pos):
                        nodes.append(("pt", ti, s, bpos, t))
            for a, b in zip(nodes, nodes[1:]):
                eunion(a, b)
    roots = set()
    for t in range(len(cx.triangles)):
        for i in range(len(arrangement.chords[t])):
            for k in range(crossings_per_chord[(t, i)] + 1):
                roots.add(efind((t, i, k)))
    e_count = len(roots)
    return v_count, e_count, f_count


def _oracle_side_gaps(items):
    n = len(items)
    out = {}
    for pos in range(n):
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
