"""Exact integer linear algebra for the matching equations.

Everything here runs over Python's arbitrary-precision integers; no floats
are ever involved, so results are identical across runs and platforms.
Kernels are computed through a row-style Hermite normal form with a fixed
pivot rule (leftmost column, smallest absolute value, lowest index), which
makes every basis byte-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .complex import MatchingSystem, residual
from .errors import DimensionMismatch, InternalInvariant, NotASolution


class Inconclusive:
    """Verdict of a truncated search; compares equal only to itself."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Inconclusive"


INCONCLUSIVE = Inconclusive()


def _pivot_choice(rows, col, start):
    """Row index >= start minimizing (|entry|, index) among nonzeros in col."""
    best = None
    for i in range(start, len(rows)):
        val = rows[i][col]
        if val != 0:
            key = (abs(val), i)
            if best is None or key < best[0]:
                best = (key, i)
    return None if best is None else best[1]


def hnf_rows(matrix):
    """Row Hermite normal form.

    Returns (H, U, pivots) with U unimodular, U @ matrix == H, H in row
    echelon form with positive pivots and reduced entries above them, and
    pivots the list of (row, col) pivot positions.
    """
    rows = [list(r) for r in matrix]
    n = len(rows)
    cols = len(rows[0]) if rows else 0
    u = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    pivots = []
    rank = 0
    for col in range(cols):
        while True:
            piv = _pivot_choice(rows, col, rank)
            if piv is None:
                break
            if piv != rank:
                rows[rank], rows[piv] = rows[piv], rows[rank]
                u[rank], u[piv] = u[piv], u[rank]
            done = True
            p = rows[rank][col]
            for i in range(rank + 1, n):
                if rows[i][col] != 0:
                    q = rows[i][col] // p
                    if q:
                        rows[i] = [a - q * b for a, b in zip(rows[i], rows[rank])]
                        u[i] = [a - q * b for a, b in zip(u[i], u[rank])]
                    if rows[i][col] != 0:
                        done = False
            if done:
                break
        if piv is None:
            continue
        if rows[rank][col] < 0:
            rows[rank] = [-a for a in rows[rank]]
            u[rank] = [-a for a in u[rank]]
        p = rows[rank][col]
        for i in range(rank):
            q = rows[i][col] // p
            if q:
                rows[i] = [a - q * b for a, b in zip(rows[i], rows[rank])]
                u[i] = [a - q * b for a, b in zip(u[i], u[rank])]
        pivots.append((rank, col))
        rank += 1
    h = tuple(tuple(r) for r in rows)
    return h, tuple(tuple(r) for r in u), tuple(pivots)


def kernel_rows(matrix, width):
    """Canonical basis of {v in Z^width : matrix @ v = 0}, as HNF rows.

    The lattice returned is saturated: it contains every integer solution.
    """
    if not matrix:
        ident = [[1 if i == j else 0 for j in range(width)] for i in range(width)]
        return tuple(tuple(r) for r in ident)
    transpose = [[row[j] for row in matrix] for j in range(width)]
    h, u, pivots = hnf_rows(transpose)
    rank = len(pivots)
    kernel = [u[i] for i in range(rank, width)]
    if not kernel:
        return ()
    canon, _, _ = hnf_rows(kernel)
    return tuple(r for r in canon if any(r))


def _reduce_against_hnf(v, basis, pivots):
    """Reduce v by HNF basis rows; returns (coefficients, remainder)."""
    v = list(v)
    coeffs = [0] * len(basis)
    for (i, col) in pivots:
        p = basis[i][col]
        q = v[col] // p
        if q:
            coeffs[i] = q
            v = [a - q * b for a, b in zip(v, basis[i])]
    return coeffs, v


@dataclass(frozen=True)
class SolutionBasis:
    """An integer basis of the matching-equation solution lattice.

    When the lattice is nonzero the all-ones vector is basis element 0; the
    remaining vectors may be shifted by multiples of it (nonnegativize).
    """

    corner_count: int
    vectors: tuple[tuple[int, ...], ...]

    @property
    def rank(self) -> int:
        return len(self.vectors)

    @property
    def base_positive(self) -> tuple[int, ...]:
        return tuple([1] * self.corner_count)


def _complete_primitive(coeffs):
    """A unimodular matrix whose first row is the primitive vector coeffs."""
    n = len(coeffs)
    c = list(coeffs)
    # Column operations bring c to e_1; mirror inverse row operations on w,
    # maintaining w = V^{-1} for the accumulated column matrix V.  Then
    # c @ V = e_1 gives c = first row of V^{-1} = first row of w.
    w = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def colop_sub(j, k, q):
        # col_j -= q * col_k  on V  <=>  row_k += q * row_j  on V^{-1}
        c[j] -= q * c[k]
        w[k] = [a + q * b for a, b in zip(w[k], w[j])]

    def colswap(j, k):
        c[j], c[k] = c[k], c[j]
        w[j], w[k] = w[k], w[j]

    for j in range(1, n):
        while c[j] != 0:
            if c[0] == 0 or abs(c[j]) < abs(c[0]):
                colswap(0, j)
                continue
            colop_sub(j, 0, c[j] // c[0])
    if c[0] == -1:
        c[0] = 1
        w[0] = [-a for a in w[0]]
    if c[0] != 1:
        raise InternalInvariant("coefficient vector is not primitive")
    return w


def nullspace_basis(sys: MatchingSystem) -> SolutionBasis:
    """Saturated integer kernel of the matching system.

    For a nonzero kernel the all-ones vector (always a solution: each
    occurrence count is 2) is installed as basis element 0 by a unimodular
    change of basis, so the spanned lattice is exactly the integer kernel.
    """
    width = sys.corner_count
    kernel = kernel_rows(sys.rows, width)
    if width == 0 or not kernel:
        return SolutionBasis(corner_count=width, vectors=())
    ones = [1] * width
    _, _, pivots = hnf_rows(kernel)
    coeffs, rem = _reduce_against_hnf(ones, kernel, pivots)
    if any(rem):
        raise InternalInvariant("all-ones vector is not in the kernel lattice")
    u2 = _complete_primitive(coeffs)
    vectors = []
    for row in u2:
        vec = [0] * width
        for coef, basis_row in zip(row, kernel):
            if coef:
                vec = [a + coef * b for a, b in zip(vec, basis_row)]
        vectors.append(tuple(vec))
    if vectors[0] != tuple(ones):
        raise InternalInvariant("basis completion did not place all-ones first")
    return SolutionBasis(corner_count=width, vectors=tuple(vectors))


def nonnegativize(b: SolutionBasis) -> SolutionBasis:
    """Shift each basis vector by the least multiple of all-ones making it >= 0."""
    if b.rank == 0:
        return b
    out = [b.vectors[0]]
    for vec in b.vectors[1:]:
        k = max(0, -min(vec))
        out.append(tuple(x + k for x in vec))
    return replace(b, vectors=tuple(out))


def lattice_member(b: SolutionBasis, v) -> bool:
    """True when v is an integer combination of the basis vectors."""
    if len(v) != b.corner_count:
        raise DimensionMismatch(
            f"vector has {len(v)} entries, basis lives in dimension {b.corner_count}"
        )
    if b.rank == 0:
        return not any(v)
    canon, _, pivots = hnf_rows(b.vectors)
    rows = [r for r in canon if any(r)]
    v = list(v)
    for (i, col) in pivots:
        p = rows[i][col]
        if v[col] % p != 0:
            return False
        q = v[col] // p
        if q:
            v = [a - q * x for a, x in zip(v, rows[i])]
    return not any(v)


def solve_coefficients(b: SolutionBasis, v):
    """Integer coefficients expressing v over the basis, or None."""
    if len(v) != b.corner_count:
        raise DimensionMismatch("dimension mismatch")
    if b.rank == 0:
        return () if not any(v) else None
    h, u, pivots = hnf_rows(b.vectors)
    coeffs, rem = _reduce_against_hnf(v, h, pivots)
    if any(rem):
        return None
    # coefficients are over the HNF rows; map back through u: h = u @ basis
    out = [0] * b.rank
    for ci, c in enumerate(coeffs):
        if c:
            for j in range(b.rank):
                out[j] += c * u[ci][j]
    # verify exactly (u need not be the inverse relation we want if rank deficient)
    check = [0] * b.corner_count
    for j, c in enumerate(out):
        if c:
            check = [a + c * x for a, x in zip(check, b.vectors[j])]
    if tuple(check) != tuple(v):
        return None
    return tuple(out)


def is_vertex_solution(b: SolutionBasis, v, bound: int, sys: MatchingSystem,
                       budget: int = 200_000, should_stop=None):
    """Bounded test of the vertex-solution property.

    Searches all decompositions n*v = v1 + v2 with 1 <= n <= bound and v1, v2
    nonzero non-negative solutions; returns False on a witness whose parts are
    not both integer multiples of v, True when the whole space was searched,
    and INCONCLUSIVE when the node budget ran out first.
    """
    v = tuple(v)
    if len(v) != sys.corner_count:
        raise DimensionMismatch("dimension mismatch")
    if any(x < 0 for x in v):
        raise NotASolution("vector has negative entries")
    if any(residual(sys, v)):
        raise NotASolution("vector does not satisfy the matching equations")
    if b.rank == 0 or not any(v):
        return True
    canon, _, pivots = hnf_rows(b.vectors)
    rows = [r for r in canon if any(r)]
    width = b.corner_count

    def multiple_of_v(w):
        base = next((i for i, x in enumerate(v) if x), None)
        if w[base] % v[base] != 0:
            return False
        k = w[base] // v[base]
        return all(x == k * y for x, y in zip(w, v))

    nodes = 0
    for n in range(1, bound + 1):
        target = tuple(n * x for x in v)

        # DFS over HNF coefficients; pivot structure gives exact per-level
        # bounds because rows below a pivot vanish in that column.
        def dfs(level, acc):
            nonlocal nodes
            if should_stop is not None and should_stop():
                return INCONCLUSIVE
            nodes += 1
            if nodes > budget:
                return INCONCLUSIVE
            if level == len(rows):
                w = tuple(acc)
                if any(x < 0 or x > t for x, t in zip(w, target)):
                    return True  # outside the box in a non-pivot column
                if any(w) and w != target:
                    w2 = tuple(t - x for t, x in zip(target, w))
                    if not (multiple_of_v(w) and multiple_of_v(w2)):
                        return False
                return True
            _, col = pivots[level]
            p = rows[level][col]
            # acc[col] + a*p must land in [0, target[col]]
            lo = -(acc[col] // p)
            hi = (target[col] - acc[col]) // p
            for a in range(lo, hi + 1):
                nxt = [x + a * y for x, y in zip(acc, rows[level])] if a else list(acc)
                res = dfs(level + 1, nxt)
                if res is not True:
                    return res
            return True

        outcome = dfs(0, [0] * width)
        if outcome is not True:
            return outcome
    return True
