import random

import pytest

from trackline.complex import build_complex, matching_system
from trackline.errors import AllZero, ResolutionFailed, TwistedTrack
from trackline.lattice import nonnegativize, nullspace_basis
from trackline.pattern import components, is_separating, is_twisted, realize
from trackline.presentation import parse_presentation, triangulate
from trackline.cubing import (
    build_arrangement,
    build_dual_complex,
    combination_pattern,
    common_side_region,
    default_orderings,
    parallel_orderings,
    resolve_mixed,
    returning_arc_report,
)

from conftest import (
    PRINTED_HIGMAN_VECTORS,
    TREFOIL_T1,
    crossing_count_oracle,
    euler_oracle,
    printed_vector_to_canonical,
    random_presentation_texts,
)

TREFOIL_RED = (0, 2, 2, 0, 2, 4, 3, 0, 3)


def _track(setup, vector):
    return components(realize(vector, setup.cx))[0]


def _two_track_samples(count, seed):
    """Deterministic corpus of two-track arrangements on random complexes."""
    rng = random.Random(seed)
    samples = []
    for text in random_presentation_texts(seed=seed, count=60, min_rels=1):
        if len(samples) >= count:
            break
        setup = parse_presentation(text)
        cx = build_complex(triangulate(setup))
        if cx.corner_count == 0:
            continue
        basis = nonnegativize(nullspace_basis(matching_system(cx)))
        tracks = []
        for vec in basis.vectors:
            for t in components(realize(vec, cx)):
                if is_twisted(t):
                    t = components(realize(tuple(2 * x for x in t.vector), cx))[0]
                tracks.append(t)
        if len(tracks) < 2:
            continue
        i = rng.randrange(len(tracks))
        j = rng.randrange(len(tracks))
        if i == j:
            j = (j + 1) % len(tracks)
        samples.append((cx, tracks[i], tracks[j]))
    return samples


def test_trefoil_pair_crossings_match_oracle(trefoil):
    arr = build_arrangement([_track(trefoil, TREFOIL_T1),
                             _track(trefoil, TREFOIL_RED)], trefoil.cx)
    assert arr.crossing_count == crossing_count_oracle(arr)
    dual = build_dual_complex(arr)
    assert dual.square_count == arr.crossing_count


def test_single_track_no_crossings(trefoil):
    arr = build_arrangement([_track(trefoil, TREFOIL_T1)], trefoil.cx)
    assert arr.crossing_count == 0


def test_parallel_copies_never_interleave(trefoil):
    t1 = _track(trefoil, TREFOIL_T1)
    arr = build_arrangement(
        [t1, t1], trefoil.cx, orderings=parallel_orderings([t1, t1], trefoil.cx)
    )
    assert arr.crossing_count == 0


def test_arrangement_rejects_twisted(trefoil):
    t = components(realize((0, 0, 0, 0, 0, 0, 0, 1, 0), trefoil.cx))[0]
    with pytest.raises(TwistedTrack):
        build_arrangement([t], trefoil.cx)


def test_ordering_validation(trefoil):
    t1 = _track(trefoil, TREFOIL_T1)
    orderings = list(default_orderings([t1], trefoil.cx))
    orderings[0] = tuple(reversed(orderings[0]))  # breaks within-track order
    with pytest.raises(ValueError):
        build_arrangement([t1], trefoil.cx, orderings=orderings)


def test_single_separating_dual(trefoil):
    dual = build_dual_complex(build_arrangement([_track(trefoil, TREFOIL_T1)],
                                                trefoil.cx))
    assert (dual.vertex_count, dual.edge_count, dual.square_count) == (2, 1, 0)
    assert set(dual.edges[0][1]) == {0, 1}


def test_single_non_separating_dual(trefoil):
    dual = build_dual_complex(build_arrangement([_track(trefoil, TREFOIL_RED)],
                                                trefoil.cx))
    assert (dual.vertex_count, dual.edge_count, dual.square_count) == (1, 1, 0)
    assert dual.edges[0][1] == (0, 0)  # a self-loop


def test_trefoil_pair_euler_matches_oracle(trefoil):
    arr = build_arrangement([_track(trefoil, TREFOIL_T1),
                             _track(trefoil, TREFOIL_RED)], trefoil.cx)
    dual = build_dual_complex(arr)
    v, e, f = euler_oracle(arr)
    assert (dual.vertex_count, dual.edge_count, dual.square_count) == (v, e, f)


def test_random_two_track_arrangements_match_oracles():
    samples = _two_track_samples(count=20, seed=131)
    assert len(samples) == 20
    for cx, ta, tb in samples:
        arr = build_arrangement([ta, tb], cx)
        dual = build_dual_complex(arr)
        assert dual.square_count == crossing_count_oracle(arr)
        v, e, f = euler_oracle(arr)
        assert (dual.vertex_count, dual.edge_count, dual.square_count) == (v, e, f)
        # every square's boundary alternates the two tracks' pieces
        for sq in dual.squares:
            tracks_of_edges = [dual.edges[eid][0] for eid in sq.edges]
            assert tracks_of_edges[0] == tracks_of_edges[2]
            assert tracks_of_edges[1] == tracks_of_edges[3]
            assert tracks_of_edges[0] != tracks_of_edges[1]


def test_edge_region_incidence_recovers_separation(trefoil):
    for vec, separating in ((TREFOIL_T1, True), (TREFOIL_RED, False)):
        t = _track(trefoil, vec)
        dual = build_dual_complex(build_arrangement([t], trefoil.cx))
        (track, regions) = dual.edges[0]
        assert (regions[0] != regions[1]) == separating
        assert is_separating(t) == separating


def test_combination_same_sign(trefoil):
    arr = build_arrangement([_track(trefoil, TREFOIL_T1),
                             _track(trefoil, TREFOIL_RED)], trefoil.cx)
    dual = build_dual_complex(arr)
    pattern = combination_pattern(arr, (2, 3), dual)
    for idx, (p, q, marked) in pattern.squares.items():
        assert (p, q) == (2, 3)
        assert marked == 0
    for eid, count in pattern.edge_counts.items():
        track = dual.edges[eid][0]
        assert count == (2 if track == 0 else 3)


def test_combination_mixed_sign(trefoil):
    arr = build_arrangement([_track(trefoil, TREFOIL_T1),
                             _track(trefoil, TREFOIL_RED)], trefoil.cx)
    dual = build_dual_complex(arr)
    pattern = combination_pattern(arr, (2, -3), dual)
    for idx, (p, q, marked) in pattern.squares.items():
        assert (p, q, marked) == (2, 3, 2)


def test_combination_single_track_support(trefoil):
    arr = build_arrangement([_track(trefoil, TREFOIL_T1),
                             _track(trefoil, TREFOIL_RED)], trefoil.cx)
    dual = build_dual_complex(arr)
    pattern = combination_pattern(arr, (1, 0), dual)
    for eid, count in pattern.edge_counts.items():
        track = dual.edges[eid][0]
        assert count == (1 if track == 0 else 0)


def test_combination_rejects_zero(trefoil):
    arr = build_arrangement([_track(trefoil, TREFOIL_T1)], trefoil.cx)
    dual = build_dual_complex(arr)
    with pytest.raises(AllZero):
        combination_pattern(arr, (0,), dual)


def test_square_pattern_matching_along_edges():
    samples = _two_track_samples(count=5, seed=151)
    rng = random.Random(7)
    for cx, ta, tb in samples:
        arr = build_arrangement([ta, tb], cx)
        dual = build_dual_complex(arr)
        for _ in range(100):
            coeffs = (rng.randint(-4, 4), rng.randint(-4, 4))
            if not any(coeffs):
                continue
            pattern = combination_pattern(arr, coeffs, dual)
            for sq in dual.squares:
                ti, tj = sq.tracks
                p, q, marked = pattern.squares[sq.index]
                assert p == abs(coeffs[ti]) and q == abs(coeffs[tj])
                if coeffs[ti] * coeffs[tj] < 0:
                    assert marked == min(p, q)
                else:
                    assert marked == 0
                # matching: both squares sharing an edge demand the same count
                for eid in sq.edges:
                    assert pattern.edge_counts[eid] == abs(coeffs[dual.edges[eid][0]])


def test_same_sign_combination_has_no_returning_arcs(trefoil):
    t1 = _track(trefoil, TREFOIL_T1)
    red = _track(trefoil, TREFOIL_RED)
    arr = build_arrangement([t1, red], trefoil.cx)
    report = returning_arc_report(arr, (1, 1))
    assert report.returning == 0
    assert report.cancelled == 0
    expected = tuple(
        len(t1.pattern.edge_points[e]) + len(red.pattern.edge_points[e])
        for e in range(trefoil.cx.edge_count)
    )
    assert report.edge_counts == expected


def test_resolve_mixed_crossing_pair_of_copies(trefoil):
    # two copies of t1 under the default block ordering genuinely cross;
    # the (1, -1) combination resolves with every point cancelled
    t1 = _track(trefoil, TREFOIL_T1)
    arr = build_arrangement([t1, t1], trefoil.cx)
    assert arr.crossing_count > 0
    resolved = resolve_mixed(arr, (1, -1))
    report = returning_arc_report(resolved, (1, -1))
    assert report.returning == 0
    assert report.edge_counts == (0,) * trefoil.cx.edge_count


def test_resolve_mixed_all_positive_identity(trefoil):
    t1 = _track(trefoil, TREFOIL_T1)
    red = _track(trefoil, TREFOIL_RED)
    arr = build_arrangement([t1, red], trefoil.cx)
    assert resolve_mixed(arr, (2, 3)) is arr


def test_mixed_counts_are_absolute_differences(trefoil):
    t1 = _track(trefoil, TREFOIL_T1)
    red = _track(trefoil, TREFOIL_RED)
    arr = build_arrangement([t1, red], trefoil.cx)
    report = returning_arc_report(arr, (2, -3))
    expected = tuple(
        abs(2 * len(t1.pattern.edge_points[e]) - 3 * len(red.pattern.edge_points[e]))
        for e in range(trefoil.cx.edge_count)
    )
    assert report.edge_counts == expected


def test_resolve_mixed_reports_failure_when_dominance_fails(trefoil):
    # no trefoil track satisfies 1*t1 >= 1*t2 everywhere against the red
    # track, so some returning arcs cannot cancel and the bounded search
    # reports failure instead of guessing
    t1 = _track(trefoil, TREFOIL_T1)
    red = _track(trefoil, TREFOIL_RED)
    arr = build_arrangement([t1, red], trefoil.cx)
    with pytest.raises(ResolutionFailed):
        resolve_mixed(arr, (1, -1), max_attempts=40)


def test_common_side_region_higman(higman):
    t0 = _track(higman, printed_vector_to_canonical(PRINTED_HIGMAN_VECTORS[0]))
    t1 = _track(higman, printed_vector_to_canonical(PRINTED_HIGMAN_VECTORS[1]))
    rid = common_side_region([t0, t1], higman.cx, higman.tp)
    assert rid is not None


def test_common_side_region_single_track(higman):
    t0 = _track(higman, printed_vector_to_canonical(PRINTED_HIGMAN_VECTORS[0]))
    rid = common_side_region([t0], higman.cx, higman.tp)
    assert rid is not None


def test_common_side_region_rejects_non_trivial(trefoil):
    t1 = _track(trefoil, TREFOIL_T1)
    with pytest.raises(ValueError):
        common_side_region([t1], trefoil.cx, trefoil.tp)
