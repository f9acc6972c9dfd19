import itertools
import random

import pytest

from trackline.complex import build_complex, matching_system
from trackline.errors import NegativeEntry, NotASolution, TwistedInput
from trackline.lattice import nonnegativize, nullspace_basis
from trackline.pattern import (
    component_vectors,
    components,
    cut_regions,
    is_separating,
    is_twisted,
    realize,
    untwist_basis,
)
from trackline.presentation import parse_presentation, triangulate

from conftest import (
    PRINTED_HIGMAN_VECTORS,
    TREFOIL_T1,
    printed_vector_to_canonical,
    random_presentation_texts,
)

TREFOIL_TWISTED = (0, 0, 0, 0, 0, 0, 0, 1, 0)  # found by bounded search
TREFOIL_RED = (0, 2, 2, 0, 2, 4, 3, 0, 3)  # untwisted non-separating


def test_realize_t1_counts(trefoil):
    p = realize(TREFOIL_T1, trefoil.cx)
    assert p.point_count == 4
    assert p.arc_count == 5
    assert len(p.edge_points[0]) == 2  # c
    assert len(p.edge_points[2]) == 2  # first fresh generator
    assert len(p.edge_points[1]) == 0 == len(p.edge_points[3])


def test_realize_all_ones_counts(trefoil):
    p = realize((1,) * 9, trefoil.cx)
    assert p.point_count == 8
    assert p.arc_count == 9


def test_realize_zero_vector_empty(trefoil):
    assert realize((0,) * 9, trefoil.cx).is_empty()


def test_realize_rejects_negative(trefoil):
    with pytest.raises(NegativeEntry):
        realize((-1,) + (0,) * 8, trefoil.cx)


def test_realize_rejects_non_solution(trefoil):
    with pytest.raises(NotASolution):
        realize((1,) + (0,) * 8, trefoil.cx)


def test_components_t1_connected(trefoil):
    assert len(components(realize(TREFOIL_T1, trefoil.cx))) == 1


def test_components_doubled_t1(trefoil):
    doubled = realize(tuple(2 * x for x in TREFOIL_T1), trefoil.cx)
    comps = components(doubled)
    assert len(comps) == 2
    assert all(c.vector == TREFOIL_T1 for c in comps)


def test_components_higman_all_ones(higman):
    assert len(components(realize((1,) * 36, higman.cx))) == 1


def test_degree_law_and_additivity_corpus():
    rng = random.Random(17)
    for text in random_presentation_texts(seed=41, count=25, min_rels=1):
        setup = parse_presentation(text)
        cx = build_complex(triangulate(setup))
        sys = matching_system(cx)
        if cx.corner_count == 0:
            continue
        basis = nonnegativize(nullspace_basis(sys))
        for _ in range(44):
            coeffs = [rng.randint(0, 2) for _ in range(basis.rank)]
            vec = [0] * cx.corner_count
            for c, bv in zip(coeffs, basis.vectors):
                for i in range(cx.corner_count):
                    vec[i] += c * bv[i]
            vec = tuple(vec)
            pattern = realize(vec, cx)
            # degree law
            degrees = pattern.point_degrees()
            for point, (e, _pos) in enumerate(pattern.point_position):
                assert degrees[point] == len(cx.occurrences(e))
            # additivity of component vectors
            parts = component_vectors(pattern)
            total = [0] * cx.corner_count
            for part in parts:
                for i, x in enumerate(part):
                    total[i] += x
            assert tuple(total) == vec
            # Euler consistency
            assert pattern.euler == pattern.point_count - sum(vec)


def test_t1_untwisted_separating(trefoil):
    t = components(realize(TREFOIL_T1, trefoil.cx))[0]
    assert not is_twisted(t)
    assert is_separating(t)


def test_higman_all_ones_untwisted_separating(higman):
    t = components(realize((1,) * 36, higman.cx))[0]
    assert not is_twisted(t)
    assert is_separating(t)


def test_trefoil_twisted_track(trefoil):
    t = components(realize(TREFOIL_TWISTED, trefoil.cx))[0]
    assert is_twisted(t)
    doubled = components(realize(tuple(2 * x for x in TREFOIL_TWISTED), trefoil.cx))
    assert len(doubled) == 1
    assert is_separating(doubled[0])


def test_twisted_search_matches_doubling(trefoil):
    # bounded search over small combinations: every twisted track's double is
    # one separating track and vice versa
    basis = trefoil.basis
    seen_twisted = 0
    for coeffs in itertools.product(range(-1, 2), repeat=basis.rank):
        if not any(coeffs):
            continue
        vec = [0] * 9
        for c, bv in zip(coeffs, basis.vectors):
            for i in range(9):
                vec[i] += c * bv[i]
        if any(x < 0 for x in vec):
            continue
        for t in components(realize(tuple(vec), trefoil.cx)):
            doubled = components(realize(tuple(2 * x for x in t.vector), trefoil.cx))
            if is_twisted(t):
                seen_twisted += 1
                assert len(doubled) == 1
                assert is_separating(doubled[0])
            else:
                assert len(doubled) == 2
    assert seen_twisted > 0


def test_separating_raises_on_twisted(trefoil):
    t = components(realize(TREFOIL_TWISTED, trefoil.cx))[0]
    with pytest.raises(TwistedInput):
        is_separating(t)


def test_t1_regions(trefoil):
    p = realize(TREFOIL_T1, trefoil.cx)
    r = cut_regions(p)
    assert r.count == 2
    # every segment of edge d lies in the basepoint region
    for piece, rid in r.region_of.items():
        if piece[0] == "S" and piece[1] == 1:
            assert rid == r.basepoint_region


def test_empty_pattern_one_region(trefoil):
    r = cut_regions(realize((0,) * 9, trefoil.cx))
    assert r.count == 1


def test_red_track_one_region(trefoil):
    t = components(realize(TREFOIL_RED, trefoil.cx))[0]
    assert not is_twisted(t)
    assert not is_separating(t)
    assert cut_regions(t.pattern).count == 1


def test_printed_vectors_connected_untwisted_separating(higman):
    for pv in PRINTED_HIGMAN_VECTORS:
        cv = printed_vector_to_canonical(pv)
        comps = components(realize(cv, higman.cx))
        assert len(comps) == 1
        assert not is_twisted(comps[0])
        assert is_separating(comps[0])


def test_untwist_basis_higman(higman):
    reports = untwist_basis(higman.basis.vectors, higman.cx)
    assert len(reports) == 12
    for rep in reports:
        for j, track in enumerate(rep.tracks):
            assert not is_twisted(track)
            assert rep.separating[j] == is_separating(track)


def test_untwist_basis_trefoil(trefoil):
    reports = untwist_basis(trefoil.basis.vectors, trefoil.cx)
    assert len(reports) == 4
    # the solution space contains an untwisted non-separating class
    assert any(
        not tw and not sep
        for rep in reports
        for tw, sep in zip(rep.twisted_components, rep.separating)
    )
    # twisted elements were replaced by their doubles
    for rep in reports:
        for j, track in enumerate(rep.tracks):
            if rep.twisted_components[j]:
                assert rep.separating[j]


def test_separation_three_way_agreement_corpus():
    # is_separating internally computes region-count, edge-parity and
    # two-sided-coloring criteria and raises if they ever disagree
    checked = 0
    for text in random_presentation_texts(seed=59, count=30, min_rels=1):
        setup = parse_presentation(text)
        cx = build_complex(triangulate(setup))
        if cx.corner_count == 0:
            continue
        basis = nonnegativize(nullspace_basis(matching_system(cx)))
        for vec in basis.vectors:
            for t in components(realize(vec, cx)):
                if is_twisted(t):
                    t = components(
                        realize(tuple(2 * x for x in t.vector), cx)
                    )[0]
                is_separating(t)
                checked += 1
    assert checked > 50
