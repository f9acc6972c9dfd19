"""Tracks, splittings and dual square complexes for finitely presented groups.

The pipeline: parse a presentation, triangulate it so every 2-cell has three
sides, build the matching equations over corner coordinates, compute an exact
integer basis of the solution lattice, realize basis vectors as tracks,
classify them (twisted / separating), extract the amalgam or HNN splitting
each untwisted track carries, and build the dual square complex of a chosen
arrangement of tracks.
"""

from .complex import (
    MatchingSystem,
    TriangularComplex,
    build_complex,
    matching_system,
    occurrence_count,
    residual,
)
from .cubing import (
    Arrangement,
    DualSquareComplex,
    SquarePattern,
    build_arrangement,
    build_dual_complex,
    combination_pattern,
    common_side_region,
    resolve_mixed,
    returning_arc_report,
)
from .lattice import (
    INCONCLUSIVE,
    SolutionBasis,
    is_vertex_solution,
    lattice_member,
    nonnegativize,
    nullspace_basis,
)
from .pattern import (
    Pattern,
    Track,
    components,
    cut_regions,
    is_separating,
    is_twisted,
    realize,
    untwist_basis,
)
from .presentation import (
    Letter,
    Presentation,
    TriangulatedPresentation,
    parse_presentation,
    parse_structured,
    print_presentation,
    triangulate,
)
from .splitting import (
    Splitting,
    abelianization_hom,
    classify_splitting,
    edge_group_words,
    triviality_check,
    vertex_group_words,
    word_functor,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
