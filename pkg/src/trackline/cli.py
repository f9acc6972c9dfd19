"""Command-line front end: analyze, cubing, export.

Report header strings mirror the reference output format, so transcripts can
be diffed directly.  All output is assembled in memory and written once;
identical inputs produce byte-identical reports and export files.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

from . import cubing as cubing_mod
from .complex import build_complex, matching_system
from .errors import (
    InternalInvariant,
    PresentationError,
    ResolutionFailed,
    TwistedInput,
)
from .lattice import INCONCLUSIVE, is_vertex_solution, nonnegativize, nullspace_basis
from .pattern import untwist_basis
from .presentation import (
    Presentation,
    parse_any,
    triangulate,
    word_token,
)
from .splitting import classify_splitting

EXIT_PARSE = 2
EXIT_INTERNAL = 3
EXIT_BAD_TRACK = 4
EXIT_RESOLVE = 5
EXIT_WRITE = 6


@dataclass
class Analysis:
    presentation: Presentation
    tp: object
    cx: object
    system: object
    basis: object
    reports: list
    splittings: dict  # (element index, component index) -> Splitting

    @property
    def flat_tracks(self):
        out = []
        for rep in self.reports:
            for j, track in enumerate(rep.tracks):
                out.append((rep.index, j, track))
        return out


def run_pipeline(p: Presentation) -> Analysis:
    tp = triangulate(p)
    cx = build_complex(tp)
    system = matching_system(cx)
    basis = nonnegativize(nullspace_basis(system))
    reports = untwist_basis(basis.vectors, cx)
    splittings = {}
    for rep in reports:
        for j, track in enumerate(rep.tracks):
            splittings[(rep.index, j)] = classify_splitting(track, cx, tp)
    return Analysis(p, tp, cx, system, basis, reports, splittings)


def _vec(v) -> str:
    return "(" + ", ".join(str(x) for x in v) + ")"


def _word_lines(words, names):
    return [word_token(w, names) for w in words]


def render_report(analysis: Analysis, jobname: str, vertex_bound: int = 0) -> str:
    p = analysis.presentation
    lines = []
    lines.append("Group presentation:")
    lines.append("")
    rels = " ".join(word_token(r, p.generators) for r in p.relators)
    lines.append("  " + "  ".join(p.generators) + " : " + rels + " ")
    lines.append("")
    lines.append(f"Jobname: {jobname}")
    lines.append("")
    n1 = len(analysis.tp.extended_generators)
    n2 = len(analysis.cx.triangles)
    lines.append(
        f"Triangular 2-complex comprises: 1 0-cells, {n1} 1-cells and {n2} 2-cells."
    )
    lines.append("")
    basis = analysis.basis
    lines.append(f"Track basis (size {basis.rank} x {basis.corner_count})")
    lines.append("")
    for vec in basis.vectors:
        lines.append("".join(f"{x:4d}" for x in vec))
    lines.append("")
    if basis.rank == 0:
        lines.append("The solution space is trivial: there are no tracks.")
        return "\n".join(lines) + "\n"
    if basis.rank == 1:
        lines.append(
            "The solution space is one dimensional: "
            "the group has no non-trivial action on a tree."
        )
        lines.append("")
    names = p.generators
    for rep in analysis.reports:
        lines.append(f"check track basis element {rep.index}")
        if rep.connected:
            track = rep.tracks[0]
            sep = "separating" if rep.separating[0] else "non-separating"
            if rep.twisted_components[0]:
                lines.append(f"The track {_vec(rep.vector)}  is twisted")
                lines.append(
                    f"Replaced by the double {_vec(track.vector)}  "
                    f"which is untwisted and {sep}"
                )
            else:
                lines.append(f"The track {_vec(rep.vector)}  is untwisted and {sep}")
        else:
            lines.append(
                f"The pattern {_vec(rep.vector)}  has {rep.component_count} components"
            )
            for j, track in enumerate(rep.tracks):
                sep = "separating" if rep.separating[j] else "non-separating"
                tw = " (doubled)" if rep.twisted_components[j] else ""
                lines.append(
                    f"component {j}: {_vec(track.vector)}  is untwisted and {sep}{tw}"
                )
        if vertex_bound > 0:
            for j, track in enumerate(rep.tracks):
                verdict = is_vertex_solution(
                    analysis.basis, track.vector, vertex_bound, analysis.system
                )
                text = (
                    "inconclusive" if verdict is INCONCLUSIVE
                    else ("yes" if verdict else "no")
                )
                lines.append(f"vertex solution test (bound {vertex_bound}): {text}")
        lines.append("")
    separating_entries = []
    hnn_entries = []
    for rep in analysis.reports:
        for j in range(len(rep.tracks)):
            s = analysis.splittings[(rep.index, j)]
            if s.kind == "amalgam":
                separating_entries.append((rep, j, s))
            else:
                hnn_entries.append((rep, j, s))
    lines.append(f"prune list of {len(separating_entries)} separating tracks:")
    lines.append("")
    for rep, j, s in separating_entries:
        header = f"track basis element {rep.index}"
        if not rep.connected:
            header += f" component {j}"
        lines.append(header)
        lines.append("")
        lines.append("The separating track")
        lines.append("")
        lines.append(_vec(rep.tracks[j].vector))
        lines.append("")
        if s.trivial_flag == "Trivial":
            lines.append("Gives a trivial decomposition.")
            lines.append("")
        lines.append("Edge stabilizer generators.")
        lines.extend(_word_lines(s.edge_words, names))
        lines.append("")
        for side, label in ((0, "First"), (1, "Second")):
            if s.trivial_flag == "Trivial" and s.trivial_side == side:
                lines.append(f"{label} vertex stabilizer.")
                lines.append("G")
            else:
                lines.append(f"{label} vertex stabilizer generators.")
                lines.extend(_word_lines(s.vertex_words[side], names))
            lines.append("")
    if hnn_entries:
        lines.append(f"list of {len(hnn_entries)} non-separating tracks:")
        lines.append("")
        for rep, j, s in hnn_entries:
            header = f"track basis element {rep.index}"
            if not rep.connected:
                header += f" component {j}"
            lines.append(header)
            lines.append("")
            lines.append("The non-separating track")
            lines.append("")
            lines.append(_vec(rep.tracks[j].vector))
            lines.append("")
            lines.append("Stable homomorphism to the integers:")
            for gen, value in s.stable_hom:
                lines.append(f"{gen} -> {value}")
            lines.append("")
            lines.append("Stable letter.")
            lines.append(word_token(s.stable_letter, names))
            lines.append("")
            lines.append("Edge stabilizer generators.")
            lines.extend(_word_lines(s.edge_words, names))
            lines.append("")
            lines.append("Vertex stabilizer generators.")
            lines.extend(_word_lines(s.vertex_words[0], names))
            lines.append("")
    return "\n".join(lines) + "\n"


def render_export(analysis: Analysis, jobname: str) -> str:
    p = analysis.presentation
    names = p.generators
    ext = analysis.tp.extended_generators
    lines = ["trackline/1", f"jobname {jobname}"]
    lines.append("gens " + " ".join(p.generators))
    for rel in p.relators:
        lines.append("rel " + word_token(rel, names, separator=" "))
    lines.append("extended " + " ".join(ext))
    for tri, origin in zip(analysis.tp.triangles, analysis.tp.origin):
        toks = " ".join(word_token((letter,), ext) for letter in tri)
        lines.append(f"triangle {toks} origin {origin[0]} {origin[1]}")
    sysm = analysis.system
    lines.append(f"matching {sysm.row_count} {sysm.corner_count}")
    for row in sysm.rows:
        lines.append("row " + " ".join(str(x) for x in row))
    basis = analysis.basis
    lines.append(f"basis {basis.rank} {basis.corner_count}")
    for vec in basis.vectors:
        lines.append("vector " + " ".join(str(x) for x in vec))
    for rep in analysis.reports:
        lines.append(f"track {rep.index} components {rep.component_count}")
        for j, track in enumerate(rep.tracks):
            lines.append(
                f"track-component {rep.index} {j}"
                f" twisted {int(rep.twisted_components[j])}"
                f" doubled {int(rep.twisted_components[j])}"
                f" separating {int(rep.separating[j])}"
                f" vector " + " ".join(str(x) for x in track.vector)
            )
            s = analysis.splittings[(rep.index, j)]
            lines.append(
                f"splitting {rep.index} {j} kind {s.kind} trivial {s.trivial_flag}"
            )
            for w in s.edge_words:
                lines.append("edge-word " + word_token(w, names))
            for side, side_words in enumerate(s.vertex_words):
                lines.append(f"vertex-words {side}")
                for w in side_words:
                    lines.append("vertex-word " + word_token(w, names))
            if s.kind == "hnn":
                hom = " ".join(f"{g}={v}" for g, v in s.stable_hom)
                lines.append("stable-hom " + hom)
                lines.append("stable-letter " + word_token(s.stable_letter, names))
    lines.append("end")
    return "\n".join(lines) + "\n"


def load_export(text: str):
    """Recover (jobname, presentation text lines) from an export document."""
    lines = text.splitlines()
    if not lines or lines[0] != "trackline/1":
        raise PresentationError("not a trackline/1 document")
    jobname = None
    pres_lines = ["trackline/1"]
    stored_vectors = []
    for ln in lines[1:]:
        if ln.startswith("jobname "):
            jobname = ln[len("jobname "):]
        elif ln.startswith("gens ") or ln.startswith("rel "):
            pres_lines.append(ln)
        elif ln.startswith("vector "):
            stored_vectors.append(tuple(int(x) for x in ln.split()[1:]))
    if jobname is None:
        raise PresentationError("export document has no jobname")
    from .presentation import parse_structured

    p = parse_structured("\n".join(pres_lines) + "\n")
    return jobname, p, stored_vectors


def _cubing_dump(analysis, dual, selection, coeffs, pattern) -> str:
    lines = []
    lines.append("dual square complex")
    lines.append("tracks " + " ".join(
        f"{i}:{rep}.{j}" for i, (rep, j, _t) in enumerate(selection)
    ))
    lines.append(f"vertices {dual.vertex_count}")
    for rid, pieces in enumerate(dual.regions):
        base = 1 if rid == dual.basepoint_region else 0
        lines.append(f"vertex {rid} basepoint {base} pieces {len(pieces)}")
    lines.append(f"edges {dual.edge_count}")
    for eid, (track, regions) in enumerate(dual.edges):
        lines.append(f"edge {eid} track {track} regions {regions[0]} {regions[1]}")
    lines.append(f"squares {dual.square_count}")
    for sq in dual.squares:
        lines.append(
            f"square {sq.index} triangle {sq.triangle}"
            f" tracks {sq.tracks[0]} {sq.tracks[1]}"
            " corners " + " ".join(str(r) for r in sq.corner_regions) +
            " edges " + " ".join(str(e) for e in sq.edges) +
            f" marked {sq.marked_corner}"
        )
    if pattern is not None:
        lines.append("")
        lines.append(
            "combination pattern for coefficients "
            + "(" + ", ".join(str(c) for c in coeffs) + ")"
        )
        for idx in sorted(pattern.squares):
            plines, qlines, marked = pattern.squares[idx]
            lines.append(f"square {idx} lines {plines} x {qlines} marked-corner {marked}")
        for eid in sorted(pattern.edge_counts):
            lines.append(f"edge {eid} count {pattern.edge_counts[eid]}")
    return "\n".join(lines) + "\n"


def _cubing_json(dual, coeffs, pattern):
    doc = {
        "format": "trackline/1",
        "vertices": [
            {"id": rid, "basepoint": rid == dual.basepoint_region,
             "pieces": len(pieces)}
            for rid, pieces in enumerate(dual.regions)
        ],
        "edges": [
            {"id": eid, "track": track, "regions": list(regions)}
            for eid, (track, regions) in enumerate(dual.edges)
        ],
        "squares": [
            {
                "id": sq.index,
                "triangle": sq.triangle,
                "tracks": list(sq.tracks),
                "corners": list(sq.corner_regions),
                "edges": list(sq.edges),
                "marked_corner": sq.marked_corner,
            }
            for sq in dual.squares
        ],
    }
    if pattern is not None:
        doc["pattern"] = {
            "coefficients": list(coeffs),
            "squares": {
                str(k): {"p": v[0], "q": v[1], "marked": v[2]}
                for k, v in sorted(pattern.squares.items())
            },
            "edge_counts": {
                str(k): v for k, v in sorted(pattern.edge_counts.items())
            },
        }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _read_orderings(path, analysis, tracks):
    text = open(path, "r", encoding="utf-8").read()
    orderings = list(cubing_mod.default_orderings(tracks, analysis.cx))
    names = list(analysis.tp.extended_generators)
    for ln in text.splitlines():
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        parts = ln.split()
        if parts[0] != "edge" or len(parts) < 2:
            raise PresentationError(f"bad ordering line: {ln!r}")
        e = names.index(parts[1])
        order = []
        for tok in parts[2:]:
            ti, pos = tok.split(":")
            order.append((int(ti), int(pos)))
        orderings[e] = tuple(order)
    return tuple(orderings)


def _write_file(path, content) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(content)


def _jobname(args, default_from):
    if args.jobname:
        return args.jobname
    stem = default_from.rsplit("/", 1)[-1]
    return stem.rsplit(".", 1)[0] if "." in stem else stem


def main(argv=None, stdout=None) -> int:
    out = stdout if stdout is not None else sys.stdout
    parser = argparse.ArgumentParser(
        prog="trackline",
        description="Tracks, splittings and dual square complexes "
        "of finitely presented groups.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    pa = sub.add_parser("analyze", help="full pipeline report")
    pa.add_argument("input")
    pa.add_argument("--json", dest="json_path", default=None)
    pa.add_argument("--max-vertex-bound", type=int, default=0)
    pa.add_argument("--jobname", default=None)

    pc = sub.add_parser("cubing", help="dual square complex of chosen tracks")
    pc.add_argument("input")
    pc.add_argument("--tracks", required=True)
    pc.add_argument("--coeffs", default=None)
    pc.add_argument("--ordering", default=None)
    pc.add_argument("--json", dest="json_path", default=None)
    pc.add_argument("--jobname", default=None)

    pe = sub.add_parser("export", help="structured trackline/1 document")
    pe.add_argument("input")
    pe.add_argument("--json", dest="json_path", required=True)
    pe.add_argument("--jobname", default=None)

    args = parser.parse_args(argv)

    try:
        text = open(args.input, "r", encoding="utf-8").read()
    except OSError as err:
        print(f"cannot read input: {err}", file=sys.stderr)
        return EXIT_PARSE

    stored_vectors = None
    try:
        if text.lstrip().startswith("trackline/1") and "jobname " in text:
            jobname, presentation, stored_vectors = load_export(text)
            if args.jobname:
                jobname = args.jobname
        else:
            presentation = parse_any(text)
            jobname = _jobname(args, args.input)
    except PresentationError as err:
        print(f"parse error: {err}", file=sys.stderr)
        return EXIT_PARSE

    try:
        analysis = run_pipeline(presentation)
    except InternalInvariant as err:
        print(f"internal invariant violated: {err}", file=sys.stderr)
        return EXIT_INTERNAL
    if stored_vectors and tuple(stored_vectors) != analysis.basis.vectors:
        print("internal invariant violated: stored basis does not match "
              "the recomputed one", file=sys.stderr)
        return EXIT_INTERNAL

    if args.command == "analyze":
        try:
            report = render_report(analysis, jobname, args.max_vertex_bound)
        except InternalInvariant as err:
            print(f"internal invariant violated: {err}", file=sys.stderr)
            return EXIT_INTERNAL
        out.write(report)
        if args.json_path:
            try:
                _write_file(args.json_path, render_export(analysis, jobname))
            except OSError as err:
                print(f"cannot write export: {err}", file=sys.stderr)
                return EXIT_WRITE
        return 0

    if args.command == "export":
        try:
            _write_file(args.json_path, render_export(analysis, jobname))
        except OSError as err:
            print(f"cannot write export: {err}", file=sys.stderr)
            return EXIT_WRITE
        return 0

    # cubing
    flat = analysis.flat_tracks
    try:
        indices = [int(tok) for tok in args.tracks.split(",") if tok != ""]
    except ValueError:
        print("bad --tracks list", file=sys.stderr)
        return EXIT_BAD_TRACK
    if not indices or any(i < 0 or i >= len(flat) for i in indices):
        print(
            f"track indices must name untwisted tracks 0..{len(flat) - 1}",
            file=sys.stderr,
        )
        return EXIT_BAD_TRACK
    selection = [flat[i] for i in indices]
    tracks = [t for (_i, _j, t) in selection]
    coeffs = None
    if args.coeffs is not None:
        try:
            coeffs = [int(tok) for tok in args.coeffs.split(",")]
        except ValueError:
            print("bad --coeffs list", file=sys.stderr)
            return EXIT_BAD_TRACK
        if len(coeffs) != len(tracks):
            print("--coeffs needs one integer per selected track", file=sys.stderr)
            return EXIT_BAD_TRACK
    try:
        orderings = None
        if args.ordering:
            orderings = _read_orderings(args.ordering, analysis, tracks)
        arrangement = cubing_mod.build_arrangement(
            tracks, analysis.cx, orderings=orderings
        )
        if coeffs is not None and any(c > 0 for c in coeffs) and any(
            c < 0 for c in coeffs
        ):
            arrangement = cubing_mod.resolve_mixed(arrangement, coeffs)
        dual = cubing_mod.build_dual_complex(arrangement)
        pattern = None
        if coeffs is not None:
            pattern = cubing_mod.combination_pattern(arrangement, coeffs, dual)
    except TwistedInput as err:
        print(f"twisted track selected: {err}", file=sys.stderr)
        return EXIT_BAD_TRACK
    except ResolutionFailed as err:
        print(f"mixed-sign resolution failed: {err}", file=sys.stderr)
        return EXIT_RESOLVE
    except InternalInvariant as err:
        print(f"internal invariant violated: {err}", file=sys.stderr)
        return EXIT_INTERNAL

    dump = _cubing_dump(analysis, dual, selection, coeffs, pattern)
    out.write(dump)
    if args.json_path:
        try:
            _write_file(args.json_path, _cubing_json(dual, coeffs, pattern))
        except OSError as err:
            print(f"cannot write export: {err}", file=sys.stderr)
            return EXIT_WRITE
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
