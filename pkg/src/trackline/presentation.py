"""Group presentations in the one-line text format, and their triangulation.

A word is a tuple of :class:`Letter`.  All values here are immutable and safe
to share between threads.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from typing import Iterator, NamedTuple

from .errors import (
    DuplicateGenerator,
    EmptyRelator,
    MalformedToken,
    UnknownGenerator,
)


class Letter(NamedTuple):
    """A signed occurrence of a generator inside a word."""

    gen: int
    sign: int

    def inverse(self) -> "Letter":
        return Letter(self.gen, -self.sign)


Word = tuple[Letter, ...]


def free_reduce(word) -> Word:
    """Cancel adjacent x x^-1 pairs until none remain."""
    out: list[Letter] = []
    for letter in word:
        if out and out[-1].gen == letter.gen and out[-1].sign == -letter.sign:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


def invert_word(word) -> Word:
    return tuple(Letter(l.gen, -l.sign) for l in reversed(word))


@dataclass(frozen=True)
class Presentation:
    """An ordered generating set together with relator words."""

    generators: tuple[str, ...]
    relators: tuple[Word, ...]

    def __post_init__(self):
        seen = set()
        for name in self.generators:
            if not name or name.startswith("-"):
                raise MalformedToken(f"bad generator name {name!r}")
            if name in seen:
                raise DuplicateGenerator(name)
            seen.add(name)
        n = len(self.generators)
        for rel in self.relators:
            for letter in rel:
                if not 0 <= letter.gen < n:
                    raise UnknownGenerator(f"letter index {letter.gen} out of range")
                if letter.sign not in (1, -1):
                    raise MalformedToken(f"bad sign {letter.sign}")


def _decode_compact_token(token: str, index: dict) -> Word:
    letters = []
    invert = False
    for ch in token:
        if ch == "-":
            if invert:
                raise MalformedToken(f"doubled '-' in {token!r}")
            invert = True
            continue
        if ch not in index:
            raise UnknownGenerator(f"{ch!r} in relator {token!r} is not a declared generator")
        letters.append(Letter(index[ch], -1 if invert else 1))
        invert = False
    if invert:
        raise MalformedToken(f"dangling '-' in {token!r}")
    if not letters:
        raise EmptyRelator(f"relator token {token!r} has no letters")
    return tuple(letters)


def parse_presentation(text: str) -> Presentation:
    """Parse the one-line format ``a b c : ab-a-b bc`` (single-char names).

    A '-' inverts the letter that follows it.
    """
    tokens = text.split()
    if ":" not in tokens:
        raise MalformedToken("missing ':' separator between generators and relators")
    split_at = tokens.index(":")
    names = tokens[:split_at]
    if not names:
        raise MalformedToken("no generators declared")
    for name in names:
        if len(name) != 1 or name not in string.ascii_letters + string.digits:
            raise MalformedToken(f"one-line format requires single-character names, got {name!r}")
    if len(set(names)) != len(names):
        raise DuplicateGenerator("repeated generator name")
    index = {name: i for i, name in enumerate(names)}
    relators = tuple(_decode_compact_token(tok, index) for tok in tokens[split_at + 1:])
    return Presentation(tuple(names), relators)


def parse_structured(text: str) -> Presentation:
    """Parse the line-oriented format (``trackline/1`` header, multi-char names)."""
    lines = [ln.strip() for ln in text.splitlines()]
    if not lines or lines[0] != "trackline/1":
        raise MalformedToken("structured input must start with 'trackline/1'")
    names: list[str] = []
    relators: list[Word] = []
    for ln in lines[1:]:
        if not ln or ln.startswith("#"):
            continue
        parts = ln.split()
        if parts[0] == "gens":
            if names:
                raise MalformedToken("duplicate 'gens' line")
            names = parts[1:]
            if not names:
                raise MalformedToken("'gens' line declares no generators")
            if len(set(names)) != len(names):
                raise DuplicateGenerator("repeated generator name")
        elif parts[0] == "rel":
            if not names:
                raise MalformedToken("'rel' before 'gens'")
            if len(parts) == 1:
                raise EmptyRelator("'rel' line with no letters")
            index = {name: i for i, name in enumerate(names)}
            letters = []
            for tok in parts[1:]:
                sign = 1
                if tok.startswith("-"):
                    sign = -1
                    tok = tok[1:]
                if not tok:
                    raise MalformedToken("dangling '-' token")
                if tok not in index:
                    raise UnknownGenerator(f"{tok!r} is not a declared generator")
                letters.append(Letter(index[tok], sign))
            relators.append(tuple(letters))
        else:
            raise MalformedToken(f"unknown directive {parts[0]!r}")
    if not names:
        raise MalformedToken("no 'gens' line")
    return Presentation(tuple(names), tuple(relators))


def parse_any(text: str) -> Presentation:
    stripped = text.lstrip()
    if stripped.startswith("trackline/1"):
        return parse_structured(text)
    return parse_presentation(text)


def word_token(word, names, separator: str = "") -> str:
    """Serialize a word in the '-x' convention; the empty word prints as '1'."""
    if not word:
        return "1"
    parts = [("-" if l.sign < 0 else "") + names[l.gen] for l in word]
    return separator.join(parts)


def print_presentation(p: Presentation) -> str:
    """Inverse of :func:`parse_presentation` (single-char names only)."""
    for name in p.generators:
        if len(name) != 1:
            raise MalformedToken("one-line format requires single-character names")
    gens = " ".join(p.generators)
    rels = " ".join(word_token(rel, p.generators) for rel in p.relators)
    return f"{gens} : {rels}".rstrip()


def print_structured(p: Presentation) -> str:
    lines = ["trackline/1", "gens " + " ".join(p.generators)]
    for rel in p.relators:
        lines.append("rel " + word_token(rel, p.generators, separator=" "))
    return "\n".join(lines) + "\n"


def _fresh_names(used) -> Iterator[str]:
    taken = set(used)
    for ch in string.ascii_lowercase:
        if ch not in taken:
            taken.add(ch)
            yield ch
    i = 1
    while True:
        name = f"z{i}"
        if name not in taken:
            taken.add(name)
            yield name
        i += 1


@dataclass(frozen=True)
class TriangulatedPresentation:
    """A presentation whose relators have been cut into 3-letter triangles.

    ``triangles`` holds boundary words over the extended generators; triangle
    letters are not required to be freely reduced.  ``origin`` maps each
    triangle back to (relator index, position in that relator's fan).
    ``fresh_definitions`` maps each fresh generator to its defining word, in
    the order the generators were introduced.
    """

    base: Presentation
    extended_generators: tuple[str, ...]
    triangles: tuple[tuple[Letter, Letter, Letter], ...]
    origin: tuple[tuple[int, int], ...]
    fresh_definitions: tuple[tuple[int, Word], ...]

    @property
    def fresh_count(self) -> int:
        return len(self.extended_generators) - len(self.base.generators)

    def eliminate(self, word) -> Word:
        """Rewrite a word over extended generators into the original ones."""
        n = len(self.base.generators)
        defs = dict(self.fresh_definitions)
        memo: dict[int, Word] = {}

        def expand_gen(g: int) -> Word:
            if g < n:
                return (Letter(g, 1),)
            if g not in memo:
                out: list[Letter] = []
                for letter in defs[g]:
                    part = expand_gen(letter.gen)
                    out.extend(part if letter.sign > 0 else invert_word(part))
                memo[g] = tuple(out)
            return memo[g]

        out: list[Letter] = []
        for letter in word:
            part = expand_gen(letter.gen)
            out.extend(part if letter.sign > 0 else invert_word(part))
        return free_reduce(out)


def triangulate(p: Presentation) -> TriangulatedPresentation:
    """Split every relator of length >= 4 into a fan of 3-sided cells.

    Relators of length 1 or 2 are first padded with a cancelling pair of the
    relator's leading generator.  A relator of (padded) length n produces
    n - 3 fresh generators and n - 2 triangles.
    """
    extended = list(p.generators)
    names = _fresh_names(p.generators)
    triangles: list[tuple[Letter, Letter, Letter]] = []
    origin: list[tuple[int, int]] = []
    definitions: list[tuple[int, Word]] = []
    for ri, rel in enumerate(p.relators):
        if not rel:
            raise EmptyRelator(f"relator {ri} is empty")
        word = list(rel)
        pad = word[0].gen
        while len(word) < 3:
            word += [Letter(pad, 1), Letter(pad, -1)]
        n = len(word)
        if n == 3:
            triangles.append((word[0], word[1], word[2]))
            origin.append((ri, 0))
            continue
        zs: list[int] = []
        for j in range(n - 3):
            extended.append(next(names))
            zi = len(extended) - 1
            if j == 0:
                definitions.append((zi, (word[0], word[1])))
            else:
                definitions.append((zi, (Letter(zs[j - 1], 1), word[j + 1])))
            zs.append(zi)
        triangles.append((word[0], word[1], Letter(zs[0], -1)))
        origin.append((ri, 0))
        for j in range(1, n - 3):
            triangles.append((Letter(zs[j - 1], 1), word[j + 1], Letter(zs[j], -1)))
            origin.append((ri, j))
        triangles.append((Letter(zs[-1], 1), word[n - 2], word[n - 1]))
        origin.append((ri, n - 3))
    return TriangulatedPresentation(
        base=p,
        extended_generators=tuple(extended),
        triangles=tuple(triangles),
        origin=tuple(origin),
        fresh_definitions=tuple(definitions),
    )
