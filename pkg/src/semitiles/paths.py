"""Words over supertile extensions and the patch correspondence.

Right words are prefixes of the right-infinite path space of the extension
graph; left words are suffixes of the left-infinite companion, optionally
carrying an eventual period.  Displayed left to right, consecutive letters
always satisfy s(left) = r(right), matching function composition; a right
word's leftmost letter is its finest level, a left word's rightmost letter
its coarsest.
"""

from __future__ import annotations

import re

from .geometry import Patch, Tile
from .substitution import SubstitutionSystem, ValidationError


class WordError(ValueError):
    pass


class PathWord:
    """A finite word of supertile extensions, right- or left-pointing."""

    __slots__ = ("direction", "letters", "eventual_period")

    def __init__(self, letters, direction: str = "right",
                 eventual_period: tuple[int, int] | None = None):
        self.letters = tuple(letters)
        self.direction = direction
        self.eventual_period = eventual_period
        if direction not in ("right", "left"):
            raise WordError(f"unknown direction {direction!r}")
        for u, v in zip(self.letters, self.letters[1:]):
            if u.parent is not v.child:
                raise WordError(
                    f"illegal word: {u.label} then {v.label} "
                    f"({u.parent.label} != {v.child.label})"
                )
        if eventual_period is not None:
            if direction != "left":
                raise WordError("eventual periods only apply to left words")
            pre, per = eventual_period
            if pre < 0 or per < 1 or pre + per != len(self.letters):
                raise WordError("period annotation does not match the letters")
            # The period block must close up as a cycle.
            first, last = self.letters[0], self.letters[per - 1]
            if last.parent is not first.child:
                raise WordError("declared period is not a cycle in the graph")

    def __len__(self):
        return len(self.letters)

    def __eq__(self, other):
        if not isinstance(other, PathWord):
            return NotImplemented
        return (
            self.direction == other.direction
            and self.eventual_period == other.eventual_period
            and tuple(e.ident() for e in self.letters)
            == tuple(e.ident() for e in other.letters)
        )

    def __hash__(self):
        return hash(
            (self.direction, self.eventual_period,
             tuple(e.ident() for e in self.letters))
        )

    def __repr__(self):
        if self.eventual_period:
            pre, per = self.eventual_period
            block = "".join(e.label for e in self.letters[:per])
            tail = "".join(e.label for e in self.letters[per:])
            return f"...({block})*{tail}"
        return "".join(e.label for e in self.letters)

    def word_string(self) -> str:
        return "".join(e.label for e in self.letters)

    def shift(self) -> "PathWord":
        """Drop one letter: the finest for right words, coarsest for left."""
        if self.direction == "right":
            if len(self.letters) < 1:
                raise WordError("cannot shift the empty word")
            return PathWord(self.letters[1:], "right")
        if self.eventual_period is not None:
            pre, per = self.eventual_period
            if pre > 0:
                return PathWord(self.letters[:-1], "left", (pre - 1, per))
            # Rotate the period block: pull one copy from the infinite tail.
            rotated = (self.letters[-1],) + self.letters[:-1]
            return PathWord(rotated, "left", (0, per))
        return PathWord(self.letters[:-1], "left")


_LETTER_RE = re.compile(r"\(([^(),]+),([^(),]+)\)")


def parse_word(system: SubstitutionSystem, text: str,
               direction: str = "right",
               eventual_period: tuple[int, int] | None = None) -> PathWord:
    """Parse a word literal like '(b,d)(d,b)' or '(b@2,a)(a,a)'."""
    text = text.strip().replace(" ", "")
    pos = 0
    letters = []
    graph = system.graph
    for m in _LETTER_RE.finditer(text):
        if m.start() != pos:
            raise WordError(f"cannot parse word at ...{text[pos:]!r}")
        pos = m.end()
        letters.append(graph.edge_by_label(f"({m.group(1)},{m.group(2)})"))
    if pos != len(text) or not letters:
        raise WordError(f"cannot parse word {text!r}")
    return PathWord(letters, direction, eventual_period)


class MarkedPatch:
    """A patch with a marked origin tile whose puncture sits at the origin."""

    __slots__ = ("patch", "mark")

    def __init__(self, patch: Patch, mark: int):
        self.patch = patch
        self.mark = mark
        if not self.marked_tile.puncture.is_zero():
            raise ValidationError("marked puncture must be at the origin")

    @property
    def marked_tile(self) -> Tile:
        return self.patch.tiles[self.mark]

    def __eq__(self, other):
        if not isinstance(other, MarkedPatch):
            return NotImplemented
        return self.mark == other.mark and self.patch == other.patch

    def __hash__(self):
        return hash((self.mark, self.patch))

    def __repr__(self):
        return f"MarkedPatch({self.patch!r}, mark={self.marked_tile.proto.label})"


def origin_tile_offset(system: SubstitutionSystem, w: PathWord):
    """Position of the origin tile inside the outer supertile's frame."""
    total = system.field.zero
    lam_pow = system.field.one
    for e in w.letters:
        total = total + lam_pow * e.offset
        lam_pow = lam_pow * system.lam
    return total


def tau(system: SubstitutionSystem, w: PathWord) -> MarkedPatch:
    """The n-supertile of a length-n right word, marked at its origin tile.

    The origin tile's position composes the child offsets up the hierarchy;
    its puncture is translated to the origin.
    """
    if w.direction != "right" or len(w) == 0:
        raise WordError("tau needs a nonempty right word")
    n = len(w)
    outer = w.letters[-1].parent
    patch = system.supertile(outer, n)
    x0 = origin_tile_offset(system, w)
    t0 = Tile(w.letters[0].child, x0)
    shift = -(t0.puncture)
    marked = patch.translate(shift)
    return MarkedPatch(marked, marked.index_of(t0.translate(shift)))


def corona_subdivided(system: SubstitutionSystem, p, n: int, depth: int) -> Patch:
    """The level-(n-depth) forced corona of phi^n(p), subdivided to tiles.

    depth = 1 is the plain forced 1-corona of the (n-1)-level grouping,
    refined into level-0 tiles in the frame of supertile(p, n).
    """
    if depth < 1 or depth > n:
        raise ValidationError("corona depth out of range")
    base_level = n - depth
    corona_full = system.forced_corona(p, base_level) if base_level > 0 else None
    if base_level == 0:
        raise ValidationError("corona at level 0 is never forced")
    members = {t.ident() for t in system.supertile(p, base_level).tiles}
    ring = [t for t in corona_full.tiles if t.ident() not in members]
    patch = Patch(ring, system.convention, validate=False)
    for _ in range(depth):
        patch = system.substitute_patch(patch)
    return patch


def tau_plus(system: SubstitutionSystem, w: PathWord, depth: int = 1) -> MarkedPatch:
    """tau(w) together with the forced corona of the outer supertile.

    Needs len(w) - depth >= the border forcing index; the corona ring is a
    union of depth-supertiles, subdivided into tiles.
    """
    idx = system.border_forcing_index()
    if idx is None:
        raise ValidationError("system does not force its border")
    n = len(w)
    if n - depth < idx:
        raise ValidationError(
            f"word of length {n} too short for a forced corona at depth {depth}"
        )
    base = tau(system, w)
    outer = w.letters[-1].parent
    ring = corona_subdivided(system, outer, n, depth)
    x0 = origin_tile_offset(system, w)
    t0 = Tile(w.letters[0].child, x0)
    shift = -(t0.puncture)
    tiles = list(base.patch.tiles) + [t.translate(shift) for t in ring.tiles]
    marked = Patch(tiles, system.convention, validate=False)
    return MarkedPatch(marked, marked.index_of(Tile(t0.proto, t0.offset + shift)))


def enumerate_words(system: SubstitutionSystem, n: int,
                    start_prototile=None) -> list[PathWord]:
    """All legal length-n right words, optionally with r(e0) fixed."""
    if n < 1:
        raise WordError("word length must be at least 1")
    graph = system.graph
    if start_prototile is not None:
        first = graph.by_range[start_prototile.index]
    else:
        first = list(graph.edges)
    out = []

    def extend(prefix):
        if len(prefix) == n:
            out.append(PathWord(prefix, "right"))
            return
        for e in graph.by_range[prefix[-1].parent.index]:
            extend(prefix + [e])

    for e in first:
        extend([e])
    return out


def extensions(system: SubstitutionSystem, w: PathWord, k: int = 1) -> list[PathWord]:
    """All legal right words extending w by k more letters (coarser end)."""
    graph = system.graph
    out = []

    def extend(prefix, remaining):
        if remaining == 0:
            out.append(PathWord(prefix, "right"))
            return
        for e in graph.by_range[prefix[-1].parent.index]:
            extend(prefix + [e], remaining - 1)

    extend(list(w.letters), k)
    return out
