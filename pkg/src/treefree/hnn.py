"""Multiple HNN extensions of a free group with cyclic associated subgroups.

The group is presented by base generators, stable letters ``u_i`` and one
relation ``u_i s_i u_i**-1 = t_i`` per stable letter.  The word problem is
solved by Britton reduction: a pinch ``u_i w u_i**-1`` with ``w`` a power of
``s_i`` (or ``u_i**-1 w u_i`` with ``w`` a power of ``t_i``) is rewritten to
the matching power of ``t_i`` (resp. ``s_i``) until none is left.  A pinch-free
word that still contains a stable letter is nontrivial.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence, Union

from treefree.errors import ParseError
from treefree.words import (
    EMPTY,
    Alphabet,
    Word,
    concat,
    cyclic_power_membership,
    format_factors,
    invert,
    tokenize,
)

__all__ = [
    "MultipleHnnPresentation",
    "StableLetter",
    "HnnWord",
    "PinchReport",
    "parse_hnn_word",
    "format_hnn_word",
    "pinch_reduce",
    "is_trivial",
    "are_equal",
    "hnn_conjugate",
    "load_presentation",
    "parse_presentation",
    "dump_presentation",
]


class StableLetter(NamedTuple):
    index: int
    sign: int

    def inverse(self) -> "StableLetter":
        return StableLetter(self.index, -self.sign)


Syllable = Union[Word, StableLetter]


class PinchReport(NamedTuple):
    """One Britton rewrite.

    ``position`` is the syllable index of the pinch's first stable letter in
    the word as it stood when the pinch was removed.  ``direction`` is +1 for
    ``u s^k u^-1 -> t^k`` and -1 for ``u^-1 t^k u -> s^k``.
    """

    position: int
    letter: int
    direction: int
    exponent: int


class MultipleHnnPresentation:
    """Base alphabet, stable letters and relations ``u_i s_i u_i^-1 = t_i``.

    With no stable letters this presents the free group on ``base``.
    """

    def __init__(
        self,
        base: Alphabet | Iterable[str],
        stable: Iterable[str] = (),
        relations: Sequence[tuple[Word, Word]] = (),
    ):
        self.base = base if isinstance(base, Alphabet) else Alphabet(base)
        self.stable = tuple(stable)
        self.relations = tuple((Word(s), Word(t)) for s, t in relations)
        if len(set(self.stable)) != len(self.stable):
            raise ValueError(f"duplicate stable letters in {self.stable!r}")
        clash = set(self.stable) & set(self.base.names)
        if clash:
            raise ValueError(f"stable letters {sorted(clash)} clash with base generators")
        if len(self.relations) != len(self.stable):
            raise ValueError(
                f"{len(self.stable)} stable letters but {len(self.relations)} relations"
            )
        for name, (s, t) in zip(self.stable, self.relations):
            if not s or not t:
                raise ValueError(f"relation for {name} has a trivial side")
            if max(s.max_generator(), t.max_generator()) >= len(self.base):
                raise ValueError(f"relation for {name} uses unknown generators")
        # base generators first, then stable letters; fixes the shortlex order
        self.combined = Alphabet(self.base.names + self.stable)

    @classmethod
    def free(cls, names: Iterable[str]) -> "MultipleHnnPresentation":
        return cls(names)

    @property
    def rank(self) -> int:
        return len(self.base)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, MultipleHnnPresentation)
            and self.base == other.base
            and self.stable == other.stable
            and self.relations == other.relations
        )

    def __repr__(self) -> str:
        return f"<MultipleHnnPresentation {dump_presentation(self)!r}>"

    def stable_index(self, name: str) -> int:
        return self.stable.index(name)


@dataclass(frozen=True, init=False)
class HnnWord:
    """Alternating base words and stable letters: ``w0 e1 w1 ... em wm``.

    Construction only groups adjacent base letters; stable letters are never
    cancelled here, that is the job of :func:`pinch_reduce`.
    """

    syllables: tuple

    def __init__(self, items: Iterable[Syllable] = ()):
        syl: list[Syllable] = [EMPTY]
        for item in items:
            if isinstance(item, Word):
                syl[-1] = concat(syl[-1], item)
            elif isinstance(item, StableLetter):
                syl.extend((item, EMPTY))
            else:
                raise TypeError(f"not a syllable: {item!r}")
        object.__setattr__(self, "syllables", tuple(syl))

    @classmethod
    def base_word(cls, w: Word) -> "HnnWord":
        return cls((w,))

    @property
    def stable_letters(self) -> tuple[StableLetter, ...]:
        return self.syllables[1::2]

    @property
    def base_words(self) -> tuple[Word, ...]:
        return self.syllables[0::2]

    def __len__(self) -> int:
        return sum(len(w) for w in self.base_words) + len(self.stable_letters)

    def __mul__(self, other: "HnnWord") -> "HnnWord":
        return HnnWord(self.syllables + other.syllables)

    def inverse(self) -> "HnnWord":
        return HnnWord(
            invert(s) if isinstance(s, Word) else s.inverse()
            for s in reversed(self.syllables)
        )

    def __invert__(self) -> "HnnWord":
        return self.inverse()

    def combined_codes(self, rank: int) -> tuple[int, ...]:
        """Letter codes over base-then-stable generators (stable letter i is ``rank + i``)."""
        out: list[int] = []
        for s in self.syllables:
            if isinstance(s, Word):
                out.extend(s.codes)
            else:
                out.append(s.sign * (rank + s.index + 1))
        return tuple(out)

    @classmethod
    def from_combined_codes(cls, codes: Iterable[int], rank: int) -> "HnnWord":
        items: list[Syllable] = []
        run: list[int] = []
        for c in codes:
            if abs(c) <= rank:
                run.append(c)
                continue
            items.append(Word(run))
            run = []
            items.append(StableLetter(abs(c) - rank - 1, 1 if c > 0 else -1))
        items.append(Word(run))
        return cls(items)


def parse_hnn_word(p: MultipleHnnPresentation, text: str) -> HnnWord:
    items: list[Syllable] = []
    for name, exp in tokenize(text):
        if name in p.base:
            items.append(Word.generator(p.base.index(name), exp))
        elif name in p.stable:
            letter = StableLetter(p.stable_index(name), 1 if exp > 0 else -1)
            items.extend([letter] * abs(exp))
        else:
            raise ParseError(f"unknown symbol {name!r}")
    return HnnWord(items)


def format_hnn_word(p: MultipleHnnPresentation, w: HnnWord) -> str:
    factors = []
    for s in w.syllables:
        if isinstance(s, Word):
            factors.extend(
                (p.base.names[abs(c) - 1], 1 if c > 0 else -1) for c in s.codes
            )
        else:
            factors.append((p.stable[s.index], s.sign))
    return format_factors(factors)


def pinch_reduce(
    p: MultipleHnnPresentation, w: HnnWord
) -> tuple[HnnWord, list[PinchReport]]:
    """Remove pinches leftmost-innermost until none remain."""
    syl = list(w.syllables)
    reports: list[PinchReport] = []
    j = 1
    while j + 2 < len(syl):
        e, mid, f = syl[j], syl[j + 1], syl[j + 2]
        if e.index == f.index and e.sign == -f.sign:
            s, t = p.relations[e.index]
            inside, outside = (s, t) if e.sign > 0 else (t, s)
            k = cyclic_power_membership(mid, inside)
            if k is not None:
                merged = concat(concat(syl[j - 1], outside**k), syl[j + 3])
                syl[j - 1 : j + 4] = [merged]
                reports.append(PinchReport(j, e.index, e.sign, k))
                # only the pair ending at the merged word can have become a pinch
                j = max(1, j - 2)
                continue
        j += 2
    reduced = HnnWord.__new__(HnnWord)
    object.__setattr__(reduced, "syllables", tuple(syl))
    return reduced, reports


def is_trivial(p: MultipleHnnPresentation, w: HnnWord) -> bool:
    reduced, _ = pinch_reduce(p, w)
    return len(reduced.syllables) == 1 and not reduced.syllables[0]


def are_equal(p: MultipleHnnPresentation, a: HnnWord, b: HnnWord) -> bool:
    return is_trivial(p, a * b.inverse())


def hnn_conjugate(p: MultipleHnnPresentation, g: HnnWord, h: HnnWord) -> HnnWord:
    """Return the reduced form of ``h**-1 * g * h``."""
    return pinch_reduce(p, h.inverse() * g * h)[0]


def parse_presentation(text: str) -> MultipleHnnPresentation:
    """Parse the line-oriented presentation format.

    ::

        base: x y z
        stable: u v
        rel: u : x y^-1 -> y z^-1
        rel: v : x y^-1 -> z x^-1
    """
    lines = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append((lineno, line))

    def field(entry, key):
        lineno, line = entry
        head, sep, rest = line.partition(":")
        if not sep or head.strip() != key:
            raise ParseError(f"line {lineno}: expected '{key}:' line, got {line!r}")
        return lineno, rest.strip()

    if len(lines) < 2:
        raise ParseError("presentation needs 'base:' and 'stable:' lines")
    _, base_text = field(lines[0], "base")
    _, stable_text = field(lines[1], "stable")
    try:
        base = Alphabet(base_text.split())
    except ValueError as exc:
        raise ParseError(f"base: {exc}") from None
    stable = stable_text.split()
    rel_lines = lines[2:]
    if len(rel_lines) != len(stable):
        raise ParseError(
            f"expected {len(stable)} 'rel:' lines, found {len(rel_lines)}"
        )
    relations = []
    for name, entry in zip(stable, rel_lines):
        lineno, body = field(entry, "rel")
        letter, sep, rule = body.partition(":")
        if not sep or "->" not in rule:
            raise ParseError(f"line {lineno}: expected 'rel: <letter> : <s> -> <t>'")
        if letter.strip() != name:
            raise ParseError(
                f"line {lineno}: relation for {letter.strip()!r} out of order, expected {name!r}"
            )
        lhs, _, rhs = rule.partition("->")
        relations.append((base.parse(lhs), base.parse(rhs)))
    try:
        return MultipleHnnPresentation(base, stable, relations)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def load_presentation(path: str | os.PathLike) -> MultipleHnnPresentation:
    with open(path, encoding="utf-8") as fh:
        return parse_presentation(fh.read())


def dump_presentation(p: MultipleHnnPresentation) -> str:
    lines = [f"base: {' '.join(p.base.names)}", f"stable: {' '.join(p.stable)}".rstrip()]
    for name, (s, t) in zip(p.stable, p.relations):
        lines.append(f"rel: {name} : {p.base.format(s)} -> {p.base.format(t)}")
    return "\n".join(lines) + "\n"
