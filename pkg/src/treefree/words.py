"""Exact arithmetic in a free group.

A :class:`Word` stores its letters as signed integer codes: generator ``i``
is ``i + 1`` and its inverse is ``-(i + 1)``.  Words are freely reduced on
construction, so two words name the same element of the free group exactly
when they compare equal.

>>> F = Alphabet(["x", "y", "z"])
>>> w = F.parse("x y^-1") * F.parse("y z^-1")
>>> F.format(w)
'x z^-1'
>>> translation_length(F.parse("z x y^-1 z^-1"))
2
"""

from __future__ import annotations

import re
from typing import Iterable, NamedTuple, Sequence

from treefree.errors import ParseError

__all__ = [
    "Alphabet",
    "Letter",
    "Word",
    "CyclicDecomposition",
    "EMPTY",
    "concat",
    "invert",
    "conjugate",
    "cyclic_reduce",
    "is_conjugate",
    "translation_length",
    "cyclic_power_membership",
    "shortlex_key",
    "shortlex_compare",
    "tokenize",
]

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_']*\Z")
_FACTOR = re.compile(r"(?P<name>[A-Za-z_][A-Za-z0-9_']*)(?:\^(?P<exp>[+-]?\d+))?\Z")


class Letter(NamedTuple):
    generator: int
    sign: int

    @property
    def code(self) -> int:
        return self.sign * (self.generator + 1)

    @classmethod
    def from_code(cls, code: int) -> "Letter":
        return cls(abs(code) - 1, 1 if code > 0 else -1)


def _reduce(codes: Iterable[int]) -> tuple[int, ...]:
    out: list[int] = []
    for c in codes:
        if c == 0:
            raise ValueError("letter code 0 is not a letter")
        if out and out[-1] == -c:
            out.pop()
        else:
            out.append(c)
    return tuple(out)


class Word:
    """An element of a free group, held as a freely reduced letter sequence."""

    __slots__ = ("_codes", "_hash")

    def __init__(self, codes: Iterable[int] = ()):
        self._codes = _reduce(codes)
        self._hash = hash(self._codes)

    @classmethod
    def from_letters(cls, letters: Iterable[tuple[int, int]]) -> "Word":
        return cls(Letter(g, s).code for g, s in letters)

    @classmethod
    def generator(cls, index: int, power: int = 1) -> "Word":
        c = index + 1 if power > 0 else -(index + 1)
        return cls((c,) * abs(power))

    @property
    def codes(self) -> tuple[int, ...]:
        return self._codes

    @property
    def letters(self) -> tuple[Letter, ...]:
        return tuple(Letter.from_code(c) for c in self._codes)

    def __len__(self) -> int:
        return len(self._codes)

    def __bool__(self) -> bool:
        return bool(self._codes)

    def __iter__(self):
        return iter(self._codes)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Word):
            return NotImplemented
        return self._codes == other._codes

    def __hash__(self) -> int:
        return self._hash

    def __mul__(self, other: "Word") -> "Word":
        return concat(self, other)

    def __invert__(self) -> "Word":
        return invert(self)

    def __pow__(self, n: int) -> "Word":
        base = self if n >= 0 else invert(self)
        return Word(base._codes * abs(n))

    def __repr__(self) -> str:
        return f"Word({list(self._codes)!r})"

    def max_generator(self) -> int:
        return max((abs(c) - 1 for c in self._codes), default=-1)


EMPTY = Word()


class CyclicDecomposition(NamedTuple):
    """``word == conjugator * core * conjugator**-1`` with ``core`` cyclically reduced."""

    conjugator: Word
    core: Word


def concat(a: Word, b: Word) -> Word:
    # a and b are already reduced, so cancellation only happens at the seam
    x, y = a.codes, b.codes
    i = 0
    n = min(len(x), len(y))
    while i < n and x[len(x) - 1 - i] == -y[i]:
        i += 1
    w = Word.__new__(Word)
    w._codes = x[: len(x) - i] + y[i:]
    w._hash = hash(w._codes)
    return w


def invert(w: Word) -> Word:
    out = Word.__new__(Word)
    out._codes = tuple(-c for c in reversed(w.codes))
    out._hash = hash(out._codes)
    return out


def conjugate(g: Word, h: Word) -> Word:
    """Return ``h**-1 * g * h``."""
    return concat(concat(invert(h), g), h)


def cyclic_reduce(w: Word) -> CyclicDecomposition:
    c = w.codes
    i, j = 0, len(c) - 1
    while i < j and c[i] == -c[j]:
        i += 1
        j -= 1
    return CyclicDecomposition(Word(c[:i]), Word(c[i : j + 1]))


def _as_text(codes: Sequence[int]) -> str:
    # one character per letter so rotations can be found with str.find
    return "".join(chr(0x10000 + c) for c in codes)


def is_conjugate(a: Word, b: Word) -> bool:
    ra, rb = cyclic_reduce(a).core, cyclic_reduce(b).core
    if len(ra) != len(rb):
        return False
    if not ra:
        return True
    return _as_text(rb.codes) in _as_text(ra.codes * 2)


def translation_length(w: Word) -> int:
    """Translation length of ``w`` acting on the Cayley tree of the free group."""
    return len(cyclic_reduce(w).core)


def cyclic_power_membership(w: Word, s: Word) -> int | None:
    """Return ``k`` with ``w == s**k``, or ``None`` if ``w`` is not a power of ``s``."""
    if not s:
        raise ValueError("membership in the trivial subgroup is not defined")
    if not w:
        return 0
    dw, ds = cyclic_reduce(w), cyclic_reduce(s)
    if dw.conjugator != ds.conjugator:
        return None
    n, m = len(dw.core), len(ds.core)
    if n % m:
        return None
    k = n // m
    if dw.core.codes == ds.core.codes * k:
        return k
    if dw.core.codes == invert(ds.core).codes * k:
        return -k
    return None


def shortlex_key(w: Word) -> tuple:
    """Sort key: shorter first, then letter-wise by (generator, sign) with +1 before -1."""
    return (len(w), tuple((abs(c), c < 0) for c in w.codes))


def shortlex_compare(a: Word, b: Word) -> int:
    ka, kb = shortlex_key(a), shortlex_key(b)
    return (ka > kb) - (ka < kb)


def tokenize(text: str) -> list[tuple[str, int]]:
    """Split word text into ``(name, exponent)`` factors.

    ``"1"`` stands for the identity and contributes no factors.
    """
    factors = []
    for tok in text.split():
        if tok == "1":
            continue
        m = _FACTOR.match(tok)
        if m is None:
            raise ParseError(f"malformed factor {tok!r}")
        exp = int(m["exp"]) if m["exp"] is not None else 1
        if exp == 0:
            raise ParseError(f"exponent must be nonzero in {tok!r}")
        factors.append((m["name"], exp))
    return factors


def format_factors(factors: Iterable[tuple[str, int]]) -> str:
    """Render ``(name, exponent)`` runs, merging adjacent runs of one symbol."""
    runs: list[list] = []
    for name, exp in factors:
        if runs and runs[-1][0] == name and (runs[-1][1] > 0) == (exp > 0):
            runs[-1][1] += exp
        else:
            runs.append([name, exp])
    if not runs:
        return "1"
    return " ".join(name if exp == 1 else f"{name}^{exp}" for name, exp in runs)


class Alphabet:
    """Ordered generator names of a free group."""

    __slots__ = ("names", "_index")

    def __init__(self, names: Iterable[str]):
        names = tuple(names)
        if not names:
            raise ValueError("an alphabet needs at least one generator")
        for n in names:
            if not _NAME.match(n):
                raise ValueError(f"invalid generator name {n!r}")
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate generator names in {names!r}")
        self.names = names
        self._index = {n: i for i, n in enumerate(names)}

    def __len__(self) -> int:
        return len(self.names)

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Alphabet) and self.names == other.names

    def __hash__(self) -> int:
        return hash(self.names)

    def __repr__(self) -> str:
        return f"Alphabet({list(self.names)!r})"

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise ParseError(f"unknown symbol {name!r}") from None

    def generator(self, name: str) -> Word:
        return Word.generator(self.index(name))

    def parse(self, text: str) -> Word:
        codes: list[int] = []
        for name, exp in tokenize(text):
            i = self.index(name)
            codes.extend([i + 1 if exp > 0 else -(i + 1)] * abs(exp))
        return Word(codes)

    def format(self, w: Word) -> str:
        if w.max_generator() >= len(self.names):
            raise ValueError(f"{w!r} uses generators outside {self!r}")
        return format_factors(
            (self.names[abs(c) - 1], 1 if c > 0 else -1) for c in w.codes
        )

    def words_up_to(self, length: int):
        """Yield all reduced words of length <= ``length`` in shortlex order."""
        yield EMPTY
        layer = [()]
        order = [s * (i + 1) for i in range(len(self.names)) for s in (1, -1)]
        for _ in range(length):
            nxt = []
            for codes in layer:
                for c in order:
                    if codes and codes[-1] == -c:
                        continue
                    nxt.append(codes + (c,))
            for codes in nxt:
                yield Word(codes)
            layer = nxt
