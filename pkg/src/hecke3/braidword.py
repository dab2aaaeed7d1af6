"""Words in the generators s1, s2 of B3, kept in free-group syllable form.

Grammar (whitespace separates tokens, juxtaposition is multiplication)::

    word  := "" | "1" | token (ws token)*
    token := ("s1" | "s2") ["^" int]

``s1^0`` is accepted and contributes nothing.  Adjacent syllables on the same
generator fuse (``s1^2 s1^-2`` is the empty word).  No braid relation is applied
here; see :mod:`hecke3.rewrite` for that.
"""

from __future__ import annotations

import re
from typing import Iterable, List, Sequence, Tuple

Syllable = Tuple[int, int]  # (generator in {1, 2}, nonzero exponent)

EXP_LIMIT = 2 ** 31  # exponents beyond this are almost surely a bug upstream


class WordParseError(ValueError):
    def __init__(self, msg: str, position: int):
        super().__init__(f"{msg} at position {position}")
        self.position = position


class ExponentOverflow(OverflowError):
    pass


def _fuse(syllables: Iterable[Syllable]) -> Tuple[Syllable, ...]:
    out: List[Syllable] = []
    for g, x in syllables:
        if g not in (1, 2):
            raise ValueError(f"generator must be 1 or 2, got {g}")
        if x == 0:
            continue
        if out and out[-1][0] == g:
            x = out[-1][1] + x
            out.pop()
            if x == 0:
                continue
        if abs(x) >= EXP_LIMIT:
            raise ExponentOverflow(f"exponent {x} exceeds {EXP_LIMIT}")
        out.append((g, x))
    return tuple(out)


class BraidWord:
    """Immutable freely reduced word; ``syllables`` is a tuple of (gen, exp)."""

    __slots__ = ("syllables", "_hash")

    def __init__(self, syllables: Iterable[Syllable] = ()):
        self.syllables: Tuple[Syllable, ...] = _fuse((int(g), int(x)) for g, x in syllables)
        self._hash = hash(self.syllables)

    @classmethod
    def identity(cls) -> "BraidWord":
        return cls(())

    @classmethod
    def from_exponents(cls, exps: Sequence[int], first: int = 2) -> "BraidWord":
        """Alternating syllables starting with generator ``first``."""
        g = first
        syl = []
        for x in exps:
            syl.append((g, x))
            g = 3 - g
        return cls(syl)

    def __len__(self) -> int:
        return len(self.syllables)

    def __iter__(self):
        return iter(self.syllables)

    def __getitem__(self, i):
        return self.syllables[i]

    def __eq__(self, other) -> bool:
        return isinstance(other, BraidWord) and self.syllables == other.syllables

    def __lt__(self, other: "BraidWord") -> bool:
        return (len(self.syllables), self.syllables) < (len(other.syllables), other.syllables)

    def __hash__(self) -> int:
        return self._hash

    def __mul__(self, other: "BraidWord") -> "BraidWord":
        return word_concat(self, other)

    def is_identity(self) -> bool:
        return not self.syllables

    def exponent_sum(self) -> int:
        return sum(x for _, x in self.syllables)

    def letters(self) -> List[Syllable]:
        """Expand into single letters (gen, +-1), left to right."""
        out = []
        for g, x in self.syllables:
            s = 1 if x > 0 else -1
            out.extend([(g, s)] * abs(x))
        return out

    def to_text(self) -> str:
        if not self.syllables:
            return "1"
        return " ".join(f"s{g}" if x == 1 else f"s{g}^{x}" for g, x in self.syllables)

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"BraidWord('{self.to_text()}')"


def word_concat(u: BraidWord, v: BraidWord) -> BraidWord:
    return BraidWord(u.syllables + v.syllables)


def word_inverse(u: BraidWord) -> BraidWord:
    return BraidWord((g, -x) for g, x in reversed(u.syllables))


def phi_word(u: BraidWord) -> BraidWord:
    """Letterwise s_i -> s_i^-1 (order is kept)."""
    return BraidWord((g, -x) for g, x in u.syllables)


_TOKEN = re.compile(r"s([12])(?:\^(-?\d+))?")


def parse_word(text: str) -> BraidWord:
    s = text
    pos = 0
    n = len(s)
    syl: List[Syllable] = []
    while pos < n:
        if s[pos].isspace() or s[pos] == "*":
            pos += 1
            continue
        if s[pos] == "1" and (pos + 1 == n or s[pos + 1].isspace()):
            pos += 1
            continue
        m = _TOKEN.match(s, pos)
        if not m:
            raise WordParseError(f"unexpected {s[pos]!r} in word {text!r}", pos)
        x = int(m.group(2)) if m.group(2) is not None else 1
        if abs(x) >= EXP_LIMIT:
            raise ExponentOverflow(f"exponent {x} exceeds {EXP_LIMIT}")
        syl.append((int(m.group(1)), x))
        pos = m.end()
        if pos < n and not (s[pos].isspace() or s[pos] == "*"):
            raise WordParseError(f"missing separator after token in {text!r}", pos)
    return BraidWord(syl)


# frequently used words -----------------------------------------------------

S1 = BraidWord([(1, 1)])
S2 = BraidWord([(2, 1)])
OMEGA = BraidWord([(2, 1), (1, 2), (2, 1)])


def s(i: int, x: int = 1) -> BraidWord:
    return BraidWord([(i, x)])


def omega_power(m: int) -> BraidWord:
    base = OMEGA if m >= 0 else word_inverse(OMEGA)
    out = BraidWord()
    for _ in range(abs(m)):
        out = out * base
    return out


def z_word() -> BraidWord:
    """z = s1^2 omega, a generator of the centre of B3."""
    return s(1, 2) * OMEGA


def z0_word() -> BraidWord:
    """(s1 s2)^3, which equals z."""
    return BraidWord([(1, 1), (2, 1)] * 3)
