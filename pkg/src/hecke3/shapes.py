"""The spanning shapes of H_k: exponent windows, two-sided and one-sided generators.

A two-sided shape X contributes the words s1^x X s1^y (x, y in the window); a
one-sided shape omega^m contributes s1^x omega^m.  Shapes are listed in summand
order, which fixes the basis order used everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

from .braidword import BraidWord, omega_power

WINDOWS = {2: (0, 1), 3: (-1, 0, 1), 4: (-1, 0, 1, 2), 5: (-2, -1, 0, 1, 2)}
RANKS = {2: 6, 3: 24, 4: 96, 5: 600}


def _w(*exps: int) -> BraidWord:
    return BraidWord.from_exponents(exps, first=2)


@dataclass(frozen=True)
class Shape:
    label: str               # summand the shape comes from, e.g. "u1 s2 s1^-1 s2 u1"
    word: BraidWord          # the middle word (public form)
    two_sided: bool
    omega: Optional[int] = None   # for one-sided shapes: the internal omega power

    @property
    def internal_word(self) -> BraidWord:
        return self.word if self.omega is None else omega_power(self.omega)


def _two(*exps: int) -> Shape:
    w = _w(*exps)
    return Shape(f"u1 {w.to_text()} u1", w, True)


def _one(m: int) -> Shape:
    w = omega_power(m)
    label = "u1" if m == 0 else f"u1 w^{m}"
    return Shape(label, w, False, m)


_LEN3_K5 = [(-1, 2, -1), (1, -2, 1), (2, 2, 2), (-2, -2, -2), (1, -2, 2), (-1, 2, -2), (-1, 1, -1),
            (1, -1, 1), (-2, -2, 2), (2, 2, -2), (2, -2, 2), (-2, 2, -2), (-2, 1, -1), (-1, 1, -2)]
_LEN5_K5 = [(-2, 2, -1, 1, -1), (2, -2, 1, -1, 1), (1, -2, 2, -2, 2), (-1, 2, -2, 2, -2)]


def shapes(k: int) -> List[Shape]:
    if k == 2:
        return [_one(0), _two(1)]
    if k == 3:
        # s2 s1^-1 s2 is spanned over u1 on the left only; internally omega stands in for it
        odd = Shape("u1 s2 s1^-1 s2", _w(1, -1, 1), False, 1)
        return [_one(0), _two(1), _two(-1), odd]
    if k == 4:
        return [_one(0), _two(-1), _two(1), _two(2), _two(1, -1, 1), _two(-1, 1, -1),
                _one(1), _one(-1), _one(-2)]
    if k == 5:
        out = [_one(0)] + [_two(x) for x in (-2, -1, 1, 2)] + [_one(1), _one(-1)]
        out += [_two(*p) for p in _LEN3_K5]
        out += [_one(2), _one(-2)]
        out += [_two(*p) for p in _LEN5_K5]
        out += [_one(3), _one(-3), _one(4), _one(-4), _one(-5)]
        return out
    raise ValueError(f"k must be in 2..5, got {k}")


def left_order(k: int, first_block: bool) -> Tuple[int, ...]:
    """Order of left exponents inside a block; the identity block starts at s1^0."""
    win = WINDOWS[k]
    if first_block:
        return (0,) + tuple(x for x in win if x != 0)
    return win
