"""Exact arithmetic in B3 through its faithful image in SL2(Z) x Z.

s1 -> ([[1,1],[0,1]], 1) and s2 -> ([[1,0],[-1,1]], 1); the second component is
the exponent sum.  The kernel of B3 -> SL2(Z) is generated by z^2 with z = (s1 s2)^3,
which maps to (I, 12), so the pair determines the braid.

Double cosets <s1> g <s1> are indexed by :class:`CosetKey`.  For a braid whose
matrix has lower-left entry c != 0 we normalise c > 0 (multiplying by the central
z, which negates the matrix), reduce the diagonal entries modulo c, and write

    g = s1^p * R * s1^q * z^m,

where R depends only on (c, a mod c, d mod c) and has exponent sum in [0, 12).
When c = 0 the braid is s1^n z^m and we use the key (0, 0, 0, m) with p = n.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Tuple

from .braidword import BraidWord

Mat = Tuple[int, int, int, int]  # (a, b, c, d) for [[a, b], [c, d]]
ID: Mat = (1, 0, 0, 1)


def mat_mul(A: Mat, B: Mat) -> Mat:
    a, b, c, d = A
    e, f, g, h = B
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def gen_mat(g: int, x: int) -> Mat:
    return (1, x, 0, 1) if g == 1 else (1, 0, -x, 1)


@dataclass(frozen=True)
class Braid:
    mat: Mat
    e: int

    def __mul__(self, other: "Braid") -> "Braid":
        return Braid(mat_mul(self.mat, other.mat), self.e + other.e)

    def inverse(self) -> "Braid":
        a, b, c, d = self.mat
        return Braid((d, -b, -c, a), -self.e)

    def phi(self) -> "Braid":
        """Image of the letterwise inversion s_i -> s_i^-1 (a group automorphism of B3)."""
        a, b, c, d = self.mat
        return Braid((a, -b, -c, d), -self.e)


IDENTITY = Braid(ID, 0)


def braid_of(word: BraidWord | Iterable[Tuple[int, int]]) -> Braid:
    M = ID
    e = 0
    for g, x in word:
        M = mat_mul(M, gen_mat(g, x))
        e += x
    return Braid(M, e)


def syllable(g: int, x: int) -> Braid:
    return Braid(gen_mat(g, x), x)


def equal_in_b3(u: BraidWord, v: BraidWord) -> bool:
    return braid_of(u) == braid_of(v)


@dataclass(frozen=True, order=True)
class CosetKey:
    c: int
    a: int
    d: int
    m: int

    @property
    def one_sided(self) -> bool:
        """True for the cosets of central-times-s1-power braids."""
        return self.c == 0

    @property
    def shape(self) -> Tuple[int, int, int]:
        return (self.c, self.a, self.d)

    def shifted(self, dm: int) -> "CosetKey":
        return CosetKey(self.c, self.a, self.d, self.m + dm)

    def as_list(self):
        return [self.c, self.a, self.d, self.m]


def coset_key(g: Braid) -> Tuple[CosetKey, int, int]:
    """Return (key, p, q) with g = s1^p R_key s1^q (see module docstring)."""
    a, b, c, d = g.mat
    e = g.e
    if c == 0:
        sgn = a
        n = b * sgn
        m6 = e - n
        if m6 % 6:
            raise ValueError(f"not a braid image: {g}")
        return CosetKey(0, 0, 0, m6 // 6), n, 0
    mu = 0
    if c < 0:
        a, b, c, d = -a, -b, -c, -d
        e -= 6
        mu = 1
    ar = a % c
    dr = d % c
    i = (ar - a) // c
    j = (dr - d) // c
    n2 = (e + i + j) // 12
    return CosetKey(c, ar, dr, mu + 2 * n2), -i, -j


def word_coset(word: BraidWord) -> Tuple[CosetKey, int, int]:
    return coset_key(braid_of(word))


def s1_power_of(g: Braid) -> int | None:
    """If g is a power of s1 return the exponent, else None."""
    key, p, _ = coset_key(g)
    if key.c == 0 and key.m == 0:
        return p
    return None
