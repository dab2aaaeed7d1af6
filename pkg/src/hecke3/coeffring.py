"""Exact arithmetic in the coefficient ring R_k = Z[a_{k-1}, ..., a_1, a_0, a_0^-1].

A :class:`LaurentPoly` is a sparse map from exponent vectors ``(e0, ..., e_{k-1})``
to nonzero Python integers.  Only ``a0`` may carry a negative exponent.  Values are
immutable; every constructor normalizes, so equality is structural.

Text grammar (used in JSON reports)::

    poly    := "0" | term (" + " term)*
    term    := coeff ("*" var)*
    coeff   := ["-"] digits
    var     := "a" index ["^" ["-"] digits]

Terms are listed in ascending lexicographic order of their exponent vectors, e.g.
``-1*a0^-1*a1 + 2*a2``.  The parser also accepts ``-`` between terms and implicit
unit coefficients (``a1 - a0``).

For k = 4 and k = 5 the letter aliases ``a, b, c, d`` (resp. ``a, ..., e``) name the
coefficients of the characteristic relation from the top down: ``a = a_{k-1}`` and the
last letter is ``a0``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple, Union

Exponent = Tuple[int, ...]

DEFAULT_PRIME = 4611686018427387847  # largest prime below 2^62
VALID_K = (2, 3, 4, 5)


class RingMismatch(ValueError):
    pass


def _check_k(k: int) -> None:
    if k not in VALID_K:
        raise ValueError(f"k must be one of {VALID_K}, got {k}")


def letter_aliases(k: int) -> Dict[str, int]:
    """Map the letter names used for k = 4, 5 to variable indices."""
    if k == 4:
        return {"a": 3, "b": 2, "c": 1, "d": 0}
    if k == 5:
        return {"a": 4, "b": 3, "c": 2, "d": 1, "e": 0}
    return {}


class LaurentPoly:
    """Element of R_k.  Build with :meth:`const`, :meth:`var`, :meth:`from_terms`."""

    __slots__ = ("k", "_terms", "_hash")

    def __init__(self, k: int, terms: Mapping[Exponent, int] | None = None, *, _trusted: bool = False):
        self.k = k
        if _trusted:
            self._terms: Dict[Exponent, int] = terms  # type: ignore[assignment]
        else:
            _check_k(k)
            clean: Dict[Exponent, int] = {}
            for e, c in (terms or {}).items():
                e = tuple(int(x) for x in e)
                if len(e) != k:
                    raise ValueError(f"exponent {e} has wrong length for k={k}")
                if any(x < 0 for x in e[1:]):
                    raise ValueError(f"negative exponent on a non-invertible variable: {e}")
                c = int(c)
                if c:
                    clean[e] = clean.get(e, 0) + c
                    if clean[e] == 0:
                        del clean[e]
            self._terms = clean
        self._hash: Optional[int] = None

    # construction ------------------------------------------------------
    @classmethod
    def zero(cls, k: int) -> "LaurentPoly":
        return cls(k, {}, _trusted=True)

    @classmethod
    def const(cls, k: int, c: int) -> "LaurentPoly":
        return cls(k, {(0,) * k: int(c)} if c else {}, _trusted=True)

    @classmethod
    def one(cls, k: int) -> "LaurentPoly":
        return cls.const(k, 1)

    @classmethod
    def var(cls, k: int, j: int, power: int = 1) -> "LaurentPoly":
        """The monomial a_j^power (power < 0 only for j = 0)."""
        e = [0] * k
        e[j] = power
        return cls(k, {tuple(e): 1})

    @classmethod
    def from_terms(cls, k: int, terms: Iterable[Tuple[Sequence[int], int]]) -> "LaurentPoly":
        d: Dict[Exponent, int] = {}
        for e, c in terms:
            e = tuple(e)
            d[e] = d.get(e, 0) + c
        return cls(k, d)

    # inspection --------------------------------------------------------
    def terms(self) -> Tuple[Tuple[Exponent, int], ...]:
        """Support in canonical (lexicographic) order."""
        return tuple(sorted(self._terms.items()))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def is_unit(self) -> bool:
        """Units of R_k are exactly +-a0^n."""
        if len(self._terms) != 1:
            return False
        (e, c), = self._terms.items()
        return c in (1, -1) and not any(e[1:])

    def constant_term(self) -> int:
        return self._terms.get((0,) * self.k, 0)

    def max_abs_coeff(self) -> int:
        return max((abs(c) for c in self._terms.values()), default=0)

    # arithmetic --------------------------------------------------------
    def _coerce(self, other: Union["LaurentPoly", int]) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            if other.k != self.k:
                raise RingMismatch(f"R_{self.k} vs R_{other.k}")
            return other
        if isinstance(other, int):
            return LaurentPoly.const(self.k, other)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other._terms:
            return self
        if not self._terms:
            return other
        d = dict(self._terms)
        for e, c in other._terms.items():
            v = d.get(e, 0) + c
            if v:
                d[e] = v
            else:
                d.pop(e, None)
        return LaurentPoly(self.k, d, _trusted=True)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly(self.k, {e: -c for e, c in self._terms.items()}, _trusted=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            if other == 0:
                return LaurentPoly.zero(self.k)
            return LaurentPoly(self.k, {e: c * other for e, c in self._terms.items()}, _trusted=True)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self._terms, other._terms
        if not a or not b:
            return LaurentPoly.zero(self.k)
        if len(a) < len(b):
            a, b = b, a
        d: Dict[Exponent, int] = {}
        get = d.get
        for e2, c2 in b.items():
            for e1, c1 in a.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                d[e] = get(e, 0) + c1 * c2
        return LaurentPoly(self.k, {e: c for e, c in d.items() if c}, _trusted=True)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "LaurentPoly":
        if n < 0:
            return self.unit_inverse() ** (-n)
        result = LaurentPoly.one(self.k)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def unit_inverse(self) -> "LaurentPoly":
        if not self.is_unit():
            raise ZeroDivisionError(f"{self} is not a unit of R_{self.k}")
        (e, c), = self._terms.items()
        return LaurentPoly(self.k, {(-e[0],) + e[1:]: c}, _trusted=True)

    def shift_a0(self, n: int) -> "LaurentPoly":
        """Multiply by a0^n."""
        if n == 0:
            return self
        return LaurentPoly(self.k, {(e[0] + n,) + e[1:]: c for e, c in self._terms.items()}, _trusted=True)

    # comparisons -------------------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            return self == LaurentPoly.const(self.k, other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.k == other.k and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.k, frozenset(self._terms.items())))
        return self._hash

    # text --------------------------------------------------------------
    def to_text(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for e, c in self.terms():
            factors = [str(c)]
            for j, x in enumerate(e):
                if x == 1:
                    factors.append(f"a{j}")
                elif x:
                    factors.append(f"a{j}^{x}")
            parts.append("*".join(factors))
        return " + ".join(parts)

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"LaurentPoly(k={self.k}, '{self.to_text()}')"


# ---------------------------------------------------------------------------
# parsing

_TERM_SPLIT = re.compile(r"\s*(?<!\^)([+-])\s*")
_FACTOR = re.compile(r"^(?:a(\d+)|([a-e]))(?:\^(-?\d+))?$")


def parse_poly(text: str, k: int) -> LaurentPoly:
    """Inverse of :meth:`LaurentPoly.to_text` (also accepts letter aliases)."""
    _check_k(k)
    s = text.strip()
    if s in ("", "0"):
        return LaurentPoly.zero(k)
    aliases = letter_aliases(k)
    # tokenize into signed terms; a leading '-' belongs to the first term
    tokens = _TERM_SPLIT.split(s)
    signed = []
    sign = 1
    if tokens[0] == "":
        tokens = tokens[1:]
    else:
        tokens = ["+"] + tokens
    for i in range(0, len(tokens), 2):
        op, body = tokens[i], tokens[i + 1] if i + 1 < len(tokens) else ""
        sign *= -1 if op == "-" else 1
        if body == "":
            if i + 2 < len(tokens):
                continue  # "+ -x" as printed by to_text: fold the signs
            raise ValueError(f"dangling operator in polynomial {text!r}")
        signed.append((sign, body))
        sign = 1
    acc: Dict[Exponent, int] = {}
    for sign, body in signed:
        coeff = sign
        e = [0] * k
        for f in body.split("*"):
            f = f.strip()
            if re.fullmatch(r"\d+", f):
                coeff *= int(f)
                continue
            m = _FACTOR.match(f)
            if not m:
                raise ValueError(f"bad factor {f!r} in polynomial {text!r}")
            if m.group(1) is not None:
                j = int(m.group(1))
            else:
                if m.group(2) not in aliases:
                    raise ValueError(f"letter {m.group(2)!r} is not a variable for k={k}")
                j = aliases[m.group(2)]
            if j >= k:
                raise ValueError(f"variable a{j} does not exist for k={k}")
            e[j] += int(m.group(3)) if m.group(3) is not None else 1
        t = tuple(e)
        acc[t] = acc.get(t, 0) + coeff
    return LaurentPoly(k, acc)


# ---------------------------------------------------------------------------
# the coefficient part of the automorphism s_i -> s_i^-1

def phi_coeff(p: LaurentPoly) -> LaurentPoly:
    """Apply a_j -> -a0^-1 a_{k-j} (1 <= j < k), a0 -> a0^-1."""
    k = p.k
    # each a_j (j>=1) maps to -a0^-1 a_{k-j}, so a monomial maps to a signed monomial
    out: Dict[Exponent, int] = {}
    for e, c in p._terms.items():
        new = [0] * k
        sign = 1
        new[0] = -e[0]
        for j in range(1, k):
            x = e[j]
            if x:
                new[0] -= x
                new[k - j] += x
                if x & 1:
                    sign = -sign
        t = tuple(new)
        out[t] = out.get(t, 0) + sign * c
    return LaurentPoly(k, {e: c for e, c in out.items() if c}, _trusted=True)


# ---------------------------------------------------------------------------
# specializations

@dataclass(frozen=True)
class Specialization:
    """A ring map R_k -> field.  ``field`` is 'Q', 'Fp' or 'C'."""

    field: str
    values: Tuple
    prime: int = DEFAULT_PRIME

    def __post_init__(self):
        if self.field not in ("Q", "Fp", "C"):
            raise ValueError(f"unknown field tag {self.field!r}")
        if self.field == "Fp":
            object.__setattr__(self, "values", tuple(int(v) % self.prime for v in self.values))
        if self.field == "Q":
            object.__setattr__(self, "values", tuple(Fraction(v) for v in self.values))
        if self.field == "C":
            object.__setattr__(self, "values", tuple(complex(v) for v in self.values))
        if not self.values or self.values[0] == 0:
            raise ZeroDivisionError("image of a0 must be invertible")

    @property
    def k(self) -> int:
        return len(self.values)


def poly_eval(p: LaurentPoly, s: Specialization):
    if p.k != s.k:
        raise RingMismatch(f"R_{p.k} evaluated at a point of R_{s.k}")
    if s.field == "Fp":
        q = s.prime
        inv0 = pow(s.values[0], q - 2, q)
        total = 0
        for e, c in p._terms.items():
            t = c % q
            e0 = e[0]
            if e0 >= 0:
                t = t * pow(s.values[0], e0, q) % q
            else:
                t = t * pow(inv0, -e0, q) % q
            for v, x in zip(s.values[1:], e[1:]):
                if x:
                    t = t * pow(v, x, q) % q
            total += t
        return total % q
    total = 0
    for e, c in p._terms.items():
        t = c
        for v, x in zip(s.values, e):
            if x:
                t = t * v ** x
        total = total + t
    if s.field == "Q":
        return Fraction(total)
    return complex(total)


def poly_add(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    return p + q


def poly_mul(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    return p * q


def relation_coeffs(k: int) -> Tuple[LaurentPoly, ...]:
    """(a_0, ..., a_{k-1}) as polynomials: s^k = sum_j a_j s^j."""
    return tuple(LaurentPoly.var(k, j) for j in range(k))


# ---------------------------------------------------------------------------
# coefficient domains for the reduction engine
#
# The engine manipulates numpy object arrays whose entries are either
# LaurentPoly (exact, over R_k) or Python ints reduced mod p (a specialization).

class NotInRing(ArithmeticError):
    """Raised when a derivation needs to invert a non-unit of R_k."""

    def __init__(self, value: LaurentPoly):
        super().__init__(f"derivation divides by {value.to_text()}, which is not a unit of R_{value.k}")
        self.value = value


class SymbolicCoeffs:
    """Exact coefficients in R_k."""

    exact = True

    def __init__(self, k: int):
        _check_k(k)
        self.k = k
        self.zero = LaurentPoly.zero(k)
        self.one = LaurentPoly.one(k)
        self.a = [LaurentPoly.var(k, j) for j in range(k)]
        self.a0_inv = LaurentPoly.var(k, 0, -1)

    def coeff(self, i: int):
        """Coefficient of s^(lo+i) in s^(lo+k) - sum_j a_j s^(lo+j)."""
        return self.one if i == self.k else -self.a[i]

    def from_poly(self, p: LaurentPoly):
        return p

    def to_poly(self, x) -> LaurentPoly:
        return x if isinstance(x, LaurentPoly) else LaurentPoly.const(self.k, int(x))

    def inv(self, x):
        x = self.to_poly(x)
        if not x.is_unit():
            raise NotInRing(x)
        return x.unit_inverse()

    def clean(self, arr):
        return arr

    def is_zero(self, x) -> bool:
        return x == 0

    def describe(self) -> str:
        return f"R_{self.k}"


class ModPCoeffs:
    """Coefficients specialized at a point of F_p (a0 must be nonzero)."""

    exact = False

    def __init__(self, spec: Specialization):
        if spec.field != "Fp":
            raise ValueError("ModPCoeffs needs a prime-field specialization")
        self.spec = spec
        self.k = spec.k
        self.p = spec.prime
        self.zero = 0
        self.one = 1
        self.a = list(spec.values)
        self.a0_inv = pow(self.a[0], self.p - 2, self.p)

    def coeff(self, i: int) -> int:
        return 1 if i == self.k else (-self.a[i]) % self.p

    def from_poly(self, p: LaurentPoly) -> int:
        return poly_eval(p, self.spec)

    def inv(self, x) -> int:
        x = int(x) % self.p
        if x == 0:
            raise ZeroDivisionError("division by zero at this specialization")
        return pow(x, self.p - 2, self.p)

    def clean(self, arr):
        return arr % self.p

    def is_zero(self, x) -> bool:
        return int(x) % self.p == 0

    def describe(self) -> str:
        return f"F_{self.p} at a={list(self.a)}"


def random_fp_point(k: int, rng, prime: int = DEFAULT_PRIME) -> Specialization:
    vals = [rng.randrange(1, prime)] + [rng.randrange(0, prime) for _ in range(k - 1)]
    return Specialization("Fp", tuple(vals), prime)


def point_from_eigenvalues(eigs: Sequence[int], prime: int = DEFAULT_PRIME) -> Specialization:
    """The point where s^k - sum a_j s^j = prod (s - eig_i) over F_p."""
    poly = [1]
    for lam in eigs:
        poly = [(x - lam * y) % prime for x, y in zip(poly + [0], [0] + poly)]
    coeffs = poly[::-1]  # coeffs[j] = coefficient of s^j
    k = len(eigs)
    return Specialization("Fp", tuple((-coeffs[j]) % prime for j in range(k)), prime)
