"""Small exact fields for the representation code.

* ``QQ``: rationals (``fractions.Fraction``).
* ``GF(p)``: integers mod a prime.
* ``RootField(n, c, name)``: Q(t) with t^n = c.  Only built when x^n - c is
  irreducible over Q (n prime and c not an n-th power), so it is a field and zero
  tests are exact.  Covers Q(i), Q(sqrt(-3)), Q(sqrt(d)) and Q(c^(1/5)).
* ``CC``: complex doubles, zero tests up to a relative tolerance.

Element text grammar (used in matrices.json and on the command line)::

    element := term (("+" | "-") term)*
    term    := [rational "*"] [gen ["^" int]] | rational
    rational:= int ["/" int] | decimal

``gen`` is the field's generator name (``r`` by default, ``i`` for Q(i)).
"""

from __future__ import annotations

import cmath
import math
import re
from fractions import Fraction
from typing import List, Optional, Sequence


class FieldError(ValueError):
    pass


def _int_root(n: int, e: int) -> Optional[int]:
    """Exact e-th root of a nonnegative integer, or None."""
    if n < 0:
        return None
    r = round(n ** (1.0 / e)) if n < 2 ** 1000 else int(math.isqrt(n)) if e == 2 else None
    if r is None:
        lo, hi = 0, 1 << (n.bit_length() // e + 1)
        while lo < hi:
            mid = (lo + hi) // 2
            if mid ** e < n:
                lo = mid + 1
            else:
                hi = mid
        r = lo
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand ** e == n:
            return cand
    return None


def rational_root(c: Fraction, e: int) -> Optional[Fraction]:
    """A rational e-th root of c if one exists (the real one for odd e, the positive one for e = 2)."""
    c = Fraction(c)
    sign = 1
    if c < 0:
        if e % 2 == 0:
            return None
        sign = -1
    num, den = _int_root(abs(c.numerator), e), _int_root(c.denominator, e)
    if num is None or den is None:
        return None
    return sign * Fraction(num, den)


# ---------------------------------------------------------------------------

class QQField:
    name = "Q"
    exact = True
    gen_name = None

    zero = Fraction(0)
    one = Fraction(1)

    def __call__(self, x) -> Fraction:
        return x if isinstance(x, Fraction) else Fraction(x)

    def is_zero(self, x) -> bool:
        return x == 0

    def parse(self, text: str) -> Fraction:
        return parse_element(self, text)

    def text(self, x: Fraction) -> str:
        return str(x)

    def describe(self) -> dict:
        return {"field": "Q"}

    def __eq__(self, other) -> bool:
        return isinstance(other, QQField)

    def __hash__(self) -> int:
        return hash("Q")


QQ = QQField()


class ModInt:
    __slots__ = ("v", "p")

    def __init__(self, v: int, p: int):
        self.v = v % p
        self.p = p

    def _c(self, o) -> int:
        if isinstance(o, ModInt):
            if o.p != self.p:
                raise FieldError("mixing different primes")
            return o.v
        if isinstance(o, Fraction):
            return o.numerator * pow(o.denominator, -1, self.p) % self.p
        return int(o) % self.p

    def __add__(self, o):
        return ModInt(self.v + self._c(o), self.p)

    __radd__ = __add__

    def __sub__(self, o):
        return ModInt(self.v - self._c(o), self.p)

    def __rsub__(self, o):
        return ModInt(self._c(o) - self.v, self.p)

    def __mul__(self, o):
        return ModInt(self.v * self._c(o), self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return ModInt(-self.v, self.p)

    def __truediv__(self, o):
        d = self._c(o)
        if d == 0:
            raise ZeroDivisionError("division by zero in F_p")
        return ModInt(self.v * pow(d, -1, self.p), self.p)

    def __rtruediv__(self, o):
        return ModInt(self._c(o), self.p) / self

    def __pow__(self, e: int):
        if e < 0:
            return ModInt(1, self.p) / ModInt(pow(self.v, -e, self.p), self.p)
        return ModInt(pow(self.v, e, self.p), self.p)

    def __eq__(self, o) -> bool:
        try:
            return self.v == self._c(o)
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self) -> int:
        return hash((self.v, self.p))

    def __repr__(self) -> str:
        return f"{self.v} (mod {self.p})"


class GF:
    exact = True
    gen_name = None

    def __init__(self, p: int):
        self.p = p
        self.name = f"F_{p}"
        self.zero = ModInt(0, p)
        self.one = ModInt(1, p)

    def __call__(self, x) -> ModInt:
        return x if isinstance(x, ModInt) else ModInt(0, self.p) + x

    def is_zero(self, x) -> bool:
        return self(x).v == 0

    def parse(self, text: str) -> ModInt:
        return self(parse_element(QQ, text))

    def text(self, x) -> str:
        return str(self(x).v)

    def describe(self) -> dict:
        return {"field": "Fp", "prime": self.p}

    def __eq__(self, other) -> bool:
        return isinstance(other, GF) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("GF", self.p))


# ---------------------------------------------------------------------------

class RootElem:
    """a_0 + a_1 t + ... + a_{n-1} t^{n-1} with t^n = c (rational coefficients)."""

    __slots__ = ("c", "F")

    def __init__(self, coeffs: Sequence, F: "RootField"):
        n = F.n
        cs = [Fraction(x) for x in coeffs][:n]
        cs += [Fraction(0)] * (n - len(cs))
        self.c = tuple(cs)
        self.F = F

    def _lift(self, o) -> "RootElem":
        if isinstance(o, RootElem):
            if o.F != self.F:
                raise FieldError("mixing different root extensions")
            return o
        return RootElem([Fraction(o)], self.F)

    def __add__(self, o):
        o = self._lift(o)
        return RootElem([x + y for x, y in zip(self.c, o.c)], self.F)

    __radd__ = __add__

    def __neg__(self):
        return RootElem([-x for x in self.c], self.F)

    def __sub__(self, o):
        return self + (-self._lift(o))

    def __rsub__(self, o):
        return self._lift(o) - self

    def __mul__(self, o):
        o = self._lift(o)
        n, cc = self.F.n, self.F.c
        out = [Fraction(0)] * n
        for i, x in enumerate(self.c):
            if not x:
                continue
            for j, y in enumerate(o.c):
                if not y:
                    continue
                e = i + j
                if e >= n:
                    out[e - n] += x * y * cc
                else:
                    out[e] += x * y
        return RootElem(out, self.F)

    __rmul__ = __mul__

    def inverse(self) -> "RootElem":
        if self.is_zero():
            raise ZeroDivisionError("division by zero in a root extension")
        # solve (multiplication-by-self matrix) x = e_0 over Q
        n = self.F.n
        cols = []
        basis_el = RootElem([1], self.F)
        for j in range(n):
            cols.append((self * basis_el).c)
            basis_el = basis_el * self.F.gen
        M = [[cols[j][i] for j in range(n)] + [Fraction(1 if i == 0 else 0)] for i in range(n)]
        sol = _solve_rational(M, n)
        return RootElem(sol, self.F)

    def __truediv__(self, o):
        return self * self._lift(o).inverse()

    def __rtruediv__(self, o):
        return self._lift(o) * self.inverse()

    def __pow__(self, e: int):
        base = self if e >= 0 else self.inverse()
        out = RootElem([1], self.F)
        for _ in range(abs(e)):
            out = out * base
        return out

    def is_zero(self) -> bool:
        return not any(self.c)

    def __eq__(self, o) -> bool:
        try:
            o = self._lift(o)
        except (TypeError, ValueError, FieldError):
            return NotImplemented
        return self.c == o.c

    def __hash__(self) -> int:
        return hash((self.c, self.F.n, self.F.c))

    def __repr__(self) -> str:
        return self.F.text(self)


def _solve_rational(M: List[List[Fraction]], n: int) -> List[Fraction]:
    for col in range(n):
        piv = next(r for r in range(col, n) if M[r][col] != 0)
        M[col], M[piv] = M[piv], M[col]
        inv = 1 / M[col][col]
        M[col] = [x * inv for x in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return [M[r][n] for r in range(n)]


def _is_prime_small(n: int) -> bool:
    return n > 1 and all(n % d for d in range(2, int(n ** 0.5) + 1))


class RootField:
    """Q(t) with t^n = c; requires n prime and c not a rational n-th power."""

    exact = True

    def __init__(self, n: int, c, gen_name: str = "r"):
        c = Fraction(c)
        if not _is_prime_small(n):
            raise FieldError("root degree must be prime")
        if c == 0 or rational_root(c, n) is not None:
            raise FieldError(f"x^{n} - {c} is reducible over Q; use the rational root instead")
        self.n, self.c, self.gen_name = n, c, gen_name
        self.name = f"Q({gen_name}), {gen_name}^{n} = {c}"
        self.zero = RootElem([0], self)
        self.one = RootElem([1], self)
        self.gen = RootElem([0, 1], self)

    def __call__(self, x) -> RootElem:
        if isinstance(x, RootElem):
            if x.F != self:
                raise FieldError("element of another field")
            return x
        return RootElem([Fraction(x)], self)

    def is_zero(self, x) -> bool:
        return self(x).is_zero()

    def parse(self, text: str) -> RootElem:
        return parse_element(self, text)

    def text(self, x) -> str:
        x = self(x)
        parts = []
        for e, a in enumerate(x.c):
            if not a:
                continue
            g = "" if e == 0 else (self.gen_name if e == 1 else f"{self.gen_name}^{e}")
            if not g:
                parts.append(str(a))
            elif a == 1:
                parts.append(g)
            elif a == -1:
                parts.append(f"-{g}")
            else:
                parts.append(f"{a}*{g}")
        return " + ".join(parts).replace("+ -", "- ") if parts else "0"

    def describe(self) -> dict:
        return {"field": "exact", "root": {"name": self.gen_name, "degree": self.n, "value": str(self.c)}}

    def __eq__(self, other) -> bool:
        return isinstance(other, RootField) and (other.n, other.c, other.gen_name) == (self.n, self.c, self.gen_name)

    def __hash__(self) -> int:
        return hash(("root", self.n, self.c, self.gen_name))


def gaussian_rationals() -> RootField:
    return RootField(2, -1, "i")


# ---------------------------------------------------------------------------

class CCField:
    name = "C"
    exact = False
    gen_name = None
    zero = 0j
    one = 1 + 0j

    def __init__(self, tol: float = 1e-9):
        self.tol = tol

    def __call__(self, x) -> complex:
        if isinstance(x, Fraction):
            return complex(float(x))
        return complex(x)

    def is_zero(self, x, scale: float = 1.0) -> bool:
        return abs(x) <= self.tol * max(1.0, scale)

    def parse(self, text: str) -> complex:
        t = text.replace(" ", "").replace("*i", "j").replace("i", "j")
        return complex(t)

    def text(self, x) -> str:
        x = complex(x)
        return repr(x.real) if x.imag == 0 else f"{x.real!r}{x.imag:+}*i"

    def describe(self) -> dict:
        return {"field": "complex", "tol": self.tol}

    def __eq__(self, other) -> bool:
        return isinstance(other, CCField)

    def __hash__(self) -> int:
        return hash("C")


CC = CCField()


# ---------------------------------------------------------------------------
# parsing

_NUM = r"(?:\d+(?:\.\d*)?|\.\d+)(?:/\d+)?"


def _parse_rational(s: str) -> Fraction:
    if "/" in s:
        a, b = s.split("/")
        return Fraction(Fraction(a), Fraction(b))
    return Fraction(s)


def parse_element(F, text: str):
    """Parse the element grammar of the module docstring into field ``F``."""
    s = text.replace(" ", "")
    if not s:
        raise FieldError("empty field element")
    gen = getattr(F, "gen_name", None)
    pos = 0
    acc = F.zero
    term_re = re.compile(rf"([+-]?)({_NUM})?(\*)?(?:({re.escape(gen)})(?:\^(\d+))?)?" if gen
                         else rf"([+-]?)({_NUM})")
    while pos < len(s):
        m = term_re.match(s, pos)
        if not m or m.end() == pos or (gen and not m.group(2) and not m.group(4)):
            raise FieldError(f"cannot parse {text!r} at position {pos}")
        sign = -1 if m.group(1) == "-" else 1
        coef = _parse_rational(m.group(2)) if m.group(2) else Fraction(1)
        if gen and m.group(3) and not m.group(4):
            raise FieldError(f"dangling '*' in {text!r}")
        term = F(sign * coef)
        if gen and m.group(4):
            e = int(m.group(5) or 1)
            term = term * (F.gen ** e)
        acc = acc + term
        pos = m.end()
        if pos < len(s) and s[pos] not in "+-":
            raise FieldError(f"cannot parse {text!r} at position {pos}")
    return acc


def field_from_json(d: dict):
    kind = d.get("field", "exact")
    if kind == "complex":
        return CCField(float(d.get("tol", 1e-9)))
    if kind == "Fp":
        return GF(int(d["prime"]))
    root = d.get("root")
    if root:
        return RootField(int(root["degree"]), Fraction(root["value"]), root.get("name", "r"))
    return QQ


def complex_root(c: complex, n: int, branch: int = 0) -> complex:
    """The n-th root of c with argument (arg c + 2 pi branch) / n."""
    r, phi = cmath.polar(complex(c))
    return cmath.rect(r ** (1.0 / n), (phi + 2 * math.pi * branch) / n)
