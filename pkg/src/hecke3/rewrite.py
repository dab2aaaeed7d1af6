"""Reduction of R_k-combinations of braid words to the canonical basis of H_k.

Two layers live here.

* Named word rules (:data:`RULES`): power-down / power-up (the characteristic
  relation and its inverse form), conjugate-power (s_i s_j^m s_i^-1 = s_j^-1 s_i^m s_j),
  braid-slide (s_i s_j s_i^n = s_j^n s_i s_j), central-slide (s1^a w^m = w^m s1^a),
  and syllable-expansion (the characteristic relation solved for an extreme power
  inside an arbitrary window).  Each is a sound local rewrite and is tested as such.

* The reduction engine (:class:`Engine`).  Every braid is s1^p R s1^q z^m with R a
  double-coset representative; the engine stores, for each needed (R, m), its
  expansion in the basis, obtained from the derivation table built offline by
  :mod:`hecke3.cosetsearch` (each derivation is one or two syllable-expansions of a
  family word).  Left and right multiplication by s1-powers act on the s1-exponents
  of basis words through the power tables, so reducing s2^{+-1} b for every basis
  word b gives the structure matrices; reducing an arbitrary word then needs only
  generator actions.

Coefficients are abstracted by a domain (see :mod:`hecke3.coeffring`): exact
LaurentPoly or values at a point of F_p.  The engine code is identical for both.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, Iterable, List, Optional, Tuple

import numpy as np

from .b3group import Braid, CosetKey, braid_of, coset_key, syllable
from .braidword import BraidWord, omega_power, phi_word, s
from .coeffring import LaurentPoly, NotInRing, SymbolicCoeffs, phi_coeff
from .cosetsearch import load_table
from .shapes import WINDOWS, left_order, shapes

STEP_BUDGET = 10 ** 6


class ReductionStuck(RuntimeError):
    def __init__(self, msg: str, trace: Optional["ReductionTrace"] = None):
        super().__init__(msg)
        self.trace = trace


# ---------------------------------------------------------------------------
# algebra elements

class AlgebraElement:
    """Finite R_k-combination of braid words (free-group reduced)."""

    __slots__ = ("k", "terms")

    def __init__(self, k: int, terms: Optional[Dict[BraidWord, LaurentPoly]] = None):
        self.k = k
        clean: Dict[BraidWord, LaurentPoly] = {}
        for w, c in (terms or {}).items():
            if not isinstance(c, LaurentPoly):
                c = LaurentPoly.const(k, int(c))
            if c.k != k:
                raise ValueError("coefficient ring mismatch")
            if c:
                clean[w] = clean[w] + c if w in clean else c
                if not clean[w]:
                    del clean[w]
        self.terms = clean

    @classmethod
    def word(cls, k: int, w: BraidWord, coeff: LaurentPoly | int = 1) -> "AlgebraElement":
        return cls(k, {w: coeff})

    @classmethod
    def zero(cls, k: int) -> "AlgebraElement":
        return cls(k, {})

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        d = dict(self.terms)
        for w, c in other.terms.items():
            d[w] = d[w] + c if w in d else c
        return AlgebraElement(self.k, d)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return self + other.scale(LaurentPoly.const(self.k, -1))

    def scale(self, c: LaurentPoly | int) -> "AlgebraElement":
        if isinstance(c, int):
            c = LaurentPoly.const(self.k, c)
        return AlgebraElement(self.k, {w: c * v for w, v in self.terms.items()})

    def mul_word_left(self, u: BraidWord) -> "AlgebraElement":
        return AlgebraElement(self.k, {u * w: c for w, c in self.terms.items()})

    def mul_word_right(self, u: BraidWord) -> "AlgebraElement":
        return AlgebraElement(self.k, {w * u: c for w, c in self.terms.items()})

    def phi(self) -> "AlgebraElement":
        return AlgebraElement(self.k, {phi_word(w): phi_coeff(c) for w, c in self.terms.items()})

    def items(self):
        return sorted(self.terms.items(), key=lambda t: t[0])

    def __eq__(self, other) -> bool:
        return isinstance(other, AlgebraElement) and self.k == other.k and self.terms == other.terms

    def __len__(self) -> int:
        return len(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"({c.to_text()})*[{w.to_text()}]" for w, c in self.items())

    def __repr__(self) -> str:
        return f"AlgebraElement(k={self.k}, {self.to_text()})"


# ---------------------------------------------------------------------------
# traces

@dataclass
class TraceStep:
    rule: str
    window: str
    before: int
    after: int
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"rule": self.rule, "window": self.window, "before": self.before,
                "after": self.after, "detail": self.detail}


@dataclass
class ReductionTrace:
    steps: List[TraceStep] = field(default_factory=list)
    budget_used: int = 0

    def add(self, step: TraceStep) -> None:
        self.steps.append(step)

    def extend(self, other: "ReductionTrace") -> None:
        self.steps.extend(other.steps)
        self.budget_used += other.budget_used

    def to_json(self) -> dict:
        return {"steps": [s.to_json() for s in self.steps], "budget_used": self.budget_used}


# ---------------------------------------------------------------------------
# the characteristic relation on a single power

def power_expansion(k: int, n: int, lo: int) -> Dict[int, LaurentPoly]:
    """s^n as a combination of s^lo .. s^(lo+k-1) in u1 (exact, over R_k)."""
    vec = _power_vector(k, n, lo)
    return {lo + i: c for i, c in enumerate(vec) if c}


@lru_cache(maxsize=None)
def _power_vector(k: int, n: int, lo: int) -> Tuple[LaurentPoly, ...]:
    dom = SymbolicCoeffs(k)
    return tuple(_power_vector_dom(dom, n, lo))


def _power_vector_dom(dom, n: int, lo: int) -> list:
    k = dom.k
    v = [dom.zero] * k
    if lo <= n < lo + k:
        v[n - lo] = dom.one
        return v
    v = [dom.zero] * k
    if n >= lo + k:
        v[k - 1] = dom.one
        cur = lo + k - 1
        while cur < n:  # multiply by s
            top = v[k - 1]
            v = [dom.zero] + v[:-1]
            v = [v[j] + top * dom.a[j] for j in range(k)]
            cur += 1
    else:
        v[0] = dom.one
        cur = lo
        while cur > n:  # multiply by s^-1: s^(lo-1) = a0^-1 (s^(lo-1+k) - sum_{j>=1} a_j s^(lo-1+j))
            bottom = v[0]
            v = v[1:] + [dom.zero]
            w = [-(bottom * dom.a[j + 1]) for j in range(k - 1)] + [bottom]
            v = [v[j] + w[j] * dom.a0_inv for j in range(k)]
            cur -= 1
    if not dom.exact:
        v = [x % dom.p for x in v]
    return v


# ---------------------------------------------------------------------------
# named word rules

Match = Tuple[int, int]  # (start syllable index, number of syllables consumed)


@dataclass(frozen=True)
class RewriteRule:
    name: str
    find: Callable[[BraidWord, int], List[Tuple[int, int, object]]]
    replace: Callable[[BraidWord, int, int, object, int], Dict[BraidWord, LaurentPoly]]
    description: str


def _splice(w: BraidWord, start: int, length: int, middle: Iterable[Tuple[int, int]]) -> BraidWord:
    syl = w.syllables
    return BraidWord(syl[:start] + tuple(middle) + syl[start + length:])


def _find_power_down(w: BraidWord, k: int):
    hi = WINDOWS[k][-1]
    return [(i, 1, None) for i, (g, x) in enumerate(w.syllables) if x > hi]


def _find_power_up(w: BraidWord, k: int):
    lo = WINDOWS[k][0]
    return [(i, 1, None) for i, (g, x) in enumerate(w.syllables) if x < lo]


def _replace_power(w: BraidWord, start: int, length: int, _data, k: int):
    g, n = w.syllables[start]
    lo = n - k if n > 0 else n + 1
    # one application of the relation: s^n in terms of the k powers just below/above it
    out: Dict[BraidWord, LaurentPoly] = {}
    for y, c in power_expansion(k, n, lo).items():
        nw = _splice(w, start, 1, [(g, y)])
        out[nw] = out[nw] + c if nw in out else c
    return out


def _find_conjugate(w: BraidWord, k: int):
    syl = w.syllables
    out = []
    for i in range(len(syl) - 2):
        (g1, x1), (g2, m), (g3, x3) = syl[i:i + 3]
        if g1 == g3 and x1 == 1 and x3 == -1:
            out.append((i, 3, None))
    return out


def _replace_conjugate(w: BraidWord, start: int, length: int, _data, k: int):
    g, m = w.syllables[start + 1]
    h = w.syllables[start][0]
    return {_splice(w, start, 3, [(g, -1), (h, m), (g, 1)]): LaurentPoly.one(k)}


def _find_braid_slide(w: BraidWord, k: int):
    syl = w.syllables
    out = []
    for i in range(len(syl) - 2):
        (g1, x1), (g2, x2), (g3, n) = syl[i:i + 3]
        if g1 == g3 and x1 == 1 and x2 == 1:
            out.append((i, 3, None))
    return out


def _replace_braid_slide(w: BraidWord, start: int, length: int, _data, k: int):
    h, _ = w.syllables[start]
    g, _ = w.syllables[start + 1]
    n = w.syllables[start + 2][1]
    return {_splice(w, start, 3, [(g, n), (h, 1), (g, 1)]): LaurentPoly.one(k)}


def _omega_syllables(m: int) -> Tuple[Tuple[int, int], ...]:
    return omega_power(m).syllables


def _find_central(w: BraidWord, k: int):
    syl = w.syllables
    out = []
    i = 0
    while i < len(syl):
        g, a = syl[i]
        hit = None
        if g == 1:
            for m in (1, -1, 2, -2, 3, -3, 4, -4, 5, -5):
                om = _omega_syllables(m)
                seg = syl[i + 1:i + 1 + len(om)]
                if len(seg) != len(om):
                    continue
                # the final s2-syllable of w^m may be fused with a longer s2 run
                if seg[:-1] == om[:-1] and seg[-1][0] == 2 and seg[-1][1] * om[-1][1] > 0 \
                        and abs(seg[-1][1]) >= 1:
                    hit = m
                    break
        if hit is not None:
            out.append((i, 1 + len(_omega_syllables(hit)), hit))
            i += 1 + len(_omega_syllables(hit))
        else:
            i += 1
    return out


def _replace_central(w: BraidWord, start: int, length: int, m, k: int):
    syl = w.syllables
    a = syl[start][1]
    om = _omega_syllables(m)
    last_g, last_x = syl[start + length - 1]
    rest = last_x - om[-1][1]
    middle = list(om) + [(1, a)] + ([(2, rest)] if rest else [])
    return {_splice(w, start, length, middle): LaurentPoly.one(k)}


def _find_expansion(w: BraidWord, k: int):
    # only used with explicit parameters; see apply_syllable_expansion
    return []


RULES: Dict[str, RewriteRule] = {
    "power-down": RewriteRule("power-down", _find_power_down, _replace_power,
                              "s^n above the window -> a_{k-1} s^(n-1) + ... + a_0 s^(n-k)"),
    "power-up": RewriteRule("power-up", _find_power_up, _replace_power,
                            "s^n below the window -> a0^-1 (s^(n+k) - a_{k-1} s^(n+k-1) - ... - a_1 s^(n+1))"),
    "conjugate-power": RewriteRule("conjugate-power", _find_conjugate, _replace_conjugate,
                                   "s_i s_j^m s_i^-1 -> s_j^-1 s_i^m s_j"),
    "braid-slide": RewriteRule("braid-slide", _find_braid_slide, _replace_braid_slide,
                               "s_i s_j s_i^n -> s_j^n s_i s_j"),
    "central-slide": RewriteRule("central-slide", _find_central, _replace_central,
                                 "s1^a w^m -> w^m s1^a  (w = s2 s1^2 s2)"),
}


def apply_rule(rule: RewriteRule | str, e: AlgebraElement) -> Tuple[AlgebraElement, ReductionTrace]:
    """Replace the leftmost non-overlapping matches of ``rule`` once in every word of ``e``.

    Each match is rewritten as a segment on its own and the pieces are then
    concatenated, so free reduction at the seams cannot disturb other matches.
    """
    if isinstance(rule, str):
        rule = RULES[rule]
    k = e.k
    trace = ReductionTrace()
    out: Dict[BraidWord, LaurentPoly] = {}

    def put(w, c):
        if w in out:
            out[w] = out[w] + c
        else:
            out[w] = c

    for w, c in e.items():
        chosen = []
        end = 0
        for start, length, data in sorted(rule.find(w, k), key=lambda t: t[0]):
            if start >= end:
                chosen.append((start, length, data))
                end = start + length
        if not chosen:
            put(w, c)
            continue
        syl = w.syllables
        pieces: List[Dict[BraidWord, LaurentPoly]] = []
        pos = 0
        for start, length, data in chosen:
            pieces.append({BraidWord(syl[pos:start]): LaurentPoly.one(k)})
            seg = BraidWord(syl[start:start + length])
            rep = rule.replace(seg, 0, length, data, k)
            pieces.append(rep)
            trace.add(TraceStep(rule.name, w.to_text(), 1, len(rep), {"start": start, "length": length}))
            trace.budget_used += 1
            pos = start + length
        pieces.append({BraidWord(syl[pos:]): LaurentPoly.one(k)})
        for combo in itertools.product(*(list(p.items()) for p in pieces)):
            nw = BraidWord(x for piece, _ in combo for x in piece.syllables)
            nc = c
            for _, pc in combo:
                nc = nc * pc
            put(nw, nc)
    return AlgebraElement(k, out), trace


def apply_syllable_expansion(e: AlgebraElement, index: int, lo: int) -> AlgebraElement:
    """Rewrite syllable ``index`` of each word via the relation on the window lo..lo+k.

    The syllable's exponent x must be lo or lo+k (the unit-coefficient ends).
    """
    k = e.k
    out = AlgebraElement.zero(k)
    for w, c in e.items():
        g, x = w.syllables[index]
        if x not in (lo, lo + k):
            raise ValueError(f"exponent {x} is not an end of the window {lo}..{lo + k}")
        terms: Dict[BraidWord, LaurentPoly] = {}
        others = [y for y in range(lo, lo + k + 1) if y != x]
        # relation: s^(lo+k) - sum a_j s^(lo+j) = 0
        if x == lo + k:
            for y in others:
                terms[_splice(w, index, 1, [(g, y)])] = LaurentPoly.var(k, y - lo)
        else:
            inv = LaurentPoly.var(k, 0, -1)
            for y in others:
                i = y - lo
                coef = inv if i == k else -(inv * LaurentPoly.var(k, i))
                terms[_splice(w, index, 1, [(g, y)])] = coef
        out = out + AlgebraElement(k, terms).scale(c)
    return out


def power_reduce(e: AlgebraElement, budget: int = STEP_BUDGET) -> AlgebraElement:
    """Bring every syllable exponent into the window of k (equal in H_k)."""
    k = e.k
    lo, hi = WINDOWS[k][0], WINDOWS[k][-1]
    out = AlgebraElement.zero(k)
    stack = list(e.items())
    steps = 0
    while stack:
        w, c = stack.pop()
        idx = next((i for i, (_, x) in enumerate(w.syllables) if x < lo or x > hi), None)
        if idx is None:
            out = out + AlgebraElement.word(k, w, c)
            continue
        steps += 1
        if steps > budget:
            raise ReductionStuck("power_reduce exceeded its step budget")
        g, n = w.syllables[idx]
        for y, cy in power_expansion(k, n, lo).items():
            stack.append((_splice(w, idx, 1, [(g, y)]), c * cy))
    return out


# ---------------------------------------------------------------------------
# the engine

@dataclass(frozen=True)
class BasisEntry:
    shape: int        # index into shapes(k)
    x: int            # left s1 exponent
    y: int            # right s1 exponent (0 for one-sided shapes)
    word: BraidWord   # public word
    internal: BraidWord


def basis_entries(k: int) -> List[BasisEntry]:
    out = []
    win = WINDOWS[k]
    for j, sh in enumerate(shapes(k)):
        for x in left_order(k, j == 0):
            rights = win if sh.two_sided else (0,)
            for y in rights:
                word = s(1, x) * sh.word * s(1, y)
                internal = s(1, x) * sh.internal_word * s(1, y)
                out.append(BasisEntry(j, x, y, word, internal))
    return out


class Engine:
    """Basis expansions of braids over one coefficient domain."""

    def __init__(self, k: int, coeffs=None, table: Optional[dict] = None, budget: int = STEP_BUDGET):
        self.k = k
        self.dom = coeffs if coeffs is not None else SymbolicCoeffs(k)
        self.win = WINDOWS[k]
        self.shapes = shapes(k)
        self.basis = basis_entries(k)
        self.rank = len(self.basis)
        self.budget = budget
        self.steps = 0
        kk = k
        # internal layout: two-sided blocks (n2, k, k) then one-sided blocks (n1, k)
        self.two_idx = {j: n for n, j in enumerate(j for j, sh in enumerate(self.shapes) if sh.two_sided)}
        self.one_idx = {j: n for n, j in enumerate(j for j, sh in enumerate(self.shapes) if not sh.two_sided)}
        self.n2, self.n1 = len(self.two_idx), len(self.one_idx)
        self.wpos = {x: i for i, x in enumerate(self.win)}
        self.flat_of: List[int] = []
        for b in self.basis:
            if b.shape in self.two_idx:
                self.flat_of.append((self.two_idx[b.shape] * kk + self.wpos[b.x]) * kk + self.wpos[b.y])
            else:
                self.flat_of.append(self.n2 * kk * kk + self.one_idx[b.shape] * kk + self.wpos[b.x])
        self.index_of_word = {b.word: i for i, b in enumerate(self.basis)}
        self._L: Dict[int, np.ndarray] = {}
        self.memo: Dict[CosetKey, Tuple[np.ndarray, np.ndarray]] = {}
        self.failed: Dict[CosetKey, Exception] = {}
        self._seed_basis()
        tab = table if table is not None else load_table(k)
        self.entries: Dict[CosetKey, dict] = {CosetKey(*e["key"]): e for e in tab["entries"]}
        self.denominators = list(tab.get("denominators", []))
        self._cols: Dict[Tuple[int, int], np.ndarray] = {}
        self._public_fix = self._build_public_fix()

    # --- blocks ---------------------------------------------------------------
    def _zero(self):
        T = np.empty((self.n2, self.k, self.k), dtype=object)
        O = np.empty((self.n1, self.k), dtype=object)
        T[...] = self.dom.zero
        O[...] = self.dom.zero
        return T, O

    def L(self, p: int) -> np.ndarray:
        """Matrix of left multiplication by s1^p on window coordinates."""
        m = self._L.get(p)
        if m is None:
            m = np.empty((self.k, self.k), dtype=object)
            for i, x in enumerate(self.win):
                m[:, i] = _power_vector_dom(self.dom, x + p, self.win[0])
            self._L[p] = m
        return m

    def shift(self, v, p: int, q: int):
        T, O = v
        if p == 0 and q == 0:
            return v
        if self.n2:
            if p:
                T = np.matmul(self.L(p), T)
            if q:
                T = np.matmul(T, self.L(q).T)
            T = self.dom.clean(T)
        if self.n1 and p + q:
            O = self.dom.clean(O @ self.L(p + q).T)
        return T, O

    def combine(self, parts):
        T, O = self._zero()
        for c, (t, o) in parts:
            T = T + c * t
            O = O + c * o
        return self.dom.clean(T), self.dom.clean(O)

    def _unit(self, shape: int):
        T, O = self._zero()
        i0 = self.wpos[0]
        if shape in self.two_idx:
            T[self.two_idx[shape], i0, i0] = self.dom.one
        else:
            O[self.one_idx[shape], i0] = self.dom.one
        return T, O

    def _seed_basis(self):
        for j, sh in enumerate(self.shapes):
            key, p, q = coset_key(braid_of(sh.internal_word))
            self.memo[key] = self.shift(self._unit(j), -p, -q)

    # --- derivations ------------------------------------------------------------
    def _terms(self, inst: dict):
        """Relation terms (coeff index, key, p, q, y) for one family-word instance."""
        exps, t, lo, zt = inst["word"], inst["t"], inst["lo"], inst["zt"]
        out = []
        for i in range(self.k + 1):
            y = lo + i
            ex = list(exps)
            ex[t] = y
            key, p, q = coset_key(braid_of(BraidWord.from_exponents(ex, first=2)))
            out.append((i, key.shifted(zt), p, q, y))
        return out

    def _deps(self, entry: dict) -> List[CosetKey]:
        if "pair" in entry:
            out = []
            for inst in entry["pair"]:
                out += [kk for _, kk, _, _, y in self._terms(inst) if y not in (inst["u"], inst["v"])]
            return out
        return [kk for _, kk, _, _, y in self._terms(entry) if y != entry["u"]]

    def _known_part(self, inst: dict, skip: Tuple[int, ...]):
        terms = self._terms(inst)
        u = next(t for t in terms if t[4] == inst["u"])
        parts = []
        for i, key, p, q, y in terms:
            if y in skip:
                continue
            parts.append((self.dom.coeff(i), self.shift(self.memo[key], p - u[2], q - u[3])))
        return u, terms, self.combine(parts)

    def _evaluate(self, key: CosetKey, entry: dict):
        if "pair" not in entry:
            u, _, K = self._known_part(entry, (entry["u"],))
            if u[1] != key:
                raise ReductionStuck(f"table entry for {key} derives {u[1]}")
            c = -self.dom.inv(self.dom.coeff(u[0]))
            return self.dom.clean(K[0] * c), self.dom.clean(K[1] * c)
        (i1, i2) = entry["pair"]
        u1, t1, K1 = self._known_part(i1, (i1["u"], i1["v"]))
        u2, t2, K2 = self._known_part(i2, (i2["u"], i2["v"]))
        v1 = next(t for t in t1 if t[4] == i1["v"])
        v2 = next(t for t in t2 if t[4] == i2["v"])
        if u1[1] != key or u2[1] != key:
            raise ReductionStuck(f"paired table entry for {key} derives {u1[1]}, {u2[1]}")
        cu1, cu2 = self.dom.coeff(u1[0]), self.dom.coeff(u2[0])
        cv1, cv2 = self.dom.coeff(v1[0]), self.dom.coeff(v2[0])
        det = cu1 * cv2 - cu2 * cv1
        inv = self.dom.inv(det)  # raises NotInRing over R_k when det is not a unit
        T = (K1[0] * cv2 - K2[0] * cv1) * (-inv)
        O = (K1[1] * cv2 - K2[1] * cv1) * (-inv)
        return self.dom.clean(T), self.dom.clean(O)

    def value(self, key: CosetKey):
        """Basis expansion of R_key z^m (internal layout)."""
        if key in self.memo:
            return self.memo[key]
        stack = [key]
        while stack:
            kk = stack[-1]
            if kk in self.memo:
                stack.pop()
                continue
            if kk in self.failed:
                raise self.failed[kk]
            entry = self.entries.get(kk)
            if entry is None:
                raise ReductionStuck(f"no derivation for coset {kk.as_list()}")
            missing = [d for d in self._deps(entry) if d not in self.memo]
            if missing:
                if len(stack) > 100000:
                    raise ReductionStuck("derivation table is cyclic")
                stack.extend(missing)
                continue
            self.steps += 1
            if self.steps > self.budget:
                raise ReductionStuck("step budget exhausted")
            try:
                self.memo[kk] = self._evaluate(kk, entry)
            except (NotInRing, ZeroDivisionError) as exc:
                self.failed[kk] = exc
                raise
            stack.pop()
        return self.memo[key]

    def braid_value(self, g: Braid):
        key, p, q = coset_key(g)
        return self.shift(self.value(key), p, q)

    # --- flat vectors -------------------------------------------------------------
    def flatten(self, v) -> np.ndarray:
        T, O = v
        flat = np.concatenate([T.reshape(-1), O.reshape(-1)])
        return flat[self.flat_of]

    def unflatten(self, vec: np.ndarray):
        T, O = self._zero()
        tf = T.reshape(-1)
        of = O.reshape(-1)
        cut = self.n2 * self.k * self.k
        for i, pos in enumerate(self.flat_of):
            if pos < cut:
                tf[pos] = vec[i]
            else:
                of[pos - cut] = vec[i]
        return T, O

    def column(self, gen: int, exp: int, j: int) -> np.ndarray:
        """Internal coordinates of s_gen^exp * basis[j] (exp = +-1)."""
        ck = (gen * exp, j)
        col = self._cols.get(ck)
        if col is None:
            b = self.basis[j]
            if gen == 1:
                col = self.flatten(self.shift(self.unflatten(self.unit_vector(j)), exp, 0))
            else:
                col = self.flatten(self.braid_value(syllable(2, exp) * braid_of(b.internal)))
            self._cols[ck] = col
        return col

    def unit_vector(self, j: int) -> np.ndarray:
        v = np.empty(self.rank, dtype=object)
        v[:] = self.dom.zero
        v[j] = self.dom.one
        return v

    def act(self, gen: int, exp: int, vec: np.ndarray) -> np.ndarray:
        """s_gen^exp * vec for a vector in internal coordinates."""
        if gen == 1:
            return self.flatten(self.shift(self.unflatten(vec), exp, 0))
        step = 1 if exp > 0 else -1
        for _ in range(abs(exp)):
            out = np.empty(self.rank, dtype=object)
            out[:] = self.dom.zero
            for j in range(self.rank):
                c = vec[j]
                if not self.dom.is_zero(c):
                    out = out + c * self.column(2, step, j)
            vec = self.dom.clean(out)
        return vec

    def reduce_braid_vector(self, w: BraidWord, trace: Optional[ReductionTrace] = None) -> np.ndarray:
        """Internal coordinates of a word; direct coset lookup, else generator actions."""
        g = braid_of(w)
        key, p, q = coset_key(g)
        if key in self.memo or key in self.entries:
            if trace is not None:
                trace.add(TraceStep("braid-normalize", w.to_text(), 1, 1,
                                    {"key": key.as_list(), "p": p, "q": q}))
            vec = self.flatten(self.shift(self.value(key), p, q))
            if trace is not None:
                trace.add(TraceStep("coset-table", str(key.as_list()), 1, int(sum(1 for c in vec if not self.dom.is_zero(c)))))
            return vec
        vec = self.unit_vector(0)
        for gen, x in reversed(w.syllables):
            vec = self.act(gen, x, vec)
            if trace is not None:
                trace.add(TraceStep("generator-action", f"s{gen}^{x}", 1,
                                    int(sum(1 for c in vec if not self.dom.is_zero(c)))))
        return vec

    # --- public coordinates -------------------------------------------------------
    def _build_public_fix(self):
        """For shapes whose public word differs from the internal one (k = 3)."""
        fixes = []
        for j, b in enumerate(self.basis):
            if b.word != b.internal:
                fixes.append(j)
        if not fixes:
            return None
        cols = {}
        for j in fixes:
            vec = self.reduce_braid_vector_internal_only(self.basis[j].word)
            u = vec[j]
            for jj in fixes:
                if jj != j and not self.dom.is_zero(vec[jj]):
                    raise ReductionStuck("public basis change is not triangular")
            cols[j] = (self.dom.inv(u), vec)
        return cols

    def reduce_braid_vector_internal_only(self, w: BraidWord) -> np.ndarray:
        vec = self.unit_vector(0)
        for gen, x in reversed(w.syllables):
            vec = self.act(gen, x, vec)
        return vec

    def to_public(self, vec: np.ndarray) -> np.ndarray:
        if self._public_fix is None:
            return vec
        out = vec.copy()
        for j, (uinv, col) in self._public_fix.items():
            c = vec[j] * uinv
            out = out - c * col
            out[j] = c
        return self.dom.clean(out)

    def to_internal(self, vec: np.ndarray) -> np.ndarray:
        if self._public_fix is None:
            return vec
        out = vec.copy()
        for j, (uinv, col) in self._public_fix.items():
            c = vec[j]
            out[j] = self.dom.zero
            out = out + c * col
        return self.dom.clean(out)


# ---------------------------------------------------------------------------
# public reduction API (exact coefficients)

_ENGINES: Dict[int, Engine] = {}


def symbolic_engine(k: int) -> Engine:
    eng = _ENGINES.get(k)
    if eng is None:
        eng = Engine(k, SymbolicCoeffs(k))
        _ENGINES[k] = eng
    return eng


def vector_to_element(eng: Engine, vec: np.ndarray) -> AlgebraElement:
    terms = {}
    for j, c in enumerate(vec):
        c = eng.dom.to_poly(c)
        if c:
            terms[eng.basis[j].word] = c
    return AlgebraElement(eng.k, terms)


def element_vector(eng: Engine, e: AlgebraElement, trace: Optional[ReductionTrace] = None) -> np.ndarray:
    """Public coordinates of ``e`` in the basis."""
    acc = np.empty(eng.rank, dtype=object)
    acc[:] = eng.dom.zero
    for w, c in e.items():
        j = eng.index_of_word.get(w)
        if j is not None:
            acc[j] = acc[j] + eng.dom.from_poly(c)
            continue
        vec = eng.to_public(eng.reduce_braid_vector(w, trace))
        acc = acc + eng.dom.from_poly(c) * vec
    return eng.dom.clean(acc)


def reduce(e: AlgebraElement, k: Optional[int] = None) -> Tuple[AlgebraElement, ReductionTrace]:
    k = k or e.k
    if e.k != k:
        raise ValueError("element lives in a different H_k")
    eng = symbolic_engine(k)
    trace = ReductionTrace()
    before = eng.steps
    try:
        vec = element_vector(eng, e, trace)
    except ReductionStuck as exc:
        exc.trace = trace
        raise
    trace.budget_used += eng.steps - before + len(trace.steps)
    return vector_to_element(eng, vec), trace


def left_mult_reduce(g: Tuple[int, int] | BraidWord, b: BraidWord, k: int) -> AlgebraElement:
    """reduce(g * b) for a generator token g = (i, +-1) and a basis word b."""
    gw = g if isinstance(g, BraidWord) else s(*g)
    return reduce(AlgebraElement.word(k, gw * b), k)[0]


def replay(e: AlgebraElement, trace: ReductionTrace) -> AlgebraElement:
    """Re-execute a trace produced by :func:`reduce` and return its output.

    Basis words pass through; every other word is rebuilt from the recorded
    coset-table lookups or generator actions, in order.
    """
    k = e.k
    eng = symbolic_engine(k)
    steps = list(trace.steps)
    pos = 0
    acc = np.empty(eng.rank, dtype=object)
    acc[:] = eng.dom.zero
    for w, c in e.items():
        j = eng.index_of_word.get(w)
        if j is not None:
            acc[j] = acc[j] + c
            continue
        st = steps[pos]
        if st.rule == "braid-normalize":
            if st.window != w.to_text():
                raise ValueError(f"trace step {pos} does not match word {w.to_text()}")
            key = CosetKey(*st.detail["key"])
            vec = eng.flatten(eng.shift(eng.value(key), st.detail["p"], st.detail["q"]))
            pos += 2
        else:
            vec = eng.unit_vector(0)
            for gen, x in reversed(w.syllables):
                st = steps[pos]
                if st.rule != "generator-action" or st.window != f"s{gen}^{x}":
                    raise ValueError(f"trace step {pos} does not match")
                vec = eng.act(gen, x, vec)
                pos += 1
        acc = acc + c * eng.to_public(vec)
    if pos != len(steps):
        raise ValueError("trace has unused steps")
    return vector_to_element(eng, acc)
