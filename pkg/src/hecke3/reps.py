"""Irreducible representations of B3 of dimension k <= 5.

A rep is a pair (A, B) = (image of s1, image of s2) with ABA = BAB and both
matrices having spectrum lambda_1..lambda_k.  This module builds the explicit
families for k = 2, 3, 4, evaluates the irreducibility criteria, and provides
two independent irreducibility oracles: the commutant dimension and the
dimension of the algebra generated by A and B (Burnside: irreducible over the
algebraic closure iff that dimension is k^2).

Matrices are lists of rows whose entries live in one of the fields of
``hecke3.fields``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .fields import (CC, QQ, CCField, FieldError, RootElem, RootField, complex_root,
                     field_from_json, gaussian_rationals, rational_root)

Matrix = List[List[Any]]

VERDICTS = ("IRREDUCIBLE_EXISTS", "CRITERION_FAILS", "UNDEFINED_DENOMINATOR", "NEEDS_MATRICES")
SVD_RTOL = 1e-8


class RepError(ValueError):
    pass


class UndefinedDenominator(RepError):
    def __init__(self, expr: str):
        super().__init__(f"UNDEFINED_DENOMINATOR: {expr} vanishes")
        self.expr = expr


class BraidRelationFails(RepError):
    pass


class EigenvalueMismatch(RepError):
    pass


class NotScalar(RepError):
    pass


class SingularConjugator(RepError):
    pass


class CriterionZero(RepError):
    pass


# ---------------------------------------------------------------------------
# matrix helpers over a field F

def eye(F, n: int) -> Matrix:
    return [[F.one if i == j else F.zero for j in range(n)] for i in range(n)]


def mat_mul(X: Matrix, Y: Matrix) -> Matrix:
    n, m, q = len(X), len(Y), len(Y[0])
    out = []
    for i in range(n):
        row = X[i]
        out.append([sum((row[l] * Y[l][j] for l in range(1, m)), row[0] * Y[0][j]) for j in range(q)])
    return out


def mat_sub(X: Matrix, Y: Matrix) -> Matrix:
    return [[a - b for a, b in zip(r, s)] for r, s in zip(X, Y)]


def mat_scale(X: Matrix, c) -> Matrix:
    return [[a * c for a in r] for r in X]


def mat_pow(X: Matrix, e: int, F) -> Matrix:
    out = eye(F, len(X))
    for _ in range(e):
        out = mat_mul(out, X)
    return out


def _norm(F, X: Matrix) -> float:
    if F.exact:
        return 1.0
    return max(1.0, max(abs(a) for r in X for a in r))


def is_zero_matrix(F, X: Matrix, scale: float = 1.0) -> bool:
    if F.exact:
        return all(F.is_zero(a) for r in X for a in r)
    return all(F.is_zero(a, scale) for r in X for a in r)


def mat_equal(F, X: Matrix, Y: Matrix) -> bool:
    return is_zero_matrix(F, mat_sub(X, Y), max(_norm(F, X), _norm(F, Y)))


def rank_exact(F, rows: List[List[Any]]) -> int:
    rows = [list(r) for r in rows]
    if not rows:
        return 0
    ncols = len(rows[0])
    rank = 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if not F.is_zero(rows[i][col])), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = F.one / rows[rank][col]
        prow = [a * inv for a in rows[rank]]
        rows[rank] = prow
        for i in range(len(rows)):
            if i != rank and not F.is_zero(rows[i][col]):
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], prow)]
        rank += 1
        if rank == len(rows):
            break
    return rank


def rank_float(rows: List[List[Any]]) -> int:
    M = np.array(rows, dtype=complex)
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > SVD_RTOL * s[0]))


def rank(F, rows) -> int:
    return rank_exact(F, rows) if F.exact else rank_float(rows)


def nullspace(F, rows: List[List[Any]], ncols: int) -> List[List[Any]]:
    """Basis of {x : rows x = 0} (exact fields)."""
    R = [list(r) for r in rows]
    pivots = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(R)) if not F.is_zero(R[i][col])), None)
        if piv is None:
            continue
        R[r], R[piv] = R[piv], R[r]
        inv = F.one / R[r][col]
        R[r] = [a * inv for a in R[r]]
        for i in range(len(R)):
            if i != r and not F.is_zero(R[i][col]):
                f = R[i][col]
                R[i] = [a - f * b for a, b in zip(R[i], R[r])]
        pivots.append(col)
        r += 1
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [F.zero] * ncols
        v[fc] = F.one
        for i, pc in enumerate(pivots):
            v[pc] = -R[i][fc]
        basis.append(v)
    return basis


def inverse(F, X: Matrix) -> Matrix:
    n = len(X)
    if not F.exact:
        return np.linalg.inv(np.array(X, dtype=complex)).tolist()
    M = [list(r) + [F.one if i == j else F.zero for j in range(n)] for i, r in enumerate(X)]
    for col in range(n):
        piv = next((i for i in range(col, n) if not F.is_zero(M[i][col])), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        M[col], M[piv] = M[piv], M[col]
        inv = F.one / M[col][col]
        M[col] = [a * inv for a in M[col]]
        for i in range(n):
            if i != col and not F.is_zero(M[i][col]):
                f = M[i][col]
                M[i] = [a - f * b for a, b in zip(M[i], M[col])]
    return [r[n:] for r in M]


def determinant(F, X: Matrix):
    n = len(X)
    if not F.exact:
        return complex(np.linalg.det(np.array(X, dtype=complex)))
    M = [list(r) for r in X]
    det = F.one
    for col in range(n):
        piv = next((i for i in range(col, n) if not F.is_zero(M[i][col])), None)
        if piv is None:
            return F.zero
        if piv != col:
            M[col], M[piv] = M[piv], M[col]
            det = -det
        det = det * M[col][col]
        inv = F.one / M[col][col]
        for i in range(col + 1, n):
            if not F.is_zero(M[i][col]):
                f = M[i][col] * inv
                M[i] = [a - f * b for a, b in zip(M[i], M[col])]
    return det


def charpoly(F, X: Matrix) -> List[Any]:
    """Coefficients c_0..c_n (c_n = 1) of det(x I - X), Faddeev-LeVerrier."""
    n = len(X)
    c = [F.zero] * (n + 1)
    c[n] = F.one
    Mk = [[F.zero] * n for _ in range(n)]
    for k in range(1, n + 1):
        Mk = mat_mul(X, Mk)
        for i in range(n):
            Mk[i][i] = Mk[i][i] + c[n - k + 1]
        AM = mat_mul(X, Mk)
        tr = sum((AM[i][i] for i in range(1, n)), AM[0][0])
        c[n - k] = -tr * F(Fraction(1, k))
    return c


def poly_from_roots(F, roots: Sequence[Any]) -> List[Any]:
    c = [F.one]
    for r in roots:
        nxt = [F.zero] * (len(c) + 1)
        for i, a in enumerate(c):
            nxt[i + 1] = nxt[i + 1] + a
            nxt[i] = nxt[i] - a * r
        c = nxt
    return c


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EigenvalueSpec:
    """Eigenvalues lambda_1..lambda_k in field F, plus the adjoined root for k = 4, 5.

    ``root`` is r with r^2 = prod(lambda) for k = 4 and r~ with r~^5 = prod(lambda)
    for k = 5.  ``branch`` records how it was chosen: +1/-1 for the sign of r,
    an integer j for the complex fifth root exp(2 pi i j / 5) * principal, or
    None when the root was given explicitly.
    """

    k: int
    lams: Tuple[Any, ...]
    F: Any = QQ
    root: Any = None
    branch: Optional[int] = None

    def __post_init__(self):
        if self.k not in (2, 3, 4, 5):
            raise RepError(f"k must be in 2..5, got {self.k}")
        if len(self.lams) != self.k:
            raise RepError(f"expected {self.k} eigenvalues, got {len(self.lams)}")
        lams = tuple(self.F(x) for x in self.lams)
        object.__setattr__(self, "lams", lams)
        for i, x in enumerate(lams):
            if self.F.is_zero(x):
                raise RepError(f"eigenvalue lambda_{i + 1} is zero")
        if self.root is not None:
            r = self.F(self.root)
            object.__setattr__(self, "root", r)
            if self.k not in (4, 5):
                raise RepError("an adjoined root only makes sense for k = 4 or 5")
            e = 2 if self.k == 4 else 5
            diff = r ** e - self.det
            scale = abs(self.det) if not self.F.exact else 1.0
            if not (self.F.is_zero(diff) if self.F.exact else self.F.is_zero(diff, scale)):
                raise RepError(f"root does not satisfy root^{e} = product of eigenvalues")

    @property
    def det(self):
        out = self.F.one
        for x in self.lams:
            out = out * x
        return out

    def require_root(self):
        if self.k in (4, 5) and self.root is None:
            raise RepError(f"k = {self.k} needs the adjoined root")
        return self.root

    def scaled(self, t) -> "EigenvalueSpec":
        """lambda_i -> t lambda_i with r -> t^2 r (k = 4) or r~ -> t r~ (k = 5)."""
        t = self.F(t)
        root = None
        if self.root is not None:
            root = self.root * (t * t if self.k == 4 else t)
        return EigenvalueSpec(self.k, tuple(x * t for x in self.lams), self.F, root, self.branch)

    def to_json(self) -> Dict[str, Any]:
        d = {"k": self.k, "eigenvalues": [self.F.text(x) for x in self.lams]}
        d.update(self.F.describe())
        if self.root is not None:
            d["r"] = self.F.text(self.root)
            d["branch"] = self.branch
        return d


def _infer_field(values: Sequence[Any]):
    if any(isinstance(v, (complex, float)) for v in values):
        return CC
    for v in values:
        if isinstance(v, RootElem):
            return v.F
    return QQ


def with_root(k: int, lams: Sequence[Any], branch: int = 1, F=None) -> EigenvalueSpec:
    """EigenvalueSpec with the root adjoined automatically.

    Over Q the field is extended by the root when the product of the eigenvalues
    is not a square (k = 4) or fifth power (k = 5).  For exact k = 5 only the real
    fifth root is available, so ``branch`` must be 0; complex mode takes any branch.
    """
    F = F or _infer_field(lams)
    lams = [F(x) for x in lams]
    if k not in (4, 5):
        return EigenvalueSpec(k, tuple(lams), F)
    det = F.one
    for x in lams:
        det = det * x
    e = 2 if k == 4 else 5
    if k == 4 and branch not in (1, -1):
        raise RepError("k = 4 branch is the sign of r: +1 or -1")
    if isinstance(F, CCField):
        r = complex_root(det, 2, 0) * branch if k == 4 else complex_root(det, 5, branch)
        return EigenvalueSpec(k, tuple(lams), F, r, branch)
    if k == 5 and branch != 0:
        raise RepError("exact k = 5 only adjoins the real fifth root (branch 0); use complex mode for others")
    if F != QQ:
        raise RepError("automatic root adjunction needs rational eigenvalues; pass the root explicitly")
    rr = rational_root(det, e)
    if rr is not None:
        return EigenvalueSpec(k, tuple(lams), QQ, rr * (branch if k == 4 else 1), branch)
    G = RootField(e, det, "r")
    r = G.gen * (branch if k == 4 else 1)
    return EigenvalueSpec(k, tuple(G(x) for x in lams), G, r, branch)


# ---------------------------------------------------------------------------

@dataclass
class RepPair:
    k: int
    A: Matrix
    B: Matrix
    spec: EigenvalueSpec
    construction: str = "built-in"      # or "user-supplied"

    @property
    def F(self):
        return self.spec.F

    def __eq__(self, other) -> bool:
        if not isinstance(other, RepPair) or other.k != self.k or other.F != self.F:
            return False
        return (mat_equal(self.F, self.A, other.A) and mat_equal(self.F, self.B, other.B)
                and self.spec.lams == other.spec.lams and self.spec.root == other.spec.root)

    def to_json(self) -> Dict[str, Any]:
        F = self.F
        d = self.spec.to_json()
        if isinstance(F, CCField):
            d["field"] = "complex"
        d["A"] = [[F.text(a) for a in r] for r in self.A]
        d["B"] = [[F.text(a) for a in r] for r in self.B]
        d["construction"] = self.construction
        return d


def verify_rep(rep: RepPair) -> None:
    F, A, B = rep.F, rep.A, rep.B
    k = rep.k
    if len(A) != k or len(B) != k or any(len(r) != k for r in A + B):
        raise RepError(f"matrices must be {k}x{k}")
    if not mat_equal(F, mat_mul(mat_mul(A, B), A), mat_mul(mat_mul(B, A), B)):
        raise BraidRelationFails("ABA != BAB")
    target = poly_from_roots(F, rep.spec.lams)
    for name, M in (("A", A), ("B", B)):
        cp = charpoly(F, M)
        if not all((F.is_zero(x - y) if F.exact else F.is_zero(x - y, _norm(F, M) ** k))
                   for x, y in zip(cp, target)):
            raise EigenvalueMismatch(
                f"characteristic polynomial of {name} is {[F.text(c) for c in cp]}, "
                f"expected {[F.text(c) for c in target]} from the eigenvalues")
    # det = product of eigenvalues, all nonzero, so invertibility follows from the spectrum check


def _denominator(F, value, expr: str):
    if F.is_zero(value):
        raise UndefinedDenominator(expr)
    return value


def build_rep(spec: EigenvalueSpec) -> RepPair:
    F, k = spec.F, spec.k
    z, one = F.zero, F.one
    if k == 2:
        l1, l2 = spec.lams
        A = [[l1, l1], [z, l2]]
        B = [[l2, z], [-l2, l1]]
    elif k == 3:
        l1, l2, l3 = spec.lams
        c = l1 * l3 + l2 * l2
        A = [[l3, z, z], [c, l2, z], [l2, one, l1]]
        B = [[l1, -one, l2], [z, l2, -c], [z, z, l3]]
    elif k == 4:
        l1, l2, l3, l4 = spec.lams
        r = spec.require_root()
        _denominator(F, l1, "lambda_1")
        _denominator(F, l3, "lambda_3")
        _denominator(F, r, "r")
        al = (r - l2 * l3 - l1 * l4) / (l1 * l1)
        A = [[l1, z, z, z],
             [l1 * l1 / l3, l2, z, z],
             [l1 ** 3 / r, (l1 * l2 * l3 - l1 * r) / r, l3, z],
             [-l2, l2 * al, r * al / l1, l4]]
        B = [[l4, l3 * al, l2 * l3 * al / l1, -l2 * l3 * l3 / r],
             [z, l3, (l2 * l3 - r) / l1, l1 * l1 * l3 / r],
             [z, z, l2, l1 ** 3 / r],
             [z, z, z, l1]]
    else:
        raise RepError("no built-in matrices for k = 5; supply them with load_rep")
    rep = RepPair(k, A, B, spec, "built-in")
    verify_rep(rep)
    return rep


def _parse_entry(F, x):
    if isinstance(F, CCField):
        return F.parse(x) if isinstance(x, str) else complex(x)
    if isinstance(x, str):
        return F.parse(x)
    if isinstance(x, (int, Fraction)):
        return F(x)
    raise RepError(f"exact matrices need integer or string entries, got {x!r}")


def _triangular_diagonal(F, M: Matrix) -> Optional[List[Any]]:
    k = len(M)
    lower = all(F.is_zero(M[i][j]) for i in range(k) for j in range(i + 1, k))
    upper = all(F.is_zero(M[i][j]) for i in range(k) for j in range(i))
    if lower or upper:
        return [M[i][i] for i in range(k)]
    return None


def load_rep(k: int, matrices, eigenvalues: Optional[Sequence[Any]] = None,
             root=None) -> RepPair:
    """Read and verify a user-supplied pair.

    ``matrices`` is a path or an already-parsed dict in the matrices.json format.
    Eigenvalues come from the argument, then from the file, and finally from
    the diagonal of A when A is triangular.
    """
    d = matrices
    if not isinstance(d, dict):
        with open(matrices) as fh:
            d = json.load(fh)
    if int(d.get("k", k)) != k:
        raise RepError(f"file is for k = {d.get('k')}, expected {k}")
    F = field_from_json(d)
    try:
        A = [[_parse_entry(F, x) for x in row] for row in d["A"]]
        B = [[_parse_entry(F, x) for x in row] for row in d["B"]]
    except (KeyError, FieldError) as exc:
        raise RepError(f"malformed matrices: {exc}") from exc
    if eigenvalues is None and d.get("eigenvalues"):
        eigenvalues = d["eigenvalues"]
    if eigenvalues is None:
        eigenvalues = _triangular_diagonal(F, A)
        if eigenvalues is None:
            raise RepError("cannot infer eigenvalues from a non-triangular A; supply them")
    lams = tuple(_parse_entry(F, x) if isinstance(x, str) else F(x) for x in eigenvalues)
    if root is None and d.get("r") is not None:
        root = d["r"]
    if isinstance(root, str):
        root = _parse_entry(F, root)
    branch = d.get("branch")
    if k == 5 and root is None and F == QQ:
        det = QQ.one
        for x in lams:
            det = det * x
        root = rational_root(det, 5)     # the real fifth root, when it is rational
        branch = 0 if root is not None else None
    spec = EigenvalueSpec(k, lams, F, root, branch)
    rep = RepPair(k, A, B, spec, d.get("construction", "user-supplied"))
    verify_rep(rep)
    return rep


def save_rep(rep: RepPair, path: str, extra: Optional[Dict[str, Any]] = None) -> None:
    d = rep.to_json()
    if extra:
        d.update(extra)
    with open(path, "w") as fh:
        json.dump(d, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# criteria

@dataclass
class CriterionValue:
    k: int
    value: Any
    factors: List[Tuple[str, Any]]
    preconditions: List[Tuple[int, int, Any, bool]] = field(default_factory=list)
    F: Any = QQ

    @property
    def nonzero(self) -> bool:
        return not self._zero(self.value)

    def _zero(self, x) -> bool:
        return self.F.is_zero(x) if self.F.exact else self.F.is_zero(x, 1.0)

    @property
    def zero_factors(self) -> List[str]:
        return [name for name, v in self.factors if self._zero(v)]

    @property
    def preconditions_hold(self) -> bool:
        return all(ok for *_, ok in self.preconditions)

    def to_json(self) -> Dict[str, Any]:
        F = self.F
        d = {"value": F.text(self.value), "nonzero": self.nonzero,
             "factors": {name: F.text(v) for name, v in self.factors},
             "zero_factors": self.zero_factors}
        if self.preconditions:
            d["preconditions"] = [{"i": i, "j": j, "det_A_plus_li6_over_lj": F.text(v), "holds": ok}
                                  for i, j, v, ok in self.preconditions]
            d["preconditions_hold"] = self.preconditions_hold
        return d


_PAIRS_4 = (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2)))


def criterion(spec: EigenvalueSpec) -> CriterionValue:
    """The irreducibility criterion as an element of the EigenvalueSpec's field.

    k = 2: l1^2 - l1 l2 + l2^2.
    k = 3: (l1^2 + l2 l3)(l2^2 + l1 l3)(l3^2 + l1 l2) / (l1 l2 l3)^2.
    k = 4: 2 r prod_p (l_p^2 - r) prod_pairs (l_a l_b + l_c l_d - r) / (l1 l2 l3 l4)^4,
           with r the root used by the k = 4 matrices.
    k = 5: prod_i (r~^2 + l_i r~ + l_i^2) prod_{i != j} (r~^2 + l_i l_j), plus the
           precondition det A != -l_i^6 / l_j for all i, j.
    """
    F, k, L = spec.F, spec.k, spec.lams
    factors: List[Tuple[str, Any]] = []
    pre: List[Tuple[int, int, Any, bool]] = []
    if k == 2:
        l1, l2 = L
        factors.append(("l1^2 - l1*l2 + l2^2", l1 * l1 - l1 * l2 + l2 * l2))
        denom = F.one
    elif k == 3:
        l1, l2, l3 = L
        factors += [("l1^2 + l2*l3", l1 * l1 + l2 * l3), ("l2^2 + l1*l3", l2 * l2 + l1 * l3),
                    ("l3^2 + l1*l2", l3 * l3 + l1 * l2)]
        denom = spec.det ** 2
    elif k == 4:
        r = spec.require_root()
        factors.append(("2*r", 2 * r))
        for p in range(4):
            factors.append((f"l{p + 1}^2 - r", L[p] * L[p] - r))
        for (a, b), (c, d) in _PAIRS_4:
            factors.append((f"l{a + 1}*l{b + 1} + l{c + 1}*l{d + 1} - r", L[a] * L[b] + L[c] * L[d] - r))
        denom = spec.det ** 4
    else:
        rt = spec.require_root()
        for i in range(5):
            factors.append((f"r^2 + l{i + 1}*r + l{i + 1}^2", rt * rt + L[i] * rt + L[i] * L[i]))
        for i in range(5):
            for j in range(5):
                if i != j:
                    factors.append((f"r^2 + l{i + 1}*l{j + 1}", rt * rt + L[i] * L[j]))
        denom = F.one
        det = spec.det
        for i in range(5):
            for j in range(5):
                v = det + L[i] ** 6 / L[j]
                ok = not (F.is_zero(v) if F.exact else F.is_zero(v, abs(det)))
                pre.append((i + 1, j + 1, v, ok))
    value = F.one
    for _, v in factors:
        value = value * v
    value = value / denom
    return CriterionValue(k, value, factors, pre, F)


# ---------------------------------------------------------------------------
# irreducibility oracles

def commutant_dim(rep: RepPair) -> int:
    """dim {X : XA = AX, XB = BX}; 1 means irreducible over the algebraic closure
    only when the module is semisimple, so see also ``algebra_dim``."""
    F, k = rep.F, rep.k
    rows = []
    for M in (rep.A, rep.B):
        for i in range(k):
            for j in range(k):
                row = [F.zero] * (k * k)
                for l in range(k):
                    row[i * k + l] = row[i * k + l] + M[l][j]    # (XM)_ij
                    row[l * k + j] = row[l * k + j] - M[i][l]    # (MX)_ij
                rows.append(row)
    return k * k - rank(F, rows)


def _reduce_against(F, echelon: List[Tuple[int, List[Any]]], vec: List[Any]) -> List[Any]:
    for col, row in echelon:
        f = vec[col]
        if not F.is_zero(f):
            vec = [a - f * b for a, b in zip(vec, row)]
    return vec


def algebra_dim(rep: RepPair) -> int:
    """Dimension of the span of all words in A and B (including the identity).

    Equal to k^2 exactly when the rep is irreducible over the algebraic closure.
    """
    F, k = rep.F, rep.k
    echelon: List[Tuple[int, List[Any]]] = []   # exact: (pivot column, normalised row)
    flat: List[List[Any]] = []                  # float: accepted rows, ranked by SVD
    frontier = [eye(F, k)]
    while frontier:
        nxt = []
        for M in frontier:
            cand = [a for r in M for a in r]
            if F.exact:
                v = _reduce_against(F, echelon, cand)
                col = next((i for i, a in enumerate(v) if not F.is_zero(a)), None)
                if col is None:
                    continue
                inv = F.one / v[col]
                v = [a * inv for a in v]
                echelon = [(c, [a - r[col] * b for a, b in zip(r, v)]) for c, r in echelon]
                echelon.append((col, v))
            else:
                if rank_float(flat + [cand]) == len(flat):
                    continue
                flat.append(cand)
            nxt.append(M)
        frontier = [mat_mul(G, M) for M in nxt for G in (rep.A, rep.B)]
        if len(echelon) + len(flat) == k * k:
            break
    return len(echelon) + len(flat)


def central_scalar(rep: RepPair):
    """The scalar c with (AB)^3 = c I."""
    F = rep.F
    AB = mat_mul(rep.A, rep.B)
    Z = mat_mul(mat_mul(AB, AB), AB)
    c = Z[0][0]
    if not mat_equal(F, Z, mat_scale(eye(F, rep.k), c)):
        raise NotScalar("(AB)^3 is not a scalar matrix")
    return c


# ---------------------------------------------------------------------------
# triangular forms

def tw_conjugator(F, lams) -> Matrix:
    """The 3x3 conjugator D for the built-in k = 3 matrices."""
    l1, l2, l3 = lams
    return [[-l1 * l2 - l3 * l3, l1 * (l3 - l1), (l2 - l3) * (l3 - l1)],
            [(l2 - l1) * (l3 * l3 + l1 * l2), l1 * (2 * l2 * l1 - l1 * l1 + 2 * l1 * l3 - l3 * l2),
             (l1 - l3) * (l2 * l2 + l1 * l3)],
            [F.zero, l1 * (l1 - l3), -l3 * (l1 + l2)]]


def tw_det_formula(lams):
    l1, l2, l3 = lams
    return l1 * (l1 * l1 + l2 * l3) * (l3 * l3 + l1 * l2) ** 2


def triangular_shape(F, M: Matrix, scale: float = 1.0) -> Optional[str]:
    k = len(M)
    z = (lambda a: F.is_zero(a)) if F.exact else (lambda a: F.is_zero(a, scale))
    if all(z(M[i][j]) for i in range(k) for j in range(i + 1, k)):
        return "lower"
    if all(z(M[i][j]) for i in range(k) for j in range(i)):
        return "upper"
    return None


@dataclass
class TriangularForm:
    P: Matrix                  # conjugator; the new matrices are P^-1 A P and P^-1 B P
    A: Matrix
    B: Matrix
    det: Any
    shape_A: Optional[str]
    shape_B: Optional[str]
    diag_A: List[Any]
    diag_B: List[Any]

    @property
    def triangular(self) -> bool:
        return self.shape_A is not None and self.shape_B is not None and self.shape_A != self.shape_B

    @property
    def opposite_orders(self) -> bool:
        """Diagonal of B is the diagonal of A reversed."""
        return self.diag_B == list(reversed(self.diag_A))


@dataclass
class TubaWenzlResult:
    conjugator: TriangularForm          # via the explicit D
    det_formula: Any
    ordered: Optional[TriangularForm]   # A upper with l_1..l_k, B lower with l_k..l_1

    def to_json(self, F) -> Dict[str, Any]:
        def tf(t: TriangularForm):
            return {"P": [[F.text(a) for a in r] for r in t.P],
                    "A": [[F.text(a) for a in r] for r in t.A],
                    "B": [[F.text(a) for a in r] for r in t.B],
                    "det": F.text(t.det), "shape_A": t.shape_A, "shape_B": t.shape_B,
                    "diag_A": [F.text(a) for a in t.diag_A], "diag_B": [F.text(a) for a in t.diag_B]}
        d = {"D": tf(self.conjugator), "det_D_formula": F.text(self.det_formula),
             "convention": "conjugated matrices are D^-1 A D and D^-1 B D"}
        d["ordered"] = tf(self.ordered) if self.ordered else None
        return d


def _conjugate(rep: RepPair, P: Matrix) -> TriangularForm:
    F = rep.F
    Pi = inverse(F, P)
    A2 = mat_mul(mat_mul(Pi, rep.A), P)
    B2 = mat_mul(mat_mul(Pi, rep.B), P)
    scale = max(_norm(F, rep.A), _norm(F, rep.B))
    k = rep.k
    return TriangularForm(P, A2, B2, determinant(F, P),
                          triangular_shape(F, A2, scale), triangular_shape(F, B2, scale),
                          [A2[i][i] for i in range(k)], [B2[i][i] for i in range(k)])


def _kernel_of_product(F, M: Matrix, lams: Sequence[Any]) -> List[List[Any]]:
    k = len(M)
    P = eye(F, k)
    for lam in lams:
        P = mat_mul(P, mat_sub(M, mat_scale(eye(F, k), lam)))
    return nullspace(F, P, k)


def ordered_triangular_form(rep: RepPair) -> Optional[TriangularForm]:
    """Conjugate to A upper triangular with diagonal l_1..l_k and B lower
    triangular with diagonal l_k..l_1, when the flag intersections allow it.

    Column i of the conjugator spans V_i & W_{k+1-i}, where V_i (resp. W_m) is
    the kernel of prod_{j<=i} (A - l_j) (resp. prod_{j<=m} (B - l_j)).
    Exact fields only; returns None if some intersection is not a line.
    """
    F, k, L = rep.F, rep.k, rep.spec.lams
    if not F.exact:
        return None
    cols = []
    for i in range(1, k + 1):
        V = _kernel_of_product(F, rep.A, L[:i])
        W = _kernel_of_product(F, rep.B, L[:k + 1 - i])
        if len(V) != i or len(W) != k + 1 - i:
            return None
        # x in V & W  <=>  sum a_s V_s - sum b_t W_t = 0
        system = [[v[row] for v in V] + [-w[row] for w in W] for row in range(k)]
        sol = nullspace(F, system, len(V) + len(W))
        if len(sol) != 1:
            return None
        a = sol[0][:len(V)]
        vec = [sum((a[s] * V[s][row] for s in range(len(V))), F.zero) for row in range(k)]
        cols.append(vec)
    P = [[cols[j][i] for j in range(k)] for i in range(k)]
    if F.is_zero(determinant(F, P)):
        return None
    return _conjugate(rep, P)


def tuba_wenzl_form(rep: RepPair) -> TubaWenzlResult:
    """Triangular forms of a k = 3 rep: via the explicit conjugator D, and the
    ordered form from the eigenvector flags."""
    if rep.k != 3:
        raise RepError("tuba_wenzl_form is defined for k = 3")
    F = rep.F
    crit = criterion(rep.spec)
    if not crit.nonzero:
        raise CriterionZero(f"criterion vanishes ({', '.join(crit.zero_factors)}); D may be singular")
    D = tw_conjugator(F, rep.spec.lams)
    if F.is_zero(determinant(F, D)) if F.exact else F.is_zero(determinant(F, D), 1.0):
        raise SingularConjugator("det D = 0")
    return TubaWenzlResult(_conjugate(rep, D), tw_det_formula(rep.spec.lams), ordered_triangular_form(rep))


# ---------------------------------------------------------------------------
# classification

@dataclass
class ClassificationResult:
    k: int
    spec: EigenvalueSpec
    criterion: CriterionValue
    verdict: str
    commutant_dim: Optional[int] = None
    algebra_dim: Optional[int] = None
    rep_irreducible: Optional[bool] = None
    consistent: Optional[bool] = None
    undefined: Optional[str] = None
    notes: List[str] = field(default_factory=list)

    def to_json(self) -> Dict[str, Any]:
        d = {"k": self.k, "spec": self.spec.to_json(), "criterion": self.criterion.to_json(),
             "verdict": self.verdict, "commutant_dim": self.commutant_dim,
             "algebra_dim": self.algebra_dim, "rep_irreducible": self.rep_irreducible,
             "consistent": self.consistent, "notes": self.notes}
        if self.undefined:
            d["undefined_denominator"] = self.undefined
        return d


def classify(spec: EigenvalueSpec, rep: Optional[RepPair] = None) -> ClassificationResult:
    k = spec.k
    crit = criterion(spec)
    res = ClassificationResult(k, spec, crit, "CRITERION_FAILS")
    if rep is None and k <= 4:
        try:
            rep = build_rep(spec)
        except UndefinedDenominator as exc:
            res.verdict = "UNDEFINED_DENOMINATOR"
            res.undefined = exc.expr
            return res
    if rep is not None:
        res.commutant_dim = commutant_dim(rep)
        res.algebra_dim = algebra_dim(rep)
        res.rep_irreducible = res.algebra_dim == k * k
    if k <= 4:
        res.verdict = "IRREDUCIBLE_EXISTS" if crit.nonzero else "CRITERION_FAILS"
        if rep is not None and rep.construction == "built-in":
            # the built-in family is irreducible exactly when the criterion is nonzero
            res.consistent = res.rep_irreducible == crit.nonzero and (
                not crit.nonzero or res.commutant_dim == 1)
        if not crit.nonzero:
            res.notes.append("vanishing factors: " + ", ".join(crit.zero_factors))
        return res
    # k = 5
    if not crit.nonzero:
        res.verdict = "CRITERION_FAILS"
        res.notes.append("vanishing factors: " + ", ".join(crit.zero_factors))
    elif crit.preconditions_hold:
        res.verdict = "IRREDUCIBLE_EXISTS"
    elif rep is not None:
        res.verdict = "IRREDUCIBLE_EXISTS" if res.rep_irreducible else "NEEDS_MATRICES"
        res.notes.append("central-character precondition fails; verdict taken from the supplied matrices")
    else:
        res.verdict = "NEEDS_MATRICES"
        bad = [(i, j) for i, j, _, ok in crit.preconditions if not ok]
        res.notes.append(f"central-character precondition fails at (i, j) = {bad}")
    if rep is not None:
        res.consistent = (res.verdict == "IRREDUCIBLE_EXISTS") == bool(res.rep_irreducible) \
            if crit.preconditions_hold else None
    return res


# ---------------------------------------------------------------------------
# eigenvalue text

def parse_eigenvalues(text: str) -> Tuple[Any, List[Any]]:
    """Comma-separated eigenvalues; returns (field, values).

    Plain rationals give Q, any ``i`` switches to the Gaussian rationals, any
    decimal point switches to complex floats.
    """
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if not parts:
        raise RepError("no eigenvalues given")
    try:
        if any("." in p or "e" in p.lower() for p in parts):
            return CC, [CC.parse(p) for p in parts]
        if any("i" in p for p in parts):
            G = gaussian_rationals()
            return G, [G.parse(p) for p in parts]
        return QQ, [QQ.parse(p) for p in parts]
    except (FieldError, ValueError, ZeroDivisionError) as exc:
        raise RepError(f"malformed eigenvalues {text!r}: {exc}") from exc


def spec_from_text(k: int, eigs: str, root: Optional[str]) -> EigenvalueSpec:
    """Build an EigenvalueSpec from command-line text.

    ``root`` is ``+`` / ``-`` (sign of r for k = 4), an integer branch for k = 5
    (``0`` is the real root in exact mode), or an explicit field element.
    """
    F, lams = parse_eigenvalues(eigs)
    if len(lams) != k:
        raise RepError(f"expected {k} eigenvalues, got {len(lams)}")
    if k in (2, 3):
        return EigenvalueSpec(k, tuple(lams), F)
    if root is None:
        raise RepError(f"k = {k} needs --root")
    r = root.strip()
    if k == 4 and r in ("+", "-"):
        return with_root(k, lams, 1 if r == "+" else -1, F)
    if k == 5 and r.lstrip("+-").isdigit() and (F == CC or r == "0"):
        return with_root(k, lams, int(r), F)
    try:
        rv = F.parse(r)
    except (FieldError, ValueError) as exc:
        raise RepError(f"malformed root {root!r}: {exc}") from exc
    return EigenvalueSpec(k, tuple(lams), F, rv)
