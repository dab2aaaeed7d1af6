"""Offline search for the reduction tables used by :mod:`hecke3.rewrite`.

Every braid is s1^p R s1^q z^m for a double-coset representative R (see
:mod:`hecke3.b3group`), so reducing H_k amounts to expressing each needed R z^m in
the basis.  Relations come from *family words* W = s2^x1 s1^x2 s2^x3 ...: picking
one syllable s^x of W and k+1 consecutive exponents y = lo..lo+k containing x, the
characteristic relation gives

    W[y=lo+k] - sum_j a_j W[y=lo+j] = 0.

When x sits at an end of the window its coefficient is 1 or -a0, a unit, and
W[x] z^m is determined by the other k terms.  The search is an AND-OR fixpoint
over (coset, m): a coset is solved once some relation has all its other terms
solved.  If the fixpoint stalls, pairs of relations sharing the same two unknowns
are combined; the 2x2 determinant is recorded and must be inverted later.

The output is a JSON table listing, in dependency order, one derivation per
coset needed to close the basis under left multiplication by s2 and s2^-1.
"""

from __future__ import annotations

import gzip
import itertools
import json
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Tuple

import numpy as np

from .b3group import CosetKey, braid_of, coset_key
from .braidword import s
from .coeffring import LaurentPoly
from .shapes import WINDOWS, shapes

log = logging.getLogger(__name__)

DATA_DIR = Path(__file__).with_name("data")


@dataclass(frozen=True)
class SearchConfig:
    k: int
    families: Tuple[Tuple[int, int], ...]  # (number of s2 syllables, max |exponent|)
    m_range: int = 12
    chunk: int = 100_000


DEFAULT_CONFIGS = {
    2: SearchConfig(2, ((1, 4), (2, 3))),
    3: SearchConfig(3, ((1, 6), (2, 4), (3, 3))),
    4: SearchConfig(4, ((1, 8), (2, 6), (3, 4))),
    5: SearchConfig(5, ((1, 8), (2, 6), (3, 4))),
}


# --- vectorised B3 arithmetic -----------------------------------------------

def _mm(A, B):
    return np.stack([A[:, 0] * B[:, 0] + A[:, 1] * B[:, 2], A[:, 0] * B[:, 1] + A[:, 1] * B[:, 3],
                     A[:, 2] * B[:, 0] + A[:, 3] * B[:, 2], A[:, 2] * B[:, 1] + A[:, 3] * B[:, 3]], 1)


def _gen(t: int, x):
    o = np.ones_like(x)
    z = np.zeros_like(x)
    if t % 2 == 0:  # s2 syllable
        return np.stack([o, z, -x, o], 1)
    return np.stack([o, x, z, o], 1)


def _keys(M, e):
    """Vectorised :func:`hecke3.b3group.coset_key`: returns (N,4) keys and (N,2) shifts."""
    a, b, c, d = (M[:, i].copy() for i in range(4))
    e = e.copy()
    out = np.zeros((len(e), 4), dtype=np.int64)
    sh = np.zeros((len(e), 2), dtype=np.int64)
    z0 = c == 0
    n = b[z0] * a[z0]
    out[z0, 3] = (e[z0] - n) // 6
    sh[z0, 0] = n
    nz = ~z0
    a, c, d, e = a[nz], c[nz], d[nz], e[nz]
    mu = (c < 0).astype(np.int64)
    sg = 1 - 2 * mu
    a, c, d, e = a * sg, c * sg, d * sg, e - 6 * mu
    ar, dr = np.mod(a, c), np.mod(d, c)
    i, j = (ar - a) // c, (dr - d) // c
    out[nz] = np.stack([c, ar, dr, mu + 2 * np.floor_divide(e + i + j, 12)], 1)
    sh[nz] = np.stack([-i, -j], 1)
    return out, sh


def relation_rows(k: int, L: int, B: int, chunk: int = 100_000):
    """All relation instances from family words with L s2-syllables, |exponents| <= B.

    Returns (keys (N,k+1,4), shifts (N,k+1,2), origin (N,8)).  Term 0 is the family
    word itself; term j >= 1 uses exponent x + dir*j.  Key m values are relative to
    term 0; origin = (5 padded exponents, t, dir, m of term 0).
    """
    ex = [x for x in range(-B, B + 1) if x]
    n = 2 * L - 1
    it = itertools.product(ex, repeat=n)
    K, SH, O = [], [], []
    while True:
        block = list(itertools.islice(it, chunk))
        if not block:
            break
        E = np.array(block, dtype=np.int64)
        N = len(E)
        syl = [_gen(t, E[:, t]) for t in range(n)]
        I = np.tile(np.array([1, 0, 0, 1], dtype=np.int64), (N, 1))
        pre = [I]
        for t in range(n):
            pre.append(_mm(pre[-1], syl[t]))
        suf = [I] * (n + 1)
        for t in range(n - 1, -1, -1):
            suf[t] = _mm(syl[t], suf[t + 1])
        etot = E.sum(1)
        k0, s0 = _keys(pre[n], etot)
        pad = np.zeros((N, 5), dtype=np.int64)
        pad[:, :n] = E
        for t in range(n):
            x = E[:, t]
            for d in (-1, 1):
                keys = [k0]
                shifts = [s0]
                for j in range(1, k + 1):
                    y = x + d * j
                    kk, ss = _keys(_mm(_mm(pre[t], _gen(t, y)), suf[t + 1]), etot - x + y)
                    keys.append(kk)
                    shifts.append(ss)
                kk = np.stack(keys, 1)
                kk[:, :, 3] -= k0[:, None, 3]
                origin = np.concatenate([pad, np.full((N, 1), t), np.full((N, 1), d), k0[:, 3:4]], 1)
                K.append(kk)
                SH.append(np.stack(shifts, 1))
                O.append(origin)
    keys = np.concatenate(K)
    shifts = np.concatenate(SH)
    origin = np.concatenate(O)
    flat = np.concatenate([keys.reshape(len(keys), -1), shifts.reshape(len(keys), -1)], 1)
    _, idx = np.unique(flat, axis=0, return_index=True)
    idx.sort()
    return keys[idx], shifts[idx], origin[idx]


# --- coefficient bookkeeping -------------------------------------------------

def term_coeff_index(k: int, j: int, d: int) -> int:
    """Position i of term j inside its window lo..lo+k (coefficient 1 if i == k else -a_i)."""
    return j if d == 1 else k - j


def coeff_poly(k: int, i: int) -> LaurentPoly:
    return LaurentPoly.one(k) if i == k else -LaurentPoly.var(k, i)


# --- the search ----------------------------------------------------------------

def basis_keys(k: int) -> List[CosetKey]:
    out = []
    for sh in shapes(k):
        key, _, _ = coset_key(braid_of(sh.internal_word))
        out.append(key)
    return out


def closure_targets(k: int) -> List[CosetKey]:
    win = WINDOWS[k]
    targets = set()
    for sh in shapes(k):
        w = sh.internal_word
        rights = win if sh.two_sided else (0,)
        for g in (s(2, 1), s(2, -1)):
            for x in win:
                for y in rights:
                    key, _, _ = coset_key(braid_of(g * s(1, x) * w * s(1, y)))
                    targets.add(key)
    return sorted(targets)


@dataclass
class SearchResult:
    k: int
    entries: List[dict]
    missing: List[CosetKey]
    denominators: List[str] = field(default_factory=list)


def search(cfg: SearchConfig) -> SearchResult:
    k, M = cfg.k, cfg.m_range
    parts = [relation_rows(k, L, B, cfg.chunk) for L, B in cfg.families]
    keys = np.concatenate([p[0] for p in parts])
    shifts = np.concatenate([p[1] for p in parts])
    origin = np.concatenate([p[2] for p in parts])
    N = len(keys)
    log.info("k=%d: %d relation instances", k, N)

    base = basis_keys(k)
    targets = closure_targets(k)
    allshapes = np.unique(np.concatenate([keys[:, :, :3].reshape(-1, 3),
                                          np.array([[b.c, b.a, b.d] for b in base + targets])]), axis=0)
    sid_of = {tuple(r): i for i, r in enumerate(allshapes.tolist())}
    lookup = np.array([sid_of[tuple(r)] for r in keys[:, :, :3].reshape(-1, 3).tolist()], dtype=np.int64)
    sid = lookup.reshape(N, k + 1)
    rm = keys[:, :, 3]
    W = 2 * M + 1
    solved = np.zeros((len(allshapes), W), dtype=bool)
    for b in base:
        solved[sid_of[b.shape], b.m + M] = True
    how: Dict[Tuple[int, int], tuple] = {}   # (shape id, m) -> ("row", row) | ("pair", ...)
    order: List[Tuple[int, int]] = []

    def is_solved(ids, cols):
        inr = (cols >= 0) & (cols < W)
        return np.where(inr, solved[ids, np.clip(cols, 0, W - 1)], False)

    def missing_targets():
        return [t for t in targets if not (-M <= t.m <= M and solved[sid_of[t.shape], t.m + M])]

    def fixpoint():
        while True:
            new = 0
            for m in range(-M, M + 1):
                cols = rm + m + M
                ok = is_solved(sid[:, 1:], cols[:, 1:]).all(1) & ~solved[sid[:, 0], m + M]
                rows = np.nonzero(ok)[0]
                if len(rows) == 0:
                    continue
                _, first = np.unique(sid[rows, 0], return_index=True)
                for r in rows[first].tolist():
                    node = (int(sid[r, 0]), m)
                    how[node] = ("row", r)
                    order.append(node)
                    solved[node[0], m + M] = True
                    new += 1
            if new == 0:
                return

    fixpoint()
    dets: Dict[Tuple[int, int], LaurentPoly] = {}
    while missing_targets():
        added = _pair_step(k, M, sid, rm, shifts, origin, allshapes[:, 0], solved, is_solved, how, order, dets)
        log.info("k=%d: pair step solved %d cosets; %d targets missing", k, added, len(missing_targets()))
        if not added:
            break
        fixpoint()

    missing = missing_targets()
    entries = _extract(k, M, allshapes, sid_of, sid, rm, origin, how, order, targets, dets)
    denoms = sorted({e["det"] for e in entries if "det" in e})
    return SearchResult(k, entries, missing, denoms)


def _pair_step(k, M, sid, rm, shifts, origin, shape_c, solved, is_solved, how, order, dets) -> int:
    """Solve stalled cosets from two relations sharing the same pair of unknowns."""
    groups: Dict[tuple, list] = defaultdict(list)
    for m in range(-M, M + 1):
        cols = rm + m + M
        uns = ~is_solved(sid, cols)
        rows = np.nonzero(uns.sum(1) == 2)[0]
        for r in rows.tolist():
            iu, iv = np.nonzero(uns[r])[0].tolist()
            for a, b in ((iu, iv), (iv, iu)):
                u_m = int(rm[r, a]) + m
                v_m = int(rm[r, b]) + m
                if not (-M <= u_m <= M) or (sid[r, a] == sid[r, b] and u_m == v_m):
                    continue
                # multiply by s1 powers so the unknown a appears as U itself
                d = int(origin[r, 6])
                rp = int(shifts[r, b, 0] - shifts[r, a, 0])
                rq = int(shifts[r, b, 1] - shifts[r, a, 1])
                if shape_c[sid[r, b]] == 0:
                    rp, rq = rp + rq, 0
                ca, cb = term_coeff_index(k, a, d), term_coeff_index(k, b, d)
                gkey = (int(sid[r, a]), u_m, int(sid[r, b]), v_m, rp, rq)
                groups[gkey].append((r, m, a, b, ca, cb))
    chosen: Dict[Tuple[int, int], tuple] = {}
    for gkey, items in sorted(groups.items()):
        node = (gkey[0], gkey[1])
        if node in chosen or solved[node[0], node[1] + M]:
            continue
        best = None
        for (i1, i2) in itertools.combinations(range(len(items)), 2):
            _, _, _, _, cu1, cv1 = items[i1]
            _, _, _, _, cu2, cv2 = items[i2]
            det = coeff_poly(k, cu1) * coeff_poly(k, cv2) - coeff_poly(k, cu2) * coeff_poly(k, cv1)
            if det.is_zero():
                continue
            score = (0 if det.is_unit() else 1, len(det), det.to_text())
            if best is None or score < best[0]:
                best = (score, items[i1], items[i2], det)
            if det.is_unit():
                break
        if best is not None:
            chosen[node] = (best[1], best[2], gkey, best[3])
    for node, (it1, it2, gkey, det) in chosen.items():
        how[node] = ("pair", it1, it2, (gkey[2], gkey[3]))
        dets[node] = det
        order.append(node)
        solved[node[0], node[1] + M] = True
    return len(chosen)


def _extract(k, M, allshapes, sid_of, sid, rm, origin, how, order, targets, dets) -> List[dict]:
    # dependencies of each solved node
    deps: Dict[Tuple[int, int], List[Tuple[int, int]]] = {}

    def inst_nodes(r, m, skip):
        return [(int(sid[r, j]), int(rm[r, j]) + m) for j in range(k + 1) if j not in skip]

    for node, h in how.items():
        if h[0] == "row":
            deps[node] = inst_nodes(h[1], node[1], {0})
        else:
            _, it1, it2, vnode = h
            deps[node] = inst_nodes(it1[0], it1[1], {it1[2], it1[3]}) + inst_nodes(it2[0], it2[1], {it2[2], it2[3]})
    need = set()
    stack = [(sid_of[t.shape], t.m) for t in targets]
    while stack:
        node = stack.pop()
        if node in need or node not in how:
            continue
        need.add(node)
        stack.extend(deps[node])
    entries = []
    shp = allshapes.tolist()

    def inst(r, m, u_term, v_term=None):
        L2 = int(np.count_nonzero(origin[r, :5]))
        exps = origin[r, :L2].tolist()
        t, d, m0 = int(origin[r, 5]), int(origin[r, 6]), int(origin[r, 7])
        x = exps[t]
        lo = x if d == 1 else x - k
        out = {"word": exps, "t": t, "lo": lo, "zt": m - m0, "u": x + d * u_term}
        if v_term is not None:
            out["v"] = x + d * v_term
        return out

    for node in order:
        if node not in need:
            continue
        c, a, d_ = shp[node[0]]
        h = how[node]
        e = {"key": [c, a, d_, node[1]]}
        if h[0] == "row":
            e.update(inst(h[1], node[1], 0))
        else:
            _, it1, it2, vnode = h
            e["pair"] = [inst(it1[0], it1[1], it1[2], it1[3]), inst(it2[0], it2[1], it2[2], it2[3])]
            vc, va, vd = shp[vnode[0]]
            e["other"] = [vc, va, vd, vnode[1]]
            e["det"] = dets[node].to_text()
        entries.append(e)
    return entries


def build_table(k: int, cfg: SearchConfig | None = None) -> SearchResult:
    return search(cfg or DEFAULT_CONFIGS[k])


def table_path(k: int) -> Path:
    return DATA_DIR / f"rules_k{k}.json.gz"


def write_table(res: SearchResult, path: Path | None = None) -> Path:
    path = path or table_path(res.k)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {"k": res.k, "entries": res.entries, "denominators": res.denominators,
               "missing": [m.as_list() for m in res.missing]}
    raw = json.dumps(payload, separators=(",", ":"), sort_keys=True).encode()
    with open(path, "wb") as fh, gzip.GzipFile(fileobj=fh, mode="wb", mtime=0) as gz:
        gz.write(raw)  # fixed mtime keeps the file byte-stable across rebuilds
    return path


def load_table(k: int) -> dict:
    with gzip.open(table_path(k), "rt") as fh:
        return json.load(fh)
