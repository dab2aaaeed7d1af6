"""Acceptance suite: one test and one printed PASS/FAIL line per criterion.

The lines are also collected in ``RESULTS`` and repeated in the terminal
summary (see conftest.py), so they survive output capture.  Running this file
directly (``python3 tests/test_acceptance.py``) prints them without pytest.
"""

from __future__ import annotations

import random
import time
from fractions import Fraction

import pytest

from eigen_points import rand_q, random_spec, zero_specs
from hecke3.braidword import BraidWord, phi_word
from hecke3.coeffring import LaurentPoly, phi_coeff
from hecke3.heckealg import enumerate_basis, verify_relations
from hecke3.reps import (algebra_dim, build_rep, central_scalar, classify, commutant_dim, criterion,
                         tuba_wenzl_form, verify_rep, with_root)
from hecke3.rewrite import RULES, AlgebraElement, apply_rule, reduce
from rep_oracle import FpEvaluator

RESULTS: dict[int, str] = {}


def report(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[n] = line
    print(line)
    assert ok, line


_CERTS: dict = {}


def certificate(k: int, mode: str, primes=3, trials: int = 5):
    """Certification reports, computed once per (k, mode, primes, trials)."""
    key = (k, mode, primes, trials)
    if key not in _CERTS:
        t0 = time.time()
        rep = verify_relations(k, mode, primes=primes, trials=trials, seed=0)
        _CERTS[key] = (rep, time.time() - t0)
    return _CERTS[key]


def _failed(rep) -> str:
    f = rep.first_failure()
    return f"first failure {f}" if f else ""


# ---------------------------------------------------------------------------

def test_criterion_01_basis_cardinalities():
    t0 = time.time()
    sizes = {k: len(enumerate_basis(k)) for k in (2, 3, 4, 5)}
    dt = time.time() - t0
    ok = sizes == {2: 6, 3: 24, 4: 96, 5: 600} and dt < 5
    report(1, ok, f"sizes {sizes} in {dt:.2f} s")


def test_criterion_02_certificate_k2_k3():
    parts, ok = [], True
    for k in (2, 3):
        rep, dt = certificate(k, "symbolic")
        ok &= rep.passed and dt < 60
        parts.append(f"k={k} {'PASS' if rep.passed else 'FAIL'} {dt:.1f} s {_failed(rep)}".strip())
    report(2, ok, "; ".join(parts))


def test_criterion_03_certificate_k4():
    rep, dt = certificate(4, "symbolic")
    report(3, rep.passed and dt < 15 * 60, f"k=4 symbolic over {rep.ring}, {len(rep.checks)} checks, {dt:.1f} s {_failed(rep)}")


@pytest.mark.slow
def test_criterion_04_certificate_k5_modp():
    rep, dt = certificate(5, "modp")
    ok = rep.passed and len(set(rep.primes)) >= 3 and rep.points_per_prime >= 5
    ok &= all(p.bit_length() == 62 for p in rep.primes)
    report(4, ok and dt < 30 * 60,
           f"k=5 mod-p over {rep.ring}, {len(rep.primes)} primes x {rep.points_per_prime} points, "
           f"{dt:.0f} s {_failed(rep)}")


def test_criterion_05_rule_soundness():
    from test_rewrite import matching_inputs
    total, bad = 0, []
    for k in (2, 3, 4, 5):
        ev = FpEvaluator(k, seed=500 + k)
        for i, rule in enumerate(sorted(RULES)):
            inputs = matching_inputs(rule, k, 200, seed=1000 * k + i)
            for w in inputs:
                rhs, trace = apply_rule(rule, AlgebraElement.word(k, w))
                total += 1
                if not trace.steps or not (ev.element(rhs) == ev.word(w)).all():
                    bad.append((rule, k, w.to_text()))
    report(5, not bad, f"{len(RULES)} rules x k=2..5 x 200 inputs = {total} evaluations, {len(bad)} disagreements")


def test_criterion_06_regression_corpus():
    import test_regressions as reg
    names, failed = [], []
    for group, fn in ((reg.CHAINS, reg.test_chain), (reg.COSETS, reg.test_coset),
                      (reg.MEMBERSHIPS, reg.test_membership)):
        for name in sorted(group):
            names.append(name)
            try:
                fn(name)
            except AssertionError:
                failed.append(name)
    report(6, not failed, f"{len(names) - len(failed)}/{len(names)} fixtures"
           + (f"; failed {failed}" if failed else ""))


def test_criterion_07_phi_invariants():
    rng = random.Random(7)
    n, bad = 1000, 0
    for _ in range(n):
        k = rng.choice((2, 3, 4, 5))
        terms = {}
        for _ in range(rng.randint(0, 4)):
            e = (rng.randint(-3, 3),) + tuple(rng.randint(0, 3) for _ in range(k - 1))
            terms[e] = rng.randint(-5, 5)
        p = LaurentPoly(k, terms)
        if phi_coeff(phi_coeff(p)) != p:
            bad += 1
        w = BraidWord([(rng.choice((1, 2)), rng.choice((-3, -2, -1, 1, 2, 3))) for _ in range(rng.randint(0, 8))])
        if phi_word(phi_word(w)) != w:
            bad += 1
        kk = rng.choice((2, 3, 4))
        e = AlgebraElement.word(kk, BraidWord(w.syllables[:6]))
        if reduce(e.phi())[0] != reduce(reduce(e)[0].phi())[0]:
            bad += 1
    report(7, bad == 0, f"{n} coefficients, {n} words, {n} reduce-compatibility cases; {bad} violations")


def test_criterion_08_centrality():
    parts, ok = [], True
    for k in (2, 3, 4):
        c = certificate(k, "symbolic")[0].checks.get("centrality")
        ok &= bool(c and c.passed)
        parts.append(f"k={k} symbolic {'ok' if c and c.passed else 'FAIL'}")
    # reuse the criterion 4 run when it happened, else one point per prime
    key = (5, "modp", 3, 5)
    rep = _CERTS[key][0] if key in _CERTS else certificate(5, "modp", 3, 1)[0]
    c = rep.checks.get("centrality")
    ok &= bool(c and c.passed)
    parts.append(f"k=5 mod-p {'ok' if c and c.passed else 'FAIL'} ({c.detail if c else 'not run'})")
    report(8, ok, "; ".join(parts))


def test_criterion_09_representation_suite():
    n = 100
    generic_bad = []
    for k in (2, 3, 4):
        rng = random.Random(900 + k)
        for _ in range(n):
            spec = random_spec(k, rng)
            rep = build_rep(spec)
            verify_rep(rep)               # braid relation and spectrum, exact
            if commutant_dim(rep) != 1 or algebra_dim(rep) != k * k:
                generic_bad.append((k, spec.to_json()))
    zero_total, commutant_big, reducible = 0, 0, 0
    per_factor = []
    for k in (2, 3, 4):
        for label, spec in zero_specs(k, random.Random(990 + k)).items():
            rep = build_rep(spec)
            assert not criterion(spec).nonzero
            zero_total += 1
            cd, ad = commutant_dim(rep), algebra_dim(rep)
            commutant_big += cd > 1
            reducible += ad < k * k
            per_factor.append(f"k={k} [{label}] commutant {cd} algebra {ad}")
    ok = not generic_bad and commutant_big == zero_total
    detail = (f"generic: {3 * n - len(generic_bad)}/{3 * n} tuples irreducible with commutant 1; "
              f"zeroed factors: commutant > 1 at {commutant_big}/{zero_total}, "
              f"reducible (algebra dim < k^2) at {reducible}/{zero_total}")
    if commutant_big != zero_total:
        detail += ("; single-factor zeros give reducible but indecomposable modules, whose commutant "
                   "is 1 (the factor 2r of k=4 cannot vanish)")
    print("\n".join(per_factor))
    report(9, ok, detail)


def test_criterion_10_tuba_wenzl():
    rng = random.Random(10)
    n, bad = 50, []
    for _ in range(n):
        spec = random_spec(3, rng)
        tw = tuba_wenzl_form(build_rep(spec))
        D = tw.conjugator
        if not (D.triangular and D.det == tw.det_formula):
            bad.append(spec.to_json())
    report(10, not bad, f"{n - len(bad)}/{n} tuples: D^-1 A D and D^-1 B D triangular, det D = formula")


def test_criterion_11_branch_sign():
    rng = random.Random(11)
    n, bad = 50, 0
    for _ in range(n):
        lams = [rand_q(rng) for _ in range(4)]
        plus, minus = with_root(4, lams, 1), with_root(4, lams, -1)
        cp, cm = central_scalar(build_rep(plus)), central_scalar(build_rep(minus))
        if not (cp == plus.root ** 3 and cm == minus.root ** 3 and cp == -cm):
            bad += 1
    ex = with_root(4, [1, 2, 3, 5], 1)
    exact_example = central_scalar(build_rep(ex)) == 30 * ex.root
    report(11, bad == 0 and exact_example,
           f"(AB)^3 = r^3 and flips with the sign of r on {n - bad}/{n} tuples; (1,2,3,5): 30 r")


def test_criterion_12_homogeneity():
    rng = random.Random(12)
    n, bad, zeros = 100, 0, 0
    for i in range(n):
        k = (2, 3, 4, 5)[i % 4]
        spec = rng.choice(list(zero_specs(k, rng).values())) if i % 2 else random_spec(k, rng)
        t = Fraction(rng.choice((-1, 1)) * rng.randint(1, 7), rng.randint(1, 5))
        a, b = criterion(spec), criterion(spec.scaled(t))
        zeros += not a.nonzero
        if a.nonzero != b.nonzero or a.zero_factors != b.zero_factors:
            bad += 1
        if classify(spec).verdict != classify(spec.scaled(t)).verdict:
            bad += 1
    report(12, bad == 0, f"{n} (lambda, t) pairs ({zeros} on the zero locus), {bad} verdict changes")


if __name__ == "__main__":
    import sys
    failures = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                failures += 1
    sys.exit(1 if failures else 0)
