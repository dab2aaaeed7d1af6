import random
import time

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hecke3.braidword import BraidWord
from hecke3.coeffring import LaurentPoly, ModPCoeffs, random_fp_point
from hecke3.heckealg import (CHECKS, PRIMES_62, check_structure_matrices, enumerate_basis, modp_matmul,
                             structure_matrices, verify_rank, verify_relations)
from hecke3.shapes import RANKS
from rep_oracle import FpEvaluator


def test_basis_counts_and_time():
    t0 = time.time()
    sizes = {k: len(enumerate_basis(k)) for k in (2, 3, 4, 5)}
    assert sizes == {2: 6, 3: 24, 4: 96, 5: 600}
    assert time.time() - t0 < 5


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_basis_is_deterministic(k):
    a, b = enumerate_basis(k, seed=7), enumerate_basis(k, seed=7)
    assert a.to_json() == b.to_json()
    assert a.words[0].is_identity()
    assert len(set(a.words)) == RANKS[k]


@pytest.mark.parametrize("k", [2, 3, 4])
def test_symbolic_certificate_passes(k):
    rep = verify_relations(k, "symbolic")
    assert rep.passed, rep.first_failure()
    assert set(rep.checks) == set(CHECKS)
    assert rep.to_json()["verdict"] == "PASS"


def test_modp_certificate_k3():
    rep = verify_relations(3, "modp", primes=3, trials=2, seed=1)
    assert rep.passed, rep.first_failure()
    assert len(set(rep.primes)) == 3
    assert all(p.bit_length() == 62 for p in rep.primes)


@pytest.mark.parametrize("gen", ["s1", "s2", "s1^-1"])
def test_corrupted_matrix_is_rejected(gen):
    mats = structure_matrices(3)
    bad = mats[gen]
    bad.data = bad.data.copy()
    bad.data[5, 7] = bad.data[5, 7] + LaurentPoly.one(3)
    rep = check_structure_matrices(3, mats)
    assert not rep.passed
    assert rep.first_failure() is not None


def test_uncorrupted_matrices_pass_direct_check():
    rep = check_structure_matrices(3, structure_matrices(3))
    assert rep.passed, rep.first_failure()


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32), st.sampled_from(PRIMES_62[:3]))
def test_modp_matmul_matches_python(seed, p):
    rng = np.random.default_rng(seed)
    n, m, q = (int(x) for x in rng.integers(1, 9, size=3))
    A = [[int(x) for x in row] for row in rng.integers(0, p, size=(n, m), dtype=np.int64)]
    B = [[int(x) for x in row] for row in rng.integers(0, p, size=(m, q), dtype=np.int64)]
    ref = [[sum(A[i][l] * B[l][j] for l in range(m)) % p for j in range(q)] for i in range(n)]
    got = modp_matmul(np.array(A, dtype=np.int64), np.array(B, dtype=np.int64), p)
    assert got.tolist() == ref


@pytest.mark.parametrize("k", [2, 3, 4])
def test_basis_words_are_independent_mod_p(k):
    spec = random_fp_point(k, random.Random(k), PRIMES_62[0])
    assert verify_rank(k, spec) == RANKS[k]


def test_structure_matrices_agree_with_irreps():
    # column j of M_g holds the coordinates of g * b_j; check that under an F_p rep
    k = 3
    ev = FpEvaluator(k, seed=3)
    basis = enumerate_basis(k).words
    mats = structure_matrices(k, ModPCoeffs(ev.point))
    images = [ev.word(w) for w in basis]
    for gen, g in (("s1", 1), ("s2", 2)):
        G = ev.word(BraidWord([(g, 1)]))
        M = mats[gen].data
        for j in range(len(basis)):
            acc = np.zeros_like(images[0])
            for i in range(len(basis)):
                acc = (acc + int(M[i, j]) * images[i]) % ev.p
            assert (acc == (G @ images[j]) % ev.p).all()


@pytest.mark.slow
def test_k5_symbolic_closure_leaves_ring():
    rep = verify_relations(5, "symbolic")
    assert not rep.passed
    assert rep.first_failure()["check"] == "closure"


@pytest.mark.parametrize("mode", ["symbolic", "modp"])
def test_worker_processes_give_same_verdict(mode):
    serial = verify_relations(3, mode, trials=2)
    parallel = verify_relations(3, mode, trials=2, jobs=2)
    assert serial.passed and parallel.passed
    assert set(serial.checks) == set(parallel.checks)
