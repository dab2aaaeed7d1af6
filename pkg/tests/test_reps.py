import json
import random
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from eigen_points import random_spec, rand_q, zero_specs
from hecke3.fields import CC, QQ, RootField
from hecke3.reps import (BraidRelationFails, CriterionZero, EigenvalueMismatch, EigenvalueSpec, RepError,
                         UndefinedDenominator, algebra_dim, build_rep, central_scalar, classify,
                         commutant_dim, criterion, determinant, load_rep, save_rep,
                         spec_from_text, tuba_wenzl_form, tw_conjugator, tw_det_formula, verify_rep,
                         with_root)

N_RANDOM = 20


# --- symbolic oracle: the built-in matrices with indeterminate eigenvalues ---------

def _sym_matrices(k):
    l = sp.symbols(f"l1:{k + 1}")
    if k == 2:
        l1, l2 = l
        return l, sp.Matrix([[l1, l1], [0, l2]]), sp.Matrix([[l2, 0], [-l2, l1]])
    if k == 3:
        l1, l2, l3 = l
        c = l1 * l3 + l2 ** 2
        return l, sp.Matrix([[l3, 0, 0], [c, l2, 0], [l2, 1, l1]]), sp.Matrix([[l1, -1, l2], [0, l2, -c], [0, 0, l3]])
    raise ValueError(k)


@pytest.mark.parametrize("k", [2, 3])
def test_builtin_matrices_satisfy_braid_relation_symbolically(k):
    l, A, B = _sym_matrices(k)
    assert sp.simplify(A * B * A - B * A * B) == sp.zeros(k, k)
    x = sp.Symbol("x")
    target = sp.expand(sp.prod([x - li for li in l]))
    for M in (A, B):
        assert sp.expand(M.charpoly(x).as_expr() - target) == 0


def test_k4_builtin_matrices_symbolically():
    # r is free and l4 is eliminated through r^2 = l1 l2 l3 l4
    l1, l2, l3, r = sp.symbols("l1 l2 l3 r")
    l4 = r ** 2 / (l1 * l2 * l3)
    spec_syms = (l1, l2, l3, l4)
    al = (r - l2 * l3 - l1 * l4) / l1 ** 2
    A = sp.Matrix([[l1, 0, 0, 0], [l1 ** 2 / l3, l2, 0, 0],
                   [l1 ** 3 / r, (l1 * l2 * l3 - l1 * r) / r, l3, 0],
                   [-l2, l2 * al, r * al / l1, l4]])
    B = sp.Matrix([[l4, l3 * al, l2 * l3 * al / l1, -l2 * l3 ** 2 / r],
                   [0, l3, (l2 * l3 - r) / l1, l1 ** 2 * l3 / r],
                   [0, 0, l2, l1 ** 3 / r], [0, 0, 0, l1]])
    assert (A * B * A - B * A * B).applyfunc(sp.cancel) == sp.zeros(4, 4)
    x = sp.Symbol("x")
    target = sp.prod([x - t for t in spec_syms])
    assert sp.cancel(B.charpoly(x).as_expr() - target) == 0
    assert sp.cancel(A.charpoly(x).as_expr() - target) == 0
    # the library's matrices agree with these at a rational point
    vals = {l1: 2, l2: 3, l3: 5, r: 6}
    rep = build_rep(EigenvalueSpec(4, (2, 3, 5, Fraction(36, 30)), QQ, 6))
    assert [[sp.Rational(str(a)) for a in row] for row in rep.A] == A.subs(vals).tolist()
    assert [[sp.Rational(str(a)) for a in row] for row in rep.B] == B.subs(vals).tolist()


class _SymField:
    zero = sp.Integer(0)


def test_det_of_conjugator_symbolically():
    l1, l2, l3 = sp.symbols("l1 l2 l3")
    D = sp.Matrix(tw_conjugator(_SymField, (l1, l2, l3)))
    assert sp.expand(D.det() - tw_det_formula((l1, l2, l3))) == 0


# --- examples ----------------------------------------------------------------

def test_k2_example():
    res = classify(EigenvalueSpec(2, (1, 2)))
    assert res.verdict == "IRREDUCIBLE_EXISTS"
    assert res.commutant_dim == 1 and res.algebra_dim == 4
    assert res.criterion.value == 3
    assert central_scalar(build_rep(EigenvalueSpec(2, (1, 2)))) == -8


def test_k3_all_ones():
    spec = EigenvalueSpec(3, (1, 1, 1))
    res = classify(spec)
    assert res.verdict == "IRREDUCIBLE_EXISTS"
    assert central_scalar(build_rep(spec)) == 1


def test_k3_det_example():
    assert determinant(QQ, tw_conjugator(QQ, [QQ(1), QQ(2), QQ(3)])) == 847


def test_k5_all_ones_criterion():
    spec = with_root(5, [1] * 5, 0)
    c = criterion(spec)
    assert c.value == 3 ** 5 * 2 ** 20
    assert c.preconditions_hold
    assert classify(spec).verdict == "IRREDUCIBLE_EXISTS"


def test_k5_precondition_failure_needs_matrices():
    # det = (-2)^5 = -32 and l_4^6 / l_4 = 32
    spec = EigenvalueSpec(5, (1, 1, 1, 2, -16), QQ, -2)
    c = criterion(spec)
    assert c.nonzero and not c.preconditions_hold
    assert classify(spec).verdict == "NEEDS_MATRICES"


def _spec_with_zero_root():
    # nonzero eigenvalues force r != 0, so only a tampered spec reaches the check
    spec = EigenvalueSpec(4, (1, 1, 1, 1), QQ, 1)
    object.__setattr__(spec, "root", QQ(0))
    return spec


def test_k4_undefined_denominator():
    with pytest.raises(UndefinedDenominator):
        build_rep(_spec_with_zero_root())
    res = classify(_spec_with_zero_root())
    assert res.verdict == "UNDEFINED_DENOMINATOR" and res.undefined == "r"


def test_zero_eigenvalue_rejected():
    with pytest.raises(RepError):
        EigenvalueSpec(3, (1, 0, 2))
    with pytest.raises(RepError):
        EigenvalueSpec(4, (1, 2, 3, 5), QQ, 5)       # 5^2 != 30


# --- random tuples -----------------------------------------------------------

@pytest.mark.parametrize("k", [2, 3, 4])
def test_random_tuples_are_irreducible(k):
    rng = random.Random(1000 + k)
    for _ in range(N_RANDOM):
        spec = random_spec(k, rng)
        rep = build_rep(spec)
        verify_rep(rep)
        assert commutant_dim(rep) == 1
        assert algebra_dim(rep) == k * k


@pytest.mark.parametrize("k", [2, 3, 4])
def test_criterion_zero_gives_reducible(k):
    rng = random.Random(2000 + k)
    for _ in range(3):
        for label, spec in zero_specs(k, rng).items():
            rep = build_rep(spec)
            assert not criterion(spec).nonzero, label
            assert algebra_dim(rep) < k * k, label
            res = classify(spec)
            assert res.verdict == "CRITERION_FAILS" and res.consistent, label


def test_several_factors_vanishing_gives_larger_commutant():
    spec = EigenvalueSpec(4, (1, 1, 1, 1), QQ, 1)
    rep = build_rep(spec)
    assert len(criterion(spec).zero_factors) == 4
    assert commutant_dim(rep) == 2


@pytest.mark.parametrize("k", [2, 3, 4])
def test_central_scalar_power(k):
    # det((AB)^3) = c^k and det(AB) = prod(l)^2
    rng = random.Random(3000 + k)
    for _ in range(5):
        spec = random_spec(k, rng)
        c = central_scalar(build_rep(spec))
        assert c ** k == spec.det ** 6


def test_k4_central_scalar_is_r_cubed_and_flips():
    rng = random.Random(4)
    for _ in range(10):
        lams = [rand_q(rng) for _ in range(4)]
        plus, minus = with_root(4, lams, 1), with_root(4, lams, -1)
        cp, cm = central_scalar(build_rep(plus)), central_scalar(build_rep(minus))
        assert cp == plus.root ** 3 and cm == minus.root ** 3
        assert cp == -cm


def test_k4_example_scalar():
    spec = with_root(4, [1, 2, 3, 5], 1)
    r = spec.root
    assert central_scalar(build_rep(spec)) == 30 * r
    assert central_scalar(build_rep(with_root(4, [1, 2, 3, 5], -1))) == -30 * r


# --- triangular forms --------------------------------------------------------

def test_tuba_wenzl_random():
    rng = random.Random(5)
    for _ in range(N_RANDOM):
        spec = random_spec(3, rng)
        tw = tuba_wenzl_form(build_rep(spec))
        D = tw.conjugator
        assert D.triangular
        assert D.det == tw.det_formula
        assert D.diag_A == list(spec.lams) and D.diag_B == [spec.lams[1], spec.lams[2], spec.lams[0]]
        o = tw.ordered
        assert o is not None
        assert o.shape_A == "upper" and o.shape_B == "lower"
        assert o.diag_A == list(spec.lams) and o.opposite_orders


def test_tuba_wenzl_refuses_criterion_zero():
    spec = list(zero_specs(3, random.Random(1)).values())[0]
    with pytest.raises(CriterionZero):
        tuba_wenzl_form(build_rep(spec))


# --- homogeneity --------------------------------------------------------------

@settings(max_examples=30, deadline=None)
@given(st.sampled_from([2, 3, 4, 5]), st.integers(0, 10 ** 6), st.booleans(),
       st.fractions(min_value=-5, max_value=5, max_denominator=4).filter(bool))
def test_criterion_verdict_is_homogeneous(k, seed, zero, t):
    rng = random.Random(seed)
    spec = rng.choice(list(zero_specs(k, rng).values())) if zero else random_spec(k, rng)
    scaled = spec.scaled(t)
    assert criterion(spec).nonzero == criterion(scaled).nonzero
    assert criterion(spec).zero_factors == criterion(scaled).zero_factors


# --- user-supplied matrices -----------------------------------------------------

def test_round_trip_through_file(tmp_path):
    rep = build_rep(with_root(4, [2, 3, 5, 7], -1))
    path = tmp_path / "m.json"
    save_rep(rep, str(path))
    again = load_rep(4, str(path))
    assert again == rep


def test_round_trip_exact_extension(tmp_path):
    spec = list(zero_specs(4, random.Random(2)).values())[-1]
    rep = build_rep(spec)
    path = tmp_path / "m.json"
    save_rep(rep, str(path))
    assert load_rep(4, str(path)) == rep


def test_swapped_matrices_fail_braid_relation():
    rep = build_rep(EigenvalueSpec(3, (2, 3, 5)))
    d = rep.to_json()
    d["B"] = [row[::-1] for row in d["B"]]
    with pytest.raises(BraidRelationFails):
        load_rep(3, d)


def test_wrong_eigenvalues_rejected():
    rep = build_rep(EigenvalueSpec(3, (2, 3, 5)))
    with pytest.raises(EigenvalueMismatch):
        load_rep(3, rep.to_json(), eigenvalues=[2, 3, 7])


def test_identity_pair_is_accepted_and_reducible():
    d = {"k": 2, "field": "exact", "A": [[1, 0], [0, 1]], "B": [[1, 0], [0, 1]]}
    rep = load_rep(2, d)
    assert algebra_dim(rep) == 1 and commutant_dim(rep) == 4
    res = classify(rep.spec, rep)
    assert res.rep_irreducible is False


def test_eigenvalues_inferred_from_triangular_a():
    rep = build_rep(EigenvalueSpec(3, (2, 3, 5)))
    d = rep.to_json()
    del d["eigenvalues"]
    assert load_rep(3, d).spec.lams == (QQ(5), QQ(3), QQ(2))


def test_non_triangular_without_eigenvalues():
    d = {"k": 2, "field": "exact", "A": [[0, 1], [1, 0]], "B": [[0, 1], [1, 0]]}
    with pytest.raises(RepError):
        load_rep(2, d)


# --- text input and float mode ----------------------------------------------------

def test_spec_from_text_variants():
    assert spec_from_text(3, "1,2,3", None).F == QQ
    assert isinstance(spec_from_text(2, "1+i,2", None).F, RootField)
    assert spec_from_text(2, "1.5,2", None).F == CC
    s4 = spec_from_text(4, "1,2,3,5", "-")
    assert s4.branch == -1
    with pytest.raises(RepError):
        spec_from_text(4, "1,2,3,5", None)
    with pytest.raises(RepError):
        spec_from_text(3, "1,2", None)
    with pytest.raises(RepError):
        spec_from_text(3, "1,x,2", None)


def test_complex_mode_matches_exact():
    rng = random.Random(6)
    for k in (2, 3, 4):
        for _ in range(5):
            lams = [rand_q(rng) for _ in range(k)]
            branch = rng.choice((1, -1))
            exact = with_root(k, lams, branch) if k == 4 else EigenvalueSpec(k, tuple(lams))
            cspec = with_root(k, [complex(x) for x in lams], branch, CC) if k == 4 else \
                EigenvalueSpec(k, tuple(complex(x) for x in lams), CC)
            rep = build_rep(cspec)
            got, want = classify(cspec), classify(exact)
            assert got.verdict == want.verdict
            assert (got.commutant_dim, got.algebra_dim) == (want.commutant_dim, want.algebra_dim)
            c = central_scalar(rep)
            expected = cspec.root ** 3 if k == 4 else complex(central_scalar(build_rep(exact)))
            assert abs(c - expected) < 1e-9 * abs(expected)


def test_complex_k5_branches():
    for j in range(5):
        spec = with_root(5, [1.0, 2.0, 3.0, 4.0, 5.0], j, CC)
        assert abs(spec.root ** 5 - 120) < 1e-9
        assert classify(spec).verdict in ("IRREDUCIBLE_EXISTS", "CRITERION_FAILS", "NEEDS_MATRICES")


def test_json_output_is_serialisable():
    for spec in (EigenvalueSpec(2, (1, 2)), with_root(4, [2, 3, 5, 7], 1),
                 list(zero_specs(2, random.Random(0)).values())[0]):
        json.dumps(classify(spec).to_json())
    tw = tuba_wenzl_form(build_rep(EigenvalueSpec(3, (1, 2, 3))))
    json.dumps(tw.to_json(QQ))
