"""Regression corpus: hand-derived identities used when building the spanning sets.

Three kinds of fixture:
* chain: every word in the list is the same braid;
* coset: the first word lies in (second word) * <s1>;
* membership: the reduction of a word only uses basis words from the named shapes.
"""

import pytest

from hecke3.b3group import braid_of, equal_in_b3, s1_power_of
from hecke3.braidword import BraidWord, omega_power, parse_word, word_inverse
from hecke3.rewrite import AlgebraElement, basis_entries, reduce
from hecke3.shapes import shapes


def W(text):
    """Word with ``w^m`` allowed for powers of s2 s1^2 s2."""
    out = BraidWord()
    for tok in text.split():
        if tok.startswith("w"):
            out = out * omega_power(int(tok[2:]) if "^" in tok else 1)
        else:
            out = out * parse_word(tok)
    return out


CHAINS = {
    "quartic-inverse-square-sandwich": [
        "s2^-2 s1^-2 s2^-1", "s1^-1 s1 s2^-2 s1^-1 s1^-1 s2^-1",
        "s1^-1 s2^-1 s1^-2 s2 s1^-1 s2^-1", "s1^-1 s2^-1 s1^-3 s2^-1 s1"],
    "square-times-conjugate": ["s2^2 s1 s2^-1", "s2 s2 s1 s2^-1", "s2 s1^-1 s2 s1"],
    "double-inverse-square-sandwich": [
        "s2^-2 s1^-2 s2^-2", "s2^-2 s1^-1 s1^-1 s2^-2 s1 s1^-1",
        "s2^-1 s2^-1 s1^-1 s2 s1^-1 s1^-1 s2^-1 s1 s1^-2",
        "s2^-1 s1 s2^-1 s1^-2 s2 s1^-1 s2^-1 s1^-2"],
    # w commutes with s1, so s1 crosses w^-1 unchanged (not as s1^-1)
    "inverse-omega-slide": [
        "s2^-1 s1 s2^-2 s1^-2 s2^-1", "s2^-2 s2 s1 s2^-1 w^-1", "s2^-2 s1^-1 s2 s1 w^-1",
        "s2^-2 s1^-1 s2 w^-1 s1", "s2^-2 s1^-3 s2^-1 s1"],
    "omega-inverse-square-commutes": ["s1^-2 w^-2", "w^-2 s1^-2", "s2^-1 s1^-2 s2^-2 s1^-2 s2^-1 s1^-2"],
    "quintic-long-rewrite": [
        "s2 s1^-2 s2^-2 s1^2 s2^3 s1^2 s2", "s2 s1^-1 s1^-1 s2^-2 s1 s1 s2^3 s1^2 s2",
        "s2 s1^-1 s2^2 w^-1 s1 s2^3 s1^2 s2", "s2 s1^-1 s2^2 s1 w^-1 s2^3 s1^2 s2",
        "s2 s1^-1 s2^2 s1 s2^-1 s1^-2 s2 w", "s2 s1^-1 s2^2 s1^2 s2^-2 w s1^-1",
        "s2 s1^-1 s2^2 s1^2 s2^-1 s1^2 s2 s1^-1"],
    "quintic-second-long-rewrite": [
        "s2 s1^-2 s2^-1 s1^2 s2^3 s1^2 s2", "s2 s1^-2 s2^-1 s1^2 s2 s2^2 s1^2 s2",
        "s2 s1^-1 s2^2 s1^-1 s2^2 s1 s2 s2^-1 s1 s2", "s2 s1^-1 s2^3 s1^3 s2 s1 s1^-2"],
    "square-sandwich-via-phi": ["s2^2 s1^-1 s2^2", "s1^-1 s1 s2^2 s1^-1 s2^2"],
}

COSETS = {
    "omega-square-after-s2": ("s2 w^2", "s1 s2 s1^4 s2 s1^3 s2"),
    "fourth-power-regrouping": ("s2 s1^4 s2^2 s1^2 s2", "s2 s1^5 s1^-1 s2^2 s1 s1 s2 s1"),
}

_K4_PRIME = ["u1", "u1 s2^-1 u1", "u1 s2 u1", "u1 s2^2 u1", "u1 s2 s1^-1 s2 u1",
             "u1 s2^-1 s1 s2^-1 u1", "u1 w^-1"]
_K5_PRIME = [s.label for s in shapes(5)[:21]]

MEMBERSHIPS = {
    **{f"quartic-inverse-sandwich-m{m}": (4, f"s2^-1 s1^{m} s2^-1", _K4_PRIME) for m in range(-4, 5)},
    **{f"quartic-inverse-square-left-m{m}": (4, f"s2^-2 s1^{m} s2^-1", _K4_PRIME) for m in range(-4, 5)},
    **{f"quartic-positive-sandwich-m{m}": (4, f"s2 s1^{m} s2", _K4_PRIME + ["u1 w^1"]) for m in range(-4, 5)},
    **{f"quintic-three-syllables-{a}-{b}-{c}": (5, f"s2^{a} s1^{b} s2^{c}", _K5_PRIME)
       for a in (-2, -1, 1, 2) for b in (-2, -1, 1, 2) for c in (-2, -1, 1, 2)},
}


@pytest.mark.parametrize("name", sorted(CHAINS))
def test_chain(name):
    words = [W(t) for t in CHAINS[name]]
    for i, w in enumerate(words[1:], 1):
        assert equal_in_b3(words[0], w), f"{name}: step {i} differs"


@pytest.mark.parametrize("name", sorted(COSETS))
def test_coset(name):
    x, y = (W(t) for t in COSETS[name])
    assert s1_power_of(braid_of(word_inverse(y) * x)) is not None


@pytest.mark.parametrize("name", sorted(MEMBERSHIPS))
def test_membership(name):
    k, text, allowed = MEMBERSHIPS[name]
    labels = {s.label for s in shapes(k)}
    assert set(allowed) <= labels
    shape_of = {b.word: shapes(k)[b.shape].label for b in basis_entries(k)}
    red, _ = reduce(AlgebraElement.word(k, W(text)))
    used = {shape_of[w] for w in red.terms}
    assert used <= set(allowed), f"{text} uses {sorted(used - set(allowed))}"
