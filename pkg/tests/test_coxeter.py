import itertools

import pytest
from hypothesis import given, settings, strategies as st

from heckewalk.coxeter import (
    CoxeterFamily, Family, GroupElement, RankTooLargeError, apply_generator_left,
    cayley_length_oracle, compose, elements, identity, inverse, length,
    length_delta, reduced_word,
)

A4 = CoxeterFamily(Family.A, 4)
B3 = CoxeterFamily(Family.B, 3)


def from_word(fam, word):
    w = identity(fam)
    for s in reversed(word):
        w = apply_generator_left(w, s)
    return w


def test_group_orders():
    assert A4.order == 24 == len(list(elements(A4)))
    assert B3.order == 48 == len(list(elements(B3)))
    assert A4.longest_length == 6
    assert B3.longest_length == 9


@pytest.mark.parametrize("fam", [A4, B3, CoxeterFamily(Family.A, 5), CoxeterFamily(Family.B, 4)])
def test_length_matches_cayley_bfs(fam):
    for w in elements(fam):
        assert length(w) == cayley_length_oracle(w)


@pytest.mark.parametrize("fam", [A4, B3])
def test_reduced_word_is_reduced_and_spells_w(fam):
    for w in elements(fam):
        word = reduced_word(w)
        assert len(word) == length(w)
        assert from_word(fam, word) == w


@pytest.mark.parametrize("fam", [A4, B3])
def test_length_delta_is_plus_minus_one(fam):
    for w in elements(fam):
        for s in fam.generators:
            sw = apply_generator_left(w, s)
            assert length(sw) - length(w) == length_delta(w, s)


def test_coxeter_matrix():
    assert A4.coxeter_m(1, 2) == 3
    assert A4.coxeter_m(1, 3) == 2
    assert B3.coxeter_m(0, 1) == 4
    assert B3.coxeter_m(1, 2) == 3
    assert B3.coxeter_m(0, 2) == 2


def test_left_generator_swaps_positions():
    # s_1 e puts type 2 at position 1
    w = apply_generator_left(identity(A4), 1)
    assert w.position_word() == (2, 1, 3, 4)
    b = apply_generator_left(identity(B3), 0)
    assert b.position_word() == (-1, 2, 3)
    assert b(1) == -1 and b(-1) == 1


def test_inverse_and_compose():
    for a, b in itertools.product(list(elements(B3))[:12], repeat=2):
        assert compose(a, inverse(a)) == identity(B3)
        assert length(compose(a, b)) <= length(a) + length(b)
        assert length(inverse(a)) == length(a)


def test_invalid_elements_rejected():
    with pytest.raises(ValueError):
        GroupElement(A4, (1, 1, 2, 3))
    with pytest.raises(ValueError):
        GroupElement(B3, (1, -1, 2))
    with pytest.raises(ValueError):
        apply_generator_left(identity(A4), 0)


def test_oracle_refuses_large_rank():
    with pytest.raises(RankTooLargeError):
        cayley_length_oracle(identity(CoxeterFamily(Family.A, 9)))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 3), max_size=20))
def test_length_of_word_product_bounded_and_parity(word):
    fam = CoxeterFamily(Family.B, 4)
    w = from_word(fam, word)
    assert length(w) <= len(word)
    assert (len(word) - length(w)) % 2 == 0
    assert length(w) == cayley_length_oracle(w)
