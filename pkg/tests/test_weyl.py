"""Affine Weyl groups: admissibility, Coxeter relations, length."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from periodicflags.weyl import (
    AffineWeylElement,
    NotAdmissible,
    ball,
    compose,
    coxeter_check,
    coxeter_matrix,
    from_word,
    generator,
    generators,
    identity,
    inverse,
    length,
    node_count,
    pair_index,
    period,
    reduced_word,
)

TYPES = [("A", 2), ("A", 3), ("C", 2), ("B", 2), ("D", 3)]


@pytest.mark.parametrize("tag,n", TYPES)
def test_generators_are_involutions(tag, n):
    for g in generators(tag, n):
        assert not g.is_identity
        assert compose(g, g).is_identity


@pytest.mark.parametrize("tag,n", TYPES)
def test_coxeter_relations(tag, n):
    assert coxeter_check(tag, n)["failures"] == []


def test_coxeter_matrix_shapes():
    # printed diagrams: a cycle for A (n >= 3), double bonds at both ends
    # for C, a fork plus a double bond for B, two forks for D
    m = coxeter_matrix("A", 4)
    assert m[0][1] == m[1][2] == m[2][3] == m[3][0] == 3
    assert m[0][2] == m[1][3] == 2
    m = coxeter_matrix("C", 3)
    assert m[0][1] == m[2][3] == 4 and m[1][2] == 3
    m = coxeter_matrix("B", 3)
    assert m[0][2] == m[1][2] == 3 and m[2][3] == 4 and m[0][1] == 2
    m = coxeter_matrix("D", 4)
    assert m[0][2] == m[1][2] == 3
    assert m[2][3] == m[2][4] == 3 and m[3][4] == 2 and m[0][1] == 2


def test_infinite_dihedral_ball_growth():
    # affine A with two chains is the infinite dihedral group
    for r in range(5):
        assert len(ball("A", 2, r)) == 2 * r + 1


@pytest.mark.parametrize("tag,n", TYPES)
def test_admissibility_rejects_bad_permutations(tag, n):
    p = period(tag, n)
    with pytest.raises(NotAdmissible):
        AffineWeylElement(tag, n, tuple([0] * p))
    if tag == "A":
        # nonzero total shift
        with pytest.raises(NotAdmissible):
            AffineWeylElement(tag, n, tuple([p] + list(range(1, p))))
    else:
        # a bare transposition breaks the pairing (for these small ranks)
        perm = list(range(p))
        perm[0], perm[1] = 1, 0
        with pytest.raises(NotAdmissible):
            AffineWeylElement(tag, n, tuple(perm))


@pytest.mark.parametrize("tag,n", TYPES)
def test_pairing_preserved(tag, n):
    if tag == "A":
        pytest.skip("type A has no pairing")
    for w in ball(tag, n, 3):
        for k in range(period(tag, n)):
            assert w(pair_index(tag, n, k)) == pair_index(tag, n, w(k))


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(TYPES), st.data())
def test_group_laws(tn, data):
    tag, n = tn
    word1 = data.draw(st.lists(
        st.integers(0, node_count(tag, n) - 1), max_size=5))
    word2 = data.draw(st.lists(
        st.integers(0, node_count(tag, n) - 1), max_size=5))
    w1, w2 = from_word(tag, n, word1), from_word(tag, n, word2)
    e = identity(tag, n)
    assert compose(w1, e) == compose(e, w1) == w1
    assert compose(w1, inverse(w1)).is_identity
    assert inverse(compose(w1, w2)) == compose(inverse(w2), inverse(w1))


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(TYPES), st.data())
def test_length_of_words(tn, data):
    tag, n = tn
    word = data.draw(st.lists(
        st.integers(0, node_count(tag, n) - 1), max_size=6))
    w = from_word(tag, n, word)
    l = length(w)
    assert l <= len(word)
    assert (l - len(word)) % 2 == 0
    red = reduced_word(w)
    assert len(red) == l
    assert from_word(tag, n, red) == w
    assert length(inverse(w)) == l


@pytest.mark.parametrize("tag,n", TYPES)
def test_length_one_elements_are_generators(tag, n):
    gens = set(g.perm for g in generators(tag, n))
    for w in ball(tag, n, 1):
        if not w.is_identity:
            assert w.perm in gens
            assert length(w) == 1


@pytest.mark.parametrize("tag,n", TYPES)
def test_generator_action_periodicity(tag, n):
    p = period(tag, n)
    for g in generators(tag, n):
        for k in range(-p, 2 * p):
            assert g(k + p) == g(k) + p
