import random

import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import FINITE_REPS, exponent_vector, free_reduce_ref, random_word, z2_least_word

from grank.formats import load_corpus
from grank.rewrite import (
    FiniteGroup,
    FreeGroupOracle,
    KBLimits,
    RewritingOracle,
    element_order,
    geodesic_length,
    knuth_bendix,
    normal_form,
    oracle_for,
)
from grank.words import Alphabet, Word, presentation

AB = Alphabet.of("ab")


def test_free_group_system_is_the_cancellation_rules():
    rws = knuth_bendix(presentation("ab"))
    assert rws.confluent
    assert sorted((AB.format(r.lhs), AB.format(r.rhs)) for r in rws.rules) == sorted(
        [("aA", "1"), ("Aa", "1"), ("bB", "1"), ("Bb", "1")]
    )


def test_cyclic_of_order_three():
    rws = knuth_bendix(presentation("a", "aaa"))
    assert rws.confluent
    o = RewritingOracle(rws)
    assert sorted(map(AB.format, o.enumerate_ball(5))) == sorted(["1", "a", "A"])
    assert normal_form(rws, AB.parse("aaaa")) == AB.parse("a")


def test_free_abelian_ball_sizes():
    o = oracle_for(presentation("ab", "abAB"))
    assert o is not None
    for r in range(6):
        expected = sum(1 for i in range(-r, r + 1) for j in range(-r, r + 1) if abs(i) + abs(j) <= r)
        assert sum(1 for _ in o.enumerate_ball(r)) == expected
    assert o.normal_form(AB.parse("ab")) == o.normal_form(AB.parse("ba"))


def test_free_oracle_reduces():
    assert FreeGroupOracle(2).normal_form(AB.parse("aAb")) == AB.parse("b")


def test_orders_and_lengths():
    z6 = oracle_for(presentation("a", "aaaaaa"))
    assert element_order(z6, Word(()), 10) == 1
    assert element_order(z6, AB.parse("a"), 10) == 6
    assert element_order(FreeGroupOracle(2), AB.parse("a"), 100) is None
    assert geodesic_length(FreeGroupOracle(2), Word(())) == 0
    assert geodesic_length(FreeGroupOracle(2), AB.parse("Bab")) == 3
    assert geodesic_length(oracle_for(presentation("ab", "abAB")), AB.parse("abAB")) == 0


def test_surface_group_completion_stops_at_limits():
    rws = knuth_bendix(load_corpus("genus2").presentation, KBLimits(max_rules=60))
    assert not rws.confluent
    assert oracle_for(load_corpus("genus2").presentation, KBLimits(max_rules=60)) is None


def test_bad_limits_raise():
    with pytest.raises(ValueError):
        knuth_bendix(presentation("a"), KBLimits(max_rules=0))


@pytest.mark.parametrize("name", sorted(FINITE_REPS))
def test_finite_group_from_presentation_matches_permutations(name):
    p = load_corpus(name).presentation
    g = FiniteGroup.from_presentation(p)
    rep = FINITE_REPS[name]()
    assert g.order == rep.order
    rng = random.Random(name)
    for _ in range(300):
        u, v = random_word(rng, p.ngens, 10), random_word(rng, p.ngens, 10)
        assert (g.element(u) == g.element(v)) == (rep.of(u) == rep.of(v))


@given(st.lists(st.sampled_from([1, -1, 2, -2]), max_size=20).map(tuple))
def test_free_abelian_normal_form_is_sorted_geodesic(w):
    o = oracle_for(presentation("ab", "abAB"))
    nf = o.normal_form(w)
    assert tuple(nf) == z2_least_word(w)
    assert exponent_vector(nf, 2) == exponent_vector(w, 2)


@given(st.lists(st.sampled_from([1, -1, 2, -2, 3, -3]), max_size=20).map(tuple))
def test_free_oracle_matches_reference(w):
    assert tuple(FreeGroupOracle(3).normal_form(w)) == free_reduce_ref(w)


@given(st.lists(st.sampled_from([1, -1, 2, -2]), max_size=16).map(tuple), st.lists(st.sampled_from([1, -1, 2, -2]), max_size=16).map(tuple))
def test_normal_form_is_a_homomorphic_invariant(u, v):
    o = oracle_for(load_corpus("s3").presentation)
    assert o.normal_form(Word(u) * Word(v)) == o.normal_form(o.normal_form(u) * o.normal_form(v))
