from hypothesis import given
from hypothesis import strategies as st
from oracles import free_reduce_ref

from grank.cosets import CosetTable, membership_via_table, todd_coxeter
from grank.folding import FoldedGraph, folding_membership
from grank.nielsen import free_rank
from grank.words import Alphabet, Word, presentation

AB = Alphabet.of("ab")
word2 = st.lists(st.sampled_from([1, -1, 2, -2]), max_size=6).map(lambda w: Word(free_reduce_ref(w)))


def test_basic_graphs():
    g = FoldedGraph([AB.parse("a")], 2)
    assert g.rank() == 1 and g.contains(AB.parse("aaa")) and not g.contains(AB.parse("b"))
    assert not g.is_complete() and g.index() is None
    h = FoldedGraph([AB.parse(w) for w in ("aa", "b", "abA")], 2)
    assert h.is_complete() and h.index() == 2 and h.rank() == 3


@given(st.lists(word2, min_size=1, max_size=3))
def test_rank_agrees_with_nielsen_reduction(gens):
    assert FoldedGraph(gens, 2).rank() == free_rank(gens)


@given(st.lists(word2, min_size=1, max_size=3), word2)
def test_membership_is_closed_under_products(gens, w):
    member = folding_membership(gens, 2)
    for g in gens:
        assert member(g) and member(~g)
    if member(w):
        for g in gens:
            assert member(w * g)


@given(st.lists(word2, min_size=1, max_size=3), word2)
def test_membership_matches_coset_table_when_index_is_finite(gens, w):
    g = FoldedGraph(gens, 2)
    if g.index() is None:
        return
    t = todd_coxeter(presentation("ab"), gens, max_cosets=2_000)
    assert isinstance(t, CosetTable) and t.index == g.index()
    assert membership_via_table(t, w) == g.contains(w)
