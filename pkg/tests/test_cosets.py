import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import FINITE_REPS, closure

from grank.cosets import (
    CosetTable,
    Overflow,
    conjugate_table,
    low_index_subgroups,
    membership_via_table,
    normal_core,
    reidemeister_schreier,
    schreier_transversal,
    todd_coxeter,
)
from grank.folding import FoldedGraph
from grank.formats import load_corpus
from grank.words import Alphabet, Word, abelianized_rank, presentation

AB = Alphabet.of("ab")
A5 = load_corpus("a5").presentation
S3 = load_corpus("s3").presentation  # <a, b | a^3, b^2, (ab)^2>
F2 = presentation("ab")


def words(*texts):
    return [AB.parse(t) for t in texts]


def test_a5_index_of_involution_subgroup():
    t = todd_coxeter(A5, words("a"))
    assert isinstance(t, CosetTable) and t.is_valid()
    rep = FINITE_REPS["a5"]()
    assert t.index == rep.order // len(closure([rep.of(AB.parse("a"))], rep.n)) == 30


def test_whole_group_has_index_one():
    for name in ("a5", "s3", "genus2", "z2"):
        p = load_corpus(name).presentation
        assert todd_coxeter(p, p.generators).index == 1


def test_infinite_index_overflows():
    out = todd_coxeter(F2, words("a"), max_cosets=10_000)
    assert isinstance(out, Overflow)


def test_transversals():
    assert schreier_transversal(todd_coxeter(A5, A5.generators)) == [Word(())]
    t = todd_coxeter(F2, words("aa", "b", "abA"))
    assert t.index == 2
    assert schreier_transversal(t) == words("1", "a")
    reps = schreier_transversal(todd_coxeter(A5, words("a")))
    assert len(reps) == 30
    assert all(Word(w[:-1]) in reps for w in reps if w)


def test_membership_in_index_two_table():
    t = todd_coxeter(F2, words("aa", "b", "abA"))
    assert membership_via_table(t, Word(()))
    assert not membership_via_table(t, AB.parse("a"))
    assert membership_via_table(t, AB.parse("aa"))


def test_reidemeister_schreier_free_index_two():
    t = todd_coxeter(F2, words("aa", "b", "abA"))
    sub = reidemeister_schreier(F2, t)
    assert abelianized_rank(sub.presentation) == 3
    assert FoldedGraph(sub.generator_words, 2).rank() == 3


def test_reidemeister_schreier_index_one_keeps_abelianization():
    for name in ("s3", "genus2", "klein4"):
        p = load_corpus(name).presentation
        sub = reidemeister_schreier(p, todd_coxeter(p, p.generators))
        assert abelianized_rank(sub.presentation) == abelianized_rank(p)


def test_genus_two_double_cover():
    p = load_corpus("genus2").presentation
    subs = [t for t in low_index_subgroups(p, 2) if t.index == 2]
    assert len(subs) == 15
    assert all(abelianized_rank(reidemeister_schreier(p, t).presentation) == 6 for t in subs)


def test_low_index_counts():
    counts = lambda p, n: sorted(t.index for t in low_index_subgroups(p, n))
    assert counts(F2, 2) == [1, 2, 2, 2]
    assert counts(presentation("t"), 3) == [1, 2, 3]
    assert counts(presentation("a", "a"), 5) == [1]


@pytest.mark.parametrize("n,expected", [(1, 1), (2, 3), (3, 13), (4, 71)])
def test_low_index_counts_in_free_group_of_rank_two(n, expected):
    # number of subgroups of index exactly n in F2 (Hall's recursion)
    assert sum(1 for t in low_index_subgroups(F2, n) if t.index == n) == expected


def test_normal_cores():
    t = todd_coxeter(S3, words("b"))
    assert t.index == 3
    assert normal_core(S3, t).index == 6
    t2 = todd_coxeter(S3, words("a"))
    assert t2.index == 2 and normal_core(S3, t2).index == 2
    t3 = todd_coxeter(F2, words("aa", "b", "abA"))
    assert normal_core(F2, t3).index == 2


def test_conjugate_tables_have_the_same_index():
    t = todd_coxeter(S3, words("b"))
    for w in words("a", "ab", "A"):
        c = conjugate_table(t, w)
        assert c.index == t.index and c.is_valid()


@given(st.lists(st.sampled_from([1, -1, 2, -2]), max_size=14))
def test_table_membership_agrees_with_permutations(w):
    t = todd_coxeter(S3, words("b"))
    rep = FINITE_REPS["s3"]()
    H = closure([rep.of(AB.parse("b"))], rep.n)
    assert membership_via_table(t, w) == (rep.of(w) in H)
