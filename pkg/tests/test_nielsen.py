import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import FINITE_REPS, dinf_reduce, free_reduce_ref, nielsen_orbit_count

from grank.dovetail import Exhausted
from grank.folding import FoldedGraph
from grank.nielsen import (
    DINF,
    Absorb,
    CertificateError,
    Merge,
    Promote,
    apply_proposal,
    bounded_nielsen_search,
    dihedral_classify,
    dihedral_replays,
    free_rank,
    is_nielsen_reduced,
    nielsen_classes_finite,
    nielsen_reduce_free,
    partitioned_minimize,
)
from grank.rewrite import FiniteGroup, FreeGroupOracle
from grank.formats import load_corpus
from grank.words import Alphabet, Complexity, PartitionedTuple, Word

AB = Alphabet.of("abc")
W = AB.parse
word2 = st.lists(st.sampled_from([1, -1, 2, -2]), max_size=6).map(lambda w: Word(free_reduce_ref(w)))


def test_free_reduction_examples():
    assert nielsen_reduce_free([W("ab"), W("b")])[0] == (W("a"), W("b"))
    assert nielsen_reduce_free([W("a"), W("a")])[0] == (W("a"), Word(()))
    reduced, trace = nielsen_reduce_free([W("a"), W("b")])
    assert reduced == (W("a"), W("b")) and trace.moves == []


@given(st.lists(word2, min_size=1, max_size=3))
def test_free_reduction_properties(t):
    reduced, trace = nielsen_reduce_free(t)
    assert trace.replays()
    assert is_nielsen_reduced(reduced)
    assert sum(map(len, reduced)) <= sum(map(len, t))
    nonempty = [w for w in reduced if w]
    assert free_rank(t) == len(nonempty) == FoldedGraph(t, 2).rank()


def test_dihedral_examples():
    res = dihedral_classify([W("a"), W("b")])
    assert res.generates and res.trace.moves == []
    res = dihedral_classify([W("ab"), W("ba")])
    assert not res.generates
    res = dihedral_classify([W("ab"), W("b")])
    assert res.generates and len(res.trace.moves) == 1
    assert res.trace.end == (W("a"), W("b"))


dinf_words = st.lists(st.sampled_from([1, 2]), max_size=6).map(lambda w: Word(dinf_reduce(w)))


@given(st.lists(dinf_words, min_size=1, max_size=3))
def test_dihedral_traces_replay(t):
    res = dihedral_classify(t)
    if res.generates:
        assert dihedral_replays(res.trace)
        assert res.trace.end == (W("a"), W("b")) + (Word(()),) * (len(t) - 2)


@given(dinf_words, dinf_words)
def test_dihedral_oracle_matches_stack_reduction(u, v):
    assert tuple(DINF.mul_words(u, v)) == dinf_reduce(tuple(u) + tuple(v))


@pytest.mark.parametrize("name,count", [("z5", 24), ("klein4", 6), ("s3", 18)])
def test_single_class_for_small_groups(name, count):
    g = FiniteGroup.from_presentation(load_corpus(name).presentation)
    classes = nielsen_classes_finite(g, 2)
    assert len(classes) == 1 and classes[0].size == count
    assert nielsen_orbit_count(FINITE_REPS[name](), 2) == (1, count)


def test_trivial_group_class():
    g = FiniteGroup.from_presentation(load_corpus("trivial").presentation)
    classes = nielsen_classes_finite(g, 1)
    assert len(classes) == 1 and classes[0].representative == (Word(()),)


def test_a5_pairs_split_into_three_classes():
    g = FiniteGroup.from_presentation(load_corpus("a5").presentation)
    classes = nielsen_classes_finite(g, 2)
    assert sorted(c.size for c in classes) == [600, 600, 1080]
    assert nielsen_orbit_count(FINITE_REPS["a5"](), 2) == (3, 2280)


def test_bounded_search():
    res = bounded_nielsen_search(DINF, [W("ab"), W("b")], 1)
    assert res.tuple == (W("a"), W("b"))
    res = bounded_nielsen_search(FreeGroupOracle(2), [W("a"), W("b")], 1)
    assert res.tuple == (W("a"), W("b")) and res.trace.moves == []
    out = bounded_nielsen_search(FreeGroupOracle(2), [W("abab"), Word(())], 1)
    assert isinstance(out, Exhausted)


# partitioned descent in F3 = <a, b, c>
F3 = FreeGroupOracle(3)


def test_promote_short_conjugate():
    g, h = W("Cac"), W("b")
    m = PartitionedTuple((), (g, h))
    new, moves = apply_proposal(m, Promote(0, W("C"), W("a"), 1), F3)
    assert new.parts == ((g,),) and new.tail == (h,)
    assert (m.complexity(), new.complexity()) == (Complexity(2, 0), Complexity(1, 1))


def test_promote_rejects_bad_certificate():
    m = PartitionedTuple((), (W("Cac"), W("b")))
    with pytest.raises(CertificateError):
        apply_proposal(m, Promote(0, W("c"), W("a"), 1), F3)


def test_merge_conjugated_part():
    y1, y2, t = W("a"), W("b"), W("c")
    m = PartitionedTuple(((y1,), (y2,)), (t,))
    new, moves = apply_proposal(m, Merge(0, 1, ((2, 1),), 1), F3)
    assert new.parts == ((y1, t * y2 * ~t),) and new.tail == (t,)
    assert len(new.parts) == len(m.parts) - 1


def test_absorb_tail_entry():
    m = PartitionedTuple(((W("a"),),), (W("ab"),))
    new, _ = apply_proposal(m, Absorb(0, 0, ((0, -1),), (), 1), F3)
    assert new.parts == ((W("a"), W("b")),) and new.tail == ()


def test_minimize_runs_to_a_fixpoint_and_replays():
    m = PartitionedTuple((), (W("Cac"), W("Bab")))

    def movegen(cur):
        if cur.tail:
            x = W("C") if cur.tail[0] == W("Cac") else W("B")
            yield Promote(0, x, W("a"), 1)

    res = partitioned_minimize(m, movegen, F3)
    assert not res.exhausted
    assert res.tuple.tail == () and len(res.tuple.parts) == 2
    assert res.trace.replays()
    assert [c2 < c1 for _, c1, c2 in res.log] == [True, True]


def test_minimize_without_proposals_is_identity():
    m = PartitionedTuple(((W("a"),),), (W("b"),))
    res = partitioned_minimize(m, lambda cur: iter(()), F3)
    assert res.tuple == m and res.trace.moves == []
