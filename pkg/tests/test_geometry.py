import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import exponent_vector, free_reduce_ref

from grank.dovetail import Exhausted
from grank.geometry import (
    build_ball,
    constants,
    invariant_set_E,
    invariant_sets,
    radius_sequence,
    set_distance,
    short_conjugate_search,
    thinness_estimate,
    translate,
    weak_hull,
)
from grank.rank import parse_c2
from grank.rewrite import FreeGroupOracle, oracle_for
from grank.words import Alphabet, Word, presentation

W = Alphabet.of("ab").parse
F2 = FreeGroupOracle(2)
Z2 = oracle_for(presentation("ab", "abAB"))


@pytest.fixture(scope="module")
def ball3():
    return build_ball(F2, 3)


def test_ball_sizes():
    assert build_ball(F2, 2).size == 17
    assert build_ball(Z2, 1).size == 5
    for r in range(4):
        assert build_ball(oracle_for(presentation("a", "a")), r).size == 1


def test_distances_match_references(ball3):
    for i, j in itertools.combinations(range(ball3.size), 2):
        u, v = ball3.vertices[i], ball3.vertices[j]
        assert ball3.dist[i, j] == len(free_reduce_ref(tuple(~u) + tuple(v)))
    b = build_ball(Z2, 3)
    for i, j in itertools.combinations(range(b.size), 2):
        x = exponent_vector(b.vertices[i], 2)
        y = exponent_vector(b.vertices[j], 2)
        assert b.dist[i, j] == abs(x[0] - y[0]) + abs(x[1] - y[1])


def test_thinness():
    for r in range(4):
        assert thinness_estimate(build_ball(F2, r)) == 0
    assert thinness_estimate(build_ball(Z2, 4)) >= 1
    assert thinness_estimate(build_ball(Z2, 0)) == 0


def test_sampled_thinness_is_a_lower_bound():
    b = build_ball(Z2, 4)
    assert thinness_estimate(b, max_triangles=500, exhaustive_limit=0) <= thinness_estimate(b)


def _axis(b):
    return {b.index[Word((1,) * k if k > 0 else (-1,) * -k)] for k in range(-3, 4)}


def test_axis_is_the_displacement_set(ball3):
    E = invariant_set_E(ball3, [W("a")], 1)
    assert set(E) == _axis(ball3)
    # brute force: x is moved by at most 1 by some a^m iff x lies on the axis
    brute = {
        k
        for k, x in enumerate(ball3.vertices)
        if any(len(free_reduce_ref(tuple(~x) + (1,) * m + tuple(x))) <= 1 for m in range(1, 5))
    }
    assert brute == set(E)


def test_large_mu_gives_everything(ball3):
    assert len(invariant_set_E(ball3, [W("ab")], 2 * 3 + 2)) == ball3.size


def test_trivial_subgroup_gives_nothing(ball3):
    assert len(invariant_set_E(ball3, [Word(())], 5)) == 0


def test_hulls(ball3):
    axis = _axis(ball3)
    assert set(weak_hull(ball3, axis)) == axis
    a, b, e = ball3.index[W("a")], ball3.index[W("b")], ball3.index[Word(())]
    assert set(weak_hull(ball3, {a, b})) == {a, b, e}
    assert len(weak_hull(ball3, set())) == 0
    sets = invariant_sets(ball3, [W("a")], 1)
    assert set(sets.Z) == axis


def test_set_distances(ball3):
    axis = _axis(ball3)
    assert set_distance(ball3, axis, axis).value == 0
    shifted = translate(ball3, W("b"), axis)
    assert set_distance(ball3, axis, shifted).value == 1
    far_a = {ball3.index[W("aaa")]}
    far_b = {ball3.index[W("bbb")]}
    d = set_distance(ball3, far_a, far_b)
    assert d.value == 6 and d.truncated


def test_short_conjugates():
    res = short_conjugate_search(F2, W("Bab"), 1)
    assert res.short == W("a")
    assert F2.normal_form(~res.conjugator * W("Bab") * res.conjugator) == W("a")
    assert isinstance(short_conjugate_search(F2, W("ab"), 1, budget=500), Exhausted)
    assert short_conjugate_search(F2, Word(()), 0).short == Word(())


def test_constants_examples():
    t = constants(3, 1, 10, parse_c2("const:5"))
    assert t.R[3] == (10, 50, 170)
    assert t.C == (0, 10, 50, 170)
    assert constants(1, 1, 10, parse_c2("const:5")).R[1] == (10,)


def test_constants_reject_decreasing_c2():
    with pytest.raises(ValueError):
        constants(3, 1, 2, lambda n, K: 100 - K)


@given(st.integers(1, 4), st.integers(1, 3), st.integers(1, 6), st.integers(0, 6), st.integers(0, 2), st.integers(0, 2))
def test_C_is_nondecreasing_and_telescopes(k, delta, L, a, b, c):
    c2 = parse_c2(f"linear:{a},{b},{c}")
    t = constants(k, delta, L, c2)
    assert list(t.C) == sorted(t.C) and t.C[0] == 0
    for kk in range(1, k + 1):
        assert t.R[kk] == radius_sequence(kk, delta, L, c2)
        assert t.C[kk] == max(t.C[kk - 1], t.R[kk][-1])
