"""Nielsen reduction, Nielsen classes in finite groups, and tuple searches."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from math import gcd
from typing import Callable, Iterable, Sequence, Union

from .dovetail import Exhausted
from .rewrite import CapabilityError, FiniteGroup, GroupOracle, geodesic_length
from .words import (
    EPSILON,
    Complexity,
    ConjugatePart,
    Expression,
    N1,
    N2,
    N3,
    NielsenMove,
    NielsenTrace,
    PartitionedTuple,
    SlideTailEntry,
    Word,
    apply_move,
    elementary_move,
    evaluate,
    left_multiply,
    replay,
    right_multiply,
    shortlex_key,
)

# ------------------------------------------------------- free Nielsen reduction


def _half(w: Word) -> tuple:
    return shortlex_key(w[: (len(w) + 1) // 2])


def reduction_key(w: Word) -> tuple:
    """Well-order on words used for Nielsen reduction.

    Length first, then the shortlex-smaller and shortlex-larger of the left
    halves (middle letter included) of w and w^-1; w and w^-1 share a key.
    """
    a, b = sorted((_half(w), _half(~w)))
    return (len(w), a, b)


def nielsen_reduce_free(t: Sequence[Sequence[int]]) -> tuple[tuple[Word, ...], NielsenTrace]:
    """Nielsen-reduce a tuple of free-group words.

    Each step replaces one entry by a product with another entry (or its
    inverse) when that lowers the entry's reduction key; prefer the biggest
    total-length drop, then the smallest new key, then the larger position.
    """
    start = tuple(Word(w) for w in t)
    cur = list(start)
    n = len(cur)
    moves: list[NielsenMove] = []
    while True:
        best = None
        for i in range(n):
            if not cur[i]:
                continue
            old_key = reduction_key(cur[i])
            for j in range(n):
                if i == j or not cur[j]:
                    continue
                for sign in (1, -1):
                    other = cur[j] if sign == 1 else ~cur[j]
                    for side, new in (("r", cur[i] * other), ("l", other * cur[i])):
                        new_key = reduction_key(new)
                        if new_key >= old_key:
                            continue
                        rank = (len(new) - len(cur[i]), new_key, -i)
                        if best is None or rank < best[0]:
                            best = (rank, i, j, sign, side, new)
        if best is None:
            break
        _, i, j, sign, side, new = best
        moves += right_multiply(i, j, sign) if side == "r" else left_multiply(i, j, sign)
        cur[i] = new
    end = tuple(cur)
    return end, NielsenTrace(start, moves, end)


def is_nielsen_reduced(t: Sequence[Sequence[int]]) -> bool:
    """Check the classical conditions on the nonidentity entries.

    Over the symmetrized set X of entries and inverses: no entry is trivial,
    |uv| >= |u|, |v| when uv != 1, and |uvw| > |u| - |v| + |w| when uv != 1
    and vw != 1.  Positions are tracked so that u = v^-1 of a different entry
    still counts as a product to check.
    """
    entries = [Word(w) for w in t if Word(w)]
    sym = [(k, s, w if s == 1 else ~w) for k, w in enumerate(entries) for s in (1, -1)]

    def cancels(x, y):
        return x[0] == y[0] and x[1] == -y[1]

    for x in sym:
        for y in sym:
            if cancels(x, y):
                continue
            uv = x[2] * y[2]
            if len(uv) < len(x[2]) or len(uv) < len(y[2]):
                return False
    for x in sym:
        for y in sym:
            if cancels(x, y):
                continue
            for z in sym:
                if cancels(y, z):
                    continue
                if len(x[2] * y[2] * z[2]) <= len(x[2]) - len(y[2]) + len(z[2]):
                    return False
    return True


def free_rank(t: Sequence[Sequence[int]]) -> int:
    reduced, _ = nielsen_reduce_free(t)
    return sum(1 for w in reduced if w)


# ------------------------------------------------------------ infinite dihedral


class InfiniteDihedral(GroupOracle):
    """<a, b | a^2, b^2> acting on Z by a: x -> -x, b: x -> 1 - x.

    Elements are pairs (e, m) meaning x -> e*x + m; words compose left to
    right as functions applied right to left, so the map is a homomorphism.
    Reduced words alternate a and b and are unique per element.
    """

    shortlex = True
    ngens = 2

    A = (-1, 0)
    B = (-1, 1)

    @staticmethod
    def compose(f, g):
        return (f[0] * g[0], f[0] * g[1] + f[1])

    @staticmethod
    def invert(f):
        return (f[0], -f[0] * f[1])

    def element(self, w: Sequence[int]) -> tuple[int, int]:
        out = (1, 0)
        for x in w:
            out = self.compose(out, self.A if abs(x) == 1 else self.B)
        return out

    def word(self, f) -> Word:
        e, m = f
        if e == 1:
            if m <= 0:
                return Word((1, 2) * (-m))
            return Word((2, 1) * m)
        # reflection: translation(m) composed with a
        return Word(self._alt(tuple(self.word((1, m))) + (1,)))

    @staticmethod
    def _alt(letters: Sequence[int]) -> tuple[int, ...]:
        out: list[int] = []
        for x in letters:
            x = abs(x)
            if out and out[-1] == x:
                out.pop()
            else:
                out.append(x)
        return tuple(out)

    def normal_form(self, w):
        return Word(self._alt(w))

    def is_trivial(self, w):
        return not self._alt(w)

    def mul_words(self, u, v) -> Word:
        return Word(self._alt(tuple(u) + tuple(v)))

    def inv_word(self, u) -> Word:
        return Word(self._alt(tuple(abs(x) for x in reversed(u))))


DINF = InfiniteDihedral()


@dataclass(frozen=True)
class DihedralResult:
    generates: bool
    description: str
    trace: NielsenTrace | None = None


def _dihedral_subgroup(elems) -> tuple[int, list[int]]:
    """(d, reflection offsets): the subgroup's translations are exactly dZ."""
    refl = [m for e, m in elems if e == -1]
    d = 0
    for e, m in elems:
        if e == 1:
            d = gcd(d, m)
    for m in refl[1:]:
        d = gcd(d, m - refl[0])
    return d, refl


def _canonical(k: int) -> tuple:
    return (DINF.A, DINF.B) + ((1, 0),) * (k - 2)


def _apply_aff(t, move):
    return apply_move(t, move, DINF.compose, DINF.invert)


def _short_trace(elems: tuple, depth: int = 2) -> list[NielsenMove] | None:
    goal = _canonical(len(elems))
    n = len(elems)
    moves = [N1(i) for i in range(n)]
    moves += [N2(i, j) for i in range(n) for j in range(n) if i != j]
    moves += [N3(i, j) for i in range(n) for j in range(i + 1, n)]
    frontier = [(elems, [])]
    seen = {elems}
    for _ in range(depth):
        nxt = []
        for t, path in frontier:
            for m in moves:
                u = _apply_aff(t, m)
                if u == goal:
                    return path + [m]
                if u not in seen:
                    seen.add(u)
                    nxt.append((u, path + [m]))
        frontier = nxt
    return None


def _constructive_trace(elems: tuple) -> list[NielsenMove]:
    t = list(elems)
    moves: list[NielsenMove] = []

    def do(ms):
        nonlocal t
        for m in ms:
            t = list(_apply_aff(t, m))
            moves.append(m)

    r = next(i for i, f in enumerate(t) if f[0] == -1)
    for j in range(len(t)):
        if j != r and t[j][0] == -1:
            do([N2(j, r)])
    # Euclid on the translation offsets
    trans = [j for j in range(len(t)) if j != r]
    while True:
        live = [j for j in trans if t[j][1] != 0]
        if len(live) <= 1:
            break
        p = min(live, key=lambda j: (abs(t[j][1]), j))
        for q in live:
            if q == p:
                continue
            quo = t[q][1] // t[p][1]
            sign = 1 if quo < 0 else -1
            for _ in range(abs(quo)):
                do(right_multiply(q, p, sign))
    p = next(j for j in trans if t[j][1] != 0)
    if t[p][1] == -1:
        do([N1(p)])
    # now t[p] = (1, 1); move t[r] = (-1, m0) to (-1, 0)
    m0 = t[r][1]
    for _ in range(abs(m0)):
        do(left_multiply(r, p, -1 if m0 > 0 else 1))
    do([N2(p, r)])
    # a sits at r, b at p; park them at positions 0 and 1
    if r != 0:
        do([N3(0, r)])
        if p == 0:
            p = r
    if p != 1:
        do([N3(1, p)])
    return moves


def dihedral_classify(t: Sequence[Sequence[int]]) -> DihedralResult:
    """Decide whether the words generate D-infinity; if so, give a trace to (a, b, 1, ..., 1)."""
    words = tuple(DINF.normal_form(w) for w in t)
    elems = tuple(DINF.element(w) for w in words)
    d, refl = _dihedral_subgroup(elems)
    if not refl or d != 1 or len(t) < 2:
        if not refl:
            desc = "trivial" if d == 0 else f"infinite cyclic, generated by {DINF.word((1, -d))}"
        elif d == 0:
            desc = f"order 2, generated by {DINF.word((-1, refl[0]))}"
        else:
            desc = f"infinite dihedral of index {d}"
        return DihedralResult(False, desc)
    if elems == _canonical(len(elems)):
        moves: list[NielsenMove] = []
    else:
        moves = _short_trace(elems) or _constructive_trace(elems)
    end = replay(words, moves, DINF.mul_words, lambda u: DINF.inv_word(u))
    return DihedralResult(True, "whole group", NielsenTrace(words, moves, end))


def dihedral_replays(trace: NielsenTrace) -> bool:
    return trace.replays(DINF.mul_words, DINF.inv_word, lambda u, v: DINF.equal(u, v))


# ------------------------------------------------------ Nielsen classes (finite)


def _all_moves(k: int) -> list[NielsenMove]:
    moves = [N1(i) for i in range(k)]
    moves += [N2(i, j) for i in range(k) for j in range(k) if i != j]
    moves += [N3(i, j) for i in range(k) for j in range(i + 1, k)]
    return moves


@dataclass(frozen=True)
class NielsenClass:
    representative: tuple[Word, ...]
    size: int


def nielsen_classes_finite(g: FiniteGroup, k: int, max_tuples: int = 500_000) -> list[NielsenClass]:
    """Orbits of generating k-tuples of a finite group under Nielsen moves.

    Representatives are least in the order that compares entries by their
    shortlex-least words (element indices already follow that order).
    """
    import itertools

    if k < 1:
        raise ValueError("k must be positive")
    if g.order**k > max_tuples:
        raise ValueError(f"{g.order}^{k} tuples exceed the limit {max_tuples}")
    gens = [t for t in itertools.product(range(g.order), repeat=k) if len(g.subgroup(t)) == g.order]
    index = {t: n for n, t in enumerate(gens)}
    parent = list(range(len(gens)))

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    moves = _all_moves(k)
    for n, t in enumerate(gens):
        for m in moves:
            u = apply_move(t, m, g.mul, g.inv)
            a, b = find(n), find(index[u])
            if a != b:
                parent[max(a, b)] = min(a, b)
    sizes: dict[int, int] = {}
    for n in range(len(gens)):
        r = find(n)
        sizes[r] = sizes.get(r, 0) + 1
    # gens is in lexicographic order, so the root (the minimum) is the least tuple
    return [NielsenClass(tuple(g.words[e] for e in gens[r]), s) for r, s in sorted(sizes.items())]


# ------------------------------------------------------ bounded Nielsen search


@dataclass(frozen=True)
class BoundedResult:
    tuple: tuple[Word, ...]
    trace: NielsenTrace


def bounded_nielsen_search(
    o: GroupOracle,
    t: Sequence[Sequence[int]],
    length_bound: int,
    budget: int = 50_000,
    slack: int = 2,
) -> BoundedResult | Exhausted:
    """Breadth-first search for a Nielsen-equivalent tuple with short entries.

    States with an entry longer than ``slack * length_bound`` are pruned, so
    an exhausted answer only speaks about paths inside that window.
    """
    if not o.shortlex:
        raise CapabilityError("bounded search needs normal forms")
    cap = slack * length_bound

    def mul(u, v):
        return o.normal_form(Word(u) * Word(v))

    def inv(u):
        return o.normal_form(~Word(u))

    start = tuple(o.normal_form(w) for w in t)
    moves = _all_moves(len(start))
    parent: dict[tuple, tuple | None] = {start: None}
    queue = deque([start])
    spent = 0
    while queue:
        cur = queue.popleft()
        spent += 1
        if all(len(w) <= length_bound for w in cur):
            path: list[NielsenMove] = []
            node = cur
            while parent[node] is not None:
                prev, m = parent[node]
                path.append(m)
                node = prev
            path.reverse()
            trace = NielsenTrace(tuple(Word(w) for w in t), path, cur)
            if not trace.replays(mul, inv, o.equal):
                raise AssertionError("bounded search produced a trace that does not replay")
            return BoundedResult(cur, trace)
        if spent >= budget:
            return Exhausted(spent, f"budget hit with entries capped at length {cap}")
        for m in moves:
            u = apply_move(cur, m, mul, inv)
            if u in parent or any(len(w) > cap for w in u):
                continue
            parent[u] = (cur, m)
            queue.append(u)
    return Exhausted(spent, f"no tuple within the length-{cap} window")


# ------------------------------------------------- partitioned-tuple descent


class CertificateError(ValueError):
    """A proposed transformation failed its certificate check."""


@dataclass(frozen=True)
class Merge:
    """Merge part ``source`` into part ``target`` as c·Y_source·c^-1.

    ``conjugator`` writes c in entries outside Y_source; ``bound`` is the
    certified length of c.
    """

    target: int
    source: int
    conjugator: Expression = ()
    bound: int = 0


@dataclass(frozen=True)
class Absorb:
    """Slide tail entry t to u·t·u' and append it to part ``part``; ``bound`` caps |u·t·u'|."""

    entry: int
    part: int
    left: Expression = ()
    right: Expression = ()
    bound: int = 0


@dataclass(frozen=True)
class Promote:
    """Make tail entry t (after sliding to u·t·u') a new part.

    Certified by a conjugator x and a word v with x^-1·t·x = v and |v| <= bound.
    The new part holds t itself, not v.
    """

    entry: int
    conjugator: Word
    short: Word
    bound: int
    left: Expression = ()
    right: Expression = ()


Proposal = Union[Merge, Absorb, Promote]


def _permutation_moves(old: Sequence, order: Sequence[int]) -> list[NielsenMove]:
    """Swaps carrying ``old`` to ``[old[k] for k in order]``."""
    cur = list(range(len(old)))
    moves = []
    for pos, want in enumerate(order):
        at = cur.index(want)
        if at != pos:
            moves.append(N3(pos, at))
            cur[pos], cur[at] = cur[at], cur[pos]
    return moves


def _rebuild(parts, tail, order):
    flat = [w for y in parts for w in y] + list(tail)
    return tuple(flat[k] for k in order)


def apply_proposal(
    m: PartitionedTuple, prop: Proposal, o: GroupOracle
) -> tuple[PartitionedTuple, list[NielsenMove]]:
    """Check the certificate and carry out one complexity-lowering transformation."""
    if isinstance(prop, Merge):
        if prop.target == prop.source:
            raise CertificateError("a part cannot merge with itself")
        c = evaluate(prop.conjugator, m.underlying)
        if geodesic_length(o, c) > prop.bound:
            raise CertificateError(f"conjugator longer than certified bound {prop.bound}")
        inv_expr = tuple((pos, -s) for pos, s in reversed(prop.conjugator))
        m1, moves = elementary_move(m, ConjugatePart(prop.source, inv_expr))
        parts = list(m1.parts)
        merged = parts[prop.target] + parts[prop.source]
        pos_t = list(m1.part_positions(prop.target))
        pos_s = list(m1.part_positions(prop.source))
        new_parts, order = [], []
        for i, y in enumerate(parts):
            if i == prop.source:
                continue
            if i == prop.target:
                new_parts.append(merged)
                order += pos_t + pos_s
            else:
                new_parts.append(y)
                order += list(m1.part_positions(i))
        order += [m1.tail_position(i) for i in range(len(m1.tail))]
        result = PartitionedTuple(tuple(new_parts), m1.tail)
    elif isinstance(prop, (Absorb, Promote)):
        m1, moves = elementary_move(m, SlideTailEntry(prop.entry, prop.left, prop.right))
        t = m1.tail[prop.entry]
        tail = m1.tail[: prop.entry] + m1.tail[prop.entry + 1 :]
        tail_pos = [m1.tail_position(i) for i in range(len(m1.tail)) if i != prop.entry]
        entry_pos = m1.tail_position(prop.entry)
        if isinstance(prop, Absorb):
            if not 0 <= prop.part < len(m1.parts):
                raise IndexError(f"no part {prop.part}")
            if geodesic_length(o, t) > prop.bound:
                raise CertificateError(f"absorbed entry longer than certified bound {prop.bound}")
            parts = list(m1.parts)
            parts[prop.part] = parts[prop.part] + (t,)
            order = []
            for i in range(len(parts)):
                order += list(m1.part_positions(i))
                if i == prop.part:
                    order.append(entry_pos)
        else:
            x, v = Word(prop.conjugator), Word(prop.short)
            if len(v) > prop.bound or not o.equal(~x * t * x, v):
                raise CertificateError("short-conjugate certificate does not check")
            if o.is_trivial(t):
                raise CertificateError("a promoted entry must be nontrivial")
            parts = list(m1.parts) + [(t,)]
            order = [k for i in range(len(m1.parts)) for k in m1.part_positions(i)] + [entry_pos]
        order += tail_pos
        result = PartitionedTuple(tuple(parts), tail)
    else:
        raise TypeError(f"unknown proposal {prop!r}")
    moves = moves + _permutation_moves(m1.underlying, order)
    if result.complexity() >= m.complexity():
        raise CertificateError("transformation does not lower the complexity")
    return result, moves


@dataclass
class MinimizeResult:
    tuple: PartitionedTuple
    trace: NielsenTrace
    log: list[tuple[str, Complexity, Complexity]] = field(default_factory=list)
    exhausted: bool = False


def partitioned_minimize(
    m: PartitionedTuple,
    movegen: Callable[[PartitionedTuple], Iterable[Proposal]],
    o: GroupOracle,
    budget: int = 1_000,
) -> MinimizeResult:
    """Apply proposed transformations until none is offered.

    Each transformation strictly lowers the complexity, so at most
    ``len(tail) * (len(tail) + parts + 1)`` of them can happen in a row.
    """
    start = m.underlying
    moves: list[NielsenMove] = []
    log: list[tuple[str, Complexity, Complexity]] = []
    for _ in range(budget):
        prop = next(iter(movegen(m)), None)
        if prop is None:
            return MinimizeResult(m, NielsenTrace(start, moves, m.underlying), log)
        new, ms = apply_proposal(m, prop, o)
        log.append((type(prop).__name__, m.complexity(), new.complexity()))
        moves += ms
        m = new
    return MinimizeResult(m, NielsenTrace(start, moves, m.underlying), log, exhausted=True)
