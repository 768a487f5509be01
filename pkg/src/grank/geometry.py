"""Finite pieces of Cayley graphs and the constants of the rank bound.

Everything here works inside a ball of the Cayley graph.  Distances are the
true word metric |u^-1 v| computed by the oracle, so they are exact even
when every geodesic between two ball vertices leaves the ball.  Sets that
would extend past the ball carry a ``truncated`` flag.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence, Union

import numpy as np

from .dovetail import Exhausted
from .rewrite import CapabilityError, GroupOracle
from .words import EPSILON, Alphabet, Word


@dataclass
class Ball:
    oracle: GroupOracle
    radius: int
    vertices: list[Word]
    index: dict[Word, int]
    neighbors: list[dict[int, int]]
    dist: np.ndarray

    @property
    def size(self) -> int:
        return len(self.vertices)

    def depth(self, v: int) -> int:
        return int(self.dist[0, v])

    def locate(self, w: Sequence[int]) -> int | None:
        return self.index.get(self.oracle.normal_form(Word(w)))

    def geodesic(self, p: int, q: int) -> list[int] | None:
        """Vertices of the canonical geodesic p -> q (p times prefixes of the
        normal form of p^-1 q), or None when it leaves the ball."""
        path = [p]
        step = self.oracle.normal_form(~self.vertices[p] * self.vertices[q])
        here = self.vertices[p]
        for x in step:
            here = self.oracle.normal_form(here * Word((x,)))
            k = self.index.get(here)
            if k is None:
                return None
            path.append(k)
        return path


def build_ball(o: GroupOracle, r: int) -> Ball:
    """Ball of radius r around the identity."""
    if not o.shortlex:
        raise CapabilityError("building a ball needs shortlex normal forms")
    if r < 0:
        raise ValueError("radius must be nonnegative")
    vertices = list(o.enumerate_ball(r))
    index = {v: k for k, v in enumerate(vertices)}
    letters = Alphabet.standard(o.ngens).letters if o.ngens else []
    neighbors = []
    for v in vertices:
        nb = {}
        for x in letters:
            k = index.get(o.normal_form(v * Word((x,))))
            if k is not None:
                nb[x] = k
        neighbors.append(nb)
    n = len(vertices)
    dist = np.zeros((n, n), dtype=np.int64)
    inverses = [~v for v in vertices]
    for i in range(n):
        for j in range(i + 1, n):
            d = len(o.normal_form(inverses[i] * vertices[j]))
            dist[i, j] = dist[j, i] = d
    return Ball(o, r, vertices, index, neighbors, dist)


# ------------------------------------------------------------------ thinness


def thinness_estimate(b: Ball, max_triangles: int = 20_000, seed: int = 0, exhaustive_limit: int = 300) -> int:
    """Largest thinness among geodesic triangles whose canonical sides stay in the ball.

    This is a lower bound for any thinness constant of the whole group.
    Balls with at most ``exhaustive_limit`` vertices are checked on every
    ordered vertex triple; larger ones on a seeded sample of ``max_triangles``
    unordered triples.
    """
    n = b.size
    if n < 3:
        return 0
    D = b.dist
    if n <= exhaustive_limit:
        return _thinness_all(b, D)
    paths: dict[tuple[int, int], np.ndarray | None] = {}

    def side(p, q):
        if (p, q) not in paths:
            g = b.geodesic(p, q)
            paths[(p, q)] = None if g is None else np.array(g)
        return paths[(p, q)]

    rng = np.random.default_rng(seed)
    picks = set()
    while len(picks) < max_triangles:
        picks.add(tuple(sorted(rng.choice(n, size=3, replace=False).tolist())))
    worst = 0
    for x, y, z in sorted(picks):
        s = [side(x, y), side(y, z), side(z, x)]
        if any(v is None for v in s):
            continue
        for k in range(3):
            other = np.concatenate([s[(k + 1) % 3], s[(k + 2) % 3]])
            worst = max(worst, int(D[np.ix_(s[k], other)].min(axis=1).max()))
    return worst


def _thinness_all(b: Ball, D: np.ndarray) -> int:
    n = b.size
    big = np.iinfo(np.int32).max
    # near[p, q, v] = distance from v to the canonical geodesic p -> q
    near = np.full((n, n, n), big, dtype=np.int32)
    valid = np.zeros((n, n), dtype=bool)
    paths = {}
    for p in range(n):
        for q in range(n):
            g = b.geodesic(p, q)
            if g is not None:
                valid[p, q] = True
                paths[(p, q)] = np.array(g)
                near[p, q] = D[:, g].min(axis=1)
    worst = 0
    for (x, y), P in paths.items():
        zs = valid[y, :] & valid[:, x]
        if not zs.any():
            continue
        # for every z: max over v on side x->y of its distance to the other two sides
        to_rest = np.minimum(near[y][:, P], near[:, x][:, P])
        worst = max(worst, int(to_rest[zs].max()))
    return worst


# ---------------------------------------------------------- invariant sets


@dataclass(frozen=True)
class VertexSet:
    vertices: frozenset[int]
    truncated: bool = False

    def __iter__(self):
        return iter(sorted(self.vertices))

    def __len__(self):
        return len(self.vertices)

    def __contains__(self, v):
        return v in self.vertices

    def words(self, b: Ball) -> list[Word]:
        return [b.vertices[v] for v in self]


def subgroup_elements(o: GroupOracle, ugens: Sequence[Word], power_bound: int) -> list[Word]:
    """Distinct nontrivial elements written with at most ``power_bound`` letters from ugens^±1."""
    gens = [Word(u) for u in ugens] + [~Word(u) for u in ugens]
    seen: dict[Word, None] = {}
    level = [EPSILON]
    for _ in range(power_bound):
        nxt = []
        for w in level:
            for g in gens:
                u = o.normal_form(w * g)
                if u and u not in seen:
                    seen[u] = None
                    nxt.append(u)
        level = nxt
    return list(seen)


def invariant_set_E(b: Ball, ugens: Sequence[Word], mu: int, power_bound: int = 4) -> VertexSet:
    """Ball vertices x moved at most ``mu`` by some enumerated nontrivial u ∈ U.

    d(x, u·x) = |x^-1·u·x| is measured by the oracle, so it is exact even when
    u·x lies outside the ball.  The set is then closed under x -> u·x inside
    the ball, keeping it invariant under the enumerated elements.  The flag
    records that U was enumerated only up to ``power_bound`` letters or that
    some u·x left the ball.
    """
    o = b.oracle
    us = subgroup_elements(o, ugens, power_bound)
    truncated = False
    moved: list[list[int | None]] = []
    for u in us:
        row = []
        for v in b.vertices:
            k = b.index.get(o.normal_form(u * v))
            truncated |= k is None
            row.append(k)
        moved.append(row)
    E = set()
    for x, v in enumerate(b.vertices):
        if any(len(o.normal_form(~v * u * v)) <= mu for u in us):
            E.add(x)
    todo = list(E)
    while todo:
        x = todo.pop()
        for row in moved:
            ux = row[x]
            if ux is not None and ux not in E:
                E.add(ux)
                todo.append(ux)
    return VertexSet(frozenset(E), truncated)


def weak_hull(b: Ball, E: Iterable[int]) -> VertexSet:
    """Ball vertices on some geodesic between two points of E."""
    pts = sorted(set(E))
    truncated = getattr(E, "truncated", False)
    if not pts:
        return VertexSet(frozenset(), truncated)
    D = b.dist
    P = np.array(pts)
    hull = np.zeros(b.size, dtype=bool)
    for p in pts:
        # D[p, v] + D[v, q] == D[p, q] for each q in E, vectorized over v and q
        lhs = D[p][:, None] + D[np.ix_(range(b.size), P)]
        hull |= (lhs == D[p, P][None, :]).any(axis=1)
    return VertexSet(frozenset(np.flatnonzero(hull).tolist()), truncated)


@dataclass(frozen=True)
class InvariantSetApprox:
    ugens: tuple[Word, ...]
    mu: int
    E: VertexSet
    Z: VertexSet
    X: VertexSet
    radius: int

    @property
    def truncated(self) -> bool:
        return self.E.truncated


def invariant_sets(b: Ball, ugens: Sequence[Word], mu: int, power_bound: int = 4) -> InvariantSetApprox:
    E = invariant_set_E(b, ugens, mu, power_bound)
    Z = weak_hull(b, E)
    return InvariantSetApprox(tuple(Word(u) for u in ugens), mu, E, Z, Z, b.radius)


def translate(b: Ball, g: Sequence[int], A: Iterable[int]) -> VertexSet:
    """g·A restricted to the ball; truncated when some image falls outside."""
    out, lost = set(), getattr(A, "truncated", False)
    for v in A:
        k = b.locate(Word(g) * b.vertices[v])
        if k is None:
            lost = True
        else:
            out.add(k)
    return VertexSet(frozenset(out), lost)


@dataclass(frozen=True)
class SetDistance:
    """``value`` is None when a set is empty inside the ball.

    ``truncated`` is set when a closest pair lies within ``value`` of the
    ball's boundary, where points outside the ball could be closer.
    """

    value: int | None
    truncated: bool


def set_distance(b: Ball, A: Iterable[int], B: Iterable[int]) -> SetDistance:
    a, c = sorted(set(A)), sorted(set(B))
    if not a or not c:
        return SetDistance(None, True)
    sub = b.dist[np.ix_(a, c)]
    value = int(sub.min())
    close = np.argwhere(sub == value)
    edge = b.radius - value
    truncated = any(b.depth(a[i]) >= edge or b.depth(c[j]) >= edge for i, j in close)
    return SetDistance(value, bool(truncated))


# -------------------------------------------------------- short conjugates


@dataclass(frozen=True)
class ShortConjugate:
    """c^-1 · w · c = v in the group, with |v| <= bound."""

    short: Word
    conjugator: Word


def short_conjugate_search(o: GroupOracle, w: Sequence[int], bound: int, budget: int = 5_000) -> ShortConjugate | Exhausted:
    """Try conjugators in shortlex order; each candidate is one step."""
    if bound < 0:
        raise ValueError("bound must be nonnegative")
    if not o.shortlex:
        raise CapabilityError("short conjugate search needs normal forms")
    w = Word(w)
    spent = 0
    for c in o.enumerate_ball(budget):
        if spent >= budget:
            break
        spent += 1
        v = o.normal_form(~c * w * c)
        if len(v) <= bound:
            return ShortConjugate(v, c)
    return Exhausted(spent, f"no conjugate of length <= {bound} among {spent} conjugators")


# ---------------------------------------------------------------- constants


@dataclass(frozen=True)
class ConstantsTable:
    """R[k'][i-1] = R(k', i) for 1 <= i <= k' <= k, and C[k'] for 0 <= k' <= k."""

    k: int
    delta: int
    L: tuple[int, ...]
    R: dict[int, tuple[int, ...]]
    C: tuple[int, ...]
    c2: Callable[[int, int], int] = field(compare=False, repr=False)

    def rows(self) -> list[tuple[int, int, int]]:
        return [(kk, i + 1, r) for kk, row in self.R.items() for i, r in enumerate(row)]


def _check_monotone(c2, ns: Sequence[int], Ks: Sequence[int]) -> None:
    ns, Ks = sorted(set(ns)), sorted(set(Ks))
    grid = {(n, K): c2(n, K) for n in ns for K in Ks}
    for (n, K), v in grid.items():
        for n2 in ns:
            if n2 > n and grid[(n2, K)] < v:
                raise ValueError(f"c2 decreases in n: c2({n},{K})={v} > c2({n2},{K})={grid[(n2, K)]}")
        for K2 in Ks:
            if K2 > K and grid[(n, K2)] < v:
                raise ValueError(f"c2 decreases in K: c2({n},{K})={v} > c2({n},{K2})={grid[(n, K2)]}")


def radius_sequence(kk: int, delta: int, Lk: int, c2) -> tuple[int, ...]:
    """R(1) = δ·L(k) and R(i) = max(R(i-1), c'(i-1, R(i-1)), max_{p+j=i} c(p, j, R(i-1)))
    with c(p, j, K) = 4·c2(p+j, K) + 3K and c'(n, K) = 2·c2(n, K) + 3K."""
    R = [delta * Lk]
    for i in range(2, kk + 1):
        K = R[-1]
        c_prime = 2 * c2(i - 1, K) + 3 * K
        c_pair = 4 * c2(i, K) + 3 * K  # every split p + j = i gives the same value
        R.append(max(K, c_prime, c_pair))
    return tuple(R)


def constants(k: int, delta: int, L: Union[int, Callable[[int], int]], c2: Callable[[int, int], int]) -> ConstantsTable:
    """Evaluate the radius recursion and C(k) = max(C(k-1), R(k, k)), C(0) = 0.

    ``L`` is a number (used for every k) or a function of k; ``c2`` must be
    nondecreasing in both arguments, which is checked on every argument the
    recursion touches.
    """
    if k < 1 or delta < 1:
        raise ValueError("k and delta must be positive")
    Lf = L if callable(L) else (lambda _k, _v=L: _v)
    Ls = tuple(Lf(kk) for kk in range(1, k + 1))
    if any(v < 1 for v in Ls):
        raise ValueError("L must be positive")
    R: dict[int, tuple[int, ...]] = {}
    C = [0]
    Ks: set[int] = set()
    for kk in range(1, k + 1):
        row = radius_sequence(kk, delta, Ls[kk - 1], c2)
        R[kk] = row
        Ks.update(row)
        C.append(max(C[-1], row[-1]))
    _check_monotone(c2, range(1, k + 1), Ks)
    for kk, row in R.items():
        if list(row) != sorted(row):
            raise AssertionError("radius sequence decreased")
    return ConstantsTable(k, delta, Ls, R, tuple(C), c2)
