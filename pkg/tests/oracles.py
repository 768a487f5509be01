"""Brute-force reference implementations used only by the tests.

Nothing here calls into the package's algorithms: finite groups come from
hand-written permutations, D-infinity from stack cancellation of a's and b's,
Z^2 from exponent sums.
"""

from __future__ import annotations

import itertools
import random
from collections import deque

# permutations are tuples p with p[i] the image of i; products act left to right


def pmul(p, q):
    return tuple(q[i] for i in p)


def pinv(p):
    out = [0] * len(p)
    for i, v in enumerate(p):
        out[v] = i
    return tuple(out)


def pid(n):
    return tuple(range(n))


def cycle_perm(n, *cycles):
    p = list(range(n))
    for c in cycles:
        for i, x in enumerate(c):
            p[x] = c[(i + 1) % len(c)]
    return tuple(p)


def closure(gens, n):
    seen = {pid(n)}
    todo = deque(seen)
    while todo:
        g = todo.popleft()
        for s in gens:
            h = pmul(g, s)
            if h not in seen:
                seen.add(h)
                todo.append(h)
    return seen


class PermRep:
    """A group given by explicit permutations for its generators."""

    def __init__(self, degree, gens):
        self.n = degree
        self.gens = [tuple(g) for g in gens]
        self.elements = closure(self.gens, degree)

    @property
    def order(self):
        return len(self.elements)

    def of(self, word):
        g = pid(self.n)
        for x in word:
            s = self.gens[abs(x) - 1]
            g = pmul(g, s if x > 0 else pinv(s))
        return g

    def least_words(self):
        """Shortlex-least word (a < A < b < B ...) for every element."""
        letters = []
        for k in range(1, len(self.gens) + 1):
            letters += [k, -k]
        best = {pid(self.n): ()}
        frontier = [()]
        while frontier:
            nxt = []
            for w in frontier:
                for x in letters:
                    v = w + (x,)
                    g = self.of(v)
                    if g not in best:
                        best[g] = v
                        nxt.append(v)
            frontier = nxt
        return best

    def generates(self, words):
        return len(closure([self.of(w) for w in words], self.n)) == self.order


# Hand-built faithful permutation representations of the finite corpus groups.
FINITE_REPS = {
    "trivial": lambda: PermRep(1, [(0,)]),
    "z3": lambda: PermRep(3, [cycle_perm(3, (0, 1, 2))]),
    "z5": lambda: PermRep(5, [cycle_perm(5, (0, 1, 2, 3, 4))]),
    "klein4": lambda: PermRep(4, [cycle_perm(4, (0, 1)), cycle_perm(4, (2, 3))]),
    "s3": lambda: PermRep(3, [cycle_perm(3, (0, 1, 2)), cycle_perm(3, (0, 1))]),
    "a5": lambda: PermRep(5, [cycle_perm(5, (0, 1), (2, 3)), cycle_perm(5, (0, 2, 4))]),
}
FINITE_ORDERS = {"trivial": 1, "z3": 3, "z5": 5, "klein4": 4, "s3": 6, "a5": 60}


def relators_hold(rep, relators):
    return all(rep.of(r) == pid(rep.n) for r in relators)


# ------------------------------------------------------------------ D-infinity


def dinf_reduce(word):
    """Normal form in <a, b | a^2, b^2>: drop signs, cancel equal neighbours."""
    out = []
    for x in word:
        x = abs(x)
        if out and out[-1] == x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def dinf_inv(word):
    return tuple(reversed(dinf_reduce(word)))


def dinf_elements(max_len):
    out = [()]
    for n in range(1, max_len + 1):
        for first in (1, 2):
            out.append(tuple(first if i % 2 == 0 else 3 - first for i in range(n)))
    return out


def dinf_bounded_orbits(k, bound):
    """Union-find components of k-tuples of D-inf elements of length <= bound
    under Nielsen moves that stay within the bound."""
    elems = dinf_elements(bound)
    states = list(itertools.product(elems, repeat=k))
    index = {s: i for i, s in enumerate(states)}
    parent = list(range(len(states)))

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for s, i in index.items():
        nbrs = []
        for a in range(k):
            t = list(s)
            t[a] = dinf_inv(s[a])
            nbrs.append(tuple(t))
            for b in range(k):
                if a == b:
                    continue
                t = list(s)
                t[a] = dinf_reduce(s[a] + s[b])
                nbrs.append(tuple(t))
                t = list(s)
                t[a], t[b] = t[b], t[a]
                nbrs.append(tuple(t))
        for t in nbrs:
            j = index.get(t)
            if j is not None:
                ra, rb = find(i), find(j)
                if ra != rb:
                    parent[ra] = rb
    return index, find


# ----------------------------------------------------------------- Z^2 and F_n


def exponent_vector(word, ngens):
    v = [0] * ngens
    for x in word:
        v[abs(x) - 1] += 1 if x > 0 else -1
    return tuple(v)


def z2_least_word(word):
    """Shortlex-least word for an element of Z^2: the multiset of letters a
    geodesic must use, sorted by letter order a < A < b < B."""
    i, j = exponent_vector(word, 2)
    return (1,) * i + (-1,) * (-i) + (2,) * j + (-2,) * (-j)


def free_reduce_ref(word):
    out = []
    for x in word:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def random_word(rng: random.Random, ngens, max_len):
    letters = [x for k in range(1, ngens + 1) for x in (k, -k)]
    return tuple(rng.choice(letters) for _ in range(rng.randint(0, max_len)))


# -------------------------------------------------------------- Nielsen orbits


def nielsen_orbit_count(rep: PermRep, k):
    """Number of Nielsen classes of generating k-tuples, by union-find."""
    elems = sorted(rep.elements)
    tuples = [t for t in itertools.product(elems, repeat=k) if len(closure(list(t), rep.n)) == rep.order]
    index = {t: i for i, t in enumerate(tuples)}
    parent = list(range(len(tuples)))

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for t, i in index.items():
        for a in range(k):
            u = list(t)
            u[a] = pinv(t[a])
            nbrs = [tuple(u)]
            for b in range(k):
                if a != b:
                    u = list(t)
                    u[a] = pmul(t[a], t[b])
                    nbrs.append(tuple(u))
                    u = list(t)
                    u[a], u[b] = u[b], u[a]
                    nbrs.append(tuple(u))
            for u in nbrs:
                ra, rb = find(i), find(index[u])
                if ra != rb:
                    parent[ra] = rb
    return len({find(i) for i in range(len(tuples))}), len(tuples)


# --------------------------------------------------------- finite quotients


def dihedral_quotient(n):
    """D_n on n points: a(i) = -i, b(i) = 1 - i; a hom from <a, b | a^2, b^2>."""
    return PermRep(n, [tuple((-i) % n for i in range(n)), tuple((1 - i) % n for i in range(n))])


def z_x_z2_quotient(m):
    """Z/m x Z/2 on 2m points, a = (0, 1), t = (1, 0)."""
    pts = [(i, e) for i in range(m) for e in range(2)]
    idx = {p: k for k, p in enumerate(pts)}
    a = tuple(idx[(i, 1 - e)] for i, e in pts)
    t = tuple(idx[((i + 1) % m, e)] for i, e in pts)
    return PermRep(2 * m, [a, t])
