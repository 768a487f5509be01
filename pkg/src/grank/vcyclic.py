"""Relative rank in virtually cyclic groups.

An infinite virtually cyclic group G has a finite normal subgroup N with
G/N infinite cyclic or infinite dihedral.  Once N, a quotient map and
sections are known (and checked with a word-problem oracle), every element
has a unique normal form n·sec(q), and generation questions become finite
computations in N.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import gcd
from typing import Sequence

from .cosets import Overflow, todd_coxeter
from .dovetail import Exhausted, words_in_shortlex
from .nielsen import DINF, _constructive_trace, _dihedral_subgroup
from .rewrite import FiniteGroup, GroupOracle
from .words import (
    EPSILON,
    N1,
    N3,
    NielsenMove,
    Presentation,
    Word,
    abelian_invariants,
    relation_matrix,
    replay,
    right_multiply,
)

CYCLIC, DIHEDRAL = "infinite-cyclic", "infinite-dihedral"


@dataclass(frozen=True)
class VCLimits:
    max_order: int = 256
    max_vector: int = 3
    max_image_length: int = 3
    section_length: int = 8


# -------------------------------------------------------------- quotient maps


class Quotient:
    """Z (elements are ints) or D-infinity (affine pairs), with section words."""

    def __init__(self, kind: str):
        self.kind = kind

    @property
    def identity(self):
        return 0 if self.kind == CYCLIC else (1, 0)

    def mul(self, q1, q2):
        return q1 + q2 if self.kind == CYCLIC else DINF.compose(q1, q2)

    def inv(self, q):
        return -q if self.kind == CYCLIC else DINF.invert(q)

    def letters(self, q) -> tuple[int, ...]:
        """Section word for q over section letters (1 = x or s, 2 = t; -1 = x^-1)."""
        if self.kind == CYCLIC:
            return (1,) * q if q >= 0 else (-1,) * (-q)
        return tuple(DINF.word(q))

    def generates(self, qs) -> bool:
        if self.kind == CYCLIC:
            d = 0
            for q in qs:
                d = gcd(d, q)
            return d == 1
        d, refl = _dihedral_subgroup(list(qs))
        return bool(refl) and d == 1

    def canonical_moves(self, qs) -> list[NielsenMove]:
        """Nielsen moves taking a generating tuple to (1, 0, ...) or (a, b, 1, ...)."""
        qs = list(qs)
        if self.kind == DIHEDRAL:
            return _constructive_trace(tuple(qs))
        moves: list[NielsenMove] = []

        def do(ms):
            nonlocal qs
            for m in ms:
                qs = list(replay(qs, [m], lambda u, v: u + v, lambda u: -u))
                moves.append(m)

        while sum(1 for q in qs if q) > 1:
            live = [j for j, q in enumerate(qs) if q]
            p = min(live, key=lambda j: (abs(qs[j]), j))
            for j in live:
                if j != p:
                    quo = qs[j] // qs[p]
                    for _ in range(abs(quo)):
                        do(right_multiply(j, p, 1 if quo < 0 else -1))
        p = next(j for j, q in enumerate(qs) if q)
        if qs[p] == -1:
            do([N1(p)])
        if p != 0:
            do([N3(0, p)])
        return moves


def _eval_map(kind: str, images, w) -> object:
    q = Quotient(kind)
    out = q.identity
    for x in w:
        g = images[abs(x) - 1]
        out = q.mul(out, g if x > 0 else q.inv(g))
    return out


def _cyclic_maps(p: Presentation, limits: VCLimits):
    rows = relation_matrix(p)
    n = p.ngens
    for bound in range(1, limits.max_vector + 1):
        values = sorted(range(-bound, bound + 1), key=lambda c: (abs(c), c < 0))
        for v in itertools.product(values, repeat=n):
            if max(abs(c) for c in v) != bound:
                continue
            g = 0
            for c in v:
                g = gcd(g, c)
            if g != 1:
                continue
            if all(sum(a * b for a, b in zip(r, v)) == 0 for r in rows):
                yield v


def _dihedral_maps(p: Presentation, limits: VCLimits):
    pool = [(1, 0)]
    for w in words_in_shortlex(2, limits.max_image_length):
        if DINF.normal_form(w) == w:
            pool.append(DINF.element(w))
    pool = list(dict.fromkeys(pool))
    for images in itertools.product(pool, repeat=p.ngens):
        if not Quotient(DIHEDRAL).generates(images):
            continue
        if all(_eval_map(DIHEDRAL, images, r) == (1, 0) for r in p.relators):
            yield images


# ---------------------------------------------------------------- structure


@dataclass
class VCStructure:
    """Certified decomposition of an infinite virtually cyclic group.

    ``elements[i]`` is a word for the i-th element of N (element 0 is the
    identity) and ``table[i][j]`` indexes their product.  ``sections`` are
    words in the group's generators: (x,) or (s, t).  ``action[y][i]`` indexes
    sec_y · n_i · sec_y^-1; for y = x both directions are stored under 1 and -1.
    ``squares`` holds the indices of s^2 and t^2 in the dihedral case.
    ``generator_parts[g]`` = (n, q) with generator g+1 = n_n · sec(q).
    """

    presentation: Presentation
    kind: str
    images: tuple
    elements: list[Word]
    table: list[list[int]]
    sections: tuple[Word, ...]
    action: dict[int, list[int]]
    squares: tuple[int, ...]
    generator_parts: list[tuple[int, object]]
    quotient: Quotient = field(init=False)

    def __post_init__(self):
        self.quotient = Quotient(self.kind)
        self._inv = [row.index(0) for row in self.table]

    @property
    def order_n(self) -> int:
        return len(self.elements)

    def n_mul(self, i: int, j: int) -> int:
        return self.table[i][j]

    def n_inv(self, i: int) -> int:
        return self._inv[i]

    def act(self, letters: Sequence[int], m: int) -> int:
        """Index of sec(letters) · n_m · sec(letters)^-1."""
        for y in reversed(letters):
            m = self.action[y][m]
        return m

    # model elements are pairs (n, q) meaning n_n · sec(q)

    def mul(self, g, h):
        n1, q1 = g
        n2, q2 = h
        n = self.n_mul(n1, self.act(self.quotient.letters(q1), n2))
        if self.kind == DIHEDRAL:
            # collect sec(q1) sec(q2) into c · sec(q1 q2)
            stack = list(self.quotient.letters(q1))
            for y in self.quotient.letters(q2):
                if stack and stack[-1] == y:
                    stack.pop()
                    n = self.n_mul(n, self.act(stack, self.squares[y - 1]))
                else:
                    stack.append(y)
        return (n, self.quotient.mul(q1, q2))

    def inv(self, g):
        n, q = g
        qi = self.quotient.inv(q)
        for m in range(self.order_n):
            if self.mul(g, (m, qi)) == (0, self.quotient.identity):
                return (m, qi)
        raise AssertionError("model element without inverse")

    @property
    def identity(self):
        return (0, self.quotient.identity)

    def element(self, w: Sequence[int]):
        out = self.identity
        for x in w:
            g = self.generator_parts[abs(x) - 1]
            out = self.mul(out, g if x > 0 else self.inv(g))
        return out

    def n_element(self, m: int):
        return (m, self.quotient.identity)

    def word(self, g) -> Word:
        n, q = g
        sec = EPSILON
        for y in self.quotient.letters(q):
            sec = sec * (self.sections[abs(y) - 1] if y > 0 else ~self.sections[abs(y) - 1])
        return self.elements[n] * sec

    def conj_action(self, h) -> list[int]:
        """Permutation of N induced by m -> h m h^-1."""
        hi = self.inv(h)
        return [self.mul(self.mul(h, self.n_element(m)), hi)[0] for m in range(self.order_n)]

    def oracle(self) -> "VCOracle":
        return VCOracle(self)


class VCOracle(GroupOracle):
    def __init__(self, st: VCStructure):
        self.st = st
        self.ngens = st.presentation.ngens

    def is_trivial(self, w):
        return self.st.element(w) == self.st.identity


def _find_sections(kind: str, images, ngens: int, limits: VCLimits) -> tuple[Word, ...] | None:
    targets = [1] if kind == CYCLIC else [DINF.A, DINF.B]
    found: dict = {}
    for w in itertools.chain([EPSILON], words_in_shortlex(ngens, limits.section_length)):
        q = _eval_map(kind, images, w)
        if q in targets and q not in found:
            found[q] = w
            if len(found) == len(targets):
                return tuple(found[q] for q in targets)
    return None


class _Closure:
    """Finite set of words closed under products, deduplicated through the oracle."""

    def __init__(self, oracle: GroupOracle, max_order: int):
        self.oracle = oracle
        self.max_order = max_order
        self.words: list[Word] = []
        self.keys: dict = {}

    def find(self, w: Word) -> int | None:
        if self.oracle.shortlex:
            return self.keys.get(self.oracle.normal_form(w))
        for k, u in enumerate(self.words):
            if self.oracle.is_trivial(w * ~u):
                return k
        return None

    def add(self, w: Word) -> int:
        k = self.find(w)
        if k is not None:
            return k
        if len(self.words) >= self.max_order:
            raise OverflowError
        w = self.oracle.normal_form(w) if self.oracle.shortlex else w
        self.words.append(w)
        if self.oracle.shortlex:
            self.keys[w] = len(self.words) - 1
        return len(self.words) - 1


def _build(p, oracle, kind, images, limits) -> VCStructure | None:
    q = Quotient(kind)
    sections = _find_sections(kind, images, p.ngens, limits)
    if sections is None:
        return None

    def sec_word(qq) -> Word:
        out = EPSILON
        for y in q.letters(qq):
            out = out * (sections[abs(y) - 1] if y > 0 else ~sections[abs(y) - 1])
        return out

    cl = _Closure(oracle, limits.max_order)
    try:
        cl.add(EPSILON)
        for i in range(p.ngens):
            cl.add(Word((i + 1,)) * ~sec_word(images[i]))
        if kind == DIHEDRAL:
            for s in sections:
                cl.add(s * s)
        conj = [(1, sections[0])] if kind == CYCLIC else [(1, sections[0]), (2, sections[1])]
        if kind == CYCLIC:
            conj.append((-1, ~sections[0]))
        k = 0
        while k < len(cl.words):
            # products with earlier elements in both orders, then conjugates
            for j in range(k + 1):
                cl.add(cl.words[k] * cl.words[j])
                cl.add(cl.words[j] * cl.words[k])
            for _, y in conj:
                cl.add(y * cl.words[k] * ~y)
            k += 1
    except OverflowError:
        return None
    words = cl.words
    table = [[cl.find(u * v) for v in words] for u in words]
    action = {label: [cl.find(y * u * ~y) for u in words] for label, y in conj}
    squares = tuple(cl.find(s * s) for s in sections) if kind == DIHEDRAL else ()
    parts = [(cl.find(Word((i + 1,)) * ~sec_word(images[i])), images[i]) for i in range(p.ngens)]
    st = VCStructure(p, kind, tuple(images), words, table, sections, action, squares, parts)
    return st if verify_structure(st, oracle) else None


def verify_structure(st: VCStructure, oracle: GroupOracle) -> bool:
    """Recheck every recorded identity with the oracle and the quotient map."""
    p, q = st.presentation, st.quotient
    if any(_eval_map(st.kind, st.images, r) != q.identity for r in p.relators):
        return False
    expected = [1] if st.kind == CYCLIC else [DINF.A, DINF.B]
    if [_eval_map(st.kind, st.images, s) for s in st.sections] != expected:
        return False
    w = st.elements
    if not oracle.is_trivial(w[0]):
        return False
    for i, u in enumerate(w):
        if _eval_map(st.kind, st.images, u) != q.identity:
            return False
        for j in range(i):
            if oracle.is_trivial(u * ~w[j]):
                return False
        for j, v in enumerate(w):
            k = st.table[i][j]
            if k is None or not oracle.equal(u * v, w[k]):
                return False
    labels = {1: st.sections[0]}
    if st.kind == CYCLIC:
        labels[-1] = ~st.sections[0]
    else:
        labels[2] = st.sections[1]
    for label, y in labels.items():
        row = st.action[label]
        if None in row or sorted(row) != list(range(len(w))):
            return False
        if not all(oracle.equal(y * w[i] * ~y, w[row[i]]) for i in range(len(w))):
            return False
    for k, s in enumerate(st.squares):
        if s is None or not oracle.equal(st.sections[k] * st.sections[k], w[s]):
            return False
    for i, (n, qq) in enumerate(st.generator_parts):
        if n is None or not oracle.equal(Word((i + 1,)), st.word((n, qq))):
            return False
    return True


def find_vc_structure(
    p: Presentation, oracle: GroupOracle, limits: VCLimits = VCLimits()
) -> VCStructure | Exhausted:
    """Search for a finite normal N with infinite cyclic or dihedral quotient.

    Quotient maps come from the abelianization (maps onto Z) or from small
    generator images in D-infinity; N is the closure of the generators'
    section defects, and the result is accepted only after every identity is
    rechecked by :func:`verify_structure`.
    """
    free, _ = abelian_invariants(p)
    if free > 1:
        return Exhausted(0, f"abelianization has free rank {free}; no virtually cyclic structure")
    tried = 0
    maps = _cyclic_maps(p, limits) if free == 1 else _dihedral_maps(p, limits)
    kind = CYCLIC if free == 1 else DIHEDRAL
    for images in maps:
        tried += 1
        st = _build(p, oracle, kind, images, limits)
        if st is not None:
            return st
    return Exhausted(tried, f"no {kind} quotient with finite kernel within limits")


# ---------------------------------------------------------------- generation


def _closure_in_n(st: VCStructure, seeds: Sequence[int], perms: Sequence[list[int]]) -> set[int]:
    seen = {0}
    frontier = [0]
    gens = set(seeds)
    # close the seed set under the permutations first, then under products
    todo = list(gens)
    while todo:
        m = todo.pop()
        for perm in perms:
            if perm[m] not in gens:
                gens.add(perm[m])
                todo.append(perm[m])
    while frontier:
        nxt = []
        for e in frontier:
            for g in gens:
                f = st.n_mul(e, g)
                if f not in seen:
                    seen.add(f)
                    nxt.append(f)
        frontier = nxt
    return seen


def generates_elements(st: VCStructure, elems: Sequence) -> bool:
    """Decide whether model elements generate G."""
    q = st.quotient
    qs = [e[1] for e in elems]
    if not q.generates(qs):
        return False
    moves = q.canonical_moves(qs)
    t = replay(tuple(elems), moves, st.mul, st.inv)
    if st.kind == CYCLIC:
        h = t[0]
        perms = [st.conj_action(h), st.conj_action(st.inv(h))]
        seeds = [e[0] for e in t[1:]]
    else:
        ha, hb = t[0], t[1]
        perms = [st.conj_action(ha), st.conj_action(hb)]
        seeds = [e[0] for e in t[2:]] + [st.mul(ha, ha)[0], st.mul(hb, hb)[0]]
    return len(_closure_in_n(st, seeds, perms)) == st.order_n


def generates_vc(st: VCStructure, t: Sequence[Sequence[int]]) -> bool:
    return generates_elements(st, [st.element(w) for w in t])


# -------------------------------------------------------------- relative rank


def _z_image_kind(st: VCStructure, zs) -> str:
    """'trivial', 'order-two' or 'infinite' for the quotient image of <Z>."""
    qs = [z[1] for z in zs if z[1] != st.quotient.identity]
    if not qs:
        return "trivial"
    if st.kind == CYCLIC:
        return "infinite"
    if any(e == 1 for e, _ in qs) or len({m for _, m in qs}) > 1:
        return "infinite"
    return "order-two"


def _candidate_tuples(st: VCStructure, zs, k: int):
    """Prefixes (f1..fk) of the finite families covering all generating tuples."""
    q = st.quotient
    kind = _z_image_kind(st, zs)
    N = range(st.order_n)
    if kind == "infinite":
        raise ValueError("Z generates an infinite subgroup")
    if st.kind == CYCLIC:
        if k < 1:
            return
        x = (0, 1)
        for ns in itertools.product(N, repeat=k):
            yield (st.mul(x, st.n_element(ns[0])),) + tuple(st.n_element(n) for n in ns[1:])
    elif kind == "trivial":
        if k < 2:
            return
        s, t = (0, DINF.A), (0, DINF.B)
        for ns in itertools.product(N, repeat=k):
            yield (st.mul(s, st.n_element(ns[0])), st.mul(t, st.n_element(ns[1]))) + tuple(
                st.n_element(n) for n in ns[2:]
            )
    else:
        if k < 1:
            return
        s, t = (0, DINF.A), (0, DINF.B)
        stt = st.mul(s, t)
        for ns in itertools.product(N, repeat=k):
            yield (st.mul(stt, st.n_element(ns[0])),) + tuple(st.n_element(n) for n in ns[1:])


def vc_nielsen_representatives(st: VCStructure, Z: Sequence[Sequence[int]], k: int) -> list[tuple[Word, ...]]:
    """Finite list of tuples (f1..fk, Z) such that every generating (g1..gk, Z) is Nielsen-equivalent to one."""
    zs = [st.element(z) for z in Z]
    zw = tuple(Word(z) for z in Z)
    if k == 0:
        return [zw]
    return [tuple(st.word(f) for f in fs) + zw for fs in _candidate_tuples(st, zs, k)]


@dataclass(frozen=True)
class RelativeRank:
    rank: int
    witness: tuple[Word, ...]
    method: str


def relative_rank_finite(g: FiniteGroup, zs: Sequence[int], max_tuples: int = 2_000_000) -> tuple[int, tuple[int, ...]]:
    """Least k and a k-tuple of element indices that together with ``zs`` generate g."""
    for k in itertools.count():
        if g.order**k > max_tuples:
            raise ValueError(f"relative rank search beyond {max_tuples} tuples")
        for t in itertools.product(range(g.order), repeat=k):
            if len(g.subgroup(list(t) + list(zs))) == g.order:
                return k, t
    raise AssertionError("unreachable")


def _normal_power(st: VCStructure, h, bound: int = 1_000) -> int | None:
    """Least j with <h^j> normal in G (every generator conjugates h^j to h^±j)."""
    power = h
    for j in range(1, bound + 1):
        ok = True
        for gp in st.generator_parts:
            c = st.mul(st.mul(gp, power), st.inv(gp))
            if c != power and c != st.inv(power):
                ok = False
                break
        if ok:
            return j
        power = st.mul(power, h)
    return None


def relative_rank_vc(st: VCStructure, Z: Sequence[Sequence[int]]) -> RelativeRank:
    """Least k such that some (g1..gk, Z) generates G, with a witness tuple."""
    zs = [st.element(z) for z in Z]
    if _z_image_kind(st, zs) == "infinite":
        return _relative_rank_via_quotient(st, Z, zs)
    if generates_elements(st, zs):
        return RelativeRank(0, (), "Z generates")
    for k in itertools.count(1):
        for fs in _candidate_tuples(st, zs, k):
            if generates_elements(st, list(fs) + zs):
                return RelativeRank(k, tuple(st.word(f) for f in fs), st.kind)
        if k > st.order_n + 2:
            raise AssertionError("candidate families failed to generate; structure is inconsistent")
    raise AssertionError("unreachable")


def _relative_rank_via_quotient(st: VCStructure, Z, zs) -> RelativeRank:
    """<Z> has finite index: pass to G/<h^j> for an infinite-order h in <Z>.

    <h^j> is normal and contained in <Z>, so (g, Z) generates G iff the
    images generate the finite quotient.
    """
    q = st.quotient
    moving = [z for z in zs if z[1] != q.identity]
    if st.kind == CYCLIC:
        h = moving[0]
    else:
        trans = [z for z in moving if z[1][0] == 1]
        if trans:
            h = trans[0]
        else:
            h = st.mul(moving[0], next(z for z in moving if z[1] != moving[0][1]))
    j = _normal_power(st, h)
    if j is None:
        raise ValueError("no normal power of the infinite-order element found")
    hj = st.identity
    for _ in range(j):
        hj = st.mul(hj, h)
    p = st.presentation
    quotient = Presentation(p.alphabet, p.relators + (st.word(hj),), name=f"{p.name}/<h^{j}>")
    table = todd_coxeter(quotient, [])
    if isinstance(table, Overflow):
        raise ValueError("finite quotient did not close")
    g = FiniteGroup.from_coset_table(table)
    k, t = relative_rank_finite(g, [g.element(z) for z in Z])
    return RelativeRank(k, tuple(g.words[e] for e in t), "finite quotient by a normal infinite cyclic subgroup")
