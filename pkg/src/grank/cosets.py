"""Todd-Coxeter enumeration, Schreier transversals, Reidemeister-Schreier,
low-index subgroups and normal cores.

Cosets are numbered from 0 (coset 0 is the subgroup itself).  Table columns
follow the letter order a, A, b, B, ...; the column of letter ``x`` is
``letter_rank(x)``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterator, Sequence

from .words import EPSILON, Alphabet, Presentation, Word, letter_rank


def _col(x: int) -> int:
    return letter_rank(x)


def _inv_col(c: int) -> int:
    return c ^ 1


def _letter(c: int) -> int:
    return c // 2 + 1 if c % 2 == 0 else -(c // 2 + 1)


@dataclass(frozen=True)
class Overflow:
    """Coset enumeration hit ``max_cosets`` live cosets; nothing is concluded."""

    max_cosets: int
    defined: int


@dataclass(frozen=True)
class CosetTable:
    presentation: Presentation
    subgens: tuple[Word, ...]
    rows: tuple[tuple[int, ...], ...]

    @property
    def index(self) -> int:
        return len(self.rows)

    def act(self, coset: int, w: Sequence[int]) -> int:
        for x in w:
            coset = self.rows[coset][_col(x)]
        return coset

    def permutations(self) -> list[tuple[int, ...]]:
        """Right action of each generator as a permutation of the cosets."""
        return [tuple(row[2 * i] for row in self.rows) for i in range(self.presentation.ngens)]

    def is_valid(self) -> bool:
        n = self.index
        for row in self.rows:
            if len(row) != 2 * self.presentation.ngens or any(not 0 <= v < n for v in row):
                return False
        for c, row in enumerate(self.rows):
            for col, d in enumerate(row):
                if self.rows[d][_inv_col(col)] != c:
                    return False
        if any(self.act(c, r) != c for c in range(n) for r in self.presentation.relators):
            return False
        return all(self.act(0, w) == 0 for w in self.subgens)


def standardize(rows: Sequence[Sequence[int]], start: int = 0) -> tuple[tuple[int, ...], ...]:
    """Renumber cosets in order of first appearance scanning from ``start``."""
    order = [start]
    seen = {start: 0}
    k = 0
    while k < len(order):
        for d in rows[order[k]]:
            if d not in seen:
                seen[d] = len(order)
                order.append(d)
        k += 1
    return tuple(tuple(seen[d] for d in rows[c]) for c in order)


class _Enumerator:
    """HLT coset enumeration; ``run`` yields once per coset definition."""

    def __init__(self, p: Presentation, subgens: Sequence[Word], max_cosets: int):
        self.p = p
        self.ncols = 2 * p.ngens
        self.subgens = [Word(w) for w in subgens]
        self.max_cosets = max_cosets
        self.table: list[list[int | None]] = [[None] * self.ncols]
        self.parent: list[int] = [0]
        self.live = 1
        self.overflow = False

    def rep(self, c: int) -> int:
        root = c
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[c] != root:
            self.parent[c], c = root, self.parent[c]
        return root

    def alive(self, c: int) -> bool:
        return self.parent[c] == c

    def define(self, c: int, col: int) -> None:
        if self.live >= self.max_cosets:
            self.overflow = True
            return
        d = len(self.table)
        self.table.append([None] * self.ncols)
        self.parent.append(d)
        self.live += 1
        self.table[c][col] = d
        self.table[d][_inv_col(col)] = c

    def _merge(self, a: int, b: int, queue: list[int]) -> None:
        a, b = self.rep(a), self.rep(b)
        if a != b:
            lo, hi = min(a, b), max(a, b)
            self.parent[hi] = lo
            self.live -= 1
            queue.append(hi)

    def coincidence(self, a: int, b: int) -> None:
        queue: list[int] = []
        self._merge(a, b, queue)
        k = 0
        while k < len(queue):
            g = queue[k]
            k += 1
            for col in range(self.ncols):
                d = self.table[g][col]
                if d is None:
                    continue
                ic = _inv_col(col)
                if self.table[d][ic] == g:
                    self.table[d][ic] = None
                mu, nu = self.rep(g), self.rep(d)
                if self.table[mu][col] is not None:
                    self._merge(nu, self.table[mu][col], queue)
                elif self.table[nu][ic] is not None:
                    self._merge(mu, self.table[nu][ic], queue)
                else:
                    self.table[mu][col] = nu
                    self.table[nu][ic] = mu

    def scan_and_fill(self, alpha: int, word: Sequence[int]) -> Iterator[None]:
        cols = [_col(x) for x in word]
        t = self.table
        f, b = alpha, alpha
        i, j = 0, len(cols) - 1
        while True:
            while i <= j and t[f][cols[i]] is not None:
                f = t[f][cols[i]]
                i += 1
            if i > j:
                if f != b:
                    self.coincidence(f, b)
                return
            while j >= i and t[b][_inv_col(cols[j])] is not None:
                b = t[b][_inv_col(cols[j])]
                j -= 1
            if j < i:
                self.coincidence(f, b)
                return
            if i == j:
                t[f][cols[i]] = b
                t[b][_inv_col(cols[i])] = f
                return
            self.define(f, cols[i])
            if self.overflow:
                return
            yield

    def run(self) -> Iterator[None]:
        for w in self.subgens:
            if w:
                yield from self.scan_and_fill(0, w)
                if self.overflow:
                    return
        alpha = 0
        while alpha < len(self.table):
            for r in self.p.relators:
                if not self.alive(alpha):
                    break
                yield from self.scan_and_fill(alpha, r)
                if self.overflow:
                    return
            if self.alive(alpha):
                for col in range(self.ncols):
                    if self.table[alpha][col] is None:
                        self.define(alpha, col)
                        if self.overflow:
                            return
                        yield
            alpha += 1

    def result(self) -> CosetTable | Overflow:
        if self.overflow:
            return Overflow(self.max_cosets, len(self.table))
        live = [c for c in range(len(self.table)) if self.alive(c)]
        rows = {c: [self.rep(d) for d in self.table[c]] for c in live}
        std = standardize(rows, 0)
        return CosetTable(self.p, tuple(self.subgens), std)


def todd_coxeter_steps(p: Presentation, subgens: Sequence[Word], max_cosets: int = 100_000):
    """Generator form of :func:`todd_coxeter`: yields per definition, returns the result."""
    if max_cosets < 1:
        raise ValueError("max_cosets must be >= 1")
    e = _Enumerator(p, subgens, max_cosets)
    yield from e.run()
    return e.result()


def todd_coxeter(p: Presentation, subgens: Sequence[Word], max_cosets: int = 100_000) -> CosetTable | Overflow:
    """Enumerate the cosets of ``<subgens>`` in ``p``; returns a table or :class:`Overflow`."""
    gen = todd_coxeter_steps(p, subgens, max_cosets)
    while True:
        try:
            next(gen)
        except StopIteration as stop:
            return stop.value


def schreier_transversal(t: CosetTable) -> list[Word]:
    """Breadth-first, prefix-closed coset representatives; entry i maps coset 0 to i."""
    reps: list[Word | None] = [None] * t.index
    reps[0] = EPSILON
    queue = deque([0])
    while queue:
        c = queue.popleft()
        for col, d in enumerate(t.rows[c]):
            if reps[d] is None:
                reps[d] = Word(tuple(reps[c]) + (_letter(col),))
                queue.append(d)
    return reps  # type: ignore[return-value]


def membership_via_table(t: CosetTable, w: Sequence[int]) -> bool:
    return t.act(0, w) == 0


@dataclass(frozen=True)
class SubgroupPresentation:
    """Presentation of a subgroup together with what each generator is in the ambient group."""

    presentation: Presentation
    generator_words: tuple[Word, ...]


def _schreier_generators(t: CosetTable, reps: list[Word]) -> dict[tuple[int, int], int]:
    """Map (coset, generator index) of each non-tree edge to a Schreier generator number."""
    tree = set()
    for d in range(1, t.index):
        w = reps[d]
        c = t.act(0, w[:-1])
        x = w[-1]
        if x > 0:
            tree.add((c, x))
        else:
            tree.add((d, -x))
    out = {}
    for c in range(t.index):
        for i in range(1, t.presentation.ngens + 1):
            if (c, i) not in tree:
                out[(c, i)] = len(out) + 1
    return out


def reidemeister_schreier(p: Presentation, t: CosetTable) -> SubgroupPresentation:
    """Presentation of the subgroup on its Schreier generators.

    Relators are the rewrites of ``rep_c * r * rep_c^-1`` for every coset ``c``
    and relator ``r``.
    """
    reps = schreier_transversal(t)
    gens = _schreier_generators(t, reps)
    words = [EPSILON] * len(gens)
    for (c, i), k in gens.items():
        words[k - 1] = reps[c] * Word((i,)) * ~reps[t.rows[c][2 * (i - 1)]]

    def rewrite(c: int, w: Sequence[int]) -> list[int]:
        out = []
        for x in w:
            if x > 0:
                k = gens.get((c, x))
                if k:
                    out.append(k)
                c = t.rows[c][_col(x)]
            else:
                d = t.rows[c][_col(x)]
                k = gens.get((d, -x))
                if k:
                    out.append(-k)
                c = d
        return out

    relators = [Word(rewrite(c, r)) for c in range(t.index) for r in p.relators]
    alphabet = Alphabet.standard(len(gens))
    sub = Presentation(alphabet, tuple(relators), name=f"{p.name or 'G'}-subgroup")
    return SubgroupPresentation(sub, tuple(words))


def _table_with_generators(p: Presentation, rows) -> CosetTable:
    proto = CosetTable(p, (), tuple(tuple(r) for r in rows))
    reps = schreier_transversal(proto)
    gens = _schreier_generators(proto, reps)
    subgens = tuple(
        reps[c] * Word((i,)) * ~reps[proto.rows[c][2 * (i - 1)]] for (c, i) in sorted(gens, key=gens.get)
    )
    return CosetTable(p, subgens, proto.rows)


def low_index_subgroups(p: Presentation, n: int) -> list[CosetTable]:
    """All subgroups of index <= n, one standardized coset table each.

    Backtracking always fills the first undefined entry (row-major), and new
    cosets take the next free number, so every table reached is standardized
    and each subgroup appears exactly once.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    ncols = 2 * p.ngens
    rel_cols = [[_col(x) for x in r] for r in p.relators]
    found: list[CosetTable] = []

    def assign(table, c, col, d) -> bool:
        if table[c][col] is not None:
            return table[c][col] == d
        if table[d][_inv_col(col)] is not None:
            return False
        table[c][col] = d
        table[d][_inv_col(col)] = c
        return True

    def propagate(table) -> bool:
        changed = True
        while changed:
            changed = False
            for c in range(len(table)):
                for cols in rel_cols:
                    f, i = c, 0
                    while i < len(cols) and table[f][cols[i]] is not None:
                        f = table[f][cols[i]]
                        i += 1
                    if i == len(cols):
                        if f != c:
                            return False
                        continue
                    b, j = c, len(cols) - 1
                    while j >= i and table[b][_inv_col(cols[j])] is not None:
                        b = table[b][_inv_col(cols[j])]
                        j -= 1
                    if j < i:
                        if f != b:
                            return False
                    elif i == j:
                        if not assign(table, f, cols[i], b):
                            return False
                        changed = True
        return True

    def search(table):
        for c in range(len(table)):
            for col in range(ncols):
                if table[c][col] is None:
                    targets = list(range(len(table)))
                    if len(table) < n:
                        targets.append(len(table))
                    for d in targets:
                        new = [row[:] for row in table]
                        if d == len(new):
                            new.append([None] * ncols)
                        if assign(new, c, col, d) and propagate(new):
                            search(new)
                    return
        found.append(_table_with_generators(p, table))

    start = [[None] * ncols]
    if propagate(start):
        search(start)
    return found


def normal_core(p: Presentation, t: CosetTable) -> CosetTable:
    """Coset table of the kernel of the action on the cosets of ``t``.

    Its cosets are the elements of the permutation group induced on the cosets,
    so the index is the order of that group.
    """
    perms = t.permutations()
    ident = tuple(range(t.index))
    index = {ident: 0}
    elems = [ident]
    rows: list[list[int]] = []
    k = 0
    while k < len(elems):
        e = elems[k]
        row = []
        for col in range(2 * p.ngens):
            x = _letter(col)
            pi = perms[abs(x) - 1]
            if x > 0:
                f = tuple(pi[v] for v in e)
            else:
                inv = [0] * len(pi)
                for a, b in enumerate(pi):
                    inv[b] = a
                f = tuple(inv[v] for v in e)
            if f not in index:
                index[f] = len(elems)
                elems.append(f)
            row.append(index[f])
        rows.append(row)
        k += 1
    return _table_with_generators(p, standardize(rows, 0))


def conjugate_table(t: CosetTable, w: Sequence[int]) -> CosetTable:
    """Table of ``w^-1 H w``: the same action re-rooted at coset ``0·w``."""
    rows = standardize(t.rows, t.act(0, w))
    return _table_with_generators(t.presentation, rows)
