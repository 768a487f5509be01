"""Stallings foldings for finitely generated subgroups of free groups."""

from __future__ import annotations

from typing import Sequence

from .words import Word


class FoldedGraph:
    """Folded core graph of ``<words>`` in the free group on ``ngens`` generators.

    Vertex 0 is the base point.  ``edges[v]`` maps a signed letter to the
    target vertex; the graph is deterministic after folding.
    """

    def __init__(self, words: Sequence[Sequence[int]], ngens: int | None = None):
        words = [Word(w) for w in words if Word(w)]
        self.ngens = ngens or max((abs(x) for w in words for x in w), default=0)
        self.parent: list[int] = [0]
        self.out: list[dict[int, set[int]]] = [{}]
        for w in words:
            v = 0
            for k, x in enumerate(w):
                u = 0 if k == len(w) - 1 else self._new()
                self._edge(v, x, u)
                v = u
        self._fold()
        self._compact()

    def _new(self) -> int:
        self.parent.append(len(self.parent))
        self.out.append({})
        return len(self.parent) - 1

    def _edge(self, v: int, x: int, u: int) -> None:
        self.out[v].setdefault(x, set()).add(u)
        self.out[u].setdefault(-x, set()).add(v)

    def _find(self, v: int) -> int:
        while self.parent[v] != v:
            self.parent[v] = self.parent[self.parent[v]]
            v = self.parent[v]
        return v

    def _fold(self) -> None:
        changed = True
        while changed:
            changed = False
            for v in range(len(self.out)):
                if self._find(v) != v:
                    continue
                for x in list(self.out[v]):
                    if self._find(v) != v:
                        break
                    targets = {self._find(u) for u in self.out[v][x]}
                    self.out[v][x] = targets
                    if len(targets) <= 1:
                        continue
                    keep, *rest = sorted(targets)
                    for u in rest:
                        self.parent[u] = keep
                        for y, ws in self.out[u].items():
                            self.out[keep].setdefault(y, set()).update(ws)
                        self.out[u] = {}
                    changed = True

    def _compact(self) -> None:
        live = sorted({self._find(v) for v in range(len(self.out))}, key=lambda v: (v != 0, v))
        live = [v for v in live if v == 0 or self.out[v]]
        renum = {v: i for i, v in enumerate(live)}
        edges: list[dict[int, int]] = []
        for v in live:
            e = {}
            for x, us in self.out[v].items():
                us = {self._find(u) for u in us}
                if us:
                    (u,) = us
                    e[x] = renum[u]
            edges.append(e)
        self.edges = edges

    @property
    def nvertices(self) -> int:
        return len(self.edges)

    @property
    def nedges(self) -> int:
        return sum(1 for e in self.edges for x in e if x > 0)

    def rank(self) -> int:
        """Rank of the subgroup: E - V + 1 of the core graph."""
        return self.nedges - self.nvertices + 1

    def read(self, w: Sequence[int]) -> int | None:
        v = 0
        for x in w:
            v = self.edges[v].get(x)
            if v is None:
                return None
        return v

    def contains(self, w: Sequence[int]) -> bool:
        return self.read(Word(w)) == 0

    def is_complete(self) -> bool:
        return all(len(e) == 2 * self.ngens for e in self.edges)

    def index(self) -> int | None:
        """Index in the ambient free group, or None when infinite."""
        return self.nvertices if self.is_complete() else None


def folding_membership(subgens: Sequence[Sequence[int]], ngens: int | None = None):
    """Return a membership predicate for ``<subgens>`` in a free group."""
    g = FoldedGraph(subgens, ngens)
    return g.contains
