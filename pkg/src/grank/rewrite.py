"""Shortlex Knuth-Bendix completion and word-problem oracles.

Every oracle answers ``is_trivial``; most also give ``normal_form`` and
``enumerate_ball``.  Oracles whose normal forms are shortlex-least words set
``shortlex = True``, which makes ``len(normal_form(w))`` a geodesic length.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .words import EPSILON, Alphabet, Presentation, Word, letter_rank


class CapabilityError(RuntimeError):
    """The oracle cannot answer this kind of question."""


# ------------------------------------------------------------------ shortlex


@dataclass(frozen=True)
class ShortlexOrder:
    """Shortlex order on words over ``ngens`` generators with a < A < b < B < ..."""

    ngens: int

    def key(self, w: Sequence[int]) -> tuple:
        return (len(w), tuple(letter_rank(x) for x in w))

    def less(self, u: Sequence[int], v: Sequence[int]) -> bool:
        return self.key(u) < self.key(v)

    def encode(self, w: Sequence[int]) -> str:
        return "".join(chr(0x100 + letter_rank(x)) for x in w)

    def decode(self, s: str) -> Word:
        return Word(self.letters(s))

    def letters(self, s: str) -> tuple[int, ...]:
        """Decode without free reduction (rule sides such as ``aA`` stay intact)."""
        out = []
        for ch in s:
            r = ord(ch) - 0x100
            out.append(-(r // 2 + 1) if r % 2 else r // 2 + 1)
        return tuple(out)


def _sl(s: str) -> tuple:
    return (len(s), s)


@dataclass(frozen=True)
class RewriteRule:
    """``lhs -> rhs`` with ``rhs`` shortlex-smaller; sides are raw letter tuples."""

    lhs: tuple[int, ...]
    rhs: tuple[int, ...]


@dataclass(frozen=True)
class KBLimits:
    max_rules: int = 400
    max_rule_length: int = 40
    max_steps: int = 200_000


@dataclass
class RewritingSystem:
    presentation: Presentation
    rules: list[RewriteRule]
    status: str  # "confluent" | "incomplete"
    steps: int = 0
    _encoded: list[tuple[str, str]] = field(default_factory=list, repr=False)

    @property
    def confluent(self) -> bool:
        return self.status == "confluent"

    def reduce(self, w: Sequence[int]) -> Word:
        """Rewrite to an irreducible word (valid for any status)."""
        order = ShortlexOrder(self.presentation.ngens)
        return order.decode(_reduce(order.encode(Word(w)), self._encoded))

    def is_irreducible(self, w: Sequence[int]) -> bool:
        s = ShortlexOrder(self.presentation.ngens).encode(w)
        return not any(lhs in s for lhs, _ in self._encoded)


def _reduce(s: str, rules: Sequence[tuple[str, str]]) -> str:
    changed = True
    while changed:
        changed = False
        for lhs, rhs in rules:
            if lhs in s:
                s = s.replace(lhs, rhs)
                changed = True
    return s


def knuth_bendix(p: Presentation, limits: KBLimits = KBLimits()) -> RewritingSystem:
    """Shortlex completion of ``p`` (monoid rules include the free cancellations).

    Critical pairs are resolved in shortlex order of their overlap words, so the
    output is a deterministic function of the presentation and limits.
    """
    if min(limits.max_rules, limits.max_rule_length, limits.max_steps) < 1:
        raise ValueError("limits must be positive")
    order = ShortlexOrder(p.ngens)
    rules: dict[str, str] = {}
    dropped = False
    steps = 0

    def rule_list():
        return sorted(rules.items(), key=lambda kv: _sl(kv[0]))

    def add_equation(u: str, v: str) -> bool:
        """Orient and add u = v, then re-reduce only the rules the new one touches."""
        nonlocal dropped
        pending = [(u, v)]
        added = False
        while pending:
            u, v = pending.pop()
            current = rule_list()
            u, v = _reduce(u, current), _reduce(v, current)
            if u == v:
                continue
            lhs, rhs = (u, v) if _sl(u) > _sl(v) else (v, u)
            if len(lhs) > limits.max_rule_length:
                dropped = True
                continue
            for l2 in [l2 for l2 in rules if lhs in l2]:
                pending.append((l2, rules.pop(l2)))
            rules[lhs] = rhs
            for l2, r2 in list(rules.items()):
                if l2 != lhs and lhs in r2:
                    rules[l2] = _reduce(r2, rule_list())
            added = True
        return added

    for x in Alphabet.standard(p.ngens).letters:
        add_equation(order.encode((x, -x)), "")
    for r in p.relators:
        add_equation(order.encode(r), "")

    resolved: set[tuple[str, str, str, str]] = set()
    status = "confluent"
    while True:
        current = rule_list()
        pairs = []
        for (l1, r1), (l2, r2) in itertools.product(current, repeat=2):
            if (l1, r1, l2, r2) in resolved:
                continue
            for k in range(1, min(len(l1), len(l2))):
                if l1[-k:] == l2[:k]:
                    pairs.append((_sl(l1 + l2[k:]), r1 + l2[k:], l1[:-k] + r2))
            resolved.add((l1, r1, l2, r2))
        if not pairs:
            break
        pairs.sort()
        for _, u, v in pairs:
            steps += 1
            add_equation(u, v)
            if len(rules) > limits.max_rules or steps > limits.max_steps:
                status = "incomplete"
                break
        if status == "incomplete":
            break
        # pairs whose rules vanished during interreduction are dropped from bookkeeping
        live = set(rules.items())
        resolved = {q for q in resolved if (q[0], q[1]) in live and (q[2], q[3]) in live}
    if dropped:
        status = "incomplete"
    encoded = rule_list()
    return RewritingSystem(
        presentation=p,
        rules=[RewriteRule(order.letters(l), order.letters(r)) for l, r in encoded],
        status=status,
        steps=steps,
        _encoded=encoded,
    )


def normal_form(rws: RewritingSystem, w: Sequence[int]) -> Word:
    if not rws.confluent:
        raise CapabilityError("normal forms need a confluent rewriting system")
    return rws.reduce(w)


def irreducible_words(rws: RewritingSystem, radius: int) -> Iterator[Word]:
    """Irreducible words of length <= radius in shortlex order."""
    order = ShortlexOrder(rws.presentation.ngens)
    letters = [order.encode((x,)) for x in Alphabet.standard(rws.presentation.ngens).letters]
    lhss = [l for l, _ in rws._encoded]
    level = [""]
    yield EPSILON
    for _ in range(radius):
        nxt = []
        for s in level:
            for c in letters:
                t = s + c
                if not any(t.endswith(l) for l in lhss):
                    nxt.append(t)
        for t in nxt:
            yield order.decode(t)
        level = nxt


# -------------------------------------------------------------------- oracles


class GroupOracle:
    """Word-problem capability for a group on ``ngens`` generators."""

    ngens: int
    shortlex: bool = False

    def is_trivial(self, w: Sequence[int]) -> bool:
        raise NotImplementedError

    def normal_form(self, w: Sequence[int]) -> Word:
        raise CapabilityError(f"{type(self).__name__} has no normal forms")

    def enumerate_ball(self, radius: int) -> Iterator[Word]:
        """Normal forms of all elements of geodesic length <= radius."""
        if not self.shortlex:
            raise CapabilityError(f"{type(self).__name__} cannot enumerate balls")
        letters = Alphabet.standard(self.ngens).letters
        seen = {EPSILON}
        frontier = [EPSILON]
        yield EPSILON
        for _ in range(radius):
            nxt = []
            for v in frontier:
                for x in letters:
                    u = self.normal_form(v * Word((x,)))
                    if u not in seen:
                        seen.add(u)
                        nxt.append(u)
            nxt.sort(key=ShortlexOrder(self.ngens).key)
            yield from nxt
            frontier = nxt

    def equal(self, u: Sequence[int], v: Sequence[int]) -> bool:
        return self.is_trivial(Word(u) * ~Word(v))


class FreeGroupOracle(GroupOracle):
    shortlex = True

    def __init__(self, ngens: int):
        self.ngens = ngens

    def is_trivial(self, w):
        return not Word(w)

    def normal_form(self, w):
        return Word(w)

    def enumerate_ball(self, radius):
        letters = Alphabet.standard(self.ngens).letters
        level = [EPSILON]
        yield EPSILON
        for _ in range(radius):
            level = [v * Word((x,)) for v in level for x in letters if not v or v[-1] != -x]
            yield from level


class RewritingOracle(GroupOracle):
    shortlex = True

    def __init__(self, rws: RewritingSystem):
        if not rws.confluent:
            raise CapabilityError("an incomplete rewriting system is not an oracle")
        self.rws = rws
        self.ngens = rws.presentation.ngens

    def is_trivial(self, w):
        return not self.rws.reduce(w)

    def normal_form(self, w):
        return self.rws.reduce(w)

    def enumerate_ball(self, radius):
        return irreducible_words(self.rws, radius)


class FiniteGroup(GroupOracle):
    """Finite group given by generator permutations (right action).

    Elements are indexed 0..order-1 in BFS order, so ``words[i]`` is the
    shortlex-least word for element ``i`` and element 0 is the identity.
    """

    shortlex = True

    def __init__(self, perms: Sequence[Sequence[int]], max_order: int = 100_000):
        self.ngens = len(perms)
        degree = len(perms[0]) if perms else 1
        gen_perms = [tuple(p) for p in perms]
        letter_perms = {}
        for i, p in enumerate(gen_perms, start=1):
            inv = [0] * degree
            for a, b in enumerate(p):
                inv[b] = a
            letter_perms[i] = p
            letter_perms[-i] = tuple(inv)
        self._letter_perms = letter_perms
        ident = tuple(range(degree))
        self.elements: list[tuple[int, ...]] = [ident]
        self.words: list[Word] = [EPSILON]
        self.index = {ident: 0}
        letters = Alphabet.standard(self.ngens).letters
        k = 0
        while k < len(self.elements):
            e = self.elements[k]
            for x in letters:
                p = letter_perms[x]
                f = tuple(p[v] for v in e)
                if f not in self.index:
                    if len(self.elements) >= max_order:
                        raise ValueError(f"group order exceeds {max_order}")
                    self.index[f] = len(self.elements)
                    self.elements.append(f)
                    self.words.append(Word(tuple(self.words[k]) + (x,)))
            k += 1
        self._mul: dict[tuple[int, int], int] = {}
        self._letter_index = {
            x: self.index[letter_perms[x]] for x in letters
        }

    @classmethod
    def from_coset_table(cls, table) -> "FiniteGroup":
        return cls(table.permutations())

    @classmethod
    def from_presentation(cls, p: Presentation, max_cosets: int = 100_000) -> "FiniteGroup":
        from .cosets import todd_coxeter, Overflow

        t = todd_coxeter(p, [], max_cosets=max_cosets)
        if isinstance(t, Overflow):
            raise ValueError(f"{p} has no finite coset table within {max_cosets} cosets")
        return cls.from_coset_table(t)

    @property
    def order(self) -> int:
        return len(self.elements)

    def element(self, w: Sequence[int]) -> int:
        e = self.elements[0]
        for x in w:
            p = self._letter_perms[x]
            e = tuple(p[v] for v in e)
        return self.index[e]

    def mul(self, i: int, j: int) -> int:
        key = (i, j)
        if key not in self._mul:
            a, b = self.elements[i], self.elements[j]
            self._mul[key] = self.index[tuple(b[v] for v in a)]
        return self._mul[key]

    def inv(self, i: int) -> int:
        a = self.elements[i]
        out = [0] * len(a)
        for u, v in enumerate(a):
            out[v] = u
        return self.index[tuple(out)]

    def is_trivial(self, w):
        return self.element(w) == 0

    def normal_form(self, w):
        return self.words[self.element(w)]

    def enumerate_ball(self, radius):
        return (w for w in self.words if len(w) <= radius)

    def subgroup(self, gens: Iterable[int]) -> set[int]:
        gens = list(gens)
        seen = {0}
        frontier = [0]
        while frontier:
            nxt = []
            for e in frontier:
                for g in gens:
                    f = self.mul(e, g)
                    if f not in seen:
                        seen.add(f)
                        nxt.append(f)
            frontier = nxt
        return seen


def oracle_for(p: Presentation, limits: KBLimits = KBLimits()) -> GroupOracle | None:
    """Best available oracle: free group, else a confluent completion, else None."""
    if not p.relators:
        return FreeGroupOracle(p.ngens)
    rws = knuth_bendix(p, limits)
    return RewritingOracle(rws) if rws.confluent else None


def element_order(o: GroupOracle, w: Sequence[int], bound: int) -> int | None:
    """Order of ``w`` if it is at most ``bound``; ``None`` means "exceeds bound"."""
    if bound < 1:
        raise ValueError("bound must be >= 1")
    w = Word(w)
    if o.is_trivial(w):
        return 1
    power = w
    for n in range(2, bound + 1):
        power = power * w
        if o.is_trivial(power):
            return n
    return None


def geodesic_length(o: GroupOracle, w: Sequence[int]) -> int:
    w = Word(w)
    if o.shortlex:
        return len(o.normal_form(w))
    if o.is_trivial(w):
        return 0
    try:
        for v in o.enumerate_ball(len(w)):
            if o.equal(v, w):
                return len(v)
    except CapabilityError as exc:
        raise CapabilityError("geodesic length needs normal forms or ball enumeration") from exc
    return len(w)
