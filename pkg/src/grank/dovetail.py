"""Fair interleaving of semi-decision procedures, and the procedures themselves.

A task is a generator: each ``yield`` is one step (one oracle query or one
candidate), ``return value`` is success and raising :class:`TaskFailed` ends
the task without a result.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Iterator, Sequence

from .cosets import CosetTable, Overflow, todd_coxeter, todd_coxeter_steps
from .folding import folding_membership
from .rewrite import GroupOracle, element_order, oracle_for
from .words import (
    EPSILON,
    Alphabet,
    Presentation,
    Word,
    abelian_invariants,
    abelianized_rank,
    shortlex_key,
)


class TaskFailed(Exception):
    """Raised inside a task generator: the procedure stopped without an answer."""


@dataclass(frozen=True)
class Exhausted:
    """The budget ran out before any procedure succeeded."""

    spent: int
    detail: str = ""


@dataclass(frozen=True)
class Success:
    task: int
    value: Any
    spent: int


class Task:
    def __init__(self, steps: Iterator, name: str = ""):
        self._gen = steps
        self.name = name
        self.state = "running"
        self.value: Any = None
        self.steps = 0

    @property
    def running(self) -> bool:
        return self.state == "running"

    def step(self) -> None:
        if not self.running:
            return
        self.steps += 1
        try:
            next(self._gen)
        except StopIteration as stop:
            self.state, self.value = "succeeded", stop.value
        except TaskFailed as exc:
            self.state, self.value = "failed", str(exc)


@dataclass
class Scheduler:
    tasks: list[Task]
    budget: int
    quantum: int = 1
    spent: int = 0

    def run(self) -> Success | Exhausted:
        if not self.tasks:
            raise ValueError("dovetail needs at least one task")
        if self.budget < 1 or self.quantum < 1:
            raise ValueError("budget and quantum must be positive")
        while self.spent < self.budget:
            active = [t for t in self.tasks if t.running]
            if not active:
                break
            for k, task in enumerate(self.tasks):
                for _ in range(self.quantum):
                    if not task.running or self.spent >= self.budget:
                        break
                    task.step()
                    self.spent += 1
                    if task.state == "succeeded":
                        return Success(k, task.value, self.spent)
        detail = ", ".join(f"{t.name or i}:{t.steps}:{t.state}" for i, t in enumerate(self.tasks))
        return Exhausted(self.spent, detail)


def dovetail(tasks: Sequence[Task], budget: int, quantum: int = 1) -> Success | Exhausted:
    """Round-robin the tasks, ``quantum`` steps each, until one succeeds or ``budget`` steps are spent."""
    return Scheduler(list(tasks), budget, quantum).run()


def run_task(gen: Iterator, budget: int) -> Success | Exhausted:
    return dovetail([Task(gen)], budget)


# --------------------------------------------------------- finite index (word sets)


@dataclass(frozen=True)
class IndexLimits:
    budget: int = 20_000
    max_cosets: int = 20_000
    power_bound: int = 8
    order_bound: int = 50
    max_witness_length: int = 6


def _closure_search(membership, A, Q, ngens: int | None) -> Iterator:
    """Build a prefix-closed set of coset representatives for <A> in <A ∪ Q>.

    Words over the symbols of B = A ∪ Q are explored breadth first; a product
    w·b is added only when no existing representative w' has w·b·w'^-1 in H.
    """
    B = [Word(w) for w in list(A) + list(Q)]
    symbols = [(k, s) for k in range(len(B)) for s in (1, -1)]
    reps: list[Word] = [EPSILON]
    formal: list[tuple] = [()]
    k = 0
    while k < len(reps):
        w = reps[k]
        for idx, s in symbols:
            wb = w * (B[idx] if s == 1 else ~B[idx])
            hit = False
            for w2 in reps:
                yield
                if membership(wb * ~w2):
                    hit = True
                    break
            if not hit:
                reps.append(wb)
                formal.append(formal[k] + ((idx, s),))
        k += 1
    return reps


def finite_index_detector(
    membership: Callable[[Word], bool],
    A: Sequence[Word],
    Q: Sequence[Word],
    budget: int = 20_000,
) -> list[Word] | Exhausted:
    """Transversal W of H = <A> in L = <A ∪ Q> (so [L:H] = |W|), or Exhausted.

    Halts exactly when the index is finite, given enough budget; one membership
    query is one step.
    """
    out = run_task(_closure_search(membership, A, Q, None), budget)
    return out.value if isinstance(out, Success) else out


def check_transversal(membership, A, Q, W: Sequence[Word]) -> bool:
    """Re-verify a detector certificate: distinct cosets and closure under B^±."""
    W = [Word(w) for w in W]
    if EPSILON not in W:
        return False
    for i, u in enumerate(W):
        for v in W[i + 1 :]:
            if membership(u * ~v):
                return False
    for w in W:
        for b in list(A) + list(Q):
            for s in (Word(b), ~Word(b)):
                if not any(membership(w * s * ~w2) for w2 in W):
                    return False
    return True


# ------------------------------------------------------------- index or infinite


@dataclass(frozen=True)
class FiniteIndex:
    index: int
    table: CosetTable


@dataclass(frozen=True)
class InfiniteIndex:
    """``witness^k`` lies outside H for 1 <= k <= power_bound and the witness has
    order above order_bound: certified only up to those bounds."""

    witness: Word
    power_bound: int
    order_bound: int
    certified_at_bound: bool = True


def words_in_shortlex(ngens: int, max_length: int) -> Iterator[Word]:
    letters = Alphabet.standard(ngens).letters
    level = [EPSILON]
    for _ in range(max_length):
        level = [w * Word((x,)) for w in level for x in letters if not w or w[-1] != -x]
        yield from level


def _tc_task(p, subgens, max_cosets):
    res = yield from todd_coxeter_steps(p, subgens, max_cosets)
    if isinstance(res, Overflow):
        raise TaskFailed("coset enumeration overflow")
    return FiniteIndex(res.index, res)


def _witness_task(p, oracle, membership, limits: IndexLimits):
    for g in words_in_shortlex(p.ngens, limits.max_witness_length):
        yield
        power = EPSILON
        inside = False
        for _ in range(limits.power_bound):
            power = power * g
            yield
            if membership(power):
                inside = True
                break
        if inside:
            continue
        yield
        if element_order(oracle, g, limits.order_bound) is None:
            return InfiniteIndex(g, limits.power_bound, limits.order_bound)
    raise TaskFailed("witness words exhausted")


def index_or_infinite(
    p: Presentation,
    subgens: Sequence[Word],
    oracle: GroupOracle | None = None,
    limits: IndexLimits = IndexLimits(),
    membership: Callable[[Word], bool] | None = None,
) -> FiniteIndex | InfiniteIndex | Exhausted:
    """Dovetail Todd-Coxeter for [G:H] against a search for g with <g> ∩ H = 1.

    The witness branch needs a membership test for H; free presentations get
    one from foldings, other groups only when the caller passes ``membership``.
    """
    if oracle is None:
        oracle = oracle_for(p)
    if membership is None and not p.relators:
        membership = folding_membership(subgens, p.ngens)
    tasks = [Task(_tc_task(p, subgens, limits.max_cosets), "todd-coxeter")]
    if membership is not None and oracle is not None:
        tasks.append(Task(_witness_task(p, oracle, membership, limits), "witness"))
    out = dovetail(tasks, limits.budget)
    return out.value if isinstance(out, Success) else out


# ------------------------------------------------------------- free splittings


@dataclass(frozen=True)
class SplitLimits:
    budget: int = 2_000
    length_slack: int = 4
    max_cosets: int = 2_000


@dataclass(frozen=True)
class FreeSplitting:
    """p ≅ left * right.

    ``forward[i]`` is the image of p's generator i+1 as a word over the new
    generating set (left generators first, then right); ``backward[j]`` is new
    generator j+1 written in p's generators.
    """

    left: Presentation
    right: Presentation
    forward: tuple[Word, ...]
    backward: tuple[Word, ...]
    left_nontrivial: str = ""
    right_nontrivial: str = ""


def nontrivial_evidence(p: Presentation, max_cosets: int = 2_000) -> str | None:
    """A reason the group is nontrivial, or None when none was found cheaply."""
    free, torsion = abelian_invariants(p)
    if free or torsion:
        return f"abelianization Z^{free}" + "".join(f" + Z/{d}" for d in torsion)
    t = todd_coxeter(p, [], max_cosets=max_cosets)
    if isinstance(t, CosetTable) and t.index > 1:
        return f"finite of order {t.index}"
    return None


def _components(ngens: int, relators: Sequence[Word]) -> list[list[int]]:
    parent = list(range(ngens + 1))

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for r in relators:
        gens = sorted({abs(x) for x in r})
        for g in gens[1:]:
            parent[find(g)] = find(gens[0])
    comps: dict[int, list[int]] = {}
    for g in range(1, ngens + 1):
        comps.setdefault(find(g), []).append(g)
    return sorted(comps.values())


def _substitute(w: Sequence[int], images: Sequence[Word]) -> Word:
    out = EPSILON
    for x in w:
        out = out * (images[x - 1] if x > 0 else ~images[-x - 1])
    return out


def _restrict(p: Presentation, gens: list[int], relators: Sequence[Word], name: str) -> Presentation:
    renum = {g: k + 1 for k, g in enumerate(gens)}
    names = tuple(p.alphabet.names[g - 1] for g in gens)
    rels = tuple(Word((renum[abs(x)] if x > 0 else -renum[abs(x)]) for x in r) for r in relators)
    return Presentation(Alphabet(names), rels, name=name)


def _split_candidates(p: Presentation, limits: SplitLimits):
    """Generator-substitution automorphisms of the free group, breadth first.

    Each state is (relators, phi, phi_inverse) where relators = phi(R).
    Elementary substitutions are x_i -> x_i x_j^±1 and x_i -> x_j^±1 x_i.
    """
    n = p.ngens
    ident = tuple(Word((i,)) for i in range(1, n + 1))
    start = (tuple(p.relators), ident, ident)
    cap = sum(len(r) for r in p.relators) + limits.length_slack

    def canon(rels):
        return tuple(sorted((Word(r).cyclic_reduce() for r in rels), key=shortlex_key))

    seen = {canon(p.relators)}
    frontier = [start]
    yield start
    while frontier:
        nxt = []
        for rels, phi, phinv in frontier:
            for i, j, s, side in itertools.product(range(n), range(n), (1, -1), ("r", "l")):
                if i == j:
                    continue
                xj = Word(((j + 1) * s,))
                # alpha: x_i -> x_i x_j^s (or x_j^s x_i); inverse uses x_j^-s
                alpha = list(ident)
                alpha_inv = list(ident)
                if side == "r":
                    alpha[i] = Word((i + 1,)) * xj
                    alpha_inv[i] = Word((i + 1,)) * ~xj
                else:
                    alpha[i] = xj * Word((i + 1,))
                    alpha_inv[i] = ~xj * Word((i + 1,))
                # new presentation: generators y with x = alpha^-1-substituted
                new_rels = tuple(_substitute(r, alpha_inv).cyclic_reduce() for r in rels)
                if sum(len(r) for r in new_rels) > cap:
                    continue
                key = canon(new_rels)
                if key in seen:
                    continue
                seen.add(key)
                new_phi = tuple(_substitute(w, alpha_inv) for w in phi)
                new_phinv = tuple(_substitute(alpha[k], phinv) for k in range(n))
                state = (new_rels, new_phi, new_phinv)
                nxt.append(state)
                yield state
        frontier = nxt


def _splitting_task(p: Presentation, limits: SplitLimits):
    for rels, phi, phinv in _split_candidates(p, limits):
        yield
        comps = _components(p.ngens, rels)
        if len(comps) < 2:
            continue
        left_gens = comps[0]
        right_gens = [g for c in comps[1:] for g in c]
        left_rels = [r for r in rels if r and abs(r[0]) in left_gens]
        right_rels = [r for r in rels if r and abs(r[0]) not in left_gens]
        left = _restrict(p, left_gens, left_rels, f"{p.name or 'G'}.1")
        right = _restrict(p, right_gens, right_rels, f"{p.name or 'G'}.2")
        ev_l = nontrivial_evidence(left, limits.max_cosets)
        ev_r = nontrivial_evidence(right, limits.max_cosets)
        if not ev_l or not ev_r:
            continue
        # renumber: new generator order is left_gens + right_gens
        order = left_gens + right_gens
        renum = {g: k + 1 for k, g in enumerate(order)}
        forward = tuple(Word((renum[abs(x)] if x > 0 else -renum[abs(x)]) for x in w) for w in phi)
        backward = tuple(phinv[g - 1] for g in order)
        return FreeSplitting(left, right, forward, backward, ev_l, ev_r)
    raise TaskFailed("no splitting among the enumerated substitutions")


def free_splitting_search(p: Presentation, limits: SplitLimits = SplitLimits()) -> FreeSplitting | Exhausted:
    """Look for a presentation of p whose relators split over a generator partition."""
    out = run_task(_splitting_task(p, limits), limits.budget)
    return out.value if isinstance(out, Success) else out


def verify_splitting(p: Presentation, s: FreeSplitting) -> bool:
    """Both maps are homomorphisms and compose to the identity on generators.

    Relators of p map into the normal closure of the split relators; with
    free-group substitutions this is checked by free reduction on the
    composites and by mapping relators back and forth.
    """
    n = p.ngens
    if len(s.forward) != n or len(s.backward) != s.left.ngens + s.right.ngens:
        return False
    for i in range(n):
        if _substitute(s.forward[i], s.backward) != Word((i + 1,)):
            return False
    for j in range(len(s.backward)):
        if _substitute(s.backward[j], s.forward) != Word((j + 1,)):
            return False
    shift = s.left.ngens
    split_rels = {r.cyclic_reduce() for r in s.left.relators}
    split_rels |= {Word(x + shift if x > 0 else x - shift for x in r).cyclic_reduce() for r in s.right.relators}
    mapped = {_substitute(r, s.forward).cyclic_reduce() for r in p.relators}
    return mapped == split_rels


# ------------------------------------------------- presentation isomorphism search


@dataclass(frozen=True)
class IsoLimits:
    budget: int = 20_000
    max_length: int = 3


@dataclass(frozen=True)
class Isomorphism:
    forward: tuple[Word, ...]
    backward: tuple[Word, ...]


def _maps(source: Presentation, target_ngens: int, target_oracle: GroupOracle, length: int):
    """Generator images of total max-length exactly ``length`` killing every relator."""
    pool = [EPSILON] + [w for w in words_in_shortlex(target_ngens, length)]
    for images in itertools.product(pool, repeat=source.ngens):
        if max((len(w) for w in images), default=0) != length:
            continue
        yield images, all(target_oracle.is_trivial(_substitute(r, images)) for r in source.relators)


def _iso_task(p1, p2, o1, o2, limits: IsoLimits):
    fwds: list[tuple] = []
    bwds: list[tuple] = []

    def composes(f, b) -> bool:
        return all(o1.equal(_substitute(f[i], b), Word((i + 1,))) for i in range(p1.ngens)) and all(
            o2.equal(_substitute(b[j], f), Word((j + 1,))) for j in range(p2.ngens)
        )

    for length in range(0, limits.max_length + 1):
        new_f = []
        for images, ok in _maps(p1, p2.ngens, o2, length):
            yield
            if ok:
                new_f.append(images)
        new_b = []
        for images, ok in _maps(p2, p1.ngens, o1, length):
            yield
            if ok:
                new_b.append(images)
        fwds += new_f
        bwds += new_b
        for f, b in itertools.chain(
            itertools.product(new_f, bwds), itertools.product(fwds[: len(fwds) - len(new_f)], new_b)
        ):
            yield
            if composes(f, b):
                return Isomorphism(tuple(f), tuple(b))
    raise TaskFailed("all maps up to the length bound were tried")


def presentation_isomorphism_search(
    p1: Presentation,
    p2: Presentation,
    limits: IsoLimits = IsoLimits(),
    oracles: tuple[GroupOracle, GroupOracle] | None = None,
) -> Isomorphism | Exhausted:
    """Search for mutually inverse homomorphisms given by generator images."""
    if oracles is None:
        oracles = (oracle_for(p1), oracle_for(p2))
    o1, o2 = oracles
    if o1 is None or o2 is None:
        return Exhausted(0, "no word-problem oracle")
    out = run_task(_iso_task(p1, p2, o1, o2, limits), limits.budget)
    if isinstance(out, Success):
        return out.value
    return out if isinstance(out, Exhausted) else Exhausted(limits.budget)
