"""Rank computation with checkable certificates.

The pipeline: split off free factors when a splitting is found and add the
factor ranks; otherwise take the abelianized rank as the lower bound and
search tuples of short elements, smallest size first, until one generates.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Sequence, Union

from .cosets import CosetTable, Overflow, todd_coxeter, todd_coxeter_steps
from .dovetail import (
    Exhausted,
    FreeSplitting,
    SplitLimits,
    Success,
    Task,
    TaskFailed,
    dovetail,
    free_splitting_search,
    verify_splitting,
    words_in_shortlex,
)
from .folding import FoldedGraph
from .formats import parse_input
from .geometry import constants
from .rewrite import FiniteGroup, GroupOracle, oracle_for
from .vcyclic import find_vc_structure, relative_rank_vc
from .words import Alphabet, Presentation, Word, abelian_invariants, abelianized_rank, relation_matrix, shortlex_key, smith_invariants

# ------------------------------------------------------------ generation test


@dataclass(frozen=True)
class GenerationResult:
    """``verdict`` is "yes", "no" or "exhausted".

    ``method`` names the procedure that decided; ``index`` is the index of
    the generated subgroup (of its abelian image when the abelianization
    decided), None for infinite; ``obstruction`` says why a "no" is a no.
    """

    verdict: str
    method: str
    index: int | None = None
    obstruction: str = ""
    spent: int = 0

    def transcript(self) -> dict:
        return asdict(self)


def abelian_image_index(p: Presentation, t: Sequence[Sequence[int]]) -> int | None:
    """Index of the image of <t> in the abelianization Z^n/R (None when infinite).

    The image is (R + T)/R, so its index is [Z^n : R + T], the product of
    the Smith invariants when R + T has full rank.
    """
    n = p.ngens
    rows = relation_matrix(p) + [Word(w).exponent_sums(n) for w in t]
    joint = smith_invariants(rows, n)
    if len(joint) < n:
        return None
    index = 1
    for d in joint:
        index *= d
    return index


def _abelian_task(p, t):
    yield
    idx = abelian_image_index(p, t)
    if idx == 1:
        raise TaskFailed("abelianization gives no obstruction")
    what = "infinite" if idx is None else str(idx)
    return GenerationResult("no", "abelianization", idx, f"image in the abelianization has index {what}")


def _coset_task(p, t, max_cosets):
    res = yield from todd_coxeter_steps(p, [Word(w) for w in t], max_cosets)
    if isinstance(res, Overflow):
        raise TaskFailed("coset enumeration overflow")
    if res.index == 1:
        return GenerationResult("yes", "coset enumeration", 1)
    return GenerationResult("no", "coset enumeration", res.index, f"coset table of index {res.index}")


def _folding_task(p, t):
    yield
    g = FoldedGraph([Word(w) for w in t], p.ngens)
    idx = g.index()
    if idx == 1:
        return GenerationResult("yes", "folding", 1)
    if idx is None:
        return GenerationResult("no", "folding", None, "folded graph is missing an edge, so the index is infinite")
    return GenerationResult("no", "folding", idx, f"folded graph is a coset graph with {idx} vertices")


@dataclass(frozen=True)
class GenerationLimits:
    budget: int = 50_000
    max_cosets: int = 20_000


def generation_test(
    p: Presentation, t: Sequence[Sequence[int]], oracle: GroupOracle | None = None, limits: GenerationLimits = GenerationLimits()
) -> GenerationResult:
    """Decide whether t generates p's group, dovetailing coset enumeration
    against the abelianization obstruction (and folding for free groups)."""
    tasks = [Task(_abelian_task(p, t), "abelianization")]
    if not p.relators:
        tasks.append(Task(_folding_task(p, t), "folding"))
    else:
        tasks.append(Task(_coset_task(p, t, limits.max_cosets), "cosets"))
    out = dovetail(tasks, limits.budget)
    if isinstance(out, Success):
        return GenerationResult(**{**asdict(out.value), "spent": out.spent})
    return GenerationResult("exhausted", "dovetail", spent=out.spent, obstruction=out.detail)


# ------------------------------------------------------------ configuration


def parse_c2(spec: str) -> Callable[[int, int], int]:
    """``const:N`` or ``linear:A,B,C`` (A + B·n + C·K)."""
    kind, _, arg = spec.partition(":")
    if kind == "const":
        v = int(arg)
        return lambda n, K: v
    if kind == "linear":
        a, b, c = (int(x) for x in arg.split(","))
        return lambda n, K: a + b * n + c * K
    raise ValueError(f"unknown c2 stub {spec!r}; use const:N or linear:A,B,C")


@dataclass(frozen=True)
class FiberData:
    """User-supplied data for the fiber branch.

    ``subgroup`` generates a normal subgroup H whose quotient is virtually
    cyclic; ``subgroup_rank`` is its (externally known) rank and
    ``subgroup_witness`` a generating tuple of that size.
    """

    subgroup: tuple[Word, ...]
    subgroup_rank: int
    subgroup_witness: tuple[Word, ...]


@dataclass(frozen=True)
class RankConfig:
    delta: int = 1
    L: int = 1
    c2: str = "const:1"
    max_radius: int = 2
    budget: int = 5_000
    max_cosets: int = 20_000
    split_budget: int = 2_000
    split: bool = True
    finite_order_limit: int = 2_000
    fiber: FiberData | None = None
    hypotheses: tuple[str, ...] = ("torsion-free", "one-ended")

    def __post_init__(self):
        if self.delta < 1 or self.L < 1 or self.max_radius < 0 or self.budget < 1:
            raise ValueError("delta, L and budget must be positive and max_radius nonnegative")
        parse_c2(self.c2)


# --------------------------------------------------------------- certificates


@dataclass
class RankCertificate:
    group_id: str
    rank: int | None
    lower: int
    upper: int
    witness: list[str]
    lower_bound_evidence: dict[str, Any]
    upper_bound_evidence: dict[str, Any]
    search_record: dict[str, Any]
    status: str
    hypotheses: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError("lower bound above upper bound")
        if self.status == "certified" and not (self.lower == self.upper == len(self.witness)):
            raise ValueError("a certified rank needs matching bounds and witness")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RankCertificate":
        return cls(**d)


def grushko_rank(components: Sequence[Union[RankCertificate, Presentation]], free_rank: int) -> int:
    """Rank of a free product of the components and a free group of rank ``free_rank``."""
    total = free_rank
    for c in components:
        if isinstance(c, Presentation):
            c = rank(c)
        if c.status != "certified":
            raise ValueError(f"component {c.group_id} has no certified rank")
        total += c.rank
    return total


def _presentation_text(p: Presentation) -> str:
    return "gens " + " ".join(p.alphabet.names) + "".join(f"\nrel {p.fmt(r)}" for r in p.relators)


def _from_text(text: str, name: str = "") -> Presentation:
    p = parse_input(text).presentation
    return Presentation(p.alphabet, p.relators, name=name)


# -------------------------------------------------------------------- search


def candidate_entries(p: Presentation, radius: int, oracle: GroupOracle | None) -> list[Word]:
    """Nontrivial elements of length <= radius, one word per element up to inversion."""
    out, seen = [], set()
    for w in words_in_shortlex(p.ngens, radius):
        inv = ~w
        if shortlex_key(inv) < shortlex_key(w):
            continue
        if oracle is not None and oracle.shortlex:
            nf, nfi = oracle.normal_form(w), oracle.normal_form(inv)
            if not nf or nf in seen or nfi in seen:
                continue
            seen.add(nf)
        out.append(w)
    return out


def _tuple_search(p, size, entries, limits, budget, record):
    """First generating combination of ``size`` entries; returns (tuple, result, complete)."""
    tested = 0
    for combo in itertools.combinations(entries, size):
        if tested >= budget:
            return None, None, False, tested
        tested += 1
        res = generation_test(p, combo, None, limits)
        if res.verdict == "yes":
            return combo, res, True, tested
        if res.verdict == "exhausted":
            record.setdefault("undecided", 0)
            record["undecided"] += 1
    return None, None, record.get("undecided", 0) == 0, tested


def rank(p: Presentation, config: RankConfig = RankConfig(), group_id: str | None = None) -> RankCertificate:
    gid = group_id or p.name or str(p)
    limits = GenerationLimits(max_cosets=config.max_cosets)
    c2 = parse_c2(config.c2)
    hyps = list(config.hypotheses)

    if config.split and p.relators and p.ngens > 1:
        split = free_splitting_search(p, SplitLimits(budget=config.split_budget, max_cosets=config.max_cosets))
        if isinstance(split, FreeSplitting):
            cert = _rank_from_split(p, split, config, gid, limits)
            if cert is not None:
                return cert

    if p.relators:
        table = todd_coxeter(p, [], max_cosets=config.finite_order_limit)
        if isinstance(table, CosetTable):
            return _rank_finite(p, FiniteGroup.from_coset_table(table), gid, limits)

    free, torsion = abelian_invariants(p)
    lower = free + len(torsion)
    lower_ev: dict[str, Any] = {
        "method": "abelianized_rank",
        "abelianized_rank": lower,
        "abelian_invariants": [free, torsion],
        "presentation": _presentation_text(p),
    }
    oracle = oracle_for(p)

    record: dict[str, Any] = {"budget": config.budget, "spent": 0, "radii": {}, "constants": None}
    table = constants(max(1, p.ngens), config.delta, config.L, c2)
    record["constants"] = {"R": {str(k): list(v) for k, v in table.R.items()}, "C": list(table.C)}

    witness, upper_ev, upper = None, None, p.ngens
    spent = 0
    for size in range(lower, p.ngens + 1):
        if size == 0:
            res = generation_test(p, (), oracle, limits)
            if res.verdict == "yes":
                witness, upper_ev, upper = (), res.transcript(), 0
                break
            continue
        C = table.C[size] if size < len(table.C) else table.C[-1]
        radius = min(C, config.max_radius)
        truncated = C > config.max_radius
        entries = candidate_entries(p, max(radius, 1), oracle)
        sub_record: dict[str, Any] = {"C": C, "radius": radius, "truncated": truncated, "entries": len(entries)}
        found, res, complete, tested = _tuple_search(p, size, entries, limits, config.budget - spent, sub_record)
        spent += tested
        sub_record["tested"] = tested
        record["radii"][str(size)] = sub_record
        if found is not None:
            witness, upper_ev, upper = found, res.transcript(), size
            break
        if complete and not truncated and radius >= C:
            # every tuple within the full search radius fails, so under the
            # recorded hypotheses no generating tuple of this size exists
            lower = size + 1
            lower_ev["search_excluded"] = size
        if spent >= config.budget:
            break
    record["spent"] = spent

    if witness is None:
        witness = tuple(p.generators)
        res = generation_test(p, witness, oracle, limits)
        upper_ev = {**res.transcript(), "note": "the defining generators"}
        upper = p.ngens
    fiber_ev = _fiber_branch(p, config, limits) if config.fiber else None
    if fiber_ev is not None and fiber_ev["size"] < upper:
        witness = tuple(p.alphabet.parse(w) for w in fiber_ev["witness"])
        upper = fiber_ev["size"]
        upper_ev = fiber_ev
        hyps.append("fiber subgroup is normal with the supplied rank")
    else:
        fiber_ev = None
    if lower == upper:
        status = "certified"
    elif spent >= config.budget:
        status = "exhausted"
    else:
        status = "bounded"
    return RankCertificate(
        gid,
        upper if status == "certified" else None,
        lower,
        upper,
        [p.fmt(w) for w in witness],
        lower_ev,
        upper_ev,
        record,
        status,
        hyps if lower_ev.get("search_excluded") is not None or fiber_ev else [],
    )


def finite_rank(g: FiniteGroup, start: int = 0) -> tuple[int, tuple[int, ...]]:
    """Least k with a generating k-set of elements, by exhaustive search from ``start``."""
    elements = range(1, g.order)
    for k in itertools.count(start):
        if k == 0:
            if g.order == 1:
                return 0, ()
            continue
        for combo in itertools.combinations(elements, k):
            if len(g.subgroup(combo)) == g.order:
                return k, combo
    raise AssertionError("unreachable")


def _rank_finite(p, g: FiniteGroup, gid, limits) -> RankCertificate:
    free, torsion = abelian_invariants(p)
    ab = free + len(torsion)
    k, combo = finite_rank(g, ab)
    witness = [g.words[e] for e in combo]
    res = generation_test(p, witness, None, limits)
    lower_ev = {
        "method": "finite_exhaustive",
        "presentation": _presentation_text(p),
        "order": g.order,
        "abelianized_rank": ab,
        "sizes_excluded": list(range(ab, k)),
    }
    return RankCertificate(
        gid, k, k, k, [p.fmt(w) for w in witness], lower_ev, res.transcript(), {"order": g.order}, "certified", []
    )


def _map_words(words: Sequence[Word], images: Sequence[Word]) -> list[Word]:
    out = []
    for w in words:
        acc = Word(())
        for x in w:
            acc = acc * (images[x - 1] if x > 0 else ~images[-x - 1])
        out.append(acc)
    return out


def _rank_from_split(p, split: FreeSplitting, config, gid, limits) -> RankCertificate | None:
    left = rank(split.left, config, f"{gid}.1")
    right = rank(split.right, config, f"{gid}.2")
    if left.status != "certified" or right.status != "certified":
        return None
    k = split.left.ngens
    lw = [split.left.alphabet.parse(w) for w in left.witness]
    rw = [split.right.alphabet.parse(w) for w in right.witness]
    # witnesses live in the split generators; carry them back to p's generators
    new_gens = lw + [Word(x + k if x > 0 else x - k for x in w) for w in rw]
    witness = _map_words(new_gens, split.backward)
    res = generation_test(p, witness, None, limits)
    if res.verdict != "yes":
        return None
    total = grushko_rank([left, right], 0)
    lower_ev = {
        "method": "grushko",
        "presentation": _presentation_text(p),
        "components": [left.to_dict(), right.to_dict()],
        "component_presentations": [_presentation_text(split.left), _presentation_text(split.right)],
        "forward": [Alphabet.standard(k + split.right.ngens).format(w) for w in split.forward],
        "backward": [p.fmt(w) for w in split.backward],
        "nontrivial": [split.left_nontrivial, split.right_nontrivial],
    }
    return RankCertificate(
        gid,
        total,
        total,
        total,
        [p.fmt(w) for w in witness],
        lower_ev,
        res.transcript(),
        {"split_budget": config.split_budget},
        "certified",
        [],
    )


def _fiber_branch(p, config, limits) -> dict | None:
    fd = config.fiber
    quotient = Presentation(p.alphabet, p.relators + tuple(fd.subgroup), name=f"{p.name}/H")
    o = oracle_for(quotient)
    if o is None:
        return None
    st = find_vc_structure(quotient, o)
    if isinstance(st, Exhausted):
        return None
    rel = relative_rank_vc(st, [])
    witness = tuple(fd.subgroup_witness) + tuple(rel.witness)
    if len(fd.subgroup_witness) != fd.subgroup_rank:
        return None
    res = generation_test(p, witness, None, limits)
    if res.verdict != "yes":
        return None
    return {
        **res.transcript(),
        "method": "fiber",
        "size": fd.subgroup_rank + rel.rank,
        "quotient_relative_rank": rel.rank,
        "witness": [p.fmt(w) for w in witness],
    }


# ------------------------------------------------------------- verification


def verify_certificate(cert: RankCertificate, limits: GenerationLimits = GenerationLimits()) -> bool:
    """Recheck a certificate from its own fields."""
    ev = cert.lower_bound_evidence
    p = _from_text(ev["presentation"])
    witness = [p.alphabet.parse(w) for w in cert.witness]
    if len(witness) != cert.upper:
        return False
    if generation_test(p, witness, None, limits).verdict != "yes":
        return False
    if ev["method"] == "abelianized_rank":
        free, torsion = abelian_invariants(p)
        if free + len(torsion) != ev["abelianized_rank"]:
            return False
        lower_ok = cert.lower <= max(ev["abelianized_rank"], ev.get("search_excluded", -1) + 1)
    elif ev["method"] == "finite_exhaustive":
        table = todd_coxeter(p, [], max_cosets=max(64 * ev["order"], 2_000))
        if not isinstance(table, CosetTable) or table.index != ev["order"]:
            return False
        k, _ = finite_rank(FiniteGroup.from_coset_table(table), abelianized_rank(p))
        lower_ok = cert.lower <= k
    elif ev["method"] == "grushko":
        comps = [RankCertificate.from_dict(c) for c in ev["components"]]
        if not all(c.status == "certified" and verify_certificate(c, limits) for c in comps):
            return False
        left, right = (_from_text(t) for t in ev["component_presentations"])
        alpha = Alphabet.standard(left.ngens + right.ngens)
        split = FreeSplitting(
            left,
            right,
            tuple(alpha.parse(w) for w in ev["forward"]),
            tuple(p.alphabet.parse(w) for w in ev["backward"]),
        )
        if not verify_splitting(p, split):
            return False
        lower_ok = cert.lower <= sum(c.rank for c in comps)
    else:
        return False
    if cert.status == "certified":
        return lower_ok and cert.lower == cert.upper == cert.rank
    return lower_ok


# ------------------------------------------------------------------ reports


def emit_report(cert: RankCertificate, fmt: str = "text") -> bytes:
    if fmt == "json":
        return (json.dumps(cert.to_dict(), indent=2, sort_keys=False) + "\n").encode()
    lines = [
        f"group        {cert.group_id}",
        f"status       {cert.status}",
        f"rank         {cert.rank if cert.rank is not None else f'in [{cert.lower}, {cert.upper}]'}",
        f"witness      ({', '.join(cert.witness)})",
        f"lower bound  {cert.lower} by {cert.lower_bound_evidence.get('method')}",
        f"upper bound  {cert.upper} by {cert.upper_bound_evidence.get('method')}",
    ]
    if cert.hypotheses:
        lines.append(f"unverified   {', '.join(cert.hypotheses)}")
    return ("\n".join(lines) + "\n").encode()
