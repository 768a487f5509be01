"""Command-line front end: ``grank <command> FILE [options]``.

Exit status is 0 on a certified or successful answer, 2 when a search ran
out of budget or stopped at a bound, and 1 on errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from .cosets import CosetTable, todd_coxeter
from .dovetail import Exhausted
from .formats import InputFile, ParseError, load_file
from .geometry import build_ball, constants, invariant_sets, thinness_estimate
from .nielsen import (
    bounded_nielsen_search,
    dihedral_classify,
    nielsen_classes_finite,
    nielsen_reduce_free,
)
from .rank import RankConfig, emit_report, parse_c2, rank
from .rewrite import CapabilityError, FiniteGroup, KBLimits, knuth_bendix, oracle_for
from .vcyclic import find_vc_structure, relative_rank_finite, relative_rank_vc

OK, ERROR, BOUNDED = 0, 1, 2


def _fmt_tuple(p, t) -> str:
    return "(" + ", ".join(p.fmt(w) for w in t) + ")"


def _named_words(f: InputFile, name: str):
    if name in f.tuples:
        return f.tuples[name]
    if name in f.subgroups:
        return f.subgroups[name]
    raise KeyError(f"no tuple or subgroup named {name!r}")


def _finite_group(p, max_cosets: int = 20_000) -> FiniteGroup | None:
    t = todd_coxeter(p, [], max_cosets=max_cosets)
    return FiniteGroup.from_coset_table(t) if isinstance(t, CosetTable) else None


def _is_dinf(p) -> bool:
    return p.ngens == 2 and sorted(p.relators) == sorted([(1, 1), (2, 2)])


def cmd_rank(args, out) -> int:
    f = load_file(args.file)
    config = RankConfig(
        delta=args.delta, L=args.L, c2=args.c2, max_radius=args.max_radius, budget=args.budget
    )
    cert = rank(f.presentation, config, group_id=f.name or args.file)
    out.write(emit_report(cert, "json" if args.json else "text").decode())
    return OK if cert.status == "certified" else BOUNDED


def cmd_coset(args, out) -> int:
    f = load_file(args.file)
    p = f.presentation
    t = todd_coxeter(p, f.subgroup(args.sub), max_cosets=args.max_cosets)
    if not isinstance(t, CosetTable):
        out.write(f"overflow: {t.defined} cosets defined, limit {t.max_cosets}\n")
        return BOUNDED
    out.write(f"index {t.index}\n")
    header = [p.alphabet.names[i // 2] if i % 2 == 0 else p.alphabet.names[i // 2].upper() for i in range(2 * p.ngens)]
    out.write("coset " + " ".join(f"{h:>4}" for h in header) + "\n")
    for c, row in enumerate(t.rows):
        out.write(f"{c:>5} " + " ".join(f"{v:>4}" for v in row) + "\n")
    return OK


def cmd_kb(args, out) -> int:
    p = load_file(args.file).presentation
    rws = knuth_bendix(p, KBLimits(max_rules=args.max_rules, max_rule_length=args.max_len))
    out.write(f"status {rws.status}\nrules {len(rws.rules)}\n")
    for r in rws.rules:
        out.write(f"  {p.fmt(r.lhs) or '1'} -> {p.fmt(r.rhs) or '1'}\n")
    return OK if rws.confluent else BOUNDED


def cmd_nielsen(args, out) -> int:
    f = load_file(args.file)
    p = f.presentation
    t = f.tuple(args.tuple)
    if not p.relators:
        reduced, trace = nielsen_reduce_free(t)
        out.write(f"reduced {_fmt_tuple(p, reduced)}\nmoves {len(trace.moves)}\n")
        out.write(f"rank {sum(1 for w in reduced if w)}\n")
        return OK
    if _is_dinf(p):
        res = dihedral_classify(t)
        out.write(f"generates {'yes' if res.generates else 'no'}\n{res.description}\n")
        if res.trace is not None:
            out.write(f"reaches {_fmt_tuple(p, res.trace.end)} in {len(res.trace.moves)} moves\n")
        return OK
    oracle = oracle_for(p)
    if oracle is None:
        raise CapabilityError("no confluent rewriting system for this presentation")
    bound = args.bound if args.bound is not None else max((len(w) for w in t), default=0)
    res = bounded_nielsen_search(oracle, t, bound)
    if isinstance(res, Exhausted):
        out.write(f"exhausted: {res.detail}\n")
        return BOUNDED
    out.write(f"found {_fmt_tuple(p, res.tuple)} in {len(res.trace.moves)} moves\n")
    return OK


def cmd_classes(args, out) -> int:
    p = load_file(args.file).presentation
    g = _finite_group(p)
    if g is None:
        out.write("group not recognized as finite within the coset limit\n")
        return BOUNDED
    classes = nielsen_classes_finite(g, args.k)
    out.write(f"order {g.order}\nclasses {len(classes)}\n")
    for c in classes:
        out.write(f"  {_fmt_tuple(p, c.representative)}  size {c.size}\n")
    return OK


def cmd_vc_rank(args, out) -> int:
    f = load_file(args.file)
    p = f.presentation
    Z = _named_words(f, args.z) if args.z else ()
    g = _finite_group(p)
    if g is not None:
        k, combo = relative_rank_finite(g, [g.element(z) for z in Z])
        out.write(f"finite group of order {g.order}\nrelative rank {k}\nwitness {_fmt_tuple(p, [g.words[e] for e in combo])}\n")
        return OK
    oracle = oracle_for(p)
    if oracle is None:
        raise CapabilityError("no confluent rewriting system for this presentation")
    st = find_vc_structure(p, oracle)
    if isinstance(st, Exhausted):
        out.write(f"no virtually cyclic structure found: {st.detail}\n")
        return BOUNDED
    rr = relative_rank_vc(st, Z)
    out.write(f"quotient {st.kind}\nfinite normal subgroup of order {st.order_n}\n")
    out.write(f"relative rank {rr.rank}\nwitness {_fmt_tuple(p, rr.witness)}\nmethod {rr.method}\n")
    return OK


def cmd_geometry(args, out) -> int:
    f = load_file(args.file)
    p = f.presentation
    oracle = oracle_for(p)
    if oracle is None or not oracle.shortlex:
        raise CapabilityError("no shortlex normal forms for this presentation")
    b = build_ball(oracle, args.radius)
    out.write(f"ball radius {args.radius}\nvertices {b.size}\nthinness {thinness_estimate(b)}\n")
    if args.u:
        ugens = _named_words(f, args.u)
        sets = invariant_sets(b, ugens, args.mu)
        trunc = " (truncated)" if sets.E.truncated else ""
        out.write(f"mu {args.mu}\nE {len(sets.E)}{trunc}\nhull {len(sets.Z)}\n")
    return OK


def cmd_constants(args, out) -> int:
    table = constants(args.k, args.delta, args.L, parse_c2(args.c2))
    for kk, i, r in table.rows():
        out.write(f"R({kk},{i}) = {r}\n")
    out.write("C = " + ", ".join(str(c) for c in table.C) + "\n")
    return OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="grank", description="Rank and Nielsen-equivalence tools for finitely presented groups.")
    sub = ap.add_subparsers(dest="command", required=True)

    r = sub.add_parser("rank", help="certify or bound the rank of a group")
    r.add_argument("file")
    r.add_argument("--max-radius", type=int, default=2)
    r.add_argument("--budget", type=int, default=5_000)
    r.add_argument("--delta", type=int, default=1)
    r.add_argument("--L", type=int, default=1)
    r.add_argument("--c2", default="const:1")
    r.add_argument("--json", action="store_true")
    r.set_defaults(run=cmd_rank)

    c = sub.add_parser("coset", help="Todd-Coxeter enumeration for a named subgroup")
    c.add_argument("file")
    c.add_argument("--sub", required=True)
    c.add_argument("--max-cosets", type=int, default=100_000)
    c.set_defaults(run=cmd_coset)

    k = sub.add_parser("kb", help="shortlex Knuth-Bendix completion")
    k.add_argument("file")
    k.add_argument("--max-rules", type=int, default=400)
    k.add_argument("--max-len", type=int, default=40)
    k.set_defaults(run=cmd_kb)

    n = sub.add_parser("nielsen", help="reduce or search the Nielsen class of a named tuple")
    n.add_argument("file")
    n.add_argument("--tuple", required=True)
    n.add_argument("--bound", type=int)
    n.set_defaults(run=cmd_nielsen)

    cl = sub.add_parser("classes", help="Nielsen classes of generating k-tuples of a finite group")
    cl.add_argument("file")
    cl.add_argument("--k", type=int, required=True)
    cl.set_defaults(run=cmd_classes)

    v = sub.add_parser("vc-rank", help="rank relative to a named tuple in a virtually cyclic or finite group")
    v.add_argument("file")
    v.add_argument("--z")
    v.set_defaults(run=cmd_vc_rank)

    g = sub.add_parser("geometry", help="Cayley ball statistics and invariant sets")
    g.add_argument("file")
    g.add_argument("--radius", type=int, required=True)
    g.add_argument("--mu", type=int, default=1)
    g.add_argument("--u")
    g.set_defaults(run=cmd_geometry)

    ct = sub.add_parser("constants", help="tabulate the search radii R(k, i) and C(k)")
    ct.add_argument("--k", type=int, required=True)
    ct.add_argument("--delta", type=int, required=True)
    ct.add_argument("--L", type=int, required=True)
    ct.add_argument("--c2", required=True)
    ct.set_defaults(run=cmd_constants)
    return ap


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.run(args, out)
    except (ParseError, KeyError, ValueError, CapabilityError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"grank: error: {msg}", file=sys.stderr)
        return ERROR


if __name__ == "__main__":
    sys.exit(main())
