"""Low-index subgroups and the abelianized ranks of their presentations.

For a free group of rank r every index-n subgroup is free of rank n(r-1)+1;
for the genus-2 surface group an index-n subgroup is a surface group of
genus n+1 with abelianized rank 2n+2.

    python scripts/low_index_census.py --group f2 --max-index 4
"""

import argparse
from collections import Counter
from dataclasses import dataclass

from grank.cosets import low_index_subgroups, normal_core, reidemeister_schreier
from grank.formats import load_corpus
from grank.words import abelianized_rank


@dataclass(frozen=True)
class Experiment:
    group: str = "f2"
    max_index: int = 4


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--group", default="f2")
    ap.add_argument("--max-index", type=int, default=4)
    args = ap.parse_args()
    exp = Experiment(args.group, args.max_index)
    p = load_corpus(exp.group).presentation
    counts: Counter = Counter()
    normal: Counter = Counter()
    ranks: dict[int, set[int]] = {}
    for t in low_index_subgroups(p, exp.max_index):
        counts[t.index] += 1
        normal[t.index] += normal_core(p, t).index == t.index
        ranks.setdefault(t.index, set()).add(abelianized_rank(reidemeister_schreier(p, t).presentation))
    print(f"{'index':>5} {'subgroups':>9} {'normal':>6}  abelianized ranks")
    for n in sorted(counts):
        print(f"{n:>5} {counts[n]:>9} {normal[n]:>6}  {sorted(ranks[n])}")


if __name__ == "__main__":
    main()
