"""Count Nielsen classes of generating k-tuples for the finite bundled groups.

    python scripts/nielsen_census.py --k 2 3
"""

import argparse
import time
from dataclasses import dataclass

from grank.formats import load_corpus
from grank.nielsen import nielsen_classes_finite
from grank.rewrite import FiniteGroup

FINITE = ("trivial", "z3", "z5", "klein4", "s3", "a5")


@dataclass(frozen=True)
class Experiment:
    ks: tuple[int, ...] = (2,)
    max_tuples: int = 500_000


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k", type=int, nargs="+", default=[2])
    ap.add_argument("--max-tuples", type=int, default=500_000)
    args = ap.parse_args()
    exp = Experiment(tuple(args.k), args.max_tuples)
    print(f"{'group':<8} {'order':>5} {'k':>2} {'classes':>7}  sizes")
    for name in FINITE:
        p = load_corpus(name).presentation
        g = FiniteGroup.from_presentation(p)
        for k in exp.ks:
            if g.order**k > exp.max_tuples:
                print(f"{name:<8} {g.order:>5} {k:>2}   skipped ({g.order}^{k} tuples)")
                continue
            start = time.perf_counter()
            classes = nielsen_classes_finite(g, k, exp.max_tuples)
            sizes = sorted(c.size for c in classes)
            print(f"{name:<8} {g.order:>5} {k:>2} {len(classes):>7}  {sizes}  ({time.perf_counter() - start:.2f}s)")


if __name__ == "__main__":
    main()
