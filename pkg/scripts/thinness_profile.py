"""Thinness of geodesic triangles in Cayley balls of growing radius.

Free groups stay at 0; Z^2 grows with the radius, as a non-hyperbolic group should.

    python scripts/thinness_profile.py --max-radius 4
"""

import argparse
import time
from dataclasses import dataclass

from grank.formats import load_corpus
from grank.geometry import build_ball, thinness_estimate
from grank.rewrite import oracle_for


@dataclass(frozen=True)
class Experiment:
    groups: tuple[str, ...] = ("f2", "f3", "z2", "z_x_z2", "dinf")
    max_radius: int = 4
    max_triangles: int = 20_000
    seed: int = 0


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--groups", nargs="+", default=list(Experiment.groups))
    ap.add_argument("--max-radius", type=int, default=Experiment.max_radius)
    ap.add_argument("--max-triangles", type=int, default=Experiment.max_triangles)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    exp = Experiment(tuple(args.groups), args.max_radius, args.max_triangles, args.seed)
    print(f"{'group':<8} {'r':>2} {'vertices':>8} {'thinness':>8} seconds")
    for name in exp.groups:
        o = oracle_for(load_corpus(name).presentation)
        if o is None:
            print(f"{name:<8} no confluent rewriting system")
            continue
        for r in range(exp.max_radius + 1):
            start = time.perf_counter()
            b = build_ball(o, r)
            t = thinness_estimate(b, exp.max_triangles, exp.seed)
            print(f"{name:<8} {r:>2} {b.size:>8} {t:>8} {time.perf_counter() - start:.2f}")


if __name__ == "__main__":
    main()
