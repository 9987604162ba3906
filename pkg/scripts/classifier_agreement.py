"""Closed-form classifier versus the brute-force slope oracle on random instances."""

import argparse
from dataclasses import dataclass

from gaussmap import Verdict, classify
from gaussmap.testkit import Generator, oracle_min_slope


@dataclass
class Config:
    kinds: tuple = ("euclidean", "hyperbolic", "tree", "tree_product", "h2_line")
    count: int = 200
    seed: int = 0
    grid: int = 10**4


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--count", type=int, default=Config.count)
    p.add_argument("--seed", type=int, default=Config.seed)
    p.add_argument("--grid", type=int, default=Config.grid)
    a = p.parse_args(argv)
    cfg = Config(count=a.count, seed=a.seed, grid=a.grid)
    print(f"{'space':<14}{'max gap':>10}{'stable':>8}{'semi':>6}{'unstable':>10}")
    for kind in cfg.kinds:
        worst, tally = 0.0, {v: 0 for v in Verdict}
        for i in range(cfg.count):
            g = Generator(cfg.seed + i)
            # the oracle enumerates a finite boundary, so flat factors are one-dimensional
            X = g.euclidean(1) if kind == "euclidean" else g.space(kind)
            c = g.configuration(X)
            rep = classify(c, X)
            tally[rep.verdict] += 1
            worst = max(worst, abs(rep.min_slope - oracle_min_slope(c, X, cfg.grid)))
        print(f"{kind:<14}{worst:>10.1e}{tally[Verdict.STABLE]:>8}{tally[Verdict.SEMISTABLE]:>6}"
              f"{tally[Verdict.UNSTABLE]:>10}")


if __name__ == "__main__":
    main()
