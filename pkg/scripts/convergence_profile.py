"""Iteration counts and final residuals of the averaged solver on generated instances."""

import argparse
import csv
import sys
import time
from dataclasses import dataclass

import numpy as np

from gaussmap import find_fixed_point
from gaussmap.testkit import Generator


@dataclass
class Config:
    kinds: tuple = ("hyperbolic", "tree", "tree_product")
    samplers: tuple = ("stable", "semistable", "semistable_zero")
    count: int = 50
    seed: int = 0
    out: str = ""


def run(cfg: Config):
    rows = []
    for kind in cfg.kinds:
        for sampler in cfg.samplers:
            if kind == "hyperbolic" and sampler != "stable":
                # slope-0 configurations on H^2 need not have fixed points
                continue
            for i in range(cfg.count):
                g = Generator(cfg.seed + i)
                X = g.space(kind)
                c = getattr(g, sampler)(X)
                t0 = time.perf_counter()
                rep = find_fixed_point(c, X)
                rows.append((kind, sampler, i, len(c), str(rep.status), rep.iterations,
                             rep.residual, time.perf_counter() - t0))
    return rows


def summarize(rows):
    print(f"{'space':<14}{'sampler':<17}{'conv':>6}{'median it':>11}{'max it':>9}{'max res':>11}{'sec':>8}")
    keys = sorted({(r[0], r[1]) for r in rows})
    for kind, sampler in keys:
        sel = [r for r in rows if r[0] == kind and r[1] == sampler]
        its = np.array([r[5] for r in sel])
        conv = sum(r[4] == "Converged" for r in sel)
        print(f"{kind:<14}{sampler:<17}{conv:>3}/{len(sel):<2}{int(np.median(its)):>11}{its.max():>9}"
              f"{max(r[6] for r in sel):>11.1e}{sum(r[7] for r in sel):>8.2f}")


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--count", type=int, default=Config.count)
    p.add_argument("--seed", type=int, default=Config.seed)
    p.add_argument("--out", default="", help="write per-instance rows as CSV")
    a = p.parse_args(argv)
    cfg = Config(count=a.count, seed=a.seed, out=a.out)
    rows = run(cfg)
    summarize(rows)
    if cfg.out:
        with open(cfg.out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["space", "sampler", "index", "n", "status", "iterations", "residual", "seconds"])
            w.writerows(rows)


if __name__ == "__main__":
    sys.exit(main())
