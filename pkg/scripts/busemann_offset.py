"""How fast b_c(ray(t)) / t approaches the slope, and the offset it leaves behind.

Along a ray the weighted Busemann function is eventually affine in t, so the
error of the ratio is |offset| / t.  This prints the offset distribution per
space and the time at which the error would drop below a given threshold.
"""

import argparse
from dataclasses import dataclass

import numpy as np

from gaussmap import IdealPoint, Point, slope, weighted_busemann
from gaussmap.testkit import Generator


@dataclass
class Config:
    kinds: tuple = ("euclidean", "hyperbolic", "tree", "tree_product", "h2_line")
    count: int = 100
    seed: int = 50_000
    threshold: float = 1e-3


def offsets(kind, cfg):
    out = []
    for i in range(cfg.count):
        g = Generator(cfg.seed + i)
        X = g.space(kind)
        c = g.configuration(X)
        xi = IdealPoint(X, X.random_ideal(g.rng))
        s = slope(c, xi)
        b = [weighted_busemann(c, Point(X, X.ray(X.base, xi.data, t))) - s * t for t in (1e3, 1e4)]
        out.append((b[1], abs(b[1] - b[0])))
    return np.array(out)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--count", type=int, default=Config.count)
    p.add_argument("--threshold", type=float, default=Config.threshold)
    a = p.parse_args(argv)
    cfg = Config(count=a.count, threshold=a.threshold)
    print(f"{'space':<14}{'median |C|':>12}{'max |C|':>10}{'drift':>10}{'t needed (max)':>16}{'ok at 1e3':>11}")
    for kind in cfg.kinds:
        o = offsets(kind, cfg)
        mag = np.abs(o[:, 0])
        ok = int(np.sum(mag / 1e3 <= cfg.threshold))
        print(f"{kind:<14}{np.median(mag):>12.3g}{mag.max():>10.3g}{o[:, 1].max():>10.1e}"
              f"{mag.max() / cfg.threshold:>16.3g}{ok:>8}/{cfg.count}")


if __name__ == "__main__":
    main()
