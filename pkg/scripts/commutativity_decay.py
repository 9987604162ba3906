"""Gap between the two orders of pushing along a ray, over a geometric grid of times."""

import argparse
from dataclasses import dataclass, field

from gaussmap import Hyperbolic2, MetricTree, Point, Product, commutativity_gap, tits_angle


@dataclass
class Config:
    times: list = field(default_factory=lambda: [10.0**k for k in range(-1, 4)] + [3.0, 30.0])
    m: float = 1.0
    c: float = 1.0


def tripod(center, legs, tag):
    names = [center] + [f"{tag}{i}" for i in range(1, len(legs) + 1)]
    edges = [(center, n, L) for n, L in zip(names[1:], legs)]
    ends = [(f"{tag}e{i}", n) for i, n in enumerate(names[1:], 1)]
    return MetricTree(names, edges, ends, basepoint=("v", center))


def cases():
    H2 = Hyperbolic2()
    yield "H2, boundary angles 0 and 2", H2.ideal(0.0), H2.ideal(2.0), H2.basepoint
    yield "H2, boundary angles 0 and 3", H2.ideal(0.0), H2.ideal(3.0), H2.basepoint
    T = Product(tripod("c", [1.0, 1.0, 2.0], "a"), tripod("d", [1.0, 0.5, 1.5], "b"))
    o = Point(T, (("v", "a3"), ("v", "b3")))
    yield "tree x tree, mixed joins", T.ideal((0.5, "ae1", "be1")), T.ideal((1.0, "ae2", "be2")), o
    yield "tree x tree, shared A end", T.ideal((0.3, "ae1", "be1")), T.ideal((0.6, "ae1", "be2")), o


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--m", type=float, default=Config.m)
    p.add_argument("--c", type=float, default=Config.c)
    a = p.parse_args(argv)
    cfg = Config(m=a.m, c=a.c)
    times = sorted(cfg.times)
    print("t".ljust(34) + "".join(f"{t:>11g}" for t in times))
    for label, eta, xi, o in cases():
        gaps = [commutativity_gap(eta, xi, cfg.m, cfg.c, o, t) for t in times]
        print(f"{label} ({tits_angle(eta, xi):.2f})".ljust(34) + "".join(f"{g:>11.2e}" for g in gaps))


if __name__ == "__main__":
    main()
