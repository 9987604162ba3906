"""Seeded instance generators and brute-force oracles for the property suites.

The oracles are deliberately slow and structurally different from the code
they check: grids plus local refinement instead of closed forms.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from .core import IdealPoint, Point, UnsupportedSpace, WeightedConfiguration
from .projection import FactorSlice, GeodesicLine, GeodesicSegment, Subtree
from .solver import _raw_phi
from .spaces import Euclidean, Hyperbolic2, MetricTree, Product
from .spaces.base import wrap_angle
from .stability import Verdict, classify, slope

HALF_PI = 0.5 * math.pi
W_LO, W_HI = 0.1, 10.0


@dataclass
class Generator:
    """Reproducible sampler of spaces and configurations."""

    seed: int = 0
    rng: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        self.rng = np.random.default_rng(self.seed)

    # --- spaces -----------------------------------------------------------
    def tree(self, n_vertices=None, n_ends=None, min_ends=2) -> MetricTree:
        rng = self.rng
        nv = int(n_vertices or rng.integers(3, 13))
        ne = int(n_ends or rng.integers(min_ends, 7))
        names = [f"v{i:02d}" for i in range(nv)]
        edges = [(names[int(rng.integers(i))], names[i], float(rng.uniform(0.5, 2.0)))
                 for i in range(1, nv)]
        ends = [(f"e{j}", names[int(rng.integers(nv))]) for j in range(ne)]
        return MetricTree(names, edges, ends)

    def euclidean(self, dimension=None) -> Euclidean:
        return Euclidean(int(dimension or self.rng.integers(1, 5)))

    def tree_product(self, min_ends=3) -> Product:
        # a factor with two ends is a line, which rules out stable instances
        return Product(self.tree(int(self.rng.integers(3, 7)), min_ends=min_ends),
                       self.tree(int(self.rng.integers(3, 7)), min_ends=min_ends))

    def space(self, kind: str):
        if kind == "euclidean":
            return self.euclidean()
        if kind == "hyperbolic":
            return Hyperbolic2()
        if kind == "tree":
            return self.tree(min_ends=3)
        if kind == "tree_product":
            return self.tree_product()
        if kind == "h2_line":
            return Product(Hyperbolic2(), Euclidean(1))
        raise ValueError(kind)

    # --- configurations ---------------------------------------------------
    def weight(self) -> float:
        return float(math.exp(self.rng.uniform(math.log(W_LO), math.log(W_HI))))

    def n_points(self) -> int:
        return int(self.rng.integers(2, 9))

    def configuration(self, space, n=None) -> WeightedConfiguration:
        n = n or self.n_points()
        return WeightedConfiguration(
            tuple(IdealPoint(space, space.random_ideal(self.rng)) for _ in range(n)),
            tuple(self.weight() for _ in range(n)))

    def _rejection(self, space, want, tries=20000, margin=1e-6, n=None):
        for _ in range(tries):
            c = self.configuration(space, n)
            rep = classify(c, space)
            if want is Verdict.STABLE and rep.min_slope > margin:
                return c
            if want is Verdict.UNSTABLE and rep.min_slope < -margin:
                return c
        raise RuntimeError(f"no {want} instance found for {space!r}")

    def stable(self, space, margin=1e-6) -> WeightedConfiguration:
        """Certified stable instance (min slope > margin)."""
        factors = space.factors if isinstance(space, Product) else (space,)
        if any(isinstance(f, Euclidean) or (isinstance(f, MetricTree) and len(f.end_ids) < 3)
               for f in factors):
            raise UnsupportedSpace("a flat factor or a line rules out stability")
        return self._rejection(space, Verdict.STABLE, margin=margin,
                               n=int(self.rng.integers(3, 9)))

    def unstable(self, space, margin=1e-6) -> WeightedConfiguration:
        """Certified unstable instance (min slope < -margin)."""
        return self._rejection(space, Verdict.UNSTABLE, margin=margin)

    def unstable_heavy(self, space, margin=1.0, n=None) -> WeightedConfiguration:
        """Unstable instance on H^2 or a tree: one atom outweighs the rest by >= margin."""
        for _ in range(10000):
            c = self.configuration(space, n)
            rest = math.fsum(c.weights[1:])
            heavy = rest + margin * (1.0 + self.rng.uniform())
            if heavy > W_HI:
                continue
            ws = (heavy,) + c.weights[1:]
            out = WeightedConfiguration(c.points, ws)
            if classify(out, space).min_slope <= -margin:
                return out
        raise RuntimeError("no heavy unstable instance found")

    def semistable_zero(self, space) -> WeightedConfiguration:
        """A configuration whose minimal slope is exactly zero."""
        for _ in range(10000):
            c = self._balanced(space)
            if c is None:
                continue
            rep = classify(c, space)
            if rep.verdict is Verdict.SEMISTABLE and abs(rep.min_slope) <= 1e-12:
                return c
        raise RuntimeError(f"no slope-zero instance found for {space!r}")

    def semistable(self, space) -> WeightedConfiguration:
        """Semistable instance: stable or slope-zero with equal odds."""
        if self.rng.uniform() < 0.5 and not isinstance(space, Euclidean):
            return self.stable(space)
        return self.semistable_zero(space)

    def _balanced(self, space):
        rng = self.rng
        n = self.n_points()
        if isinstance(space, Euclidean):
            pts, ws = [], []
            for _ in range(n - 1):
                pts.append(space.random_ideal(rng))
                ws.append(self.weight())
            v = [-math.fsum(w * p[j] for p, w in zip(pts, ws)) for j in range(space.dimension)]
            m = math.sqrt(math.fsum(x * x for x in v))
            if not W_LO <= m <= W_HI:
                return None
            pts.append(space.direction(*v))
            ws.append(m)
            return _config(space, pts, ws)
        if isinstance(space, (Hyperbolic2, MetricTree)):
            heavy = space.random_ideal(rng)
            pts = [heavy]
            for _ in range(n - 1):
                d = space.random_ideal(rng)
                if space.same_ideal(d, heavy):
                    return None
                pts.append(d)
            ws = [self.weight() for _ in range(n - 1)]
            m = math.fsum(ws)
            if m > W_HI:
                return None
            return _config(space, pts, [m] + ws)
        if isinstance(space, Product):
            if rng.uniform() < 0.3:
                # split instance: pure factor points, balanced in one factor
                half = max(1, n // 2)
                a = self._balanced_factor(space.a, max(2, n - half))
                b = self.stable_factor(space.b, max(3, half))
                if a is None or b is None:
                    return None
                pts = [(0.0, d, None) for d in a[0]] + [(HALF_PI, None, d) for d in b[0]]
                return _config(space, pts, list(a[1]) + list(b[1]))
            pts = [space.random_ideal(rng) for _ in range(n)]
            i0 = next((i for i, p in enumerate(pts) if p[1] is not None), None)
            if i0 is None:
                return None
            e = pts[i0][1]
            if any(j != i0 and p[1] is not None and space.a.same_ideal(p[1], e)
                   for j, p in enumerate(pts)):
                return None
            ws = [self.weight() for _ in range(n)]
            ca = Product.weights(pts[i0])[0]
            rest = math.fsum(w * Product.weights(p)[0] for j, (p, w) in enumerate(zip(pts, ws)) if j != i0)
            m = rest / ca
            if not W_LO <= m <= W_HI:
                return None
            ws[i0] = m
            return _config(space, pts, ws)
        raise UnsupportedSpace(repr(space))

    def _balanced_factor(self, space, n):
        heavy = space.random_ideal(self.rng)
        others = [space.random_ideal(self.rng) for _ in range(n - 1)]
        if any(space.same_ideal(d, heavy) for d in others):
            return None
        ws = [self.weight() for _ in others]
        if math.fsum(ws) > W_HI:
            return None
        return [heavy] + others, [math.fsum(ws)] + ws

    def stable_factor(self, space, n):
        for _ in range(200):
            pts = [space.random_ideal(self.rng) for _ in range(n)]
            ws = [self.weight() for _ in range(n)]
            if classify(_config(space, pts, ws), space).min_slope > 1e-6:
                return pts, ws
        return None

    def polygon_vertices(self, space, n=None, scale=3.0):
        n = n or self.n_points()
        return [Point(space, space.random_point(self.rng, scale)) for _ in range(n)]

    def convex_subset(self, space):
        """A random line, segment, subtree or factor slice of ``space``."""
        rng = self.rng
        if isinstance(space, MetricTree):
            # a ball in the vertex graph is connected
            root = space.vertices[int(rng.integers(len(space.vertices)))]
            keep, frontier = {root}, [root]
            for _ in range(int(rng.integers(0, 3))):
                frontier = [w for u in frontier for w, _, _ in space.adj[u] if w not in keep]
                keep.update(frontier)
            ends = [e for e in space.end_ids if space.anchor[e] in keep and rng.uniform() < 0.5]
            return Subtree(space, frozenset(keep), frozenset(ends))
        if isinstance(space, Product) and rng.uniform() < 0.5:
            return FactorSlice(space, space.b.random_point(rng, 2.0))
        if not isinstance(space, Product) and rng.uniform() < 0.5:
            if isinstance(space, Euclidean):
                return GeodesicLine(space, point=space.random_point(rng, 2.0),
                                    direction=space.random_ideal(rng))
            a = space.random_ideal(rng)
            return GeodesicLine(space, ends=(a, wrap_angle(a + rng.uniform(0.3, 2 * math.pi - 0.3))))
        while True:
            p, q = space.random_point(rng, 2.0), space.random_point(rng, 2.0)
            if space.dist(p, q) > 1e-3:
                return GeodesicSegment(space, p, q)


def _config(space, data, weights):
    return WeightedConfiguration(tuple(IdealPoint(space, d) for d in data), tuple(weights))


# --- oracles -----------------------------------------------------------------

def _factor_candidates(space, data):
    """Atoms plus an off-support representative; the whole boundary for a line."""
    if isinstance(space, Euclidean):
        if space.dimension != 1:
            raise UnsupportedSpace("brute-force slope needs a finite boundary")
        return [(1.0,), (-1.0,)]
    if isinstance(space, (Hyperbolic2, MetricTree)):
        out = []
        for d in data:
            if not any(space.same_ideal(d, o) for o in out):
                out.append(d)
        rep = space.off_support(out)
        if rep is not None:
            out.append(rep)
        return out
    raise UnsupportedSpace(repr(space))


def _golden_min(f, lo, hi, tol=1e-13):
    g = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def oracle_line_busemann_min(ends, eta: float, span: float = 60.0) -> tuple:
    """Minimizer of b_eta on the H^2 line between two boundary angles, as polar coordinates.

    Works in the hyperboloid model with the null-vector parametrization of
    the line, independently of the polar code paths.
    """
    v1 = np.array([1.0, math.cos(ends[0]), math.sin(ends[0])])
    v2 = np.array([1.0, math.cos(ends[1]), math.sin(ends[1])])
    w = np.array([1.0, math.cos(eta), math.sin(eta)])

    def mink(a, b):
        return -a[0] * b[0] + a[1] * b[1] + a[2] * b[2]

    k = math.sqrt(-2.0 * mink(v1, v2))

    def x(s):
        return (math.exp(s) * v1 + math.exp(-s) * v2) / k

    s, _ = _golden_min(lambda s: math.log(-mink(x(s), w)), -span, span, tol=1e-12)
    y = x(s)
    return (math.asinh(math.hypot(y[1], y[2])), wrap_angle(math.atan2(y[2], y[1])))


def oracle_min_slope(c: WeightedConfiguration, space, grid: int = 10**4) -> float:
    """Brute-force minimum of the slope over atoms, off-support points and a theta grid."""
    if not isinstance(space, Product):
        return min(slope(c, IdealPoint(space, d)) for d in _factor_candidates(space, [p.data for p in c.points]))
    cand_a = _factor_candidates(space.a, [p.data[1] for p in c.points if p.data[1] is not None])
    cand_b = _factor_candidates(space.b, [p.data[2] for p in c.points if p.data[2] is not None])
    thetas = np.linspace(0.0, HALF_PI, grid)
    best = math.inf
    for eta in cand_a:
        for zeta in cand_b:
            # per-term cos of the join angle, evaluated over the whole grid
            total = np.zeros_like(thetas)
            for p, m in c:
                ca, sb = Product.weights(p.data)
                ta = math.cos(min(math.pi, space.a.tits(p.data[1], eta))) if ca > 0 else 0.0
                tb = math.cos(min(math.pi, space.b.tits(p.data[2], zeta))) if sb > 0 else 0.0
                total -= m * np.clip(ca * ta * np.cos(thetas) + sb * tb * np.sin(thetas), -1.0, 1.0)
            j = int(np.argmin(total))
            best = min(best, float(total[j]), float(total[0]), float(total[-1]))

            def f(t, eta=eta, zeta=zeta):
                return slope(c, IdealPoint(space, space.join(t, eta, zeta)))
            lo, hi = thetas[max(j - 1, 0)], thetas[min(j + 1, grid - 1)]
            _, val = _golden_min(f, lo, hi)
            best = min(best, val, f(0.0), f(HALF_PI))
    return best


def _tree_segments(space: MetricTree, reach: float):
    """Parametrized pieces covering the core plus each end up to ``reach``."""
    segs = [(("e", k), L) for k, (_, _, L) in enumerate(space.edges)]
    segs += [(("x", e), reach) for e in space.end_ids]
    return segs


def _displacement(space, data, weights, x):
    return space.dist(x, _raw_phi(space, data, weights, x))


def _tree_fixed_point(space: MetricTree, data, weights, tol):
    if not data:
        return True, space.base
    total = math.fsum(weights)
    reach = total + 1.0
    # beyond distance `total` along an end e, Phi translates by -slope(e)
    for e in space.end_ids:
        s = -math.fsum(m if d == e else -m for d, m in zip(data, weights))
        if abs(s) <= tol:
            x = space._make(("x", e), reach)
            if _displacement(space, data, weights, x) <= tol:
                return True, x
    best = (math.inf, None)
    for seg, length in _tree_segments(space, reach):
        n = max(8, int(length / 0.02))
        grid = np.linspace(0.0, length, n + 1)
        vals = [_displacement(space, data, weights, space._make(seg, float(o))) for o in grid]
        j = int(np.argmin(vals))
        h = length / n

        def f(o, seg=seg):
            return _displacement(space, data, weights, space._make(seg, o))
        o, val = _golden_min(f, max(0.0, grid[j] - h), min(length, grid[j] + h))
        for cand, v in ((o, val), (float(grid[j]), vals[j])):
            if v < best[0]:
                best = (v, space._make(seg, cand))
    return best[0] <= tol, best[1]


def oracle_fixed_point_exists(c: WeightedConfiguration, space, tol: float = 1e-9):
    """Locate a fixed point of Phi_c by direct search; returns (exists, witness Point or None)."""
    data = [p.data for p in c.points]
    weights = list(c.weights)
    if isinstance(space, MetricTree):
        ok, x = _tree_fixed_point(space, data, weights, tol)
        return ok, (Point(space, x) if ok else None)
    if not (isinstance(space, Product) and isinstance(space.a, MetricTree)
            and isinstance(space.b, MetricTree)):
        raise UnsupportedSpace(f"no fixed-point oracle for {space!r}")
    if all(d[0] in (0.0, HALF_PI) for d in data):
        da = [(d[1], m) for d, m in zip(data, weights) if d[2] is None]
        db = [(d[2], m) for d, m in zip(data, weights) if d[1] is None]
        ok_a, xa = _tree_fixed_point(space.a, [d for d, _ in da], [m for _, m in da], tol / 2)
        ok_b, xb = _tree_fixed_point(space.b, [d for d, _ in db], [m for _, m in db], tol / 2)
        ok = ok_a and ok_b
        return ok, (Point(space, (xa, xb)) if ok else None)
    return _product_grid_fixed_point(space, data, weights, tol)


def _product_grid_fixed_point(space, data, weights, tol, budget=400000):
    """Lipschitz branch and bound over segment x segment boxes.

    x -> d(x, Phi x) is 2-Lipschitz, so a box whose center value exceeds twice
    its circumradius (plus tol) cannot contain a fixed point.
    """
    reach = math.fsum(weights) + 1.0
    segs_a = _tree_segments(space.a, reach)
    segs_b = _tree_segments(space.b, reach)

    def at(sa, sb, u, v):
        return (space.a._make(sa, u), space.b._make(sb, v))

    heap, tick = [], 0

    def push(sa, sb, a0, a1, b0, b1):
        nonlocal tick
        u, v = 0.5 * (a0 + a1), 0.5 * (b0 + b1)
        f = _displacement(space, data, weights, at(sa, sb, u, v))
        rad = 0.5 * math.hypot(a1 - a0, b1 - b0)
        tick += 1
        heapq.heappush(heap, (f - 2.0 * rad, tick, f, sa, sb, a0, a1, b0, b1))
        return f, (sa, sb, u, v)

    for sa, la in segs_a:
        for sb, lb in segs_b:
            f, where = push(sa, sb, 0.0, la, 0.0, lb)
            if f <= tol:
                return True, Point(space, at(*where))
    while heap and tick < budget:
        bound, _, f, sa, sb, a0, a1, b0, b1 = heapq.heappop(heap)
        if bound > tol:
            return False, None
        am, bm = 0.5 * (a0 + a1), 0.5 * (b0 + b1)
        for box in ((a0, am, b0, bm), (am, a1, b0, bm), (a0, am, bm, b1), (am, a1, bm, b1)):
            f, where = push(sa, sb, *box)
            if f <= tol:
                return True, Point(space, at(*where))
    return False, None
