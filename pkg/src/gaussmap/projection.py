"""Nearest-point projection onto closed convex subsets, and where projected rays go."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .core import (
    BasepointNotInSubset, DegenerateSegment, IdealPoint, InvalidSpace, POINT_TOL, Point,
    SpaceMismatch, UnsupportedSpace, comparison_angle, same_space,
)
from .spaces import Euclidean, Hyperbolic2, MetricTree, Product, ideal_point_of_segment
from .spaces.hyperbolic import h2_horo

MEMBER_TOL = 1e-9


# --- convex subsets ---------------------------------------------------------

@dataclass(frozen=True)
class GeodesicLine:
    """A complete geodesic: a point and unit direction in E^n, or two boundary angles in H^2."""

    space: object
    point: tuple | None = None
    direction: tuple | None = None
    ends: tuple | None = None

    def __post_init__(self):
        sp = self.space
        if isinstance(sp, Euclidean):
            if self.point is None or self.direction is None:
                raise InvalidSpace("a Euclidean line needs a point and a direction")
            sp.check_ideal(self.direction)
        elif isinstance(sp, Hyperbolic2):
            if self.ends is None or len(self.ends) != 2:
                raise InvalidSpace("a hyperbolic line needs two boundary angles")
            for b in self.ends:
                sp.check_ideal(b)
            if sp.same_ideal(*self.ends):
                raise DegenerateSegment("line endpoints coincide")
        else:
            raise UnsupportedSpace(f"geodesic lines are implemented on E^n and H^2, not {sp!r}")

    @classmethod
    def through(cls, point: Point, direction: IdealPoint) -> GeodesicLine:
        return cls(same_space(point, direction), point=point.coords, direction=direction.data)

    @classmethod
    def between(cls, a: IdealPoint, b: IdealPoint) -> GeodesicLine:
        return cls(same_space(a, b), ends=(a.data, b.data))

    # H^2 lines are parametrized from the foot of the perpendicular from the origin
    def _h2_frame(self):
        a1, a2 = self.ends
        half = 0.5 * ((a2 - a1) % (2.0 * math.pi))
        mid = a1 + half
        if half > 0.5 * math.pi:
            half, mid = math.pi - half, mid + math.pi
        foot0 = (-math.log(math.tan(0.5 * half)), mid % (2.0 * math.pi))
        if foot0[0] <= 0.0:
            foot0 = (0.0, 0.0)
        return foot0, self._diff(foot0)

    def _diff(self, x):
        a1, a2 = self.ends
        return h2_horo(a2, x[0], x[1]) - h2_horo(a1, x[0], x[1])

    def param(self, x):
        """Signed position of the foot of x; increasing towards ends[1] / along direction."""
        if isinstance(self.space, Euclidean):
            return math.fsum((xi - pi) * ui for xi, pi, ui in zip(x, self.point, self.direction))
        _, d0 = self._h2_frame()
        return 0.5 * (d0 - self._diff(x))

    def at(self, u):
        if isinstance(self.space, Euclidean):
            return tuple(p + u * v for p, v in zip(self.point, self.direction))
        m, _ = self._h2_frame()
        return self.space.ray(m, self.ends[1], u) if u >= 0 else self.space.ray(m, self.ends[0], -u)


@dataclass(frozen=True)
class GeodesicSegment:
    space: object
    p: tuple
    q: tuple

    def __post_init__(self):
        if self.space.dist(self.p, self.q) <= POINT_TOL:
            raise DegenerateSegment("segment endpoints coincide")

    @classmethod
    def of(cls, p: Point, q: Point) -> GeodesicSegment:
        return cls(same_space(p, q), p.coords, q.coords)

    @property
    def length(self):
        return self.space.dist(self.p, self.q)

    def param(self, x):
        return _clamped_param(self.space, self.p, self.q, x)

    def at(self, u):
        return self.space.geodesic(self.p, self.q, min(max(u, 0.0), self.length))


@dataclass(frozen=True)
class Subtree:
    """The subtree spanned by a connected vertex set plus some retained ends."""

    space: MetricTree
    vertices: frozenset
    ends: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        sp = self.space
        if not isinstance(sp, MetricTree):
            raise UnsupportedSpace("subtrees live in metric trees")
        object.__setattr__(self, "vertices", frozenset(self.vertices))
        object.__setattr__(self, "ends", frozenset(self.ends))
        if not self.vertices:
            raise InvalidSpace("a subtree needs at least one vertex")
        unknown = self.vertices - set(sp.vertices)
        if unknown:
            raise InvalidSpace(f"unknown vertices {sorted(unknown)}")
        for e in self.ends:
            sp.check_ideal(e)
            if sp.anchor[e] not in self.vertices:
                raise InvalidSpace(f"end {e!r} is anchored outside the subtree")
        start = min(self.vertices)
        seen, stack = {start}, [start]
        while stack:
            u = stack.pop()
            for w, _, _ in sp.adj[u]:
                if w in self.vertices and w not in seen:
                    seen.add(w)
                    stack.append(w)
        if seen != self.vertices:
            raise InvalidSpace("vertex set does not induce a connected subtree")

    def contains(self, x):
        kind = x[0]
        if kind == "v":
            return x[1] in self.vertices
        if kind == "e":
            u, v, _ = self.space.edges[x[1]]
            return u in self.vertices and v in self.vertices
        return x[1] in self.ends


@dataclass(frozen=True)
class FactorSlice:
    """A x {y0} inside a product A x B."""

    space: Product
    y0: tuple

    def __post_init__(self):
        if not isinstance(self.space, Product):
            raise UnsupportedSpace("factor slices live in product spaces")
        if not self.space.b.contains(self.y0):
            raise InvalidSpace(f"{self.y0!r} is not a point of the second factor")


# --- feet on geodesics ------------------------------------------------------

def _foot(space, p, q, x):
    """(u0, h): position of x's foot along the geodesic through p, q and x's distance to it."""
    if isinstance(space, Euclidean):
        L = space.dist(p, q)
        u = [(b - a) / L for a, b in zip(p, q)]
        u0 = math.fsum((xi - pi) * ui for xi, pi, ui in zip(x, p, u))
        h = math.sqrt(max(0.0, math.fsum((xi - pi - u0 * ui) ** 2 for xi, pi, ui in zip(x, p, u))))
        return u0, h
    if isinstance(space, Hyperbolic2):
        line = GeodesicLine(space, ends=(space.extensions(q, p)[0], space.extensions(p, q)[0]))
        u0 = line.param(x) - line.param(p)
        return u0, space.dist(x, line.at(line.param(x)))
    if isinstance(space, MetricTree):
        dpx, dpq, dqx = space.dist(p, x), space.dist(p, q), space.dist(q, x)
        u0 = 0.5 * (dpx + dpq - dqx)
        return u0, max(0.0, dpx - u0)
    raise UnsupportedSpace(repr(space))


def _clamped_param(space, p, q, x):
    return min(max(_foot(space, p, q, x)[0], 0.0), space.dist(p, q))


def _dist_and_slope(space, h, u0, u):
    """d(x, g(u)) and its derivative in u, for a point with foot (u0, h)."""
    if isinstance(space, Euclidean):
        d = math.hypot(h, u - u0)
        return d, ((u - u0) / d if d > 0 else 0.0)
    if isinstance(space, Hyperbolic2):
        s = u - u0
        d = math.acosh(max(1.0, math.cosh(h) * math.cosh(s)))
        ratio = 1.0 if d < 1e-300 else d / math.sinh(d)
        # derivative of d^2 / 2, which stays finite at d = 0
        return d, math.cosh(h) * math.sinh(s) * ratio
    d = h + abs(u - u0)
    return d, (1.0 if u > u0 else -1.0 if u < u0 else 0.0)


def _product_segment(seg: GeodesicSegment, x):
    space = seg.space
    p, q = seg.p, seg.q
    factors = []
    for k, f in enumerate(space.factors):
        L = f.dist(p[k], q[k])
        if L > POINT_TOL:
            u0, h = _foot(f, p[k], q[k], x[k])
            factors.append((f, L, u0, h))

    def grad(lam):
        g = 0.0
        for f, L, u0, h in factors:
            d, ds = _dist_and_slope(f, h, u0, lam * L)
            g += L * (ds if isinstance(f, Hyperbolic2) else d * ds)
        return g

    lo, hi = 0.0, 1.0
    if grad(lo) >= 0.0:
        lam = 0.0
    elif grad(hi) <= 0.0:
        lam = 1.0
    else:
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mid in (lo, hi):
                break
            if grad(mid) > 0.0:
                hi = mid
            else:
                lo = mid
        lam = 0.5 * (lo + hi)
    return space.geodesic(p, q, lam * seg.length)


# --- projection -------------------------------------------------------------

def _project_raw(C, x):
    space = C.space
    if isinstance(C, GeodesicLine):
        return C.at(C.param(x))
    if isinstance(C, GeodesicSegment):
        if isinstance(space, Product):
            return _product_segment(C, x)
        return C.at(C.param(x))
    if isinstance(C, FactorSlice):
        return (x[0], C.y0)
    if isinstance(C, Subtree):
        if C.contains(x):
            return x
        # the geodesic from x to the subtree enters it through a vertex
        gate = min(sorted(C.vertices), key=lambda v: space.dist(x, ("v", v)))
        return ("v", gate)
    raise TypeError(f"not a convex subset: {C!r}")


def project_point(C, x: Point) -> Point:
    """The nearest point of C to x."""
    if x.space is not C.space:
        raise SpaceMismatch("subset and point live in different spaces")
    return Point(C.space, _project_raw(C, x.coords))


def contains(C, x: Point, tol: float = MEMBER_TOL) -> bool:
    return C.space.dist(x.coords, _project_raw(C, x.coords)) <= tol


def boundary_angle(C, eta: IdealPoint) -> float | None:
    """Closed-form Tits angle from eta to the boundary of C, or None where not implemented."""
    space = same_space(eta) if eta.space is C.space else None
    if space is None:
        raise SpaceMismatch("subset and ideal point live in different spaces")
    if isinstance(C, GeodesicLine):
        if isinstance(space, Euclidean):
            c = abs(math.fsum(a * b for a, b in zip(eta.data, C.direction)))
            return math.acos(min(1.0, c))
        return 0.0 if any(space.same_ideal(eta.data, b) for b in C.ends) else math.pi
    if isinstance(C, FactorSlice):
        theta, xa, _ = eta.data
        return theta if xa is not None else 0.5 * math.pi
    if isinstance(C, Subtree):
        return 0.0 if eta.data in C.ends else math.pi
    return None


# --- ray projection ---------------------------------------------------------

DEFAULT_GRID = tuple(2.0**k for k in range(21))


@dataclass(frozen=True)
class RaySample:
    t: float
    point: Point
    # comparison angle at o between rho(t) and its projection; None when the projection is o
    angle: float | None


@dataclass(frozen=True)
class ConvergesTo:
    xi: IdealPoint
    angle: float
    samples: tuple = ()


@dataclass(frozen=True)
class Bounded:
    p: Point
    samples: tuple = ()


def _sample(C, o, eta, t):
    space = C.space
    rho = Point(space, space.ray(o.coords, eta.data, t))
    pi = Point(space, _project_raw(C, rho.coords))
    try:
        ang = comparison_angle(o, rho, pi)
    except Exception:
        ang = None
    return RaySample(float(t), pi, ang)


def _refine_on_curve(C, eta, u, h=1e-5):
    """Bisect the symmetric difference of b_eta along a line or segment."""
    space = C.space

    def b(v):
        return space.busemann(eta.data, C.at(v))

    def g(v):
        return b(v + h) - b(v - h)

    lo_lim, hi_lim = (0.0, C.length) if isinstance(C, GeodesicSegment) else (-math.inf, math.inf)
    g0 = g(u)
    if abs(g0) <= 1e-13 * (1.0 + abs(b(u))):
        return u
    w = 1.0
    if g0 > 0:
        hi, lo = u, u - w
        while g(lo) > 0 and lo > lo_lim:
            w *= 2.0
            lo = max(u - w, lo_lim)
        if lo <= lo_lim and g(lo) > 0:
            return lo_lim
    else:
        lo, hi = u, u + w
        while g(hi) < 0 and hi < hi_lim:
            w *= 2.0
            hi = min(u + w, hi_lim)
        if hi >= hi_lim and g(hi) < 0:
            return hi_lim
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if g(mid) > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def analyze_ray_projection(C, o: Point, eta: IdealPoint, t_grid=DEFAULT_GRID,
                           eps_bnd: float = 1e-6):
    """Follow the projection of the ray from o towards eta.

    Returns ConvergesTo when d(o, pi(rho(t))) still grows over the last step of
    the grid by more than a factor 1 + eps_bnd, and Bounded otherwise.
    """
    if o.space is not C.space or eta.space is not C.space:
        raise SpaceMismatch("subset, basepoint and ideal point must share a space")
    if not contains(C, o):
        raise BasepointNotInSubset(f"{o.coords!r} is not in the subset")
    space = C.space
    grid = sorted(float(t) for t in t_grid)
    samples = tuple(_sample(C, o, eta, t) for t in grid)
    reach = [space.dist(o.coords, s.point.coords) for s in samples]
    if len(samples) >= 2:
        prev, last = reach[-2], reach[-1]
        growing = last > POINT_TOL and (prev <= POINT_TOL or last / prev > 1.0 + eps_bnd)
    else:
        growing = False
    if growing:
        xi = ideal_point_of_segment(o, samples[-1].point)
        return ConvergesTo(xi, samples[-1].angle, samples)
    best = min(samples, key=lambda s: space.busemann(eta.data, s.point.coords))
    p = best.point
    if isinstance(C, (GeodesicLine, GeodesicSegment)) and not isinstance(space, Product):
        p = Point(space, C.at(_refine_on_curve(C, eta, C.param(p.coords))))
    return Bounded(p, samples)
