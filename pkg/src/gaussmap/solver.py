"""The weak contraction of a configuration, its fixed points, and the polygons they close.

The push ``phi_{xi,t}`` moves a point distance ``t`` along its ray towards
``xi``; ``Phi_c`` composes the pushes of a configuration in index order.  A
fixed point of ``Phi_c`` is the first vertex of a closed polygon whose Gauss
map is ``c``.  Fixed points are located with the averaged (Krasnoselskii-Mann)
iteration ``x <- midpoint(x, Phi_c(x))``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .core import (
    DegenerateEdge, LengthMismatch, POINT_TOL, Point, Polygon,
    WeightedConfiguration, WrongSpaceVariant, same_space, validate_configuration,
)
from .spaces import Euclidean, Hyperbolic2, Product, ideal_point_of_segment, segment_extensions
from .spaces.hyperbolic import h2_mann

EPS_FIX = 1e-10
MAX_ITER = 10**6
R_MAX = 1e6


class Status(enum.Enum):
    CONVERGED = "Converged"
    MAX_ITERATIONS = "MaxIterations"
    DIVERGED = "Diverged"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class FixedPointReport:
    status: Status
    point: Point
    residual: float
    iterations: int
    trace: tuple = ()
    # Phi_c is the identity, so every point is fixed (flat semistable case)
    whole_space_fixed: bool = False

    @property
    def converged(self) -> bool:
        return self.status is Status.CONVERGED


def _raw_phi(space, data, weights, x):
    for d, m in zip(data, weights):
        x = space.ray(x, d, m)
    return x


def apply_phi(c: WeightedConfiguration, x: Point) -> Point:
    """Phi_c(x): push towards xi_1 by m_1, then xi_2 by m_2, and so on."""
    space = same_space(c.points[0], x)
    return Point(space, _raw_phi(space, [p.data for p in c.points], c.weights, x.coords))


def find_fixed_point(c: WeightedConfiguration, space, x0: Point | None = None,
                     eps_fix: float = EPS_FIX, max_iter: int = MAX_ITER, r_max: float = R_MAX,
                     trace_every: int = 0) -> FixedPointReport:
    """Run the averaged iteration from ``x0`` (default: the basepoint).

    Stops with CONVERGED once d(x, Phi_c(x)) <= eps_fix, DIVERGED once x is
    farther than r_max from the basepoint, and MAX_ITERATIONS after
    ``max_iter`` averaged steps.  With ``trace_every = k > 0`` the residual is
    recorded every k-th iteration.
    """
    validate_configuration(c, space)
    x0 = space.basepoint if x0 is None else x0
    same_space(c.points[0], x0)
    data = [p.data for p in c.points]
    weights = list(c.weights)
    max_iter = int(max_iter)

    if isinstance(space, Hyperbolic2):
        cap = max_iter // trace_every + 2 if trace_every > 0 else 0
        buf = np.zeros(cap)
        code, r, phi, res, k, n_tr = h2_mann(
            np.asarray(data, dtype=float), np.asarray(weights, dtype=float),
            x0.coords[0], x0.coords[1], space.base[0], space.base[1],
            float(eps_fix), max_iter, float(r_max), int(trace_every), buf)
        status = (Status.CONVERGED, Status.MAX_ITERATIONS, Status.DIVERGED)[code]
        return FixedPointReport(status, Point(space, (float(r), float(phi))), float(res), int(k),
                                tuple(float(v) for v in buf[:n_tr]))

    x = x0.coords
    base = space.base
    trace = []
    k = 0
    while True:
        y = _raw_phi(space, data, weights, x)
        res = space.dist(x, y)
        if trace_every > 0 and k % trace_every == 0:
            trace.append(res)
        if res <= eps_fix:
            status = Status.CONVERGED
            break
        if space.dist(base, x) > r_max:
            status = Status.DIVERGED
            break
        if k >= max_iter:
            status = Status.MAX_ITERATIONS
            break
        x = space.geodesic(x, y, 0.5 * res, res)
        k += 1
    whole = status is Status.CONVERGED and isinstance(space, Euclidean)
    return FixedPointReport(status, Point(space, x), res, k, tuple(trace), whole)


def build_polygon(c: WeightedConfiguration, x_star: Point) -> Polygon:
    """Vertices x_1 = x_star, x_{k+1} = push of x_k towards xi_k by m_k."""
    space = same_space(c.points[0], x_star)
    verts = [x_star.coords]
    for p, m in c:
        verts.append(space.ray(verts[-1], p.data, m))
    closing = verts.pop()
    defect = space.dist(closing, x_star.coords)
    repeated = tuple(i for i in range(1, len(verts))
                     if any(space.dist(verts[i], verts[j]) <= POINT_TOL for j in range(i)))
    return Polygon(tuple(Point(space, v) for v in verts), defect, repeated)


def _edges(p: Polygon):
    n = len(p.vertices)
    for i in range(n):
        x, y = p.vertices[i], p.vertices[(i + 1) % n]
        if p.space.dist(x.coords, y.coords) <= POINT_TOL:
            raise DegenerateEdge(f"vertices {i} and {(i + 1) % n} coincide")
        yield x, y


def gauss_map(p: Polygon) -> WeightedConfiguration:
    """The canonical Gauss map: each edge's extending ideal point, weighted by its length."""
    pts, ws = [], []
    for x, y in _edges(p):
        pts.append(ideal_point_of_segment(x, y))
        ws.append(p.space.dist(x.coords, y.coords))
    return WeightedConfiguration(tuple(pts), tuple(ws))


def gauss_map_is_unique(p: Polygon) -> bool:
    """True when every edge extends to exactly one ray."""
    return all(len(segment_extensions(x, y)) == 1 for x, y in _edges(p))


@dataclass(frozen=True)
class GaussMapCheck:
    ok: bool
    # per edge: (d(push of x_i, x_{i+1}), |m_i - d(x_i, x_{i+1})|)
    residuals: tuple = field(default=())
    eps: float = 1e-8

    def __bool__(self):
        return self.ok

    @property
    def failing_edges(self):
        return [i for i, (a, b) in enumerate(self.residuals) if a > self.eps or b > self.eps]


def is_gauss_map(p: Polygon, c: WeightedConfiguration, eps: float = 1e-8) -> GaussMapCheck:
    if len(p.vertices) != len(c.points):
        raise LengthMismatch(f"{len(p.vertices)} vertices but {len(c.points)} ideal points")
    space = same_space(p.vertices[0], c.points[0])
    n = len(p.vertices)
    res = []
    for i, (xi, m) in enumerate(c):
        x, y = p.vertices[i].coords, p.vertices[(i + 1) % n].coords
        res.append((space.dist(space.ray(x, xi.data, m), y), abs(m - space.dist(x, y))))
    ok = all(a <= eps and b <= eps for a, b in res)
    return GaussMapCheck(ok, tuple(res), eps)


@dataclass(frozen=True)
class DeltaLength:
    a: float
    b: float

    @property
    def total(self) -> float:
        return math.hypot(self.a, self.b)


def delta_side_lengths(p: Polygon) -> list[DeltaLength]:
    """Per-edge factor displacements of a polygon in a product space."""
    space = p.space
    if not isinstance(space, Product):
        raise WrongSpaceVariant(f"Delta side lengths need a product space, got {space!r}")
    n = len(p.vertices)
    return [DeltaLength(*space.factor_dists(p.vertices[i].coords, p.vertices[(i + 1) % n].coords))
            for i in range(n)]


def commutativity_gap(eta, xi, m: float, c: float, o: Point, t: float) -> float:
    """Distance between the two orders of pushing by (xi, m) and (eta, c) at rho(t).

    rho is the ray from o towards eta; the gap tends to zero as t grows.
    """
    space = same_space(eta, xi, o)
    rho = space.ray(o.coords, eta.data, t)
    one = space.ray(space.ray(rho, eta.data, c), xi.data, m)
    two = space.ray(space.ray(rho, xi.data, m), eta.data, c)
    return space.dist(one, two)
