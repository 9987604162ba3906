"""Points, ideal points, configurations and polygons shared by every model space.

All lengths are in the intrinsic units of the owning space and all angles are
in radians.  Values are immutable; every operation here is pure.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from typing import Any, Sequence

# Two tolerance tiers: representation error vs. accumulated computation error.
POINT_TOL = 1e-12
METRIC_TOL = 1e-10


class GaussMapError(Exception):
    """Base class for all errors raised by this package."""


class SpaceMismatch(GaussMapError, ValueError):
    pass


class ParameterOutOfRange(GaussMapError, ValueError):
    pass


class DegenerateTriangle(GaussMapError, ValueError):
    pass


class DegenerateSegment(GaussMapError, ValueError):
    pass


class DegenerateEdge(GaussMapError, ValueError):
    pass


class GaussMapUndefined(GaussMapError):
    """A polygon edge cannot be extended to a ray (the space is not geodesically complete there)."""


class EmptyConfiguration(GaussMapError, ValueError):
    pass


class NonpositiveWeight(GaussMapError, ValueError):
    pass


class UnknownEnd(GaussMapError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class InvalidPoint(GaussMapError, ValueError):
    pass


class InvalidSpace(GaussMapError, ValueError):
    pass


class LengthMismatch(GaussMapError, ValueError):
    pass


class WrongSpaceVariant(GaussMapError, TypeError):
    pass


class UnsupportedSpace(GaussMapError, TypeError):
    pass


class BasepointNotInSubset(GaussMapError, ValueError):
    pass


@dataclass(frozen=True)
class Point:
    """A location in a model space.

    ``coords`` is the space's raw coordinate record; see the individual space
    classes for the convention each one uses.
    """

    space: Any = field(repr=False)
    coords: Any

    def __post_init__(self):
        if not self.space.contains(self.coords):
            raise InvalidPoint(f"{self.coords!r} is not a point of {self.space}")


@dataclass(frozen=True)
class IdealPoint:
    """A point of the boundary at infinity of a model space."""

    space: Any = field(repr=False)
    data: Any

    def __post_init__(self):
        self.space.check_ideal(self.data)


@dataclass(frozen=True)
class WeightedConfiguration:
    points: tuple
    weights: tuple

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        object.__setattr__(self, "weights", tuple(float(m) for m in self.weights))
        if not self.points:
            raise EmptyConfiguration("a configuration needs at least one ideal point")
        if len(self.points) != len(self.weights):
            raise LengthMismatch(
                f"{len(self.points)} ideal points but {len(self.weights)} weights")
        for i, m in enumerate(self.weights):
            if not (m > 0 and math.isfinite(m)):
                raise NonpositiveWeight(f"weight {i} is {m}; weights must be positive")
        space = self.points[0].space
        if any(p.space is not space for p in self.points):
            raise SpaceMismatch("all ideal points of a configuration must lie in one space")

    @property
    def space(self):
        return self.points[0].space

    @property
    def total_weight(self) -> float:
        return math.fsum(self.weights)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(zip(self.points, self.weights))


@dataclass(frozen=True)
class Polygon:
    vertices: tuple
    closure_defect: float = 0.0
    # indices i with vertices[i] == vertices[i+1] (cyclically)
    repeated: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        if not self.vertices:
            raise GaussMapError("a polygon needs at least one vertex")
        space = self.vertices[0].space
        if any(v.space is not space for v in self.vertices):
            raise SpaceMismatch("all polygon vertices must lie in one space")
        if self.closure_defect < 0:
            raise ValueError("closure_defect must be nonnegative")

    @property
    def space(self):
        return self.vertices[0].space

    def __len__(self):
        return len(self.vertices)


def same_space(*objs) -> Any:
    space = objs[0].space
    for o in objs[1:]:
        if o.space is not space:
            raise SpaceMismatch(f"{o!r} does not belong to {space}")
    return space


def distance(x: Point, y: Point) -> float:
    space = same_space(x, y)
    return space.dist(x.coords, y.coords)


def geodesic_point(x: Point, y: Point, t: float) -> Point:
    """Point at distance ``t`` from ``x`` on the segment from ``x`` to ``y``."""
    space = same_space(x, y)
    d = space.dist(x.coords, y.coords)
    if t < -POINT_TOL or t > d + POINT_TOL:
        raise ParameterOutOfRange(f"t={t} outside [0, {d}]")
    t = min(max(t, 0.0), d)
    return Point(space, space.geodesic(x.coords, y.coords, t, d))


def law_of_cosines_angle(a: float, b: float, c: float) -> float:
    """Angle opposite side ``c`` in a Euclidean triangle with sides a, b, c.

    Kahan's rearrangement of the cosine rule: accurate for needle-like
    triangles, where acos of the plain cosine loses half the digits.  Side
    lengths violating the triangle inequality by rounding give 0 or pi.
    """
    a, b = max(a, b), min(a, b)
    if b >= c:
        mu = c - (a - b)
    else:
        mu = b - (a - c)
    # side lengths carry rounding of order eps * a; below that the triangle is flat
    ulp = 4.0 * sys.float_info.epsilon * a
    if mu <= ulp:
        return 0.0
    if (a - c) + b <= ulp:
        return math.pi
    den = (a + (b + c)) * ((a - c) + b)
    return 2.0 * math.atan2(math.sqrt(((a - b) + c) * mu), math.sqrt(den))


def comparison_angle(o: Point, x: Point, y: Point) -> float:
    space = same_space(o, x, y)
    a = space.dist(o.coords, x.coords)
    b = space.dist(o.coords, y.coords)
    if a <= POINT_TOL or b <= POINT_TOL:
        raise DegenerateTriangle("comparison angle needs x != o and y != o")
    return law_of_cosines_angle(a, b, space.dist(x.coords, y.coords))


def validate_configuration(c: WeightedConfiguration, space) -> float:
    """Check ``c`` lives on the boundary of ``space``; return its total weight."""
    if not isinstance(c, WeightedConfiguration):
        raise TypeError("expected a WeightedConfiguration")
    for xi in c.points:
        if xi.space is not space:
            raise SpaceMismatch(f"{xi!r} is not an ideal point of {space}")
        space.check_ideal(xi.data)
    return c.total_weight


def configuration(space, data: Sequence, weights: Sequence[float]) -> WeightedConfiguration:
    """Convenience constructor from raw ideal data."""
    return WeightedConfiguration(tuple(IdealPoint(space, d) for d in data), tuple(weights))
