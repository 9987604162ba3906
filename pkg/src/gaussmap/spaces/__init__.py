"""Concrete model spaces and the boundary operations on them."""

from __future__ import annotations

from ..core import (
    DegenerateSegment, GaussMapUndefined, IdealPoint, POINT_TOL, Point, same_space,
)
from .base import ModelSpace, signed_angle, wrap_angle
from .euclidean import Euclidean
from .hyperbolic import Hyperbolic2
from .product import Product
from .tree import MetricTree, TreeDescription

__all__ = [
    "ModelSpace", "Euclidean", "Hyperbolic2", "MetricTree", "TreeDescription", "Product",
    "ray_point", "tits_angle", "busemann", "ideal_point_of_segment", "segment_extensions",
    "wrap_angle", "signed_angle",
]


def ray_point(x: Point, xi: IdealPoint, t: float) -> Point:
    """The point at distance ``t`` from ``x`` on the ray from ``x`` to ``xi``."""
    space = same_space(x, xi)
    if t < 0:
        raise ValueError("t must be nonnegative")
    return Point(space, space.ray(x.coords, xi.data, float(t)))


def tits_angle(xi: IdealPoint, eta: IdealPoint) -> float:
    space = same_space(xi, eta)
    return space.tits(xi.data, eta.data)


def busemann(xi: IdealPoint, x: Point) -> float:
    """Busemann function of ``xi`` normalized to vanish at the basepoint."""
    space = same_space(xi, x)
    return space.busemann(xi.data, x.coords)


def segment_extensions(x: Point, y: Point) -> list[IdealPoint]:
    """All ideal points whose ray from ``x`` passes through ``y``."""
    space = same_space(x, y)
    if space.dist(x.coords, y.coords) <= POINT_TOL:
        raise DegenerateSegment("segment endpoints coincide")
    return [IdealPoint(space, d) for d in space.extensions(x.coords, y.coords)]


def ideal_point_of_segment(x: Point, y: Point) -> IdealPoint:
    """Canonical ideal point extending the segment from x to y.

    Raises GaussMapUndefined when the segment cannot be prolonged to a ray.
    """
    ext = segment_extensions(x, y)
    if not ext:
        raise GaussMapUndefined(f"segment {x.coords} -> {y.coords} does not extend to a ray")
    return ext[0]
