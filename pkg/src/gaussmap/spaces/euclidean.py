from __future__ import annotations

import math

from ..core import DegenerateSegment, InvalidPoint, InvalidSpace, POINT_TOL
from .base import ModelSpace


def _norm(v):
    return math.sqrt(math.fsum(x * x for x in v))


class Euclidean(ModelSpace):
    """Flat space E^n; points are n-tuples, ideal points are unit n-tuples."""

    kind = "euclidean"

    def __init__(self, dimension: int, basepoint=None):
        if int(dimension) != dimension or dimension < 1:
            raise InvalidSpace(f"dimension must be a positive integer, got {dimension}")
        self.dimension = int(dimension)
        self.base = tuple(float(x) for x in basepoint) if basepoint is not None \
            else (0.0,) * self.dimension
        if not self.contains(self.base):
            raise InvalidSpace("basepoint has the wrong dimension")

    def __repr__(self):
        return f"Euclidean({self.dimension})"

    def contains(self, a):
        return (isinstance(a, tuple) and len(a) == self.dimension
                and all(math.isfinite(x) for x in a))

    def dist(self, a, b):
        if self.dimension == 2:
            return math.hypot(b[0] - a[0], b[1] - a[1])
        return _norm([y - x for x, y in zip(a, b)])

    def geodesic(self, a, b, t, d=None):
        if d is None:
            d = self.dist(a, b)
        if d == 0.0:
            return a
        s = t / d
        return tuple(x + s * (y - x) for x, y in zip(a, b))

    # boundary: unit vectors
    def direction(self, *v):
        """Ideal point data from an arbitrary nonzero vector (or a single angle in E^2)."""
        if len(v) == 1 and self.dimension == 2:
            return (math.cos(v[0]), math.sin(v[0]))
        if len(v) != self.dimension:
            raise InvalidPoint(f"direction needs {self.dimension} components")
        n = _norm(v)
        if n == 0:
            raise InvalidPoint("zero vector has no direction")
        return tuple(float(x) / n for x in v)

    def check_ideal(self, xi):
        if not (isinstance(xi, tuple) and len(xi) == self.dimension):
            raise InvalidPoint(f"{xi!r} is not a direction in E^{self.dimension}")
        if abs(_norm(xi) - 1.0) > POINT_TOL:
            raise InvalidPoint(f"direction {xi!r} is not a unit vector")

    def ray(self, a, xi, t):
        return tuple(x + t * u for x, u in zip(a, xi))

    def tits(self, xi, eta):
        # atan2 of chord lengths stays accurate near 0 and pi, unlike acos
        minus = math.sqrt(math.fsum((u - v) ** 2 for u, v in zip(xi, eta)))
        plus = math.sqrt(math.fsum((u + v) ** 2 for u, v in zip(xi, eta)))
        return 2.0 * math.atan2(minus, plus)

    def same_ideal(self, xi, eta):
        return max(abs(u - v) for u, v in zip(xi, eta)) <= POINT_TOL

    def horo(self, xi, a):
        return -math.fsum(x * u for x, u in zip(a, xi))

    def extensions(self, a, b):
        d = self.dist(a, b)
        if d <= POINT_TOL:
            raise DegenerateSegment("segment endpoints coincide")
        return [tuple((y - x) / d for x, y in zip(a, b))]

    def random_point(self, rng, scale=3.0):
        return tuple(float(x) for x in rng.uniform(-scale, scale, self.dimension))

    def random_ideal(self, rng):
        while True:
            v = rng.normal(size=self.dimension)
            if _norm(v) > 1e-6:
                return self.direction(*v)
