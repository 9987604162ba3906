"""Two-factor products A x B with the product (l2) metric.

Points are pairs ``(a, b)`` of raw factor coordinates.  Ideal points are join
triples ``(theta, xi_a, xi_b)`` with ``theta`` in [0, pi/2]: the ray moves at
speed ``cos theta`` towards ``xi_a`` in A and ``sin theta`` towards ``xi_b`` in
B.  A pure-A point has ``theta == 0`` and ``xi_b is None``; a pure-B point has
``theta == pi/2`` and ``xi_a is None``.
"""

from __future__ import annotations

import math
from itertools import product as cartesian

from ..core import DegenerateSegment, InvalidPoint, InvalidSpace, POINT_TOL
from .base import ModelSpace

HALF_PI = 0.5 * math.pi


class Product(ModelSpace):
    kind = "product"

    def __init__(self, a: ModelSpace, b: ModelSpace):
        if isinstance(a, Product) or isinstance(b, Product):
            raise InvalidSpace("products of products are not supported")
        self.a, self.b = a, b
        self.base = (a.base, b.base)

    def __repr__(self):
        return f"Product({self.a!r}, {self.b!r})"

    @property
    def factors(self):
        return self.a, self.b

    def contains(self, p):
        return (isinstance(p, tuple) and len(p) == 2
                and self.a.contains(p[0]) and self.b.contains(p[1]))

    def dist(self, p, q):
        return math.hypot(self.a.dist(p[0], q[0]), self.b.dist(p[1], q[1]))

    def factor_dists(self, p, q):
        return self.a.dist(p[0], q[0]), self.b.dist(p[1], q[1])

    def geodesic(self, p, q, t, d=None):
        da, db = self.factor_dists(p, q)
        if d is None:
            d = math.hypot(da, db)
        if d == 0.0:
            return p
        s = t / d
        return (self.a.geodesic(p[0], q[0], s * da, da) if da > 0 else p[0],
                self.b.geodesic(p[1], q[1], s * db, db) if db > 0 else p[1])

    # --- ideal points ---------------------------------------------------
    def join(self, theta, xi_a=None, xi_b=None):
        """Normalized join triple; the absent factor's datum is dropped at the poles."""
        theta = float(theta)
        if theta <= 0.0:
            return (0.0, xi_a, None)
        if theta >= HALF_PI:
            return (HALF_PI, None, xi_b)
        return (theta, xi_a, xi_b)

    @staticmethod
    def weights(xi):
        """(cos theta, sin theta), exact at the poles."""
        theta, xa, xb = xi
        if xb is None:
            return 1.0, 0.0
        if xa is None:
            return 0.0, 1.0
        return math.cos(theta), math.sin(theta)

    def check_ideal(self, xi):
        if not (isinstance(xi, tuple) and len(xi) == 3):
            raise InvalidPoint(f"{xi!r} is not a join triple")
        theta, xa, xb = xi
        if not 0.0 <= theta <= HALF_PI:
            raise InvalidPoint(f"join angle {theta} outside [0, pi/2]")
        if theta == 0.0:
            if xb is not None or xa is None:
                raise InvalidPoint("theta = 0 carries only the first-factor datum")
        elif theta == HALF_PI:
            if xa is not None or xb is None:
                raise InvalidPoint("theta = pi/2 carries only the second-factor datum")
        elif xa is None or xb is None:
            raise InvalidPoint("interior join angle needs both factor data")
        if xa is not None:
            self.a.check_ideal(xa)
        if xb is not None:
            self.b.check_ideal(xb)

    def ray(self, p, xi, t):
        ca, sb = self.weights(xi)
        return (self.a.ray(p[0], xi[1], t * ca) if ca > 0 else p[0],
                self.b.ray(p[1], xi[2], t * sb) if sb > 0 else p[1])

    def tits(self, xi, eta):
        c1, s1 = self.weights(xi)
        c2, s2 = self.weights(eta)
        # squared chord in the spherical join, then the arc it subtends
        ch = (c1 - c2) ** 2 + (s1 - s2) ** 2
        if c1 > 0 and c2 > 0:
            ch += 4.0 * c1 * c2 * math.sin(0.5 * min(math.pi, self.a.tits(xi[1], eta[1]))) ** 2
        if s1 > 0 and s2 > 0:
            ch += 4.0 * s1 * s2 * math.sin(0.5 * min(math.pi, self.b.tits(xi[2], eta[2]))) ** 2
        return 2.0 * math.asin(min(1.0, 0.5 * math.sqrt(ch)))

    def same_ideal(self, xi, eta):
        if abs(xi[0] - eta[0]) > POINT_TOL:
            return False
        ok_a = (xi[1] is None) == (eta[1] is None) and (xi[1] is None or self.a.same_ideal(xi[1], eta[1]))
        ok_b = (xi[2] is None) == (eta[2] is None) and (xi[2] is None or self.b.same_ideal(xi[2], eta[2]))
        return ok_a and ok_b

    def horo(self, xi, p):
        ca, sb = self.weights(xi)
        h = 0.0
        if ca > 0:
            h += ca * self.a.horo(xi[1], p[0])
        if sb > 0:
            h += sb * self.b.horo(xi[2], p[1])
        return h

    def extensions(self, p, q):
        da, db = self.factor_dists(p, q)
        if da <= POINT_TOL and db <= POINT_TOL:
            raise DegenerateSegment("segment endpoints coincide")
        ext_a = self.a.extensions(p[0], q[0]) if da > POINT_TOL else [None]
        ext_b = self.b.extensions(p[1], q[1]) if db > POINT_TOL else [None]
        if db <= POINT_TOL:
            theta = 0.0
        elif da <= POINT_TOL:
            theta = HALF_PI
        else:
            theta = math.atan2(db, da)
        return [(theta, xa, xb) for xa, xb in cartesian(ext_a, ext_b)]

    def random_point(self, rng, scale=3.0):
        return (self.a.random_point(rng, scale), self.b.random_point(rng, scale))

    def random_ideal(self, rng):
        u = rng.uniform()
        if u < 0.15:
            return (0.0, self.a.random_ideal(rng), None)
        if u < 0.3:
            return (HALF_PI, None, self.b.random_ideal(rng))
        return self.join(float(rng.uniform(0.0, HALF_PI)),
                         self.a.random_ideal(rng), self.b.random_ideal(rng))
