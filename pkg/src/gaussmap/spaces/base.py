from __future__ import annotations

import math

from ..core import IdealPoint, Point


class ModelSpace:
    """Uniform metric-geometry contract over raw coordinates.

    Concrete spaces implement the underscore-free raw methods below; the
    module-level functions in :mod:`gaussmap.spaces` wrap them for
    :class:`~gaussmap.core.Point` and :class:`~gaussmap.core.IdealPoint`.
    Spaces compare by identity.
    """

    kind = "abstract"
    base = None  # raw basepoint coordinates

    # --- metric -------------------------------------------------------
    def dist(self, a, b) -> float:
        raise NotImplementedError

    def geodesic(self, a, b, t, d=None):
        raise NotImplementedError

    def contains(self, a) -> bool:
        raise NotImplementedError

    # --- boundary -----------------------------------------------------
    def check_ideal(self, xi) -> None:
        raise NotImplementedError

    def ray(self, a, xi, t):
        raise NotImplementedError

    def tits(self, xi, eta) -> float:
        raise NotImplementedError

    def horo(self, xi, a) -> float:
        """Busemann function of ``xi`` up to an additive constant."""
        raise NotImplementedError

    def extensions(self, a, b) -> list:
        """Ideal points whose ray from ``a`` passes through ``b``; canonical one first."""
        raise NotImplementedError

    def same_ideal(self, xi, eta) -> bool:
        return self.tits(xi, eta) == 0.0

    def ideal_key(self, xi):
        """Hashable key identifying an ideal point for atom aggregation."""
        return xi

    # --- derived ------------------------------------------------------
    def busemann(self, xi, a) -> float:
        return self.horo(xi, a) - self.horo(xi, self.base)

    @property
    def basepoint(self) -> Point:
        return Point(self, self.base)

    def point(self, coords) -> Point:
        return Point(self, coords)

    def ideal(self, data) -> IdealPoint:
        return IdealPoint(self, data)


def wrap_angle(a: float) -> float:
    """Reduce to [0, 2*pi)."""
    a = math.fmod(a, 2.0 * math.pi)
    if a < 0:
        a += 2.0 * math.pi
    if a >= 2.0 * math.pi:
        a = 0.0
    return a


def signed_angle(a: float) -> float:
    """Reduce to (-pi, pi]."""
    a = wrap_angle(a)
    return a - 2.0 * math.pi if a > math.pi else a
