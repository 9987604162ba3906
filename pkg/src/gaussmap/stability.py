"""Slope of a weighted configuration and the stable/semistable/unstable verdict."""

from __future__ import annotations

import enum
import math
import sys
from dataclasses import dataclass

from .core import IdealPoint, Point, WeightedConfiguration, same_space, validate_configuration
from .spaces import Euclidean, Hyperbolic2, MetricTree, Product

EPS_CLS = 1e-9


class Verdict(enum.Enum):
    STABLE = "Stable"
    SEMISTABLE = "Semistable"
    UNSTABLE = "Unstable"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class StabilityReport:
    verdict: Verdict
    min_slope: float
    witness: IdealPoint
    tolerance: float = EPS_CLS

    @property
    def semistable(self) -> bool:
        """True for Stable and Semistable verdicts alike."""
        return self.verdict is not Verdict.UNSTABLE

    @property
    def stable(self) -> bool:
        return self.verdict is Verdict.STABLE


def verdict_for(min_slope: float, eps: float = EPS_CLS) -> Verdict:
    if min_slope < -eps:
        return Verdict.UNSTABLE
    if min_slope > eps:
        return Verdict.STABLE
    return Verdict.SEMISTABLE


def slope(c: WeightedConfiguration, xi: IdealPoint) -> float:
    """-sum m_i cos(angle(xi_i, xi)), the asymptotic slope of b_c towards xi."""
    space = same_space(c.points[0], xi)
    return -math.fsum(m * math.cos(space.tits(p.data, xi.data)) for p, m in c)


def weighted_busemann(c: WeightedConfiguration, x: Point) -> float:
    space = same_space(c.points[0], x)
    return math.fsum(m * space.busemann(p.data, x.coords) for p, m in c)


def _atoms(space, data, weights):
    """Merge repeated ideal points; returns [(datum, mass)] in first-seen order."""
    atoms = []
    for d, m in zip(data, weights):
        for i, (a, mass) in enumerate(atoms):
            if space.same_ideal(a, d):
                atoms[i] = (a, mass + m)
                break
        else:
            atoms.append((d, m))
    return atoms


def factor_peak(space, data, weights):
    """max over the boundary of sum w_i cos(angle(xi_i, eta)), with a maximizer.

    Weights may be zero but not negative.  Used on single spaces
    (min slope = -peak) and on each factor of a product.
    """
    total = math.fsum(weights)
    if isinstance(space, Euclidean):
        v = [math.fsum(w * u[j] for u, w in zip(data, weights)) for j in range(space.dimension)]
        n = math.sqrt(math.fsum(x * x for x in v))
        # a resultant at the rounding level of the inputs is zero
        if n <= 4.0 * len(data) * sys.float_info.epsilon * total:
            return 0.0, (1.0,) + (0.0,) * (space.dimension - 1)
        return n, tuple(x / n for x in v)
    if isinstance(space, (Hyperbolic2, MetricTree)):
        best = None
        for d, mass in _atoms(space, data, weights):
            val = 2.0 * mass - total
            if best is None or val > best[0]:
                best = (val, d)
        rep = space.off_support([d for d, _ in _atoms(space, data, weights)])
        if rep is not None and (best is None or -total > best[0]):
            best = (-total, rep)
        return best
    raise TypeError(f"no closed-form peak for {space!r}")


def _arc_peak(A, B):
    """max of A cos t + B sin t over t in [0, pi/2] and an argmax."""
    if B == -math.inf:
        return A, 0.0
    if A == -math.inf:
        return B, 0.5 * math.pi
    if A >= 0.0 and B >= 0.0:
        if A == 0.0 and B == 0.0:
            return 0.0, 0.0
        return math.hypot(A, B), math.atan2(B, A)
    return (A, 0.0) if A >= B else (B, 0.5 * math.pi)


def classify(c: WeightedConfiguration, space, eps_cls: float = EPS_CLS) -> StabilityReport:
    """Exact infimum of the slope over the boundary, and the resulting verdict."""
    validate_configuration(c, space)
    data = [p.data for p in c.points]
    if isinstance(space, Product):
        wa, wb, da, db = [], [], [], []
        for d, m in zip(data, c.weights):
            ca, sb = space.weights(d)
            if ca > 0:
                da.append(d[1])
                wa.append(m * ca)
            if sb > 0:
                db.append(d[2])
                wb.append(m * sb)
        A, eta = factor_peak(space.a, da, wa) if da else (0.0, _any_ideal(space.a))
        B, zeta = factor_peak(space.b, db, wb) if db else (0.0, _any_ideal(space.b))
        # a factor without boundary points contributes no arc endpoint
        if eta is None:
            A = -math.inf
        if zeta is None:
            B = -math.inf
        peak, theta = _arc_peak(A, B)
        witness = IdealPoint(space, space.join(theta, eta, zeta))
    else:
        peak, w = factor_peak(space, data, list(c.weights))
        witness = IdealPoint(space, w)
    min_slope = -peak
    return StabilityReport(verdict_for(min_slope, eps_cls), min_slope, witness, eps_cls)


def _any_ideal(space):
    if isinstance(space, Euclidean):
        return (1.0,) + (0.0,) * (space.dimension - 1)
    if isinstance(space, Hyperbolic2):
        return 0.0
    return space.end_ids[0] if space.end_ids else None
