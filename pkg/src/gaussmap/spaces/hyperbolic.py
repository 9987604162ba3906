"""The hyperbolic plane in geodesic polar coordinates about the origin.

A point is ``(r, phi)``: hyperbolic distance ``r`` from the origin ``(1, 0, 0)``
of the hyperboloid and polar angle ``phi`` in [0, 2*pi).  Equivalently the
hyperboloid point ``(cosh r, sinh r cos phi, sinh r sin phi)``.  An ideal
point is its boundary angle ``beta`` in [0, 2*pi), i.e. the null direction
``(1, cos beta, sin beta)``.

Hyperboloid coordinates overflow beyond distance ~710, and the solver's
escape radius is 1e6, so all kernels work in log-stable polar form.  Every
point ``x`` carries a frame (rotate by ``phi``, then boost by ``r``); a
direction at ``x`` is an angle ``psi`` in that frame, ``psi = 0`` pointing
radially away from the origin and ``psi = pi`` pointing back at it.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from ..core import DegenerateSegment, InvalidPoint, InvalidSpace, POINT_TOL
from .base import ModelSpace, signed_angle, wrap_angle

TWO_PI = 2.0 * math.pi
LOG2 = math.log(2.0)
# beyond this radius sinh/cosh are evaluated in log space
LARGE = 300.0


@njit(cache=True)
def _wrap(a):
    a = a % TWO_PI
    if a >= TWO_PI:
        a = 0.0
    return a


@njit(cache=True)
def _signed(a):
    a = _wrap(a)
    if a > math.pi:
        a -= TWO_PI
    return a


@njit(cache=True)
def _logaddexp(a, b):
    if a == -np.inf and b == -np.inf:
        return -np.inf
    hi = max(a, b)
    lo = min(a, b)
    return hi + math.log1p(math.exp(lo - hi))


@njit(cache=True)
def _log_sinh(r):
    if r <= 0.0:
        return -np.inf
    if r > 20.0:
        return r - LOG2 + math.log1p(-math.exp(-2.0 * r))
    return math.log(math.sinh(r))


@njit(cache=True)
def _log_sq(x):
    if x == 0.0:
        return -np.inf
    return 2.0 * math.log(abs(x))


@njit(cache=True)
def _twice_asinh_sqrt_exp(log_s):
    # 2 * asinh(sqrt(exp(log_s)))
    if log_s < 600.0:
        return 2.0 * math.asinh(math.exp(0.5 * log_s))
    return log_s + 2.0 * LOG2


@njit(cache=True)
def _tanh_diff(r, t):
    # tanh(r) - tanh(t) without cancellation
    if r < LARGE and t < LARGE:
        return math.sinh(r - t) / (math.cosh(r) * math.cosh(t))
    er = math.exp(-2.0 * r)
    et = math.exp(-2.0 * t)
    return 2.0 * (et - er) / ((1.0 + er) * (1.0 + et))


@njit(cache=True)
def _sech(r):
    if r < LARGE:
        return 1.0 / math.cosh(r)
    return 2.0 * math.exp(-r)


@njit(cache=True)
def h2_dist(r1, p1, r2, p2):
    h = 0.5 * (r1 - r2)
    s = math.sin(0.5 * (p2 - p1))
    if r1 < LARGE and r2 < LARGE:
        sh = math.sinh(h)
        return 2.0 * math.asinh(math.sqrt(sh * sh + math.sinh(r1) * math.sinh(r2) * s * s))
    a = 2.0 * _log_sinh(abs(h))
    b = _log_sinh(r1) + _log_sinh(r2) + _log_sq(s)
    return _twice_asinh_sqrt_exp(_logaddexp(a, b))


@njit(cache=True)
def h2_shoot(r, phi, psi, t):
    """Walk distance ``t`` from ``(r, phi)`` in frame direction ``psi``."""
    if t == 0.0:
        return r, phi
    c = math.cos(0.5 * psi)
    c2 = c * c
    if r < LARGE and t < LARGE:
        sh = math.sinh(0.5 * (r - t))
        rn = 2.0 * math.asinh(math.sqrt(sh * sh + math.sinh(r) * math.sinh(t) * c2))
    else:
        log_s = _logaddexp(2.0 * _log_sinh(abs(0.5 * (r - t))),
                           _log_sinh(r) + _log_sinh(t) + _log_sq(c))
        rn = _twice_asinh_sqrt_exp(log_s)
    tt = math.tanh(t)
    num = tt * math.sin(psi) * _sech(r)
    den = _tanh_diff(r, t) + 2.0 * tt * c2
    return rn, _wrap(phi + math.atan2(num, den))


@njit(cache=True)
def h2_aim(r1, p1, r2, p2):
    """Frame direction at ``(r1, p1)`` of the segment towards ``(r2, p2)``."""
    d = p2 - p1
    s = math.sin(0.5 * d)
    t2 = math.tanh(r2)
    num = t2 * math.sin(d) * _sech(r1)
    den = _tanh_diff(r2, r1) - 2.0 * t2 * s * s
    return math.atan2(num, den)


@njit(cache=True)
def h2_toward(r, phi, beta):
    """Frame direction at ``(r, phi)`` of the ray to boundary angle ``beta``."""
    d = _signed(beta - phi)
    return 2.0 * math.atan2(math.sin(0.5 * d), math.exp(-r) * math.cos(0.5 * d))


@njit(cache=True)
def h2_endpoint(r, phi, psi):
    """Boundary angle reached by the ray from ``(r, phi)`` in frame direction ``psi``."""
    psi = _signed(psi)
    return _wrap(phi + 2.0 * math.atan2(math.exp(-r) * math.sin(0.5 * psi), math.cos(0.5 * psi)))


@njit(cache=True)
def h2_ray(r, phi, beta, t):
    return h2_shoot(r, phi, h2_toward(r, phi, beta), t)


@njit(cache=True)
def h2_horo(beta, r, phi):
    """log <x, n_beta> with n_beta = (1, cos beta, sin beta); zero at the origin."""
    d = beta - phi
    return _logaddexp(r + _log_sq(math.sin(0.5 * d)), -r + _log_sq(math.cos(0.5 * d)))


@njit(cache=True)
def h2_phi(r, phi, betas, weights):
    for i in range(betas.shape[0]):
        r, phi = h2_ray(r, phi, betas[i], weights[i])
    return r, phi


@njit(cache=True)
def h2_mann(betas, weights, r, phi, rb, pb, eps, max_iter, r_max, trace_every, trace):
    """Averaged iteration x <- midpoint(x, Phi(x)); mirrors solver.find_fixed_point.

    Returns (status, r, phi, residual, iterations, n_trace) with status
    0 converged, 1 max iterations, 2 diverged.
    """
    n_trace = 0
    k = 0
    while True:
        rr, pp = h2_phi(r, phi, betas, weights)
        res = h2_dist(r, phi, rr, pp)
        if trace_every > 0 and k % trace_every == 0 and n_trace < trace.shape[0]:
            trace[n_trace] = res
            n_trace += 1
        if res <= eps:
            return 0, r, phi, res, k, n_trace
        if h2_dist(rb, pb, r, phi) > r_max:
            return 2, r, phi, res, k, n_trace
        if k >= max_iter:
            return 1, r, phi, res, k, n_trace
        r, phi = h2_shoot(r, phi, h2_aim(r, phi, rr, pp), 0.5 * res)
        k += 1


class Hyperbolic2(ModelSpace):
    kind = "hyperbolic"

    def __init__(self, basepoint=(0.0, 0.0)):
        self.base = (float(basepoint[0]), wrap_angle(float(basepoint[1])))
        if not self.contains(self.base):
            raise InvalidSpace(f"bad basepoint {basepoint!r}")

    def __repr__(self):
        return "Hyperbolic2()"

    # coordinates
    def polar(self, r, phi):
        return (float(r), wrap_angle(float(phi)))

    def from_hyperboloid(self, x0, x1, x2):
        if abs(x0 * x0 - x1 * x1 - x2 * x2 - 1.0) > 1e-9 * max(1.0, x0 * x0) or x0 <= 0:
            raise InvalidPoint(f"({x0}, {x1}, {x2}) is not on the hyperboloid")
        return (math.asinh(math.hypot(x1, x2)), wrap_angle(math.atan2(x2, x1)))

    @staticmethod
    def hyperboloid(a):
        r, phi = a
        return (math.cosh(r), math.sinh(r) * math.cos(phi), math.sinh(r) * math.sin(phi))

    @staticmethod
    def disk(a):
        """Poincare disk coordinates."""
        r, phi = a
        rho = math.tanh(0.5 * r)
        return (rho * math.cos(phi), rho * math.sin(phi))

    def contains(self, a):
        return (isinstance(a, tuple) and len(a) == 2 and a[0] >= 0.0
                and math.isfinite(a[0]) and 0.0 <= a[1] < TWO_PI)

    def dist(self, a, b):
        return h2_dist(a[0], a[1], b[0], b[1])

    def geodesic(self, a, b, t, d=None):
        if t == 0.0:
            return a
        if d is None:
            d = self.dist(a, b)
        if t >= d:
            return b
        return h2_shoot(a[0], a[1], h2_aim(a[0], a[1], b[0], b[1]), t)

    # boundary
    def boundary(self, beta):
        return wrap_angle(float(beta))

    def check_ideal(self, xi):
        if isinstance(xi, bool) or not (isinstance(xi, (int, float)) and 0.0 <= xi < TWO_PI):
            raise InvalidPoint(f"{xi!r} is not a boundary angle in [0, 2pi)")

    def ray(self, a, xi, t):
        return h2_ray(a[0], a[1], xi, t)

    def same_ideal(self, xi, eta):
        return abs(signed_angle(xi - eta)) <= POINT_TOL

    def tits(self, xi, eta):
        return 0.0 if self.same_ideal(xi, eta) else math.pi

    def horo(self, xi, a):
        return h2_horo(xi, a[0], a[1])

    def extensions(self, a, b):
        if self.dist(a, b) <= POINT_TOL:
            raise DegenerateSegment("segment endpoints coincide")
        return [h2_endpoint(a[0], a[1], h2_aim(a[0], a[1], b[0], b[1]))]

    def off_support(self, atoms):
        """A boundary angle distinct from all of ``atoms`` (middle of the widest gap)."""
        angles = sorted(atoms)
        if not angles:
            return 0.0
        best, at = -1.0, 0.0
        for i, a in enumerate(angles):
            b = angles[(i + 1) % len(angles)] + (TWO_PI if i == len(angles) - 1 else 0.0)
            if b - a > best:
                best, at = b - a, a + 0.5 * (b - a)
        return wrap_angle(at)

    def random_point(self, rng, scale=3.0):
        return (float(rng.uniform(0.0, scale)), wrap_angle(float(rng.uniform(0.0, TWO_PI))))

    def random_ideal(self, rng):
        return wrap_angle(float(rng.uniform(0.0, TWO_PI)))
