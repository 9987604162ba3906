import math

import pytest
from hypothesis import given, settings

from gaussmap import (
    Bounded, ConvergesTo, Euclidean, FactorSlice, GeodesicLine, GeodesicSegment, Hyperbolic2,
    Point, Product, Subtree, analyze_ray_projection, distance, project_point, ray_point,
    tits_angle,
)
from gaussmap.core import BasepointNotInSubset, InvalidSpace, SpaceMismatch
from gaussmap.projection import boundary_angle, contains
from gaussmap.testkit import Generator, oracle_line_busemann_min

from conftest import SPACE_KINDS, seeds, tripod

H2R = Product(Hyperbolic2(), Euclidean(1))


def x_axis(E2):
    return GeodesicLine(E2, point=(0.0, 0.0), direction=(1.0, 0.0))


def test_project_onto_axis(E2):
    p = project_point(x_axis(E2), Point(E2, (3.0, 4.0)))
    assert p.coords == pytest.approx((3.0, 0.0), abs=1e-12)


def test_project_member_is_fixed(E2, H2, T3):
    cases = [
        (x_axis(E2), Point(E2, (-2.5, 0.0))),
        (GeodesicLine(H2, ends=(0.0, 2.0)), None),
        (GeodesicSegment(T3, ("v", "x"), ("v", "y")), Point(T3, ("v", "o"))),
        (Subtree(T3, {"o", "x"}, {"ex"}), Point(T3, ("x", "ex", 2.0))),
    ]
    for C, x in cases:
        if x is None:
            x = Point(C.space, C.at(0.7))
        assert distance(project_point(C, x), x) <= 1e-9


def test_project_slice_componentwise():
    C = FactorSlice(H2R, (0.5,))
    p = project_point(C, Point(H2R, ((1.2, 0.3), (-4.0,))))
    assert p.coords[0] == pytest.approx((1.2, 0.3))
    assert p.coords[1] == pytest.approx((0.5,))


def test_project_segment_clamps(E2, T3):
    S = GeodesicSegment(E2, (0.0, 0.0), (1.0, 0.0))
    assert project_point(S, Point(E2, (3.0, 2.0))).coords == pytest.approx((1.0, 0.0))
    sub = Subtree(T3, {"o", "x"})
    assert project_point(sub, Point(T3, ("x", "ey", 5.0))).coords == ("v", "o")


def test_subtree_must_be_connected():
    T = tripod()
    with pytest.raises(InvalidSpace):
        Subtree(T, {"x", "y"})
    with pytest.raises(InvalidSpace):
        Subtree(T, {"o"}, {"ex"})


def test_ray_projection_axis_45(E2):
    eta = E2.ideal((math.sqrt(0.5), math.sqrt(0.5)))
    out = analyze_ray_projection(x_axis(E2), E2.basepoint, eta)
    assert isinstance(out, ConvergesTo)
    assert tits_angle(out.xi, E2.ideal((1.0, 0.0))) <= 1e-12
    assert out.angle == pytest.approx(math.pi / 4, abs=1e-9)


def test_ray_projection_factor_slice():
    C = FactorSlice(H2R, (0.0,))
    eta = H2R.ideal((math.pi / 6, 1.0, (1.0,)))
    out = analyze_ray_projection(C, H2R.basepoint, eta)
    assert isinstance(out, ConvergesTo)
    assert out.xi.data[0] == 0.0 and out.xi.data[2] is None
    assert out.xi.data[1] == pytest.approx(1.0, abs=1e-9)
    assert out.angle == pytest.approx(math.pi / 6, abs=1e-9)


def test_ray_projection_h2_bounded(H2):
    C = GeodesicLine(H2, ends=(0.3, 2.1))
    eta = H2.ideal(4.0)
    o = Point(H2, C.at(0.4))
    out = analyze_ray_projection(C, o, eta)
    assert isinstance(out, Bounded)
    want = Point(H2, oracle_line_busemann_min((0.3, 2.1), 4.0))
    assert distance(out.p, want) <= 1e-8
    assert contains(C, out.p)


def test_ray_projection_tree_gate(T3):
    sub = Subtree(T3, {"o", "x"}, {"ex"})
    out = analyze_ray_projection(sub, Point(T3, ("v", "x")), T3.ideal("ey"))
    assert isinstance(out, Bounded) and out.p.coords == ("v", "o")
    out = analyze_ray_projection(sub, Point(T3, ("v", "o")), T3.ideal("ex"))
    assert isinstance(out, ConvergesTo) and out.xi.data == "ex" and out.angle == 0.0


def test_ray_projection_errors(E2, H2):
    with pytest.raises(BasepointNotInSubset):
        analyze_ray_projection(x_axis(E2), Point(E2, (0.0, 1.0)), E2.ideal((1.0, 0.0)))
    with pytest.raises(SpaceMismatch):
        analyze_ray_projection(x_axis(E2), E2.basepoint, H2.ideal(1.0))


@given(seeds)
def test_projection_nonexpansive(seed):
    g = Generator(seed)
    for kind in SPACE_KINDS:
        X = g.space(kind)
        C = g.convex_subset(X)
        x, y = Point(X, X.random_point(g.rng, 4.0)), Point(X, X.random_point(g.rng, 4.0))
        px, py = project_point(C, x), project_point(C, y)
        assert contains(C, px) and contains(C, py)
        assert distance(px, py) <= distance(x, y) + 1e-9


@given(seeds)
def test_projection_is_nearest(seed):
    g = Generator(seed)
    for kind in SPACE_KINDS:
        X = g.space(kind)
        C = g.convex_subset(X)
        x = Point(X, X.random_point(g.rng, 4.0))
        p = project_point(C, x)
        for _ in range(5):
            q = Point(X, project_point(C, Point(X, X.random_point(g.rng, 4.0))).coords)
            assert distance(x, p) <= distance(x, q) + 1e-9


def _flat_instance(g, which):
    if which == "line":
        X = Euclidean(int(g.rng.integers(2, 5)))
        C = GeodesicLine(X, point=X.random_point(g.rng, 2.0), direction=X.random_ideal(g.rng))
        o = Point(X, C.at(float(g.rng.uniform(-2, 2))))
    else:
        C = FactorSlice(H2R, (float(g.rng.uniform(-2, 2)),))
        o = Point(H2R, (H2R.a.random_point(g.rng, 2.0), C.y0))
    return C, o


@given(seeds)
def test_sampled_angles_bounded_by_tits(seed):
    g = Generator(seed)
    for which in ("line", "slice"):
        C, o = _flat_instance(g, which)
        eta = o.space.ideal(o.space.random_ideal(g.rng))
        bound = boundary_angle(C, eta)
        out = analyze_ray_projection(C, o, eta)
        for s in out.samples:
            if s.angle is not None:
                assert s.angle <= bound + 1e-6


@given(seeds)
@settings(max_examples=30)
def test_angles_monotone_on_proof_grid(seed):
    g = Generator(seed)
    for which in ("line", "slice"):
        C, o = _flat_instance(g, which)
        eta = o.space.ideal(o.space.random_ideal(g.rng))
        bound = boundary_angle(C, eta)
        if bound >= 0.5 * math.pi - 1e-3:
            continue
        ratio = 1.0 / (1.0 - math.sin(bound)) if bound > 1e-3 else 2.0
        grid = [ratio**k for k in range(40) if ratio**k <= 1e8]
        out = analyze_ray_projection(C, o, eta, grid)
        angles = [s.angle for s in out.samples if s.angle is not None]
        assert all(b >= a - 1e-9 for a, b in zip(angles, angles[1:]))


@given(seeds)
@settings(max_examples=30)
def test_bounded_point_is_fixed(seed):
    g = Generator(seed)
    H2 = Hyperbolic2()
    a = H2.random_ideal(g.rng)
    b = (a + g.rng.uniform(0.3, math.pi)) % (2 * math.pi)
    C = GeodesicLine(H2, ends=(a, b))
    eta = H2.ideal((b + g.rng.uniform(0.2, 2 * math.pi - (b - a) % (2 * math.pi) - 0.2)) % (2 * math.pi))
    o = Point(H2, C.at(float(g.rng.uniform(-1, 1))))
    out = analyze_ray_projection(C, o, eta)
    assert isinstance(out, Bounded)
    for t in (1.0, 10.0, 100.0):
        assert distance(project_point(C, ray_point(out.p, eta, t)), out.p) <= 1e-6


def test_bounded_subtree_fixed():
    g = Generator(7)
    for _ in range(20):
        X = g.space("tree")
        C = g.convex_subset(X)
        outside = [e for e in X.end_ids if e not in C.ends]
        if not outside:
            continue
        o = Point(X, ("v", min(C.vertices)))
        eta = X.ideal(outside[0])
        out = analyze_ray_projection(C, o, eta)
        assert isinstance(out, Bounded)
        for t in (1.0, 10.0, 100.0):
            assert distance(project_point(C, ray_point(out.p, eta, t)), out.p) <= 1e-6
