"""Acceptance checks, one test per criterion; each records a PASS/FAIL line for the summary."""

import json
import math
import subprocess
import sys
import time
from pathlib import Path

import pytest

from gaussmap import (
    Bounded, ConvergesTo, Euclidean, FactorSlice, GeodesicLine, Hyperbolic2, IdealPoint,
    MetricTree, Point, Polygon, Product, Status, Verdict, analyze_ray_projection, apply_phi,
    build_polygon, classify, commutativity_gap, distance, find_fixed_point, gauss_map,
    gauss_map_is_unique, is_gauss_map, project_point, ray_point, slope, tits_angle,
    weighted_busemann,
)
from gaussmap.core import GaussMapUndefined
from gaussmap.projection import boundary_angle
from gaussmap.scene import load_scene
from gaussmap.spaces.hyperbolic import h2_toward
from gaussmap.spaces.base import signed_angle
from gaussmap.testkit import Generator, oracle_line_busemann_min, oracle_min_slope

from conftest import SPACE_KINDS, record

SCENES = Path(__file__).resolve().parent.parent / "scenes"


def boundary_error(space, got, want, x):
    """Angle between two boundary points; in H^2 as seen from x, since its Tits metric is discrete."""
    if isinstance(space, Hyperbolic2):
        r, phi = x.coords
        return abs(signed_angle(h2_toward(r, phi, got.data) - h2_toward(r, phi, want.data)))
    return tits_angle(got, want)


def converged_runs():
    """The criterion-1 workload: (label, space, configuration, report) tuples."""
    runs = []
    specs = [("E3 semistable (no Stable exists)", "e3", "semistable_zero"),
             ("H2 stable", "hyperbolic", "stable"),
             ("tree stable", "tree", "stable"),
             ("tree x tree stable", "tree_product", "stable"),
             ("tree semistable", "tree", "semistable"),
             ("tree slope-0", "tree", "semistable_zero"),
             ("tree x tree semistable", "tree_product", "semistable"),
             ("tree x tree slope-0", "tree_product", "semistable_zero")]
    for k, (label, kind, sampler) in enumerate(specs):
        count = 100 if sampler == "stable" or kind == "e3" else 50
        for i in range(count):
            g = Generator(10_000 * (k + 1) + i)
            X = Euclidean(3) if kind == "e3" else g.space(kind)
            c = getattr(g, sampler)(X)
            runs.append((label, X, c, find_fixed_point(c, X)))
    return runs


@pytest.fixture(scope="module")
def main_suite():
    t0 = time.perf_counter()
    runs = converged_runs()
    return runs, time.perf_counter() - t0


def test_criterion_1_stable_and_slope_zero_converge(main_suite):
    runs, elapsed = main_suite
    bad = [(lab, r.status, r.residual) for lab, _, _, r in runs
           if r.status is not Status.CONVERGED or r.residual > 1e-10 or r.iterations > 10**6]
    zeros = sum(1 for lab, _, _, _ in runs if "slope-0" in lab)
    ok = not bad and elapsed <= 120.0 and zeros >= 20
    record(1, ok, f"{len(runs) - len(bad)}/{len(runs)} converged, {zeros} slope-0, {elapsed:.1f}s"
           + (f"; first failure {bad[0]}" if bad else ""))
    assert ok


def test_criterion_2_round_trip(main_suite):
    runs, _ = main_suite
    worst = {"closure": 0.0, "weight": 0.0, "angle": 0.0}
    failures, unique = [], 0
    for lab, X, c, r in runs:
        if not r.converged:
            continue
        poly = build_polygon(c, r.point)
        worst["closure"] = max(worst["closure"], poly.closure_defect)
        if poly.closure_defect > 1e-8 or not is_gauss_map(poly, c, 1e-7):
            failures.append((lab, "closure/is_gauss_map"))
            continue
        try:
            if not poly.repeated and gauss_map_is_unique(poly):
                unique += 1
                gm = gauss_map(poly)
                for i, ((xi, m), (eta, w)) in enumerate(zip(gm, c)):
                    worst["weight"] = max(worst["weight"], abs(m - w))
                    worst["angle"] = max(worst["angle"], boundary_error(X, xi, eta, poly.vertices[i]))
        except GaussMapUndefined:
            pass
    ok = not failures and worst["weight"] <= 1e-9 and worst["angle"] <= 1e-6
    record(2, ok, f"closure <= {worst['closure']:.1e}, {unique} unique extractions, "
                  f"weight err {worst['weight']:.1e}, angle err {worst['angle']:.1e}"
           + (f"; failures {failures[:3]}" if failures else ""))
    assert ok


def test_criterion_3_necessity():
    worst, counts = math.inf, {}
    for kind in SPACE_KINDS:
        g = Generator(30_000 + SPACE_KINDS.index(kind))
        X = g.space(kind)
        done = tries = 0
        while done < 200 and tries < 5000:
            tries += 1
            try:
                c = gauss_map(build_poly(g, X))
            except (GaussMapUndefined, ValueError):
                continue
            worst = min(worst, classify(c, X).min_slope)
            done += 1
        counts[kind] = done
    H2 = Hyperbolic2()
    diverged = 0
    for i in range(50):
        g = Generator(31_000 + i)
        c = g.unstable(H2, margin=2.5)
        diverged += find_fixed_point(c, H2).status is Status.DIVERGED
    ok = worst >= -1e-7 and all(v == 200 for v in counts.values()) and diverged == 50
    record(3, ok, f"min slope over extracted maps {worst:.2e} ({sum(counts.values())} polygons), "
                  f"{diverged}/50 unstable H2 diverged")
    assert ok


def build_poly(g, X):
    return Polygon(g.polygon_vertices(X))


def test_criterion_4_classifier_exactness():
    worst, n = 0.0, 0
    for kind in SPACE_KINDS:
        for i in range(100):
            g = Generator(40_000 + 1000 * SPACE_KINDS.index(kind) + i)
            X = g.euclidean(1) if kind == "euclidean" else g.space(kind)
            c = g.configuration(X)
            worst = max(worst, abs(classify(c, X).min_slope - oracle_min_slope(c, X)))
            n += 1
    flat_stable = 0
    for i in range(200):
        g = Generator(45_000 + i)
        X = g.euclidean()
        flat_stable += classify(g.configuration(X), X).verdict is Verdict.STABLE
    ok = worst <= 1e-6 and flat_stable == 0
    record(4, ok, f"max |classify - oracle| {worst:.1e} over {n}; Euclidean Stable {flat_stable}/200")
    assert ok


def test_criterion_5_slope_busemann():
    lines, ok = [], True
    for kind in SPACE_KINDS:
        passed = monotone = 0
        worst = 0.0
        for i in range(100):
            g = Generator(50_000 + 1000 * SPACE_KINDS.index(kind) + i)
            X = g.space(kind)
            c = g.configuration(X)
            xi = IdealPoint(X, X.random_ideal(g.rng))
            s = slope(c, xi)
            errs = [abs(weighted_busemann(c, Point(X, X.ray(X.base, xi.data, t))) / t - s)
                    for t in (10.0, 100.0, 1000.0)]
            monotone += errs[1] <= errs[0] + 1e-12 and errs[2] <= errs[1] + 1e-12
            passed += errs[2] <= 1e-3
            worst = max(worst, errs[2])
        ok = ok and passed == 100 and monotone == 100
        lines.append(f"{kind} {passed}/100 within 1e-3 (worst {worst:.1e}), {monotone}/100 decreasing")
    record(5, ok, "; ".join(lines))
    assert ok


def test_criterion_6_nonexpansive():
    worst = {"push": -math.inf, "Phi": -math.inf, "project": -math.inf}
    for kind in SPACE_KINDS:
        g = Generator(60_000 + SPACE_KINDS.index(kind))
        for i in range(1000):
            if i % 50 == 0:
                X = g.space(kind)
                C = g.convex_subset(X)
            x, y = Point(X, X.random_point(g.rng, 4.0)), Point(X, X.random_point(g.rng, 4.0))
            d = distance(x, y)
            xi, t = IdealPoint(X, X.random_ideal(g.rng)), g.weight()
            worst["push"] = max(worst["push"], distance(ray_point(x, xi, t), ray_point(y, xi, t)) - d)
            c = g.configuration(X)
            worst["Phi"] = max(worst["Phi"], distance(apply_phi(c, x), apply_phi(c, y)) - d)
            worst["project"] = max(worst["project"],
                                   distance(project_point(C, x), project_point(C, y)) - d)
    ok = all(v <= 1e-9 for v in worst.values())
    record(6, ok, ", ".join(f"{k} excess {v:.1e}" for k, v in worst.items()) + " (1000 pairs x 5 spaces)")
    assert ok


def test_criterion_7_ray_projection():
    E2, H2 = Euclidean(2), Hyperbolic2()
    H2R = Product(H2, Euclidean(1))
    notes = []
    a = analyze_ray_projection(GeodesicLine(E2, point=(0.0, 0.0), direction=(1.0, 0.0)),
                               E2.basepoint, E2.ideal((math.sqrt(0.5), math.sqrt(0.5))))
    ok_a = (isinstance(a, ConvergesTo) and tits_angle(a.xi, E2.ideal((1.0, 0.0))) <= 1e-9
            and abs(a.angle - math.pi / 4) <= 1e-6)
    b = analyze_ray_projection(FactorSlice(H2R, (0.0,)), H2R.basepoint,
                               H2R.ideal((math.pi / 6, 1.0, (1.0,))))
    ok_b = (isinstance(b, ConvergesTo) and b.xi.data[0] == 0.0 and b.xi.data[2] is None
            and abs(signed_angle(b.xi.data[1] - 1.0)) <= 1e-9 and abs(b.angle - math.pi / 6) <= 1e-6)
    gap = 0.0
    ok_c = True
    for ends, eta in (((0.3, 2.5), 4.0), ((0.0, 3.0), 4.5), ((5.0, 1.0), 3.0)):
        C = GeodesicLine(H2, ends=ends)
        out = analyze_ray_projection(C, Point(H2, C.at(0.0)), H2.ideal(eta))
        if not isinstance(out, Bounded):
            ok_c = False
            continue
        gap = max(gap, H2.dist(out.p.coords, oracle_line_busemann_min(ends, eta)))
    ok_c = ok_c and gap <= 1e-6
    excess = -math.inf
    for i in range(100):
        g = Generator(70_000 + i)
        if i % 2:
            X = g.euclidean(int(g.rng.integers(2, 5)))
            C = GeodesicLine(X, point=X.random_point(g.rng, 2.0), direction=X.random_ideal(g.rng))
            o = Point(X, C.at(float(g.rng.uniform(-2, 2))))
        else:
            X = H2R
            C = FactorSlice(X, (float(g.rng.uniform(-2, 2)),))
            o = Point(X, (X.a.random_point(g.rng, 2.0), C.y0))
        eta = IdealPoint(X, X.random_ideal(g.rng))
        bound = boundary_angle(C, eta)
        for s in analyze_ray_projection(C, o, eta).samples:
            if s.angle is not None:
                excess = max(excess, s.angle - bound)
    ok = ok_a and ok_b and ok_c and excess <= 1e-6
    notes = [f"E2 axis {'ok' if ok_a else 'wrong'}", f"H2xR slice {'ok' if ok_b else 'wrong'}",
             f"H2 bounded vs golden {gap:.1e}", f"angle excess over Tits bound {excess:.1e}"]
    record(7, ok, ", ".join(notes))
    assert ok


def _line_tree(names, ends):
    return MetricTree(names, [(names[0], names[1], 1.0)], [(ends[0], names[0]), (ends[1], names[1])],
                      basepoint=("v", names[0]))


def test_criterion_8_commutativity_decay():
    H2 = Hyperbolic2()
    A = MetricTree(["c", "a1", "a2", "a3"], [("c", "a1", 1.0), ("c", "a2", 1.0), ("c", "a3", 2.0)],
                   [("e1", "a1"), ("e2", "a2"), ("e3", "a3")], basepoint=("v", "c"))
    B = MetricTree(["d", "b1", "b2", "b3"], [("d", "b1", 1.0), ("d", "b2", 0.5), ("d", "b3", 1.5)],
                   [("f1", "b1"), ("f2", "b2"), ("f3", "b3")], basepoint=("v", "d"))
    T = Product(A, B)
    cases = [
        # distinct points of the H^2 boundary; its Tits metric only takes the values 0 and pi
        ("H2", H2.ideal(0.0), H2.ideal(2.0), H2.basepoint),
        # in a tree two pushes commute on the line through their ends, so start off those lines
        ("TxT", T.ideal((0.5, "e1", "f1")), T.ideal((1.0, "e2", "f2")), Point(T, (("v", "a3"), ("v", "b3")))),
        ("TxT", T.ideal((0.3, "e1", "f1")), T.ideal((0.6, "e1", "f2")), Point(T, (("v", "a3"), ("e", 2, 0.5)))),
    ]
    lines, ok = [], True
    for lab, eta, xi, o in cases:
        ang = tits_angle(eta, xi)
        g1 = commutativity_gap(eta, xi, 1.0, 1.0, o, 1.0)
        g3 = commutativity_gap(eta, xi, 1.0, 1.0, o, 1000.0)
        good = g1 > 0 and g3 <= 0.1 * g1 and (ang < math.pi or lab == "H2")
        ok = ok and good
        lines.append(f"{lab} angle {ang:.3f}: gap(1) {g1:.2e} gap(1e3) {g3:.2e}")
    record(8, ok, "; ".join(lines))
    assert ok


def _cli(*args):
    return subprocess.run([sys.executable, "-m", "gaussmap", *args], capture_output=True)


def test_criterion_9_cli_determinism(tmp_path):
    scenes = sorted(SCENES.glob("*.gms"))
    kinds, verdicts, failures = set(), set(), []
    verified = 0
    for path in scenes:
        sc = load_scene(path)
        kinds.add(type(sc.space).__name__ if not isinstance(sc.space, Product) else
                  f"{type(sc.space.a).__name__}x{type(sc.space.b).__name__}")
        cmds = [["project"]] if sc.configuration is None else [["classify"], ["solve", "--seed", "7"], ["solve"]]
        for cmd in cmds:
            a, b = tmp_path / "a.json", tmp_path / "b.json"
            _cli(cmd[0], str(path), *cmd[1:], "--json", str(a))
            _cli(cmd[0], str(path), *cmd[1:], "--json", str(b))
            if a.read_bytes() != b.read_bytes():
                failures.append(f"{path.stem} {cmd[0]} differs")
        if sc.configuration is None:
            continue
        _cli("classify", str(path), "--json", str(a))
        verdicts.add(json.loads(a.read_text())["verdict"])
        csv = tmp_path / f"{path.stem}.csv"
        if _cli("solve", str(path), "--csv", str(csv)).returncode == 0:
            r = _cli("verify", str(path), str(csv))
            verified += 1
            if r.returncode != 0:
                failures.append(f"{path.stem} verify exit {r.returncode}")
    ok = (not failures and len(scenes) >= 12 and verdicts == {"Stable", "Semistable", "Unstable"}
          and len(kinds) >= 5)
    record(9, ok, f"{len(scenes)} scenes, spaces {sorted(kinds)}, verdicts {sorted(verdicts)}, "
                  f"{verified} solve/verify round trips" + (f"; {failures[:3]}" if failures else ""))
    assert ok
