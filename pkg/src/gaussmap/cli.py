"""Command-line front end: ``gaussmap classify|solve|verify|gaussmap|project|render``.

Exit codes: classify 0/1/2 for Stable/Semistable/Unstable; solve 0 converged,
3 diverged, 4 iteration budget exhausted; verify 0/1; 64 usage or syntax
errors, 65 invalid data or mismatched spaces, 66 missing input file.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import GaussMapError, Point, Polygon
from .projection import ConvergesTo, analyze_ray_projection, project_point
from .render import can_render, render_svg
from .scene import SceneError, format_ideal, format_point, g17, load_scene
from .solver import (
    EPS_FIX, MAX_ITER, R_MAX, Status, build_polygon, find_fixed_point, gauss_map,
    gauss_map_is_unique, is_gauss_map,
)
from .spaces import Euclidean, Hyperbolic2, Product
from .stability import EPS_CLS, Verdict, classify

EX_USAGE, EX_DATAERR, EX_NOINPUT = 64, 65, 66
VERIFY_EPS = 1e-7
TRACE_SAMPLES = 1000


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EX_USAGE)


# --- machine reports ---------------------------------------------------------

def dumps(obj, indent=0) -> str:
    """JSON with insertion-ordered keys and 17-significant-digit floats."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return g17(obj) if math.isfinite(obj) else json.dumps(str(obj))
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent + 1) for v in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def space_signature(space) -> str:
    if isinstance(space, Product):
        return f"product({space_signature(space.a)},{space_signature(space.b)})"
    if isinstance(space, Euclidean):
        return f"euclidean({space.dimension})"
    if isinstance(space, Hyperbolic2):
        return "hyperbolic"
    desc = repr((sorted(space.vertices), sorted(space.edges), sorted(space.anchor.items())))
    return f"tree({hashlib.sha256(desc.encode()).hexdigest()[:12]})"


# --- vertex CSV --------------------------------------------------------------

def _columns(space, prefix=""):
    if isinstance(space, Product):
        return _columns(space.a, prefix + "a_") + _columns(space.b, prefix + "b_")
    if isinstance(space, Euclidean):
        return [f"{prefix}x{j + 1}" for j in range(space.dimension)]
    if isinstance(space, Hyperbolic2):
        return [prefix + "r", prefix + "phi"]
    return [prefix + k for k in ("kind", "ref", "other", "offset")]


def _cells(space, p):
    if isinstance(space, Product):
        return _cells(space.a, p[0]) + _cells(space.b, p[1])
    if isinstance(space, (Euclidean, Hyperbolic2)):
        return [g17(x) for x in p]
    if p[0] == "v":
        return ["v", p[1], "", "0"]
    if p[0] == "e":
        u, v, _ = space.edges[p[1]]
        return ["e", u, v, g17(p[2])]
    return ["x", p[1], "", g17(p[2])]


def _uncells(space, cells):
    if isinstance(space, Product):
        k = len(_columns(space.a))
        return (_uncells(space.a, cells[:k]), _uncells(space.b, cells[k:]))
    if isinstance(space, Euclidean):
        return tuple(float(c) for c in cells)
    if isinstance(space, Hyperbolic2):
        return space.polar(float(cells[0]), float(cells[1]))
    kind, ref, other, off = cells
    if kind == "v":
        return space.vertex(ref)
    if kind == "e":
        return space.on_edge(ref, other, float(off))
    if kind == "x":
        return space.on_end(ref, float(off))
    raise ValueError(f"unknown tree point kind {kind!r}")


def _coord_doc(space):
    if isinstance(space, Product):
        return f"a_* first factor ({_coord_doc(space.a)}); b_* second factor ({_coord_doc(space.b)})"
    if isinstance(space, Euclidean):
        return "Cartesian coordinates"
    if isinstance(space, Hyperbolic2):
        return "geodesic polar coordinates (r, phi) about the hyperboloid origin"
    return "kind v|e|x; vertex name, edge u v with offset from u, or end id with distance from its anchor"


def polygon_csv(space, vertices) -> str:
    buf = io.StringIO()
    buf.write(f"# gaussmap polygon; space={space_signature(space)}; {_coord_doc(space)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index"] + _columns(space))
    for i, v in enumerate(vertices):
        w.writerow([str(i)] + _cells(space, v))
    return buf.getvalue()


def read_polygon_csv(space, text: str) -> Polygon:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# gaussmap polygon;"):
        raise GaussMapError("missing '# gaussmap polygon' header comment")
    sig = next((f.strip()[6:] for f in lines[0].split(";") if f.strip().startswith("space=")), None)
    if sig != space_signature(space):
        raise GaussMapError(f"polygon space {sig} does not match scene space {space_signature(space)}")
    rows = list(csv.reader(lines[1:]))
    if not rows or rows[0] != ["index"] + _columns(space):
        raise GaussMapError("unexpected CSV header row")
    verts = []
    for n, row in enumerate(rows[1:], 3):
        if len(row) != len(rows[0]):
            raise GaussMapError(f"CSV line {n}: expected {len(rows[0])} cells")
        try:
            verts.append(Point(space, _uncells(space, row[1:])))
        except (ValueError, GaussMapError) as err:
            raise GaussMapError(f"CSV line {n}: {err}") from None
    if not verts:
        raise GaussMapError("polygon has no vertices")
    return Polygon(tuple(verts))


# --- commands ----------------------------------------------------------------

@dataclass
class Outcome:
    code: int = 0
    lines: list = field(default_factory=list)
    report: dict = field(default_factory=dict)
    files: dict = field(default_factory=dict)


def _num(x):
    return repr(float(x) + 0.0)


def _opt(cli, scene, default):
    return cli if cli is not None else (scene if scene is not None else default)


def _need_config(scene):
    if scene.configuration is None:
        raise SceneError("scene has no [config] section", None, "config", scene.name)
    return scene.configuration


def cmd_classify(scene, args) -> Outcome:
    c = _need_config(scene)
    eps = _opt(args.eps_cls, scene.options.eps_cls, EPS_CLS)
    rep = classify(c, scene.space, eps)
    out = Outcome(code={Verdict.STABLE: 0, Verdict.SEMISTABLE: 1, Verdict.UNSTABLE: 2}[rep.verdict])
    w = format_ideal(scene.space, rep.witness.data)
    out.lines = [f"{rep.verdict}, min_slope {_num(rep.min_slope)}", f"witness: {w}"]
    out.report = {"command": "classify", "scene": scene.name,
                  "space": space_signature(scene.space), "verdict": str(rep.verdict),
                  "min_slope": rep.min_slope + 0.0, "witness": w, "eps_cls": eps}
    return out


def _start(scene, args):
    seed = _opt(args.seed, scene.options.seed, None)
    if seed is not None:
        rng = np.random.default_rng(seed)
        return Point(scene.space, scene.space.random_point(rng, 1.0)), seed
    return (scene.options.x0 or scene.space.basepoint), None


def cmd_solve(scene, args) -> Outcome:
    c = _need_config(scene)
    space = scene.space
    eps = _opt(args.eps_fix, scene.options.eps_fix, EPS_FIX)
    max_iter = _opt(args.max_iter, scene.options.max_iter, MAX_ITER)
    r_max = _opt(args.r_max, scene.options.r_max, R_MAX)
    x0, seed = _start(scene, args)
    every = max(1, max_iter // TRACE_SAMPLES)
    rep = find_fixed_point(c, space, x0, eps, max_iter, r_max, trace_every=every)
    out = Outcome(code={Status.CONVERGED: 0, Status.DIVERGED: 3, Status.MAX_ITERATIONS: 4}[rep.status])
    out.lines = [f"status {rep.status}", f"residual {_num(rep.residual)}",
                 f"iterations {rep.iterations}"]
    out.report = {"command": "solve", "scene": scene.name, "space": space_signature(space),
                  "status": str(rep.status), "residual": rep.residual, "iterations": rep.iterations,
                  "eps_fix": eps, "max_iter": max_iter, "r_max": r_max, "seed": seed,
                  "x0": format_point(space, x0.coords), "point": format_point(space, rep.point.coords)}
    if rep.converged:
        poly = build_polygon(c, rep.point)
        out.lines.append(f"closure_defect {_num(poly.closure_defect)}")
        out.report["closure_defect"] = poly.closure_defect
        out.report["vertices"] = [format_point(space, v.coords) for v in poly.vertices]
        if rep.whole_space_fixed:
            out.lines.append("every point is fixed; the polygon starts at x0")
        if args.csv:
            out.files[args.csv] = polygon_csv(space, [v.coords for v in poly.vertices])
        if args.svg:
            out.files[args.svg] = _svg(scene, [v.coords for v in poly.vertices])
    else:
        out.lines.append(f"trace: {len(rep.trace)} residual samples, one every {every} iterations")
    out.report["trace_every"] = every
    out.report["trace"] = list(rep.trace)
    if args.trace:
        out.files[args.trace] = "iteration,residual\n" + "".join(
            f"{k * every},{g17(r)}\n" for k, r in enumerate(rep.trace))
    return out


def _svg(scene, verts):
    if not can_render(scene.space):
        raise UsageError(f"no SVG rendering for {space_signature(scene.space)}")
    ideals = [p.data for p in scene.configuration.points] if scene.configuration else []
    return render_svg(scene.space, verts, ideals, scene.name or "gaussmap")


def _read(path):
    try:
        return Path(path).read_text()
    except FileNotFoundError:
        raise
    except OSError as err:
        raise FileNotFoundError(str(err)) from None


def cmd_verify(scene, args) -> Outcome:
    c = _need_config(scene)
    poly = read_polygon_csv(scene.space, _read(args.polygon))
    eps = args.eps if args.eps is not None else VERIFY_EPS
    chk = is_gauss_map(poly, c, eps)
    out = Outcome(code=0 if chk.ok else 1)
    for i, (a, b) in enumerate(chk.residuals):
        flag = "ok" if a <= eps and b <= eps else "FAIL"
        out.lines.append(f"edge {i}: push {g17(a)} length {g17(b)} {flag}")
    out.lines.append("Gauss map: yes" if chk.ok else
                     "Gauss map: no; failing edges " + " ".join(map(str, chk.failing_edges)))
    out.report = {"command": "verify", "scene": scene.name, "ok": chk.ok, "eps": eps,
                  "residuals": [list(r) for r in chk.residuals], "failing_edges": chk.failing_edges}
    return out


def cmd_gaussmap(scene, args) -> Outcome:
    poly = read_polygon_csv(scene.space, _read(args.polygon))
    gm = gauss_map(poly)
    unique = gauss_map_is_unique(poly)
    out = Outcome()
    out.lines = [f"ideal = {g17(m)} @ {format_ideal(scene.space, p.data)}" for p, m in gm]
    out.lines.append(f"unique {'yes' if unique else 'no'}")
    out.report = {"command": "gaussmap", "scene": scene.name, "unique": unique,
                  "ideals": [format_ideal(scene.space, p.data) for p in gm.points],
                  "weights": list(gm.weights)}
    return out


def cmd_project(scene, args) -> Outcome:
    task = scene.projection
    if task is None:
        raise UsageError("scene has no [subset]/[projection] blocks")
    space = scene.space
    o = task.o or project_point(task.subset, space.basepoint)
    kw = {"t_grid": task.grid} if task.grid else {}
    res = analyze_ray_projection(task.subset, o, task.eta, **kw)
    out = Outcome()
    rows = []
    for s in res.samples:
        rows.append({"t": s.t, "point": format_point(space, s.point.coords),
                     "distance": space.dist(o.coords, s.point.coords),
                     "angle": s.angle if s.angle is not None else None})
    if isinstance(res, ConvergesTo):
        xi = format_ideal(space, res.xi.data)
        out.lines = [f"ConvergesTo angle={res.angle:.6f} xi={xi}"]
        out.report = {"command": "project", "scene": scene.name, "outcome": "ConvergesTo",
                      "xi": xi, "angle": res.angle}
    else:
        p = format_point(space, res.p.coords)
        out.lines = [f"Bounded p={p}"]
        out.report = {"command": "project", "scene": scene.name, "outcome": "Bounded", "p": p}
    out.lines.append(f"{'t':>10} {'d(o, pi)':>22} {'angle':>22}")
    for r in rows:
        a = "-" if r["angle"] is None else g17(r["angle"])
        out.lines.append(f"{g17(r['t']):>10} {g17(r['distance']):>22} {a:>22}")
    out.report["o"] = format_point(space, o.coords)
    out.report["samples"] = rows
    return out


def cmd_render(scene, args) -> Outcome:
    if args.polygon:
        verts = [v.coords for v in read_polygon_csv(scene.space, _read(args.polygon)).vertices]
    else:
        rep = _solve_point(scene, args)
        if not rep.converged:
            raise GaussMapError(f"solver ended with status {rep.status}; nothing to render")
        verts = [v.coords for v in build_polygon(_need_config(scene), rep.point).vertices]
    svg = _svg(scene, verts)
    out = Outcome()
    if args.svg:
        out.files[args.svg] = svg
        out.lines = [f"wrote {args.svg}"]
    else:
        out.lines = [svg.rstrip("\n")]
    out.report = {"command": "render", "scene": scene.name, "vertices": len(verts)}
    return out


def _solve_point(scene, args):
    x0, _ = _start(scene, args)
    return find_fixed_point(scene.configuration, scene.space, x0,
                            _opt(args.eps_fix, scene.options.eps_fix, EPS_FIX),
                            _opt(args.max_iter, scene.options.max_iter, MAX_ITER),
                            _opt(args.r_max, scene.options.r_max, R_MAX))


COMMANDS = {"classify": cmd_classify, "solve": cmd_solve, "verify": cmd_verify,
            "gaussmap": cmd_gaussmap, "project": cmd_project, "render": cmd_render}


def run_one(command, path, args):
    """Run one command on one scene; returns (code, stdout, stderr, report, files)."""
    try:
        scene = load_scene(path)
        out = COMMANDS[command](scene, args)
    except FileNotFoundError as err:
        return EX_NOINPUT, "", f"gaussmap: {err}\n", None, {}
    except UsageError as err:
        return EX_USAGE, "", f"gaussmap: {err}\n", None, {}
    except SceneError as err:
        return err.exit_code, "", f"gaussmap: {err}\n", None, {}
    except GaussMapError as err:
        return EX_DATAERR, "", f"gaussmap: {type(err).__name__}: {err}\n", None, {}
    return out.code, "".join(line + "\n" for line in out.lines), "", out.report, out.files


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--eps-fix", type=float, dest="eps_fix")
    common.add_argument("--eps-cls", type=float, dest="eps_cls")
    common.add_argument("--max-iter", type=int, dest="max_iter")
    common.add_argument("--r-max", type=float, dest="r_max")
    common.add_argument("--seed", type=int)
    common.add_argument("--csv", metavar="PATH")
    common.add_argument("--svg", metavar="PATH")
    common.add_argument("--json", metavar="PATH", help="machine-readable report")
    common.add_argument("--jobs", type=int, default=1, help="scenes to process concurrently")
    common.add_argument("--trace", metavar="PATH", help="solve: residual trace as CSV")
    common.add_argument("--eps", type=float, help="verify: per-edge tolerance (default 1e-7)")

    p = _Parser(prog="gaussmap", description="Stability and polygons for weighted boundary configurations.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser, required=True)
    for name in ("classify", "solve", "project"):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("scenes", nargs="+", metavar="SCENE")
    for name in ("verify", "gaussmap"):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("scene", metavar="SCENE")
        s.add_argument("polygon", metavar="CSV")
    s = sub.add_parser("render", parents=[common])
    s.add_argument("scene", metavar="SCENE")
    s.add_argument("polygon", metavar="CSV", nargs="?")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    scenes = getattr(args, "scenes", None) or [args.scene]
    if len(scenes) > 1 and (args.csv or args.svg or args.trace):
        parser.error("--csv, --svg and --trace take a single scene")
    if args.jobs < 1:
        parser.error("--jobs must be positive")
    if args.jobs > 1 and len(scenes) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(run_one, [args.command] * len(scenes), scenes,
                                    [args] * len(scenes)))
    else:
        results = [run_one(args.command, s, args) for s in scenes]
    reports = []
    for path, (code, stdout, stderr, report, files) in zip(scenes, results):
        if len(scenes) > 1:
            sys.stdout.write(f"== {path}\n")
        sys.stdout.write(stdout)
        sys.stderr.write(stderr)
        for fp, text in files.items():
            Path(fp).write_text(text)
        reports.append(report if report is not None else {"scene": Path(path).stem, "exit": code})
    if args.json:
        doc = reports[0] if len(scenes) == 1 else reports
        Path(args.json).write_text(dumps(doc) + "\n")
    return max(r[0] for r in results)


if __name__ == "__main__":
    sys.exit(main())
