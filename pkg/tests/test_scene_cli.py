import json
import re
import subprocess
import sys
from pathlib import Path

import pytest
from hypothesis import given, settings

from gaussmap.cli import main, read_polygon_csv
from gaussmap.scene import (
    Entry, SceneSyntaxError, SceneValidationError, format_ideal, format_point, load_scene,
    parse_ideal, parse_point, parse_scene,
)
from gaussmap.testkit import Generator, oracle_line_busemann_min

from conftest import SPACE_KINDS, seeds

SCENES = Path(__file__).resolve().parent.parent / "scenes"
E2_HEAD = "gaussmap-scene v1\n[space]\nkind = euclidean\ndimension = 2\n[config]\n"


def scene(name):
    return str(SCENES / f"{name}.gms")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def write(tmp_path, text, name="s.gms"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_parse_errors_are_located():
    with pytest.raises(SceneSyntaxError) as err:
        parse_scene("kind = euclidean\n", "a.gms")
    assert err.value.line == 1 and err.value.exit_code == 64
    with pytest.raises(SceneValidationError) as err:
        parse_scene(E2_HEAD + "ideal = -1 @ dir 1 0\n")
    assert (err.value.line, err.value.field, err.value.exit_code) == (6, "weight", 65)
    with pytest.raises(SceneSyntaxError) as err:
        parse_scene(E2_HEAD + "ideal = 1 @ dir 1 x\n")
    assert err.value.line == 6 and str(err.value).count("line 6") == 1
    with pytest.raises(SceneSyntaxError) as err:
        parse_scene("gaussmap-scene v1\n[spice]\n")
    assert err.value.line == 2


def test_parse_tree_scene():
    sc = load_scene(scene("tree_stable"))
    assert sc.name == "tree_stable"
    assert len(sc.configuration) >= 3


@given(seeds)
@settings(max_examples=30)
def test_point_and_ideal_tokens_round_trip(seed):
    g = Generator(seed)
    e = Entry(1, "x", "")
    for kind in SPACE_KINDS:
        X = g.space(kind)
        p = X.random_point(g.rng, 3.0)
        q = parse_point(X, format_point(X, p), e)
        assert X.dist(p, q) <= 1e-12
        xi = X.random_ideal(g.rng)
        assert X.same_ideal(parse_ideal(X, format_ideal(X, xi), e), xi)


def test_classify_verdicts(capsys):
    code, out, _ = run(capsys, "classify", scene("e2_triple"))
    assert code == 1 and out.startswith("Semistable, min_slope 0.0")
    code, out, _ = run(capsys, "classify", scene("h2_unstable"))
    assert code == 2 and out.startswith("Unstable, min_slope -1.0")
    code, out, _ = run(capsys, "classify", scene("h2_symmetric"))
    assert code == 0 and out.startswith("Stable")


def test_error_exit_codes(capsys, tmp_path):
    code, _, err = run(capsys, "classify", write(tmp_path, E2_HEAD + "ideal = -1 @ dir 1 0\n"))
    assert code == 65 and "line 6" in err
    code, _, _ = run(capsys, "classify", write(tmp_path, "nothing here\n"))
    assert code == 64
    code, _, _ = run(capsys, "classify", str(tmp_path / "missing.gms"))
    assert code == 66
    with pytest.raises(SystemExit) as ex:
        main(["frobnicate"])
    assert ex.value.code == 64
    capsys.readouterr()


def test_solve_triangle_csv(capsys, tmp_path):
    csv = tmp_path / "p.csv"
    code, out, _ = run(capsys, "solve", scene("e2_triple"), "--csv", str(csv))
    assert code == 0
    # the unit vectors are given as decimal angles, so they cancel only to rounding
    defect = float(out.split("closure_defect ")[1].split()[0])
    assert defect <= 1e-12
    rows = [r for r in csv.read_text().splitlines() if r and not r.startswith("#")]
    assert rows[0].startswith("index") and len(rows) == 4


def test_solve_h2_svg(capsys, tmp_path):
    svg = tmp_path / "p.svg"
    js = tmp_path / "r.json"
    code, _, _ = run(capsys, "solve", scene("h2_symmetric"), "--svg", str(svg), "--json", str(js))
    assert code == 0
    text = svg.read_text()
    assert text.startswith("<?xml") and 'version="1.1"' in text and "<path" in text
    assert json.loads(js.read_text())["residual"] <= 1e-10


def test_solve_unstable_writes_trace(capsys, tmp_path):
    tr = tmp_path / "t.csv"
    code, _, _ = run(capsys, "solve", scene("h2_unstable"), "--trace", str(tr))
    assert code == 3
    lines = tr.read_text().splitlines()
    assert lines[0] == "iteration,residual" and len(lines) > 2


def test_solve_max_iterations_exit(capsys):
    code, out, _ = run(capsys, "solve", scene("h2_unstable"), "--max-iter", "10")
    assert code == 4 and "MaxIterations" in out


def test_verify_round_trip_and_perturbation(capsys, tmp_path):
    csv = tmp_path / "p.csv"
    assert run(capsys, "solve", scene("treextree_stable"), "--csv", str(csv))[0] == 0
    code, out, _ = run(capsys, "verify", scene("treextree_stable"), str(csv))
    assert code == 0 and "Gauss map: yes" in out
    lines = csv.read_text().splitlines()
    # nudge the offset of the second vertex's first factor
    head = [i for i, r in enumerate(lines) if r.startswith("index")][0]
    cells = lines[head + 2].split(",")
    cells[4] = repr(float(cells[4]) + 0.05)
    lines[head + 2] = ",".join(cells)
    bad = write(tmp_path, "\n".join(lines) + "\n", "bad.csv")
    code, out, _ = run(capsys, "verify", scene("treextree_stable"), bad)
    assert code == 1 and "failing edges" in out
    failing = out.split("failing edges")[1].split()
    assert "0" in failing or "1" in failing


def test_verify_space_mismatch(capsys, tmp_path):
    csv = tmp_path / "p.csv"
    run(capsys, "solve", scene("e2_triple"), "--csv", str(csv))
    code, _, _ = run(capsys, "verify", scene("h2_symmetric"), str(csv))
    assert code == 65


def test_gaussmap_command(capsys, tmp_path):
    csv = tmp_path / "p.csv"
    run(capsys, "solve", scene("e2_triple"), "--csv", str(csv))
    code, out, _ = run(capsys, "gaussmap", scene("e2_triple"), str(csv))
    assert code == 0 and out.count("ideal = ") == 3 and "unique yes" in out
    poly = read_polygon_csv(load_scene(scene("e2_triple")).space, csv.read_text())
    assert len(poly) == 3


def test_project_commands(capsys, tmp_path):
    code, out, _ = run(capsys, "project", scene("e2_axis_project"))
    assert code == 0 and out.startswith("ConvergesTo angle=0.785398")
    js = tmp_path / "r.json"
    code, out, _ = run(capsys, "project", scene("h2_geodesic_project"), "--json", str(js))
    assert code == 0 and out.startswith("Bounded p=")
    sc = load_scene(scene("h2_geodesic_project"))
    p = parse_point(sc.space, json.loads(js.read_text())["p"], Entry(0, "p", ""))
    want = oracle_line_busemann_min(sc.projection.subset.ends, sc.projection.eta.data)
    assert sc.space.dist(p, want) <= 1e-6
    code, _, _ = run(capsys, "project", scene("e2_triple"))
    assert code == 64


def test_render_tree(capsys, tmp_path):
    svg = tmp_path / "t.svg"
    code, _, _ = run(capsys, "render", scene("tree_stable"), "--svg", str(svg))
    assert code == 0 and "<polyline" in svg.read_text()
    code, _, _ = run(capsys, "render", scene("treextree_stable"))
    assert code == 64


def test_reports_deterministic(capsys, tmp_path):
    for args in (("solve", scene("h2_pentagon")), ("solve", scene("tree_stable"), "--seed", "11"),
                 ("classify", scene("treextree_unstable")), ("project", scene("h2xline_project"))):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        run(capsys, *args, "--json", str(a))
        run(capsys, *args, "--json", str(b))
        assert a.read_bytes() == b.read_bytes()


def test_jobs_matches_serial(capsys, tmp_path):
    names = [scene(n) for n in ("e2_triple", "h2_symmetric", "tree_stable", "treextree_unstable")]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    ca = run(capsys, "classify", *names, "--json", str(a))[0]
    cb = run(capsys, "classify", *names, "--json", str(b), "--jobs", "2")[0]
    assert ca == cb == 2
    assert a.read_bytes() == b.read_bytes()
    assert len(json.loads(a.read_text())) == 4


def test_seeded_start(capsys, tmp_path):
    a = tmp_path / "a.json"
    run(capsys, "solve", scene("h2_symmetric"), "--seed", "3", "--json", str(a))
    rep = json.loads(a.read_text())
    assert rep["seed"] == 3 and rep["x0"] != "polar 0 0"


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "gaussmap", "classify", scene("tree_unstable")],
                       capture_output=True, text=True)
    assert r.returncode == 2 and r.stdout.startswith("Unstable")


def test_floats_use_17_digits(capsys, tmp_path):
    a = tmp_path / "a.json"
    run(capsys, "solve", scene("h2_symmetric"), "--json", str(a))
    text = a.read_text()
    nums = re.findall(r"(?<![\w.])-?\d+\.\d+(?:e[-+]?\d+)?|(?<![\w.])-?\d+e[-+]?\d+", text)
    assert nums
    for tok in nums:
        assert format(float(tok), ".17g") == tok or float(tok) == float(format(float(tok), ".17g"))
        assert len(tok.lstrip("-").split("e")[0].replace(".", "").lstrip("0")) <= 17
